//! Scenario configs, the runner, and on-disk result bundles.
//!
//! A config is a TOML file:
//!
//! ```toml
//! scenario = "sech_figure1"
//!
//! [parameters]
//! lambda = 20
//! k = 250.0
//! states = 5
//!
//! [grid]
//! x_min = -6.0
//! x_max = 6.0
//! nodes_per_period = 32
//! ```
//!
//! Parameters a scenario does not use are rejected, as are unknown keys.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{pt_amplitude, pt_energies, pt_lambda};
use crate::beams::{to_modulated_form, BeamSetup};
use crate::correction::{l2_distance, overlap};
use crate::error::{Error, Result};
use crate::experiments::{
    averaging_sweep, energy_sweep, finite_well_grid_study, ground_energy_convergence, sech_comparison, solve_effective,
    solve_full, square_comparison, GridSpec, SquareSetup, StateComparison,
};
use crate::potential::ModulatedPotential;
use crate::profile::PeriodicProfile;
use crate::solver::Grid;
use crate::superpotential::{integrate_averaged, integrate_exact, AveragedField, RiccatiSetup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    SechFigure1,
    EnergiesFigure2,
    SquareCosFigure3,
    SquareSinFigure4,
    Beams,
    ConvergenceSweep,
    AveragingSweep,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::SechFigure1,
        ScenarioKind::EnergiesFigure2,
        ScenarioKind::SquareCosFigure3,
        ScenarioKind::SquareSinFigure4,
        ScenarioKind::Beams,
        ScenarioKind::ConvergenceSweep,
        ScenarioKind::AveragingSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::SechFigure1 => "sech_figure1",
            ScenarioKind::EnergiesFigure2 => "energies_figure2",
            ScenarioKind::SquareCosFigure3 => "square_cos_figure3",
            ScenarioKind::SquareSinFigure4 => "square_sin_figure4",
            ScenarioKind::Beams => "beams",
            ScenarioKind::ConvergenceSweep => "convergence_sweep",
            ScenarioKind::AveragingSweep => "averaging_sweep",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::SechFigure1 => "k·cos(kx)·a·sech(x): exact states vs Pöschl–Teller eigenfunctions",
            ScenarioKind::EnergiesFigure2 => "bound energies vs well depth a at fixed k, exact vs -(λ-n)²",
            ScenarioKind::SquareCosFigure3 => "square envelope, v = cos, phase-locked k: exact vs finite well",
            ScenarioKind::SquareSinFigure4 => "square envelope, v = sin: exact vs effective well plus edge deltas",
            ScenarioKind::Beams => "crossed Gaussian beams mapped to the modulated form",
            ScenarioKind::ConvergenceSweep => "ground-energy error vs k for the sech well",
            ScenarioKind::AveragingSweep => "sup |W' - W̄'| vs k for the sech well",
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::SechFigure1 => &["a", "lambda", "k", "states"],
            ScenarioKind::EnergiesFigure2 => &["a_values", "a_range", "k"],
            ScenarioKind::SquareCosFigure3 | ScenarioKind::SquareSinFigure4 => {
                &["height", "half_width", "target_k", "edge_phase", "states"]
            }
            ScenarioKind::Beams => &["beam", "states"],
            ScenarioKind::ConvergenceSweep => &["a", "k_values"],
            ScenarioKind::AveragingSweep => &["a", "k_values", "interval", "w0"],
        }
    }

    fn default_grid(self) -> GridSpec {
        match self {
            ScenarioKind::Beams => GridSpec::window(-12.0, 12.0),
            ScenarioKind::ConvergenceSweep => GridSpec::window(-8.0, 8.0),
            ScenarioKind::SquareCosFigure3 | ScenarioKind::SquareSinFigure4 => GridSpec::window(-4.0, 4.0),
            _ => GridSpec::default(),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Uniform sweep `start, start + step, …, stop` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_range: Option<Sweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamSetup>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
}

impl Parameters {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { out.push(stringify!($f)); } )* };
        }
        check!(
            a, lambda, k, target_k, states, a_values, a_range, k_values, height, half_width, edge_phase, beam,
            interval, w0
        );
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Default output directory; the CLI's `--out` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            parameters: Parameters::default(),
            grid: None,
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().replace('\n', " ")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid.unwrap_or_else(|| self.scenario.default_grid())
    }

    /// Checks parameter names and ranges without running anything heavy.
    pub fn validate(&self) -> Result<()> {
        self.plan().map(|_| ())
    }

    fn plan(&self) -> Result<Plan> {
        let p = &self.parameters;
        let allowed = self.scenario.allowed();
        if let Some(extra) = p.present().into_iter().find(|n| !allowed.contains(n)) {
            return Err(Error::Config(format!(
                "parameter `{extra}` is not used by scenario {} (allowed: {})",
                self.scenario,
                allowed.join(", ")
            )));
        }
        let grid = self.grid_spec();
        if !(grid.x_min < grid.x_max) || !grid.x_min.is_finite() || !grid.x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need x_min < x_max, got [{}, {}]",
                grid.x_min, grid.x_max
            )));
        }
        if !(grid.max_dx > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "max_dx must be positive, got {}",
                grid.max_dx
            )));
        }
        if grid.nodes_per_period < crate::solver::MIN_NODES_PER_PERIOD {
            return Err(Error::InvalidGrid(format!(
                "nodes_per_period = {} is below the minimum {}",
                grid.nodes_per_period,
                crate::solver::MIN_NODES_PER_PERIOD
            )));
        }
        let states = p.states.unwrap_or(5);
        if states == 0 {
            return Err(param("states", "must be at least 1".into()));
        }
        let k_values = || -> Result<Vec<f64>> {
            let ks = p.k_values.clone().unwrap_or_else(|| vec![250.0, 500.0, 1000.0, 2000.0]);
            if ks.len() < 2 {
                return Err(param("k_values", "need at least two values".into()));
            }
            for &k in &ks {
                positive("k_values", k)?;
            }
            Ok(ks)
        };

        Ok(match self.scenario {
            ScenarioKind::SechFigure1 => {
                let lambda = match (p.lambda, p.a) {
                    (Some(_), Some(_)) => return Err(Error::Config("give either `a` or `lambda`, not both".into())),
                    (Some(l), None) => l,
                    (None, a) => integer_lambda(a.unwrap_or(2.0 * 210f64.sqrt()))?,
                };
                if lambda == 0 {
                    return Err(param("lambda", "must be at least 1".into()));
                }
                if states as u32 > lambda {
                    return Err(param(
                        "states",
                        format!("λ = {lambda} has only {lambda} closed-form states"),
                    ));
                }
                Plan::Sech {
                    lambda,
                    k: positive("k", p.k.unwrap_or(250.0))?,
                    states,
                }
            }
            ScenarioKind::EnergiesFigure2 => {
                let mut a_values = p.a_values.clone().unwrap_or_default();
                if let Some(r) = p.a_range {
                    if r.count == 0 {
                        return Err(param("a_range", "count must be positive".into()));
                    }
                    a_values.extend(r.values());
                }
                if a_values.is_empty() {
                    a_values = vec![5.0, 10.0, 15.0, 20.0, 25.0, 29.0];
                }
                for &a in &a_values {
                    positive("a_values", a)?;
                }
                a_values.sort_by(f64::total_cmp);
                a_values.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs());
                Plan::Energies {
                    a_values,
                    k: positive("k", p.k.unwrap_or(250.0))?,
                }
            }
            ScenarioKind::SquareCosFigure3 | ScenarioKind::SquareSinFigure4 => {
                let setup = SquareSetup {
                    height: positive("height", p.height.unwrap_or(20.0))?,
                    half_width: positive("half_width", p.half_width.unwrap_or(1.0))?,
                    target_k: positive("target_k", p.target_k.unwrap_or(250.0))?,
                    edge_phase: finite("edge_phase", p.edge_phase.unwrap_or(0.0))?,
                };
                if !(grid.x_min < -setup.half_width && setup.half_width < grid.x_max) {
                    return Err(Error::InvalidGrid("the window must contain the whole well".into()));
                }
                Plan::Square { setup, states }
            }
            ScenarioKind::Beams => {
                let beam = p.beam.unwrap_or(BeamSetup {
                    kappa: 200.0,
                    alpha: std::f64::consts::FRAC_PI_6,
                    b: 2.0,
                    amplitude: 4000.0 * std::f64::consts::FRAC_PI_6.cos(),
                    cancel_background: true,
                });
                beam.validate()?;
                Plan::Beams { beam, states }
            }
            ScenarioKind::ConvergenceSweep => Plan::Convergence {
                a: positive("a", p.a.unwrap_or(5.0))?,
                k_values: k_values()?,
            },
            ScenarioKind::AveragingSweep => {
                let [x0, x1] = p.interval.unwrap_or([-3.0, 0.0]);
                if !(x0 < x1) || !x0.is_finite() || !x1.is_finite() {
                    return Err(param("interval", format!("need x0 < x1, got [{x0}, {x1}]")));
                }
                Plan::Averaging {
                    a: positive("a", p.a.unwrap_or(1.0))?,
                    k_values: k_values()?,
                    x0,
                    x1,
                    w0: finite("w0", p.w0.unwrap_or(0.0))?,
                }
            }
        })
    }
}

fn param(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(param(name, format!("must be positive and finite, got {v}")))
    }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(param(name, format!("must be finite, got {v}")))
    }
}

fn integer_lambda(a: f64) -> Result<u32> {
    let lambda = pt_lambda(positive("a", a)?);
    let rounded = lambda.round();
    if (lambda - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(param(
            "a",
            format!("closed-form eigenfunctions need integer λ; a = {a} gives λ = {lambda}"),
        ));
    }
    Ok(rounded as u32)
}

/// Resolved, validated parameters.
#[derive(Clone, Debug)]
enum Plan {
    Sech {
        lambda: u32,
        k: f64,
        states: usize,
    },
    Energies {
        a_values: Vec<f64>,
        k: f64,
    },
    Square {
        setup: SquareSetup,
        states: usize,
    },
    Beams {
        beam: BeamSetup,
        states: usize,
    },
    Convergence {
        a: f64,
        k_values: Vec<f64>,
    },
    Averaging {
        a: f64,
        k_values: Vec<f64>,
        x0: f64,
        x1: f64,
        w0: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Float(x) => format_float(x),
            Cell::Int(i) => i.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

/// Round-trip float formatting with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Float(x) => x,
                    Cell::Int(i) => i as f64,
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub scenario: ScenarioKind,
    /// Resolved parameters, grid, k and code version.
    pub metadata: BTreeMap<String, Value>,
    /// Scalar diagnostics.
    pub metrics: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
}

impl ResultBundle {
    fn new(config: &ScenarioConfig) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("scenario".into(), json!(config.scenario.name()));
        metadata.insert(
            "parameters".into(),
            serde_json::to_value(&config.parameters).unwrap_or(Value::Null),
        );
        metadata.insert("code_version".into(), json!(env!("CARGO_PKG_VERSION")));
        Self {
            scenario: config.scenario,
            metadata,
            metrics: BTreeMap::new(),
            tables: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).and_then(Value::as_f64)
    }

    fn set_grid(&mut self, grid: &Grid) {
        self.metadata.insert(
            "grid".into(),
            json!({ "x_min": grid.x_min(), "x_max": grid.x_max(), "nodes": grid.len(), "dx": grid.dx() }),
        );
    }

    fn metric_value(&mut self, name: &str, v: impl Serialize) {
        self.metrics
            .insert(name.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }
}

/// Runs a scenario on the current rayon pool.
pub fn run(config: &ScenarioConfig) -> Result<ResultBundle> {
    let plan = config.plan()?;
    let spec = config.grid_spec();
    let mut bundle = ResultBundle::new(config);
    bundle.metadata.insert("grid_spec".into(), serde_json::to_value(spec)?);
    let context = |e: Error| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", config.scenario)),
        other => other,
    };
    log::info!("running {}", config.scenario);
    match plan {
        Plan::Sech { lambda, k, states } => run_sech(&mut bundle, lambda, k, states, &spec),
        Plan::Energies { a_values, k } => run_energies(&mut bundle, &a_values, k, &spec),
        Plan::Square { setup, states } => run_square(&mut bundle, config.scenario, &setup, states, &spec),
        Plan::Beams { beam, states } => run_beams(&mut bundle, &beam, states, &spec),
        Plan::Convergence { a, k_values } => run_convergence(&mut bundle, a, &k_values, &spec),
        Plan::Averaging {
            a,
            k_values,
            x0,
            x1,
            w0,
        } => run_averaging(&mut bundle, a, &k_values, x0, x1, w0),
    }
    .map_err(context)?;
    Ok(bundle)
}

/// Runs a scenario on a dedicated pool of `threads` workers (0 = rayon's default).
pub fn run_with_threads(config: &ScenarioConfig, threads: usize) -> Result<ResultBundle> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run(config))
}

fn eigenfunction_tables(bundle: &mut ResultBundle, c: &StateComparison, corrected: bool) {
    let nodes = c.grid.nodes();
    for n in 0..c.rows.len() {
        let cols: &[&str] = if corrected {
            &["x", "psi_exact", "psi_effective", "psi_corrected"]
        } else {
            &["x", "psi_exact", "psi_effective"]
        };
        let mut t = Table::new(format!("eigenfunction_{n}"), cols);
        for (j, &x) in nodes.iter().enumerate() {
            let mut row = vec![x.into(), c.exact[n][j].into(), c.effective[n][j].into()];
            if corrected {
                row.push(c.corrected[n][j].into());
            }
            t.push(row);
        }
        bundle.tables.push(t);
    }
}

fn comparison_table(c: &StateComparison, leading: &[(&str, f64)]) -> Table {
    let mut cols: Vec<&str> = leading.iter().map(|(n, _)| *n).collect();
    cols.extend([
        "n",
        "energy_exact",
        "energy_effective",
        "nodes_exact",
        "overlap",
        "l2_uncorrected",
        "l2_corrected",
    ]);
    let mut t = Table::new("states", &cols);
    for r in &c.rows {
        let mut row: Vec<Cell> = leading.iter().map(|(_, v)| Cell::Float(*v)).collect();
        row.extend::<[Cell; 7]>([
            r.n.into(),
            r.energy_exact.into(),
            r.energy_effective.into(),
            r.nodes_exact.into(),
            r.overlap.into(),
            r.l2_uncorrected.into(),
            r.l2_corrected.into(),
        ]);
        t.push(row);
    }
    t
}

fn comparison_metrics(bundle: &mut ResultBundle, c: &StateComparison) {
    let min_overlap = c.rows.iter().map(|r| r.overlap).fold(f64::INFINITY, f64::min);
    bundle.metric_value("min_overlap", min_overlap);
    bundle.metric_value(
        "correction_improves_all",
        c.rows.iter().all(|r| r.l2_corrected < r.l2_uncorrected),
    );
    bundle.metric_value("node_counts", c.rows.iter().map(|r| r.nodes_exact).collect::<Vec<_>>());
}

fn run_sech(bundle: &mut ResultBundle, lambda: u32, k: f64, states: usize, spec: &GridSpec) -> Result<()> {
    let a = pt_amplitude(f64::from(lambda));
    let c = sech_comparison(lambda, k, states, spec)?;
    bundle.metadata.insert("k".into(), json!(k));
    bundle.metadata.insert("a".into(), json!(a));
    bundle.metadata.insert("lambda".into(), json!(lambda));
    bundle.set_grid(&c.grid);
    bundle.tables.push(comparison_table(&c, &[("a", a), ("k", k)]));
    comparison_metrics(bundle, &c);
    eigenfunction_tables(bundle, &c, true);
    Ok(())
}

fn run_energies(bundle: &mut ResultBundle, a_values: &[f64], k: f64, spec: &GridSpec) -> Result<()> {
    bundle.metadata.insert("k".into(), json!(k));
    bundle.metadata.insert("a_values".into(), json!(a_values));
    let rows = energy_sweep(a_values, k, spec)?;
    let mut t = Table::new(
        "energies",
        &[
            "a",
            "k",
            "lambda",
            "n",
            "energy_exact",
            "energy_analytic",
            "relative_error",
        ],
    );
    for r in &rows {
        t.push(vec![
            r.a.into(),
            r.k.into(),
            r.lambda.into(),
            r.n.into(),
            r.energy_exact.into(),
            r.energy_analytic.into(),
            r.relative_error.into(),
        ]);
    }
    bundle.tables.push(t);

    // smooth analytic curves for re-plotting
    let mut curves = Table::new("analytic_curves", &["a", "lambda", "n", "energy_analytic"]);
    let a_max = a_values.iter().cloned().fold(0.0, f64::max);
    let samples = 400;
    for i in 1..=samples {
        let a = a_max * i as f64 / samples as f64;
        for (n, e) in pt_energies(a).into_iter().enumerate() {
            curves.push(vec![a.into(), pt_lambda(a).into(), n.into(), e.into()]);
        }
    }
    bundle.tables.push(curves);

    let checked: Vec<_> = rows.iter().filter(|r| r.energy_analytic.abs() >= 4.0).collect();
    bundle.metric_value(
        "max_relative_error_deep_states",
        checked.iter().map(|r| r.relative_error).fold(0.0, f64::max),
    );
    bundle.metric_value("deep_states_checked", checked.len());
    Ok(())
}

fn run_square(
    bundle: &mut ResultBundle,
    kind: ScenarioKind,
    setup: &SquareSetup,
    states: usize,
    spec: &GridSpec,
) -> Result<()> {
    let profile = match kind {
        ScenarioKind::SquareSinFigure4 => PeriodicProfile::sin(),
        _ => PeriodicProfile::cos(),
    };
    let s = square_comparison(profile, setup, states, spec)?;
    let c = &s.comparison;
    bundle.metadata.insert("target_k".into(), json!(setup.target_k));
    bundle.metadata.insert("k".into(), json!(c.k));
    bundle.metadata.insert(
        "profile".into(),
        json!(if kind == ScenarioKind::SquareSinFigure4 {
            "sin"
        } else {
            "cos"
        }),
    );
    bundle.metadata.insert(
        "effective_reference".into(),
        json!(if s.oracle_reference {
            "finite_well_oracle"
        } else {
            "numerical_effective_hamiltonian"
        }),
    );
    bundle.set_grid(&c.grid);
    bundle
        .tables
        .push(comparison_table(c, &[("height", setup.height), ("k", c.k)]));
    let mut deltas = Table::new("deltas", &["k", "position", "strength"]);
    for d in &s.deltas {
        deltas.push(vec![c.k.into(), d.position.into(), d.strength.into()]);
    }
    bundle.tables.push(deltas);
    comparison_metrics(bundle, c);
    bundle.metric_value("bound_exact", s.bound_exact);
    bundle.metric_value("bound_oracle", s.bound_oracle);
    bundle.metric_value("bound_effective", s.bound_effective);
    bundle.metric_value("ground_density_left", s.ground_density_halves.0);
    bundle.metric_value("ground_density_right", s.ground_density_halves.1);
    eigenfunction_tables(bundle, c, true);
    Ok(())
}

fn run_beams(bundle: &mut ResultBundle, beam: &BeamSetup, states: usize, spec: &GridSpec) -> Result<()> {
    let bp = to_modulated_form(beam)?;
    let mp: &ModulatedPotential = &bp.potential;
    let k = mp.k();
    bundle.metadata.insert("k".into(), json!(k));
    bundle.metadata.insert("beam".into(), serde_json::to_value(beam)?);
    bundle.metric_value("scale_separation", bp.scale_separation);
    let grid = spec.grid(Some(k))?;
    bundle.set_grid(&grid);
    let eff = mp.effective_potential();
    let exact = solve_full(mp, &grid, states)?;
    let smooth = solve_effective(&eff, &grid, states)?;
    let dx = grid.dx();
    let mut t = Table::new(
        "states",
        &[
            "k",
            "n",
            "energy_exact",
            "energy_effective",
            "nodes_exact",
            "overlap",
            "l2_uncorrected",
        ],
    );
    let mut min_overlap = f64::INFINITY;
    for n in 0..states {
        let ov = overlap(exact.state(n), smooth.state(n), dx);
        min_overlap = min_overlap.min(ov);
        t.push(vec![
            k.into(),
            n.into(),
            exact.energies()[n].into(),
            smooth.energies()[n].into(),
            exact.node_counts()[n].into(),
            ov.into(),
            l2_distance(exact.state(n), smooth.state(n), dx).into(),
        ]);
    }
    bundle.tables.push(t);
    bundle.metric_value("min_overlap", min_overlap);
    let c = StateComparison::from_spectra(mp, &exact, &smooth);
    eigenfunction_tables(bundle, &c, true);
    Ok(())
}

fn run_convergence(bundle: &mut ResultBundle, a: f64, k_values: &[f64], spec: &GridSpec) -> Result<()> {
    let study = ground_energy_convergence(a, k_values, spec)?;
    bundle.metadata.insert("a".into(), json!(a));
    bundle.metadata.insert("k_values".into(), json!(k_values));
    let mut t = Table::new(
        "convergence",
        &["a", "k", "energy_exact", "energy_effective", "error", "state_error"],
    );
    for r in &study.rows {
        t.push(vec![
            a.into(),
            r.k.into(),
            r.energy_exact.into(),
            r.energy_effective.into(),
            r.error.into(),
            r.state_error.into(),
        ]);
    }
    bundle.tables.push(t);
    bundle.metric_value("energy_slope", study.energy_slope);
    bundle.metric_value("state_slope", study.state_slope);
    Ok(())
}

fn run_averaging(bundle: &mut ResultBundle, a: f64, k_values: &[f64], x0: f64, x1: f64, w0: f64) -> Result<()> {
    let rows = averaging_sweep(a, k_values, x0, x1, w0)?;
    bundle.metadata.insert("a".into(), json!(a));
    bundle.metadata.insert("k_values".into(), json!(k_values));
    bundle.metadata.insert("interval".into(), json!([x0, x1]));
    let mut t = Table::new("averaging", &["a", "k", "sup_error", "ratio"]);
    for r in &rows {
        t.push(vec![
            a.into(),
            r.k.into(),
            r.sup_error.into(),
            r.ratio.unwrap_or(f64::NAN).into(),
        ]);
    }
    bundle.tables.push(t);
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    bundle.metric_value("ratios", &ratios);

    // W′ trajectories at the smallest k, thinned to a plottable size
    let k = k_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mp = ModulatedPotential::new(
        k,
        PeriodicProfile::cos(),
        crate::potential::Envelope::sech(a),
        crate::potential::Background::Zero,
    )?;
    let setup = RiccatiSetup::new(x0, x1, w0, k);
    let exact = integrate_exact(&mp, &setup)?;
    let avg = integrate_averaged(&AveragedField::from_potential(&mp), &setup)?;
    let len = exact.x.len().min(avg.x.len());
    let stride = (len / 4000).max(1);
    let mut traj = Table::new("trajectory", &["k", "x", "w_prime_exact", "w_prime_averaged"]);
    for i in (0..len).step_by(stride) {
        traj.push(vec![
            k.into(),
            exact.x[i].into(),
            exact.w_prime[i].into(),
            avg.w_prime[i].into(),
        ]);
    }
    bundle.tables.push(traj);
    Ok(())
}

/// Writes `summary.json` and one CSV per table into `dir`.
pub fn emit(bundle: &ResultBundle, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let summary = json!({
        "metadata": bundle.metadata,
        "metrics": bundle.metrics,
        "tables": bundle.tables.iter().map(|t| json!({
            "file": format!("{}.csv", t.name),
            "columns": t.columns,
            "rows": t.rows.len(),
        })).collect::<Vec<_>>(),
    });
    let path = dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    written.push(path);
    for t in &bundle.tables {
        let path = dir.join(format!("{}.csv", t.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&t.columns)?;
        for row in &t.rows {
            w.write_record(row.iter().map(|c| c.render()))?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Bare finite-well check of the eigensolver, exposed for examples and tests.
pub fn finite_well_table(depth: f64, half_width: f64, states: usize, spec: &GridSpec) -> Result<Table> {
    let (coarse, fine) = finite_well_grid_study(depth, half_width, states, spec)?;
    let mut t = Table::new(
        "finite_well_grid",
        &["n", "energy_oracle", "error_coarse", "error_fine", "reduction"],
    );
    for (n, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        t.push(vec![
            n.into(),
            c.energy_oracle.into(),
            c.error.into(),
            f.error.into(),
            (c.error / f.error).into(),
        ]);
    }
    Ok(t)
}
