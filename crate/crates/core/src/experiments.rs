//! End-to-end comparisons between the full oscillating Hamiltonian, the
//! effective Hamiltonian and the analytic oracles. The scenario runner and
//! the acceptance tests both go through these functions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{pt_amplitude, pt_energies, pt_lambda, pt_wavefunction, FiniteWell};
use crate::correction::{inner, l2_distance, oscillatory_correction, overlap};
use crate::error::{Error, Result};
use crate::potential::{
    find_phase_locked_k, Background, DeltaTerm, EffectivePotential, Envelope, ModulatedPotential, PhaseConstraint,
};
use crate::profile::PeriodicProfile;
use crate::solver::{assemble, lowest_eigenpairs, Grid, Spectrum, MAX_DX};
use crate::superpotential::{averaging_error, RiccatiSetup};

/// Spatial window and resolution for a solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_x_min")]
    pub x_min: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    /// Nodes per oscillation period 2π/k (at least 16).
    #[serde(default = "default_npp")]
    pub nodes_per_period: f64,
    #[serde(default = "default_max_dx")]
    pub max_dx: f64,
}

fn default_x_min() -> f64 {
    -6.0
}
fn default_x_max() -> f64 {
    6.0
}
fn default_npp() -> f64 {
    32.0
}
fn default_max_dx() -> f64 {
    MAX_DX
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: default_x_min(),
            x_max: default_x_max(),
            nodes_per_period: default_npp(),
            max_dx: default_max_dx(),
        }
    }
}

impl GridSpec {
    pub fn window(x_min: f64, x_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            ..Self::default()
        }
    }

    /// Grid for an oscillation wavenumber `k` (`None` for smooth potentials).
    pub fn grid(&self, k: Option<f64>) -> Result<Grid> {
        let dx = match k {
            Some(k) => {
                if self.nodes_per_period < crate::solver::MIN_NODES_PER_PERIOD {
                    return Err(Error::InvalidGrid(format!(
                        "nodes_per_period = {} is below the minimum {}",
                        self.nodes_per_period,
                        crate::solver::MIN_NODES_PER_PERIOD
                    )));
                }
                (crate::profile::TWO_PI / (self.nodes_per_period * k)).min(self.max_dx)
            }
            None => self.max_dx,
        };
        Grid::with_max_spacing(self.x_min, self.x_max, dx.min(MAX_DX))
    }
}

/// Lowest `m` eigenpairs of the full Hamiltonian.
pub fn solve_full(mp: &ModulatedPotential, grid: &Grid, m: usize) -> Result<Spectrum> {
    let h = assemble(grid, |x| mp.evaluate(x), &[])?;
    lowest_eigenpairs(&h, m)
}

/// Lowest `m` eigenpairs of the effective Hamiltonian, delta terms included.
pub fn solve_effective(eff: &EffectivePotential, grid: &Grid, m: usize) -> Result<Spectrum> {
    let h = assemble(grid, |x| eff.smooth(x), eff.deltas())?;
    lowest_eigenpairs(&h, m)
}

/// Lowest `m` eigenvalues, Richardson-extrapolated from `grid` and its
/// refinement assuming an O(dx²) leading error.
pub fn extrapolated_energies<V>(grid: &Grid, potential: V, deltas: &[DeltaTerm], m: usize) -> Result<Vec<f64>>
where
    V: Fn(f64) -> f64,
{
    let coarse = lowest_eigenpairs(&assemble(grid, &potential, deltas)?, m)?;
    let fine = lowest_eigenpairs(&assemble(&grid.refined(), &potential, deltas)?, m)?;
    Ok(coarse
        .energies()
        .iter()
        .zip(fine.energies())
        .map(|(c, f)| f + (f - c) / 3.0)
        .collect())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Signed copy of `b` whose inner product with `a` is non-negative.
fn sign_matched(a: &[f64], b: &[f64], dx: f64) -> Vec<f64> {
    if inner(a, b, dx) < 0.0 {
        b.iter().map(|x| -x).collect()
    } else {
        b.to_vec()
    }
}

/// One state of an exact-vs-effective comparison.
#[derive(Clone, Debug, Serialize)]
pub struct StateRow {
    pub n: usize,
    pub energy_exact: f64,
    /// Energy from the effective Hamiltonian (analytic or semi-analytic).
    pub energy_effective: f64,
    pub nodes_exact: usize,
    /// `|<ψ_exact|ψ̄>|` after normalization.
    pub overlap: f64,
    /// `‖ψ_exact − ψ̄‖₂` after normalization and sign matching.
    pub l2_uncorrected: f64,
    /// `‖ψ_exact − (ψ̄ + ξ)‖₂` after normalization and sign matching.
    pub l2_corrected: f64,
}

/// Exact eigenstates next to their effective-theory counterparts on one grid.
#[derive(Clone, Debug)]
pub struct StateComparison {
    pub k: f64,
    pub grid: Grid,
    pub rows: Vec<StateRow>,
    pub exact: Vec<Vec<f64>>,
    /// Smoothed states, sign-matched to the exact ones.
    pub effective: Vec<Vec<f64>>,
    /// `ψ̄ + ξ`, sign-matched, not renormalized.
    pub corrected: Vec<Vec<f64>>,
}

impl StateComparison {
    /// Pairs the states of two numerical spectra on the same grid.
    pub fn from_spectra(mp: &ModulatedPotential, exact: &Spectrum, smooth: &Spectrum) -> Self {
        let m = exact.len().min(smooth.len());
        Self::build(mp, exact, smooth.states()[..m].to_vec(), &smooth.energies()[..m])
    }

    fn build(mp: &ModulatedPotential, exact: &Spectrum, effective: Vec<Vec<f64>>, energies_effective: &[f64]) -> Self {
        let grid = *exact.grid();
        let dx = grid.dx();
        let mut rows = Vec::new();
        let mut eff_out = Vec::new();
        let mut corr_out = Vec::new();
        for (n, psi_bar) in effective.into_iter().enumerate() {
            let psi = exact.state(n);
            let psi_bar = sign_matched(psi, &psi_bar, dx);
            let xi = oscillatory_correction(mp, &grid, &psi_bar);
            let corrected: Vec<f64> = psi_bar.iter().zip(&xi).map(|(a, b)| a + b).collect();
            rows.push(StateRow {
                n,
                energy_exact: exact.energies()[n],
                energy_effective: energies_effective[n],
                nodes_exact: exact.node_counts()[n],
                overlap: overlap(psi, &psi_bar, dx),
                l2_uncorrected: l2_distance(psi, &psi_bar, dx),
                l2_corrected: l2_distance(psi, &corrected, dx),
            });
            eff_out.push(psi_bar);
            corr_out.push(corrected);
        }
        Self {
            k: mp.k(),
            grid,
            rows,
            exact: exact.states().to_vec(),
            effective: eff_out,
            corrected: corr_out,
        }
    }
}

/// `k·cos(kx)·a·sech(x)` with `λ` integer: exact states against the
/// associated-Legendre eigenfunctions of the Pöschl–Teller well.
pub fn sech_comparison(lambda: u32, k: f64, m: usize, spec: &GridSpec) -> Result<StateComparison> {
    if m as u32 > lambda {
        return Err(Error::InvalidParameter {
            name: "states",
            reason: format!("λ = {lambda} admits at most {lambda} states with closed forms"),
        });
    }
    let a = pt_amplitude(f64::from(lambda));
    let mp = ModulatedPotential::new(k, PeriodicProfile::cos(), Envelope::sech(a), Background::Zero)?;
    let grid = spec.grid(Some(k))?;
    let exact = solve_full(&mp, &grid, m)?;
    let nodes = grid.nodes();
    let effective = (0..m as u32)
        .map(|n| {
            nodes
                .iter()
                .map(|&x| pt_wavefunction(n, a, x))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StateComparison::build(&mp, &exact, effective, &pt_energies(a)[..m]))
}

/// One point of the energy-vs-depth sweep.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyRow {
    pub a: f64,
    pub k: f64,
    pub n: usize,
    pub lambda: f64,
    pub energy_exact: f64,
    pub energy_analytic: f64,
    pub relative_error: f64,
}

/// Bound energies of `k·cos(kx)·a·sech(x)` (grid-extrapolated) against
/// `−(λ−n)²`, for every `a` in `a_values`. States whose analytic energy is
/// not strictly negative are skipped.
pub fn energy_sweep(a_values: &[f64], k: f64, spec: &GridSpec) -> Result<Vec<EnergyRow>> {
    let per_a: Vec<Result<Vec<EnergyRow>>> = a_values
        .par_iter()
        .map(|&a| {
            let analytic: Vec<f64> = pt_energies(a).into_iter().filter(|&e| e < 0.0).collect();
            if analytic.is_empty() {
                return Ok(Vec::new());
            }
            let mp = ModulatedPotential::new(k, PeriodicProfile::cos(), Envelope::sech(a), Background::Zero)?;
            let grid = spec.grid(Some(k))?;
            let m = analytic.len().min(grid.len());
            let exact = extrapolated_energies(&grid, |x| mp.evaluate(x), &[], m)?;
            Ok(exact
                .iter()
                .zip(&analytic)
                .enumerate()
                .map(|(n, (&e, &ea))| EnergyRow {
                    a,
                    k,
                    n,
                    lambda: pt_lambda(a),
                    energy_exact: e,
                    energy_analytic: ea,
                    relative_error: ((e - ea) / ea).abs(),
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_a {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Square envelope with phase-locked `k`: exact states against the effective
/// well (with edge delta terms) and, when those deltas vanish, against the
/// finite-well transcendental oracle.
#[derive(Clone, Debug)]
pub struct SquareComparison {
    pub comparison: StateComparison,
    pub deltas: Vec<DeltaTerm>,
    /// Bound-state count of the full Hamiltonian.
    pub bound_exact: usize,
    /// Bound-state count of the finite-well oracle, when it applies.
    pub bound_oracle: Option<usize>,
    /// Bound-state count of the discretized effective Hamiltonian.
    pub bound_effective: usize,
    /// `(∫_{x<0}|ψ₀|², ∫_{x>0}|ψ₀|²)` of the exact ground state.
    pub ground_density_halves: (f64, f64),
    /// Whether the smoothed states come from the analytic oracle.
    pub oracle_reference: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareSetup {
    pub height: f64,
    #[serde(default = "one")]
    pub half_width: f64,
    pub target_k: f64,
    /// Phase `k·x` required at both edges.
    #[serde(default)]
    pub edge_phase: f64,
}

fn one() -> f64 {
    1.0
}

impl SquareSetup {
    pub fn constraints(&self) -> Vec<PhaseConstraint> {
        [-self.half_width, self.half_width]
            .iter()
            .map(|&position| PhaseConstraint {
                position,
                phase: self.edge_phase,
            })
            .collect()
    }
}

/// Delta strengths below this are treated as absent.
const NEGLIGIBLE_DELTA: f64 = 1e-9;

/// Bound-state count of a Hamiltonian via a Sturm count at `E = 0`.
fn bound_count<V: Fn(f64) -> f64>(grid: &Grid, v: V, deltas: &[DeltaTerm]) -> Result<usize> {
    Ok(assemble(grid, v, deltas)?.count_below(0.0))
}

pub fn square_comparison(
    profile: PeriodicProfile,
    setup: &SquareSetup,
    m: usize,
    spec: &GridSpec,
) -> Result<SquareComparison> {
    let k = find_phase_locked_k(setup.target_k, &setup.constraints())?;
    let envelope = Envelope::square(setup.height, setup.half_width)?;
    let mp = ModulatedPotential::new(k, profile, envelope, Background::Zero)?;
    let eff = mp.effective_potential();
    let grid = spec.grid(Some(k))?;
    let exact = solve_full(&mp, &grid, m)?;

    let depth = eff.g_mean_square() * setup.height * setup.height;
    let deltas_vanish = eff.deltas().iter().all(|d| d.strength.abs() < NEGLIGIBLE_DELTA);
    let well = FiniteWell::new(depth, setup.half_width)?;
    let oracle_states = well.states();

    let numeric_eff = solve_effective(&eff, &grid, m)?;
    let (effective, energies): (Vec<Vec<f64>>, Vec<f64>) = if deltas_vanish && oracle_states.len() >= m {
        let nodes = grid.nodes();
        (
            oracle_states[..m]
                .iter()
                .map(|s| nodes.iter().map(|&x| well.wavefunction(s, x)).collect())
                .collect(),
            oracle_states[..m].iter().map(|s| s.energy).collect(),
        )
    } else {
        (numeric_eff.states().to_vec(), numeric_eff.energies().to_vec())
    };
    let comparison = StateComparison::build(&mp, &exact, effective, &energies);

    let dx = grid.dx();
    let nodes = grid.nodes();
    let (mut left, mut right) = (0.0, 0.0);
    for (x, p) in nodes.iter().zip(exact.state(0)) {
        if *x < 0.0 {
            left += p * p * dx;
        } else if *x > 0.0 {
            right += p * p * dx;
        }
    }

    Ok(SquareComparison {
        comparison,
        deltas: eff.deltas().to_vec(),
        bound_exact: bound_count(&grid, |x| mp.evaluate(x), &[])?,
        bound_oracle: deltas_vanish.then_some(oracle_states.len()),
        bound_effective: bound_count(&grid, |x| eff.smooth(x), eff.deltas())?,
        ground_density_halves: (left, right),
        oracle_reference: deltas_vanish && oracle_states.len() >= m,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub k: f64,
    pub energy_exact: f64,
    pub energy_effective: f64,
    pub error: f64,
    /// `‖ψ_exact − ψ̄‖₂` of the ground state.
    pub state_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceStudy {
    pub a: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Log-log slope of the ground-energy error against k.
    pub energy_slope: f64,
    /// Log-log slope of the ground-state L² error against k.
    pub state_slope: f64,
}

/// Ground-energy error `|E₀(k) − Ē₀|` of the sech scenario across `k_values`,
/// with grid error removed by Richardson extrapolation.
pub fn ground_energy_convergence(a: f64, k_values: &[f64], spec: &GridSpec) -> Result<ConvergenceStudy> {
    let e_bar = pt_energies(a)[0];
    let lambda = pt_lambda(a);
    let rows: Vec<Result<ConvergenceRow>> = k_values
        .par_iter()
        .map(|&k| {
            let mp = ModulatedPotential::new(k, PeriodicProfile::cos(), Envelope::sech(a), Background::Zero)?;
            let grid = spec.grid(Some(k))?;
            let e = extrapolated_energies(&grid, |x| mp.evaluate(x), &[], 1)?[0];
            // smoothed ground state ∝ sech^λ, valid for any λ > 0
            let exact = solve_full(&mp, &grid, 1)?;
            let psi_bar: Vec<f64> = grid.nodes().iter().map(|x| x.cosh().powf(-lambda)).collect();
            Ok(ConvergenceRow {
                k,
                energy_exact: e,
                energy_effective: e_bar,
                error: (e - e_bar).abs(),
                state_error: l2_distance(exact.state(0), &psi_bar, grid.dx()),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let serrs: Vec<f64> = rows.iter().map(|r| r.state_error).collect();
    Ok(ConvergenceStudy {
        a,
        energy_slope: loglog_slope(&ks, &errs),
        state_slope: loglog_slope(&ks, &serrs),
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AveragingRow {
    pub k: f64,
    pub sup_error: f64,
    /// `error(k)/error(previous k)`; absent for the first row.
    pub ratio: Option<f64>,
}

/// Sup-norm difference between exact and averaged `W′` on the sech scenario
/// for each `k`.
pub fn averaging_sweep(a: f64, k_values: &[f64], x0: f64, x1: f64, w0: f64) -> Result<Vec<AveragingRow>> {
    let errors: Vec<Result<f64>> = k_values
        .par_iter()
        .map(|&k| {
            let mp = ModulatedPotential::new(k, PeriodicProfile::cos(), Envelope::sech(a), Background::Zero)?;
            averaging_error(&mp, &RiccatiSetup::new(x0, x1, w0, k))
        })
        .collect();
    let errors = errors.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(k_values
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (&k, &e))| AveragingRow {
            k,
            sup_error: e,
            ratio: (i > 0).then(|| e / errors[i - 1]),
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct WellGridRow {
    pub dx: f64,
    pub n: usize,
    pub energy_numeric: f64,
    pub energy_oracle: f64,
    pub error: f64,
}

/// Eigensolver on the bare finite well at two resolutions, against the
/// transcendental roots.
pub fn finite_well_grid_study(
    depth: f64,
    half_width: f64,
    m: usize,
    spec: &GridSpec,
) -> Result<(Vec<WellGridRow>, Vec<WellGridRow>)> {
    let well = FiniteWell::new(depth, half_width)?;
    let oracle = well.states();
    let m = m.min(oracle.len());
    let env = Envelope::square(1.0, half_width)?;
    let v = |x: f64| -depth * env.value(x);
    let coarse = spec.grid(None)?;
    let fine = coarse.refined();
    let rows = |grid: &Grid| -> Result<Vec<WellGridRow>> {
        let s = lowest_eigenpairs(&assemble(grid, v, &[])?, m)?;
        Ok(s.energies()
            .iter()
            .zip(&oracle)
            .map(|(&e, o)| WellGridRow {
                dx: grid.dx(),
                n: grid.len(),
                energy_numeric: e,
                energy_oracle: o.energy,
                error: (e - o.energy).abs(),
            })
            .collect())
    };
    Ok((rows(&coarse)?, rows(&fine)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.3)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.3).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_removes_grid_error_in_a_box() {
        let grid = Grid::new(0.0, 1.0, 99).unwrap();
        let e = extrapolated_energies(&grid, |_| 0.0, &[], 2).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((e[0] - pi2).abs() < 1e-6);
        assert!((e[1] - 4.0 * pi2).abs() < 1e-4);
    }

    #[test]
    fn grid_spec_rules() {
        let g = GridSpec::default().grid(Some(250.0)).unwrap();
        assert!(g.dx() <= crate::profile::TWO_PI / (32.0 * 250.0));
        let g = GridSpec::default().grid(None).unwrap();
        assert!((g.dx() - 0.01).abs() < 1e-12);
        let bad = GridSpec {
            nodes_per_period: 4.0,
            ..GridSpec::default()
        };
        assert!(bad.grid(Some(10.0)).is_err());
    }
}
