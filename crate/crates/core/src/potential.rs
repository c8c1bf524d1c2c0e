//! Envelopes, backgrounds, the modulated potential `k·v(kx)·Φ(x) + ρ(x)` and
//! its effective (period-averaged) counterpart.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{reduce_phase, PeriodicProfile, TWO_PI};

/// Below this wavenumber the effective theory is only loosely applicable.
pub const SMALL_K_WARNING: f64 = 10.0;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A step of the envelope: `jump = Φ(x+0) − Φ(x−0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discontinuity {
    pub position: f64,
    pub jump: f64,
}

/// Piecewise-linear function through `(x, value)` points, zero outside the
/// tabulated range. A repeated abscissa encodes a jump (left value first).
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidEnvelope("tabulation needs at least two points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 >= w[0].0) {
                return Err(Error::InvalidEnvelope(format!(
                    "tabulation abscissae must be non-decreasing (found {} after {})",
                    w[1].0, w[0].0
                )));
            }
        }
        for w in points.windows(3) {
            if w[0].0 == w[1].0 && w[1].0 == w[2].0 {
                return Err(Error::InvalidEnvelope(format!(
                    "abscissa {} repeated more than twice",
                    w[0].0
                )));
            }
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidEnvelope("non-finite tabulation entry".into()));
        }
        Ok(Self {
            xs: points.iter().map(|p| p.0).collect(),
            ys: points.iter().map(|p| p.1).collect(),
        })
    }

    /// Left and right limits at `x`.
    pub fn limits(&self, x: f64) -> (f64, f64) {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return (0.0, 0.0);
        }
        let lo = self.xs.partition_point(|&t| t < x);
        let hi = self.xs.partition_point(|&t| t <= x);
        if hi > lo {
            // x coincides with one or two nodes
            let left = if lo == 0 { 0.0 } else { self.ys[lo] };
            let right = if hi == n { 0.0 } else { self.ys[hi - 1] };
            return (left, right);
        }
        let v = self.interior(lo - 1, x);
        (v, v)
    }

    fn interior(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let t = (x - x0) / (x1 - x0);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    pub fn value(&self, x: f64) -> f64 {
        let (l, r) = self.limits(x);
        0.5 * (l + r)
    }

    pub fn slope(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] || x >= self.xs[n - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        let dx = self.xs[i + 1] - self.xs[i];
        if dx == 0.0 {
            0.0
        } else {
            (self.ys[i + 1] - self.ys[i]) / dx
        }
    }

    /// Jumps implied by the table, including steps to/from zero at the ends.
    pub fn implied_jumps(&self) -> Vec<Discontinuity> {
        let mut out = Vec::new();
        let mut xs: Vec<f64> = self.xs.clone();
        xs.dedup();
        for x in xs {
            let (l, r) = self.limits(x);
            if r != l {
                out.push(Discontinuity {
                    position: x,
                    jump: r - l,
                });
            }
        }
        out
    }
}

/// Slowly varying envelope `Φ(x)`, vanishing at `|x| → ∞`.
///
/// At a declared discontinuity `value` returns the mean of the one-sided
/// limits.
#[derive(Clone)]
pub enum Envelope {
    Zero,
    /// `amplitude·sech(x)`
    Sech {
        amplitude: f64,
    },
    /// `height` on `|x| < half_width`, zero outside.
    Square {
        height: f64,
        half_width: f64,
    },
    /// `amplitude·exp(−x²/(2σ²))`
    Gaussian {
        amplitude: f64,
        sigma: f64,
    },
    Tabulated {
        table: PiecewiseLinear,
        discontinuities: Vec<Discontinuity>,
    },
    Custom {
        f: RealFn,
        discontinuities: Vec<Discontinuity>,
    },
}

impl fmt::Debug for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Envelope::Zero => write!(f, "Zero"),
            Envelope::Sech { amplitude } => write!(f, "Sech {{ amplitude: {amplitude} }}"),
            Envelope::Square { height, half_width } => {
                write!(f, "Square {{ height: {height}, half_width: {half_width} }}")
            }
            Envelope::Gaussian { amplitude, sigma } => {
                write!(f, "Gaussian {{ amplitude: {amplitude}, sigma: {sigma} }}")
            }
            Envelope::Tabulated { discontinuities, .. } => {
                write!(f, "Tabulated {{ discontinuities: {discontinuities:?} }}")
            }
            Envelope::Custom { discontinuities, .. } => write!(f, "Custom {{ discontinuities: {discontinuities:?} }}"),
        }
    }
}

impl Envelope {
    pub fn sech(amplitude: f64) -> Self {
        Envelope::Sech { amplitude }
    }

    pub fn square(height: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !height.is_finite() {
            return Err(Error::InvalidEnvelope(format!(
                "square envelope needs half_width > 0 and finite height (got {half_width}, {height})"
            )));
        }
        Ok(Envelope::Square { height, half_width })
    }

    pub fn gaussian(amplitude: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidEnvelope(format!(
                "gaussian envelope needs sigma > 0 (got {sigma})"
            )));
        }
        Ok(Envelope::Gaussian { amplitude, sigma })
    }

    /// Tabulated envelope. Every jump present in the table must be declared,
    /// and every declared jump must match the table.
    pub fn tabulated(points: &[(f64, f64)], discontinuities: Vec<Discontinuity>) -> Result<Self> {
        let table = PiecewiseLinear::new(points)?;
        let implied = table.implied_jumps();
        for d in &implied {
            let declared = discontinuities
                .iter()
                .find(|e| (e.position - d.position).abs() <= 1e-12 * (1.0 + d.position.abs()));
            match declared {
                Some(e) if (e.jump - d.jump).abs() <= 1e-9 * (1.0 + d.jump.abs()) => {}
                Some(e) => {
                    return Err(Error::InvalidEnvelope(format!(
                        "declared jump {} at x = {} differs from tabulated jump {}",
                        e.jump, d.position, d.jump
                    )))
                }
                None => {
                    return Err(Error::InvalidEnvelope(format!(
                        "undeclared jump {} at x = {}",
                        d.jump, d.position
                    )))
                }
            }
        }
        for e in &discontinuities {
            if !implied
                .iter()
                .any(|d| (e.position - d.position).abs() <= 1e-12 * (1.0 + d.position.abs()))
            {
                return Err(Error::InvalidEnvelope(format!(
                    "declared jump at x = {} is not present in the tabulation",
                    e.position
                )));
            }
        }
        let mut discontinuities = discontinuities;
        discontinuities.sort_by(|a, b| a.position.total_cmp(&b.position));
        Ok(Envelope::Tabulated { table, discontinuities })
    }

    /// Arbitrary callable; jumps must be declared by the caller.
    pub fn custom<F>(f: F, discontinuities: Vec<Discontinuity>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut discontinuities = discontinuities;
        discontinuities.sort_by(|a, b| a.position.total_cmp(&b.position));
        Envelope::Custom {
            f: Arc::new(f),
            discontinuities,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Envelope::Zero => 0.0,
            Envelope::Sech { amplitude } => amplitude / x.cosh(),
            Envelope::Square { height, half_width } => {
                let ax = x.abs();
                if ax < *half_width {
                    *height
                } else if ax == *half_width {
                    0.5 * height
                } else {
                    0.0
                }
            }
            Envelope::Gaussian { amplitude, sigma } => amplitude * (-x * x / (2.0 * sigma * sigma)).exp(),
            Envelope::Tabulated { table, .. } => table.value(x),
            Envelope::Custom { f, .. } => f(x),
        }
    }

    /// `dΦ/dx` away from discontinuities.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Envelope::Zero | Envelope::Square { .. } => 0.0,
            Envelope::Sech { amplitude } => -amplitude * x.tanh() / x.cosh(),
            Envelope::Gaussian { amplitude, sigma } => {
                let s2 = sigma * sigma;
                -x / s2 * amplitude * (-x * x / (2.0 * s2)).exp()
            }
            Envelope::Tabulated { table, .. } => table.slope(x),
            Envelope::Custom { f, .. } => {
                let h = 1e-6 * (1.0 + x.abs());
                (f(x + h) - f(x - h)) / (2.0 * h)
            }
        }
    }

    /// Declared discontinuities, ordered by position.
    pub fn discontinuities(&self) -> Vec<Discontinuity> {
        match self {
            Envelope::Square { height, half_width } if *height != 0.0 => vec![
                Discontinuity {
                    position: -half_width,
                    jump: *height,
                },
                Discontinuity {
                    position: *half_width,
                    jump: -height,
                },
            ],
            Envelope::Tabulated { discontinuities, .. } | Envelope::Custom { discontinuities, .. } => {
                discontinuities.clone()
            }
            _ => Vec::new(),
        }
    }

    /// The envelope `−Φ(x)`.
    pub fn negated(&self) -> Self {
        match self {
            Envelope::Zero => Envelope::Zero,
            Envelope::Sech { amplitude } => Envelope::Sech { amplitude: -amplitude },
            Envelope::Square { height, half_width } => Envelope::Square {
                height: -height,
                half_width: *half_width,
            },
            Envelope::Gaussian { amplitude, sigma } => Envelope::Gaussian {
                amplitude: -amplitude,
                sigma: *sigma,
            },
            Envelope::Tabulated { table, discontinuities } => Envelope::Tabulated {
                table: PiecewiseLinear {
                    xs: table.xs.clone(),
                    ys: table.ys.iter().map(|y| -y).collect(),
                },
                discontinuities: negate_jumps(discontinuities),
            },
            Envelope::Custom { f, discontinuities } => {
                let f = f.clone();
                Envelope::Custom {
                    f: Arc::new(move |x| -f(x)),
                    discontinuities: negate_jumps(discontinuities),
                }
            }
        }
    }
}

fn negate_jumps(ds: &[Discontinuity]) -> Vec<Discontinuity> {
    ds.iter()
        .map(|d| Discontinuity {
            position: d.position,
            jump: -d.jump,
        })
        .collect()
}

/// Smooth background `ρ(x)`, vanishing at `|x| → ∞`.
#[derive(Clone)]
pub enum Background {
    Zero,
    /// `amplitude·exp(−x²/(2σ²))`
    Gaussian {
        amplitude: f64,
        sigma: f64,
    },
    Tabulated(PiecewiseLinear),
    Custom(RealFn),
}

impl fmt::Debug for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Background::Zero => write!(f, "Zero"),
            Background::Gaussian { amplitude, sigma } => {
                write!(f, "Gaussian {{ amplitude: {amplitude}, sigma: {sigma} }}")
            }
            Background::Tabulated(_) => write!(f, "Tabulated"),
            Background::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Background {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Background::Custom(Arc::new(f))
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Background::Zero => 0.0,
            Background::Gaussian { amplitude, sigma } => amplitude * (-x * x / (2.0 * sigma * sigma)).exp(),
            Background::Tabulated(t) => t.value(x),
            Background::Custom(f) => f(x),
        }
    }
}

/// `V(x) = k·v(kx)·Φ(x) + ρ(x)`.
#[derive(Clone, Debug)]
pub struct ModulatedPotential {
    k: f64,
    profile: PeriodicProfile,
    envelope: Envelope,
    background: Background,
}

impl ModulatedPotential {
    pub fn new(k: f64, profile: PeriodicProfile, envelope: Envelope, background: Background) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("wavenumber must be positive and finite, got {k}"),
            });
        }
        if k < SMALL_K_WARNING {
            log::warn!("k = {k} is below {SMALL_K_WARNING}; the averaged description degrades as O(1/k)");
        }
        Ok(Self {
            k,
            profile,
            envelope,
            background,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn profile(&self) -> &PeriodicProfile {
        &self.profile
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    /// Same potential with a different wavenumber.
    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(k, self.profile.clone(), self.envelope.clone(), self.background.clone())
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.k * self.profile.v(self.k * x) * self.envelope.value(x) + self.background.value(x)
    }

    pub fn effective_potential(&self) -> EffectivePotential {
        let g = self.profile.g_mean_square();
        let deltas = self
            .envelope
            .discontinuities()
            .into_iter()
            .map(|d| DeltaTerm {
                position: d.position,
                strength: -d.jump * self.profile.g(phase_at(self.k, d.position)),
            })
            .collect();
        EffectivePotential {
            g_mean_square: g,
            envelope: self.envelope.clone(),
            background: self.background.clone(),
            deltas,
        }
    }
}

/// Free-function form of [`ModulatedPotential::evaluate`].
pub fn evaluate_full(mp: &ModulatedPotential, x: f64) -> f64 {
    mp.evaluate(x)
}

/// Free-function form of [`ModulatedPotential::effective_potential`].
pub fn effective_potential(mp: &ModulatedPotential) -> EffectivePotential {
    mp.effective_potential()
}

/// `strength·δ(x − position)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaTerm {
    pub position: f64,
    pub strength: f64,
}

/// `V_eff(x) = −<g²>Φ²(x) + ρ(x) + Σ sₙ δ(x − xₙ)`.
#[derive(Clone, Debug)]
pub struct EffectivePotential {
    g_mean_square: f64,
    envelope: Envelope,
    background: Background,
    deltas: Vec<DeltaTerm>,
}

impl EffectivePotential {
    pub fn new(g_mean_square: f64, envelope: Envelope, background: Background, deltas: Vec<DeltaTerm>) -> Self {
        Self {
            g_mean_square,
            envelope,
            background,
            deltas,
        }
    }

    /// Smooth part `−<g²>Φ² + ρ`.
    pub fn smooth(&self, x: f64) -> f64 {
        let phi = self.envelope.value(x);
        -self.g_mean_square * phi * phi + self.background.value(x)
    }

    pub fn deltas(&self) -> &[DeltaTerm] {
        &self.deltas
    }

    pub fn g_mean_square(&self) -> f64 {
        self.g_mean_square
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn background(&self) -> &Background {
        &self.background
    }
}

/// `k·x₀` reduced to `[0, 2π)`.
pub fn phase_at(k: f64, x0: f64) -> f64 {
    reduce_phase(k * x0)
}

/// A required phase `k·position ≡ phase (mod 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseConstraint {
    pub position: f64,
    pub phase: f64,
}

/// Absolute phase tolerance for a product `k·x`, scaled by its magnitude so
/// that rounding in the product itself is not mistaken for a violation.
fn phase_tolerance(kx: f64) -> f64 {
    1e-12 * kx.abs().max(1.0)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = reduce_phase(a - b);
    d.min(TWO_PI - d)
}

/// Maximum number of candidate wavenumbers examined on each side of the target.
const PHASE_LOCK_SEARCH: usize = 1_000_000;

/// Wavenumber nearest to `target_k` for which every constraint's phase holds
/// exactly (mod 2π). Ties are resolved towards the smaller k.
pub fn find_phase_locked_k(target_k: f64, constraints: &[PhaseConstraint]) -> Result<f64> {
    if !(target_k > 0.0) || !target_k.is_finite() {
        return Err(Error::InvalidParameter {
            name: "target_k",
            reason: format!("must be positive and finite, got {target_k}"),
        });
    }
    let unsat = |reason: String| Error::UnsatisfiablePhase {
        target: target_k,
        reason,
    };
    for c in constraints {
        if c.position == 0.0 && circular_distance(c.phase, 0.0) > phase_tolerance(0.0) {
            return Err(unsat(format!(
                "phase {} required at x = 0, where every k gives phase 0",
                c.phase
            )));
        }
    }
    let active: Vec<&PhaseConstraint> = constraints.iter().filter(|c| c.position != 0.0).collect();
    // the constraint with the widest k-lattice generates candidates
    let Some(lead) = active
        .iter()
        .min_by(|a, b| a.position.abs().total_cmp(&b.position.abs()))
    else {
        return Ok(target_k);
    };

    let spacing = TWO_PI / lead.position.abs();
    // k = (phase + 2πm)/x, written as k = base + j·spacing with base ≥ 0 minimal
    let base = (reduce_phase(lead.phase * lead.position.signum()) / lead.position.abs()).rem_euclid(spacing);
    let satisfies = |k: f64| {
        k > 0.0
            && active.iter().all(|c| {
                let kx = k * c.position;
                circular_distance(kx, c.phase) <= phase_tolerance(kx)
            })
    };
    let j0 = ((target_k - base) / spacing).floor();
    let mut best: Option<f64> = None;
    for step in 0..PHASE_LOCK_SEARCH {
        let below = base + (j0 - step as f64) * spacing;
        let above = base + (j0 + 1.0 + step as f64) * spacing;
        for k in [below, above] {
            if satisfies(k) {
                let better = match best {
                    None => true,
                    Some(b) => {
                        let (db, dk) = ((b - target_k).abs(), (k - target_k).abs());
                        dk < db || (dk == db && k < b)
                    }
                };
                if better {
                    best = Some(k);
                }
            }
        }
        if let Some(b) = best {
            // nothing further out can be closer
            let reach = (step as f64 + 1.0) * spacing;
            if (b - target_k).abs() <= reach {
                return Ok(b);
            }
        }
        if below <= 0.0 && step as f64 * spacing > 4.0 * target_k + 1e6 * spacing {
            break;
        }
    }
    best.ok_or_else(|| unsat("no common wavenumber found in the search window".into()))
}

/// Phase constraints requiring `g(k·xₙ) = 0` at every discontinuity of the
/// envelope, resolved to the zero of `g` nearest to phase 0.
pub fn vanishing_g_constraints(profile: &PeriodicProfile, envelope: &Envelope) -> Result<Vec<PhaseConstraint>> {
    let phase =
        nearest_zero_of(|s| profile.g(s), 0.0).ok_or_else(|| Error::InvalidProfile("g has no zero crossing".into()))?;
    Ok(envelope
        .discontinuities()
        .iter()
        .map(|d| PhaseConstraint {
            position: d.position,
            phase,
        })
        .collect())
}

/// Zero of a periodic function nearest (circularly) to `s0`, by scanning and
/// bisection.
pub fn nearest_zero_of<F: Fn(f64) -> f64>(f: F, s0: f64) -> Option<f64> {
    let n = 4096;
    let h = PI / n as f64;
    if f(s0) == 0.0 {
        return Some(reduce_phase(s0));
    }
    for i in 0..n {
        for dir in [1.0, -1.0] {
            let a = s0 + dir * i as f64 * h;
            let b = s0 + dir * (i + 1) as f64 * h;
            let (fa, fb) = (f(a), f(b));
            if fb == 0.0 {
                return Some(reduce_phase(b));
            }
            if fa * fb < 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) * f(lo) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if (hi - lo).abs() < 1e-15 {
                        break;
                    }
                }
                return Some(reduce_phase(0.5 * (lo + hi)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sech_cos(k: f64, a: f64) -> ModulatedPotential {
        ModulatedPotential::new(k, PeriodicProfile::cos(), Envelope::sech(a), Background::Zero).unwrap()
    }

    #[test]
    fn full_potential_at_origin() {
        let a = 2.0 * 210f64.sqrt();
        let mp = sech_cos(250.0, a);
        let v = evaluate_full(&mp, 0.0);
        assert!((v - 250.0 * a).abs() < 1e-9);
        assert!((v - 7245.688).abs() < 1e-3);
    }

    #[test]
    fn zero_envelope_gives_background_only() {
        let mp = ModulatedPotential::new(
            250.0,
            PeriodicProfile::cos(),
            Envelope::Zero,
            Background::custom(|x| -(x * x).min(1.0)),
        )
        .unwrap();
        for &x in &[-2.0, 0.3, 1.1] {
            assert_eq!(mp.evaluate(x), -(x * x).min(1.0));
        }
        let eff = mp.effective_potential();
        assert!(eff.deltas().is_empty());
        assert_eq!(eff.smooth(0.5), -0.25);
    }

    #[test]
    fn node_of_cos_leaves_background() {
        let k = 50.0;
        let mp = ModulatedPotential::new(
            k,
            PeriodicProfile::cos(),
            Envelope::sech(3.0),
            Background::Gaussian {
                amplitude: 0.7,
                sigma: 1.0,
            },
        )
        .unwrap();
        let x = PI / (2.0 * k);
        let rho = 0.7 * (-x * x / 2.0).exp();
        assert!((mp.evaluate(x) - rho).abs() < 1e-12);
    }

    #[test]
    fn sech_effective_potential_is_poschl_teller() {
        let a = 7.0;
        let eff = sech_cos(250.0, a).effective_potential();
        for &x in &[-3.0_f64, -0.5, 0.0, 2.0] {
            let pt = -(a * a / 2.0) / x.cosh().powi(2);
            assert!((eff.smooth(x) - pt).abs() < 1e-12);
        }
        assert!(eff.deltas().is_empty());
    }

    #[test]
    fn square_envelope_cos_has_no_deltas_at_locked_phase() {
        let k = 80.0 * PI;
        let mp = ModulatedPotential::new(
            k,
            PeriodicProfile::cos(),
            Envelope::square(20.0, 1.0).unwrap(),
            Background::Zero,
        )
        .unwrap();
        let eff = mp.effective_potential();
        assert!((eff.smooth(0.0) + 200.0).abs() < 1e-12);
        assert_eq!(eff.smooth(1.5), 0.0);
        assert_eq!(eff.deltas().len(), 2);
        for d in eff.deltas() {
            assert!(d.strength.abs() < 1e-10);
        }
    }

    #[test]
    fn square_envelope_sin_has_edge_deltas() {
        let k = 80.0 * PI;
        let mp = ModulatedPotential::new(
            k,
            PeriodicProfile::sin(),
            Envelope::square(20.0, 1.0).unwrap(),
            Background::Zero,
        )
        .unwrap();
        let eff = mp.effective_potential();
        let d = eff.deltas();
        assert_eq!(d[0].position, -1.0);
        assert!((d[0].strength - 20.0).abs() < 1e-9);
        assert_eq!(d[1].position, 1.0);
        assert!((d[1].strength + 20.0).abs() < 1e-9);
    }

    #[test]
    fn phase_examples() {
        assert!(phase_at(80.0 * PI, 1.0).min(TWO_PI - phase_at(80.0 * PI, 1.0)) < 1e-12);
        assert!((phase_at(PI, 1.0) - PI).abs() < 1e-15);
        // 250 − 39·2π ≈ 4.95575
        let expected = 250.0 - 39.0 * TWO_PI;
        assert!((phase_at(250.0, 1.0) - expected).abs() < 1e-12);
        assert!((expected - 4.95575).abs() < 1e-4);
    }

    #[test]
    fn phase_locking() {
        let both = [
            PhaseConstraint {
                position: -1.0,
                phase: 0.0,
            },
            PhaseConstraint {
                position: 1.0,
                phase: 0.0,
            },
        ];
        let k = find_phase_locked_k(250.0, &both).unwrap();
        assert!((k - 80.0 * PI).abs() < 1e-9);
        let k = find_phase_locked_k(250.0, &both[1..]).unwrap();
        assert!((k - 80.0 * PI).abs() < 1e-9);
        assert_eq!(find_phase_locked_k(250.0, &[]).unwrap(), 250.0);
        // phase π at x = 1: odd multiples of π
        let k = find_phase_locked_k(
            250.0,
            &[PhaseConstraint {
                position: 1.0,
                phase: PI,
            }],
        )
        .unwrap();
        assert!((k - 79.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn phase_locking_unsatisfiable() {
        // phase 0 at x = 1 needs k ∈ 2πZ, phase π/2 at x = 1 cannot also hold
        let c = [
            PhaseConstraint {
                position: 1.0,
                phase: 0.0,
            },
            PhaseConstraint {
                position: 1.0,
                phase: PI / 2.0,
            },
        ];
        assert!(matches!(
            find_phase_locked_k(250.0, &c),
            Err(Error::UnsatisfiablePhase { .. })
        ));
        let c = [PhaseConstraint {
            position: 0.0,
            phase: 1.0,
        }];
        assert!(find_phase_locked_k(250.0, &c).is_err());
    }

    #[test]
    fn tabulated_envelope_requires_declared_jumps() {
        let pts = [(-1.0, 0.0), (-1.0, 2.0), (1.0, 2.0), (1.0, 0.0)];
        assert!(Envelope::tabulated(&pts, vec![]).is_err());
        let env = Envelope::tabulated(
            &pts,
            vec![
                Discontinuity {
                    position: -1.0,
                    jump: 2.0,
                },
                Discontinuity {
                    position: 1.0,
                    jump: -2.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(env.value(0.0), 2.0);
        assert_eq!(env.value(-1.0), 1.0);
        assert_eq!(env.value(3.0), 0.0);
        let wrong = Envelope::tabulated(
            &pts,
            vec![
                Discontinuity {
                    position: -1.0,
                    jump: 1.0,
                },
                Discontinuity {
                    position: 1.0,
                    jump: -2.0,
                },
            ],
        );
        assert!(wrong.is_err());
    }

    #[test]
    fn vanishing_g_constraint_phases() {
        let env = Envelope::square(20.0, 1.0).unwrap();
        let c = vanishing_g_constraints(&PeriodicProfile::cos(), &env).unwrap();
        assert!(c.iter().all(|c| c.phase.min(TWO_PI - c.phase) < 1e-12));
        // g = −cos vanishes at π/2 and 3π/2; nearest to 0 circularly is 3π/2 or π/2
        let c = vanishing_g_constraints(&PeriodicProfile::sin(), &env).unwrap();
        assert!(PeriodicProfile::sin().g(c[0].phase).abs() < 1e-12);
    }
}
