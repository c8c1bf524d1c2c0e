//! Closed-form and semi-analytic reference solutions: the Pöschl–Teller well
//! `−(a²/2)·sech²(x)` and the finite square well.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// `λ = (√(1 + 2a²) − 1)/2`.
pub fn pt_lambda(a: f64) -> f64 {
    ((1.0 + 2.0 * a * a).sqrt() - 1.0) / 2.0
}

/// Envelope amplitude giving a prescribed `λ`: `a = √(2λ(λ+1))`.
pub fn pt_amplitude(lambda: f64) -> f64 {
    (2.0 * lambda * (lambda + 1.0)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PoschlTellerParams {
    pub a: f64,
    pub lambda: f64,
}

impl PoschlTellerParams {
    pub fn new(a: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("well amplitude must be finite and non-negative, got {a}"),
            });
        }
        Ok(Self {
            a,
            lambda: pt_lambda(a),
        })
    }

    /// `λ` as an integer when it is one to within `1e-9`.
    pub fn integer_lambda(&self) -> Option<u32> {
        let r = self.lambda.round();
        ((self.lambda - r).abs() < 1e-9).then_some(r as u32)
    }
}

/// `Ē_n = −(λ − n)²` for the labels `n = 0, …, ⌊λ⌋`. The last entry sits at or
/// just below the threshold; callers filter with `E < 0` for bound states.
pub fn pt_energies(a: f64) -> Vec<f64> {
    let lambda = pt_lambda(a);
    (0..=lambda.floor() as u32)
        .map(|n| -(lambda - f64::from(n)).powi(2))
        .collect()
}

/// Normalized Pöschl–Teller eigenfunction `∝ P_λ^{λ−n}(tanh x)` for integer `λ`.
///
/// Uses the degree recurrence for associated Legendre functions at fixed order
/// (stable) with `(1 − y²)^{β/2} = sech^β(x)` evaluated directly. The
/// normalization is the closed form `∫[P_λ^β(tanh x)]² dx = (λ+β)!/(β·(λ−β)!)`.
/// The sign makes the left tail positive.
pub fn pt_wavefunction(n: u32, a: f64, x: f64) -> Result<f64> {
    let params = PoschlTellerParams::new(a)?;
    let lambda = params.integer_lambda().ok_or_else(|| Error::InvalidParameter {
        name: "a",
        reason: format!("λ = {} is not an integer", params.lambda),
    })?;
    if n >= lambda {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("state index {n} must be below λ = {lambda}"),
        });
    }
    let beta = lambda - n;
    let y = x.tanh();
    let sech = 1.0 / x.cosh();

    let p = legendre_derivative_part(lambda, beta, y) * sech.powi(beta as i32);

    // (λ−β)!/(λ+β)!·β
    let mut norm2 = f64::from(beta);
    for j in (lambda - beta + 1)..=(lambda + beta) {
        norm2 /= f64::from(j);
    }
    // (d^β P_λ/dy^β)(−1) has sign (−1)^{λ−β} = (−1)^n
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * p * norm2.sqrt())
}

/// `d^β P_l/dy^β (y)`, i.e. the associated Legendre function of order `β`
/// without the `(−1)^β (1−y²)^{β/2}` prefactor, via the degree recurrence.
fn legendre_derivative_part(l: u32, m: u32, y: f64) -> f64 {
    // Q_m^m = (2m−1)!!
    let mut pmm = 1.0;
    for i in 1..=m {
        pmm *= f64::from(2 * i - 1);
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = y * f64::from(2 * m + 1) * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pm0 = pmm;
    for ll in (m + 2)..=l {
        let next = (y * f64::from(2 * ll - 1) * pm1 - f64::from(ll + m - 1) * pm0) / f64::from(ll - m);
        pm0 = pm1;
        pm1 = next;
    }
    pm1
}

/// Parity of a finite-well bound state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WellState {
    pub energy: f64,
    pub parity: Parity,
    /// Inside wavenumber `q = √(V₀ + E)`.
    pub q: f64,
    /// Outside decay rate `κ = √(−E)`.
    pub kappa: f64,
}

/// Symmetric finite square well `−d²/dx² − V₀·1[|x| < L]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiniteWell {
    pub depth: f64,
    pub half_width: f64,
}

impl FiniteWell {
    pub fn new(depth: f64, half_width: f64) -> Result<Self> {
        if !(depth > 0.0) || !(half_width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "finite well",
                reason: format!("depth and half_width must be positive, got {depth}, {half_width}"),
            });
        }
        Ok(Self { depth, half_width })
    }

    /// All bound states, ascending in energy.
    ///
    /// Even states solve `q·sin(qL) − κ·cos(qL) = 0` on `q ∈ [mπ/L, (m+½)π/L]`,
    /// odd states `q·cos(qL) + κ·sin(qL) = 0` on `q ∈ [(m+½)π/L, (m+1)π/L]`;
    /// each bracket holds exactly one root when it lies below `√V₀`.
    pub fn states(&self) -> Vec<WellState> {
        let l = self.half_width;
        let q_max = self.depth.sqrt();
        let kappa = |q: f64| (self.depth - q * q).max(0.0).sqrt();
        let even = |q: f64| q * (q * l).sin() - kappa(q) * (q * l).cos();
        let odd = |q: f64| q * (q * l).cos() + kappa(q) * (q * l).sin();

        let mut out = Vec::new();
        let half = PI / (2.0 * l);
        let mut m = 0u32;
        loop {
            let lo = f64::from(m) * half;
            if lo >= q_max {
                break;
            }
            let hi = (lo + half).min(q_max);
            let (f, parity): (&dyn Fn(f64) -> f64, Parity) = if m.is_multiple_of(2) {
                (&even, Parity::Even)
            } else {
                (&odd, Parity::Odd)
            };
            if let Some(q) = bracketed_root(f, lo, hi) {
                // q = √V₀ means E = 0: threshold, not bound
                if q < q_max {
                    let energy = q * q - self.depth;
                    if energy < 0.0 {
                        out.push(WellState {
                            energy,
                            parity,
                            q,
                            kappa: kappa(q),
                        });
                    }
                }
            }
            m += 1;
        }
        out
    }

    /// Normalized eigenfunction of `state`, left tail positive.
    pub fn wavefunction(&self, state: &WellState, x: f64) -> f64 {
        let l = self.half_width;
        let (q, k) = (state.q, state.kappa);
        let (inside, edge): (fn(f64) -> f64, f64) = match state.parity {
            Parity::Even => (f64::cos, (q * l).cos()),
            Parity::Odd => (f64::sin, (q * l).sin()),
        };
        let raw = if x.abs() <= l {
            inside(q * x)
        } else {
            let s = if state.parity == Parity::Odd { x.signum() } else { 1.0 };
            s * edge * (-k * (x.abs() - l)).exp()
        };
        // ∫ψ² = 2[∫₀ᴸ inside² + edge²/(2κ)]
        let inner = match state.parity {
            Parity::Even => l / 2.0 + (2.0 * q * l).sin() / (4.0 * q),
            Parity::Odd => l / 2.0 - (2.0 * q * l).sin() / (4.0 * q),
        };
        let norm2 = 2.0 * (inner + edge * edge / (2.0 * k));
        // left tail sign: even → sign(edge), odd → −sign(edge)
        let tail = match state.parity {
            Parity::Even => edge.signum(),
            Parity::Odd => -edge.signum(),
        };
        tail * raw / norm2.sqrt()
    }
}

/// Bound energies of the finite square well.
pub fn finite_well_levels(depth: f64, half_width: f64) -> Result<Vec<f64>> {
    Ok(FiniteWell::new(depth, half_width)?
        .states()
        .iter()
        .map(|s| s.energy)
        .collect())
}

/// Bisection root on `[lo, hi]`, converged to `1e-12` relative in the argument
/// (well inside `1e-12` in energy for the wells of interest).
fn bracketed_root(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa * fb > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if b - a <= 1e-15 * b.max(1.0) {
            break;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        assert!((pt_lambda(2.0 * 210f64.sqrt()) - 20.0).abs() < 1e-12);
        assert_eq!(pt_lambda(0.0), 0.0);
        assert!((pt_lambda(2.0) - 1.0).abs() < 1e-15);
        assert!((pt_amplitude(20.0) - 2.0 * 210f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn energy_examples() {
        let e = pt_energies(2.0 * 210f64.sqrt());
        assert_eq!(e.len(), 21);
        for (got, want) in e.iter().zip([-400.0, -361.0, -324.0, -289.0, -256.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        let e = pt_energies(2.0);
        assert_eq!(e.len(), 2);
        assert!((e[0] + 1.0).abs() < 1e-14 && e[1].abs() < 1e-14);
        assert_eq!(pt_energies(0.0), vec![-0.0]);
        let e = pt_energies(13.7);
        let lambda = pt_lambda(13.7);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.iter().all(|&x| x >= -lambda * lambda));
    }

    fn sample(n: u32, a: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..=(24.0 / h) as usize).map(|i| -12.0 + i as f64 * h).collect();
        let ys = xs.iter().map(|&x| pt_wavefunction(n, a, x).unwrap()).collect();
        (xs, ys)
    }

    #[test]
    fn wavefunctions_are_normalized_with_expected_shape() {
        let a = pt_amplitude(20.0);
        for n in 0..5 {
            let h = 1e-3;
            let (xs, ys) = sample(n, a, h);
            let norm: f64 = ys.iter().map(|y| y * y).sum::<f64>() * h;
            assert!((norm - 1.0).abs() < 1e-9, "n = {n}: {norm}");
            assert_eq!(crate::solver::count_nodes(&ys), n as usize);
            // left tail positive
            let first = ys.iter().find(|y| y.abs() > 1e-6).unwrap();
            assert!(*first > 0.0);
            // parity (−1)^n
            for (x, y) in xs.iter().zip(&ys).step_by(997) {
                let m = pt_wavefunction(n, a, -x).unwrap();
                let s = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                assert!((m - s * y).abs() < 1e-12 * (1.0 + y.abs()));
            }
        }
        // ground state maximal at the origin, odd first excited state vanishes there
        let a2 = pt_amplitude(3.0);
        let g0 = pt_wavefunction(0, a2, 0.0).unwrap();
        assert!(g0 > pt_wavefunction(0, a2, 0.1).unwrap());
        assert!(pt_wavefunction(1, a2, 0.0).unwrap().abs() < 1e-15);
        assert!(pt_wavefunction(0, a2, 40.0).unwrap().abs() < 1e-40);
    }

    #[test]
    fn wavefunction_solves_the_effective_equation() {
        let lambda = 6.0;
        let a = pt_amplitude(lambda);
        let h = 1e-3;
        for n in 0..6u32 {
            let e = -(lambda - f64::from(n)).powi(2);
            let mut worst: f64 = 0.0;
            for i in -4000..=4000 {
                let x = i as f64 * h;
                let f = |x: f64| pt_wavefunction(n, a, x).unwrap();
                let lap = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
                let r = -lap - a * a / 2.0 / x.cosh().powi(2) * f(x) - e * f(x);
                worst = worst.max(r.abs());
            }
            assert!(worst < 1e-4, "n = {n}: residual {worst}");
        }
    }

    #[test]
    fn non_integer_lambda_rejected() {
        assert!(pt_wavefunction(0, 5.0, 0.0).is_err());
        assert!(pt_wavefunction(20, pt_amplitude(20.0), 0.0).is_err());
    }

    #[test]
    fn finite_well_roots_satisfy_matching() {
        let well = FiniteWell::new(200.0, 1.0).unwrap();
        let states = well.states();
        assert!(!states.is_empty());
        for s in &states {
            let (q, k) = (s.q, s.kappa);
            let r = match s.parity {
                Parity::Even => k - q * q.tan(),
                Parity::Odd => k + q / q.tan(),
            };
            assert!(r.abs() < 1e-9 * (1.0 + q * q), "{s:?}");
            assert!(s.energy > -200.0 && s.energy < 0.0);
        }
        assert!(states.windows(2).all(|w| w[0].energy < w[1].energy));
        // parities alternate starting from even
        for (i, s) in states.iter().enumerate() {
            assert_eq!(s.parity, if i % 2 == 0 { Parity::Even } else { Parity::Odd });
        }
    }

    #[test]
    fn finite_well_level_count() {
        // N = ⌈√V₀·2L/π⌉
        let v0: f64 = 200.0;
        let expected = (v0.sqrt() * 2.0 / PI).ceil() as usize;
        assert_eq!(finite_well_levels(v0, 1.0).unwrap().len(), expected);
        assert_eq!(finite_well_levels(1e-6, 1.0).unwrap().len(), 1);
    }

    #[test]
    fn deep_well_approaches_infinite_well() {
        let v0 = 1e6;
        let levels = finite_well_levels(v0, 1.0).unwrap();
        for (i, e) in levels.iter().take(5).enumerate() {
            let inf = ((i + 1) as f64 * PI / 2.0).powi(2);
            assert!(((e + v0) - inf).abs() < 0.01 * inf);
        }
    }

    #[test]
    fn well_wavefunctions_normalized() {
        let well = FiniteWell::new(200.0, 1.0).unwrap();
        let h = 1e-4;
        // the topmost level is barely bound and leaks far beyond the window
        for (i, s) in well.states().iter().enumerate().filter(|(_, s)| s.kappa > 2.0) {
            let ys: Vec<f64> = (0..=200_000)
                .map(|j| well.wavefunction(s, -10.0 + j as f64 * h))
                .collect();
            let norm: f64 = ys.iter().map(|y| y * y).sum::<f64>() * h;
            assert!((norm - 1.0).abs() < 1e-6, "state {i}: {norm}");
            assert_eq!(crate::solver::count_nodes(&ys), i);
            assert!(*ys.iter().find(|y| y.abs() > 1e-8).unwrap() > 0.0);
            // continuity at the edge
            let l = 1.0;
            let d = (well.wavefunction(s, l + 1e-12) - well.wavefunction(s, l - 1e-12)).abs();
            assert!(d < 1e-9);
        }
    }
}
