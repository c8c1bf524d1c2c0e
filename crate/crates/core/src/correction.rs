//! First-order oscillatory correction to the smoothed wavefunction,
//! `ξ(x) = Φ(x)·ψ̄(x)·w(kx)/k`, and comparison helpers on a grid.

use serde::Serialize;

use crate::potential::ModulatedPotential;
use crate::profile::{period_average, PeriodicProfile};
use crate::solver::Grid;

/// `ξ` sampled on the grid nodes.
pub fn oscillatory_correction(mp: &ModulatedPotential, grid: &Grid, psi_bar: &[f64]) -> Vec<f64> {
    assert_eq!(psi_bar.len(), grid.len(), "state and grid sizes differ");
    let k = mp.k();
    psi_bar
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let x = grid.x(j);
            mp.envelope().value(x) * p * mp.profile().w(k * x) / k
        })
        .collect()
}

/// Smoothed state with its correction; `corrected()` is not renormalized.
#[derive(Clone, Debug, Serialize)]
pub struct CorrectedState {
    pub base: Vec<f64>,
    pub correction: Vec<f64>,
    pub energy: f64,
}

impl CorrectedState {
    pub fn new(mp: &ModulatedPotential, grid: &Grid, base: Vec<f64>, energy: f64) -> Self {
        let correction = oscillatory_correction(mp, grid, &base);
        Self {
            base,
            correction,
            energy,
        }
    }

    pub fn corrected(&self) -> Vec<f64> {
        self.base.iter().zip(&self.correction).map(|(a, b)| a + b).collect()
    }
}

/// `(<v·w>, −<(w′)²>)` over one period; equal by integration by parts.
/// `w′` is taken by central differences of `w` so the two sides are computed
/// independently of each other.
pub fn identity_check(profile: &PeriodicProfile) -> (f64, f64) {
    let vw = period_average(|s| profile.v(s) * profile.w(s));
    let h = 1e-4;
    // fourth-order central difference
    let dw = |s: f64| {
        (-profile.w(s + 2.0 * h) + 8.0 * profile.w(s + h) - 8.0 * profile.w(s - h) + profile.w(s - 2.0 * h))
            / (12.0 * h)
    };
    let dw2 = period_average(|s| dw(s).powi(2));
    (vw, -dw2)
}

pub fn inner(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dx
}

pub fn l2_norm(a: &[f64], dx: f64) -> f64 {
    inner(a, a, dx).sqrt()
}

/// Copy scaled to unit discrete L² norm.
pub fn normalized(a: &[f64], dx: f64) -> Vec<f64> {
    let n = l2_norm(a, dx);
    a.iter().map(|x| x / n).collect()
}

/// `|<a|b>|` after normalizing both.
pub fn overlap(a: &[f64], b: &[f64], dx: f64) -> f64 {
    (inner(a, b, dx) / (l2_norm(a, dx) * l2_norm(b, dx))).abs()
}

/// `‖a − ±b‖₂` after normalizing both, with the sign of `b` chosen to match `a`.
pub fn l2_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    let a = normalized(a, dx);
    let mut b = normalized(b, dx);
    if inner(&a, &b, dx) < 0.0 {
        b.iter_mut().for_each(|x| *x = -*x);
    }
    let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    l2_norm(&d, dx)
}
