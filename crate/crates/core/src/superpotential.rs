//! Superpotential machinery: the transformed Riccati equation for
//! `W′ = W + g(kx)Φ(x)`, its period average, and the jump of `W′` at
//! envelope discontinuities.
//!
//! The exact field
//! `dW′/dx = [W′ − g(kx)Φ]² − ρ + g(kx)·dΦ/dx`
//! carries no O(k) term, so it can be integrated with a step that only needs
//! to resolve the oscillation period. The averaged field is
//! `dW̄′/dx = W̄′² + <g²>Φ² − ρ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{phase_at, Background, Envelope, ModulatedPotential};
use crate::profile::PeriodicProfile;

pub const DEFAULT_BLOWUP_CAP: f64 = 1e6;

/// Step used for both the exact and averaged fields: `min(2π/(64k), 1e-3)`.
pub fn default_step(k: f64) -> f64 {
    (2.0 * PI / (64.0 * k)).min(1e-3)
}

/// Integration interval and initial data shared by the exact and averaged
/// trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiccatiSetup {
    pub x0: f64,
    pub x1: f64,
    /// `W′(x0)`; identical for both trajectories.
    pub w0: f64,
    pub cap: f64,
    /// Upper bound on the step; the actual step divides each segment evenly.
    pub max_step: f64,
}

impl RiccatiSetup {
    pub fn new(x0: f64, x1: f64, w0: f64, k: f64) -> Self {
        Self {
            x0,
            x1,
            w0,
            cap: DEFAULT_BLOWUP_CAP,
            max_step: default_step(k),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.x1 > self.x0) {
            return Err(Error::InvalidParameter {
                name: "x1",
                reason: format!("need x0 < x1, got [{}, {}]", self.x0, self.x1),
            });
        }
        if !(self.max_step > 0.0) || !(self.cap > 0.0) || !self.w0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "max_step",
                reason: "step and cap must be positive, w0 finite".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub x: Vec<f64>,
    /// Transformed superpotential `W′` (or `W̄′` for averaged trajectories).
    pub w_prime: Vec<f64>,
    /// `W = W′ − g(kx)Φ(x)`; only for exact trajectories.
    pub w: Option<Vec<f64>>,
    /// Position where `|W′|` first exceeded the cap.
    pub blowup: Option<f64>,
}

impl Trajectory {
    pub fn blew_up(&self) -> bool {
        self.blowup.is_some()
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.blowup {
            Some(at) => Err(Error::Blowup { at }),
            None => Ok(()),
        }
    }
}

/// `W′(x₀+0) − W′(x₀−0) = g(φ₀)·ΔΦ`.
pub fn jump_condition(delta_phi: f64, phase: f64, profile: &PeriodicProfile) -> f64 {
    profile.g(phase) * delta_phi
}

/// Segment boundaries `[x0, d₁, …, x1]` at envelope jumps inside `(x0, x1)`.
fn segments(envelope: &Envelope, x0: f64, x1: f64) -> Vec<(f64, f64, f64)> {
    let mut cuts: Vec<(f64, f64)> = envelope
        .discontinuities()
        .into_iter()
        .filter(|d| d.position > x0 && d.position < x1)
        .map(|d| (d.position, d.jump))
        .collect();
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = x0;
    for (pos, jump) in cuts {
        out.push((start, pos, jump));
        start = pos;
    }
    out.push((start, x1, 0.0));
    out
}

/// Fixed-step RK4 over `[x0, x1]`, split at envelope jumps where `jump_at`
/// maps `(position, ΔΦ)` to the step in the integrated variable.
fn integrate<F, J>(envelope: &Envelope, setup: &RiccatiSetup, field: F, jump_at: J) -> (Vec<f64>, Vec<f64>, Option<f64>)
where
    F: Fn(f64, f64, f64, f64) -> f64,
    J: Fn(f64, f64) -> f64,
{
    let mut xs = vec![setup.x0];
    let mut ws = vec![setup.w0];
    let mut w = setup.w0;
    for (a, b, jump) in segments(envelope, setup.x0, setup.x1) {
        let steps = ((b - a) / setup.max_step).ceil().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        // evaluations stay strictly inside the segment so one-sided envelope
        // values are used at its ends
        let eps = 1e-12 * (1.0 + a.abs().max(b.abs()));
        let f = |x: f64, w: f64| field(x.clamp(a + eps, b - eps), w, a, b);
        for i in 0..steps {
            let x = a + i as f64 * h;
            let k1 = f(x, w);
            let k2 = f(x + 0.5 * h, w + 0.5 * h * k1);
            let k3 = f(x + 0.5 * h, w + 0.5 * h * k2);
            let k4 = f(x + h, w + h * k3);
            w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let xn = if i + 1 == steps { b } else { a + (i + 1) as f64 * h };
            if !w.is_finite() || w.abs() > setup.cap {
                return (xs, ws, Some(xn));
            }
            xs.push(xn);
            ws.push(w);
        }
        if jump != 0.0 {
            w += jump_at(b, jump);
            if !w.is_finite() || w.abs() > setup.cap {
                return (xs, ws, Some(b));
            }
            // the jump point carries the right limit
            *ws.last_mut().unwrap() = w;
        }
    }
    (xs, ws, None)
}

/// Integrates the transformed Riccati equation for `W′` exactly (no averaging).
pub fn integrate_exact(mp: &ModulatedPotential, setup: &RiccatiSetup) -> Result<Trajectory> {
    setup.validate()?;
    let k = mp.k();
    let profile = mp.profile();
    let env = mp.envelope();
    let bg = mp.background();
    let field = |x: f64, wp: f64, _a: f64, _b: f64| {
        let g = profile.g(k * x);
        let phi = env.value(x);
        let w = wp - g * phi;
        w * w - bg.value(x) + g * env.derivative(x)
    };
    let jump = |x: f64, dphi: f64| jump_condition(dphi, phase_at(k, x), profile);
    let (x, w_prime, blowup) = integrate(env, setup, field, jump);
    let w = x
        .iter()
        .zip(&w_prime)
        .map(|(&x, &wp)| wp - profile.g(k * x) * one_sided_right(env, x))
        .collect();
    Ok(Trajectory {
        x,
        w_prime,
        w: Some(w),
        blowup,
    })
}

/// Right limit of the envelope at `x` (the trajectory stores right limits at
/// jump points).
fn one_sided_right(env: &Envelope, x: f64) -> f64 {
    match env.discontinuities().iter().find(|d| d.position == x) {
        Some(d) => env.value(x) + 0.5 * d.jump,
        None => env.value(x),
    }
}

/// Inputs of the averaged equation.
#[derive(Clone, Debug)]
pub struct AveragedField {
    pub g_mean_square: f64,
    pub envelope: Envelope,
    pub background: Background,
    /// `(k, profile)` used for jump terms at envelope discontinuities.
    pub phase_source: Option<(f64, PeriodicProfile)>,
}

impl AveragedField {
    pub fn from_potential(mp: &ModulatedPotential) -> Self {
        Self {
            g_mean_square: mp.profile().g_mean_square(),
            envelope: mp.envelope().clone(),
            background: mp.background().clone(),
            phase_source: Some((mp.k(), mp.profile().clone())),
        }
    }
}

/// Integrates `dW̄′/dx = W̄′² + <g²>Φ² − ρ`, applying the same jump of `W′` at
/// envelope discontinuities as the exact equation.
pub fn integrate_averaged(field: &AveragedField, setup: &RiccatiSetup) -> Result<Trajectory> {
    setup.validate()?;
    let env = &field.envelope;
    let f = |x: f64, w: f64, _a: f64, _b: f64| {
        let phi = env.value(x);
        w * w + field.g_mean_square * phi * phi - field.background.value(x)
    };
    let jump = |x: f64, dphi: f64| match &field.phase_source {
        Some((k, profile)) => jump_condition(dphi, phase_at(*k, x), profile),
        None => 0.0,
    };
    let (x, w_prime, blowup) = integrate(env, setup, f, jump);
    Ok(Trajectory {
        x,
        w_prime,
        w: None,
        blowup,
    })
}

/// `max |W′ − W̄′|` over the shared grid.
pub fn averaging_error(mp: &ModulatedPotential, setup: &RiccatiSetup) -> Result<f64> {
    let exact = integrate_exact(mp, setup)?;
    exact.ensure_finite()?;
    let avg = integrate_averaged(&AveragedField::from_potential(mp), setup)?;
    avg.ensure_finite()?;
    Ok(exact
        .w_prime
        .iter()
        .zip(&avg.w_prime)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
