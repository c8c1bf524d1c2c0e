//! 2π-periodic zero-mean oscillation profiles `v(s)` together with their
//! zero-mean antiderivative `g` (`g' = v`) and zero-mean second
//! antiderivative `w` (`w'' = v`, `w' = g`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Default number of samples per period for tabulated profiles and quadrature.
pub const DEFAULT_SAMPLES: usize = 4096;

/// Largest admissible `|<v>|` for a profile.
pub const ZERO_MEAN_TOL: f64 = 1e-10;

/// One term `cos_amp·cos(n s) + sin_amp·sin(n s)` of a Fourier profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub n: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

impl Harmonic {
    pub fn new(n: u32, cos: f64, sin: f64) -> Self {
        Self { n, cos, sin }
    }
}

type PhaseFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Fourier(Vec<Harmonic>),
    Tabulated(Arc<Tabulation>),
}

/// Samples of v, g and w on a uniform periodic grid, plus the original callable.
struct Tabulation {
    v: PhaseFn,
    v_samples: Vec<f64>,
    g: Vec<f64>,
    w: Vec<f64>,
}

impl Tabulation {
    fn spacing(&self) -> f64 {
        TWO_PI / self.g.len() as f64
    }

    /// Cubic Hermite interpolation of `f` with derivative samples `df`.
    fn hermite(&self, f: &[f64], df: &[f64], s: f64) -> f64 {
        let n = f.len();
        let h = self.spacing();
        let t = reduce_phase(s) / h;
        let i = (t.floor() as usize).min(n - 1);
        let u = t - i as f64;
        let j = (i + 1) % n;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * f[i] + h10 * h * df[i] + h01 * f[j] + h11 * h * df[j]
    }
}

/// A 2π-periodic zero-mean profile `v(s)` with its antiderivatives.
///
/// Built-in profiles (`cos`, `sin`, Fourier series) carry exact `g` and `w`.
/// Arbitrary callables are tabulated over one period; `g` and `w` are then
/// obtained by spectral integration of the samples and evaluated with cubic
/// Hermite interpolation (using `g' = v` and `w' = g` at the nodes).
#[derive(Clone)]
pub struct PeriodicProfile {
    name: String,
    repr: Repr,
    g_mean_square: f64,
}

impl fmt::Debug for PeriodicProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicProfile")
            .field("name", &self.name)
            .field("g_mean_square", &self.g_mean_square)
            .finish()
    }
}

/// Reduces a phase to `[0, 2π)`.
pub fn reduce_phase(s: f64) -> f64 {
    let r = s.rem_euclid(TWO_PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// `(1/2π)∫₀^{2π} f(s) ds` by the composite trapezoid rule on `samples` points.
///
/// For smooth periodic integrands the trapezoid rule converges
/// exponentially, so the default sample count is far below 1e-10 error.
pub fn period_average_with<F: Fn(f64) -> f64>(f: F, samples: usize) -> f64 {
    let h = TWO_PI / samples as f64;
    let sum: f64 = (0..samples).map(|i| f(i as f64 * h)).sum();
    sum / samples as f64
}

pub fn period_average<F: Fn(f64) -> f64>(f: F) -> f64 {
    period_average_with(f, DEFAULT_SAMPLES)
}

impl PeriodicProfile {
    pub fn cos() -> Self {
        Self::from_harmonics("cos", vec![Harmonic::new(1, 1.0, 0.0)])
    }

    pub fn sin() -> Self {
        Self::from_harmonics("sin", vec![Harmonic::new(1, 0.0, 1.0)])
    }

    pub fn zero() -> Self {
        Self::from_harmonics("zero", Vec::new())
    }

    /// Looks up a named built-in profile.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "cos" => Ok(Self::cos()),
            "sin" => Ok(Self::sin()),
            "zero" => Ok(Self::zero()),
            other => Err(Error::InvalidProfile(format!(
                "unknown built-in profile `{other}` (expected cos, sin or zero)"
            ))),
        }
    }

    /// Truncated Fourier series. The constant term is not representable: a
    /// harmonic index of zero is rejected.
    pub fn fourier(harmonics: Vec<Harmonic>) -> Result<Self> {
        for h in &harmonics {
            if h.n == 0 {
                return Err(Error::InvalidProfile(
                    "harmonic index 0 would give the profile a nonzero mean".into(),
                ));
            }
            if !h.cos.is_finite() || !h.sin.is_finite() {
                return Err(Error::InvalidProfile(format!(
                    "non-finite amplitude in harmonic {}",
                    h.n
                )));
            }
        }
        Ok(Self::from_harmonics("fourier", harmonics))
    }

    fn from_harmonics(name: &str, harmonics: Vec<Harmonic>) -> Self {
        // <g²> by Parseval, after merging repeated harmonic indices
        let mut merged: Vec<Harmonic> = Vec::new();
        for h in &harmonics {
            match merged.iter_mut().find(|m| m.n == h.n) {
                Some(m) => {
                    m.cos += h.cos;
                    m.sin += h.sin;
                }
                None => merged.push(*h),
            }
        }
        let g_mean_square = merged
            .iter()
            .map(|h| (h.cos * h.cos + h.sin * h.sin) / (2.0 * f64::from(h.n).powi(2)))
            .sum();
        Self {
            name: name.to_string(),
            repr: Repr::Fourier(harmonics),
            g_mean_square,
        }
    }

    /// Tabulates an arbitrary 2π-periodic callable over one period.
    pub fn make_profile<F>(v: F, samples_per_period: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if samples_per_period < 8 {
            return Err(Error::InvalidProfile(format!(
                "samples_per_period = {samples_per_period} is too small (need at least 8)"
            )));
        }
        let n = samples_per_period;
        let h = TWO_PI / n as f64;
        let v_samples: Vec<f64> = (0..n).map(|i| v(i as f64 * h)).collect();
        if let Some(i) = v_samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "profile is not finite at s = {}",
                i as f64 * h
            )));
        }
        let mean = v_samples.iter().sum::<f64>() / n as f64;
        let scale = v_samples.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if mean.abs() > ZERO_MEAN_TOL * scale {
            return Err(Error::NonZeroMean {
                mean,
                tol: ZERO_MEAN_TOL,
            });
        }

        let (g, w) = spectral_antiderivatives(&v_samples);
        let g_mean_square = g.iter().map(|x| x * x).sum::<f64>() / n as f64;
        Ok(Self {
            name: "tabulated".into(),
            repr: Repr::Tabulated(Arc::new(Tabulation {
                v: Arc::new(v),
                v_samples,
                g,
                w,
            })),
            g_mean_square,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Fourier(hs) => hs
                .iter()
                .map(|h| {
                    let x = f64::from(h.n) * s;
                    h.cos * x.cos() + h.sin * x.sin()
                })
                .sum(),
            Repr::Tabulated(t) => (t.v)(s),
        }
    }

    /// Zero-mean antiderivative of `v`.
    pub fn g(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Fourier(hs) => hs
                .iter()
                .map(|h| {
                    let n = f64::from(h.n);
                    let x = n * s;
                    (h.cos * x.sin() - h.sin * x.cos()) / n
                })
                .sum(),
            Repr::Tabulated(t) => t.hermite(&t.g, &t.v_samples, s),
        }
    }

    /// Zero-mean periodic function with `w'' = v`.
    pub fn w(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Fourier(hs) => hs
                .iter()
                .map(|h| {
                    let n = f64::from(h.n);
                    let x = n * s;
                    -(h.cos * x.cos() + h.sin * x.sin()) / (n * n)
                })
                .sum(),
            Repr::Tabulated(t) => t.hermite(&t.w, &t.g, s),
        }
    }

    /// `<g²>` over one period.
    pub fn g_mean_square(&self) -> f64 {
        self.g_mean_square
    }

    /// Upper bound on `|w|` over a period.
    pub fn w_max(&self) -> f64 {
        match &self.repr {
            Repr::Fourier(hs) => hs.iter().map(|h| h.cos.hypot(h.sin) / f64::from(h.n).powi(2)).sum(),
            Repr::Tabulated(t) => t.w.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

/// Zero-mean first and second antiderivatives of uniformly sampled periodic
/// data, computed exactly for the trigonometric interpolant of the samples.
fn spectral_antiderivatives(samples: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut spec: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    forward.process(&mut spec);

    let mut g_spec = vec![Complex::new(0.0, 0.0); n];
    let mut w_spec = vec![Complex::new(0.0, 0.0); n];
    for (i, c) in spec.iter().enumerate() {
        if i == 0 || 2 * i == n {
            continue;
        }
        let m = if 2 * i < n { i as f64 } else { i as f64 - n as f64 };
        // d/ds e^{ims} = im e^{ims}
        let gi = *c / Complex::new(0.0, m);
        g_spec[i] = gi;
        w_spec[i] = gi / Complex::new(0.0, m);
    }
    inverse.process(&mut g_spec);
    inverse.process(&mut w_spec);
    let scale = 1.0 / n as f64;
    (
        g_spec.iter().map(|c| c.re * scale).collect(),
        w_spec.iter().map(|c| c.re * scale).collect(),
    )
}
