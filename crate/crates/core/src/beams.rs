//! Two Gaussian laser beams crossing at angle 2α: on-axis interference
//! intensity, its Gaussian background, and the mapping onto the
//! `k·v(kx)·Φ(x) + ρ(x)` form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Background, Envelope, ModulatedPotential};
use crate::profile::PeriodicProfile;

pub const DEFAULT_MIN_SEPARATION: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSetup {
    /// Optical wavenumber κ.
    pub kappa: f64,
    /// Half crossing angle α in radians.
    pub alpha: f64,
    /// Gaussian beam width b.
    pub b: f64,
    /// Overall intensity scale (∝ E₀²); its sign selects attraction or repulsion.
    pub amplitude: f64,
    #[serde(default = "default_true")]
    pub cancel_background: bool,
}

fn default_true() -> bool {
    true
}

impl BeamSetup {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.alpha > 0.0 && self.alpha < std::f64::consts::FRAC_PI_2) {
            return bad("alpha", format!("need 0 < α < π/2, got {}", self.alpha));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return bad("kappa", format!("must be positive, got {}", self.kappa));
        }
        if !(self.b > 0.0) || !self.b.is_finite() {
            return bad("b", format!("must be positive, got {}", self.b));
        }
        if self.amplitude == 0.0 || !self.amplitude.is_finite() {
            return bad(
                "amplitude",
                format!("must be nonzero and finite, got {}", self.amplitude),
            );
        }
        Ok(())
    }

    /// Lattice wavenumber `2κ·cos α`.
    pub fn lattice_k(&self) -> f64 {
        2.0 * self.kappa * self.alpha.cos()
    }

    /// Envelope width `b/sin α`.
    pub fn envelope_width(&self) -> f64 {
        self.b / self.alpha.sin()
    }

    /// `k·b/sin α`, the ratio of envelope width to lattice length `1/k`.
    pub fn scale_separation(&self) -> f64 {
        self.lattice_k() * self.envelope_width()
    }

    fn gaussian(&self, x: f64) -> f64 {
        let s = self.alpha.sin();
        (-x * x * s * s / (self.b * self.b)).exp()
    }

    /// Standard deviation σ of `exp(−x² sin²α/b²) = exp(−x²/(2σ²))`.
    fn sigma(&self) -> f64 {
        self.envelope_width() / std::f64::consts::SQRT_2
    }
}

/// `A·(1 + cos(2κx·cos α))·exp(−x² sin²α/b²)`.
pub fn intensity_on_axis(setup: &BeamSetup, x: f64) -> f64 {
    setup.amplitude * (1.0 + (setup.lattice_k() * x).cos()) * setup.gaussian(x)
}

/// `A·exp(−x² sin²α/b²)`.
pub fn background(setup: &BeamSetup, x: f64) -> f64 {
    setup.amplitude * setup.gaussian(x)
}

/// Modulated-potential form of a beam setup plus its scale-separation ratio.
#[derive(Clone, Debug)]
pub struct BeamPotential {
    pub potential: ModulatedPotential,
    pub scale_separation: f64,
}

/// Maps the setup to `k = 2κ cos α`, `v = cos`, `Φ = (A/k)·exp(−x² sin²α/b²)`
/// and `ρ = 0` (or the Gaussian background when it is not cancelled), so that
/// `k·v(kx)·Φ(x) + ρ(x)` reproduces the intensity exactly.
pub fn to_modulated_form(setup: &BeamSetup) -> Result<BeamPotential> {
    to_modulated_form_with(setup, DEFAULT_MIN_SEPARATION)
}

pub fn to_modulated_form_with(setup: &BeamSetup, min_separation: f64) -> Result<BeamPotential> {
    setup.validate()?;
    let ratio = setup.scale_separation();
    if ratio < min_separation {
        return Err(Error::ScaleSeparation {
            ratio,
            min: min_separation,
        });
    }
    let k = setup.lattice_k();
    let envelope = Envelope::gaussian(setup.amplitude / k, setup.sigma())?;
    let background = if setup.cancel_background {
        Background::Zero
    } else {
        Background::Gaussian {
            amplitude: setup.amplitude,
            sigma: setup.sigma(),
        }
    };
    Ok(BeamPotential {
        potential: ModulatedPotential::new(k, PeriodicProfile::cos(), envelope, background)?,
        scale_separation: ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup() -> BeamSetup {
        BeamSetup {
            kappa: 200.0,
            alpha: PI / 6.0,
            b: 2.0,
            amplitude: 3.0,
            cancel_background: true,
        }
    }

    #[test]
    fn intensity_examples() {
        let s = setup();
        assert_eq!(intensity_on_axis(&s, 0.0), 6.0);
        assert_eq!(background(&s, 0.0), 3.0);
        let node = PI / s.lattice_k();
        assert!(intensity_on_axis(&s, node).abs() < 1e-12);
        assert!(intensity_on_axis(&s, 100.0).abs() < 1e-100);
        for &x in &[-1.3, 0.2, 2.7] {
            let diff = intensity_on_axis(&s, x) - background(&s, x);
            let expected = 3.0 * (s.lattice_k() * x).cos() * s.gaussian(x);
            assert!((diff - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn counter_propagating_limit() {
        let mut s = setup();
        s.alpha = PI / 2.0 - 1e-9;
        assert!((s.envelope_width() - s.b).abs() < 1e-8);
    }

    #[test]
    fn mapping_parameters() {
        let s = setup();
        let bp = to_modulated_form(&s).unwrap();
        let k = bp.potential.k();
        assert!((k - 400.0 * (PI / 6.0).cos()).abs() < 1e-12);
        assert!((k - 346.41).abs() < 1e-2);
        assert!((s.envelope_width() - 4.0).abs() < 1e-12);
        assert!((bp.scale_separation - k * 4.0).abs() < 1e-9);
    }

    #[test]
    fn round_trip_reproduces_cancelled_intensity() {
        let s = setup();
        let mp = to_modulated_form(&s).unwrap().potential;
        for i in 0..2001 {
            let x = -10.0 + i as f64 * 0.01;
            let want = intensity_on_axis(&s, x) - background(&s, x);
            assert!((mp.evaluate(x) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn uncancelled_background_is_rho() {
        let mut s = setup();
        s.cancel_background = false;
        let mp = to_modulated_form(&s).unwrap().potential;
        for &x in &[-2.0, 0.0, 0.7] {
            assert!((mp.background().value(x) - background(&s, x)).abs() < 1e-14);
            assert!((mp.evaluate(x) - intensity_on_axis(&s, x)).abs() < 1e-12);
        }
        let cancelled = to_modulated_form(&setup()).unwrap().potential;
        assert_eq!(cancelled.envelope().value(0.4), mp.envelope().value(0.4));
    }

    #[test]
    fn effective_well_is_attractive_gaussian() {
        let s = setup();
        let mp = to_modulated_form(&s).unwrap().potential;
        let eff = mp.effective_potential();
        let k = mp.k();
        for &x in &[-3.0, 0.0, 1.5] {
            let sa = s.alpha.sin();
            let want = -(9.0 / (2.0 * k * k)) * (-2.0 * x * x * sa * sa / 4.0).exp();
            assert!((eff.smooth(x) - want).abs() < 1e-15);
            assert!(eff.smooth(x) < 0.0);
        }
        // depth ∝ amplitude²
        let mut s2 = s;
        s2.amplitude *= 2.0;
        let eff2 = to_modulated_form(&s2).unwrap().potential.effective_potential();
        assert!((eff2.smooth(0.0) / eff.smooth(0.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_poor_scale_separation_and_bad_angles() {
        let mut s = setup();
        s.kappa = 0.5;
        s.b = 0.5;
        assert!(matches!(to_modulated_form(&s), Err(Error::ScaleSeparation { .. })));
        let mut s = setup();
        s.alpha = 0.0;
        assert!(to_modulated_form(&s).is_err());
    }
}
