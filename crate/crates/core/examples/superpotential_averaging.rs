//! Exact and averaged Riccati equations for W′ on the sech well.

use fastosc::superpotential::{integrate_averaged, integrate_exact, AveragedField, RiccatiSetup};
use fastosc::{Background, Envelope, ModulatedPotential, PeriodicProfile};

fn main() -> fastosc::Result<()> {
    for k in [250.0, 500.0, 1000.0, 2000.0] {
        let mp = ModulatedPotential::new(k, PeriodicProfile::cos(), Envelope::sech(1.0), Background::Zero)?;
        let setup = RiccatiSetup::new(-3.0, 0.0, 0.0, k);
        let exact = integrate_exact(&mp, &setup)?;
        let avg = integrate_averaged(&AveragedField::from_potential(&mp), &setup)?;
        let err = exact
            .w_prime
            .iter()
            .zip(&avg.w_prime)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "k = {k:6}: W'(0) exact {:.6}, averaged {:.6}, sup error {err:.3e} over {} steps",
            exact.w_prime.last().unwrap(),
            avg.w_prime.last().unwrap(),
            exact.x.len() - 1
        );
    }
    Ok(())
}
