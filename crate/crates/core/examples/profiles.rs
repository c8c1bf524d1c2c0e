//! Periodic profiles and their zero-mean antiderivatives.

use fastosc::profile::period_average;
use fastosc::{Harmonic, PeriodicProfile};

fn main() -> fastosc::Result<()> {
    let two = PeriodicProfile::fourier(vec![Harmonic::new(1, 1.0, 0.0), Harmonic::new(3, 0.0, 0.5)])?;
    // a triangle wave has no closed form here; g and w come from the samples
    let triangle = PeriodicProfile::make_profile(|s| 1.0 - 2.0 * (s / std::f64::consts::PI - 1.0).abs(), 4096)?;

    for p in [PeriodicProfile::cos(), PeriodicProfile::sin(), two, triangle] {
        println!(
            "{:>10}: <g²> = {:.6}  <g> = {:+.1e}  max|w| = {:.4}",
            p.name(),
            p.g_mean_square(),
            period_average(|s| p.g(s)),
            p.w_max()
        );
    }

    match PeriodicProfile::make_profile(|s| 0.3 + s.cos(), 1024) {
        Err(e) => println!("offset profile rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
