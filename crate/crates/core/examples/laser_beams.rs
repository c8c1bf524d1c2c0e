//! Two crossed Gaussian beams as a fast-oscillating potential.

use fastosc::beams::{intensity_on_axis, to_modulated_form, BeamSetup};
use fastosc::correction::overlap;
use fastosc::experiments::{solve_effective, solve_full, GridSpec};

fn main() -> fastosc::Result<()> {
    let k = 2.0 * 200.0 * (std::f64::consts::PI / 6.0).cos();
    let setup = BeamSetup {
        kappa: 200.0,
        alpha: std::f64::consts::PI / 6.0,
        b: 2.0,
        amplitude: 10.0 * k,
        cancel_background: true,
    };
    let bp = to_modulated_form(&setup)?;
    let mp = &bp.potential;
    println!(
        "k = {:.2}, envelope width {:.2}, scale separation {:.0}",
        setup.lattice_k(),
        setup.envelope_width(),
        bp.scale_separation
    );
    println!(
        "I(0) = {:.1}, V_eff(0) = {:.2}",
        intensity_on_axis(&setup, 0.0),
        mp.effective_potential().smooth(0.0)
    );

    let grid = GridSpec::window(-12.0, 12.0).grid(Some(mp.k()))?;
    let exact = solve_full(mp, &grid, 4)?;
    let smooth = solve_effective(&mp.effective_potential(), &grid, 4)?;
    for n in 0..4 {
        println!(
            "n = {n}: E = {:9.4}, E_eff = {:9.4}, overlap {:.5}",
            exact.energies()[n],
            smooth.energies()[n],
            overlap(exact.state(n), smooth.state(n), grid.dx())
        );
    }
    Ok(())
}
