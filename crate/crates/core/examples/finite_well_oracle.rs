//! The eigensolver against transcendental finite-well roots at two grid spacings.

use fastosc::analytic::FiniteWell;
use fastosc::experiments::{finite_well_grid_study, GridSpec};

fn main() -> fastosc::Result<()> {
    let well = FiniteWell::new(200.0, 1.0)?;
    for s in well.states() {
        println!(
            "{:?} E = {:.8} (q = {:.6}, κ = {:.6})",
            s.parity, s.energy, s.q, s.kappa
        );
    }
    let (coarse, fine) = finite_well_grid_study(200.0, 1.0, 10, &GridSpec::window(-100.0, 100.0))?;
    println!("\n n   err(dx={})   err(dx={})   ratio", coarse[0].dx, fine[0].dx);
    for (n, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        println!(
            "{n:2}   {:.3e}       {:.3e}      {:.3}",
            c.error,
            f.error,
            c.error / f.error
        );
    }
    Ok(())
}
