//! Exact eigenstates of k·cos(kx)·a·sech(x) against Pöschl–Teller states.

use fastosc::experiments::{sech_comparison, GridSpec};

fn main() -> fastosc::Result<()> {
    let c = sech_comparison(20, 250.0, 5, &GridSpec::default())?;
    println!("λ = 20, k = 250, {} grid nodes", c.grid.len());
    println!(" n  nodes   E_exact    E_analytic  overlap");
    for r in &c.rows {
        println!(
            "{:2}  {:5}  {:9.3}  {:9.3}   {:.5}",
            r.n, r.nodes_exact, r.energy_exact, r.energy_effective, r.overlap
        );
    }
    Ok(())
}
