//! Bound energies against depth a at k = 250, and what doubling k does.

use fastosc::experiments::{energy_sweep, GridSpec};

fn main() -> fastosc::Result<()> {
    let a_values = [5.0, 10.0, 20.0, 29.0];
    let spec = GridSpec::default();
    for k in [250.0, 500.0] {
        let rows = energy_sweep(&a_values, k, &spec)?;
        println!("k = {k}");
        for a in a_values {
            let deep: Vec<_> = rows.iter().filter(|r| r.a == a && r.energy_analytic <= -4.0).collect();
            let worst = deep
                .iter()
                .max_by(|x, y| x.relative_error.total_cmp(&y.relative_error))
                .unwrap();
            println!(
                "  a = {a:4}: {} levels with Ē ≤ −4, worst n = {} ({:.3} vs {:.3}, {:.2}%)",
                deep.len(),
                worst.n,
                worst.energy_exact,
                worst.energy_analytic,
                100.0 * worst.relative_error
            );
        }
    }
    Ok(())
}
