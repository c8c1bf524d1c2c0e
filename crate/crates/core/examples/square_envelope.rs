//! Square envelope: v = cos reduces to a finite well, v = sin adds edge deltas.

use fastosc::experiments::{square_comparison, GridSpec, SquareSetup};
use fastosc::PeriodicProfile;

fn main() -> fastosc::Result<()> {
    let setup = SquareSetup {
        height: 20.0,
        half_width: 1.0,
        target_k: 250.0,
        edge_phase: 0.0,
    };
    for profile in [PeriodicProfile::cos(), PeriodicProfile::sin()] {
        let name = profile.name().to_string();
        let s = square_comparison(profile, &setup, 5, &GridSpec::window(-4.0, 4.0))?;
        let overlaps: Vec<String> = s.comparison.rows.iter().map(|r| format!("{:.4}", r.overlap)).collect();
        println!("v = {name}, k = {:.4}", s.comparison.k);
        println!(
            "  reference: {}",
            if s.oracle_reference {
                "finite-well oracle"
            } else {
                "well + deltas (numerical)"
            }
        );
        println!("  overlaps: {}", overlaps.join(" "));
        println!("  bound states: exact {}, oracle {:?}", s.bound_exact, s.bound_oracle);
        println!(
            "  ground density left/right: {:.4} / {:.4}",
            s.ground_density_halves.0, s.ground_density_halves.1
        );
    }
    Ok(())
}
