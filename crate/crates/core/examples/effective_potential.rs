//! Full vs effective potential, phase locking, and delta terms at jumps.

use fastosc::potential::{find_phase_locked_k, PhaseConstraint};
use fastosc::{Background, Envelope, ModulatedPotential, PeriodicProfile};

fn main() -> fastosc::Result<()> {
    let a = 2.0 * 210f64.sqrt();
    let mp = ModulatedPotential::new(250.0, PeriodicProfile::cos(), Envelope::sech(a), Background::Zero)?;
    let eff = mp.effective_potential();
    println!("sech well, k = 250, a = 2√210");
    for x in [0.0, 0.5, 1.0, 2.0] {
        println!(
            "  x = {x:3}: V = {:10.2}  V_eff = {:8.3}",
            mp.evaluate(x),
            eff.smooth(x)
        );
    }

    // edges of a square envelope at ±1 with the phase k·x ≡ 0 there
    let edges = [-1.0, 1.0].map(|position| PhaseConstraint { position, phase: 0.0 });
    let k = find_phase_locked_k(250.0, &edges)?;
    println!("\nphase-locked k near 250: {k:.6} = {:.1}π", k / std::f64::consts::PI);
    for profile in [PeriodicProfile::cos(), PeriodicProfile::sin()] {
        let name = profile.name().to_string();
        let mp = ModulatedPotential::new(k, profile, Envelope::square(20.0, 1.0)?, Background::Zero)?;
        let eff = mp.effective_potential();
        println!("  v = {name}: depth {:.1}, deltas {:?}", -eff.smooth(0.0), eff.deltas());
    }
    Ok(())
}
