//! First-order correction ξ = Φ·ψ̄·w(kx)/k restores the fast ripple.

use fastosc::correction::identity_check;
use fastosc::experiments::{sech_comparison, GridSpec};
use fastosc::{Harmonic, PeriodicProfile};

fn main() -> fastosc::Result<()> {
    let c = sech_comparison(20, 250.0, 5, &GridSpec::default())?;
    println!(" n   ‖ψ − ψ̄‖    ‖ψ − (ψ̄+ξ)‖");
    for r in &c.rows {
        println!("{:2}   {:.5}    {:.5}", r.n, r.l2_uncorrected, r.l2_corrected);
    }

    let two = PeriodicProfile::fourier(vec![Harmonic::new(1, 1.0, 0.0), Harmonic::new(3, 0.0, 0.5)])?;
    for p in [PeriodicProfile::cos(), PeriodicProfile::sin(), two] {
        let (vw, w2) = identity_check(&p);
        println!("{:>10}: <vw> = {vw:.12}, -<(w')²> = {w2:.12}", p.name());
    }
    Ok(())
}
