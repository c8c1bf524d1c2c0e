use fastosc::analytic::{finite_well_levels, pt_energies, pt_lambda};
use fastosc::beams::{intensity_on_axis, to_modulated_form, BeamSetup};
use fastosc::correction::{identity_check, inner, l2_norm};
use fastosc::potential::{find_phase_locked_k, phase_at};
use fastosc::profile::{period_average, reduce_phase};
use fastosc::solver::{assemble, lowest_eigenpairs};
use fastosc::{Background, DeltaTerm, Envelope, Grid, Harmonic, ModulatedPotential, PeriodicProfile, PhaseConstraint};
use proptest::prelude::*;

fn harmonics() -> impl Strategy<Value = Vec<Harmonic>> {
    prop::collection::vec((1u32..6, -2.0..2.0f64, -2.0..2.0f64), 1..4)
        .prop_map(|v| v.into_iter().map(|(n, c, s)| Harmonic::new(n, c, s)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn antiderivatives_have_zero_mean(h in harmonics()) {
        let p = PeriodicProfile::fourier(h).unwrap();
        prop_assert!(period_average(|s| p.g(s)).abs() < 1e-10);
        prop_assert!(period_average(|s| p.w(s)).abs() < 1e-10);
        let direct = period_average(|s| p.g(s).powi(2));
        prop_assert!((direct - p.g_mean_square()).abs() < 1e-9 * (1.0 + direct));
    }

    #[test]
    fn derivative_relations(h in harmonics(), s in 0.0..std::f64::consts::TAU) {
        let p = PeriodicProfile::fourier(h).unwrap();
        let e = 1e-5;
        let dg = (p.g(s + e) - p.g(s - e)) / (2.0 * e);
        let d2w = (p.w(s + e) - 2.0 * p.w(s) + p.w(s - e)) / (e * e);
        prop_assert!((dg - p.v(s)).abs() < 1e-6 * (1.0 + p.v(s).abs()));
        prop_assert!((d2w - p.v(s)).abs() < 1e-3 * (1.0 + p.v(s).abs()));
    }

    #[test]
    fn tabulated_profile_matches_fourier(h in harmonics(), s in 0.0..std::f64::consts::TAU) {
        let exact = PeriodicProfile::fourier(h.clone()).unwrap();
        let tab = PeriodicProfile::make_profile(move |s| {
            h.iter().map(|t| t.cos * (t.n as f64 * s).cos() + t.sin * (t.n as f64 * s).sin()).sum()
        }, 2048).unwrap();
        prop_assert!((tab.g(s) - exact.g(s)).abs() < 1e-8);
        prop_assert!((tab.w(s) - exact.w(s)).abs() < 1e-8);
    }

    #[test]
    fn vw_identity(h in harmonics()) {
        let p = PeriodicProfile::fourier(h).unwrap();
        let (lhs, rhs) = identity_check(&p);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn smooth_effective_potential_is_sign_flip_invariant(
        amp in 0.1..5.0f64, sigma in 0.3..3.0f64, k in 50.0..500.0f64, x in -5.0..5.0f64,
    ) {
        let env = Envelope::gaussian(amp, sigma).unwrap();
        let a = ModulatedPotential::new(k, PeriodicProfile::cos(), env.clone(), Background::Zero).unwrap();
        let b = ModulatedPotential::new(k, PeriodicProfile::cos(), env.negated(), Background::Zero).unwrap();
        prop_assert!((a.effective_potential().smooth(x) - b.effective_potential().smooth(x)).abs() < 1e-12);
    }

    #[test]
    fn phase_reduction_in_range(s in -1e4..1e4f64) {
        let r = reduce_phase(s);
        prop_assert!((0.0..std::f64::consts::TAU).contains(&r));
    }

    #[test]
    fn phase_locked_k_satisfies_constraint(target in 20.0..800.0f64, x in 0.2..3.0f64, phase in 0.0..6.0f64) {
        let k = find_phase_locked_k(target, &[PhaseConstraint { position: x, phase }]).unwrap();
        let step = std::f64::consts::TAU / x;
        prop_assert!((k - target).abs() <= step / 2.0 + 1e-9);
        let d = (phase_at(k, x) - phase).abs();
        prop_assert!(d < 1e-9 || (std::f64::consts::TAU - d) < 1e-9);
    }

    #[test]
    fn pt_levels_are_ordered(a in 0.5..40.0f64) {
        let e = pt_energies(a);
        prop_assert_eq!(e.len(), pt_lambda(a).floor() as usize + 1);
        prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn finite_well_level_count(depth in 1.0..400.0f64, half_width in 0.3..2.0f64) {
        let levels = finite_well_levels(depth, half_width).unwrap();
        let expected = (depth.sqrt() * 2.0 * half_width / std::f64::consts::PI).ceil() as usize;
        prop_assert_eq!(levels.len(), expected);
        prop_assert!(levels.iter().all(|&e| e > -depth && e < 0.0));
    }

    #[test]
    fn beams_round_trip(kappa in 50.0..400.0f64, alpha in 0.2..1.2f64, b in 1.0..4.0f64,
                        amplitude in -5.0..5.0f64, x in -6.0..6.0f64, cancel in any::<bool>()) {
        prop_assume!(amplitude.abs() > 1e-3);
        let setup = BeamSetup { kappa, alpha, b, amplitude, cancel_background: cancel };
        prop_assume!(setup.scale_separation() >= 10.0);
        let bp = to_modulated_form(&setup).unwrap();
        let target = if cancel {
            intensity_on_axis(&setup, x) - fastosc::beams::background(&setup, x)
        } else {
            intensity_on_axis(&setup, x)
        };
        prop_assert!((bp.potential.evaluate(x) - target).abs() < 1e-12 * (1.0 + amplitude.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eigenstates_orthonormal(depth in 5.0..80.0f64, width in 0.5..2.0f64, k in 30.0..120.0f64) {
        let env = Envelope::gaussian(depth.sqrt(), width).unwrap();
        let mp = ModulatedPotential::new(k, PeriodicProfile::sin(), env, Background::Zero).unwrap();
        let grid = Grid::resolving(-6.0, 6.0, k, 16.0).unwrap();
        let s = lowest_eigenpairs(&assemble(&grid, |x| mp.evaluate(x), &[]).unwrap(), 3).unwrap();
        let dx = grid.dx();
        for i in 0..3 {
            prop_assert!((l2_norm(s.state(i), dx) - 1.0).abs() < 1e-10);
            for j in 0..i {
                prop_assert!(inner(s.state(i), s.state(j), dx).abs() < 1e-8);
            }
        }
        prop_assert!(s.energies().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn delta_well_limit(c in 1.0..6.0f64) {
        let grid = Grid::new(-12.0, 12.0, 24000 - 1).unwrap();
        let h = assemble(&grid, |_| 0.0, &[DeltaTerm { position: 0.0, strength: -c }]).unwrap();
        let e0 = lowest_eigenpairs(&h, 1).unwrap().energies()[0];
        prop_assert!((e0 + c * c / 4.0).abs() < 2e-3 * c * c);
    }
}
