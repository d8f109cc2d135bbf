use num_complex::Complex64;
use proptest::prelude::*;

use curved_duality::duality::{bohlin_canonicity_residual, bohlin_inverse, bohlin_map, coulomb_surface_residual, bohlin_params};
use curved_duality::dynamics::{conserved_drift, integrate, HamiltonianSystem, IntegratorConfig};
use curved_duality::geometry::{ambient_to_stereo, check_operative, stereo_to_ambient, CurvatureSign, StereoPoint};
use curved_duality::schrodinger::Tridiagonal;
use curved_duality::spectra::{
    alpha_tilde, coulomb_level_unchecked, coulomb_nsigma_max, oscillator_bound_nmax, oscillator_level, oscillator_nmax,
    spectral_duality_check, HalfInteger, NMax,
};
use curved_duality::systems::observable::catalog;
use curved_duality::systems::{complex_bracket, CurvedModel, PhasePoint, SymplecticForm, VortexCharge};

fn eps_strategy() -> impl Strategy<Value = CurvatureSign> {
    prop_oneof![Just(CurvatureSign::Sphere), Just(CurvatureSign::Pseudosphere)]
}

/// A point with `0.05 < |z| < 0.9`, inside both charts and their Bohlin images.
fn disk_point() -> impl Strategy<Value = PhasePoint> {
    (0.05f64..0.9, 0.0f64..std::f64::consts::TAU, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(r, t, a, b)| PhasePoint::new(Complex64::from_polar(r, t), Complex64::new(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn stereographic_round_trip(pt in disk_point(), radius in 0.2f64..5.0, eps in eps_strategy()) {
        let x = stereo_to_ambient(StereoPoint(pt.z), radius, eps).unwrap();
        prop_assert!(x.constraint_violation(radius, eps) < 1e-10);
        let back = ambient_to_stereo(x, radius, eps).unwrap();
        prop_assert!((back.0 - pt.z).norm() < 1e-12);
    }

    #[test]
    fn bohlin_is_canonical_and_invertible(pt in disk_point()) {
        prop_assert!(bohlin_canonicity_residual(&pt).unwrap() < 1e-11);
        let image = bohlin_map(&pt).unwrap();
        let back: Vec<PhasePoint> = (0..2).map(|b| bohlin_inverse(&image, b).unwrap()).collect();
        let hit = back.iter().any(|q| (q.z - pt.z).norm() + (q.pi - pt.pi).norm() < 1e-12);
        prop_assert!(hit);
        check_operative(image.z, CurvatureSign::Pseudosphere).unwrap();
    }

    #[test]
    fn energy_surfaces_correspond(pt in disk_point(), alpha in 0.1f64..3.0, radius in 0.4f64..3.0, eps in eps_strategy()) {
        let model = CurvedModel::oscillator(eps, radius, alpha).unwrap();
        let energy = model.energy_value(&pt).unwrap();
        let params = bohlin_params(energy, &model).unwrap();
        prop_assert!(coulomb_surface_residual(&pt, &params).unwrap() < 1e-9 * energy.abs().max(1.0));
    }

    #[test]
    fn bracket_is_antisymmetric(pt in disk_point(), eps in eps_strategy(), radius in 0.5f64..2.0) {
        let form = SymplecticForm::canonical();
        let jb = catalog::jbold(eps, radius, 0.0, 0.0);
        let x3 = catalog::x3(radius, eps);
        let fg = complex_bracket(&jb, &x3, &pt, &form).unwrap();
        let gf = complex_bracket(&x3, &jb, &pt, &form).unwrap();
        prop_assert!((fg + gf).norm() < 1e-12 * fg.norm().max(1.0));
    }

    #[test]
    fn oscillator_levels_sit_below_the_edge(alpha in 0.05f64..4.0, radius in 0.3f64..4.0, n in 0u64..40) {
        // edge - E = (alpha~ R0 - (N+1)/R0)^2 / 2 for every N
        let at = alpha_tilde(alpha, radius).unwrap();
        let edge = at * at * radius * radius / 2.0;
        let k = (n + 1) as f64;
        let level = at * k - k * k / (2.0 * radius * radius);
        prop_assert!(level <= edge + 1e-12 * edge);
        prop_assert!((edge - level - (at * radius - k / radius).powi(2) / 2.0).abs() < 1e-9 * edge.max(1.0));
        let bound = oscillator_bound_nmax(alpha, radius, CurvatureSign::Pseudosphere).unwrap();
        prop_assert_eq!(bound.admits(n), k < at * radius * radius);
    }

    #[test]
    fn printed_cutoff_contains_the_bound_one(alpha in 0.05f64..4.0, radius in 0.3f64..4.0) {
        let printed = oscillator_nmax(alpha, radius, CurvatureSign::Pseudosphere).unwrap();
        let bound = oscillator_bound_nmax(alpha, radius, CurvatureSign::Pseudosphere).unwrap();
        for n in 0..60 {
            prop_assert!(!bound.admits(n) || printed.admits(n));
        }
        prop_assert_eq!(oscillator_nmax(alpha, radius, CurvatureSign::Sphere).unwrap(), NMax::Unbounded);
    }

    #[test]
    fn dictionary_maps_levels(alpha in 0.1f64..4.0, radius in 0.4f64..4.0, eps in eps_strategy(), n in 0u64..25) {
        prop_assume!(oscillator_nmax(alpha, radius, eps).unwrap().admits(n));
        let c = spectral_duality_check(alpha, radius, eps, n).unwrap();
        prop_assert!(c.residual < 1e-10 * c.energy.abs().max(1.0));
        prop_assert_eq!(c.sigma, VortexCharge::from_parity(n));
        prop_assert!((oscillator_level(alpha, radius, eps, n).unwrap() - c.energy).abs() == 0.0);
    }

    #[test]
    fn coulomb_levels_below_edge_and_rising_to_the_cutoff(gamma in 0.05f64..40.0, r0 in 0.2f64..5.0, half in any::<bool>()) {
        let sigma = if half { VortexCharge::Half } else { VortexCharge::Zero };
        let edge = -gamma / r0 + 1.0 / (8.0 * r0 * r0);
        let max = coulomb_nsigma_max(gamma, r0, sigma).unwrap();
        let mut previous = f64::NEG_INFINITY;
        for k in 0..30 {
            let n = HalfInteger::from_doubled(sigma.doubled()).step(k);
            let e = coulomb_level_unchecked(gamma, r0, n.value());
            prop_assert!(e <= edge + 1e-12 * edge.abs().max(1.0));
            if max.is_some_and(|m| n <= m) {
                // k = N_sigma + 1/2 stays at or below sqrt(r0 gamma), so levels still rise
                prop_assert!(e > previous - 1e-12 * e.abs().max(1.0));
                previous = e;
            }
        }
    }

    #[test]
    fn half_integer_text_round_trip(doubled in -1000i64..1000) {
        let h = HalfInteger::from_doubled(doubled);
        prop_assert_eq!(h.to_string().parse::<HalfInteger>().unwrap(), h);
        prop_assert_eq!(serde_json::from_str::<HalfInteger>(&serde_json::to_string(&h).unwrap()).unwrap(), h);
    }

    #[test]
    fn sturm_count_matches_trace(diag in prop::collection::vec(-5.0f64..5.0, 2..12), seed in 0u64..1000) {
        let n = diag.len();
        let off: Vec<f64> = (0..n - 1).map(|i| ((seed + i as u64) as f64 * 0.37).sin()).collect();
        let trace: f64 = diag.iter().sum();
        let t = Tridiagonal::new(diag, off).unwrap();
        let ev = t.lowest(n).unwrap();
        prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-9 * (n as f64));
        let (lo, hi) = t.gershgorin();
        prop_assert_eq!(t.count_below(lo - 1e-9), 0);
        prop_assert_eq!(t.count_below(hi + 1e-9), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn short_runs_conserve_everything(pt in disk_point(), alpha in 0.3f64..2.0, radius in 0.6f64..2.0, eps in eps_strategy()) {
        let model = CurvedModel::oscillator(eps, radius, alpha).unwrap();
        let cfg = IntegratorConfig { dt: 1e-3, t_end: 2.0, ..Default::default() };
        let traj = integrate(&model, pt, &cfg).unwrap();
        prop_assert_eq!(traj.len(), 2001);
        for log in model.invariants().iter().map(|i| i.name).chain(["H"]) {
            prop_assert!(conserved_drift(&traj, log).unwrap() < 1e-8, "{log}");
        }
    }
}
