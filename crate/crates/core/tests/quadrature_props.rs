//! Quadrature rules, stationary phase, Gaussian identities and localization.

use std::f64::consts::PI;

use plectic::actions::{fixed_point_locator, LieAlgebraSpec};
use plectic::quadrature::{
    gauss_hermite, gauss_legendre, gaussian_check, heat_kernel_i, localization_compare, stationary_phase_compare, LocalizationScenario,
    PhaseConvention,
};
use plectic::scenarios::{build, ScenarioParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn s2(circle: bool) -> LocalizationScenario {
    let s = build("s2_x_torus", &ScenarioParams { circle: Some(circle), ..Default::default() }).unwrap();
    let located = fixed_point_locator(&s.fixed.as_ref().unwrap().patches, &LieAlgebraSpec::abelian(1), 40, 1e-9).unwrap();
    s.with_located_fixed(&located).unwrap()
}

fn scaled(l: &LocalizationScenario, num: usize, den: usize) -> LocalizationScenario {
    let mut l = l.clone();
    l.nodes = l.nodes.iter().map(|n| (n * num / den).max(1)).collect();
    for f in &mut l.fixed {
        f.nodes = f.nodes.iter().map(|n| (n * num / den).max(1)).collect();
    }
    l
}

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    for n in [1, 2, 5, 12, 32] {
        let (x, w) = gauss_legendre(n);
        for k in 0..n {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * k as i32)).sum();
            assert!((got - 2.0 / (2 * k + 1) as f64).abs() < 1e-13, "n={n} k={k}");
        }
    }
}

#[test]
fn gauss_hermite_matches_gamma_moments() {
    // ∫ x^{2k} e^{-x²} = Γ(k + 1/2) = (2k-1)!! √π / 2^k
    let (x, w) = gauss_hermite(20);
    let mut want = PI.sqrt();
    for k in 0..10 {
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * k)).sum();
        assert!((got - want).abs() / want < 1e-12, "k={k}: {got} vs {want}");
        want *= (2 * k + 1) as f64 / 2.0;
    }
}

#[test]
fn stationary_phase_matches_the_closed_forms() {
    for (circle, scale) in [(false, 1.0), (true, 2.0 * PI)] {
        let rep = stationary_phase_compare(&s2(circle), &[0.5, 1.0, 2.0], PhaseConvention::Liouville).unwrap();
        assert!(rep.max_gap < 1e-8);
        for p in &rep.points {
            let want = scale * 4.0 * PI * p.t.sin() / p.t;
            assert!((p.lhs[0] - want).abs() / want.abs() < 1e-8 && p.lhs[1].abs() < 1e-8, "{p:?}");
        }
    }
}

#[test]
fn doubling_nodes_leaves_the_integrals_unchanged() {
    for circle in [false, true] {
        let l = s2(circle);
        let t = [0.5, 1.0, 2.0];
        let base = stationary_phase_compare(&l, &t, PhaseConvention::Liouville).unwrap();
        let fine = stationary_phase_compare(&scaled(&l, 2, 1), &t, PhaseConvention::Liouville).unwrap();
        for (a, b) in base.points.iter().zip(&fine.points) {
            assert!((a.lhs[0] - b.lhs[0]).abs() < 1e-9 && (a.lhs[1] - b.lhs[1]).abs() < 1e-9);
            assert!((a.rhs[0] - b.rhs[0]).abs() < 1e-9);
        }
    }
    let s = build("product_spheres_torus", &ScenarioParams::default()).unwrap();
    let l = s.with_reduced(&mut ChaCha8Rng::seed_from_u64(1), 1e-8).unwrap();
    let coarse = heat_kernel_i(&l, 0.05).unwrap();
    let fine = heat_kernel_i(&scaled(&l, 2, 1), 0.05).unwrap();
    assert!((coarse - fine).abs() < 1e-9, "{coarse} vs {fine}");
}

#[test]
fn stationary_phase_gap_shrinks_with_resolution() {
    let l = s2(false);
    let t = [2.0];
    let gaps: Vec<f64> = [(1, 8), (1, 4), (1, 2), (1, 1)]
        .iter()
        .map(|&(a, b)| stationary_phase_compare(&scaled(&l, a, b), &t, PhaseConvention::Liouville).unwrap().max_gap)
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] <= w[0].max(1e-13), "{gaps:?}");
    }
    assert!(gaps[3] < 1e-8);
}

#[test]
fn localization_plateau_and_decay() {
    let s = build("product_spheres_torus", &ScenarioParams::default()).unwrap();
    let l = s.with_reduced(&mut ChaCha8Rng::seed_from_u64(9), 1e-8).unwrap();
    let rep = localization_compare(&l, &[0.02, 0.03, 0.04, 0.05, 0.06], 0.05, 0.1, 60).unwrap();
    let plateau = 8.0 * PI * PI;
    assert_eq!(rep.points[0].t, 0.02);
    assert!((rep.points[0].i_t - plateau).abs() / plateau < 1e-3, "{rep:?}");
    assert!(rep.slope_ok && rep.slope <= -0.25 * 0.95, "{rep:?}");
    assert!(rep.lemma_gap < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gaussian_identities_hold(ell in 1usize..=3, t in 0.2f64..4.0, y in prop::collection::vec(-1.5f64..1.5, 3)) {
        let r = gaussian_check(ell, t, &y[..ell]).unwrap();
        prop_assert!(r.max_gap() < 1e-7, "{:?}", r);
    }
}
