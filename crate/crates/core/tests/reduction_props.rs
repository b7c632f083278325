//! Reduction, connection and variation on the Hopf and product presentations.

use std::f64::consts::PI;

use plectic::reduction::{
    check_basic, connection_and_curvature, descend, integrate_descended, lemma_variation_identity, reduced_form,
};
use plectic::scenarios::{build, ScenarioParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hopf(lambda: f64) -> plectic::scenarios::Scenario {
    build("hopf_c2", &ScenarioParams { lambda: Some(lambda), ..Default::default() }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hopf_reduction_holds_at_every_positive_level(lambda in 0.3f64..2.0, seed in any::<u64>()) {
        let s = hopf(lambda);
        let r = s.reduction.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(check_basic(&r.presentation, 1e-8).unwrap().passed);
        let red = reduced_form(&r.presentation, r.reduced_ansatz.as_ref(), &mut rng, 1e-8).unwrap();
        // two independent lifts agree and the result is closed
        prop_assert!(red.descent.descent_residual < 1e-8);
        prop_assert!(red.descent.closed_residual.unwrap() < 1e-8);
        let (cycle, _) = r.reduced_integral.as_ref().unwrap();
        let got = integrate_descended(&r.presentation, &r.presentation.pulled_omega().unwrap(), cycle).unwrap();
        // volume of the base: λ·(2π)² from the fibration S³ → S² with |S²| = 4π
        let want = 4.0 * PI * PI * lambda;
        prop_assert!((got - want).abs() / want < 1e-3, "{} vs {}", got, want);
    }

    #[test]
    fn connection_is_normalized_and_lemma_holds(lambda in 0.5f64..1.5) {
        let s = hopf(lambda);
        let r = s.reduction.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (_, c) = connection_and_curvature(&r.presentation, r.connection.as_ref().unwrap(), &mut rng, 1e-8).unwrap();
        prop_assert!(c.normalization_defect < 1e-8);
        prop_assert!((c.chern_pairings[0].value.abs() - 1.0).abs() < 1e-6);
        let v = r.variation.as_ref().unwrap();
        prop_assert!(lemma_variation_identity(&*v.family, lambda, 1e-3, &v.psi).unwrap() < 1e-6);
    }
}

#[test]
fn product_descends_the_form_and_eta() {
    let s = build("product_spheres_torus", &ScenarioParams::default()).unwrap();
    let r = s.reduction.as_ref().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert!(check_basic(&r.presentation, 1e-8).unwrap().passed);
    let eta_n = r.eta.pullback(&r.presentation.embed).unwrap();
    let d = descend(&r.presentation, &eta_n, r.eta_ansatz.as_ref(), &mut rng).unwrap();
    assert!(d.descent_residual < 1e-8, "{d:?}");
    let red = reduced_form(&r.presentation, r.reduced_ansatz.as_ref(), &mut rng, 1e-8).unwrap();
    assert!(red.descent.descent_residual < 1e-8 && red.descent.closed_residual.unwrap() < 1e-8);
}

#[test]
fn corrupted_phi_names_the_closedness_hypothesis() {
    let s = build("hopf_c2", &ScenarioParams { corrupt_phi: Some(0.05), ..Default::default() }).unwrap();
    let b = check_basic(&s.reduction.as_ref().unwrap().presentation, 1e-8).unwrap();
    assert!(!b.passed);
    assert_eq!(b.violated.as_deref(), Some("phi_closed"));
}
