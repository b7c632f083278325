//! Group actions, moment maps and level sets on the shipped scenarios.

use num_complex::Complex64;
use plectic::actions::{action_check, equivariant_closed_check, involutivity_defect, moment_check, split_check, SplitFlavor};
use plectic::charts::FormField;
use plectic::expr::ScalarExpr;
use plectic::scenarios::{build, ScenarioParams, Su2Moment, SCENARIOS};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_action_is_a_multisymplectic_homomorphism() {
    for (name, _, _) in SCENARIOS {
        let s = build(name, &ScenarioParams::default()).unwrap();
        let Some(a) = &s.action else { continue };
        let r = action_check(&s.manifold, a, &s.manifold.samples).unwrap();
        assert!(r.homomorphism < 1e-8 && r.preserves_omega < 1e-8, "{name}: {r:?}");
    }
}

#[test]
fn moment_defects_meet_their_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = [
        ("power_sigma_ell", ScenarioParams::default(), 1e-8),
        ("s2_x_torus", ScenarioParams::default(), 1e-8),
        ("su2_cartan", ScenarioParams { moment: Some(Su2Moment::Left), ..Default::default() }, 1e-6),
        ("su2_cartan", ScenarioParams { moment: Some(Su2Moment::Right), ..Default::default() }, 1e-6),
        ("su2_cartan", ScenarioParams { moment: Some(Su2Moment::Adjoint), ..Default::default() }, 1e-6),
    ];
    for (name, p, tol) in cases {
        let s = build(name, &p).unwrap();
        let r = moment_check(&s.manifold, s.action.as_ref().unwrap(), s.moment.as_ref().unwrap(), &s.manifold.samples, &mut rng)
            .unwrap();
        assert!(r.a < tol && r.b < tol && r.c < tol, "{name}: {r:?}");
    }
}

#[test]
fn split_moments_satisfy_their_flavor() {
    for (name, _, _) in SCENARIOS {
        let s = build(name, &ScenarioParams::default()).unwrap();
        let (Some(a), Some(mu), Some(sp)) = (&s.action, &s.moment, &s.split) else { continue };
        let r = split_check(a, mu, sp, &s.manifold.samples).unwrap();
        assert!(r.passed(sp.flavor, 1e-8), "{name}: {r:?}");
        if sp.flavor == SplitFlavor::Basic {
            let e = equivariant_closed_check(&s.manifold, a, s.sigma.as_ref().unwrap(), sp, Complex64::new(0.3, 1.0), &s.manifold.samples, 1e-8)
                .unwrap();
            assert!(e.exponential_defect < 1e-8 && e.omega_plus_mu_defect < 1e-9, "{name}: {e:?}");
        }
    }
}

#[test]
fn weyl_level_set_is_the_torus_normalizer() {
    let s = build("su2_cartan", &ScenarioParams::default()).unwrap();
    let w = s.weyl.as_ref().unwrap();
    let defect = |x: &[f64]| w.defects.iter().map(|d| d.eval(x).unwrap().abs()).fold(0.0, f64::max);
    assert!(w.members.iter().all(|x| defect(x) < 1e-6));
    assert!(w.non_members.iter().all(|x| defect(x) >= 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kernels_of_closed_one_forms_are_involutive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, _, _) in SCENARIOS {
            let s = build(name, &ScenarioParams::default()).unwrap();
            let Some(sp) = &s.split else { continue };
            if sp.eta.degree != 1 {
                continue;
            }
            let d = involutivity_defect(&sp.eta, &s.manifold.samples, 4, &mut rng).unwrap();
            prop_assert!(d < 1e-7, "{}: {:e}", name, d);
        }
    }
}

#[test]
fn a_contact_form_is_not_involutive() {
    // dz - y dx
    let eta = FormField::new(
        3,
        1,
        vec![-ScalarExpr::var(1), ScalarExpr::zero(), ScalarExpr::one()],
    )
    .unwrap();
    let pts = vec![vec![0.1, 0.2, 0.3], vec![-0.4, 0.5, 0.0]];
    let d = involutivity_defect(&eta, &pts, 8, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert!(d > 1e-3, "{d}");
}
