//! Hamiltonian forms, fields and the bracket on the shipped plectic manifolds.

use plectic::exterior::solve_flat;
use plectic::hamiltonian::{bracket, bracket_laws_report, hamiltonian_field, HamiltonianForm, PlecticManifold};
use plectic::scenarios::{build, random_form, ScenarioParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(R^4, σ²)` and `(S²×S¹, volume)`.
fn manifolds() -> Vec<(&'static str, PlecticManifold)> {
    let r4 = build("power_sigma_ell", &ScenarioParams { ell: Some(2), ..Default::default() }).unwrap();
    let s2 = build("s2_x_torus", &ScenarioParams { circle: Some(true), ..Default::default() }).unwrap();
    vec![("r4_sigma_squared", r4.manifold), ("s2_x_s1_volume", s2.manifold)]
}

fn random_hamiltonian(m: &PlecticManifold, rng: &mut ChaCha8Rng) -> HamiltonianForm {
    let alpha = random_form(&m.chart, m.k - 1, rng).unwrap();
    hamiltonian_field(m, &alpha, 1, 1e-9).unwrap()
}

#[test]
fn bracket_laws_hold_for_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, m) in manifolds() {
        let pts = m.chart.random_points(&mut rng, 100, 0.02);
        for _ in 0..20 {
            let (a, b, c) = (random_hamiltonian(&m, &mut rng), random_hamiltonian(&m, &mut rng), random_hamiltonian(&m, &mut rng));
            let r = bracket_laws_report(&m, &a, &b, &c, &pts).unwrap();
            assert!(r.max() < 1e-8, "{name}: {r:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn the_field_is_the_unique_pointwise_solution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, m) in manifolds() {
            let h = random_hamiltonian(&m, &mut rng);
            let d_alpha = h.alpha.d();
            for x in m.samples.iter().take(25) {
                let direct = solve_flat(&m.omega.eval(x).unwrap(), &d_alpha.eval(x).unwrap(), 1, 1e-10).unwrap();
                let direct = direct.field().expect("Hamiltonian target is in the image");
                let stored = h.field_at(&m, x).unwrap();
                let gap = stored.sub(direct).unwrap().max_abs();
                prop_assert!(gap < 1e-10, "gap {gap:e}");
            }
        }
    }

    #[test]
    fn adding_a_closed_form_keeps_the_field(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, m) in manifolds() {
            let h = random_hamiltonian(&m, &mut rng);
            // exact, hence closed
            let beta = random_form(&m.chart, m.k - 2, &mut rng).unwrap().d();
            let shifted = hamiltonian_field(&m, &h.alpha.add(&beta).unwrap(), 1, 1e-9).unwrap();
            for x in &m.samples {
                let gap = shifted.field_at(&m, x).unwrap().sub(&h.field_at(&m, x).unwrap()).unwrap().max_abs();
                prop_assert!(gap < 1e-10);
            }
        }
    }

    #[test]
    fn bracket_with_a_closed_form_is_closed_with_zero_field(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (_, m) in manifolds() {
            let a = random_hamiltonian(&m, &mut rng);
            let beta = random_form(&m.chart, m.k - 2, &mut rng).unwrap().d();
            let b = hamiltonian_field(&m, &beta, 1, 1e-9).unwrap();
            let ab = bracket(&a, &b).unwrap();
            prop_assert!(ab.d().max_norm(&m.samples).unwrap() < 1e-10);
            let field = hamiltonian_field(&m, &ab, 1, 1e-9).unwrap();
            for x in &m.samples {
                prop_assert!(field.field_at(&m, x).unwrap().max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn jacobi_defect_stays_relative_under_scaling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, m) = manifolds().remove(0);
        let pts = m.chart.random_points(&mut rng, 50, 0.02);
        let forms: Vec<_> = (0..3).map(|_| random_form(&m.chart, m.k - 1, &mut rng).unwrap()).collect();
        for scale in [1.0, 2.0] {
            let h: Vec<HamiltonianForm> = forms
                .iter()
                .map(|f| hamiltonian_field(&m, &f.scale_const(scale), 1, 1e-9).unwrap())
                .collect();
            let r = bracket_laws_report(&m, &h[0], &h[1], &h[2], &pts).unwrap();
            let inner = hamiltonian_field(&m, &bracket(&h[1], &h[2]).unwrap(), 1, 1e-6).unwrap();
            let size = bracket(&h[0], &inner).unwrap().max_norm(&pts).unwrap().max(1.0);
            prop_assert!(r.jacobi / size < 1e-8, "scale {scale}: {r:?}");
        }
    }
}
