//! The flat 3-torus with `ω = dθ1∧dθ2∧dφ` and `η = dφ`.
//!
//! `f = sin θ1` gives `X_{fη} = -cos θ1 ∂θ2`, which vanishes on the
//! critical set `θ1 = ±π/2`.

use super::{form, k, periodic, v, LeafSetup, Scenario, ScenarioParams, BUILD_TOL};
use crate::charts::{Chart, ChartMap, FormField};
use crate::error::Result;
use crate::hamiltonian::{CriticalPatch, PlecticManifold};

pub(super) fn build(p: &ScenarioParams) -> Result<Scenario> {
    p.only("torus_t3", &[])?;
    let chart = Chart::new("torus", vec![periodic("theta1"), periodic("theta2"), periodic("phi")]);
    let omega = form(3, 3, &[(&[0, 1, 2], k(1.0))])?;
    let manifold = PlecticManifold::new(chart, omega, BUILD_TOL)?;
    let eta = FormField::dx(3, 2);
    let sigma = form(3, 2, &[(&[0, 1], k(1.0))])?;
    let leaf_chart = Chart::new("leaf", vec![periodic("theta1"), periodic("theta2")]);
    let leaf = LeafSetup {
        sigma: sigma.clone(),
        eta: eta.clone(),
        leaf: ChartMap::new(leaf_chart, manifold.chart.clone(), vec![v(0), v(1), k(1.1)])?,
        f: v(0).sin(),
    };

    let mut s = Scenario::bare("torus_t3", p, manifold.clone());
    s.critical = vec![CriticalPatch { manifold, f: v(0).sin(), eta }];
    s.sigma = Some(sigma);
    s.hamiltonian_degree = Some(1);
    s.leaf = Some(leaf);
    Ok(s)
}
