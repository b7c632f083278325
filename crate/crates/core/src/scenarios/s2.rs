//! `S² × S¹` (or plain `S²`) with the rotation about the z axis.
//!
//! The main chart uses `(θ, z, φ)`; the polar caps use
//! `u + iv = sqrt(2(1 ∓ z)) e^{iθ}` so that `du∧dv = ±dθ∧dz`.

use std::f64::consts::PI;

use super::{form, k, periodic, sq, v, AtlasLink, FixedSetup, LeafSetup, Scenario, ScenarioParams, BUILD_TOL};
use crate::actions::{FixedPatch, GroupActionSpec, GroupMap, LieAlgebraSpec, SplitFlavor, SplitMoment};
use crate::charts::{Chart, ChartMap, Coordinate, FormField, MultiVectorField};
use crate::error::Result;
use crate::hamiltonian::{CriticalPatch, PlecticManifold};
use crate::quadrature::{FixedData, LocalizationScenario};

pub(super) fn build(p: &ScenarioParams) -> Result<Scenario> {
    p.only("s2_x_torus", &["circle"])?;
    let circle = p.circle.unwrap_or(true);
    let n = if circle { 3 } else { 2 };

    let mut coords = vec![periodic("theta"), Coordinate::linear("z", -1.0, 1.0).covered()];
    if circle {
        coords.push(periodic("phi"));
    }
    let main = Chart::new("main", coords);
    let top: Vec<usize> = (0..n).collect();
    let omega = form(n, n, &[(&top, k(1.0))])?;
    let sigma = form(n, 2, &[(&[0, 1], k(1.0))])?;
    let eta = if circle { FormField::dx(3, 2) } else { FormField::function(2, k(1.0)) };
    let manifold = PlecticManifold::new(main.clone(), omega.clone(), BUILD_TOL)?;

    let field = MultiVectorField::partial(n, 0);
    let mut action = GroupActionSpec::new(LieAlgebraSpec::abelian(1), vec![field.clone()])?;
    for a in [0.9, -2.2] {
        let mut comps = vec![&v(0) + &k(a), v(1)];
        if circle {
            comps.push(v(2));
        }
        action.group_maps.push(GroupMap {
            label: format!("rotate({a})"),
            map: ChartMap::new(main.clone(), main.clone(), comps)?,
            ad_inverse: vec![vec![1.0]],
        });
    }
    let split = SplitMoment { nu: vec![v(1)], eta: eta.clone(), flavor: SplitFlavor::Basic };

    let mut atlas = Vec::new();
    let mut critical = vec![CriticalPatch { manifold: manifold.clone(), f: v(1), eta: eta.clone() }];
    let mut patches = vec![FixedPatch { chart: main.clone(), fields: vec![field.clone()], nu: vec![v(1)], sigma: sigma.clone() }];
    let mut declared = Vec::new();
    for (name, s) in [("north", 1.0), ("south", -1.0)] {
        let mut cc = vec![Coordinate::linear("u", -1.0, 1.0), Coordinate::linear("v", -1.0, 1.0)];
        if circle {
            cc.push(periodic("phi"));
        }
        let r2 = &sq(&v(0)) + &sq(&v(1));
        let cap = Chart::new(name, cc).with_guard("disk", &k(1.0) - &r2);
        let cap_omega = form(n, n, &[(&top, k(s))])?;
        let cap_sigma = form(n, 2, &[(&[0, 1], k(s))])?;
        let cap_eta = if circle { FormField::dx(3, 2) } else { FormField::function(2, k(1.0)) };
        let cap_nu = &k(s) * &(&k(1.0) - &(&r2 * &k(0.5)));
        let mut fc = vec![-v(1), v(0)];
        if circle {
            fc.push(k(0.0));
        }
        let cap_field = MultiVectorField::vector(fc);

        let radius = (&k(2.0) * &(&k(1.0) - &(&k(s) * &v(1)))).sqrt();
        let mut comps = vec![&radius * &v(0).cos(), &radius * &v(0).sin()];
        if circle {
            comps.push(v(2));
        }
        let map = ChartMap::new(main.clone(), cap.clone(), comps)?;
        atlas.push(AtlasLink {
            map,
            forms: vec![
                (cap_omega.clone(), omega.clone()),
                (cap_sigma.clone(), sigma.clone()),
                (FormField::function(n, cap_nu.clone()), FormField::function(n, v(1))),
            ],
            fields: vec![(field.clone(), cap_field.clone())],
        });

        let cap_manifold = PlecticManifold::new(cap.clone(), cap_omega, BUILD_TOL)?;
        critical.push(CriticalPatch { manifold: cap_manifold, f: cap_nu.clone(), eta: cap_eta.clone() });
        patches.push(FixedPatch { chart: cap.clone(), fields: vec![cap_field], nu: vec![cap_nu], sigma: cap_sigma.clone() });

        let (fixed_chart, comps) = if circle {
            (Chart::new(&format!("{name}_circle"), vec![periodic("phi")]), vec![k(0.0), k(0.0), v(0)])
        } else {
            (Chart::new(&format!("{name}_pole"), vec![]), vec![k(0.0), k(0.0)])
        };
        declared.push(FixedData {
            map: ChartMap::new(fixed_chart, cap, comps)?,
            sigma: cap_sigma,
            eta: cap_eta,
            nu: Vec::new(),
            weights: Vec::new(),
            nodes: if circle { vec![8] } else { vec![] },
        });
    }

    let leaf = if circle {
        let lc = Chart::new("leaf", vec![periodic("theta"), Coordinate::linear("z", -1.0, 1.0).covered()]);
        Some(LeafSetup {
            sigma: sigma.clone(),
            eta: eta.clone(),
            leaf: ChartMap::new(lc, main.clone(), vec![v(0), v(1), k(0.3)])?,
            f: v(1),
        })
    } else {
        None
    };

    let localization = LocalizationScenario {
        name: "s2_x_torus".into(),
        chart: main.clone(),
        nodes: if circle { vec![4, 32, 4] } else { vec![4, 32] },
        sigma: sigma.clone(),
        eta: eta.clone(),
        nu: vec![v(1)],
        algebra: LieAlgebraSpec::abelian(1),
        fixed: Vec::new(),
        group_volume: 2.0 * PI,
        delta: 2.0,
        reduced: None,
    };

    let mut s = Scenario::bare("s2_x_torus", p, manifold);
    s.atlas = atlas;
    s.moment = Some(split.moment());
    s.split = Some(split);
    s.action = Some(action);
    s.sigma = Some(sigma);
    s.level = Some(vec![0.25]);
    s.hamiltonian_degree = Some(n - 2);
    s.leaf = leaf;
    s.critical = critical;
    s.fixed = Some(FixedSetup { patches, declared });
    s.localization = Some(localization);
    Ok(s)
}
