//! The multimomentum bundle `Λ^2 T*R^m` with `θ = Σ p_J dx^J` and
//! `ω = -dθ`. Symmetries of `R^m` lift by `L_V θ = 0`, which fixes the
//! momentum components `c_I = -[Σ p_J L_v dx^J]_I`, and then `μ_ξ = ι_{ξ̲}θ`.

use super::{k, v, Scenario, ScenarioParams, BUILD_TOL};
use crate::actions::{GroupActionSpec, GroupMap, LieAlgebraSpec, MomentMapForm};
use crate::charts::{Chart, ChartMap, Coordinate, FormField, MultiVectorField};
use crate::error::{invalid, Result};
use crate::exterior::basis;
use crate::expr::ScalarExpr;
use crate::hamiltonian::PlecticManifold;

pub(super) fn build(p: &ScenarioParams) -> Result<Scenario> {
    p.only("multimomentum_trivial", &["m"])?;
    let m = p.m.unwrap_or(2);
    if !(m == 2 || m == 3) {
        return invalid("multimomentum_trivial supports m = 2 (translations) and m = 3 (rotations)");
    }
    let pairs = basis(m, 2);
    let n = m + pairs.len();
    let mut coords: Vec<Coordinate> = (0..m).map(|i| Coordinate::linear(&format!("x{}", i + 1), -1.5, 1.5)).collect();
    for j in &pairs {
        let e = j.entries();
        coords.push(Coordinate::linear(&format!("p{}{}", e[0] + 1, e[1] + 1), -1.5, 1.5));
    }
    let chart = Chart::new("bundle", coords);
    let dxj: Vec<FormField> = pairs
        .iter()
        .map(|j| FormField::from_terms(n, 2, &[(j.entries(), k(1.0))]))
        .collect::<Result<_>>()?;
    let mut theta = FormField::zero(n, 2);
    for (r, d) in dxj.iter().enumerate() {
        theta = theta.add(&d.scale(&v(m + r)))?;
    }
    let omega = theta.d().scale_const(-1.0);
    let manifold = PlecticManifold::new(chart.clone(), omega, BUILD_TOL)?;

    // Base fields on R^m, padded with zero momentum components.
    let (algebra, base): (LieAlgebraSpec, Vec<Vec<ScalarExpr>>) = if m == 2 {
        (LieAlgebraSpec::abelian(2), vec![vec![k(-1.0), k(0.0)], vec![k(0.0), k(-1.0)]])
    } else {
        // v_k = -e_k × x, so that [v_i, v_j] = ε_ijk v_k.
        let rot = |a: usize| -> Vec<ScalarExpr> {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let mut out = vec![k(0.0); 3];
            out[b] = v(c);
            out[c] = -v(b);
            out
        };
        (LieAlgebraSpec::su2(), (0..3).map(rot).collect())
    };
    let mut fields = Vec::new();
    for b in &base {
        let mut comps = b.clone();
        comps.extend(std::iter::repeat(k(0.0)).take(pairs.len()));
        let vb = MultiVectorField::vector(comps.clone());
        let mut drift = FormField::zero(n, 2);
        for (r, d) in dxj.iter().enumerate() {
            drift = drift.add(&d.lie_derivative(&vb)?.scale(&v(m + r)))?;
        }
        for (r, j) in pairs.iter().enumerate() {
            comps[m + r] = -drift.coeff(j.entries());
        }
        fields.push(MultiVectorField::vector(comps));
    }
    let components = fields.iter().map(|f| theta.interior(f)).collect::<Result<Vec<_>>>()?;
    let mut action = GroupActionSpec::new(algebra, fields)?;
    if m == 2 {
        for a in [[0.4, -0.3], [-0.7, 0.5]] {
            let comps = vec![&v(0) + &k(a[0]), &v(1) + &k(a[1]), v(2)];
            action.group_maps.push(GroupMap {
                label: format!("translate({}, {})", a[0], a[1]),
                map: ChartMap::new(chart.clone(), chart.clone(), comps)?,
                ad_inverse: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            });
        }
    }

    let mut s = Scenario::bare("multimomentum_trivial", p, manifold);
    s.action = Some(action);
    s.moment = Some(MomentMapForm { components });
    Ok(s)
}
