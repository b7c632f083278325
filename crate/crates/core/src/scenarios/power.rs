//! `(C^n, σ^ℓ)` with `SU(2)` acting on consecutive pairs of complex
//! coordinates through `ρ(e_k) = -iσ_k/2`.
//!
//! Real coordinates are `(x_j, y_j)` at positions `(2j, 2j+1)`. For a
//! generator with real matrix `B = -ρ(ξ)` the field is `Bx` and
//! `ν_ξ = ½ xᵀ BᵀΩ x`, so that `ι_{ξ̲}σ = dν_ξ` and `μ_ξ = ℓ ν_ξ σ^{ℓ-1}`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use super::{form, k, v, Scenario, ScenarioParams, BUILD_TOL};
use crate::actions::{GroupActionSpec, GroupMap, LieAlgebraSpec, SplitFlavor, SplitMoment};
use crate::charts::{Chart, ChartMap, Coordinate, FormField, MultiVectorField};
use crate::error::{invalid, Result};
use crate::expr::ScalarExpr;
use crate::hamiltonian::PlecticManifold;

type C2 = Matrix2<Complex64>;

fn pauli(k: usize) -> C2 {
    let (o, z, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
    match k {
        0 => C2::new(z, o, o, z),
        1 => C2::new(z, -i, i, z),
        _ => C2::new(o, z, z, -o),
    }
}

/// `ρ(e_k) = -iσ_k/2`.
fn rho(k: usize) -> C2 {
    pauli(k) * Complex64::new(0.0, -0.5)
}

/// Real form of a complex matrix acting diagonally on `pairs` copies of C².
fn realify(m: &C2, pairs: usize) -> DMatrix<f64> {
    let n = 4 * pairs;
    let mut out = DMatrix::zeros(n, n);
    for b in 0..pairs {
        for r in 0..2 {
            for c in 0..2 {
                let z = m[(r, c)];
                let (ro, co) = (4 * b + 2 * r, 4 * b + 2 * c);
                out[(ro, co)] = z.re;
                out[(ro, co + 1)] = -z.im;
                out[(ro + 1, co)] = z.im;
                out[(ro + 1, co + 1)] = z.re;
            }
        }
    }
    out
}

fn linear_field(b: &DMatrix<f64>) -> Vec<ScalarExpr> {
    (0..b.nrows())
        .map(|r| ScalarExpr::sum((0..b.ncols()).filter(|&c| b[(r, c)] != 0.0).map(|c| &k(b[(r, c)]) * &v(c))))
        .collect()
}

fn exp_generator(k: usize, t: f64) -> C2 {
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    C2::identity() * Complex64::new(c, 0.0) - pauli(k) * Complex64::new(0.0, s)
}

/// `Ad_{g^{-1}}` as columns of images of the basis.
fn ad_inverse(g: &C2) -> Vec<Vec<f64>> {
    let ginv = g.adjoint();
    let mut out = vec![vec![0.0; 3]; 3];
    for j in 0..3 {
        let y = ginv * rho(j) * g;
        for (i, row) in out.iter_mut().enumerate() {
            row[j] = ((pauli(i) * y).trace() * Complex64::new(0.0, 1.0)).re;
        }
    }
    out
}

pub(super) fn build(p: &ScenarioParams) -> Result<Scenario> {
    p.only("power_sigma_ell", &["planes", "ell"])?;
    let planes = p.planes.unwrap_or(2);
    let ell = p.ell.unwrap_or(2);
    if planes < 2 || planes % 2 != 0 {
        return invalid("planes must be an even number >= 2 (SU(2) acts on pairs of complex coordinates)");
    }
    if ell == 0 || ell > planes {
        return invalid(format!("ell must lie in 1..={planes}"));
    }
    let n = 2 * planes;
    let pairs = planes / 2;
    let coords = (0..planes)
        .flat_map(|j| {
            [Coordinate::linear(&format!("x{}", j + 1), -1.5, 1.5), Coordinate::linear(&format!("y{}", j + 1), -1.5, 1.5)]
        })
        .collect();
    let chart = Chart::new("plane", coords);

    let terms: Vec<(Vec<usize>, ScalarExpr)> = (0..planes).map(|j| (vec![2 * j, 2 * j + 1], k(1.0))).collect();
    let refs: Vec<(&[usize], ScalarExpr)> = terms.iter().map(|(i, e)| (i.as_slice(), e.clone())).collect();
    let sigma = form(n, 2, &refs)?;
    let mut power = FormField::function(n, k(1.0));
    for _ in 0..ell - 1 {
        power = power.wedge(&sigma)?;
    }
    let omega = power.wedge(&sigma)?;
    let manifold = PlecticManifold::new(chart.clone(), omega, BUILD_TOL)?;

    let mut omega_m = DMatrix::zeros(n, n);
    for j in 0..planes {
        omega_m[(2 * j, 2 * j + 1)] = 1.0;
        omega_m[(2 * j + 1, 2 * j)] = -1.0;
    }
    let mut fields = Vec::new();
    let mut nus = Vec::new();
    for g in 0..3 {
        let b = -realify(&rho(g), pairs);
        fields.push(MultiVectorField::vector(linear_field(&b)));
        let s = b.transpose() * &omega_m;
        let mut quad = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let w = 0.5 * (s[(r, c)] + s[(c, r)]) * 0.5;
                if w != 0.0 {
                    quad.push(&(&k(w) * &v(r)) * &v(c));
                }
            }
        }
        nus.push(ScalarExpr::sum(quad));
    }
    let mut action = GroupActionSpec::new(LieAlgebraSpec::su2(), fields)?;
    for (g, t) in [(0, 0.7), (1, -1.1), (2, 2.3)] {
        let m = exp_generator(g, t);
        let r = realify(&m, pairs);
        action.group_maps.push(GroupMap {
            label: format!("exp({t} e{})", g + 1),
            map: ChartMap::new(chart.clone(), chart.clone(), linear_field(&r))?,
            ad_inverse: ad_inverse(&m),
        });
    }
    let split = SplitMoment {
        nu: nus,
        eta: power.scale_const(ell as f64),
        flavor: if ell == 1 { SplitFlavor::Basic } else { SplitFlavor::Invariant },
    };

    let mut s = Scenario::bare("power_sigma_ell", p, manifold);
    s.action = Some(action);
    s.moment = Some(split.moment());
    s.split = Some(split);
    s.sigma = Some(sigma);
    s.level = Some(vec![0.3, 0.0, 0.0]);
    s.hamiltonian_degree = if ell == planes || ell == 1 { Some(2 * ell - 2) } else { None };
    Ok(s)
}
