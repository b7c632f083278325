//! `SU(2)` in exponential coordinates with `ω = θ¹∧θ²∧θ³`.
//!
//! With `K = [x]×`, `a = (1 - cos r)/r²` and `b = (r - sin r)/r³`:
//! `θ = g⁻¹dg = J_r dx` with `J_r = I - aK + bK²`, and
//! `θ̄ = dg g⁻¹ = J_l dx` with `J_l = I + aK + bK²`. The chart stays away
//! from the origin (where the closed forms are 0/0) and from `r = 2π`.

use std::f64::consts::PI;

use super::{k, v, Scenario, ScenarioParams, Su2Moment, WeylSetup, BUILD_TOL};
use crate::actions::{GroupActionSpec, LieAlgebraSpec, MomentMapForm};
use crate::charts::{Chart, Coordinate, FormField, MultiVectorField};
use crate::error::Result;
use crate::expr::ScalarExpr;
use crate::hamiltonian::PlecticManifold;

pub const R_MIN: f64 = 0.3;
pub const R_MAX: f64 = 0.95 * 2.0 * PI;

type M3 = Vec<Vec<ScalarExpr>>;

fn radius2() -> ScalarExpr {
    ScalarExpr::sum((0..3).map(|i| v(i).powi(2)))
}

fn cross() -> M3 {
    let z = k(0.0);
    vec![vec![z.clone(), -v(2), v(1)], vec![v(2), z.clone(), -v(0)], vec![-v(1), v(0), z]]
}

fn mul(a: &M3, b: &M3) -> M3 {
    (0..3).map(|i| (0..3).map(|j| ScalarExpr::sum((0..3).map(|l| &a[i][l] * &b[l][j]))).collect()).collect()
}

/// `I + p K + q K²`.
fn combo(p: &ScalarExpr, q: &ScalarExpr) -> M3 {
    let kx = cross();
    let k2 = mul(&kx, &kx);
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let id = if i == j { k(1.0) } else { k(0.0) };
                    &(&id + &(p * &kx[i][j])) + &(q * &k2[i][j])
                })
                .collect()
        })
        .collect()
}

struct Frames {
    jr: M3,
    jl: M3,
    jr_inv: M3,
    jl_inv: M3,
}

fn frames() -> Frames {
    let r = radius2().sqrt();
    let r2 = radius2();
    let a = &(&k(1.0) - &r.cos()) / &r2;
    let b = &(&r - &r.sin()) / &(&r2 * &r);
    let half = &r * &k(0.5);
    let c = &(&k(1.0) / &r2) - &(&half.cos() / &(&(&k(2.0) * &r) * &half.sin()));
    Frames {
        jr: combo(&-&a, &b),
        jl: combo(&a, &b),
        jr_inv: combo(&k(0.5), &c),
        jl_inv: combo(&k(-0.5), &c),
    }
}

fn row_form(m: &M3, i: usize) -> FormField {
    FormField { dim: 3, degree: 1, coeffs: m[i].clone() }
}

fn column_field(m: &M3, j: usize, sign: f64) -> MultiVectorField {
    MultiVectorField::vector((0..3).map(|i| &k(sign) * &m[i][j]).collect())
}

#[cfg(test)]
/// `θ¹∧θ²∧θ³` from the right-trivialized frame.
pub fn cartan_from_frame() -> Result<FormField> {
    let f = frames();
    row_form(&f.jr, 0).wedge(&row_form(&f.jr, 1))?.wedge(&row_form(&f.jr, 2))
}

pub(super) fn build(p: &ScenarioParams) -> Result<Scenario> {
    p.only("su2_cartan", &["moment"])?;
    let kind = p.moment.unwrap_or(Su2Moment::Left);
    let coords = ["x1", "x2", "x3"].iter().map(|n| Coordinate::linear(n, -3.5, 3.5)).collect();
    let chart = Chart::new("exp", coords)
        .with_guard("away_from_identity", &radius2() - &k(R_MIN * R_MIN))
        .with_guard("inside_2pi", &k(R_MAX * R_MAX) - &radius2());

    // det J_r = 2(1 - cos r)/r²; the frame wedge is checked against it in tests.
    let r = radius2().sqrt();
    let density = &(&k(2.0) * &(&k(1.0) - &r.cos())) / &radius2();
    let omega = FormField::from_terms(3, 3, &[(&[0, 1, 2], density)])?;
    let manifold = PlecticManifold::new(chart.clone(), omega, BUILD_TOL)?;

    let f = frames();
    let left: Vec<MultiVectorField> = (0..3).map(|j| column_field(&f.jl_inv, j, -1.0)).collect();
    let right: Vec<MultiVectorField> = (0..3).map(|j| column_field(&f.jr_inv, j, 1.0)).collect();
    let theta_bar: Vec<FormField> = (0..3).map(|i| row_form(&f.jl, i)).collect();
    let theta: Vec<FormField> = (0..3).map(|i| row_form(&f.jr, i)).collect();
    let (fields, components): (Vec<MultiVectorField>, Vec<FormField>) = match kind {
        Su2Moment::Left => (left, theta_bar.iter().map(|t| t.scale_const(-1.0)).collect()),
        Su2Moment::Right => (right, theta.iter().map(|t| t.scale_const(-1.0)).collect()),
        Su2Moment::Adjoint => (
            left.iter().zip(&right).map(|(a, b)| a.add(b)).collect::<Result<_>>()?,
            theta_bar.iter().zip(&theta).map(|(a, b)| a.add(b).map(|s| s.scale_const(-1.0))).collect::<Result<_>>()?,
        ),
    };
    let action = GroupActionSpec::new(LieAlgebraSpec::su2(), fields)?;

    // Ad_g e_i = θ̄(J_r⁻¹ e_i); its e3 component vanishes for i = 1, 2 exactly on N(T).
    let ad = mul(&f.jl, &f.jr_inv);
    let defects = vec![ad[2][0].clone(), ad[2][1].clone()];
    let mut members = Vec::new();
    for i in 0..12 {
        let t = 0.4 + 3.0 * i as f64 / 11.0;
        members.push(vec![0.0, 0.0, t]);
        members.push(vec![0.0, 0.0, -t]);
        let s = 2.0 * PI * (i as f64 + 0.25) / 12.0;
        members.push(vec![PI * s.cos(), PI * s.sin(), 0.0]);
    }
    let non_members: Vec<Vec<f64>> = chart
        .quasi_random_points(300, 0.0)
        .into_iter()
        .filter(|x| weyl_distance(x) >= 0.05)
        .collect();

    let mut s = Scenario::bare("su2_cartan", p, manifold);
    s.action = Some(action);
    s.moment = Some(MomentMapForm { components });
    s.weyl = Some(WeylSetup { defects, members, non_members });
    Ok(s)
}

/// Distance from `x` to the normalizer of the torus `exp(R e3)` in the chart.
pub fn weyl_distance(x: &[f64]) -> f64 {
    let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let axis = rho;
    let circle = ((rho - PI).powi(2) + x[2] * x[2]).sqrt();
    axis.min(circle)
}
