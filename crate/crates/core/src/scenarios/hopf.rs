//! `C² × S¹` with `ω = σ∧dφ` and the diagonal circle action.
//!
//! The level set `|z|²/2 = λ` is parametrized by `(χ, ψ1, ψ2, φ)` with
//! `z1 = R cos χ e^{iψ1}`, `z2 = R sin χ e^{iψ2}`, `R = sqrt(2λ)`; the
//! quotient records `β = ψ2 - ψ1`, so `B` is `S² × S¹` in the coordinates
//! `(χ, β, φ)`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{
    form, k, periodic, sq, v, DynamicsCase, ReductionSetup, Scenario, ScenarioParams, VariationSetup, BUILD_TOL,
};
use crate::actions::{GroupActionSpec, GroupMap, LieAlgebraSpec, SplitFlavor, SplitMoment};
use crate::charts::{Chart, ChartMap, Coordinate, FormField, MultiVectorField};
use crate::error::{invalid, Result};
use crate::expr::ScalarExpr;
use crate::hamiltonian::PlecticManifold;
use crate::reduction::{ConnectionData, Cycle, DynamicsMode, ReductionPresentation};

const BOX: f64 = 3.0;

fn ambient_chart() -> Chart {
    let mut coords: Vec<Coordinate> =
        ["x1", "y1", "x2", "y2"].iter().map(|n| Coordinate::linear(n, -BOX, BOX)).collect();
    coords.push(periodic("phi"));
    Chart::new("c2_circle", coords)
}

fn sigma() -> Result<FormField> {
    form(5, 2, &[(&[0, 1], k(1.0)), (&[2, 3], k(1.0))])
}

fn norm2() -> ScalarExpr {
    ScalarExpr::sum((0..4).map(|i| sq(&v(i))))
}

fn split() -> SplitMoment {
    SplitMoment { nu: vec![&norm2() * &k(0.5)], eta: FormField::dx(5, 4), flavor: SplitFlavor::Basic }
}

fn action(chart: &Chart) -> Result<GroupActionSpec> {
    let field = MultiVectorField::vector(vec![v(1), -v(0), v(3), -v(2), k(0.0)]);
    let mut a = GroupActionSpec::new(LieAlgebraSpec::abelian(1), vec![field])?;
    for t in [0.7f64, -1.9] {
        let (c, s) = (k(t.cos()), k(t.sin()));
        let rot = |x: usize, y: usize| (&(&v(x) * &c) - &(&v(y) * &s), &(&v(x) * &s) + &(&v(y) * &c));
        let (a1, b1) = rot(0, 1);
        let (a2, b2) = rot(2, 3);
        a.group_maps.push(GroupMap {
            label: format!("rotate({t})"),
            map: ChartMap::new(chart.clone(), chart.clone(), vec![a1, b1, a2, b2, v(4)])?,
            ad_inverse: vec![vec![1.0]],
        });
    }
    Ok(a)
}

fn base_chart() -> Chart {
    Chart::new(
        "base",
        vec![Coordinate::linear("chi", 0.0, PI / 2.0).covered(), periodic("beta"), periodic("phi")],
    )
}

/// The presentation at level `λ`; `corrupt` adds `ε x1 dx2` to `φ`.
pub(super) fn presentation(lambda: f64, corrupt: f64) -> Result<ReductionPresentation> {
    if !(lambda > 0.0 && 2.0 * lambda < BOX * BOX) {
        return invalid(format!("hopf_c2 needs 0 < lambda < {}", BOX * BOX / 2.0));
    }
    let chart = ambient_chart();
    let sig = sigma()?;
    let omega = sig.wedge(&FormField::dx(5, 4))?;
    let ambient = PlecticManifold::new(chart.clone(), omega, BUILD_TOL)?;
    let action = action(&chart)?;
    let moment = split().moment();
    let mut phi = FormField::dx(5, 4).scale_const(lambda);
    if corrupt != 0.0 {
        phi = phi.add(&form(5, 1, &[(&[2], &k(corrupt) * &v(0))])?)?;
    }

    let level = Chart::new(
        "level",
        vec![
            Coordinate::linear("chi", 0.0, PI / 2.0).covered(),
            periodic("psi1"),
            periodic("psi2"),
            periodic("phi"),
        ],
    );
    let r = k((2.0 * lambda).sqrt());
    let (cx, sx) = (v(0).cos(), v(0).sin());
    let embed = ChartMap::new(
        level.clone(),
        chart,
        vec![
            &(&r * &cx) * &v(1).cos(),
            &(&r * &cx) * &v(1).sin(),
            &(&r * &sx) * &v(2).cos(),
            &(&r * &sx) * &v(2).sin(),
            v(3),
        ],
    )?;
    let level_field = MultiVectorField::vector(vec![k(0.0), k(-1.0), k(-1.0), k(0.0)]);
    let base = base_chart();
    let quotient = ChartMap::new(level.clone(), base.clone(), vec![v(0), &v(2) - &v(1), v(3)])?;
    let section = ChartMap::new(base, level, vec![v(0), k(0.0), v(1), v(2)])?;
    Ok(ReductionPresentation {
        ambient,
        action,
        moment,
        phi: vec![phi],
        embed,
        level_fields: vec![level_field],
        quotient,
        section,
    })
}

/// `E / |z|²` with `E` the Euler field of `C²`.
fn euler_over_norm() -> MultiVectorField {
    let n = norm2();
    let mut comps: Vec<ScalarExpr> = (0..4).map(|i| &v(i) / &n).collect();
    comps.push(k(0.0));
    MultiVectorField::vector(comps)
}

pub(super) fn build(p: &ScenarioParams) -> Result<Scenario> {
    p.only("hopf_c2", &["lambda", "corrupt_phi"])?;
    let lambda = p.lambda.unwrap_or(1.0);
    let corrupt = p.corrupt_phi.unwrap_or(0.0);
    let pres = presentation(lambda, corrupt)?;
    let sig = sigma()?;
    let sp = split();

    let base = base_chart();
    let full = Cycle {
        name: "base".into(),
        map: ChartMap::new(base.clone(), base.clone(), vec![v(0), v(1), v(2)])?,
        nodes: vec![24, 8, 4],
    };
    let cp1 = Cycle {
        name: "cp1".into(),
        map: ChartMap::new(
            Chart::new("cp1", vec![Coordinate::linear("chi", 0.0, PI / 2.0).covered(), periodic("beta")]),
            base,
            vec![v(0), v(1), k(0.0)],
        )?,
        nodes: vec![24, 8],
    };
    let sin2 = (&k(2.0) * &v(0)).sin();
    let reduced_ansatz = form(3, 3, &[(&[0, 1, 2], &k(lambda) * &sin2)])?;
    let curvature = form(3, 2, &[(&[0, 1], sin2)])?;

    let h = (lambda / 4.0).min(0.1);
    let lambdas: Vec<f64> = (-2..=2).map(|i| lambda + h * i as f64).collect();
    let variation = VariationSetup {
        family: Arc::new(|l| presentation(l, 0.0)),
        lambdas,
        cycle: full.clone(),
        eta_integral: 2.0 * PI,
        psi: euler_over_norm(),
        step: 1e-3,
    };

    // The rotation of the first factor commutes with the action and preserves |z|².
    let alpha = form(5, 1, &[(&[4], &(&sq(&v(0)) + &sq(&v(1))) * &k(0.5))])?;
    let dynamics = vec![DynamicsCase {
        name: "rotate_first_factor".into(),
        alpha,
        ell: 1,
        field: None,
        modes: vec![DynamicsMode::InvariantTangent, DynamicsMode::Commuting],
    }];

    let reduction = ReductionSetup {
        lambda,
        presentation: pres.clone(),
        sigma: sig.clone(),
        eta: FormField::dx(5, 4),
        reduced_ansatz: Some(reduced_ansatz),
        eta_ansatz: Some(FormField::dx(3, 2)),
        reduced_integral: Some((full, 4.0 * PI * PI * lambda)),
        connection: Some(ConnectionData {
            sigma: sig.clone(),
            eta: FormField::dx(5, 4),
            transverse: vec![euler_over_norm()],
            curvature_ansatz: Some(curvature),
            cycles: vec![cp1],
        }),
        variation: Some(variation),
        dynamics,
        level_zero: None,
    };

    let mut s = Scenario::bare("hopf_c2", p, pres.ambient.clone());
    s.action = Some(pres.action.clone());
    s.moment = Some(sp.moment());
    s.split = Some(sp);
    s.sigma = Some(sig);
    s.level = Some(vec![lambda]);
    s.hamiltonian_degree = None;
    s.reduction = Some(reduction);
    Ok(s)
}
