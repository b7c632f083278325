//! `S² × S² × S¹` with a circle rotating the first sphere.
//!
//! Only the cylinder chart is used: the heat kernel integrand concentrates
//! on `z1 = 0`, far from the poles, and the chart has full measure.

use std::f64::consts::PI;

use super::{form, k, periodic, v, DynamicsCase, LevelZero, ReductionSetup, Scenario, ScenarioParams, BUILD_TOL};
use crate::actions::{GroupActionSpec, LieAlgebraSpec, SplitFlavor, SplitMoment};
use crate::charts::{Chart, ChartMap, Coordinate, FormField, MultiVectorField};
use crate::error::{invalid, Result};
use crate::hamiltonian::PlecticManifold;
use crate::quadrature::LocalizationScenario;
use crate::reduction::{ConnectionData, Cycle, DynamicsMode, ReductionPresentation};

pub(super) fn build(p: &ScenarioParams) -> Result<Scenario> {
    p.only("product_spheres_torus", &["period"])?;
    let period = p.period.unwrap_or(1.0);
    if !(period > 0.0) {
        return invalid("period must be positive");
    }
    let z = |n: &str| Coordinate::linear(n, -1.0, 1.0).covered();
    let chart = Chart::new(
        "cylinders",
        vec![periodic("theta1"), z("z1"), periodic("theta2"), z("z2"), Coordinate::periodic("phi", 0.0, period)],
    );
    let sigma = form(5, 2, &[(&[0, 1], k(1.0)), (&[2, 3], k(1.0))])?;
    let eta = FormField::dx(5, 4);
    let omega = sigma.wedge(&eta)?;
    let manifold = PlecticManifold::new(chart.clone(), omega, BUILD_TOL)?;
    let action = GroupActionSpec::new(LieAlgebraSpec::abelian(1), vec![MultiVectorField::partial(5, 0)])?;
    let split = SplitMoment { nu: vec![v(1)], eta: eta.clone(), flavor: SplitFlavor::Basic };

    let level = Chart::new(
        "level",
        vec![periodic("theta1"), periodic("theta2"), z("z2"), Coordinate::periodic("phi", 0.0, period)],
    );
    let base = Chart::new("base", vec![periodic("theta2"), z("z2"), Coordinate::periodic("phi", 0.0, period)]);
    let pres = ReductionPresentation {
        ambient: manifold.clone(),
        action: action.clone(),
        moment: split.moment(),
        phi: vec![FormField::zero(5, 1)],
        embed: ChartMap::new(level.clone(), chart.clone(), vec![v(0), k(0.0), v(1), v(2), v(3)])?,
        level_fields: vec![MultiVectorField::partial(4, 0)],
        quotient: ChartMap::new(level.clone(), base.clone(), vec![v(1), v(2), v(3)])?,
        section: ChartMap::new(base.clone(), level, vec![k(0.0), v(0), v(1), v(2)])?,
    };
    let omega0 = form(3, 3, &[(&[0, 1, 2], k(1.0))])?;
    let full = Cycle {
        name: "base".into(),
        map: ChartMap::new(base.clone(), base.clone(), vec![v(0), v(1), v(2)])?,
        nodes: vec![4, 8, 4],
    };
    let sphere = Cycle {
        name: "second_sphere".into(),
        map: ChartMap::new(
            Chart::new("sphere", vec![periodic("theta2"), z("z2")]),
            base,
            vec![v(0), v(1), k(0.0)],
        )?,
        nodes: vec![4, 8],
    };
    let dynamics = vec![DynamicsCase {
        name: "bivector_on_second_factor".into(),
        alpha: FormField::function(5, -v(3)),
        ell: 2,
        field: Some(MultiVectorField::partial(5, 2).wedge(&MultiVectorField::partial(5, 4))?),
        modes: vec![DynamicsMode::InvariantTangent],
    }];
    let reduction = ReductionSetup {
        lambda: 0.0,
        presentation: pres,
        sigma: sigma.clone(),
        eta: eta.clone(),
        reduced_ansatz: Some(omega0),
        eta_ansatz: Some(FormField::dx(3, 2)),
        reduced_integral: Some((full, 4.0 * PI * period)),
        connection: Some(ConnectionData {
            sigma: sigma.clone(),
            eta: eta.clone(),
            transverse: vec![MultiVectorField::partial(5, 1)],
            curvature_ansatz: Some(FormField::zero(3, 2)),
            cycles: vec![sphere],
        }),
        variation: None,
        dynamics,
        level_zero: Some(LevelZero {
            sigma0: form(3, 2, &[(&[0, 1], k(1.0))])?,
            eta0: FormField::dx(3, 2),
            curvature: FormField::zero(3, 2),
            nodes: vec![4, 8, 4],
        }),
    };

    let localization = LocalizationScenario {
        name: "product_spheres_torus".into(),
        chart,
        nodes: vec![4, 96, 4, 8, 4],
        sigma: sigma.clone(),
        eta,
        nu: vec![v(1)],
        algebra: LieAlgebraSpec::abelian(1),
        fixed: Vec::new(),
        group_volume: 2.0 * PI,
        delta: 1.0,
        reduced: None,
    };

    let mut s = Scenario::bare("product_spheres_torus", p, manifold);
    s.action = Some(action);
    s.moment = Some(split.moment());
    s.split = Some(split);
    s.sigma = Some(sigma);
    s.level = Some(vec![0.0]);
    s.reduction = Some(reduction);
    s.localization = Some(localization);
    Ok(s)
}
