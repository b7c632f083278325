//! Built-in scenarios.
//!
//! Each builder returns a [`Scenario`]: a plectic chart plus whatever
//! optional structure (action, moment map, atlas caps, reduction data)
//! the named checks need. Missing pieces make the corresponding check
//! report `skipped`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::actions::{FixedComponent, FixedPatch, GroupActionSpec, MomentMapForm, SplitMoment};
use crate::charts::{Chart, ChartMap, CoordKind, Coordinate, FormField, MultiVectorField};
use crate::error::{invalid, Error, Result};
use crate::exterior::basis;
use crate::expr::ScalarExpr;
use crate::hamiltonian::{CriticalPatch, PlecticManifold};
use crate::quadrature::{FixedData, LocalizationScenario};
use crate::reduction::{reduced_data, ConnectionData, Cycle, DynamicsMode, ReductionPresentation};

mod hopf;
mod multimomentum;
mod power;
mod product;
mod s2;
mod su2;
mod torus;

/// Tolerance used when certifying built-in manifolds.
pub const BUILD_TOL: f64 = 1e-8;

/// Built-in scenarios as (name, accepted params, what they exercise), sorted by name.
pub const SCENARIOS: &[(&str, &str, &str)] = &[
    ("hopf_c2", "lambda, corrupt_phi", "C^2 x S^1 by the Hopf circle: reduction, connection, curvature and variation of levels"),
    ("multimomentum_trivial", "m", "multimomentum bundle of a trivial field theory with translation or rotation symmetry"),
    ("power_sigma_ell", "planes, ell", "powers of the symplectic form on C^2 with the SU(2) action"),
    ("product_spheres_torus", "period", "S^2 x S^2 x S^1 with a circle rotating the first sphere: heat kernel localization"),
    ("s2_x_torus", "circle", "S^2 x S^1 with the rotation of S^2: stationary phase and critical points"),
    ("su2_cartan", "moment", "SU(2) with its Cartan 3-form: left, right and adjoint actions and the Weyl level set"),
    ("torus_t3", "", "the flat 3-torus with a volume form: vanishing at critical points"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Su2Moment {
    Left,
    Right,
    Adjoint,
}

/// Scenario parameters; each scenario accepts only the ones it uses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioParams {
    pub lambda: Option<f64>,
    pub circle: Option<bool>,
    pub period: Option<f64>,
    pub planes: Option<usize>,
    pub ell: Option<usize>,
    pub moment: Option<Su2Moment>,
    pub m: Option<usize>,
    pub corrupt_phi: Option<f64>,
}

impl ScenarioParams {
    fn names_set(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags: [(&'static str, bool); 8] = [
            ("lambda", self.lambda.is_some()),
            ("circle", self.circle.is_some()),
            ("period", self.period.is_some()),
            ("planes", self.planes.is_some()),
            ("ell", self.ell.is_some()),
            ("moment", self.moment.is_some()),
            ("m", self.m.is_some()),
            ("corrupt_phi", self.corrupt_phi.is_some()),
        ];
        for (n, set) in flags {
            if set {
                out.push(n);
            }
        }
        out
    }

    fn only(&self, scenario: &str, allowed: &[&str]) -> Result<()> {
        for n in self.names_set() {
            if !allowed.contains(&n) {
                return invalid(format!("scenario `{scenario}` does not take parameter `{n}`"));
            }
        }
        Ok(())
    }
}

/// `i: leaf → M` for a leaf of `ker η`.
#[derive(Debug, Clone)]
pub struct LeafSetup {
    pub sigma: FormField,
    pub eta: FormField,
    pub leaf: ChartMap,
    pub f: ScalarExpr,
}

/// Main chart to cap chart, with objects that must agree on the overlap.
#[derive(Debug, Clone)]
pub struct AtlasLink {
    pub map: ChartMap,
    /// `(form on the cap, form on the main chart)`.
    pub forms: Vec<(FormField, FormField)>,
    /// `(field on the main chart, field on the cap)`.
    pub fields: Vec<(MultiVectorField, MultiVectorField)>,
}

impl AtlasLink {
    /// Largest disagreement over main-chart samples whose image lies in the cap.
    pub fn defect(&self, samples: &[Vec<f64>]) -> Result<f64> {
        let pts: Vec<Vec<f64>> = samples
            .iter()
            .filter(|x| self.map.eval(x).map(|y| self.map.target.contains(&y)).unwrap_or(false))
            .cloned()
            .collect();
        let mut worst: f64 = 0.0;
        for (cap, main) in &self.forms {
            worst = worst.max(cap.pullback(&self.map)?.max_difference(main, &pts)?);
        }
        for (main, cap) in &self.fields {
            for x in &pts {
                let j = self.map.jacobian_at(x)?;
                let pushed = j * nalgebra::DVector::from_column_slice(main.eval(x)?.coeffs());
                let there = cap.eval(&self.map.eval(x)?)?;
                for (a, b) in pushed.iter().zip(there.coeffs()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Ok(worst)
    }

    pub fn overlap_points(&self, samples: &[Vec<f64>]) -> usize {
        samples.iter().filter(|x| self.map.eval(x).map(|y| self.map.target.contains(&y)).unwrap_or(false)).count()
    }
}

/// Declared fixed components; weights and `ν` are filled in from the locator.
#[derive(Debug, Clone)]
pub struct FixedSetup {
    pub patches: Vec<FixedPatch>,
    pub declared: Vec<FixedData>,
}

#[derive(Debug, Clone)]
pub struct DynamicsCase {
    pub name: String,
    pub alpha: FormField,
    pub ell: usize,
    /// Declared field; solved from `α` when absent.
    pub field: Option<MultiVectorField>,
    pub modes: Vec<DynamicsMode>,
}

pub type Family = Arc<dyn Fn(f64) -> Result<ReductionPresentation> + Send + Sync>;

#[derive(Clone)]
pub struct VariationSetup {
    pub family: Family,
    pub lambdas: Vec<f64>,
    pub cycle: Cycle,
    pub eta_integral: f64,
    pub psi: MultiVectorField,
    pub step: f64,
}

impl std::fmt::Debug for VariationSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VariationSetup").field("lambdas", &self.lambdas).field("cycle", &self.cycle.name).finish()
    }
}

/// Reduced forms at level zero for the localization comparison.
#[derive(Debug, Clone)]
pub struct LevelZero {
    pub sigma0: FormField,
    pub eta0: FormField,
    pub curvature: FormField,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ReductionSetup {
    pub lambda: f64,
    pub presentation: ReductionPresentation,
    pub sigma: FormField,
    pub eta: FormField,
    pub reduced_ansatz: Option<FormField>,
    pub eta_ansatz: Option<FormField>,
    /// Cycle over the whole base and the expected `∫ ω_φ`.
    pub reduced_integral: Option<(Cycle, f64)>,
    pub connection: Option<ConnectionData>,
    pub variation: Option<VariationSetup>,
    pub dynamics: Vec<DynamicsCase>,
    pub level_zero: Option<LevelZero>,
}

/// Membership samples for a level set whose defect functions vanish
/// exactly on a known subset.
#[derive(Debug, Clone)]
pub struct WeylSetup {
    pub defects: Vec<ScalarExpr>,
    pub members: Vec<Vec<f64>>,
    pub non_members: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub params: ScenarioParams,
    pub manifold: PlecticManifold,
    pub atlas: Vec<AtlasLink>,
    pub action: Option<GroupActionSpec>,
    pub moment: Option<MomentMapForm>,
    pub split: Option<SplitMoment>,
    pub sigma: Option<FormField>,
    /// Level used by the split level set check.
    pub level: Option<Vec<f64>>,
    /// Degree of random Hamiltonian forms for the bracket laws.
    pub hamiltonian_degree: Option<usize>,
    pub leaf: Option<LeafSetup>,
    pub critical: Vec<CriticalPatch>,
    pub fixed: Option<FixedSetup>,
    pub localization: Option<LocalizationScenario>,
    pub reduction: Option<ReductionSetup>,
    pub weyl: Option<WeylSetup>,
}

impl Scenario {
    fn bare(name: &str, params: &ScenarioParams, manifold: PlecticManifold) -> Self {
        Self {
            name: name.into(),
            params: params.clone(),
            manifold,
            atlas: Vec::new(),
            action: None,
            moment: None,
            split: None,
            sigma: None,
            level: None,
            hamiltonian_degree: None,
            leaf: None,
            critical: Vec::new(),
            fixed: None,
            localization: None,
            reduction: None,
            weyl: None,
        }
    }

    /// Localization data with fixed components weighted by the locator output.
    pub fn with_located_fixed(&self, located: &[FixedComponent]) -> Result<LocalizationScenario> {
        let (Some(l), Some(fs)) = (&self.localization, &self.fixed) else {
            return invalid(format!("scenario `{}` has no stationary phase data", self.name));
        };
        let mut out = l.clone();
        out.fixed.clear();
        for d in &fs.declared {
            let target = &d.map.target.name;
            let comp = located.iter().find(|c| &c.chart == target).ok_or_else(|| {
                Error::Hypothesis(format!("no fixed component located in chart `{target}`"))
            })?;
            let mut d = d.clone();
            d.weights = comp.weights.clone();
            d.nu = comp.nu.clone();
            out.fixed.push(d);
        }
        Ok(out)
    }

    /// Localization data with the level-zero reduction verified by descent.
    pub fn with_reduced<R: Rng>(&self, rng: &mut R, tol: f64) -> Result<LocalizationScenario> {
        let Some(l) = &self.localization else {
            return invalid(format!("scenario `{}` has no localization data", self.name));
        };
        let Some(r) = &self.reduction else {
            return invalid(format!("scenario `{}` has no reduction data", self.name));
        };
        let Some(z) = &r.level_zero else {
            return invalid(format!("scenario `{}` has no level-zero data", self.name));
        };
        let mut out = l.clone();
        out.reduced = Some(reduced_data(
            &r.presentation,
            &r.sigma,
            &r.eta,
            &z.sigma0,
            &z.eta0,
            &z.curvature,
            z.nodes.clone(),
            rng,
            tol,
        )?);
        Ok(out)
    }
}

pub fn build(name: &str, params: &ScenarioParams) -> Result<Scenario> {
    match name {
        "s2_x_torus" => s2::build(params),
        "hopf_c2" => hopf::build(params),
        "product_spheres_torus" => product::build(params),
        "power_sigma_ell" => power::build(params),
        "su2_cartan" => su2::build(params),
        "multimomentum_trivial" => multimomentum::build(params),
        "torus_t3" => torus::build(params),
        _ => Err(Error::UnknownScenario(name.into())),
    }
}

/// A random Hamiltonian-form candidate: each coefficient mixes a constant,
/// linear terms in the coordinate functions and one product term.
pub fn random_form<R: Rng>(chart: &Chart, degree: usize, rng: &mut R) -> Result<FormField> {
    let n = chart.dim();
    let g: Vec<ScalarExpr> = chart
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| match c.kind {
            CoordKind::Periodic { period } => (&v(i) * &k(2.0 * PI / period)).sin(),
            CoordKind::Linear => v(i),
        })
        .collect();
    let mut coeffs = Vec::new();
    for _ in basis(n, degree) {
        let mut terms = vec![k(rng.gen_range(-1.0..1.0))];
        for gi in &g {
            terms.push(&k(rng.gen_range(-1.0..1.0)) * gi);
        }
        let (p, q) = (rng.gen_range(0..n), rng.gen_range(0..n));
        terms.push(&(&k(rng.gen_range(-1.0..1.0)) * &g[p]) * &g[q]);
        coeffs.push(ScalarExpr::sum(terms));
    }
    FormField::new(n, degree, coeffs)
}

pub(crate) fn v(i: usize) -> ScalarExpr {
    ScalarExpr::var(i)
}

pub(crate) fn k(c: f64) -> ScalarExpr {
    ScalarExpr::constant(c)
}

pub(crate) fn periodic(name: &str) -> Coordinate {
    Coordinate::periodic(name, 0.0, 2.0 * PI)
}

pub(crate) fn form(dim: usize, degree: usize, terms: &[(&[usize], ScalarExpr)]) -> Result<FormField> {
    FormField::from_terms(dim, degree, terms)
}

pub(crate) fn sq(e: &ScalarExpr) -> ScalarExpr {
    e.powi(2)
}
