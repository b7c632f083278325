//! The named checks a config can request.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use plectic::actions::{
    action_check, equivariant_closed_check, fixed_point_locator, moment_check, split_level_set, LieAlgebraSpec,
    SplitFlavor,
};
use plectic::exterior::nondegeneracy_check;
use plectic::expr::ScalarExpr;
use plectic::hamiltonian::{
    bracket_laws_report, critical_vanishing_check, hamiltonian_field, hamiltonian_with_ansatz, leaf_restrict,
    BracketLawsReport, SAMPLE_MARGIN,
};
use plectic::quadrature::{
    gaussian_check, localization_compare, stationary_phase_compare, LocalizationScenario, PhaseConvention,
};
use plectic::reduction::{
    check_basic, connection_and_curvature, descend_eta, integrate_descended, lemma_variation_identity,
    reduce_dynamics, reduced_form, variation_slope,
};
use plectic::scenarios::{random_form, Scenario};
use plectic::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CheckConfig, CheckName};
use crate::report::{CheckReport, Gap, Status};

/// Everything a check may read.
pub struct Ctx<'a> {
    pub scenario: &'a Scenario,
    pub cfg: &'a CheckConfig,
    pub tol_scale: f64,
    pub seed: u64,
}

impl Ctx<'_> {
    fn tol(&self, gap: &str, default: f64) -> f64 {
        let base = self.cfg.tolerances.get(gap).copied().or(self.cfg.tol).unwrap_or(default);
        base * self.tol_scale
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn samples(&self) -> Vec<Vec<f64>> {
        match self.cfg.samples {
            Some(n) => self.scenario.manifold.chart.quasi_random_points(n, SAMPLE_MARGIN),
            None => self.scenario.manifold.samples.clone(),
        }
    }
}

#[derive(Default)]
struct Outcome {
    gaps: Vec<Gap>,
    requirements: BTreeMap<String, bool>,
    details: Value,
    grid: Value,
    vacuous: bool,
    reason: Option<String>,
}

impl Outcome {
    fn gap(&mut self, ctx: &Ctx, name: &str, value: f64, default_tol: f64) {
        let tolerance = ctx.tol(name, default_tol);
        self.gaps.push(Gap { name: name.into(), value, tolerance, passed: value <= tolerance });
    }

    fn require(&mut self, name: &str, ok: bool) {
        self.requirements.insert(name.into(), ok);
    }

    fn passed(&self) -> bool {
        self.gaps.iter().all(|g| g.passed) && self.requirements.values().all(|&b| b)
    }
}

enum Run {
    Done(Outcome),
    Skipped(String),
}

type CheckResult = std::result::Result<Run, Error>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn skip(what: &str, scenario: &Scenario) -> CheckResult {
    Ok(Run::Skipped(format!("scenario `{}` provides no {what}", scenario.name)))
}

pub fn run_check(ctx: &Ctx) -> CheckReport {
    let start = Instant::now();
    let result = match ctx.cfg.name {
        CheckName::Nondegeneracy => nondegeneracy(ctx),
        CheckName::ActionCheck => action(ctx),
        CheckName::MomentCheck => moment(ctx),
        CheckName::BracketLaws => bracket_laws(ctx),
        CheckName::LeafRestrict => leaf(ctx),
        CheckName::CriticalVanishing => critical(ctx),
        CheckName::SplitLevelSet => level_set(ctx),
        CheckName::EquivariantClosed => equivariant(ctx),
        CheckName::FixedPoints => fixed_points(ctx),
        CheckName::CheckBasic => basic(ctx),
        CheckName::ReducedForm => reduced(ctx),
        CheckName::ReduceDynamics => dynamics(ctx),
        CheckName::ConnectionCurvature => connection(ctx),
        CheckName::DescendEta => eta(ctx),
        CheckName::VariationSlope => variation(ctx),
        CheckName::StationaryPhaseCompare => stationary_phase(ctx),
        CheckName::GaussianCheck => gaussian(ctx),
        CheckName::LocalizationCompare => localization(ctx),
        CheckName::WeylLevelSet => weyl(ctx),
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut report = CheckReport {
        name: ctx.cfg.name.as_str().into(),
        status: Status::Fail,
        gaps: Vec::new(),
        requirements: BTreeMap::new(),
        reason: None,
        seed: ctx.seed,
        grid: Value::Null,
        details: Value::Null,
        wall_time_ms,
    };
    match result {
        Ok(Run::Done(o)) => {
            report.status = if o.vacuous {
                Status::Vacuous
            } else if o.passed() {
                Status::Pass
            } else {
                Status::Fail
            };
            report.reason = o.reason.clone().or_else(|| {
                let failed: Vec<String> = o
                    .gaps
                    .iter()
                    .filter(|g| !g.passed)
                    .map(|g| g.name.clone())
                    .chain(o.requirements.iter().filter(|(_, b)| !**b).map(|(n, _)| n.clone()))
                    .collect();
                (!failed.is_empty()).then(|| format!("failed: {}", failed.join(", ")))
            });
            report.gaps = o.gaps;
            report.requirements = o.requirements;
            report.grid = o.grid;
            report.details = o.details;
        }
        Ok(Run::Skipped(reason)) => {
            report.status = Status::Skipped;
            report.reason = Some(reason);
        }
        Err(e) => {
            if let Error::NotHamiltonian { residual, point } = &e {
                report.details = json!({ "not_hamiltonian": { "residual": residual, "point": point } });
            }
            report.reason = Some(e.to_string());
        }
    }
    report
}

fn nondegeneracy(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let m = &s.manifold;
    let samples = ctx.samples();
    let mut o = Outcome::default();
    let rank_tol = ctx.tol("rank", 1e-9);
    let mut degenerate = 0;
    let mut min_sv = f64::INFINITY;
    for x in &samples {
        let r = nondegeneracy_check(&m.omega.eval(x)?, rank_tol)?;
        if !r.is_nondegenerate() {
            degenerate += 1;
        }
        min_sv = r.singular_values().iter().cloned().fold(min_sv, f64::min);
    }
    o.gap(ctx, "d_omega", m.omega.d().max_norm(&samples)?, 1e-8);
    o.require("nondegenerate", degenerate == 0);
    let mut atlas = Vec::new();
    for link in &s.atlas {
        let cap = &link.map.target.name;
        let overlap: Vec<Vec<f64>> = samples
            .iter()
            .filter(|x| link.map.eval(x).map(|y| link.map.target.contains(&y)).unwrap_or(false))
            .cloned()
            .collect();
        o.gap(ctx, &format!("atlas_{cap}"), link.defect(&samples)?, 1e-9);
        let det = link.map.min_jacobian_det(&overlap)?;
        o.require(&format!("atlas_{cap}_diffeomorphic"), !overlap.is_empty() && det > rank_tol);
        atlas.push(json!({ "cap": cap, "overlap_points": overlap.len(), "min_jacobian_det": det }));
    }
    o.details = json!({
        "k": m.k,
        "degenerate_points": degenerate,
        "min_singular_value": min_sv,
        "certificate": to_value(&m.certificate),
        "atlas": atlas,
    });
    o.grid = json!({ "samples": samples.len() });
    Ok(Run::Done(o))
}

fn action(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(a) = &s.action else { return skip("group action", s) };
    let samples = ctx.samples();
    let r = action_check(&s.manifold, a, &samples)?;
    let mut o = Outcome::default();
    o.gap(ctx, "homomorphism", r.homomorphism, 1e-8);
    o.gap(ctx, "preserves_omega", r.preserves_omega, 1e-8);
    o.details = json!({ "algebra": a.algebra.name, "algebra_laws": to_value(&a.algebra.validate()) });
    o.grid = json!({ "samples": samples.len() });
    Ok(Run::Done(o))
}

fn moment(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let (Some(a), Some(mu)) = (&s.action, &s.moment) else { return skip("moment map", s) };
    let samples = ctx.samples();
    let r = moment_check(&s.manifold, a, mu, &samples, &mut ctx.rng())?;
    let mut o = Outcome::default();
    o.gap(ctx, "a_differential", r.a, 1e-8);
    o.gap(ctx, "b_comoment", r.b, 1e-8);
    o.gap(ctx, "c_sign", r.c, 1e-8);
    if let Some(d) = r.d {
        o.gap(ctx, "d_equivariance", d, 1e-8);
    }
    o.details = json!({ "group_maps": a.group_maps.iter().map(|g| g.label.clone()).collect::<Vec<_>>() });
    o.grid = json!({ "samples": samples.len() });
    Ok(Run::Done(o))
}

fn bracket_laws(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(deg) = s.hamiltonian_degree else { return skip("space of Hamiltonian forms to sample", s) };
    let m = &s.manifold;
    let mut rng = ctx.rng();
    let triples = ctx.cfg.triples.unwrap_or(20);
    let samples = m.chart.random_points(&mut rng, ctx.cfg.samples.unwrap_or(100), SAMPLE_MARGIN);
    let mut worst = BracketLawsReport { jacobi: 0.0, antisymmetry: 0.0, field_bracket: 0.0 };
    for _ in 0..triples {
        let mut h = Vec::new();
        for _ in 0..3 {
            h.push(hamiltonian_field(m, &random_form(&m.chart, deg, &mut rng)?, 1, 1e-8)?);
        }
        let r = bracket_laws_report(m, &h[0], &h[1], &h[2], &samples)?;
        worst.jacobi = worst.jacobi.max(r.jacobi);
        worst.antisymmetry = worst.antisymmetry.max(r.antisymmetry);
        worst.field_bracket = worst.field_bracket.max(r.field_bracket);
    }
    let mut o = Outcome::default();
    o.gap(ctx, "jacobi", worst.jacobi, 1e-8);
    o.gap(ctx, "antisymmetry", worst.antisymmetry, 1e-8);
    o.gap(ctx, "field_bracket", worst.field_bracket, 1e-8);
    o.grid = json!({ "samples": samples.len(), "triples": triples, "form_degree": deg });
    Ok(Run::Done(o))
}

fn parsed_f(ctx: &Ctx) -> Result<Option<ScalarExpr>, Error> {
    Ok(match &ctx.cfg.f {
        Some(text) => Some(ScalarExpr::parse(text)?),
        None => None,
    })
}

fn leaf(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(l) = &s.leaf else { return skip("leaf of ker η", s) };
    let f = parsed_f(ctx)?.unwrap_or_else(|| l.f.clone());
    let tol = ctx.tol("leaf", 1e-8);
    let r = leaf_restrict(&s.manifold, &l.sigma, &l.eta, None, &l.leaf, &f, tol)?;
    let mut o = Outcome::default();
    o.gap(ctx, "omega_split", r.omega_split_defect, 1e-8);
    o.gap(ctx, "d_eta", r.d_eta, 1e-8);
    o.gap(ctx, "closed", r.closed_defect, 1e-8);
    o.require("integral", r.integral);
    if let Some(v) = r.hamiltonian_defect {
        o.gap(ctx, "hamiltonian", v, 1e-8);
    }
    if let Some(v) = r.restricted_defect {
        o.gap(ctx, "restricted_field", v, 1e-8);
    }
    if !r.integral {
        o.reason = Some("leaf not integral to ker η".into());
    }
    o.details = to_value(&r);
    o.grid = json!({ "leaf_chart": l.leaf.source.name, "f": f.to_string() });
    Ok(Run::Done(o))
}

fn critical(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    if s.critical.is_empty() {
        return skip("critical-point patches", s);
    }
    let mut patches = s.critical.clone();
    if let Some(f) = parsed_f(ctx)? {
        patches.truncate(1);
        patches[0].f = f;
    }
    let tol = ctx.tol("field_norm", 1e-8);
    let r = critical_vanishing_check(&patches, 1e-10, tol)?;
    let mut o = Outcome::default();
    o.gap(ctx, "field_norm", r.max_field_norm, 1e-8);
    o.require("critical_points_found", !r.critical_points.is_empty());
    o.details = to_value(&r);
    o.grid = json!({ "patches": patches.iter().map(|p| p.manifold.chart.name.clone()).collect::<Vec<_>>() });
    Ok(Run::Done(o))
}

fn level_set(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let (Some(a), Some(sp)) = (&s.action, &s.split) else { return skip("split moment map", s) };
    let Some(level) = ctx.cfg.level.clone().or_else(|| s.level.clone()) else { return skip("level", s) };
    let samples = ctx.samples();
    let r = split_level_set(&s.manifold, a, sp, &level, &samples, ctx.tol("level", 1e-8))?;
    let mut o = Outcome::default();
    o.vacuous = r.vacuous;
    o.require("membership_agreement", r.membership_mismatches == 0);
    o.require("regular_value", r.regular);
    o.require("eta_nonvanishing", r.min_eta_norm > ctx.tol("level", 1e-8));
    o.require("locally_free", r.locally_free);
    if r.vacuous {
        o.reason = Some("sampled level set is empty".into());
    }
    o.details = to_value(&r);
    o.grid = json!({ "samples": samples.len(), "level": level });
    Ok(Run::Done(o))
}

fn equivariant(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let (Some(a), Some(sp), Some(sigma)) = (&s.action, &s.split, &s.sigma) else {
        return skip("split moment map with σ", s);
    };
    let z = ctx.cfg.z.unwrap_or([0.0, 1.0]);
    let samples = ctx.samples();
    let tol = ctx.tol("closed", 1e-8);
    let r = equivariant_closed_check(&s.manifold, a, sigma, sp, Complex64::new(z[0], z[1]), &samples, tol)?;
    let mut o = Outcome::default();
    o.gap(ctx, "exponential", r.exponential_defect, 1e-8);
    o.gap(ctx, "omega_plus_mu", r.omega_plus_mu_defect, 1e-8);
    o.grid = json!({ "samples": samples.len(), "z": z });
    Ok(Run::Done(o))
}

fn fixed_points(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let (Some(a), Some(fs)) = (&s.action, &s.fixed) else { return skip("fixed-point patches", s) };
    let starts = ctx.cfg.starts.unwrap_or(40);
    let comps = fixed_point_locator(&fs.patches, &a.algebra, starts, ctx.tol("locator", 1e-9))?;
    let mut o = Outcome::default();
    o.require("nonempty", !comps.is_empty());
    o.require("integral_weights", comps.iter().all(|c| c.weights_integral));
    o.require("matches_declared", comps.len() == fs.declared.len());
    let spread = comps.iter().map(|c| c.nu_spread).fold(0.0, f64::max);
    o.gap(ctx, "nu_spread", spread, 1e-8);
    o.details = json!({ "components": to_value(&comps) });
    o.grid = json!({ "starts": starts });
    Ok(Run::Done(o))
}

fn basic(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(r) = &s.reduction else { return skip("reduction presentation", s) };
    let tol = ctx.tol("basic", 1e-8);
    let b = check_basic(&r.presentation, tol)?;
    let mut o = Outcome::default();
    for c in &b.checks {
        o.require(&c.name, c.passed);
    }
    if let Some(v) = &b.violated {
        o.reason = Some(format!("violated hypothesis: {v}"));
    }
    o.details = to_value(&b);
    o.grid = json!({ "level_samples": r.presentation.level_samples().len(), "tolerance": tol, "lambda": r.lambda });
    Ok(Run::Done(o))
}

fn reduced(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(r) = &s.reduction else { return skip("reduction presentation", s) };
    let mut o = Outcome::default();
    // the descent presupposes the reduction hypotheses
    let basic = check_basic(&r.presentation, ctx.tol("basic", 1e-8))?;
    o.require("basic_hypotheses", basic.passed);
    if let Some(v) = &basic.violated {
        o.reason = Some(format!("violated hypothesis: {v}"));
    }
    let red = reduced_form(&r.presentation, r.reduced_ansatz.as_ref(), &mut ctx.rng(), ctx.tol("descent", 1e-8))?;
    let d = &red.descent;
    o.gap(ctx, "descent", d.descent_residual, 1e-8);
    for (name, v) in [("ansatz", d.ansatz_residual), ("pullback", d.pullback_residual), ("closed", d.closed_residual)] {
        if let Some(v) = v {
            o.gap(ctx, name, v, 1e-8);
        }
    }
    let mut integral = Value::Null;
    if let Some((cycle, expected)) = &r.reduced_integral {
        let got = integrate_descended(&r.presentation, &r.presentation.pulled_omega()?, cycle)?;
        o.gap(ctx, "integral", (got - expected).abs() / expected.abs(), 1e-3);
        integral = json!({ "cycle": cycle.name, "value": got, "expected": expected, "nodes": cycle.nodes });
    }
    o.details = json!({ "integral": integral, "lambda": r.lambda });
    o.grid = json!({ "level_samples": d.base_points.len() });
    Ok(Run::Done(o))
}

fn dynamics(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(r) = &s.reduction else { return skip("reduction presentation", s) };
    let Some(omega_phi) = &r.reduced_ansatz else { return skip("reduced form", s) };
    if r.dynamics.is_empty() {
        return skip("dynamics cases", s);
    }
    let tol = ctx.tol("dynamics", 1e-8);
    let mut o = Outcome::default();
    let mut details = Vec::new();
    for case in &r.dynamics {
        let h = match &case.field {
            Some(f) => hamiltonian_with_ansatz(&s.manifold, &case.alpha, f.clone(), tol)?,
            None => hamiltonian_field(&s.manifold, &case.alpha, case.ell, tol)?,
        };
        for mode in &case.modes {
            let d = reduce_dynamics(&r.presentation, &h, *mode, omega_phi, tol)?;
            let tag = format!("{}/{}", case.name, to_value(mode).as_str().unwrap_or("mode"));
            o.gap(ctx, &format!("{tag}/mode"), d.mode_defect, 1e-8);
            o.gap(ctx, &format!("{tag}/tangency"), d.tangency_defect, 1e-8);
            o.gap(ctx, &format!("{tag}/well_defined"), d.well_definedness, 1e-8);
            o.gap(ctx, &format!("{tag}/identity"), d.identity_defect, 1e-8);
            details.push(json!({ "case": case.name, "report": to_value(&d) }));
        }
    }
    o.details = json!({ "cases": details });
    Ok(Run::Done(o))
}

fn connection(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(r) = &s.reduction else { return skip("reduction presentation", s) };
    let Some(c) = &r.connection else { return skip("connection data", s) };
    let (_, rep) = connection_and_curvature(&r.presentation, c, &mut ctx.rng(), ctx.tol("normalization", 1e-8))?;
    let mut o = Outcome::default();
    o.require("conjugate_pairing", rep.conjugacy_failures == 0);
    o.gap(ctx, "normalization", rep.normalization_defect, 1e-8);
    o.gap(ctx, "invariance", rep.invariance_defect, 1e-8);
    o.gap(ctx, "curvature_descent", rep.curvature_descent_residual, 1e-8);
    if let Some(v) = rep.curvature_ansatz_residual {
        o.gap(ctx, "curvature_ansatz", v, 1e-8);
    }
    for p in &rep.chern_pairings {
        o.gap(ctx, &format!("chern_integrality/{}", p.cycle), (p.value - p.value.round()).abs(), 1e-6);
    }
    o.details = to_value(&rep);
    o.grid = json!({ "cycles": c.cycles.iter().map(|c| json!({ "name": c.name, "nodes": c.nodes })).collect::<Vec<_>>() });
    Ok(Run::Done(o))
}

fn eta(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(r) = &s.reduction else { return skip("reduction presentation", s) };
    let tol = ctx.tol("basic", 1e-8);
    let e = descend_eta(&r.presentation, &r.eta, r.eta_ansatz.as_ref(), &mut ctx.rng(), tol)?;
    let mut o = Outcome::default();
    o.gap(ctx, "basic", e.basic_defect, 1e-8);
    o.gap(ctx, "descent", e.descent.descent_residual, 1e-8);
    if let Some(v) = e.descent.ansatz_residual {
        o.gap(ctx, "ansatz", v, 1e-8);
    }
    if let Some(v) = e.descent.closed_residual {
        o.gap(ctx, "closed", v, 1e-8);
    }
    Ok(Run::Done(o))
}

fn variation(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(r) = &s.reduction else { return skip("reduction presentation", s) };
    let (Some(v), Some(c)) = (&r.variation, &r.connection) else { return skip("family of levels", s) };
    let (_, conn) = connection_and_curvature(&r.presentation, c, &mut ctx.rng(), ctx.tol("normalization", 1e-8))?;
    let Some(chern) = conn.chern_pairings.first().map(|p| p.value) else {
        return skip("Chern pairing", s);
    };
    let lambdas = ctx.cfg.lambdas.clone().unwrap_or_else(|| v.lambdas.clone());
    let fit_tol = ctx.tol("fit_residual", 1e-6);
    let rep = variation_slope(&*v.family, &lambdas, &v.cycle, chern, v.eta_integral, fit_tol)?;
    let lemma = lemma_variation_identity(&*v.family, r.lambda, v.step, &v.psi)?;
    let mut o = Outcome::default();
    o.gap(ctx, "slope", rep.relative_gap, 1e-2);
    o.gap(ctx, "fit_residual", rep.fit_residual, 1e-6);
    o.gap(ctx, "lemma_identity", lemma, 1e-6);
    if !rep.linear {
        o.reason = Some("family violates trivialization hypothesis or grid too coarse".into());
    }
    o.details = json!({ "report": to_value(&rep), "chern": chern, "lemma_defect": lemma, "lemma_lambda": r.lambda });
    o.grid = json!({ "lambdas": lambdas, "cycle_nodes": v.cycle.nodes, "lemma_step": v.step });
    Ok(Run::Done(o))
}

/// `d_g`-closedness of the inputs, required before any localization integral.
fn closedness_gate(ctx: &Ctx, o: &mut Outcome) -> Result<(), Error> {
    let s = ctx.scenario;
    if let (Some(a), Some(sp), Some(sigma)) = (&s.action, &s.split, &s.sigma) {
        if sp.flavor == SplitFlavor::Basic {
            let tol = ctx.tol("equivariant_closed", 1e-8);
            let samples = ctx.samples();
            let r = equivariant_closed_check(&s.manifold, a, sigma, sp, Complex64::new(0.0, 1.0), &samples, tol)?;
            o.gap(ctx, "equivariant_closed", r.exponential_defect.max(r.omega_plus_mu_defect), 1e-8);
        }
    }
    Ok(())
}

fn with_nodes(ctx: &Ctx, mut l: LocalizationScenario) -> LocalizationScenario {
    if let Some(n) = &ctx.cfg.nodes {
        l.nodes = n.clone();
    }
    l
}

fn stationary_phase(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let (Some(a), Some(fs), Some(_)) = (&s.action, &s.fixed, &s.localization) else {
        return skip("stationary phase data", s);
    };
    let mut o = Outcome::default();
    closedness_gate(ctx, &mut o)?;
    let comps = fixed_point_locator(&fs.patches, &a.algebra, ctx.cfg.starts.unwrap_or(40), 1e-9)?;
    let l = with_nodes(ctx, s.with_located_fixed(&comps)?);
    let t_values = ctx.cfg.t_values.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let convention = ctx.cfg.convention.unwrap_or(PhaseConvention::Liouville);
    let rep = stationary_phase_compare(&l, &t_values, convention)?;
    o.gap(ctx, "relative_gap", rep.max_gap, 1e-8);
    // Recorded, not judged: whether each component is tangent to ker η.
    let mut tangency = Vec::new();
    for f in &l.fixed {
        let pulled = f.eta.pullback(&f.map)?;
        let pts = f.map.source.quasi_random_points(8, 0.0);
        let pts = if pts.is_empty() { vec![vec![]] } else { pts };
        let tangent = pulled.degree > 0 && pulled.max_norm(&pts)? < 1e-12;
        tangency.push(json!({ "component": f.map.source.name, "tangent_to_ker_eta": tangent }));
    }
    o.details = json!({ "report": to_value(&rep), "hypothesis_tangent_to_ker_eta": tangency });
    o.grid = json!({ "nodes": l.nodes, "t_values": t_values, "fixed_nodes": l.fixed.iter().map(|f| f.nodes.clone()).collect::<Vec<_>>() });
    Ok(Run::Done(o))
}

fn gaussian(ctx: &Ctx) -> CheckResult {
    let mut rng = ctx.rng();
    let ells = ctx.cfg.ell_values.clone().unwrap_or_else(|| vec![1, 2, 3]);
    let ts = ctx.cfg.t_values.clone().unwrap_or_else(|| vec![0.3, 1.0, 3.0]);
    let mut worst: f64 = 0.0;
    let mut reports = Vec::new();
    for &ell in &ells {
        for &t in &ts {
            let y: Vec<f64> = (0..ell).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = gaussian_check(ell, t, &y)?;
            worst = worst.max(r.max_gap());
            reports.push(to_value(&r));
        }
    }
    let mut o = Outcome::default();
    o.gap(ctx, "relative_gap", worst, 1e-7);
    o.details = json!({ "cases": reports });
    o.grid = json!({ "ell_values": ells, "t_values": ts });
    Ok(Run::Done(o))
}

fn localization(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    if s.localization.is_none() || s.reduction.as_ref().and_then(|r| r.level_zero.as_ref()).is_none() {
        return skip("level-zero localization data", s);
    }
    if s.localization.as_ref().is_some_and(|l| l.algebra.dim != LieAlgebraSpec::abelian(1).dim) {
        return skip("circle group", s);
    }
    let mut o = Outcome::default();
    closedness_gate(ctx, &mut o)?;
    let l = with_nodes(ctx, s.with_reduced(&mut ctx.rng(), ctx.tol("reduced_data", 1e-8))?);
    let t_grid = ctx.cfg.t_values.clone().unwrap_or_else(|| vec![0.02, 0.03, 0.04, 0.05, 0.06]);
    let fit_tol = ctx.cfg.fit_tol.unwrap_or(0.05);
    let lemma_t = ctx.cfg.lemma_t.unwrap_or(0.1);
    let hermite = ctx.cfg.hermite_nodes.unwrap_or(60);
    let rep = localization_compare(&l, &t_grid, fit_tol, lemma_t, hermite)?;
    let first = rep
        .points
        .iter()
        .min_by(|a, b| a.t.total_cmp(&b.t))
        .expect("t grid is nonempty");
    o.gap(ctx, "plateau", (first.i_t - first.reduced).abs() / first.reduced.abs(), 1e-3);
    o.gap(ctx, "lemma_gap", rep.lemma_gap, 1e-6);
    o.require("exponential_decay", rep.slope_ok);
    if !rep.slope_ok {
        o.reason = Some("no exponential localization".into());
    }
    o.details = to_value(&rep);
    o.grid = json!({ "nodes": l.nodes, "t_values": t_grid, "fit_tol": fit_tol, "hermite_nodes": hermite });
    Ok(Run::Done(o))
}

fn weyl(ctx: &Ctx) -> CheckResult {
    let s = ctx.scenario;
    let Some(w) = &s.weyl else { return skip("Weyl level set data", s) };
    let tol = ctx.tol("membership", 1e-6);
    let defect = |x: &[f64]| -> Result<f64, Error> {
        let mut m: f64 = 0.0;
        for d in &w.defects {
            m = m.max(d.eval(x)?.abs());
        }
        Ok(m)
    };
    let mut mismatches = 0;
    let mut max_member: f64 = 0.0;
    let mut min_non_member = f64::INFINITY;
    for x in &w.members {
        let d = defect(x)?;
        max_member = max_member.max(d);
        if d >= tol {
            mismatches += 1;
        }
    }
    for x in &w.non_members {
        let d = defect(x)?;
        min_non_member = min_non_member.min(d);
        if d < tol {
            mismatches += 1;
        }
    }
    let mut o = Outcome::default();
    o.gap(ctx, "member_defect", max_member, 1e-6);
    o.require("membership_agreement", mismatches == 0);
    o.details = json!({ "mismatches": mismatches, "min_non_member_defect": min_non_member });
    o.grid = json!({ "members": w.members.len(), "non_members": w.non_members.len() });
    Ok(Run::Done(o))
}
