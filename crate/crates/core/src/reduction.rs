//! Presented multisymplectic reduction.
//!
//! A scenario supplies the level set `N`, its embedding `i: N → M`, the
//! quotient `π: N → B` and a section `s: B → N`; this module verifies the
//! hypotheses and computes reduced data by horizontal descent: a form `β`
//! on `N` descends to `β̄` on `B` through `β̄_b(v_1..v_p) = β_x(L v_1..L v_p)`
//! with `L` any right inverse of `dπ_x`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::actions::{GroupActionSpec, MomentMapForm};
use crate::charts::{Chart, ChartMap, CoordKind, FormField, MultiVectorField};
use crate::error::{invalid, Error, Result};
use crate::exterior::{
    basis, classify_conjugacy, leibniz_det, pinv_solve, pseudo_inverse, AlternatingForm, MultiVector,
    DEFAULT_RANK_TOL,
};
use crate::hamiltonian::{HamiltonianForm, PlecticManifold, CERTIFICATE_POINTS, SAMPLE_MARGIN};
use crate::quadrature::{linear_fit, QuadratureGrid, ReducedData};

#[derive(Debug, Clone)]
pub struct ReductionPresentation {
    pub ambient: PlecticManifold,
    pub action: GroupActionSpec,
    pub moment: MomentMapForm,
    /// Closed level forms `φ_ξ`, one per basis element.
    pub phi: Vec<FormField>,
    /// `i: N → M`.
    pub embed: ChartMap,
    /// Fundamental fields written on `N`.
    pub level_fields: Vec<MultiVectorField>,
    /// `π: N → B`.
    pub quotient: ChartMap,
    /// `s: B → N` with `π ∘ s = id`.
    pub section: ChartMap,
}

impl ReductionPresentation {
    pub fn level_chart(&self) -> &Chart {
        &self.embed.source
    }

    pub fn base_chart(&self) -> &Chart {
        &self.quotient.target
    }

    pub fn level_samples(&self) -> Vec<Vec<f64>> {
        self.level_chart().quasi_random_points(CERTIFICATE_POINTS, SAMPLE_MARGIN)
    }

    pub fn base_samples(&self) -> Vec<Vec<f64>> {
        self.base_chart().quasi_random_points(CERTIFICATE_POINTS, SAMPLE_MARGIN)
    }

    /// `i*ω` on `N`.
    pub fn pulled_omega(&self) -> Result<FormField> {
        self.ambient.omega.pullback(&self.embed)
    }

    fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.base_chart().wrap(&self.quotient.eval(x)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub value: f64,
    pub passed: bool,
    pub sample: Option<Vec<f64>>,
    pub generator: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicReport {
    pub checks: Vec<HypothesisCheck>,
    pub passed: bool,
    /// Name of the first failed hypothesis.
    pub violated: Option<String>,
}

struct Worst {
    value: f64,
    sample: Option<Vec<f64>>,
    generator: Option<usize>,
}

impl Worst {
    fn new() -> Self {
        Self { value: 0.0, sample: None, generator: None }
    }

    fn see(&mut self, v: f64, x: &[f64], g: Option<usize>) {
        if v > self.value || self.sample.is_none() {
            self.value = self.value.max(v);
            self.sample = Some(x.to_vec());
            self.generator = g;
        }
    }

    fn finish(self, name: &str, passed: bool) -> HypothesisCheck {
        HypothesisCheck { name: name.into(), value: self.value, passed, sample: self.sample, generator: self.generator }
    }
}

fn form_worst(f: &FormField, pts: &[Vec<f64>], w: &mut Worst, g: Option<usize>) -> Result<()> {
    for x in pts {
        let v = if f.coeffs.is_empty() { 0.0 } else { f.eval(x)?.max_abs() };
        w.see(v, x, g);
    }
    Ok(())
}

/// Hypotheses of the reduction theorem on a presentation, in order:
/// `phi_closed`, `level_identity`, `field_relation`, `submersion`,
/// `fibers_are_orbits`, `horizontality`, `invariance`.
pub fn check_basic(p: &ReductionPresentation, tol: f64) -> Result<BasicReport> {
    let amb = &p.ambient.samples;
    let lvl = p.level_samples();
    if lvl.is_empty() {
        return invalid("no samples on the level chart");
    }
    let g = p.action.algebra.dim;
    let mut checks = Vec::new();

    let mut w = Worst::new();
    for (i, phi) in p.phi.iter().enumerate() {
        form_worst(&phi.d(), amb, &mut w, Some(i))?;
    }
    checks.push(w.finish("phi_closed", false));

    let mut w = Worst::new();
    for i in 0..g {
        let diff = p.moment.components[i].pullback(&p.embed)?.sub(&p.phi[i].pullback(&p.embed)?)?;
        form_worst(&diff, &lvl, &mut w, Some(i))?;
    }
    checks.push(w.finish("level_identity", false));

    let mut w = Worst::new();
    for x in &lvl {
        let y = p.embed.eval(x)?;
        let ji = p.embed.jacobian_at(x)?;
        for i in 0..g {
            let v = DVector::from_column_slice(p.level_fields[i].eval(x)?.coeffs());
            let target = DVector::from_column_slice(p.action.fields[i].eval(&y)?.coeffs());
            w.see((&ji * v - target).amax(), x, Some(i));
        }
    }
    checks.push(w.finish("field_relation", false));

    let dim_b = p.base_chart().dim();
    let mut sub = Worst::new();
    let mut fib = Worst::new();
    let dim_ok = p.level_chart().dim() == dim_b + g;
    for x in &lvl {
        let jp = p.quotient.jacobian_at(x)?;
        let s = jp.clone().svd(false, false).singular_values;
        let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
        // the submersion margin is reported as its inverse so that "small is good"
        sub.see(if smin > 0.0 { 1.0 / smin } else { f64::INFINITY }, x, None);
        let vals: Vec<MultiVector> = p.level_fields.iter().map(|f| f.eval(x)).collect::<Result<_>>()?;
        for (i, v) in vals.iter().enumerate() {
            let img = &jp * DVector::from_column_slice(v.coeffs());
            fib.see(img.amax(), x, Some(i));
        }
        let m = DMatrix::from_fn(p.level_chart().dim(), g, |r, c| vals[c].coeffs()[r]);
        let orbit_min = if g == 0 { 1.0 } else { m.svd(false, false).singular_values.min() };
        if orbit_min <= tol {
            fib.see(f64::INFINITY, x, None);
        }
    }
    let sub_ok = sub.value.is_finite() && sub.value < 1.0 / tol;
    checks.push(sub.finish("submersion", sub_ok));
    let fib_ok = dim_ok && fib.value < tol;
    checks.push(fib.finish("fibers_are_orbits", fib_ok));

    let iw = p.pulled_omega()?;
    let mut hor = Worst::new();
    let mut inv = Worst::new();
    for (i, f) in p.level_fields.iter().enumerate() {
        form_worst(&iw.interior(f)?, &lvl, &mut hor, Some(i))?;
        form_worst(&iw.lie_derivative(f)?, &lvl, &mut inv, Some(i))?;
    }
    checks.push(hor.finish("horizontality", false));
    checks.push(inv.finish("invariance", false));

    for c in checks.iter_mut() {
        if !matches!(c.name.as_str(), "submersion" | "fibers_are_orbits") {
            c.passed = c.value < tol;
        }
    }
    let violated = checks.iter().find(|c| !c.passed).map(|c| c.name.clone());
    Ok(BasicReport { passed: violated.is_none(), checks, violated })
}

/// Minimum-norm right inverse of `dπ_x`.
fn min_norm_lift(p: &ReductionPresentation, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(pseudo_inverse(&p.quotient.jacobian_at(x)?, DEFAULT_RANK_TOL))
}

/// Right inverse with random components along `ker dπ_x`.
fn random_lift<R: Rng>(p: &ReductionPresentation, x: &[f64], rng: &mut R) -> Result<DMatrix<f64>> {
    let jp = p.quotient.jacobian_at(x)?;
    let base = pseudo_inverse(&jp, DEFAULT_RANK_TOL);
    let n = jp.ncols();
    let proj = DMatrix::identity(n, n) - &base * &jp;
    let r = DMatrix::from_fn(n, jp.nrows(), |_, _| rng.gen_range(-1.0..1.0));
    Ok(base + proj * r)
}

/// Value of the descended form at `π(x)` using the lift `l`.
fn descend_with(form_n: &AlternatingForm, l: &DMatrix<f64>, degree: usize) -> Result<AlternatingForm> {
    let dim_b = l.ncols();
    let mut coeffs = Vec::new();
    for idx in basis(dim_b, degree) {
        let vectors: Vec<Vec<f64>> = idx.entries().iter().map(|&c| l.column(c).iter().cloned().collect()).collect();
        coeffs.push(form_n.evaluate(&vectors)?);
    }
    Ok(AlternatingForm::new(dim_b, degree, coeffs)?)
}

/// `β̄(π(x))` for a form on `N` at a point of `N`.
pub fn descend_at(p: &ReductionPresentation, form_n: &FormField, x: &[f64]) -> Result<AlternatingForm> {
    let l = min_norm_lift(p, x)?;
    if form_n.degree > l.ncols() {
        return Ok(AlternatingForm::zero(l.ncols(), 0));
    }
    descend_with(&form_n.eval(x)?, &l, form_n.degree)
}

#[derive(Debug, Clone)]
pub struct Descent {
    pub base_points: Vec<Vec<f64>>,
    pub values: Vec<AlternatingForm>,
    /// Largest disagreement between lifts and between points of one fiber.
    pub descent_residual: f64,
    /// `|β̄ - ansatz|` at base points.
    pub ansatz_residual: Option<f64>,
    /// `|β - π* ansatz|` on `N`.
    pub pullback_residual: Option<f64>,
    /// `|d ansatz|` on `B`.
    pub closed_residual: Option<f64>,
}

/// Descend `form_n` from `N` to `B`, measuring lift independence and,
/// when given, agreement with a closed-form ansatz.
pub fn descend<R: Rng>(
    p: &ReductionPresentation,
    form_n: &FormField,
    ansatz: Option<&FormField>,
    rng: &mut R,
) -> Result<Descent> {
    let dim_b = p.base_chart().dim();
    let degree = form_n.degree;
    let lvl = p.level_samples();
    let mut base_points = Vec::new();
    let mut values = Vec::new();
    let mut residual: f64 = 0.0;
    if degree > dim_b {
        let worst = form_n.max_norm(&lvl)?;
        return Ok(Descent {
            base_points,
            values,
            descent_residual: worst,
            ansatz_residual: None,
            pullback_residual: None,
            closed_residual: None,
        });
    }
    for x in &lvl {
        let b = p.project(x)?;
        let at_x = form_n.eval(x)?;
        let v1 = descend_with(&at_x, &min_norm_lift(p, x)?, degree)?;
        let v2 = descend_with(&at_x, &random_lift(p, x, rng)?, degree)?;
        let xs = p.section.eval(&b)?;
        let v3 = descend_with(&form_n.eval(&xs)?, &min_norm_lift(p, &xs)?, degree)?;
        residual = residual.max(v1.sub(&v2)?.max_abs()).max(v1.sub(&v3)?.max_abs());
        base_points.push(b);
        values.push(v1);
    }
    let (mut ansatz_residual, mut pullback_residual, mut closed_residual) = (None, None, None);
    if let Some(a) = ansatz {
        if a.dim != dim_b || a.degree != degree {
            return invalid("ansatz shape does not match the descended form");
        }
        let mut worst: f64 = 0.0;
        for (b, v) in base_points.iter().zip(&values) {
            worst = worst.max(a.eval(b)?.sub(v)?.max_abs());
        }
        ansatz_residual = Some(worst);
        pullback_residual = Some(a.pullback(&p.quotient)?.max_difference(form_n, &lvl)?);
        let base = p.base_samples();
        closed_residual = Some(a.d().max_norm(&base)?);
    }
    Ok(Descent { base_points, values, descent_residual: residual, ansatz_residual, pullback_residual, closed_residual })
}

#[derive(Debug, Clone)]
pub struct ReducedForm {
    pub omega_phi: Option<FormField>,
    pub descent: Descent,
}

/// `ω_φ` with `i*ω = π*ω_φ`; fails when the descent is lift dependent.
pub fn reduced_form<R: Rng>(
    p: &ReductionPresentation,
    ansatz: Option<&FormField>,
    rng: &mut R,
    tol: f64,
) -> Result<ReducedForm> {
    let descent = descend(p, &p.pulled_omega()?, ansatz, rng)?;
    if descent.descent_residual > tol {
        return Err(Error::Hypothesis(format!("form is not basic: descent residual {:e}", descent.descent_residual)));
    }
    Ok(ReducedForm { omega_phi: ansatz.cloned(), descent })
}

/// The pointwise value of `ω_φ` at `b` (minimum-norm lift at `s(b)`).
pub fn reduced_value(p: &ReductionPresentation, b: &[f64]) -> Result<AlternatingForm> {
    let x = p.section.eval(b)?;
    descend_at(p, &p.pulled_omega()?, &x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsMode {
    InvariantTangent,
    Commuting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub mode: DynamicsMode,
    /// `|[ξ̲, X]|` or `|{α, μ_ξ}| + |{α, φ_ξ}|`.
    pub mode_defect: f64,
    pub tangency_defect: f64,
    pub worst_tangency_sample: Option<Vec<f64>>,
    pub well_definedness: f64,
    /// `|ι_X̄ ω_φ - d̄α|`.
    pub identity_defect: f64,
    pub max_reduced_field: f64,
    pub max_reduced_d_alpha: f64,
}

/// Matrix of `Λ^ℓ A` on the colex bases.
fn exterior_power(a: &DMatrix<f64>, ell: usize) -> DMatrix<f64> {
    let rows = basis(a.nrows(), ell);
    let cols = basis(a.ncols(), ell);
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        let m: Vec<Vec<f64>> = rows[r]
            .entries()
            .iter()
            .map(|&i| cols[c].entries().iter().map(|&j| a[(i, j)]).collect())
            .collect();
        leibniz_det(&m)
    })
}

pub fn reduce_dynamics(
    p: &ReductionPresentation,
    a: &HamiltonianForm,
    mode: DynamicsMode,
    omega_phi: &FormField,
    tol: f64,
) -> Result<DynamicsReport> {
    let x_field = a.symbolic_field()?;
    let ell = a.ell;
    let amb = &p.ambient.samples;
    let mode_defect = match mode {
        DynamicsMode::InvariantTangent => {
            let mut worst: f64 = 0.0;
            for f in &p.action.fields {
                worst = worst.max(f.schouten(x_field)?.max_norm(amb)?);
            }
            worst
        }
        DynamicsMode::Commuting => {
            if ell != 1 {
                return invalid("commuting mode needs a Hamiltonian vector field");
            }
            let mut worst: f64 = 0.0;
            for (mu, phi) in p.moment.components.iter().zip(&p.phi) {
                let a1 = mu.lie_derivative(x_field)?.max_norm(amb)?;
                let a2 = phi.lie_derivative(x_field)?.max_norm(amb)?;
                worst = worst.max(a1 + a2);
            }
            worst
        }
    };

    let d_alpha_n = a.alpha.d().pullback(&p.embed)?;
    let lvl = p.level_samples();
    let mut tangency: f64 = 0.0;
    let mut worst_sample = None;
    let mut well: f64 = 0.0;
    let mut identity: f64 = 0.0;
    let mut max_field: f64 = 0.0;
    let mut max_da: f64 = 0.0;
    let reduced_field = |x: &[f64]| -> Result<(DVector<f64>, f64)> {
        let y = p.embed.eval(x)?;
        let xv = DVector::from_column_slice(x_field.eval(&y)?.coeffs());
        let ji = exterior_power(&p.embed.jacobian_at(x)?, ell);
        let v = pinv_solve(&ji, &xv, DEFAULT_RANK_TOL);
        let defect = (&ji * &v - &xv).amax();
        let jp = exterior_power(&p.quotient.jacobian_at(x)?, ell);
        Ok((jp * v, defect))
    };
    for x in &lvl {
        let (xbar, defect) = reduced_field(x)?;
        if defect > tangency {
            tangency = defect;
            worst_sample = Some(x.clone());
        }
        let b = p.project(x)?;
        let (xbar2, _) = reduced_field(&p.section.eval(&b)?)?;
        well = well.max((&xbar - &xbar2).amax());
        let da = descend_at(p, &d_alpha_n, x)?;
        let xb = MultiVector::new(p.base_chart().dim(), ell, xbar.iter().cloned().collect())?;
        let lhs = crate::exterior::interior_product(&xb, &omega_phi.eval(&b)?)?;
        identity = identity.max(lhs.sub(&da)?.max_abs());
        max_field = max_field.max(xbar.amax());
        max_da = max_da.max(da.max_abs());
    }
    if tangency > tol {
        return Err(Error::Hypothesis(format!(
            "X not tangent to level set: defect {tangency:e} at {:?}",
            worst_sample.unwrap_or_default()
        )));
    }
    Ok(DynamicsReport {
        mode,
        mode_defect,
        tangency_defect: tangency,
        worst_tangency_sample: worst_sample,
        well_definedness: well,
        identity_defect: identity,
        max_reduced_field: max_field,
        max_reduced_d_alpha: max_da,
    })
}

/// A declared cycle `C → B` with its quadrature node counts.
#[derive(Debug, Clone)]
pub struct Cycle {
    pub name: String,
    pub map: ChartMap,
    pub nodes: Vec<usize>,
}

/// `∫_C β̄` where `β̄` is the pointwise descent of `form_n`.
pub fn integrate_descended(p: &ReductionPresentation, form_n: &FormField, cycle: &Cycle) -> Result<f64> {
    let dim_c = cycle.map.source.dim();
    if form_n.degree != dim_c {
        return invalid(format!("cannot integrate a {}-form over the {}-cycle `{}`", form_n.degree, dim_c, cycle.name));
    }
    let grid = QuadratureGrid::for_chart(&cycle.map.source, &cycle.nodes)?;
    grid.integrate_fn(|c| {
        let b = p.base_chart().wrap(&cycle.map.eval(c)?);
        let x = p.section.eval(&b)?;
        let v = descend_at(p, form_n, &x)?;
        let jc = cycle.map.jacobian_at(c)?;
        let vectors: Vec<Vec<f64>> = (0..dim_c).map(|j| jc.column(j).iter().cloned().collect()).collect();
        Ok(v.evaluate(&vectors)?)
    })
}

/// Data for the connection built from a conjugate pair.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    pub sigma: FormField,
    pub eta: FormField,
    /// Transverse fields `λ̲`, one per dual basis element, on `M`.
    pub transverse: Vec<MultiVectorField>,
    pub curvature_ansatz: Option<FormField>,
    pub cycles: Vec<Cycle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernPairing {
    pub cycle: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReport {
    pub conjugacy_failures: usize,
    pub normalization_defect: f64,
    pub invariance_defect: f64,
    pub curvature_descent_residual: f64,
    pub curvature_ansatz_residual: Option<f64>,
    pub chern_pairings: Vec<ChernPairing>,
}

/// `α_λ = ι_{λ̲} σ`, normalized so that `α(ξ̲) = -ξ`; `F = d(i*α)` on `B`.
pub fn connection_and_curvature<R: Rng>(
    p: &ReductionPresentation,
    c: &ConnectionData,
    rng: &mut R,
    tol: f64,
) -> Result<(Vec<FormField>, ConnectionReport)> {
    let g = p.action.algebra.dim;
    if !p.action.algebra.is_abelian() {
        return invalid("connection construction needs a torus action");
    }
    if c.transverse.len() != g {
        return invalid("one transverse field per generator is required");
    }
    let lvl = p.level_samples();
    let mut conjugacy_failures = 0;
    for x in &lvl {
        let y = p.embed.eval(x)?;
        let w = p.ambient.omega.eval(&y)?;
        let u: Vec<MultiVector> = p.action.fields.iter().map(|f| f.eval(&y)).collect::<Result<_>>()?;
        let v: Vec<MultiVector> = c.transverse.iter().map(|f| f.eval(&y)).collect::<Result<_>>()?;
        if !classify_conjugacy(&w, &u, &v, DEFAULT_RANK_TOL)?.is_conjugate() {
            conjugacy_failures += 1;
        }
    }

    let alpha: Vec<FormField> = c.transverse.iter().map(|l| c.sigma.interior(l)).collect::<Result<_>>()?;
    let mut norm: f64 = 0.0;
    let mut inv: f64 = 0.0;
    for x in &lvl {
        let y = p.embed.eval(x)?;
        for (j, a) in alpha.iter().enumerate() {
            let av = a.eval(&y)?;
            for (i, f) in p.action.fields.iter().enumerate() {
                let fv = f.eval(&y)?;
                let val = av.coeffs().iter().zip(fv.coeffs()).map(|(a, b)| a * b).sum::<f64>();
                let expect = if i == j { -1.0 } else { 0.0 };
                norm = norm.max((val - expect).abs());
            }
        }
    }
    let amb_level: Vec<Vec<f64>> = lvl.iter().map(|x| p.embed.eval(x)).collect::<Result<_>>()?;
    for a in &alpha {
        for f in &p.action.fields {
            inv = inv.max(a.lie_derivative(f)?.max_norm(&amb_level)?);
        }
    }
    if norm > tol {
        return Err(Error::Hypothesis(format!("normalization defect: |α(ξ̲) + ξ| = {norm:e}")));
    }

    let mut descent_residual: f64 = 0.0;
    let mut ansatz_residual = None;
    let mut pairings = Vec::new();
    let mut curvature = Vec::new();
    for a in &alpha {
        let f_n = a.pullback(&p.embed)?.d();
        let d = descend(p, &f_n, c.curvature_ansatz.as_ref(), rng)?;
        descent_residual = descent_residual.max(d.descent_residual);
        if let Some(r) = d.ansatz_residual {
            ansatz_residual = Some(ansatz_residual.unwrap_or(0.0f64).max(r));
        }
        for cyc in &c.cycles {
            let v = integrate_descended(p, &f_n, cyc)? / (2.0 * std::f64::consts::PI);
            pairings.push(ChernPairing { cycle: cyc.name.clone(), value: v });
        }
        curvature.push(f_n);
    }
    let report = ConnectionReport {
        conjugacy_failures,
        normalization_defect: norm,
        invariance_defect: inv,
        curvature_descent_residual: descent_residual,
        curvature_ansatz_residual: ansatz_residual,
        chern_pairings: pairings,
    };
    Ok((curvature, report))
}

#[derive(Debug, Clone)]
pub struct EtaDescent {
    pub basic_defect: f64,
    pub descent: Descent,
}

/// `i*η = π*η_φ`; requires `ι_{ξ̲} i*η = 0` on `N`.
pub fn descend_eta<R: Rng>(
    p: &ReductionPresentation,
    eta: &FormField,
    ansatz: Option<&FormField>,
    rng: &mut R,
    tol: f64,
) -> Result<EtaDescent> {
    let lvl = p.level_samples();
    let pulled = eta.pullback(&p.embed)?;
    let mut basic: f64 = 0.0;
    if pulled.degree > 0 {
        for f in &p.level_fields {
            basic = basic.max(pulled.interior(f)?.max_norm(&lvl)?);
        }
    }
    if basic > tol {
        return Err(Error::Hypothesis(format!("η is not basic on the level set: |ι_ξ i*η| = {basic:e}")));
    }
    let descent = descend(p, &pulled, ansatz, rng)?;
    Ok(EtaDescent { basic_defect: basic, descent })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub lambdas: Vec<f64>,
    pub integrals: Vec<f64>,
    pub slope_fit: f64,
    pub slope_richardson: f64,
    pub predicted: f64,
    pub relative_gap: f64,
    /// Largest deviation from the fitted line, relative to the data range.
    pub fit_residual: f64,
    pub linear: bool,
}

/// Slope of `λ ↦ ∫_C ω_λ` against `2π · chern · ∫ η_φ`.
pub fn variation_slope(
    family: &dyn Fn(f64) -> Result<ReductionPresentation>,
    lambdas: &[f64],
    cycle: &Cycle,
    chern: f64,
    eta_integral: f64,
    tol: f64,
) -> Result<VariationReport> {
    if lambdas.len() < 5 || lambdas.len() % 2 == 0 {
        return invalid("variation grid needs an odd number (>= 5) of equally spaced levels");
    }
    let h = lambdas[1] - lambdas[0];
    if lambdas.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-12 * h.abs().max(1.0)) {
        return invalid("variation grid must be equally spaced");
    }
    let mut integrals = Vec::new();
    for &l in lambdas {
        let p = family(l)?;
        integrals.push(integrate_descended(&p, &p.pulled_omega()?, cycle)?);
    }
    let (slope_fit, _, resid) = linear_fit(lambdas, &integrals);
    let range = integrals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - integrals.iter().cloned().fold(f64::INFINITY, f64::min);
    let fit_residual = resid / range.abs().max(f64::MIN_POSITIVE);
    let c = lambdas.len() / 2;
    let d1 = (integrals[c + 1] - integrals[c - 1]) / (2.0 * h);
    let d2 = (integrals[c + 2] - integrals[c - 2]) / (4.0 * h);
    let slope_richardson = (4.0 * d1 - d2) / 3.0;
    let predicted = 2.0 * std::f64::consts::PI * chern * eta_integral;
    let relative_gap = if predicted == 0.0 {
        slope_richardson.abs()
    } else {
        (slope_richardson - predicted).abs() / predicted.abs()
    };
    Ok(VariationReport {
        lambdas: lambdas.to_vec(),
        integrals,
        slope_fit,
        slope_richardson,
        predicted,
        relative_gap,
        fit_residual,
        linear: fit_residual < tol,
    })
}

/// `|π*∂_λ ω_λ - d i*ι_ψ̃ ω|` on `N`, with `∂_λ` by centered differences.
pub fn lemma_variation_identity(
    family: &dyn Fn(f64) -> Result<ReductionPresentation>,
    lambda: f64,
    step: f64,
    psi: &MultiVectorField,
) -> Result<f64> {
    let p0 = family(lambda)?;
    let pp = family(lambda + step)?;
    let pm = family(lambda - step)?;
    let rhs = p0.ambient.omega.interior(psi)?.pullback(&p0.embed)?.d();
    let (wp, wm) = (pp.pulled_omega()?, pm.pulled_omega()?);
    let mut worst: f64 = 0.0;
    for x in p0.level_samples() {
        let b = p0.project(&x)?;
        let vp = descend_at(&pp, &wp, &pp.section.eval(&b)?)?;
        let vm = descend_at(&pm, &wm, &pm.section.eval(&b)?)?;
        let dv = vp.sub(&vm)?.scale(1.0 / (2.0 * step));
        // π* of the base value at x: evaluate on the images of the N basis.
        let jp = p0.quotient.jacobian_at(&x)?;
        let deg = dv.degree();
        let mut coeffs = Vec::new();
        for idx in basis(jp.ncols(), deg) {
            let vectors: Vec<Vec<f64>> = idx.entries().iter().map(|&c| jp.column(c).iter().cloned().collect()).collect();
            coeffs.push(dv.evaluate(&vectors)?);
        }
        let lhs = AlternatingForm::new(jp.ncols(), deg, coeffs)?;
        worst = worst.max(lhs.sub(&rhs.eval(&x)?)?.max_abs());
    }
    Ok(worst)
}

/// Verified level-zero data for the localization comparison.
pub fn reduced_data<R: Rng>(
    p: &ReductionPresentation,
    sigma: &FormField,
    eta: &FormField,
    sigma0: &FormField,
    eta0: &FormField,
    curvature: &FormField,
    nodes: Vec<usize>,
    rng: &mut R,
    tol: f64,
) -> Result<ReducedData> {
    let s = descend(p, &sigma.pullback(&p.embed)?, Some(sigma0), rng)?;
    let e = descend_eta(p, eta, Some(eta0), rng, tol)?;
    for (name, d) in [("sigma", &s), ("eta", &e.descent)] {
        let r = d.ansatz_residual.unwrap_or(0.0).max(d.descent_residual);
        if r > tol {
            return Err(Error::Hypothesis(format!("reduced {name} does not match its ansatz: {r:e}")));
        }
    }
    Ok(ReducedData {
        chart: p.base_chart().clone(),
        sigma0: sigma0.clone(),
        eta0: eta0.clone(),
        curvature: curvature.clone(),
        nodes,
    })
}

/// Difference of two base points with periodic coordinates folded.
pub fn base_distance(chart: &Chart, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(&chart.coords)
        .map(|((x, y), c)| {
            let mut d = (x - y).abs();
            if let CoordKind::Periodic { period } = c.kind {
                d = d.rem_euclid(period);
                d = d.min(period - d);
            }
            d * d
        })
        .sum::<f64>()
        .sqrt()
}
