//! Lie algebra actions on plectic manifolds and their moment maps.
//!
//! Fundamental fields follow `ξ̲_x = d/dt e^{-tξ}x |_{t=0}`, which makes
//! `ξ ↦ ξ̲` a Lie algebra homomorphism for `[X,Y] = XY - YX`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::charts::{Chart, ChartMap, FormField, MultiVectorField};
use crate::error::{invalid, Error, Result};
use crate::exterior::{pinv_solve, AlternatingForm, MultiVector};
use crate::expr::ScalarExpr;
use crate::hamiltonian::PlecticManifold;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebraSpec {
    pub name: String,
    pub dim: usize,
    /// `c^k_{ij}` stored row-major as `[(i * dim + j) * dim + k]`.
    pub structure_constants: Vec<f64>,
    pub metric: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub ad_invariance: f64,
}

impl LieAlgebraSpec {
    pub fn abelian(dim: usize) -> Self {
        Self {
            name: format!("r{dim}"),
            dim,
            structure_constants: vec![0.0; dim * dim * dim],
            metric: identity(dim),
        }
    }

    /// `[e_i, e_j] = ε_{ijk} e_k` with the standard metric; this is both
    /// `su(2)` in the basis `-iσ_k/2` and `so(3)`.
    pub fn su2() -> Self {
        let mut c = vec![0.0; 27];
        for (i, j, k, s) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)] {
            c[(i * 3 + j) * 3 + k] = s;
            c[(j * 3 + i) * 3 + k] = -s;
        }
        Self { name: "su2".into(), dim: 3, structure_constants: c, metric: identity(3) }
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure_constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += xy * self.c(i, j, k);
                }
            }
        }
        out
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += x[i] * self.metric[i][j] * y[j];
            }
        }
        s
    }

    pub fn is_abelian(&self) -> bool {
        self.structure_constants.iter().all(|c| *c == 0.0)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim];
        e[i] = 1.0;
        e
    }

    /// Antisymmetry, Jacobi and metric ad-invariance on basis triples.
    pub fn validate(&self) -> AlgebraReport {
        let n = self.dim;
        let e: Vec<Vec<f64>> = (0..n).map(|i| self.basis_vector(i)).collect();
        let mut report = AlgebraReport { antisymmetry: 0.0, jacobi: 0.0, ad_invariance: 0.0 };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    report.antisymmetry = report.antisymmetry.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                    let a = self.bracket(&e[i], &self.bracket(&e[j], &e[k]));
                    let b = self.bracket(&e[j], &self.bracket(&e[k], &e[i]));
                    let c = self.bracket(&e[k], &self.bracket(&e[i], &e[j]));
                    let jac = (0..n).map(|m| (a[m] + b[m] + c[m]).abs()).fold(0.0, f64::max);
                    report.jacobi = report.jacobi.max(jac);
                    let inv = self.inner(&self.bracket(&e[i], &e[j]), &e[k]) + self.inner(&e[j], &self.bracket(&e[i], &e[k]));
                    report.ad_invariance = report.ad_invariance.max(inv.abs());
                }
            }
        }
        report
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// A group element acting as a chart self-map, with its `Ad_{g^{-1}}` matrix
/// (columns are images of basis vectors).
#[derive(Debug, Clone)]
pub struct GroupMap {
    pub label: String,
    pub map: ChartMap,
    pub ad_inverse: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct GroupActionSpec {
    pub algebra: LieAlgebraSpec,
    pub fields: Vec<MultiVectorField>,
    pub group_maps: Vec<GroupMap>,
}

impl GroupActionSpec {
    pub fn new(algebra: LieAlgebraSpec, fields: Vec<MultiVectorField>) -> Result<Self> {
        if fields.len() != algebra.dim {
            return invalid(format!("{} fundamental fields for an algebra of dimension {}", fields.len(), algebra.dim));
        }
        if fields.iter().any(|f| f.degree != 1) {
            return invalid("fundamental fields are vector fields");
        }
        Ok(Self { algebra, fields, group_maps: Vec::new() })
    }

    pub fn fundamental_field(&self, xi: &[f64]) -> MultiVectorField {
        let n = self.fields[0].dim;
        let coeffs = (0..n)
            .map(|c| {
                ScalarExpr::sum(
                    xi.iter()
                        .zip(&self.fields)
                        .filter(|(w, _)| **w != 0.0)
                        .map(|(w, f)| &f.coeffs[c] * &ScalarExpr::constant(*w)),
                )
            })
            .collect();
        MultiVectorField { dim: n, degree: 1, coeffs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    /// `|[ξ̲_i, ξ̲_j] - [ξ_i, ξ_j]̲|`.
    pub homomorphism: f64,
    /// `|L_{ξ̲} ω|`.
    pub preserves_omega: f64,
}

pub fn action_check(m: &PlecticManifold, a: &GroupActionSpec, samples: &[Vec<f64>]) -> Result<ActionReport> {
    let n = a.algebra.dim;
    let mut homomorphism: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let lhs = a.fields[i].lie_bracket(&a.fields[j])?;
            let rhs = a.fundamental_field(&a.algebra.bracket(&a.algebra.basis_vector(i), &a.algebra.basis_vector(j)));
            homomorphism = homomorphism.max(lhs.max_difference(&rhs, samples)?);
        }
    }
    let mut preserves_omega: f64 = 0.0;
    for f in &a.fields {
        preserves_omega = preserves_omega.max(m.omega.lie_derivative(f)?.max_norm(samples)?);
    }
    Ok(ActionReport { homomorphism, preserves_omega })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentMapForm {
    /// `μ_ξ` for each basis element.
    pub components: Vec<FormField>,
}

impl MomentMapForm {
    pub fn component(&self, xi: &[f64]) -> FormField {
        let first = &self.components[0];
        let mut out = FormField::zero(first.dim, first.degree);
        for (w, c) in xi.iter().zip(&self.components) {
            if *w != 0.0 {
                out = out.add(&c.scale_const(*w)).expect("components share a shape");
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitFlavor {
    Plain,
    Invariant,
    Basic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitMoment {
    pub nu: Vec<ScalarExpr>,
    pub eta: FormField,
    pub flavor: SplitFlavor,
}

impl SplitMoment {
    pub fn moment(&self) -> MomentMapForm {
        MomentMapForm { components: self.nu.iter().map(|v| self.eta.scale(v)).collect() }
    }

    pub fn nu_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.nu.iter().map(|v| v.eval(x).map_err(Error::from)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub reproduces_moment: f64,
    pub d_eta: f64,
    pub invariance: f64,
    pub basic: f64,
}

impl SplitReport {
    pub fn passed(&self, flavor: SplitFlavor, tol: f64) -> bool {
        let base = self.reproduces_moment < tol && self.d_eta < tol;
        match flavor {
            SplitFlavor::Plain => base,
            SplitFlavor::Invariant => base && self.invariance < tol,
            SplitFlavor::Basic => base && self.invariance < tol && self.basic < tol,
        }
    }
}

pub fn split_check(a: &GroupActionSpec, mu: &MomentMapForm, s: &SplitMoment, samples: &[Vec<f64>]) -> Result<SplitReport> {
    let mut reproduces_moment: f64 = 0.0;
    for (c, split) in mu.components.iter().zip(s.moment().components) {
        reproduces_moment = reproduces_moment.max(c.max_difference(&split, samples)?);
    }
    let d_eta = s.eta.d().max_norm(samples)?;
    let mut invariance: f64 = 0.0;
    let mut basic: f64 = 0.0;
    for f in &a.fields {
        invariance = invariance.max(s.eta.lie_derivative(f)?.max_norm(samples)?);
        // a function is trivially basic
        if s.eta.degree > 0 {
            basic = basic.max(s.eta.interior(f)?.max_norm(samples)?);
        }
    }
    Ok(SplitReport { reproduces_moment, d_eta, invariance, basic })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// `|dμ_ξ - ι_{ξ̲} ω|`.
    pub a: f64,
    /// `|{μ_ξ, μ_ζ} - μ_{[ξ,ζ]}|`.
    pub b: f64,
    /// `|dμ_ξ(X_1..X_k) - (-1)^k ω(X_1..X_k, ξ̲)|` on random vectors.
    pub c: f64,
    /// `|Φ_g^* μ_ξ - μ_{Ad_{g^{-1}} ξ}|`, when group maps are present.
    pub d: Option<f64>,
}

impl MomentReport {
    pub fn max(&self) -> f64 {
        self.a.max(self.b).max(self.c).max(self.d.unwrap_or(0.0))
    }
}

/// The comoment law uses `{μ_ξ, μ_ζ} = L_{ξ̲} μ_ζ`; this is the bracket of
/// Hamiltonian forms once part (a) certifies `ξ̲` as the field of `μ_ξ`.
pub fn moment_check<R: Rng>(
    m: &PlecticManifold,
    a: &GroupActionSpec,
    mu: &MomentMapForm,
    samples: &[Vec<f64>],
    rng: &mut R,
) -> Result<MomentReport> {
    let n = a.algebra.dim;
    if mu.components.len() != n {
        return invalid("moment map needs one component per basis element");
    }
    if mu.components.iter().any(|c| c.degree + 1 != m.k) {
        return invalid("moment components must have degree k-1");
    }
    let mut da: f64 = 0.0;
    for (f, c) in a.fields.iter().zip(&mu.components) {
        da = da.max(c.d().max_difference(&m.omega.interior(f)?, samples)?);
    }

    let mut db: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = mu.components[j].lie_derivative(&a.fields[i])?;
            let br = a.algebra.bracket(&a.algebra.basis_vector(i), &a.algebra.basis_vector(j));
            db = db.max(lhs.max_difference(&mu.component(&br), samples)?);
        }
    }

    let dim = m.dim();
    let k = m.k;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let d_mu: Vec<FormField> = mu.components.iter().map(|c| c.d()).collect();
    let mut dc: f64 = 0.0;
    for x in samples {
        let w = m.omega.eval(x)?;
        let vectors: Vec<Vec<f64>> = (0..k).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        for (f, dm) in a.fields.iter().zip(&d_mu) {
            let xi = f.eval(x)?;
            let lhs = dm.eval(x)?.evaluate(&vectors)?;
            let mut args = vectors.clone();
            args.push(xi.coeffs().to_vec());
            let rhs = w.evaluate(&args)?;
            dc = dc.max((lhs - sign * rhs).abs());
        }
    }

    let d = if a.group_maps.is_empty() {
        None
    } else {
        let mut worst: f64 = 0.0;
        for g in &a.group_maps {
            for i in 0..n {
                let pulled = mu.components[i].pullback(&g.map)?;
                let col: Vec<f64> = (0..n).map(|r| g.ad_inverse[r][i]).collect();
                let pts: Vec<Vec<f64>> =
                    samples.iter().filter(|x| g.map.eval(x).map(|y| g.map.target.contains(&y)).unwrap_or(false)).cloned().collect();
                worst = worst.max(pulled.max_difference(&mu.component(&col), &pts)?);
            }
        }
        Some(worst)
    };
    Ok(MomentReport { a: da, b: db, c: dc, d })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub level_points: usize,
    pub vacuous: bool,
    /// Samples where `|ν - λ| < tol` and `|μ - λη| < tol` disagree.
    pub membership_mismatches: usize,
    pub min_dnu_singular_value: f64,
    pub regular: bool,
    pub min_eta_norm: f64,
    pub min_orbit_singular_value: f64,
    pub locally_free: bool,
    pub non_free_points: Vec<Vec<f64>>,
}

impl LevelSetReport {
    pub fn passed(&self) -> bool {
        self.vacuous || (self.membership_mismatches == 0 && self.regular && self.min_eta_norm > 0.0 && self.locally_free)
    }
}

/// Project `x` onto `{ν = λ}` by Gauss-Newton with minimum-norm steps.
fn project_to_level(chart: &Chart, nu: &[ScalarExpr], grad: &[Vec<ScalarExpr>], lambda: &[f64], mut x: Vec<f64>) -> Option<Vec<f64>> {
    let n = x.len();
    for _ in 0..60 {
        let r: Vec<f64> = nu.iter().zip(lambda).map(|(v, l)| v.eval(&x).map(|v| v - l)).collect::<std::result::Result<_, _>>().ok()?;
        let r = DVector::from_vec(r);
        if r.amax() < 1e-14 {
            return Some(x);
        }
        let mut j = DMatrix::zeros(nu.len(), n);
        for (a, row) in grad.iter().enumerate() {
            for (b, e) in row.iter().enumerate() {
                j[(a, b)] = e.eval(&x).ok()?;
            }
        }
        let step = pinv_solve(&j, &r, 1e-10);
        if step.amax() == 0.0 {
            return None;
        }
        for (xi, s) in x.iter_mut().zip(step.iter()) {
            *xi -= s;
        }
        x = chart.wrap(&x);
    }
    let ok = nu.iter().zip(lambda).all(|(v, l)| v.eval(&x).map(|v| (v - l).abs() < 1e-12).unwrap_or(false));
    ok.then_some(x)
}

fn matrix_of(fields: &[MultiVector]) -> DMatrix<f64> {
    let n = fields.first().map_or(0, |f| f.dim());
    DMatrix::from_fn(n, fields.len(), |r, c| fields[c].coeffs()[r])
}

fn smallest_singular(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Level set `ν^{-1}(λ)` versus `μ^{-1}(λ η)`, regularity and local freeness.
pub fn split_level_set(
    m: &PlecticManifold,
    a: &GroupActionSpec,
    s: &SplitMoment,
    lambda: &[f64],
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<LevelSetReport> {
    let n = m.dim();
    let grad: Vec<Vec<ScalarExpr>> = s.nu.iter().map(|v| (0..n).map(|i| v.diff(i)).collect()).collect();
    let mu = s.moment();
    let target: Vec<FormField> = lambda.iter().map(|l| s.eta.scale_const(*l)).collect();

    let mut level = Vec::new();
    for x in samples {
        if let Some(p) = project_to_level(&m.chart, &s.nu, &grad, lambda, x.clone()) {
            if m.chart.contains(&p) {
                level.push(p);
            }
        }
    }
    let mut mismatches = 0;
    for x in samples.iter().chain(level.iter()) {
        let nu_x = s.nu_at(x)?;
        let on_nu = nu_x.iter().zip(lambda).all(|(v, l)| (v - l).abs() < tol);
        let mut on_mu = true;
        for (c, t) in mu.components.iter().zip(&target) {
            if c.eval(x)?.sub(&t.eval(x)?)?.max_abs() >= tol {
                on_mu = false;
            }
        }
        if on_nu != on_mu {
            mismatches += 1;
        }
    }
    let vacuous = level.is_empty();
    let mut min_dnu = f64::INFINITY;
    let mut min_eta = f64::INFINITY;
    let mut min_orbit = f64::INFINITY;
    let mut non_free = Vec::new();
    for p in &level {
        let j = DMatrix::from_fn(s.nu.len(), n, |r, c| grad[r][c].eval(p).unwrap_or(f64::NAN));
        min_dnu = min_dnu.min(smallest_singular(&j));
        min_eta = min_eta.min(s.eta.eval(p)?.norm());
        let vals: Vec<MultiVector> = a.fields.iter().map(|f| f.eval(p)).collect::<Result<_>>()?;
        let sv = smallest_singular(&matrix_of(&vals));
        min_orbit = min_orbit.min(sv);
        if sv <= tol {
            non_free.push(p.clone());
        }
    }
    if vacuous {
        min_dnu = 0.0;
        min_eta = 0.0;
        min_orbit = 0.0;
    }
    Ok(LevelSetReport {
        level_points: level.len(),
        vacuous,
        membership_mismatches: mismatches,
        min_dnu_singular_value: min_dnu,
        regular: !vacuous && min_dnu > tol,
        min_eta_norm: min_eta,
        min_orbit_singular_value: min_orbit,
        locally_free: non_free.is_empty(),
        non_free_points: non_free,
    })
}

/// Mixed-degree complex form stored as real and imaginary parts per degree.
#[derive(Debug, Clone)]
struct MixedForm {
    re: Vec<FormField>,
    im: Vec<FormField>,
}

impl MixedForm {
    fn zero(n: usize) -> Self {
        Self { re: (0..=n).map(|p| FormField::zero(n, p)).collect(), im: (0..=n).map(|p| FormField::zero(n, p)).collect() }
    }

    /// `d(α) - ι_X(α)`, degree by degree.
    fn equivariant_d(&self, x: &MultiVectorField) -> Result<MixedForm> {
        let n = self.re.len() - 1;
        let mut out = MixedForm::zero(n);
        for p in 0..=n {
            for (src, dst) in [(&self.re, &mut out.re), (&self.im, &mut out.im)] {
                let mut acc = FormField::zero(n, p);
                if p >= 1 {
                    acc = acc.add(&src[p - 1].d())?;
                }
                if p < n {
                    acc = acc.sub(&src[p + 1].interior(x)?)?;
                }
                dst[p] = acc;
            }
        }
        Ok(out)
    }

    fn max_norm(&self, samples: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for f in self.re.iter().chain(&self.im) {
            worst = worst.max(f.max_norm(samples)?);
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivariantClosedReport {
    /// `d_g(e^{z(σ+ν)} η)` truncated at the top degree.
    pub exponential_defect: f64,
    /// `d_g(ω + μ)`.
    pub omega_plus_mu_defect: f64,
}

pub fn equivariant_closed_check(
    m: &PlecticManifold,
    a: &GroupActionSpec,
    sigma: &FormField,
    s: &SplitMoment,
    z: Complex64,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<EquivariantClosedReport> {
    let n = m.dim();
    for f in a.fields.iter().filter(|_| s.eta.degree > 0) {
        let b = s.eta.interior(f)?.max_norm(samples)?;
        if b > tol {
            return Err(Error::Hypothesis(format!("basic_splitting: |ι_ξ η| = {b:e}")));
        }
    }
    let mut exponential_defect: f64 = 0.0;
    let mut omega_plus_mu_defect: f64 = 0.0;
    let mu = s.moment();
    for (i, f) in a.fields.iter().enumerate() {
        let nu = &s.nu[i];
        let e = (nu * &ScalarExpr::constant(z.re)).exp();
        let c = (nu * &ScalarExpr::constant(z.im)).cos();
        let sn = (nu * &ScalarExpr::constant(z.im)).sin();
        let mut form = MixedForm::zero(n);
        let mut power = s.eta.clone();
        let mut wj = Complex64::new(1.0, 0.0);
        let mut j = 0usize;
        while power.degree <= n {
            let re_coef = &e * &(&(&c * &ScalarExpr::constant(wj.re)) - &(&sn * &ScalarExpr::constant(wj.im)));
            let im_coef = &e * &(&(&c * &ScalarExpr::constant(wj.im)) + &(&sn * &ScalarExpr::constant(wj.re)));
            let p = power.degree;
            form.re[p] = form.re[p].add(&power.scale(&re_coef))?;
            form.im[p] = form.im[p].add(&power.scale(&im_coef))?;
            if p + 2 > n {
                break;
            }
            j += 1;
            wj = wj * z / j as f64;
            power = sigma.wedge(&power)?;
        }
        exponential_defect = exponential_defect.max(form.equivariant_d(f)?.max_norm(samples)?);

        let mut om = MixedForm::zero(n);
        om.re[m.omega.degree] = m.omega.clone();
        om.re[mu.components[i].degree] = om.re[mu.components[i].degree].add(&mu.components[i])?;
        omega_plus_mu_defect = omega_plus_mu_defect.max(om.equivariant_d(f)?.max_norm(samples)?);
    }
    Ok(EquivariantClosedReport { exponential_defect, omega_plus_mu_defect })
}

/// `ι_{[X,Y]} η` for random fields `X, Y` in `ker η` (degree-one `η`).
///
/// Each field is a random linear vector field projected onto `ker η`
/// symbolically, so the bracket is exact.
pub fn involutivity_defect<R: Rng>(eta: &FormField, samples: &[Vec<f64>], pairs: usize, rng: &mut R) -> Result<f64> {
    if eta.degree != 1 {
        return invalid("involutivity check needs a 1-form");
    }
    let n = eta.dim;
    let norm2 = ScalarExpr::sum(eta.coeffs.iter().map(|c| c * c));
    let random_field = |rng: &mut R| -> MultiVectorField {
        let v: Vec<ScalarExpr> = (0..n)
            .map(|_| {
                let mut e = ScalarExpr::constant(rng.gen_range(-1.0..1.0));
                for j in 0..n {
                    e = &e + &(&ScalarExpr::var(j) * &ScalarExpr::constant(rng.gen_range(-1.0..1.0)));
                }
                e
            })
            .collect();
        let pairing = ScalarExpr::sum(v.iter().zip(&eta.coeffs).map(|(a, b)| a * b));
        let ratio = &pairing / &norm2;
        MultiVectorField::vector(v.iter().zip(&eta.coeffs).map(|(vi, ei)| vi - &(&ratio * ei)).collect())
    };
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = random_field(rng);
        let y = random_field(rng);
        let br = x.lie_bracket(&y)?;
        worst = worst.max(eta.interior(&br)?.max_norm(samples)?);
    }
    Ok(worst)
}

/// A chart used by the fixed point search, with the action, moment
/// components and transverse symplectic form expressed in it.
#[derive(Debug, Clone)]
pub struct FixedPatch {
    pub chart: Chart,
    pub fields: Vec<MultiVectorField>,
    pub nu: Vec<ScalarExpr>,
    pub sigma: FormField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedComponent {
    pub chart: String,
    pub points: Vec<Vec<f64>>,
    /// Rotation weights of each torus generator on the transverse plane.
    pub weights: Vec<f64>,
    pub weights_integral: bool,
    pub nu: Vec<f64>,
    pub nu_spread: f64,
}

/// Zero set of all fundamental fields, grouped into connected components.
pub fn fixed_point_locator(patches: &[FixedPatch], algebra: &LieAlgebraSpec, starts: usize, tol: f64) -> Result<Vec<FixedComponent>> {
    if !algebra.is_abelian() {
        return invalid("fixed point search is for torus actions");
    }
    let mut out = Vec::new();
    for patch in patches {
        let n = patch.chart.dim();
        let comps: Vec<ScalarExpr> = patch.fields.iter().flat_map(|f| f.coeffs.iter().cloned()).collect();
        let grad: Vec<Vec<ScalarExpr>> = comps.iter().map(|c| (0..n).map(|i| c.diff(i)).collect()).collect();
        let zeros = vec![0.0; comps.len()];
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for s in patch.chart.quasi_random_points(starts, 0.0) {
            let Some(p) = project_to_level(&patch.chart, &comps, &grad, &zeros, s) else { continue };
            if !patch.chart.contains(&p) {
                continue;
            }
            let small = patch.fields.iter().all(|f| f.eval(&p).map(|v| v.norm() < tol).unwrap_or(false));
            if small {
                pts.push(p);
            }
        }
        for group in cluster(&patch.chart, pts, 0.5) {
            out.push(describe_component(patch, group)?);
        }
    }
    Ok(out)
}

fn periodic_dist(chart: &Chart, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(&chart.coords)
        .map(|((x, y), c)| {
            let mut d = (x - y).abs();
            if let crate::charts::CoordKind::Periodic { period } = c.kind {
                d = d.rem_euclid(period);
                d = d.min(period - d);
            }
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Single-linkage clustering; the lowest-index point seeds each component.
fn cluster(chart: &Chart, pts: Vec<Vec<f64>>, radius: f64) -> Vec<Vec<Vec<f64>>> {
    let mut label: Vec<Option<usize>> = vec![None; pts.len()];
    let mut groups = 0;
    for i in 0..pts.len() {
        if label[i].is_some() {
            continue;
        }
        label[i] = Some(groups);
        let mut stack = vec![i];
        while let Some(a) = stack.pop() {
            for b in 0..pts.len() {
                if label[b].is_none() && periodic_dist(chart, &pts[a], &pts[b]) < radius {
                    label[b] = Some(groups);
                    stack.push(b);
                }
            }
        }
        groups += 1;
    }
    (0..groups)
        .map(|g| pts.iter().zip(&label).filter(|(_, l)| **l == Some(g)).map(|(p, _)| p.clone()).collect())
        .collect()
}

fn describe_component(patch: &FixedPatch, points: Vec<Vec<f64>>) -> Result<FixedComponent> {
    let p = &points[0];
    let n = patch.chart.dim();
    let mut weights = Vec::new();
    for f in &patch.fields {
        let jac = DMatrix::from_fn(n, n, |r, c| f.coeffs[r].diff(c).eval(p).unwrap_or(f64::NAN));
        weights.push(transverse_weight(&jac, &patch.sigma.eval(p)?)?);
    }
    let weights_integral = weights.iter().all(|w| (w - w.round()).abs() < 0.01);
    let mut nu = Vec::new();
    let mut spread: f64 = 0.0;
    for v in &patch.nu {
        let vals: Vec<f64> = points.iter().map(|q| v.eval(q)).collect::<std::result::Result<_, _>>()?;
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        spread = spread.max(hi - lo);
        nu.push(vals[0]);
    }
    Ok(FixedComponent { chart: patch.chart.name.clone(), points, weights, weights_integral, nu, nu_spread: spread })
}

/// Signed rotation weight of a linearized generator on its 2D transverse block:
/// `w = sign(σ_ab) sign(J_ba) sqrt(det J_T)`, so `-v∂u + u∂v` has weight `+1`
/// against `du∧dv`.
fn transverse_weight(jac: &DMatrix<f64>, sigma: &AlternatingForm) -> Result<f64> {
    let n = jac.nrows();
    let active: Vec<usize> = (0..n).filter(|&i| (0..n).any(|j| jac[(i, j)].abs() > 1e-9 || jac[(j, i)].abs() > 1e-9)).collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    if active.len() != 2 {
        return invalid(format!("transverse block of dimension {} (only rotation planes are supported)", active.len()));
    }
    let (a, b) = (active[0], active[1]);
    let det = jac[(a, a)] * jac[(b, b)] - jac[(a, b)] * jac[(b, a)];
    if det <= 0.0 {
        return invalid("linearized generator is not a rotation");
    }
    let s = sigma.coeff(&crate::exterior::MultiIndex::new(vec![a, b])?);
    Ok(s.signum() * jac[(b, a)].signum() * det.sqrt())
}

/// Smallest singular value of the orbit map at `x`.
pub fn orbit_rank_margin(a: &GroupActionSpec, x: &[f64]) -> Result<f64> {
    let vals: Vec<MultiVector> = a.fields.iter().map(|f| f.eval(x)).collect::<Result<_>>()?;
    Ok(smallest_singular(&matrix_of(&vals)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_algebra_is_valid() {
        let r = LieAlgebraSpec::su2().validate();
        assert!(r.antisymmetry == 0.0 && r.jacobi < 1e-15 && r.ad_invariance < 1e-15);
        let g = LieAlgebraSpec::su2();
        assert_eq!(g.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_fundamental_field() {
        let f = MultiVectorField::partial(2, 0);
        let a = GroupActionSpec::new(LieAlgebraSpec::abelian(1), vec![f]).unwrap();
        assert!(a.fundamental_field(&[0.0]).is_identically_zero());
    }

    #[test]
    fn weight_of_standard_rotation() {
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let up = AlternatingForm::from_terms(2, 2, &[(&[0, 1], 1.0)]).unwrap();
        let down = AlternatingForm::from_terms(2, 2, &[(&[0, 1], -1.0)]).unwrap();
        assert_eq!(transverse_weight(&j, &up).unwrap(), 1.0);
        assert_eq!(transverse_weight(&j, &down).unwrap(), -1.0);
        let j2 = j.scale(2.0);
        assert!((transverse_weight(&j2, &up).unwrap() - 2.0).abs() < 1e-15);
    }
}
