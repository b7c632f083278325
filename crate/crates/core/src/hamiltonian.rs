//! k-plectic manifolds, Hamiltonian forms and the Leibniz bracket.
//!
//! Convention: `α` is Hamiltonian for `X` when `dα = ι_X ω`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::charts::{Chart, ChartMap, FormField, MultiVectorField};
use crate::error::{invalid, Error, Result};
use crate::exterior::{
    binomial, interior_coeffs, leibniz_det, nondegeneracy_check, pseudo_inverse, solve_flat,
    FlatSolve, MultiVector, DEFAULT_RANK_TOL,
};
use crate::expr::ScalarExpr;

/// Number of quasi-random certificate points per manifold.
pub const CERTIFICATE_POINTS: usize = 100;
/// Fraction of each linear coordinate range kept clear of the chart boundary.
pub const SAMPLE_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegCertificate {
    pub points: usize,
    pub max_d_omega: f64,
    pub min_singular_value: f64,
}

/// A chart with a closed, nondegenerate `(k+1)`-form.
#[derive(Debug, Clone)]
pub struct PlecticManifold {
    pub chart: Chart,
    pub omega: FormField,
    pub k: usize,
    pub certificate: NondegCertificate,
    pub samples: Vec<Vec<f64>>,
}

impl PlecticManifold {
    pub fn new(chart: Chart, omega: FormField, tol: f64) -> Result<Self> {
        let samples = chart.quasi_random_points(CERTIFICATE_POINTS, SAMPLE_MARGIN);
        Self::with_samples(chart, omega, samples, tol)
    }

    pub fn with_samples(chart: Chart, omega: FormField, samples: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if omega.dim != chart.dim() {
            return invalid("ω does not live on this chart");
        }
        if omega.degree < 2 {
            return invalid("a k-plectic form has degree k+1 >= 2");
        }
        if samples.is_empty() {
            return invalid(format!("no interior sample points on chart `{}`", chart.name));
        }
        let max_d_omega = omega.d().max_norm(&samples)?;
        if max_d_omega > tol {
            return Err(Error::Hypothesis(format!("omega_closed: |dω| = {max_d_omega:e}")));
        }
        let mut min_sv = f64::INFINITY;
        for x in &samples {
            let w = omega.eval(x)?;
            match nondegeneracy_check(&w, DEFAULT_RANK_TOL)? {
                crate::exterior::Nondegeneracy::Nondegenerate { singular_values } => {
                    min_sv = min_sv.min(*singular_values.last().unwrap_or(&0.0));
                }
                crate::exterior::Nondegeneracy::Degenerate { .. } => {
                    return Err(Error::Hypothesis(format!("omega_nondegenerate: flat map drops rank at {x:?}")));
                }
            }
        }
        let certificate =
            NondegCertificate { points: samples.len(), max_d_omega, min_singular_value: min_sv };
        let k = omega.degree - 1;
        Ok(Self { chart, omega, k, certificate, samples })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }
}

/// How the field of a Hamiltonian form is stored.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldRepr {
    Symbolic(MultiVectorField),
    /// Solved on demand at each point.
    Pointwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub points: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct HamiltonianForm {
    pub alpha: FormField,
    pub ell: usize,
    pub field: FieldRepr,
    pub residual_report: ResidualReport,
}

impl HamiltonianForm {
    pub fn symbolic_field(&self) -> Result<&MultiVectorField> {
        match &self.field {
            FieldRepr::Symbolic(x) => Ok(x),
            FieldRepr::Pointwise => invalid("Hamiltonian field is only available pointwise"),
        }
    }

    pub fn field_at(&self, m: &PlecticManifold, x: &[f64]) -> Result<MultiVector> {
        match &self.field {
            FieldRepr::Symbolic(f) => f.eval(x),
            FieldRepr::Pointwise => pointwise_solve(m, &self.alpha, self.ell, x),
        }
    }
}

fn pointwise_solve(m: &PlecticManifold, alpha: &FormField, ell: usize, x: &[f64]) -> Result<MultiVector> {
    let w = m.omega.eval(x)?;
    let target = alpha.d().eval(x)?;
    match solve_flat(&w, &target, ell, f64::INFINITY)? {
        FlatSolve::Solved { field, .. } => Ok(field),
        FlatSolve::NoSolution { .. } => unreachable!("infinite tolerance always accepts"),
    }
}

/// Symbolic candidate for the field, when one is available in closed form.
fn symbolic_ansatz(m: &PlecticManifold, d_alpha: &FormField, ell: usize) -> Result<Option<MultiVectorField>> {
    let n = m.dim();
    let rows = binomial(n, m.omega.degree - ell);
    let cols = binomial(n, ell);
    if let Some(w) = m.omega.as_constant() {
        let c = crate::exterior::contraction_matrix(&w, ell)?;
        let p = pseudo_inverse(&c, DEFAULT_RANK_TOL);
        let scale = p.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let coeffs = (0..cols)
            .map(|i| {
                ScalarExpr::sum((0..rows).filter_map(|j| {
                    let v = p[(i, j)];
                    (v.abs() > 1e-13 * scale).then(|| &d_alpha.coeffs[j] * &ScalarExpr::constant(clean(v)))
                }))
            })
            .collect();
        return Ok(Some(MultiVectorField { dim: n, degree: ell, coeffs }));
    }
    if rows == cols && cols <= 4 {
        // Cramer's rule on the symbolic contraction matrix.
        let columns: Vec<Vec<ScalarExpr>> = (0..cols)
            .map(|c| {
                let mut e = vec![ScalarExpr::zero(); cols];
                e[c] = ScalarExpr::one();
                interior_coeffs(n, ell, &e, m.omega.degree, &m.omega.coeffs)
            })
            .collect();
        let matrix = |replace: Option<usize>| -> Vec<Vec<ScalarExpr>> {
            (0..rows)
                .map(|r| {
                    (0..cols)
                        .map(|c| if Some(c) == replace { d_alpha.coeffs[r].clone() } else { columns[c][r].clone() })
                        .collect()
                })
                .collect()
        };
        let det = leibniz_det(&matrix(None));
        let coeffs = (0..cols).map(|i| leibniz_det(&matrix(Some(i))) / det.clone()).collect();
        return Ok(Some(MultiVectorField { dim: n, degree: ell, coeffs }));
    }
    Ok(None)
}

/// Snap pseudo-inverse entries that are within rounding of a simple rational.
fn clean(v: f64) -> f64 {
    for den in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let r = (v * den).round() / den;
        if (r - v).abs() < 1e-12 {
            return r;
        }
    }
    v
}

/// Max residual `|ι_X ω - dα|` over the samples, with the worst point.
fn residual_of(
    m: &PlecticManifold,
    d_alpha: &FormField,
    field: &dyn Fn(&[f64]) -> Result<MultiVector>,
    tol: f64,
) -> Result<(f64, Vec<f64>, bool)> {
    let mut worst = 0.0;
    let mut worst_rel = 0.0;
    let mut at = m.samples[0].clone();
    for x in &m.samples {
        let w = m.omega.eval(x)?;
        let x_field = field(x)?;
        let lhs = crate::exterior::interior_product(&x_field, &w)?;
        let rhs = d_alpha.eval(x)?;
        let r = lhs.sub(&rhs)?.max_abs();
        let rel = r / rhs.max_abs().max(1.0);
        if rel > worst_rel {
            worst_rel = rel;
            worst = r;
            at = x.clone();
        }
    }
    Ok((worst, at, worst_rel <= tol))
}

/// Solve `dα = ι_X ω` for a degree-`ell` field.
pub fn hamiltonian_field(m: &PlecticManifold, alpha: &FormField, ell: usize, tol: f64) -> Result<HamiltonianForm> {
    if ell == 0 || ell > m.k || alpha.degree + ell != m.k {
        return invalid(format!("α must have degree k - ℓ = {} - {ell}", m.k));
    }
    if alpha.dim != m.dim() {
        return invalid("α does not live on this chart");
    }
    let d_alpha = alpha.d();
    if let Some(ansatz) = symbolic_ansatz(m, &d_alpha, ell)? {
        let (residual, point, ok) = residual_of(m, &d_alpha, &|x| Ok(ansatz.eval(x)?), tol)?;
        if ok {
            return Ok(HamiltonianForm {
                alpha: alpha.clone(),
                ell,
                field: FieldRepr::Symbolic(ansatz),
                residual_report: ResidualReport { points: m.samples.len(), max_residual: residual },
            });
        }
        return Err(Error::NotHamiltonian { residual, point });
    }
    let (residual, point, ok) = residual_of(m, &d_alpha, &|x| pointwise_solve(m, alpha, ell, x), tol)?;
    if !ok {
        return Err(Error::NotHamiltonian { residual, point });
    }
    Ok(HamiltonianForm {
        alpha: alpha.clone(),
        ell,
        field: FieldRepr::Pointwise,
        residual_report: ResidualReport { points: m.samples.len(), max_residual: residual },
    })
}

/// Verify a scenario-supplied closed-form field.
pub fn hamiltonian_with_ansatz(
    m: &PlecticManifold,
    alpha: &FormField,
    field: MultiVectorField,
    tol: f64,
) -> Result<HamiltonianForm> {
    let ell = field.degree;
    if alpha.degree + ell != m.k {
        return invalid(format!("α must have degree k - ℓ = {} - {ell}", m.k));
    }
    let d_alpha = alpha.d();
    let (residual, point, ok) = residual_of(m, &d_alpha, &|x| Ok(field.eval(x)?), tol)?;
    if !ok {
        return Err(Error::NotHamiltonian { residual, point });
    }
    Ok(HamiltonianForm {
        alpha: alpha.clone(),
        ell,
        field: FieldRepr::Symbolic(field),
        residual_report: ResidualReport { points: m.samples.len(), max_residual: residual },
    })
}

/// `{α, β} = L_{X_α} β`.
pub fn bracket(a: &HamiltonianForm, b: &HamiltonianForm) -> Result<FormField> {
    if a.ell != 1 || b.ell != 1 {
        return invalid("the bracket is defined on Hamiltonian (k-1)-forms only");
    }
    b.alpha.lie_derivative(a.symbolic_field()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketLawsReport {
    pub jacobi: f64,
    pub antisymmetry: f64,
    pub field_bracket: f64,
}

impl BracketLawsReport {
    pub fn max(&self) -> f64 {
        self.jacobi.max(self.antisymmetry).max(self.field_bracket)
    }
}

pub fn bracket_laws_report(
    m: &PlecticManifold,
    a: &HamiltonianForm,
    b: &HamiltonianForm,
    c: &HamiltonianForm,
    samples: &[Vec<f64>],
) -> Result<BracketLawsReport> {
    let ab = bracket(a, b)?;
    let ba = bracket(b, a)?;
    let bc = bracket(b, c)?;
    let ac = bracket(a, c)?;

    // X_{α,β} is solved from the bracket form itself, independently of [X_α, X_β].
    let h_ab = hamiltonian_field(m, &ab, 1, 1e-6)?;
    let h_bc = hamiltonian_field(m, &bc, 1, 1e-6)?;
    let h_ac = hamiltonian_field(m, &ac, 1, 1e-6)?;
    let a_bc = bracket(a, &h_bc)?;
    let ab_c = bracket(&h_ab, c)?;
    let b_ac = bracket(b, &h_ac)?;
    let jacobi = a_bc.sub(&ab_c)?.sub(&b_ac)?.max_norm(samples)?;

    let xa = a.symbolic_field()?;
    let xb = b.symbolic_field()?;
    let sym = ab.add(&ba)?;
    let antisymmetry = if a.alpha.degree == 0 {
        sym.max_norm(samples)?
    } else {
        let exact = b.alpha.interior(xa)?.add(&a.alpha.interior(xb)?)?.d();
        sym.sub(&exact)?.max_norm(samples)?
    };

    let commutator = xa.lie_bracket(xb)?;
    let field_bracket = m.omega.interior(&commutator)?.sub(&ab.d())?.max_norm(samples)?;
    Ok(BracketLawsReport { jacobi, antisymmetry, field_bracket })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafReport {
    pub omega_split_defect: f64,
    pub d_eta: f64,
    pub tangency_defect: f64,
    /// The leaf is integral to `ker η`; parts ii and iii are skipped otherwise.
    pub integral: bool,
    pub closed_defect: f64,
    pub independence_defect: Option<f64>,
    pub hamiltonian_defect: Option<f64>,
    /// `X_{fη}` is tangent to the leaf at every sample.
    pub field_tangent: Option<bool>,
    pub restricted_defect: Option<f64>,
    pub note: Option<String>,
}

impl LeafReport {
    pub fn passed(&self, tol: f64) -> bool {
        let ok = |v: Option<f64>| v.map_or(true, |v| v < tol);
        self.omega_split_defect < tol
            && self.d_eta < tol
            && self.integral
            && self.closed_defect < tol
            && ok(self.independence_defect)
            && ok(self.hamiltonian_defect)
            && ok(self.restricted_defect)
    }
}

/// Restriction of `ω = σ∧η` to a leaf `j: L → M` of `ker η`.
pub fn leaf_restrict(
    m: &PlecticManifold,
    sigma: &FormField,
    eta: &FormField,
    sigma_prime: Option<&FormField>,
    j: &ChartMap,
    f: &ScalarExpr,
    tol: f64,
) -> Result<LeafReport> {
    if sigma.degree != 2 || eta.degree + 1 != m.k {
        return invalid("leaf_restrict needs σ of degree 2 and η of degree k-1");
    }
    let d_eta = eta.d().max_norm(&m.samples)?;
    let omega_split_defect = m.omega.sub(&sigma.wedge(eta)?)?.max_norm(&m.samples)?;
    let leaf_pts = j.source.quasi_random_points(CERTIFICATE_POINTS, SAMPLE_MARGIN);
    if leaf_pts.is_empty() {
        return invalid("no sample points on the leaf chart");
    }

    let mut tangency_defect: f64 = 0.0;
    for p in &leaf_pts {
        let y = j.eval(p)?;
        let jac = j.jacobian_at(p)?;
        let e = eta.eval(&y)?;
        for a in 0..jac.ncols() {
            let v = MultiVector::vector(jac.column(a).as_slice());
            tangency_defect = tangency_defect.max(crate::exterior::interior_product(&v, &e)?.max_abs());
        }
    }
    let integral = tangency_defect < tol;

    let j_sigma = sigma.pullback(j)?;
    let closed_defect = j_sigma.d().max_norm(&leaf_pts)?;
    let independence_defect = match sigma_prime {
        Some(sp) => Some(sp.pullback(j)?.sub(&j_sigma)?.max_norm(&leaf_pts)?),
        None => None,
    };

    let mut report = LeafReport {
        omega_split_defect,
        d_eta,
        tangency_defect,
        integral,
        closed_defect,
        independence_defect,
        hamiltonian_defect: None,
        field_tangent: None,
        restricted_defect: None,
        note: None,
    };
    if !integral {
        report.note = Some("leaf not integral to ker η".into());
        return Ok(report);
    }

    let h = hamiltonian_field(m, &eta.scale(f), 1, 1e-9)?;
    let jf = FormField::function(j.source.dim(), f.substitute(&j.components));
    let d_jf = jf.d();
    let mut ham_defect: f64 = 0.0;
    let mut tangent = true;
    let mut restricted: f64 = 0.0;
    for p in &leaf_pts {
        let y = j.eval(p)?;
        let x_field = h.field_at(m, &y)?;
        let s = sigma.eval(&y)?;
        let ix_sigma = crate::exterior::interior_product(&x_field, &s)?;
        // j*(ι_X σ) at p is Jᵀ applied to the 1-form.
        let jac = j.jacobian_at(p)?;
        let pulled = jac.transpose() * DVector::from_column_slice(ix_sigma.coeffs());
        let djf = d_jf.eval(p)?;
        let diff = (pulled - DVector::from_column_slice(djf.coeffs())).amax();
        ham_defect = ham_defect.max(diff);

        let xv = DVector::from_column_slice(x_field.coeffs());
        let v = crate::exterior::pinv_solve(&jac, &xv, DEFAULT_RANK_TOL);
        if (&jac * &v - &xv).amax() > tol {
            tangent = false;
            continue;
        }
        let js = j_sigma.eval(p)?;
        let lhs = crate::exterior::interior_product(&MultiVector::vector(v.as_slice()), &js)?;
        restricted = restricted.max(lhs.sub(&djf)?.max_abs());
    }
    report.hamiltonian_defect = Some(ham_defect);
    report.field_tangent = Some(tangent);
    report.restricted_defect = tangent.then_some(restricted);
    Ok(report)
}

/// One chart of a compact manifold together with `f` and `η` written in it.
#[derive(Debug, Clone)]
pub struct CriticalPatch {
    pub manifold: PlecticManifold,
    pub f: ScalarExpr,
    pub eta: FormField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub chart: String,
    pub point: Vec<f64>,
    pub gradient_norm: f64,
    pub field_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub critical_points: Vec<CriticalPoint>,
    pub max_field_norm: f64,
    pub passed: bool,
}

/// Maximum number of critical points kept in a report.
const MAX_REPORTED: usize = 32;

/// Locate critical points of `f` (Newton iteration on `∇f = 0` from sample
/// starts) and verify that the field of `f·η` vanishes there.
///
/// The first patch carries the compactness declaration; the others are the
/// charts covering its declared boundary.
pub fn critical_vanishing_check(patches: &[CriticalPatch], grad_tol: f64, tol: f64) -> Result<CriticalReport> {
    let Some(first) = patches.first() else { return invalid("no charts supplied") };
    if !first.manifold.chart.is_compact() {
        return Err(Error::Hypothesis(format!(
            "compactness: chart `{}` has an uncovered non-periodic coordinate",
            first.manifold.chart.name
        )));
    }
    let mut found: Vec<CriticalPoint> = Vec::new();
    for patch in patches {
        let m = &patch.manifold;
        let n = m.dim();
        let alpha = patch.eta.scale(&patch.f);
        let h = hamiltonian_field(m, &alpha, 1, 1e-9)?;
        let grad: Vec<ScalarExpr> = (0..n).map(|i| patch.f.diff(i)).collect();
        let hess: Vec<Vec<ScalarExpr>> = grad.iter().map(|g| (0..n).map(|j| g.diff(j)).collect()).collect();
        let starts = m.chart.quasi_random_points(64, SAMPLE_MARGIN);
        for s in starts {
            let Some(p) = newton_critical(&grad, &hess, s, &m.chart) else { continue };
            let g = eval_vec(&grad, &p)?;
            let gnorm = g.norm();
            if gnorm > grad_tol || !m.chart.contains(&p) {
                continue;
            }
            if found.iter().any(|c| c.chart == m.chart.name && dist(&c.point, &p) < 1e-6) {
                continue;
            }
            let field_norm = h.field_at(m, &p)?.norm();
            found.push(CriticalPoint { chart: m.chart.name.clone(), point: p, gradient_norm: gnorm, field_norm });
            if found.len() >= MAX_REPORTED {
                break;
            }
        }
    }
    let max_field_norm = found.iter().fold(0.0f64, |a, c| a.max(c.field_norm));
    let passed = !found.is_empty() && max_field_norm < tol;
    Ok(CriticalReport { critical_points: found, max_field_norm, passed })
}

fn eval_vec(v: &[ScalarExpr], x: &[f64]) -> Result<DVector<f64>> {
    let vals: std::result::Result<Vec<f64>, _> = v.iter().map(|e| e.eval(x)).collect();
    Ok(DVector::from_vec(vals?))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn newton_critical(grad: &[ScalarExpr], hess: &[Vec<ScalarExpr>], mut x: Vec<f64>, chart: &Chart) -> Option<Vec<f64>> {
    let n = x.len();
    for _ in 0..50 {
        let g = eval_vec(grad, &x).ok()?;
        if g.amax() < 1e-14 {
            break;
        }
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = hess[i][j].eval(&x).ok()?;
            }
        }
        let step = crate::exterior::pinv_solve(&h, &g, 1e-10);
        if step.amax() == 0.0 {
            break;
        }
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi -= si;
        }
        x = chart.wrap(&x);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::Coordinate;

    fn v(i: usize) -> ScalarExpr {
        ScalarExpr::var(i)
    }

    fn box_chart(n: usize) -> Chart {
        Chart::new("box", (0..n).map(|i| Coordinate::linear(&format!("x{i}"), -1.0, 1.0)).collect())
    }

    fn volume(n: usize) -> FormField {
        let idx: Vec<usize> = (0..n).collect();
        FormField::from_terms(n, n, &[(&idx, ScalarExpr::one())]).unwrap()
    }

    #[test]
    fn symplectic_plane() {
        let m = PlecticManifold::new(box_chart(2), volume(2), 1e-12).unwrap();
        let hx = hamiltonian_field(&m, &FormField::function(2, v(0)), 1, 1e-9).unwrap();
        assert_eq!(hx.field_at(&m, &[0.2, 0.3]).unwrap().coeffs(), &[0.0, -1.0]);
        let hy = hamiltonian_field(&m, &FormField::function(2, v(1)), 1, 1e-9).unwrap();
        let b = bracket(&hx, &hy).unwrap();
        assert_eq!(b.coeffs[0].as_const(), Some(-1.0));
    }

    #[test]
    fn volume_three_space() {
        let m = PlecticManifold::new(box_chart(3), volume(3), 1e-12).unwrap();
        let a = FormField::from_terms(3, 1, &[(&[1], v(0))]).unwrap();
        let h = hamiltonian_field(&m, &a, 1, 1e-9).unwrap();
        let x = h.field_at(&m, &[0.1, 0.2, 0.3]).unwrap();
        assert!(x.close_to(&MultiVector::vector(&[0.0, 0.0, 1.0]), 1e-15));
    }

    #[test]
    fn not_hamiltonian_on_r5() {
        // ω = (dx0∧dx1 + dx2∧dx3)∧dx4; d(x0 dx2) = dx0∧dx2 is outside the image of the flat map
        let s = FormField::from_terms(5, 2, &[(&[0, 1], ScalarExpr::one()), (&[2, 3], ScalarExpr::one())]).unwrap();
        let omega = s.wedge(&FormField::dx(5, 4)).unwrap();
        let m = PlecticManifold::new(box_chart(5), omega, 1e-12).unwrap();
        let bad = FormField::from_terms(5, 1, &[(&[2], v(0))]).unwrap();
        let res = hamiltonian_field(&m, &bad, 1, 1e-9);
        assert!(matches!(res, Err(Error::NotHamiltonian { residual, .. }) if residual > 0.1));
        let good = FormField::from_terms(5, 1, &[(&[4], v(0))]).unwrap();
        assert!(hamiltonian_field(&m, &good, 1, 1e-9).is_ok());
    }

    #[test]
    fn degenerate_form_is_rejected() {
        let omega = FormField::from_terms(3, 2, &[(&[0, 1], ScalarExpr::one())]).unwrap();
        assert!(matches!(PlecticManifold::new(box_chart(3), omega, 1e-12), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn non_closed_form_is_rejected() {
        let omega = FormField::from_terms(4, 2, &[(&[0, 1], v(2)), (&[2, 3], ScalarExpr::one())]).unwrap();
        assert!(matches!(PlecticManifold::new(box_chart(4), omega, 1e-12), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn cramer_path_for_varying_volume() {
        // ω = (1 + x0²) dx0∧dx1∧dx2 is handled symbolically
        let omega = volume(3).scale(&(ScalarExpr::one() + v(0).powi(2)));
        let m = PlecticManifold::new(box_chart(3), omega, 1e-12).unwrap();
        let a = FormField::from_terms(3, 1, &[(&[1], v(0))]).unwrap();
        let h = hamiltonian_field(&m, &a, 1, 1e-9).unwrap();
        assert!(matches!(h.field, FieldRepr::Symbolic(_)));
        let x = h.field_at(&m, &[0.5, 0.0, 0.0]).unwrap();
        assert!((x.coeffs()[2] - 1.0 / 1.25).abs() < 1e-14);
    }
}
