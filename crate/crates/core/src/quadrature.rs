//! Product quadrature on charts and the integral identities built on it:
//! exact stationary phase, Gaussian lemmas, heat-kernel localization.
//!
//! All sums use pairwise summation over a fixed node order, so results are
//! bitwise reproducible.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::actions::LieAlgebraSpec;
use crate::charts::{Chart, ChartMap, CoordKind, FormField};
use crate::error::{invalid, Result};
use crate::expr::ScalarExpr;

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Hermite rule for weight `e^{-x²}` (Golub-Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], PI.sqrt() * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Sum with `O(log n)` error growth.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    GaussLegendre { n: usize, lo: f64, hi: f64, panels: usize },
    Trapezoid { n: usize, lo: f64, period: f64 },
}

impl Rule {
    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        match *self {
            Rule::GaussLegendre { n, lo, hi, panels } => {
                let (x, w) = gauss_legendre(n);
                let h = (hi - lo) / panels as f64;
                let mut xs = Vec::with_capacity(n * panels);
                let mut ws = Vec::with_capacity(n * panels);
                for p in 0..panels {
                    let a = lo + h * p as f64;
                    for (xi, wi) in x.iter().zip(&w) {
                        xs.push(a + 0.5 * h * (xi + 1.0));
                        ws.push(0.5 * h * wi);
                    }
                }
                (xs, ws)
            }
            Rule::Trapezoid { n, lo, period } => {
                let h = period / n as f64;
                ((0..n).map(|i| lo + h * i as f64).collect(), vec![h; n])
            }
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Rule::GaussLegendre { n, panels, .. } => n * panels,
            Rule::Trapezoid { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Tensor-product rule over a chart box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub rules: Vec<Rule>,
}

impl QuadratureGrid {
    /// Gauss-Legendre on linear coordinates, trapezoid on periodic ones.
    pub fn for_chart(chart: &Chart, nodes: &[usize]) -> Result<Self> {
        if nodes.len() != chart.dim() {
            return invalid(format!("grid needs {} node counts, got {}", chart.dim(), nodes.len()));
        }
        if nodes.iter().any(|&n| n == 0) {
            return invalid("node counts must be positive");
        }
        let rules = chart
            .coords
            .iter()
            .zip(nodes)
            .map(|(c, &n)| match c.kind {
                CoordKind::Linear => Rule::GaussLegendre { n, lo: c.lo, hi: c.hi, panels: 1 },
                CoordKind::Periodic { period } => Rule::Trapezoid { n, lo: c.lo, period },
            })
            .collect();
        Ok(Self { rules })
    }

    pub fn total_nodes(&self) -> usize {
        self.rules.iter().map(Rule::len).product()
    }

    /// Every node with its product weight, last coordinate fastest.
    pub fn points(&self) -> Vec<(Vec<f64>, f64)> {
        let axes: Vec<(Vec<f64>, Vec<f64>)> = self.rules.iter().map(Rule::nodes).collect();
        let total = self.total_nodes();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..total {
            let x: Vec<f64> = idx.iter().zip(&axes).map(|(&i, a)| a.0[i]).collect();
            let w: f64 = idx.iter().zip(&axes).map(|(&i, a)| a.1[i]).product();
            out.push((x, w));
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < axes[d].0.len() {
                    break;
                }
                idx[d] = 0;
            }
        }
        out
    }

    pub fn integrate_fn(&self, mut f: impl FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
        let mut vals = Vec::with_capacity(self.total_nodes());
        for (x, w) in self.points() {
            vals.push(w * f(&x)?);
        }
        Ok(pairwise_sum(&vals))
    }

    pub fn integrate_complex(&self, mut f: impl FnMut(&[f64]) -> Result<Complex64>) -> Result<Complex64> {
        let n = self.total_nodes();
        let mut re = Vec::with_capacity(n);
        let mut im = Vec::with_capacity(n);
        for (x, w) in self.points() {
            let v = f(&x)? * w;
            re.push(v.re);
            im.push(v.im);
        }
        Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)))
    }
}

/// `∫ f` for a top-degree form, oriented by the coordinate order.
pub fn integrate(f: &FormField, grid: &QuadratureGrid) -> Result<f64> {
    if f.degree != f.dim || grid.rules.len() != f.dim {
        return invalid(format!("integrate needs a top-degree form on a {}-dimensional grid", grid.rules.len()));
    }
    let c = &f.coeffs[0];
    grid.integrate_fn(|x| Ok(c.eval(x)?))
}

/// Top-degree part of `e^{c σ} ∧ η` as `(form, factor)` with the factor
/// `c^j / j!` already separated; `None` when no power of `σ` fits.
pub fn top_part(sigma: &FormField, eta: &FormField, c: Complex64) -> Result<Option<(FormField, Complex64)>> {
    let n = eta.dim;
    if sigma.degree != 2 || eta.degree > n || (n - eta.degree) % 2 != 0 {
        return Ok(None);
    }
    let j = (n - eta.degree) / 2;
    let mut form = eta.clone();
    let mut factor = Complex64::new(1.0, 0.0);
    for i in 1..=j {
        form = sigma.wedge(&form)?;
        factor = factor * c / i as f64;
    }
    Ok(Some((form, factor)))
}

/// Which reading of `e^{σ}` the stationary phase comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `∫ e^{iν} [e^{σ} η]` against `e_F = Π (i w τ)/2π`.
    Liouville,
    /// `∫ e^{iν} [e^{iσ} η]` against `e_F = Π (w τ)/2π`.
    Literal,
}

impl PhaseConvention {
    fn sigma_factor(self) -> Complex64 {
        match self {
            PhaseConvention::Liouville => Complex64::new(1.0, 0.0),
            PhaseConvention::Literal => Complex64::new(0.0, 1.0),
        }
    }

    /// Euler class of a component with rotation weights `w` at `ξ = τ·e`.
    pub fn euler_class(self, weights: &[f64], tau: f64) -> Complex64 {
        weights.iter().fold(Complex64::new(1.0, 0.0), |acc, w| {
            let base = Complex64::new(w * tau / (2.0 * PI), 0.0);
            acc * match self {
                PhaseConvention::Liouville => base * Complex64::new(0.0, 1.0),
                PhaseConvention::Literal => base,
            }
        })
    }
}

/// A fixed component: its parameter chart mapped into a chart carrying
/// `σ` and `η`, the value of `ν` there and its rotation weights.
#[derive(Debug, Clone)]
pub struct FixedData {
    pub map: ChartMap,
    pub sigma: FormField,
    pub eta: FormField,
    pub nu: Vec<f64>,
    pub weights: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl FixedData {
    /// `∫_F [e^{cσ} η]` over the component.
    pub fn integral(&self, convention: PhaseConvention) -> Result<Complex64> {
        let s = self.sigma.pullback(&self.map)?;
        let e = self.eta.pullback(&self.map)?;
        let Some((form, factor)) = top_part(&s, &e, convention.sigma_factor())? else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let grid = QuadratureGrid::for_chart(&self.map.source, &self.nodes)?;
        Ok(factor * integrate(&form, &grid)?)
    }
}

/// Reduced data at level zero for the localization comparison.
#[derive(Debug, Clone)]
pub struct ReducedData {
    pub chart: Chart,
    pub sigma0: FormField,
    pub eta0: FormField,
    /// Curvature as a scalar 2-form (circle groups).
    pub curvature: FormField,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LocalizationScenario {
    pub name: String,
    pub chart: Chart,
    pub nodes: Vec<usize>,
    pub sigma: FormField,
    pub eta: FormField,
    pub nu: Vec<ScalarExpr>,
    pub algebra: LieAlgebraSpec,
    pub fixed: Vec<FixedData>,
    pub group_volume: f64,
    pub delta: f64,
    pub reduced: Option<ReducedData>,
}

impl LocalizationScenario {
    pub fn grid(&self) -> Result<QuadratureGrid> {
        QuadratureGrid::for_chart(&self.chart, &self.nodes)
    }

    /// Metric norm of the first basis element.
    fn generator_norm(&self) -> f64 {
        self.algebra.inner(&self.algebra.basis_vector(0), &self.algebra.basis_vector(0)).sqrt()
    }

    /// Dual-metric squared norm of `ν(x)`.
    fn nu_norm2(&self, x: &[f64]) -> Result<f64> {
        let l = self.algebra.dim;
        let g = DMatrix::from_fn(l, l, |i, j| self.algebra.metric[i][j]);
        let ginv = g.try_inverse().ok_or_else(|| crate::Error::Invalid("metric is singular".into()))?;
        let v: Vec<f64> = self.nu.iter().map(|e| e.eval(x)).collect::<std::result::Result<_, _>>()?;
        let mut s = 0.0;
        for i in 0..l {
            for j in 0..l {
                s += v[i] * ginv[(i, j)] * v[j];
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: f64,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub relative_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPhaseReport {
    pub convention: PhaseConvention,
    pub points: Vec<PhasePoint>,
    pub max_gap: f64,
    pub nu_spread: f64,
}

/// Compare `∫_M e^{iν_ξ}[e^{σ}η]` with the fixed-point sum at `ξ = τ e/|e|`.
pub fn stationary_phase_compare(
    l: &LocalizationScenario,
    t_values: &[f64],
    convention: PhaseConvention,
) -> Result<StationaryPhaseReport> {
    if l.fixed.is_empty() {
        return invalid("no fixed components located");
    }
    let grid = l.grid()?;
    let Some((top, factor)) = top_part(&l.sigma, &l.eta, convention.sigma_factor())? else {
        return invalid("e^σ η has no top-degree part on this chart");
    };
    let density = &top.coeffs[0];
    let nu = &l.nu[0];
    let scale = 1.0 / l.generator_norm();
    let integrals: Vec<Complex64> = l.fixed.iter().map(|f| f.integral(convention)).collect::<Result<_>>()?;
    let mut points = Vec::new();
    let mut max_gap: f64 = 0.0;
    for &t in t_values {
        let tau = t * scale;
        let lhs = factor
            * grid.integrate_complex(|x| {
                let phase = tau * nu.eval(x)?;
                Ok(Complex64::from_polar(1.0, phase) * density.eval(x)?)
            })?;
        let mut rhs = Complex64::new(0.0, 0.0);
        for (f, int) in l.fixed.iter().zip(&integrals) {
            let e_f = convention.euler_class(&f.weights, tau);
            rhs += Complex64::from_polar(1.0, tau * f.nu[0]) * int / e_f;
        }
        let gap = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
        max_gap = max_gap.max(gap);
        points.push(PhasePoint { t, lhs: [lhs.re, lhs.im], rhs: [rhs.re, rhs.im], relative_gap: gap });
    }
    Ok(StationaryPhaseReport { convention, points, max_gap, nu_spread: 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPart {
    pub lhs: [f64; 2],
    pub rhs: f64,
    pub relative_gap: f64,
    pub half_width: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianReport {
    pub ell: usize,
    pub t: f64,
    pub y: Vec<f64>,
    pub part_i: GaussianPart,
    pub part_ii: GaussianPart,
}

impl GaussianReport {
    pub fn max_gap(&self) -> f64 {
        self.part_i.relative_gap.max(self.part_ii.relative_gap)
    }
}

/// Nodes per Gauss-Legendre panel in [`gaussian_check`].
const GAUSS_PANEL_NODES: usize = 24;

fn adaptive_box(
    ell: usize,
    half_width: f64,
    f: &dyn Fn(&[f64]) -> Complex64,
) -> Result<(Complex64, usize)> {
    let max_panels = match ell {
        1 => 256,
        2 => 32,
        _ => 8,
    };
    let mut panels = 1;
    let mut prev: Option<Complex64> = None;
    loop {
        let rule = Rule::GaussLegendre { n: GAUSS_PANEL_NODES, lo: -half_width, hi: half_width, panels };
        let grid = QuadratureGrid { rules: vec![rule; ell] };
        let v = grid.integrate_complex(|x| Ok(f(x)))?;
        if let Some(p) = prev {
            if (v - p).norm() <= 1e-13 * v.norm().max(1e-300) || panels >= max_panels {
                return Ok((v, panels));
            }
        }
        prev = Some(v);
        panels *= 2;
    }
}

/// Both Gaussian identities on `ℝ^ell` by adaptive product quadrature.
///
/// Part i uses the half-width `8/√t` (the integrand decays like `e^{-t|x|²}`);
/// part ii uses `|y|·4t + 12√t`, which keeps the truncated Gaussian tail
/// below `1e-16`.
pub fn gaussian_check(ell: usize, t: f64, y: &[f64]) -> Result<GaussianReport> {
    if !(t > 0.0) || y.len() != ell || ell == 0 {
        return invalid("gaussian_check needs t > 0 and y of length ell >= 1");
    }
    let y2: f64 = y.iter().map(|v| v * v).sum();
    let ynorm = y2.sqrt();
    let dot = |x: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let norm2 = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>();

    let w1 = 8.0 / t.sqrt();
    let (i1, p1) = adaptive_box(ell, w1, &|x| Complex64::from_polar((-t * norm2(x)).exp(), dot(x)))?;
    let lhs1 = i1 * (t / PI).powf(ell as f64 / 2.0);
    let rhs1 = (-y2 / (4.0 * t)).exp();

    let w2 = ynorm * 4.0 * t + 12.0 * t.sqrt();
    let (i2, p2) = adaptive_box(ell, w2, &|x| Complex64::new((-norm2(x) / (4.0 * t) + dot(x)).exp(), 0.0))?;
    let lhs2 = i2 * (4.0 * PI * t).powf(-(ell as f64) / 2.0);
    let rhs2 = (t * y2).exp();

    let part = |lhs: Complex64, rhs: f64, hw: f64, panels: usize| GaussianPart {
        lhs: [lhs.re, lhs.im],
        rhs,
        relative_gap: (lhs - rhs).norm() / rhs.abs(),
        half_width: hw,
        panels,
    };
    Ok(GaussianReport {
        ell,
        t,
        y: y.to_vec(),
        part_i: part(lhs1, rhs1, w1, p1),
        part_ii: part(lhs2, rhs2, w2, p2),
    })
}

/// `I(t) = ∫_M H(t, ν, 0) [e^{σ} η]` with `H(t,λ,τ) = (4πt)^{-ℓ/2} e^{-|λ-τ|²/4t}`.
pub fn heat_kernel_i(l: &LocalizationScenario, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid("heat kernel needs t > 0");
    }
    let Some((top, factor)) = top_part(&l.sigma, &l.eta, Complex64::new(1.0, 0.0))? else {
        return invalid("e^σ η has no top-degree part on this chart");
    };
    let ell = l.algebra.dim as f64;
    let norm = (4.0 * PI * t).powf(-ell / 2.0);
    let density = &top.coeffs[0];
    let v = l.grid()?.integrate_fn(|x| Ok((-l.nu_norm2(x)? / (4.0 * t)).exp() * density.eval(x)?))?;
    Ok(norm * factor.re * v)
}

/// `|G| ∫_{M_0} e^{σ_0 + t|F|²} η_0`, with `|F|²` the scalar square `F∧F`.
pub fn reduced_side(l: &LocalizationScenario, t: f64) -> Result<f64> {
    let Some(r) = &l.reduced else { return invalid("reduction data at level zero is missing") };
    let n = r.chart.dim();
    let g00 = l.algebra.metric[0][0];
    let f2 = r.curvature.wedge(&r.curvature)?.scale_const(t / g00);
    // e^{σ0 + t F∧F} top part: Σ_{a,b} σ0^a F2^b / (a! b!) ∧ η0 with 2a + 4b + deg η0 = n.
    let mut total = FormField::zero(n, n);
    if r.eta0.degree <= n && (n - r.eta0.degree) % 2 == 0 {
        let half = (n - r.eta0.degree) / 2;
        for b in 0..=half / 2 {
            let a = half - 2 * b;
            let mut form = r.eta0.clone();
            let mut coef = 1.0;
            for i in 1..=a {
                form = r.sigma0.wedge(&form)?;
                coef /= i as f64;
            }
            for i in 1..=b {
                form = f2.wedge(&form)?;
                coef /= i as f64;
            }
            total = total.add(&form.scale_const(coef))?;
        }
    }
    let grid = QuadratureGrid::for_chart(&r.chart, &r.nodes)?;
    Ok(l.group_volume * integrate(&total, &grid)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationPoint {
    pub t: f64,
    pub i_t: f64,
    pub reduced: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub points: Vec<LocalizationPoint>,
    /// Least-squares slope of `log|D(t)|` against `1/t`.
    pub slope: f64,
    pub slope_bound: f64,
    pub slope_ok: bool,
    pub lemma_t: f64,
    pub lemma_double_integral: f64,
    pub lemma_i_t: f64,
    pub lemma_gap: f64,
}

/// Heat-kernel localization against the reduced space, plus the double
/// integral route for `I(t)` at `lemma_t`.
pub fn localization_compare(
    l: &LocalizationScenario,
    t_grid: &[f64],
    fit_tol: f64,
    lemma_t: f64,
    hermite_nodes: usize,
) -> Result<LocalizationReport> {
    if l.algebra.dim != 1 {
        return invalid("localization comparison is implemented for circle groups");
    }
    if t_grid.len() < 2 {
        return invalid("need at least two t values for the decay fit");
    }
    let mut points = Vec::new();
    for &t in t_grid {
        let i_t = heat_kernel_i(l, t)?;
        let reduced = reduced_side(l, t)?;
        points.push(LocalizationPoint { t, i_t, reduced, difference: i_t - reduced });
    }
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.t).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.difference.abs().max(f64::MIN_POSITIVE).ln()).collect();
    let slope = linear_fit(&xs, &ys).0;
    let slope_bound = -l.delta * l.delta / 4.0 * (1.0 - fit_tol);

    let lemma_i_t = heat_kernel_i(l, lemma_t)?;
    let lemma_double_integral = lemma_double_integral(l, lemma_t, hermite_nodes)?;
    Ok(LocalizationReport {
        points,
        slope,
        slope_bound,
        slope_ok: slope <= slope_bound,
        lemma_t,
        lemma_double_integral,
        lemma_i_t,
        lemma_gap: (lemma_double_integral - lemma_i_t).abs() / lemma_i_t.abs(),
    })
}

/// `(2π)^{-1} ∫_𝔤 e^{-t|ξ|²} ∫_M e^{σ + iν_ξ} η dξ` with Gauss-Hermite in `ξ`.
fn lemma_double_integral(l: &LocalizationScenario, t: f64, n: usize) -> Result<f64> {
    let Some((top, factor)) = top_part(&l.sigma, &l.eta, Complex64::new(1.0, 0.0))? else {
        return invalid("e^σ η has no top-degree part on this chart");
    };
    let g = l.algebra.metric[0][0];
    let grid = l.grid()?;
    let density = &top.coeffs[0];
    let nu = &l.nu[0];
    // Cache the manifold nodes once; the ξ-loop only changes the phase.
    let mut nodes = Vec::with_capacity(grid.total_nodes());
    for (x, w) in grid.points() {
        nodes.push((nu.eval(&x)?, w * density.eval(&x)?));
    }
    let (u, wu) = gauss_hermite(n);
    let s = 1.0 / (t * g).sqrt();
    let mut outer = Vec::with_capacity(n);
    for (ui, wi) in u.iter().zip(&wu) {
        let xi = ui * s;
        let inner: Vec<f64> = nodes.iter().map(|(v, w)| w * (xi * v).cos()).collect();
        outer.push(wi * pairwise_sum(&inner));
    }
    // dξ in metric volume: sqrt(g) dξ_coord.
    Ok(factor.re * g.sqrt() * s * pairwise_sum(&outer) / (2.0 * PI))
}

/// Least-squares line `y = a x + b`, returned as `(a, b, max residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let r = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).abs()).fold(0.0, f64::max);
    (a, b, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::Coordinate;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(7);
        assert!(x[3].abs() < 1e-16 && (w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_rule_moments() {
        let (x, w) = gauss_hermite(20);
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((m0 - PI.sqrt()).abs() < 1e-13);
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn constant_integrals() {
        let torus = Chart::new("T2", vec![Coordinate::periodic("a", 0.0, 2.0 * PI), Coordinate::periodic("b", 0.0, 2.0 * PI)]);
        let f = FormField::from_terms(2, 2, &[(&[0, 1], ScalarExpr::one())]).unwrap();
        let g = QuadratureGrid::for_chart(&torus, &[4, 4]).unwrap();
        assert!((integrate(&f, &g).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        let s2 = Chart::new("S2", vec![Coordinate::periodic("theta", 0.0, 2.0 * PI), Coordinate::linear("z", -1.0, 1.0).covered()]);
        let g = QuadratureGrid::for_chart(&s2, &[4, 4]).unwrap();
        assert!((integrate(&f, &g).unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499500.0);
    }

    #[test]
    fn gaussian_trivial_cases() {
        let r = gaussian_check(1, 1.0, &[0.0]).unwrap();
        assert!(r.part_i.relative_gap < 1e-12 && r.part_ii.relative_gap < 1e-12, "{r:?}");
        let r = gaussian_check(2, 0.3, &[1.5, -0.4]).unwrap();
        assert!(r.max_gap() < 1e-8, "{r:?}");
    }

    #[test]
    fn linear_fit_recovers_line() {
        let (a, b, r) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((a - 2.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && r < 1e-15);
    }
}
