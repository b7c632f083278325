//! Coordinate charts and symbolic form / multivector fields on them.
//!
//! Fields store one [`ScalarExpr`] per basis multi-index (colex order, see
//! [`crate::exterior`]). All calculus is exact on the expression trees;
//! equality of two fields is decided by evaluation at sample points.
//!
//! The Lie derivative along a degree-`k` multivector field is
//! `L_X = d ι_X - (-1)^k ι_X d`, which is Cartan's formula for `k = 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exterior::{
    binomial, interior_coeffs, leibniz_det, wedge_coeffs, AlternatingForm, Coeff, MultiIndex, MultiVector,
};
use crate::expr::ScalarExpr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordKind {
    Linear,
    Periodic { period: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub kind: CoordKind,
    /// The interval endpoints are covered by another chart of the scenario.
    pub covered: bool,
}

impl Coordinate {
    pub fn linear(name: &str, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), lo, hi, kind: CoordKind::Linear, covered: false }
    }

    pub fn periodic(name: &str, lo: f64, period: f64) -> Self {
        Self { name: name.into(), lo, hi: lo + period, kind: CoordKind::Periodic { period }, covered: false }
    }

    pub fn covered(mut self) -> Self {
        self.covered = true;
        self
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, CoordKind::Periodic { .. })
    }
}

/// A declared domain restriction: the chart interior requires `expr > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub name: String,
    pub expr: ScalarExpr,
}

/// Named coordinate box with optional guards and transition maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub name: String,
    pub coords: Vec<Coordinate>,
    pub guards: Vec<Guard>,
    /// `(target chart name, components)` pairs, defined on declared overlaps.
    pub transitions: Vec<(String, Vec<ScalarExpr>)>,
}

impl Chart {
    pub fn new(name: &str, coords: Vec<Coordinate>) -> Self {
        Self { name: name.into(), coords, guards: Vec::new(), transitions: Vec::new() }
    }

    pub fn with_guard(mut self, name: &str, expr: ScalarExpr) -> Self {
        self.guards.push(Guard { name: name.into(), expr });
        self
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Periodic coordinates or declared coverage on every axis.
    pub fn is_compact(&self) -> bool {
        self.coords.iter().all(|c| c.is_periodic() || c.covered)
    }

    /// Wrap periodic coordinates into their fundamental interval.
    pub fn wrap(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.coords)
            .map(|(&v, c)| match c.kind {
                CoordKind::Periodic { period } => c.lo + (v - c.lo).rem_euclid(period),
                CoordKind::Linear => v,
            })
            .collect()
    }

    /// First violated guard or box bound, if any.
    pub fn violation(&self, x: &[f64]) -> Option<String> {
        for (v, c) in x.iter().zip(&self.coords) {
            if c.kind == CoordKind::Linear && !(*v >= c.lo && *v <= c.hi) {
                return Some(format!("coordinate `{}` = {v} outside [{}, {}]", c.name, c.lo, c.hi));
            }
        }
        for g in &self.guards {
            match g.expr.eval(x) {
                Ok(v) if v > 0.0 => {}
                _ => return Some(format!("guard `{}`", g.name)),
            }
        }
        None
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.violation(x).is_none()
    }

    /// Map a unit-cube point into the box, keeping `margin` (fraction of the
    /// width) away from linear endpoints.
    pub fn from_unit(&self, u: &[f64], margin: f64) -> Vec<f64> {
        u.iter()
            .zip(&self.coords)
            .map(|(&t, c)| match c.kind {
                CoordKind::Linear => {
                    let w = c.hi - c.lo;
                    c.lo + w * (margin + (1.0 - 2.0 * margin) * t)
                }
                CoordKind::Periodic { period } => c.lo + period * t,
            })
            .collect()
    }

    /// Deterministic quasi-random interior points (Halton sequence).
    pub fn quasi_random_points(&self, count: usize, margin: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        let mut index = 1usize;
        let limit = count * 1000 + 1000;
        while out.len() < count && index < limit {
            let u: Vec<f64> = (0..self.dim()).map(|d| halton(index, PRIMES[d % PRIMES.len()])).collect();
            index += 1;
            let x = self.from_unit(&u, margin);
            if self.contains(&x) && self.evaluates_cleanly(&x) {
                out.push(x);
            }
        }
        out
    }

    /// Random interior points from the supplied generator.
    pub fn random_points<R: Rng>(&self, rng: &mut R, count: usize, margin: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        let mut tries = 0;
        while out.len() < count && tries < count * 1000 + 1000 {
            tries += 1;
            let u: Vec<f64> = (0..self.dim()).map(|_| rng.gen::<f64>()).collect();
            let x = self.from_unit(&u, margin);
            if self.contains(&x) && self.evaluates_cleanly(&x) {
                out.push(x);
            }
        }
        out
    }

    fn evaluates_cleanly(&self, x: &[f64]) -> bool {
        self.transitions.iter().all(|(_, comps)| comps.iter().all(|c| c.eval(x).is_ok()))
    }
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Smooth map between charts given by one expression per target coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartMap {
    pub source: Chart,
    pub target: Chart,
    pub components: Vec<ScalarExpr>,
}

impl ChartMap {
    pub fn new(source: Chart, target: Chart, components: Vec<ScalarExpr>) -> Result<Self> {
        if components.len() != target.dim() {
            return invalid(format!(
                "map into `{}` needs {} components, got {}",
                target.name,
                target.dim(),
                components.len()
            ));
        }
        if let Some(v) = components.iter().filter_map(|c| c.max_var()).max() {
            if v >= source.dim() {
                return invalid(format!("component references x{v} beyond source dimension {}", source.dim()));
            }
        }
        Ok(Self { source, target, components })
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(x).map_err(Error::from)).collect()
    }

    /// `J[i][j] = ∂ y_i / ∂ x_j`.
    pub fn jacobian(&self) -> Vec<Vec<ScalarExpr>> {
        self.components.iter().map(|c| (0..self.source.dim()).map(|j| c.diff(j)).collect()).collect()
    }

    pub fn jacobian_at(&self, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        let j = self.jacobian();
        let mut m = nalgebra::DMatrix::zeros(self.target.dim(), self.source.dim());
        for (r, row) in j.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                m[(r, c)] = e.eval(x)?;
            }
        }
        Ok(m)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChartMap) -> Result<ChartMap> {
        if other.source.dim() != self.target.dim() {
            return invalid("composition dimension mismatch");
        }
        let comps = other.components.iter().map(|c| c.substitute(&self.components)).collect();
        ChartMap::new(self.source.clone(), other.target.clone(), comps)
    }

    /// Smallest `|det J|` over the samples (square maps only).
    pub fn min_jacobian_det(&self, samples: &[Vec<f64>]) -> Result<f64> {
        if self.source.dim() != self.target.dim() {
            return invalid("Jacobian determinant needs a square map");
        }
        let mut worst = f64::INFINITY;
        for x in samples {
            worst = worst.min(self.jacobian_at(x)?.determinant().abs());
        }
        Ok(worst)
    }
}

/// Degree-`p` differential form on an `n`-dimensional chart.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<ScalarExpr>,
}

/// Degree-`l` multivector field on an `n`-dimensional chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVectorField {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<ScalarExpr>,
}

macro_rules! field_common {
    ($name:ident, $pointwise:ident) => {
        impl $name {
            pub fn zero(dim: usize, degree: usize) -> Self {
                Self { dim, degree, coeffs: vec![ScalarExpr::zero(); binomial(dim, degree)] }
            }

            pub fn new(dim: usize, degree: usize, coeffs: Vec<ScalarExpr>) -> Result<Self> {
                if coeffs.len() != binomial(dim, degree) {
                    return invalid(format!(
                        "expected {} coefficients, got {}",
                        binomial(dim, degree),
                        coeffs.len()
                    ));
                }
                Ok(Self { dim, degree, coeffs })
            }

            /// Sum of `expr · basis(indices)`; indices may be unsorted.
            pub fn from_terms(dim: usize, degree: usize, terms: &[(&[usize], ScalarExpr)]) -> Result<Self> {
                let mut out = Self::zero(dim, degree);
                for (idx, e) in terms {
                    if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                        return invalid(format!("bad index {idx:?} for degree {degree} on dimension {dim}"));
                    }
                    let Some(sign) = crate::exterior::sort_sign(idx) else { continue };
                    let mut sorted = idx.to_vec();
                    sorted.sort_unstable();
                    let r = MultiIndex::new(sorted)?.rank();
                    out.coeffs[r] = &out.coeffs[r] + &e.signed(sign);
                }
                Ok(out)
            }

            /// Constant-coefficient field.
            pub fn constant(value: &$pointwise) -> Self {
                Self {
                    dim: value.dim(),
                    degree: value.degree(),
                    coeffs: value.coeffs().iter().map(|&c| ScalarExpr::constant(c)).collect(),
                }
            }

            pub fn eval(&self, x: &[f64]) -> Result<$pointwise> {
                let c: std::result::Result<Vec<f64>, _> = self.coeffs.iter().map(|e| e.eval(x)).collect();
                Ok($pointwise::new(self.dim, self.degree, c?)?)
            }

            /// Constant coefficients, when every coefficient is a literal.
            pub fn as_constant(&self) -> Option<$pointwise> {
                let c: Option<Vec<f64>> = self.coeffs.iter().map(|e| e.as_const()).collect();
                c.and_then(|c| $pointwise::new(self.dim, self.degree, c).ok())
            }

            pub fn coeff(&self, idx: &[usize]) -> ScalarExpr {
                match MultiIndex::new(idx.to_vec()) {
                    Ok(m) if m.degree() == self.degree && m.fits(self.dim) => self.coeffs[m.rank()].clone(),
                    _ => ScalarExpr::zero(),
                }
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.check_same(other)?;
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
                Ok(Self { dim: self.dim, degree: self.degree, coeffs })
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.check_same(other)?;
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
                Ok(Self { dim: self.dim, degree: self.degree, coeffs })
            }

            /// Multiply every coefficient by a scalar function.
            pub fn scale(&self, f: &ScalarExpr) -> Self {
                Self { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * f).collect() }
            }

            pub fn scale_const(&self, s: f64) -> Self {
                self.scale(&ScalarExpr::constant(s))
            }

            fn check_same(&self, other: &Self) -> Result<()> {
                if self.dim != other.dim || self.degree != other.degree {
                    return invalid(format!(
                        "shape mismatch: (dim {}, degree {}) vs (dim {}, degree {})",
                        self.dim, self.degree, other.dim, other.degree
                    ));
                }
                Ok(())
            }

            /// Largest coefficient-wise difference over the sample points.
            pub fn max_difference(&self, other: &Self, points: &[Vec<f64>]) -> Result<f64> {
                let diff = self.sub(other)?;
                diff.max_norm(points)
            }

            /// Largest coefficient magnitude over the sample points.
            pub fn max_norm(&self, points: &[Vec<f64>]) -> Result<f64> {
                let mut worst: f64 = 0.0;
                if self.coeffs.is_empty() {
                    return Ok(worst);
                }
                for x in points {
                    worst = worst.max(self.eval(x)?.max_abs());
                }
                Ok(worst)
            }

            pub fn is_identically_zero(&self) -> bool {
                self.coeffs.iter().all(|c| c.is_zero())
            }
        }
    };
}

field_common!(FormField, AlternatingForm);
field_common!(MultiVectorField, MultiVector);

impl FormField {
    /// A function viewed as a 0-form.
    pub fn function(dim: usize, f: ScalarExpr) -> Self {
        Self { dim, degree: 0, coeffs: vec![f] }
    }

    /// Coordinate differential `dx_i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        let mut coeffs = vec![ScalarExpr::zero(); dim];
        coeffs[i] = ScalarExpr::one();
        Self { dim, degree: 1, coeffs }
    }

    /// Exterior derivative, term by term on the coefficient trees.
    pub fn d(&self) -> FormField {
        let n = self.dim;
        let p = self.degree;
        let mut out = FormField::zero(n, p + 1);
        if p + 1 > n {
            return out;
        }
        for (r, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = MultiIndex::unrank(p, r);
            for i in 0..n {
                if idx.contains(i) {
                    continue;
                }
                let dc = c.diff(i);
                if dc.is_zero() {
                    continue;
                }
                // dx_i ∧ dx_I = (-1)^{#{j in I : j < i}} dx_{I ∪ i}
                let before = idx.entries().iter().filter(|&&j| j < i).count();
                let mut merged = idx.entries().to_vec();
                merged.insert(before, i);
                let rk = MultiIndex::new(merged).expect("sorted").rank();
                let term = if before % 2 == 0 { dc } else { -dc };
                out.coeffs[rk] = &out.coeffs[rk] + &term;
            }
        }
        out
    }

    pub fn wedge(&self, other: &FormField) -> Result<FormField> {
        if self.dim != other.dim {
            return invalid("wedge of fields on different charts");
        }
        let n = self.dim;
        let degree = self.degree + other.degree;
        Ok(FormField { dim: n, degree, coeffs: wedge_coeffs(n, self.degree, &self.coeffs, other.degree, &other.coeffs) })
    }

    /// `ι_X f`; a multivector of larger degree than the form yields zero of
    /// formal degree 0 only when the degrees match, otherwise an error.
    pub fn interior(&self, x: &MultiVectorField) -> Result<FormField> {
        if self.dim != x.dim {
            return invalid("interior product across different charts");
        }
        if x.degree > self.degree {
            return invalid(format!("cannot contract degree {} into degree {}", x.degree, self.degree));
        }
        Ok(FormField {
            dim: self.dim,
            degree: self.degree - x.degree,
            coeffs: interior_coeffs(self.dim, x.degree, &x.coeffs, self.degree, &self.coeffs),
        })
    }

    /// Pull back along `m: source → target`; `self` lives on the target.
    pub fn pullback(&self, m: &ChartMap) -> Result<FormField> {
        if self.dim != m.target.dim() {
            return invalid("pullback: form is not on the map's target chart");
        }
        let src = m.source.dim();
        let p = self.degree;
        let mut out = FormField::zero(src, p);
        if p > src {
            return Ok(out);
        }
        let jac = m.jacobian();
        let subs: Vec<ScalarExpr> = self.coeffs.iter().map(|c| c.substitute(&m.components)).collect();
        for (rk, c) in subs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = MultiIndex::unrank(p, rk);
            for (rj, slot) in out.coeffs.iter_mut().enumerate() {
                let jdx = MultiIndex::unrank(p, rj);
                let minor = if p == 0 {
                    ScalarExpr::one()
                } else {
                    let rows: Vec<Vec<ScalarExpr>> = k
                        .entries()
                        .iter()
                        .map(|&a| jdx.entries().iter().map(|&b| jac[a][b].clone()).collect())
                        .collect();
                    leibniz_det(&rows)
                };
                if minor.is_zero() {
                    continue;
                }
                *slot = &*slot + &(c * &minor);
            }
        }
        Ok(out)
    }

    /// `L_X f = d ι_X f - (-1)^k ι_X d f` with `k = deg X`.
    pub fn lie_derivative(&self, x: &MultiVectorField) -> Result<FormField> {
        let k = x.degree;
        if k > self.degree + 1 {
            return invalid(format!("Lie derivative needs deg X <= deg f + 1 ({k} > {})", self.degree + 1));
        }
        let out_degree = self.degree + 1 - k;
        let first = if k <= self.degree { self.interior(x)?.d() } else { FormField::zero(self.dim, out_degree) };
        let second = self.d().interior(x)?;
        if k % 2 == 0 {
            first.sub(&second)
        } else {
            first.add(&second)
        }
    }
}

impl MultiVectorField {
    /// Vector field from components.
    pub fn vector(components: Vec<ScalarExpr>) -> Self {
        Self { dim: components.len(), degree: 1, coeffs: components }
    }

    /// Coordinate field `∂_i`.
    pub fn partial(dim: usize, i: usize) -> Self {
        let mut c = vec![ScalarExpr::zero(); dim];
        c[i] = ScalarExpr::one();
        Self::vector(c)
    }

    pub fn wedge(&self, other: &MultiVectorField) -> Result<MultiVectorField> {
        if self.dim != other.dim {
            return invalid("wedge of fields on different charts");
        }
        let n = self.dim;
        Ok(MultiVectorField {
            dim: n,
            degree: self.degree + other.degree,
            coeffs: wedge_coeffs(n, self.degree, &self.coeffs, other.degree, &other.coeffs),
        })
    }

    /// Derivative of a function along a vector field.
    pub fn apply(&self, f: &ScalarExpr) -> Result<ScalarExpr> {
        if self.degree != 1 {
            return invalid("only vector fields act on functions");
        }
        Ok(ScalarExpr::sum(self.coeffs.iter().enumerate().map(|(j, c)| c * &f.diff(j))))
    }

    /// Push forward along `m` at the level of expressions: components are
    /// `J · X` written in source coordinates.
    pub fn pushforward_components(&self, m: &ChartMap) -> Result<Vec<ScalarExpr>> {
        if self.degree != 1 || self.dim != m.source.dim() {
            return invalid("pushforward needs a vector field on the source chart");
        }
        let jac = m.jacobian();
        Ok(jac
            .iter()
            .map(|row| ScalarExpr::sum(row.iter().zip(&self.coeffs).map(|(j, c)| j * c)))
            .collect())
    }

    /// Lie bracket of two vector fields.
    pub fn lie_bracket(&self, other: &MultiVectorField) -> Result<MultiVectorField> {
        if self.degree != 1 || other.degree != 1 || self.dim != other.dim {
            return invalid("Lie bracket needs two vector fields on one chart");
        }
        Ok(MultiVectorField::vector(vector_bracket(&self.coeffs, &other.coeffs)))
    }

    /// Schouten bracket, degree `deg X + deg Y - 1`.
    ///
    /// Each field is expanded over coordinate multivectors, every term is
    /// written as `(c ∂_{i1}) ∧ ∂_{i2} ∧ ... ` and the decomposable rule
    /// `[X_1∧...∧X_k, Y_1∧...∧Y_l] = Σ (-1)^{i+j} [X_i,Y_j] ∧ X̂_i ∧ Ŷ_j`
    /// (remaining factors in their original order) is applied.
    pub fn schouten(&self, other: &MultiVectorField) -> Result<MultiVectorField> {
        if self.dim != other.dim {
            return invalid("Schouten bracket across different charts");
        }
        if self.degree == 0 || other.degree == 0 {
            return invalid("Schouten bracket is implemented for degrees >= 1");
        }
        let n = self.dim;
        let out_degree = self.degree + other.degree - 1;
        let mut out = MultiVectorField::zero(n, out_degree);
        for (ra, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let xs = decomposable_factors(n, a, &MultiIndex::unrank(self.degree, ra));
            for (rb, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ys = decomposable_factors(n, b, &MultiIndex::unrank(other.degree, rb));
                let term = schouten_decomposable(n, &xs, &ys);
                out = out.add(&term)?;
            }
        }
        Ok(out)
    }
}

fn vector_bracket(v: &[ScalarExpr], w: &[ScalarExpr]) -> Vec<ScalarExpr> {
    let n = v.len();
    (0..n)
        .map(|i| {
            ScalarExpr::sum((0..n).flat_map(|j| {
                [&v[j] * &w[i].diff(j), -(&w[j] * &v[i].diff(j))]
            }))
        })
        .collect()
}

fn decomposable_factors(n: usize, coeff: &ScalarExpr, idx: &MultiIndex) -> Vec<Vec<ScalarExpr>> {
    idx.entries()
        .iter()
        .enumerate()
        .map(|(pos, &axis)| {
            let mut v = vec![ScalarExpr::zero(); n];
            v[axis] = if pos == 0 { coeff.clone() } else { ScalarExpr::one() };
            v
        })
        .collect()
}

/// The displayed sum for decomposable inputs given as lists of vector fields.
pub fn schouten_decomposable(n: usize, xs: &[Vec<ScalarExpr>], ys: &[Vec<ScalarExpr>]) -> MultiVectorField {
    let degree = xs.len() + ys.len() - 1;
    let mut out = MultiVectorField::zero(n, degree);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let br = vector_bracket(x, y);
            if br.iter().all(|c| c.is_zero()) {
                continue;
            }
            let mut factors: Vec<&Vec<ScalarExpr>> = vec![&br];
            factors.extend(xs.iter().enumerate().filter(|(a, _)| *a != i).map(|(_, f)| f));
            factors.extend(ys.iter().enumerate().filter(|(b, _)| *b != j).map(|(_, f)| f));
            let mut acc = vec![ScalarExpr::one()];
            let mut deg = 0;
            for f in factors {
                acc = wedge_coeffs(n, deg, &acc, 1, f);
                deg += 1;
            }
            // (-1)^{i+j} with one-based positions equals (-1)^{i+j} zero-based
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            for (slot, c) in out.coeffs.iter_mut().zip(acc) {
                *slot = &*slot + &c.signed(sign);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> ScalarExpr {
        ScalarExpr::var(i)
    }

    fn c(v: f64) -> ScalarExpr {
        ScalarExpr::constant(v)
    }

    fn plane(n: usize) -> Chart {
        Chart::new("R^n", (0..n).map(|i| Coordinate::linear(&format!("x{i}"), -2.0, 2.0)).collect())
    }

    #[test]
    fn eval_form_example() {
        let f = FormField::from_terms(2, 1, &[(&[1], x(0))]).unwrap();
        let v = f.eval(&[2.0, 5.0]).unwrap();
        assert_eq!(v.coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn d_examples() {
        let f = FormField::from_terms(2, 1, &[(&[1], x(0))]).unwrap();
        let df = f.d();
        assert_eq!(df.eval(&[0.3, 0.4]).unwrap().coeffs(), &[1.0]);
        // d(z dφ) on (θ, z, φ)
        let a = FormField::from_terms(3, 1, &[(&[2], x(1))]).unwrap();
        let da = a.d().eval(&[0.1, 0.2, 0.3]).unwrap();
        let expect = AlternatingForm::basis_element(3, &[1, 2]).unwrap();
        assert_eq!(da, expect);
    }

    #[test]
    fn d_squared_vanishes() {
        let f = FormField::function(2, x(0).sin() * x(1).powi(2));
        let dd = f.d().d();
        let pts = plane(2).quasi_random_points(100, 0.01);
        assert!(dd.max_norm(&pts).unwrap() < 1e-12);
    }

    #[test]
    fn pullback_examples() {
        let r2 = plane(2);
        let line = plane(1);
        let inc = ChartMap::new(line, r2, vec![x(0), c(0.0)]).unwrap();
        let dx = FormField::dx(2, 0);
        assert_eq!(dx.pullback(&inc).unwrap().eval(&[0.4]).unwrap().coeffs(), &[1.0]);

        // polar cap (r, ψ) ↦ (θ = ψ, z = 1 - r²/2): dθ∧dz = dψ∧(-r dr) = r dr∧dψ
        let sphere = Chart::new("S2", vec![Coordinate::periodic("theta", 0.0, 6.28), Coordinate::linear("z", -1.0, 1.0)]);
        let cap = Chart::new("cap", vec![Coordinate::linear("r", 0.0, 1.0), Coordinate::periodic("psi", 0.0, 6.28)]);
        let m = ChartMap::new(cap, sphere, vec![x(1), c(1.0) - x(0).powi(2) * 0.5]).unwrap();
        let area = FormField::from_terms(2, 2, &[(&[0, 1], c(1.0))]).unwrap();
        let pb = area.pullback(&m).unwrap();
        for r in [0.1, 0.5, 0.9] {
            let v = pb.eval(&[r, 1.0]).unwrap();
            assert!((v.coeffs()[0] - r).abs() < 1e-14);
        }
    }

    #[test]
    fn lie_derivative_examples() {
        let f = FormField::from_terms(2, 1, &[(&[1], x(0))]).unwrap();
        let l = f.lie_derivative(&MultiVectorField::partial(2, 0)).unwrap();
        assert_eq!(l.eval(&[0.7, -0.2]).unwrap().coeffs(), &[0.0, 1.0]);
        let area = FormField::from_terms(2, 2, &[(&[0, 1], c(1.0))]).unwrap();
        let l = area.lie_derivative(&MultiVectorField::partial(2, 0)).unwrap();
        assert!(l.is_identically_zero());
    }

    #[test]
    fn schouten_examples() {
        let d0 = MultiVectorField::partial(2, 0);
        let x0d1 = MultiVectorField::vector(vec![c(0.0), x(0)]);
        let b = d0.schouten(&x0d1).unwrap();
        assert_eq!(b.eval(&[0.3, 0.9]).unwrap().coeffs(), &[0.0, 1.0]);
        let e01 = MultiVectorField::partial(3, 0).wedge(&MultiVectorField::partial(3, 1)).unwrap();
        let b = e01.schouten(&MultiVectorField::partial(3, 2)).unwrap();
        assert!(b.is_identically_zero());
    }

    #[test]
    fn halton_points_are_interior() {
        let ch = plane(3).with_guard("away from origin", x(0).powi(2) + x(1).powi(2) + x(2).powi(2) - 0.25);
        let pts = ch.quasi_random_points(50, 0.01);
        assert_eq!(pts.len(), 50);
        assert!(pts.iter().all(|p| ch.contains(p)));
    }

    #[test]
    fn wrap_periodic() {
        let ch = Chart::new("S1", vec![Coordinate::periodic("phi", 0.0, 1.0)]);
        assert!((ch.wrap(&[2.25])[0] - 0.25).abs() < 1e-15);
        assert!((ch.wrap(&[-0.25])[0] - 0.75).abs() < 1e-15);
    }
}
