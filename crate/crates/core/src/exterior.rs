//! Pointwise alternating algebra over a fixed real fiber `R^n`.
//!
//! Basis elements of `Λ^p` are keyed by strictly increasing [`MultiIndex`]
//! values. Coefficient vectors are stored in **colexicographic** rank order:
//!
//! ```text
//! rank(i_0 < i_1 < ... < i_{p-1}) = Σ_m C(i_m, m + 1)
//! n = 4, p = 2:  (0,1) (0,2) (1,2) (0,3) (1,3) (2,3)
//! ```
//!
//! Colex rank does not depend on `n`, so a coefficient vector for `R^n` is a
//! prefix of the one for `R^{n+1}`.
//!
//! Sign conventions, all derived from a single rule:
//!
//! ```text
//! a(v_1..v_p)        = Σ_K a_K det[v_j(K_i)]          (determinant pairing)
//! ι_X a              = a(X, ·)                        (first slot)
//! ι_{X_1∧...∧X_l} a  = ι_{X_l} ... ι_{X_1} a = a(X_1, ..., X_l, ·)
//! (a∧b)_K            = Σ_{I⊔J=K} sgn(I,J) a_I b_J     (shuffle sign)
//! ```
//!
//! so `ι_{e0∧e1}(e0*∧e1*∧e2*) = e2*` and `ι_{e1}(e0*∧e1*) = -e0*`.
//!
//! The combinatorial kernels are generic over [`Coeff`], which lets the same
//! code run on `f64`, exact rationals and symbolic expressions.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative threshold for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExteriorError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree {degree} exceeds {limit}")]
    DegreeTooLarge { degree: usize, limit: usize },
    #[error("invalid multi-index {entries:?} for dimension {dim}")]
    InvalidIndex { entries: Vec<usize>, dim: usize },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ExteriorError>;

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Strictly increasing list of axis indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExteriorError::Invalid(format!(
                "multi-index entries must be strictly increasing: {entries:?}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.entries.binary_search(&axis).is_ok()
    }

    pub fn fits(&self, dim: usize) -> bool {
        self.entries.last().map_or(true, |&last| last < dim)
    }

    /// Colexicographic rank among indices of the same degree.
    pub fn rank(&self) -> usize {
        self.entries
            .iter()
            .enumerate()
            .map(|(m, &i)| binomial(i, m + 1))
            .sum()
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn unrank(degree: usize, mut rank: usize) -> Self {
        let mut entries = vec![0; degree];
        for m in (0..degree).rev() {
            // largest c with C(c, m+1) <= rank
            let mut c = m;
            while binomial(c + 1, m + 1) <= rank {
                c += 1;
            }
            entries[m] = c;
            rank -= binomial(c, m + 1);
        }
        Self { entries }
    }

    /// Indices obtained by removing the entry at `pos`.
    pub fn without(&self, pos: usize) -> Self {
        let mut entries = self.entries.clone();
        entries.remove(pos);
        Self { entries }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All degree-`p` multi-indices over `R^n`, in rank order.
pub fn basis(n: usize, p: usize) -> Vec<MultiIndex> {
    (0..binomial(n, p)).map(|r| MultiIndex::unrank(p, r)).collect()
}

/// Sign of the permutation sorting `seq`, or `None` when an entry repeats.
pub fn sort_sign(seq: &[usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len() {
            match seq[i].cmp(&seq[j]) {
                Ordering::Greater => sign = -sign,
                Ordering::Equal => return None,
                Ordering::Less => {}
            }
        }
    }
    Some(sign)
}

/// Merge two disjoint sorted index lists, returning the shuffle sign.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            // b[j] jumps over the remaining entries of a
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((out, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Scalar ring used by the combinatorial kernels.
pub trait Coeff: Clone {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    fn signed(&self, sign: i32) -> Self {
        if sign < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Coeff for Rational64 {
    fn zero() -> Self {
        Rational64::from_integer(0)
    }
    fn is_zero(&self) -> bool {
        *self.numer() == 0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Coefficients of `a ∧ b` for `a ∈ Λ^p`, `b ∈ Λ^q` over `R^n`.
///
/// Returns the zero vector of `Λ^{p+q}` (empty when `p + q > n`).
pub fn wedge_coeffs<T: Coeff>(n: usize, p: usize, a: &[T], q: usize, b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); binomial(n, p + q)];
    if p + q > n {
        return out;
    }
    for (ra, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        let ia = MultiIndex::unrank(p, ra);
        for (rb, cb) in b.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let ib = MultiIndex::unrank(q, rb);
            if let Some((merged, sign)) = merge_sign(ia.entries(), ib.entries()) {
                let r = MultiIndex { entries: merged }.rank();
                out[r] = out[r].add(&ca.mul(cb).signed(sign));
            }
        }
    }
    out
}

/// Coefficients of `ι_X a` for `X ∈ Λ^l R^n`, `a ∈ Λ^p (R^n)^*`, `l ≤ p`.
pub fn interior_coeffs<T: Coeff>(n: usize, l: usize, x: &[T], p: usize, a: &[T]) -> Vec<T> {
    let q = p - l;
    let mut out = vec![T::zero(); binomial(n, q)];
    for (rx, cx) in x.iter().enumerate() {
        if cx.is_zero() {
            continue;
        }
        let ix = MultiIndex::unrank(l, rx);
        for (ra, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ia = MultiIndex::unrank(p, ra);
            if !ix.entries().iter().all(|&e| ia.contains(e)) {
                continue;
            }
            let rest: Vec<usize> = ia
                .entries()
                .iter()
                .copied()
                .filter(|e| !ix.contains(*e))
                .collect();
            // a(e_I, e_J) = sgn(I J) a_{I∪J}
            let mut seq = ix.entries().to_vec();
            seq.extend_from_slice(&rest);
            let sign = sort_sign(&seq).expect("disjoint by construction");
            let r = MultiIndex { entries: rest }.rank();
            out[r] = out[r].add(&cx.mul(ca).signed(sign));
        }
    }
    out
}

/// Determinant by Leibniz expansion over permutations (small, nonempty sizes).
pub fn leibniz_det<T: Coeff>(m: &[Vec<T>]) -> T {
    let k = m.len();
    assert!(k > 0, "empty determinant");
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = T::zero();
    permute(&mut perm, 0, &mut |p| {
        let sign = sort_sign(p).unwrap();
        let mut prod = m[0][p[0]].clone();
        for (row, &col) in p.iter().enumerate().skip(1) {
            prod = prod.mul(&m[row][col]);
        }
        total = total.add(&prod.signed(sign));
    });
    total
}

fn permute(p: &mut Vec<usize>, start: usize, f: &mut dyn FnMut(&[usize])) {
    if start == p.len() {
        f(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, f);
        p.swap(start, i);
    }
}

macro_rules! alternating_common {
    ($name:ident) => {
        impl $name {
            /// Build from a full coefficient vector in colex order.
            pub fn new(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
                if degree > dim {
                    return Err(ExteriorError::DegreeTooLarge { degree, limit: dim });
                }
                let expected = binomial(dim, degree);
                if coeffs.len() != expected {
                    return Err(ExteriorError::CoefficientCount { expected, got: coeffs.len() });
                }
                Ok(Self { dim, degree, coeffs })
            }

            pub fn zero(dim: usize, degree: usize) -> Self {
                Self { dim, degree, coeffs: vec![0.0; binomial(dim, degree)] }
            }

            /// Sum of `coefficient · basis(indices)` terms; indices may be unsorted.
            pub fn from_terms(dim: usize, degree: usize, terms: &[(&[usize], f64)]) -> Result<Self> {
                let mut out = Self::zero(dim, degree);
                for (idx, c) in terms {
                    if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                        return Err(ExteriorError::InvalidIndex { entries: idx.to_vec(), dim });
                    }
                    let Some(sign) = sort_sign(idx) else { continue };
                    let mut sorted = idx.to_vec();
                    sorted.sort_unstable();
                    let r = MultiIndex { entries: sorted }.rank();
                    out.coeffs[r] += sign as f64 * c;
                }
                Ok(out)
            }

            /// Basis element for the given (sorted or unsorted) indices.
            pub fn basis_element(dim: usize, idx: &[usize]) -> Result<Self> {
                Self::from_terms(dim, idx.len(), &[(idx, 1.0)])
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn degree(&self) -> usize {
                self.degree
            }

            pub fn coeffs(&self) -> &[f64] {
                &self.coeffs
            }

            pub fn coeff(&self, idx: &MultiIndex) -> f64 {
                if idx.degree() != self.degree || !idx.fits(self.dim) {
                    return 0.0;
                }
                self.coeffs[idx.rank()]
            }

            pub fn norm(&self) -> f64 {
                self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
            }

            /// Same shape and every coefficient within `tol`.
            pub fn close_to(&self, other: &Self, tol: f64) -> bool {
                self.dim == other.dim
                    && self.degree == other.degree
                    && self.coeffs.len() == other.coeffs.len()
                    && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| (a - b).abs() <= tol)
            }

            pub fn max_abs(&self) -> f64 {
                self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
            }

            pub fn scale(&self, s: f64) -> Self {
                Self { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.check_same(other)?;
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
                Ok(Self { dim: self.dim, degree: self.degree, coeffs })
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.add(&other.scale(-1.0))
            }

            fn check_same(&self, other: &Self) -> Result<()> {
                if self.dim != other.dim {
                    return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
                }
                if self.degree != other.degree {
                    return Err(ExteriorError::Invalid(format!(
                        "degree mismatch: {} vs {}",
                        self.degree, other.degree
                    )));
                }
                Ok(())
            }

            /// Nonzero terms as `(index, coefficient)` pairs.
            pub fn terms(&self) -> Vec<(MultiIndex, f64)> {
                self.coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0.0)
                    .map(|(r, c)| (MultiIndex::unrank(self.degree, r), *c))
                    .collect()
            }
        }
    };
}

/// Degree-`p` alternating covariant tensor on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternatingForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

/// Degree-`l` alternating contravariant tensor on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiVector {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

alternating_common!(AlternatingForm);
alternating_common!(MultiVector);

impl AlternatingForm {
    pub fn scalar(dim: usize, value: f64) -> Self {
        Self { dim, degree: 0, coeffs: vec![value] }
    }

    /// Evaluate on `degree` vectors via the determinant pairing.
    pub fn evaluate(&self, vectors: &[Vec<f64>]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(ExteriorError::Invalid(format!(
                "expected {} arguments, got {}",
                self.degree,
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: v.len() });
        }
        if self.degree == 0 {
            return Ok(self.coeffs[0]);
        }
        let mut total = 0.0;
        for (r, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let idx = MultiIndex::unrank(self.degree, r);
            let m: Vec<Vec<f64>> = idx
                .entries()
                .iter()
                .map(|&row| vectors.iter().map(|v| v[row]).collect())
                .collect();
            total += c * leibniz_det(&m);
        }
        Ok(total)
    }
}

impl MultiVector {
    /// Degree-1 multivector from fiber components.
    pub fn vector(components: &[f64]) -> Self {
        Self { dim: components.len(), degree: 1, coeffs: components.to_vec() }
    }

    /// `X_1 ∧ ... ∧ X_l` from degree-1 factors.
    pub fn decomposable(dim: usize, factors: &[Vec<f64>]) -> Result<Self> {
        let mut acc = Self { dim, degree: 0, coeffs: vec![1.0] };
        for f in factors {
            if f.len() != dim {
                return Err(ExteriorError::DimensionMismatch { left: dim, right: f.len() });
            }
            acc = acc.wedge(&Self::vector(f))?;
        }
        Ok(acc)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let n = self.dim;
        let (p, q) = (self.degree, other.degree);
        if p + q > n {
            return Ok(Self::zero_overflow(n, p + q));
        }
        Ok(Self { dim: n, degree: p + q, coeffs: wedge_coeffs(n, p, &self.coeffs, q, &other.coeffs) })
    }

    fn zero_overflow(dim: usize, degree: usize) -> Self {
        Self { dim, degree, coeffs: Vec::new() }
    }
}

/// Exterior product with the shuffle-sign convention.
///
/// When `deg a + deg b` exceeds the fiber dimension the zero form of the
/// requested degree is returned; it carries no coefficients.
pub fn wedge(a: &AlternatingForm, b: &AlternatingForm) -> Result<AlternatingForm> {
    if a.dim != b.dim {
        return Err(ExteriorError::DimensionMismatch { left: a.dim, right: b.dim });
    }
    let n = a.dim;
    let degree = a.degree + b.degree;
    if degree > n {
        return Ok(AlternatingForm { dim: n, degree, coeffs: Vec::new() });
    }
    Ok(AlternatingForm { dim: n, degree, coeffs: wedge_coeffs(n, a.degree, &a.coeffs, b.degree, &b.coeffs) })
}

/// `ι_X a`, with `ι_{X_1∧...∧X_l} = ι_{X_l}...ι_{X_1}`.
pub fn interior_product(x: &MultiVector, a: &AlternatingForm) -> Result<AlternatingForm> {
    if x.dim != a.dim {
        return Err(ExteriorError::DimensionMismatch { left: x.dim, right: a.dim });
    }
    if x.degree > a.degree {
        return Err(ExteriorError::DegreeTooLarge { degree: x.degree, limit: a.degree });
    }
    Ok(AlternatingForm {
        dim: a.dim,
        degree: a.degree - x.degree,
        coeffs: interior_coeffs(a.dim, x.degree, &x.coeffs, a.degree, &a.coeffs),
    })
}

/// Matrix of `X ↦ ι_X ω` on degree-`l` multivectors.
///
/// Shape `C(n, p-l) × C(n, l)`; column `r` holds `ι_{e_I} ω` for the
/// multi-index of rank `r`.
pub fn contraction_matrix(omega: &AlternatingForm, l: usize) -> Result<DMatrix<f64>> {
    if l > omega.degree {
        return Err(ExteriorError::DegreeTooLarge { degree: l, limit: omega.degree });
    }
    let n = omega.dim;
    let rows = binomial(n, omega.degree - l);
    let cols = binomial(n, l);
    let mut m = DMatrix::zeros(rows, cols);
    for c in 0..cols {
        let mut e = vec![0.0; cols];
        e[c] = 1.0;
        let col = interior_coeffs(n, l, &e, omega.degree, &omega.coeffs);
        for (r, v) in col.into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

/// The flat map `X ↦ ι_X ω` on vectors: shape `C(n,k) × n` for `ω ∈ Λ^{k+1}`.
pub fn flat_matrix(omega: &AlternatingForm) -> Result<DMatrix<f64>> {
    if omega.degree == 0 {
        return Err(ExteriorError::Invalid("flat map needs a form of degree >= 1".into()));
    }
    contraction_matrix(omega, 1)
}

/// Singular value decomposition with descending singular values and a full
/// right factor (rows padded with zeros when the matrix is wide).
pub(crate) struct SortedSvd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(true, true);
    let u_full = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let k = order.len();
    let mut u = DMatrix::zeros(rows, k);
    let mut v = DMatrix::zeros(cols, k);
    let mut s = Vec::with_capacity(k);
    for (j, &o) in order.iter().enumerate() {
        s.push(svd.singular_values[o]);
        for r in 0..rows {
            u[(r, j)] = u_full[(r, o)];
        }
        for c in 0..cols {
            v[(c, j)] = vt[(o, c)];
        }
    }
    SortedSvd { u, s, v }
}

/// Numerical rank with relative threshold `tol`.
pub fn numerical_rank(singular_values: &[f64], tol: f64) -> usize {
    let smax = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if smax <= f64::MIN_POSITIVE {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > tol * smax).count()
}

/// Outcome of [`nondegeneracy_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Nondegeneracy {
    Nondegenerate { singular_values: Vec<f64> },
    /// `kernel` is an orthonormal basis of the kernel of the flat map.
    Degenerate { singular_values: Vec<f64>, kernel: Vec<Vec<f64>> },
}

impl Nondegeneracy {
    pub fn is_nondegenerate(&self) -> bool {
        matches!(self, Nondegeneracy::Nondegenerate { .. })
    }

    pub fn singular_values(&self) -> &[f64] {
        match self {
            Nondegeneracy::Nondegenerate { singular_values }
            | Nondegeneracy::Degenerate { singular_values, .. } => singular_values,
        }
    }
}

/// Nondegenerate iff `s_min > tol · s_max` for the flat matrix.
pub fn nondegeneracy_check(omega: &AlternatingForm, tol: f64) -> Result<Nondegeneracy> {
    if !(tol > 0.0) {
        return Err(ExteriorError::Invalid("tolerance must be positive".into()));
    }
    let n = omega.dim;
    if omega.degree == 0 || omega.coeffs.iter().all(|c| *c == 0.0) {
        let kernel = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        return Ok(Nondegeneracy::Degenerate { singular_values: vec![0.0; n], kernel });
    }
    let svd = sorted_svd(&flat_matrix(omega)?);
    let s: Vec<f64> = svd.s.iter().take(n).cloned().collect();
    let rank = numerical_rank(&s, tol);
    if rank == n {
        return Ok(Nondegeneracy::Nondegenerate { singular_values: s });
    }
    let kernel = (rank..n).map(|j| svd.v.column(j).iter().cloned().collect()).collect();
    Ok(Nondegeneracy::Degenerate { singular_values: s, kernel })
}

/// Least-squares solution of `A x = b` via the pseudo-inverse with relative
/// singular value cutoff `tol`.
pub(crate) fn pinv_solve(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let svd = sorted_svd(a);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    let mut x = DVector::zeros(a.ncols());
    if smax <= f64::MIN_POSITIVE {
        return x;
    }
    for (j, &s) in svd.s.iter().enumerate() {
        if s <= tol * smax {
            continue;
        }
        let coef = svd.u.column(j).dot(b) / s;
        x += svd.v.column(j) * coef;
    }
    x
}

/// Moore-Penrose pseudo-inverse with relative cutoff `tol`.
pub fn pseudo_inverse(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let svd = sorted_svd(a);
    let smax = svd.s.first().cloned().unwrap_or(0.0);
    let mut p = DMatrix::zeros(a.ncols(), a.nrows());
    if smax <= f64::MIN_POSITIVE {
        return p;
    }
    for (j, &s) in svd.s.iter().enumerate() {
        if s <= tol * smax {
            continue;
        }
        p += svd.v.column(j) * svd.u.column(j).transpose() / s;
    }
    p
}

/// Result of [`solve_flat`].
#[derive(Debug, Clone, PartialEq)]
pub enum FlatSolve {
    Solved { field: MultiVector, residual: f64 },
    /// The target is not in the image of `X ↦ ι_X ω`.
    NoSolution { residual: f64, relative_residual: f64 },
}

impl FlatSolve {
    pub fn residual(&self) -> f64 {
        match self {
            FlatSolve::Solved { residual, .. } | FlatSolve::NoSolution { residual, .. } => *residual,
        }
    }

    pub fn field(&self) -> Option<&MultiVector> {
        match self {
            FlatSolve::Solved { field, .. } => Some(field),
            FlatSolve::NoSolution { .. } => None,
        }
    }
}

/// Solve `ι_X ω = target` for a degree-`l` multivector in the least-squares
/// sense; accepted when the residual is at most `tol · |target|`.
pub fn solve_flat(omega: &AlternatingForm, target: &AlternatingForm, l: usize, tol: f64) -> Result<FlatSolve> {
    if omega.dim != target.dim {
        return Err(ExteriorError::DimensionMismatch { left: omega.dim, right: target.dim });
    }
    if l > omega.degree || target.degree + l != omega.degree {
        return Err(ExteriorError::Invalid(format!(
            "target degree {} incompatible with ω degree {} and l = {}",
            target.degree, omega.degree, l
        )));
    }
    let a = contraction_matrix(omega, l)?;
    let b = DVector::from_column_slice(&target.coeffs);
    let x = pinv_solve(&a, &b, DEFAULT_RANK_TOL);
    let residual = (&a * &x - &b).norm();
    let scale = b.norm();
    if residual <= tol * scale || (scale == 0.0 && residual == 0.0) {
        let field = MultiVector { dim: omega.dim, degree: l, coeffs: x.iter().cloned().collect() };
        Ok(FlatSolve::Solved { field, residual })
    } else {
        let relative_residual = if scale > 0.0 { residual / scale } else { f64::INFINITY };
        Ok(FlatSolve::NoSolution { residual, relative_residual })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugacyVerdict {
    NotConjugate,
    Conjugate,
    StronglyConjugate,
}

/// Classification of a pair of subspaces against a form `ω ∈ Λ^{k+1}`.
///
/// The pairing is built as `ι_Y ι_X ω` with `X ∈ U` applied first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyReport {
    pub verdict: ConjugacyVerdict,
    pub eta: Option<AlternatingForm>,
    pub sigma: Option<AlternatingForm>,
    pub pairing_matrix: Vec<Vec<f64>>,
    pub rank_singular_values: Vec<f64>,
    pub contraction_order: &'static str,
}

impl ConjugacyReport {
    /// True for both conjugate verdicts.
    pub fn is_conjugate(&self) -> bool {
        self.verdict != ConjugacyVerdict::NotConjugate
    }
}

fn sigma_on(sigma: &[f64], n: usize, u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (r, c) in sigma.iter().enumerate() {
        let idx = MultiIndex::unrank(2, r);
        let (i, j) = (idx.entries()[0], idx.entries()[1]);
        debug_assert!(j < n);
        acc += c * (u[i] * v[j] - u[j] * v[i]);
    }
    acc
}

/// Decide whether `U` and `V` are (strongly) conjugate with respect to `ω`.
pub fn classify_conjugacy(
    omega: &AlternatingForm,
    u: &[MultiVector],
    v: &[MultiVector],
    tol: f64,
) -> Result<ConjugacyReport> {
    let n = omega.dim;
    for x in u.iter().chain(v) {
        if x.dim != n {
            return Err(ExteriorError::DimensionMismatch { left: n, right: x.dim });
        }
        if x.degree != 1 {
            return Err(ExteriorError::Invalid("conjugacy bases must be vectors".into()));
        }
    }
    if omega.degree < 2 {
        return Err(ExteriorError::Invalid("conjugacy needs a form of degree >= 2".into()));
    }
    let not_conjugate = |pairing: Vec<Vec<f64>>, sv: Vec<f64>, eta: Option<AlternatingForm>| ConjugacyReport {
        verdict: ConjugacyVerdict::NotConjugate,
        eta,
        sigma: None,
        pairing_matrix: pairing,
        rank_singular_values: sv,
        contraction_order: "X then Y",
    };
    let out_deg = omega.degree - 2;
    let cols = binomial(n, out_deg);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(u.len() * v.len());
    for x in u {
        let ix = interior_product(x, omega)?;
        for y in v {
            rows.push(interior_product(y, &ix)?.coeffs);
        }
    }
    if rows.is_empty() {
        return Ok(not_conjugate(vec![vec![0.0; v.len()]; u.len()], vec![], None));
    }
    let stacked = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
    let svd = sorted_svd(&stacked);
    let sv: Vec<f64> = svd.s.iter().take(rows.len().min(cols)).cloned().collect();
    let rank = numerical_rank(&sv, tol);
    if rank != 1 {
        let zero = vec![vec![0.0; v.len()]; u.len()];
        return Ok(not_conjugate(zero, sv, None));
    }
    // η: leading right singular vector, unit norm, largest entry positive
    let mut eta: Vec<f64> = svd.v.column(0).iter().cloned().collect();
    let lead = eta
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bi, bv), (i, &x)| if x.abs() > bv + 1e-12 { (i, x.abs()) } else { (bi, bv) })
        .0;
    if eta[lead] < 0.0 {
        eta.iter_mut().for_each(|x| *x = -*x);
    }
    let eta_form = AlternatingForm { dim: n, degree: out_deg, coeffs: eta.clone() };
    let pairing: Vec<Vec<f64>> = (0..u.len())
        .map(|a| (0..v.len()).map(|b| rows[a * v.len() + b].iter().zip(&eta).map(|(p, q)| p * q).sum()).collect())
        .collect();
    let square = u.len() == v.len();
    let pm = DMatrix::from_fn(u.len(), v.len(), |a, b| pairing[a][b]);
    let psv = sorted_svd(&pm).s;
    if !square || numerical_rank(&psv, tol) < u.len() {
        return Ok(not_conjugate(pairing, sv, Some(eta_form)));
    }
    // strong conjugacy: σ(u_a, v_b) = pairing_ab, least squares over Λ^2
    let m2 = binomial(n, 2);
    let eqs = DMatrix::from_fn(u.len() * v.len(), m2, |row, c| {
        let (a, b) = (row / v.len(), row % v.len());
        let mut e = vec![0.0; m2];
        e[c] = 1.0;
        sigma_on(&e, n, &u[a].coeffs, &v[b].coeffs)
    });
    let rhs = DVector::from_fn(u.len() * v.len(), |row, _| pairing[row / v.len()][row % v.len()]);
    let sigma = pinv_solve(&eqs, &rhs, DEFAULT_RANK_TOL);
    let sigma: Vec<f64> = sigma.iter().cloned().collect();
    let scale = stacked.norm().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for a in 0..u.len() {
        for b in 0..v.len() {
            let s = sigma_on(&sigma, n, &u[a].coeffs, &v[b].coeffs);
            let row = &rows[a * v.len() + b];
            let d: f64 = row.iter().zip(&eta).map(|(r, e)| (r - s * e).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(d);
        }
    }
    let strong = worst <= tol.max(1e-12) * scale;
    Ok(ConjugacyReport {
        verdict: if strong { ConjugacyVerdict::StronglyConjugate } else { ConjugacyVerdict::Conjugate },
        eta: Some(eta_form),
        sigma: if strong { Some(AlternatingForm { dim: n, degree: 2, coeffs: sigma }) } else { None },
        pairing_matrix: pairing,
        rank_singular_values: sv,
        contraction_order: "X then Y",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(dim: usize, idx: &[usize]) -> AlternatingForm {
        AlternatingForm::basis_element(dim, idx).unwrap()
    }

    #[test]
    fn colex_rank_roundtrip() {
        let b = basis(4, 2);
        let listed: Vec<Vec<usize>> = b.iter().map(|m| m.entries().to_vec()).collect();
        assert_eq!(listed, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
        for n in 0..7 {
            for p in 0..=n {
                for (r, m) in basis(n, p).iter().enumerate() {
                    assert_eq!(m.rank(), r);
                    assert!(m.fits(n));
                }
            }
        }
    }

    #[test]
    fn wedge_examples() {
        let dxdy = wedge(&form(2, &[0]), &form(2, &[1])).unwrap();
        assert_eq!(dxdy.coeffs(), &[1.0]);
        let dxdx = wedge(&form(2, &[0]), &form(2, &[0])).unwrap();
        assert_eq!(dxdx.coeffs(), &[0.0]);
        let w = wedge(&form(4, &[0, 2]), &form(4, &[1, 3])).unwrap();
        assert_eq!(w.coeffs(), &[-1.0]);
    }

    #[test]
    fn wedge_dimension_and_overflow() {
        assert!(wedge(&form(2, &[0]), &form(3, &[0])).is_err());
        let over = wedge(&form(2, &[0, 1]), &form(2, &[0])).unwrap();
        assert_eq!(over.degree(), 3);
        assert_eq!(over.norm(), 0.0);
    }

    #[test]
    fn interior_examples() {
        let vol = form(3, &[0, 1, 2]);
        let e0 = MultiVector::vector(&[1.0, 0.0, 0.0]);
        assert_eq!(interior_product(&e0, &vol).unwrap(), form(3, &[1, 2]));
        let e01 = MultiVector::basis_element(3, &[0, 1]).unwrap();
        assert_eq!(interior_product(&e01, &vol).unwrap(), form(3, &[2]));
        let too_big = MultiVector::basis_element(3, &[0, 1]).unwrap();
        assert!(interior_product(&too_big, &form(3, &[0])).is_err());
    }

    #[test]
    fn flat_matrix_examples() {
        let vol = form(3, &[0, 1, 2]);
        let f = flat_matrix(&vol).unwrap();
        assert_eq!(f.shape(), (3, 3));
        assert!((f.determinant().abs() - 1.0).abs() < 1e-15);
        let area = form(3, &[0, 1]);
        match nondegeneracy_check(&area, 1e-9).unwrap() {
            Nondegeneracy::Degenerate { kernel, .. } => {
                assert_eq!(kernel.len(), 1);
                assert!((kernel[0][2].abs() - 1.0).abs() < 1e-12);
            }
            other => panic!("expected degenerate, got {other:?}"),
        }
        assert!(nondegeneracy_check(&vol, 1e-9).unwrap().is_nondegenerate());
    }

    #[test]
    fn sigma_squared_is_nondegenerate() {
        let sigma = AlternatingForm::from_terms(4, 2, &[(&[0, 1], 1.0), (&[2, 3], 1.0)]).unwrap();
        let s2 = wedge(&sigma, &sigma).unwrap();
        assert_eq!(s2.coeffs(), &[2.0]);
        let rank = numerical_rank(nondegeneracy_check(&s2, 1e-9).unwrap().singular_values(), 1e-9);
        assert_eq!(rank, 4);
    }

    #[test]
    fn zero_form_has_full_kernel() {
        let z = AlternatingForm::zero(3, 2);
        match nondegeneracy_check(&z, 1e-9).unwrap() {
            Nondegeneracy::Degenerate { kernel, .. } => assert_eq!(kernel.len(), 3),
            _ => panic!("zero form must be degenerate"),
        }
    }

    #[test]
    fn solve_flat_examples() {
        let area = form(2, &[0, 1]);
        let sol = solve_flat(&area, &form(2, &[0]), 1, 1e-9).unwrap();
        let x = sol.field().unwrap();
        assert!((x.coeffs()[0]).abs() < 1e-14 && (x.coeffs()[1] + 1.0).abs() < 1e-14);

        let vol = form(3, &[0, 1, 2]);
        let sol = solve_flat(&vol, &form(3, &[0, 1]), 1, 1e-9).unwrap();
        let x = sol.field().unwrap();
        assert!((x.coeffs()[2] - 1.0).abs() < 1e-14);

        let deg = form(3, &[0, 1]);
        match solve_flat(&deg, &form(3, &[2]), 1, 1e-9).unwrap() {
            FlatSolve::NoSolution { residual, .. } => assert!(residual > 0.5),
            other => panic!("expected no solution, got {other:?}"),
        }
    }

    #[test]
    fn conjugacy_examples() {
        let vol = form(3, &[0, 1, 2]);
        let e0 = MultiVector::vector(&[1.0, 0.0, 0.0]);
        let e1 = MultiVector::vector(&[0.0, 1.0, 0.0]);
        let rep = classify_conjugacy(&vol, &[e0.clone()], &[e1], 1e-9).unwrap();
        assert!(rep.is_conjugate());
        assert!(rep.eta.as_ref().unwrap().close_to(&form(3, &[2]), 1e-12));
        assert!((rep.pairing_matrix[0][0] - 1.0).abs() < 1e-12);

        let rep = classify_conjugacy(&vol, &[e0.clone()], &[e0], 1e-9).unwrap();
        assert_eq!(rep.verdict, ConjugacyVerdict::NotConjugate);

        let w = wedge(&form(4, &[0, 1]), &form(4, &[2, 3])).unwrap();
        let b0 = MultiVector::vector(&[1.0, 0.0, 0.0, 0.0]);
        let b1 = MultiVector::vector(&[0.0, 1.0, 0.0, 0.0]);
        let rep = classify_conjugacy(&w, &[b0.clone(), b1.clone()], &[b0, b1], 1e-9).unwrap();
        assert_eq!(rep.verdict, ConjugacyVerdict::StronglyConjugate);
        assert!(rep.eta.as_ref().unwrap().close_to(&form(4, &[2, 3]), 1e-12));
        let sigma = rep.sigma.unwrap();
        assert!((sigma.coeff(&MultiIndex::new(vec![0, 1]).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_two_pairing_is_not_conjugate() {
        // ω = e012 + e034: pairing e0 with e1 gives e2, with e3 gives e4
        let w = AlternatingForm::from_terms(5, 3, &[(&[0, 1, 2], 1.0), (&[0, 3, 4], 1.0)]).unwrap();
        let e = |i: usize| {
            let mut v = vec![0.0; 5];
            v[i] = 1.0;
            MultiVector::vector(&v)
        };
        let rep = classify_conjugacy(&w, &[e(0)], &[e(1), e(3)], 1e-9).unwrap();
        assert_eq!(rep.verdict, ConjugacyVerdict::NotConjugate);
        assert_eq!(numerical_rank(&rep.rank_singular_values, 1e-9), 2);
    }

    #[test]
    fn evaluate_matches_interior() {
        let a = AlternatingForm::from_terms(3, 2, &[(&[0, 1], 2.0), (&[1, 2], -1.0)]).unwrap();
        let x = vec![1.0, 2.0, 3.0];
        let y = vec![-1.0, 0.5, 4.0];
        let direct = a.evaluate(&[x.clone(), y.clone()]).unwrap();
        let contracted = interior_product(&MultiVector::vector(&x), &a).unwrap();
        assert!((contracted.evaluate(&[y]).unwrap() - direct).abs() < 1e-14);
    }
}
