//! Brute-force reference implementations.
//!
//! Forms are treated as fully antisymmetric tensors indexed by ordered tuples
//! and every product is a plain sum over permutations. Nothing here calls the
//! library's combinatorial kernels, so agreement is a real cross-check.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Rational64;
use rand::Rng;

pub trait Ring:
    Clone + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn int(v: i64) -> Self;
}

impl Ring for f64 {
    fn int(v: i64) -> Self {
        v as f64
    }
}

impl Ring for Rational64 {
    fn int(v: i64) -> Self {
        Rational64::from_integer(v)
    }
}

/// Increasing `p`-subsets of `0..n` in colex order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    // colex: compare from the largest entry down
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// All permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let inversions = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Tensor component `a(e_{s_1}, ..., e_{s_p})` for an arbitrary index sequence.
pub fn component<T: Ring>(n: usize, p: usize, coeffs: &[T], seq: &[usize]) -> T {
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return T::int(0);
    }
    let inversions = (0..seq.len()).flat_map(|i| (i + 1..seq.len()).map(move |j| (i, j))).filter(|&(i, j)| seq[i] > seq[j]).count();
    let r = subsets(n, p).iter().position(|s| *s == sorted).expect("indices below n");
    if inversions % 2 == 0 {
        coeffs[r].clone()
    } else {
        -coeffs[r].clone()
    }
}

/// `(a∧b)(v_1..v_{p+q}) = 1/(p!q!) Σ_σ sgn σ a(v_σ..) b(v_σ..)` on basis tuples.
pub fn wedge<T: Ring>(n: usize, p: usize, a: &[T], q: usize, b: &[T]) -> Vec<T> {
    let norm = T::int(factorial(p) * factorial(q));
    let perms = permutations(p + q);
    subsets(n, p + q)
        .into_iter()
        .map(|idx| {
            let mut acc = T::int(0);
            for (perm, sign) in &perms {
                let seq: Vec<usize> = perm.iter().map(|&i| idx[i]).collect();
                let term = component(n, p, a, &seq[..p]) * component(n, q, b, &seq[p..]);
                acc = acc + T::int(*sign) * term;
            }
            acc / norm.clone()
        })
        .collect()
}

/// `(ι_X a)_K = Σ_J X^J a(e_{j_1}, ..., e_{j_l}, e_K)`: the first factor of
/// `X` fills the first slot.
pub fn interior<T: Ring>(n: usize, l: usize, x: &[T], p: usize, a: &[T]) -> Vec<T> {
    let js = subsets(n, l);
    subsets(n, p - l)
        .into_iter()
        .map(|k| {
            let mut acc = T::int(0);
            for (r, j) in js.iter().enumerate() {
                let mut seq = j.clone();
                seq.extend_from_slice(&k);
                acc = acc + x[r].clone() * component(n, p, a, &seq);
            }
            acc
        })
        .collect()
}

/// Coefficients of `v_1 ∧ ... ∧ v_m` for vectors given by components.
pub fn wedge_vectors<T: Ring>(n: usize, vs: &[Vec<T>]) -> Vec<T> {
    let m = vs.len();
    let perms = permutations(m);
    subsets(n, m)
        .into_iter()
        .map(|idx| {
            let mut acc = T::int(0);
            for (perm, sign) in &perms {
                let mut prod = T::int(*sign);
                for (k, &s) in perm.iter().enumerate() {
                    prod = prod * vs[k][idx[s]].clone();
                }
                acc = acc + prod;
            }
            acc
        })
        .collect()
}

/// Integer polynomial in `n` variables: exponent vector to coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, i64>,
}

impl Poly {
    pub fn random<R: Rng>(rng: &mut R, n: usize, max_terms: usize, max_deg: u32) -> Self {
        let mut terms = BTreeMap::new();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let mut e = vec![0u32; n];
            for _ in 0..rng.gen_range(0..=max_deg) {
                e[rng.gen_range(0..n)] += 1;
            }
            *terms.entry(e).or_insert(0) += rng.gen_range(-3..=3);
        }
        Poly { n, terms }
    }

    pub fn eval<T: Ring>(&self, x: &[T]) -> T {
        let mut acc = T::int(0);
        for (e, c) in &self.terms {
            let mut t = T::int(*c);
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn diff(&self, i: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                *terms.entry(f).or_insert(0) += c * e[i] as i64;
            }
        }
        Poly { n: self.n, terms }
    }

    /// The same polynomial as a library expression.
    pub fn to_expr(&self) -> plectic::expr::ScalarExpr {
        use plectic::expr::ScalarExpr;
        ScalarExpr::sum(self.terms.iter().map(|(e, c)| {
            let mut t = ScalarExpr::constant(*c as f64);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &ScalarExpr::var(i).powi(k as i32);
                }
            }
            t
        }))
    }
}

/// `[X, Y]^i = X^j ∂_j Y^i - Y^j ∂_j X^i` evaluated at `x`.
pub fn vector_bracket_at<T: Ring>(xf: &[Poly], yf: &[Poly], x: &[T]) -> Vec<T> {
    let n = xf.len();
    (0..n)
        .map(|i| {
            let mut acc = T::int(0);
            for j in 0..n {
                acc = acc + xf[j].eval(x) * yf[i].diff(j).eval(x) - yf[j].eval(x) * xf[i].diff(j).eval(x);
            }
            acc
        })
        .collect()
}

/// Schouten bracket of `X_1∧...∧X_p` and `Y_1∧...∧Y_q` at `x` by the
/// defining sum `Σ (-1)^{i+j} [X_i, Y_j] ∧ X̂_i ∧ Ŷ_j`.
pub fn schouten_at<T: Ring>(n: usize, xs: &[Vec<Poly>], ys: &[Vec<Poly>], x: &[T]) -> Vec<T> {
    let degree = xs.len() + ys.len() - 1;
    let mut out = vec![T::int(0); subsets(n, degree).len()];
    let at = |f: &Vec<Poly>| f.iter().map(|p| p.eval(x)).collect::<Vec<T>>();
    for (i, xi) in xs.iter().enumerate() {
        for (j, yj) in ys.iter().enumerate() {
            let mut factors = vec![vector_bracket_at(xi, yj, x)];
            factors.extend(xs.iter().enumerate().filter(|(a, _)| *a != i).map(|(_, f)| at(f)));
            factors.extend(ys.iter().enumerate().filter(|(b, _)| *b != j).map(|(_, f)| at(f)));
            let sign = T::int(if (i + j) % 2 == 0 { 1 } else { -1 });
            for (slot, c) in out.iter_mut().zip(wedge_vectors(n, &factors)) {
                *slot = slot.clone() + sign.clone() * c;
            }
        }
    }
    out
}

pub fn random_ints<R: Rng>(rng: &mut R, len: usize) -> Vec<i64> {
    (0..len).map(|_| rng.gen_range(-5..=5)).collect()
}

pub fn rationals(v: &[i64]) -> Vec<Rational64> {
    v.iter().map(|&x| Rational64::from_integer(x)).collect()
}

/// Outcome of the randomized kernel-versus-oracle comparison.
#[derive(Debug, Clone, Default)]
pub struct SuiteResult {
    pub cases: usize,
    /// Rational (or integer-exact) comparisons that were not bit-equal.
    pub exact_mismatches: usize,
    /// Worst normwise relative error in floating mode.
    pub max_float_rel: f64,
}

fn rel_gap(got: &[f64], want: &[f64]) -> f64 {
    let diff = got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = want.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn floats<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// `cases` random inputs for each of wedge, interior product and Schouten
/// bracket, with `n ≤ 5` and degrees `≤ 4`.
pub fn run_suite<R: Rng>(rng: &mut R, cases: usize) -> SuiteResult {
    use plectic::charts::MultiVectorField;
    use plectic::exterior::{interior_coeffs, interior_product, wedge as lib_wedge, wedge_coeffs, AlternatingForm, MultiVector};

    let mut res = SuiteResult::default();
    let note = |res: &mut SuiteResult, exact_ok: bool, rel: f64| {
        res.cases += 1;
        if !exact_ok {
            res.exact_mismatches += 1;
        }
        res.max_float_rel = res.max_float_rel.max(rel);
    };

    for _ in 0..cases {
        let n = rng.gen_range(1..=5);
        let p = rng.gen_range(0..=n.min(4));
        let q = rng.gen_range(0..=(n - p).min(4));
        let (lp, lq) = (subsets(n, p).len(), subsets(n, q).len());
        let (a, b) = (random_ints(rng, lp), random_ints(rng, lq));
        let exact = wedge_coeffs(n, p, &rationals(&a), q, &rationals(&b)) == wedge(n, p, &rationals(&a), q, &rationals(&b));
        let (af, bf) = (floats(rng, lp), floats(rng, lq));
        let got = lib_wedge(&AlternatingForm::new(n, p, af.clone()).unwrap(), &AlternatingForm::new(n, q, bf.clone()).unwrap()).unwrap();
        note(&mut res, exact, rel_gap(got.coeffs(), &wedge(n, p, &af, q, &bf)));
    }

    for _ in 0..cases {
        let n = rng.gen_range(1..=5);
        let p = rng.gen_range(1..=n.min(4));
        let l = rng.gen_range(0..=p);
        let (lx, la) = (subsets(n, l).len(), subsets(n, p).len());
        let (x, a) = (random_ints(rng, lx), random_ints(rng, la));
        let exact = interior_coeffs(n, l, &rationals(&x), p, &rationals(&a)) == interior(n, l, &rationals(&x), p, &rationals(&a));
        let (xf, af) = (floats(rng, lx), floats(rng, la));
        let got = interior_product(&MultiVector::new(n, l, xf.clone()).unwrap(), &AlternatingForm::new(n, p, af.clone()).unwrap()).unwrap();
        note(&mut res, exact, rel_gap(got.coeffs(), &interior(n, l, &xf, p, &af)));
    }

    for _ in 0..cases {
        let n = rng.gen_range(2..=5);
        let p = rng.gen_range(1..=n.min(4));
        let q = rng.gen_range(1..=(n + 1 - p).min(4));
        let field = |rng: &mut R| (0..n).map(|_| Poly::random(rng, n, 3, 2)).collect::<Vec<Poly>>();
        let xs: Vec<Vec<Poly>> = (0..p).map(|_| field(rng)).collect();
        let ys: Vec<Vec<Poly>> = (0..q).map(|_| field(rng)).collect();
        let lift = |fs: &[Vec<Poly>]| {
            let mut acc = MultiVectorField::vector(fs[0].iter().map(Poly::to_expr).collect());
            for f in &fs[1..] {
                acc = acc.wedge(&MultiVectorField::vector(f.iter().map(Poly::to_expr).collect())).unwrap();
            }
            acc
        };
        let bracket = lift(&xs).schouten(&lift(&ys)).unwrap();
        // integer points keep every intermediate value an exactly represented integer
        let pt = random_ints(rng, n).iter().map(|v| v.clamp(&-2, &2).to_owned()).collect::<Vec<i64>>();
        let got: Vec<f64> = bracket.eval(&pt.iter().map(|&v| v as f64).collect::<Vec<_>>()).unwrap().coeffs().to_vec();
        let want: Vec<f64> = schouten_at(n, &xs, &ys, &rationals(&pt))
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect();
        let exact = got == want;
        let ptf = floats(rng, n);
        let got_f = bracket.eval(&ptf).unwrap();
        note(&mut res, exact, rel_gap(got_f.coeffs(), &schouten_at(n, &xs, &ys, &ptf)));
    }
    res
}
