//! Dense univariate polynomials over f64 with Sturm-sequence real root
//! isolation and bisection refinement.

use crate::error::{Error, Result};

pub const ROOT_TOL: f64 = 1e-12;

/// Coefficients in ascending degree order; the zero polynomial is `[]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i + 1) as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + other.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean remainder, truncating coefficients that fall below a
    /// relative floor (numerical Sturm chains need the cutoff).
    fn rem(&self, divisor: &Poly, eps: f64) -> Poly {
        let mut r = self.coeffs.clone();
        let d = divisor.coeffs.len();
        let lead = divisor.leading();
        while r.len() >= d && !r.is_empty() {
            let q = r.last().unwrap() / lead;
            let shift = r.len() - d;
            for i in 0..d {
                r[shift + i] -= q * divisor.coeffs[i];
            }
            r.pop();
        }
        let scale = r.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let floor = eps * scale.max(1.0);
        Poly::new(r.into_iter().map(|c| if c.abs() < floor { 0.0 } else { c }).collect())
    }

    /// Upper bound on the absolute value of every root (Cauchy bound).
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading().abs();
        if lead == 0.0 {
            return 1.0;
        }
        1.0 + self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs() / lead))
    }
}

/// Sturm chain of `p` (with numerical coefficient truncation).
fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), p.derivative()];
    const EPS: f64 = 1e-13;
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() || chain[n - 1].degree() == Some(0) {
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1], EPS).scale(-1.0);
        if r.is_zero() {
            break;
        }
        chain.push(r);
    }
    chain
}

/// Sign variations of the chain at `x`.
fn variations(chain: &[Poly], x: f64) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let v = p.eval(x);
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// A real root with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

/// Brackets closer than this are reported as a single root; the truncated
/// Sturm chain can split a multiple root into a spurious pair at this scale.
const CLUSTER_WIDTH: f64 = 1e-9;

/// All real roots of `p`, isolated by Sturm counting and refined by
/// count-bisection to `ROOT_TOL`. Every counted root is accounted for: a
/// bracket that cannot be split further absorbs its whole count as
/// multiplicity.
pub fn real_roots(p: &Poly) -> Result<Vec<Root>> {
    match p.degree() {
        None => return Err(Error::Input("zero polynomial has every root".into())),
        Some(0) => return Ok(vec![]),
        _ => {}
    }
    let chain = sturm_chain(p);
    let bound = p.root_bound() + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    // nudge off a root at the boundary (cannot happen with the +1 margin,
    // but keep the guard cheap)
    while p.eval(lo) == 0.0 {
        lo -= 1.0;
    }
    while p.eval(hi) == 0.0 {
        hi += 1.0;
    }
    let total = variations(&chain, lo).saturating_sub(variations(&chain, hi));
    let mut isolated: Vec<(f64, f64, usize)> = Vec::new();
    isolate(&chain, lo, hi, total, &mut isolated);
    let consumed: usize = isolated.iter().map(|&(_, _, c)| c).sum();
    if consumed != total {
        return Err(Error::Numerical(format!(
            "Sturm count {total} but isolated {consumed} roots"
        )));
    }
    let mut roots = Vec::with_capacity(isolated.len());
    for (mut a, mut b, count) in isolated {
        // bisect on the Sturm count: robust at even-multiplicity roots where
        // the sign does not change
        while b - a > ROOT_TOL {
            let mid = 0.5 * (a + b);
            if variations(&chain, a).saturating_sub(variations(&chain, mid)) >= 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        roots.push(Root {
            value,
            multiplicity: multiplicity_at(p, value).max(count),
        });
    }
    roots.sort_by(|x, y| x.value.partial_cmp(&y.value).unwrap());
    Ok(roots)
}

fn isolate(chain: &[Poly], lo: f64, hi: f64, count: usize, out: &mut Vec<(f64, f64, usize)>) {
    if count == 0 {
        return;
    }
    if count == 1 || hi - lo < CLUSTER_WIDTH {
        out.push((lo, hi, count));
        return;
    }
    let mid = 0.5 * (lo + hi);
    let left = variations(chain, lo).saturating_sub(variations(chain, mid));
    let right = count.saturating_sub(left);
    isolate(chain, lo, mid, left.min(count), out);
    isolate(chain, mid, hi, right, out);
}

/// Multiplicity via successive derivatives with a scale-aware threshold.
fn multiplicity_at(p: &Poly, x: f64) -> usize {
    let scale = p.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    let xmag = x.abs().max(1.0);
    let mut q = p.clone();
    let mut tol = 1e-6 * scale;
    for k in 1..=p.degree().unwrap_or(0) {
        q = q.derivative();
        tol *= xmag;
        if q.eval(x).abs() > tol {
            return k;
        }
    }
    p.degree().unwrap_or(1)
}

/// Real solutions of `p(x) = c` with multiplicities.
pub fn solve_level_set(p: &Poly, c: f64) -> Result<Vec<Root>> {
    real_roots(&p.sub(&Poly::constant(c)))
}
