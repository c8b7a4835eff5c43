//! Real root finding for the two scalar families behind the bounds:
//! pole sums `f(x) = x - c0 - Σ a_i / (x - b_i)` and the norm polynomials
//! `u`, `l` attached to a matrix polynomial.
//!
//! `f` is strictly increasing on every interval between consecutive poles
//! (`f' = 1 + Σ a_i / (x - b_i)^2 > 0`), running from `-inf` to `+inf`, so each
//! interval holds exactly one root and plain bisection is always safe. A
//! single Newton step polishes the bisection result.

use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than `BRACKET_RTOL * (1 + |x|)`.
pub const BRACKET_RTOL: f64 = 1e-13;

const MAX_BRACKET_STEPS: usize = 2100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleTerm {
    /// Positive weight.
    pub a: f64,
    /// Nonnegative pole location.
    pub b: f64,
}

/// `f(x) = x - c0 - Σ a_i / (x - b_i)` with `a_i > 0` and strictly increasing `b_i >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSumFunction {
    c0: f64,
    terms: Vec<PoleTerm>,
}

impl PoleSumFunction {
    /// Canonicalizes raw `(a, b)` pairs: drops `a = 0`, merges equal `b` by
    /// summing their weights, and sorts by `b`.
    pub fn build(c0: f64, raw_terms: &[(f64, f64)]) -> Result<Self> {
        if !(c0.is_finite() && c0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("c0 must be finite and >= 0, got {c0}")));
        }
        let mut terms: Vec<PoleTerm> = Vec::with_capacity(raw_terms.len());
        for &(a, b) in raw_terms {
            if !(a.is_finite() && a >= 0.0 && b.is_finite() && b >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "pole term (a = {a}, b = {b}) needs finite a >= 0 and b >= 0"
                )));
            }
            if a > 0.0 {
                terms.push(PoleTerm { a, b });
            }
        }
        terms.sort_by(|x, y| x.b.total_cmp(&y.b));
        let mut merged: Vec<PoleTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.b == t.b => last.a += t.a,
                _ => merged.push(t),
            }
        }
        Ok(Self { c0, terms: merged })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn terms(&self) -> &[PoleTerm] {
        &self.terms
    }

    pub fn poles(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.b)
    }

    /// Number of (merged) poles.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        x - self.c0 - self.terms.iter().map(|t| t.a / (x - t.b)).sum::<f64>()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        1.0 + self
            .terms
            .iter()
            .map(|t| {
                let d = x - t.b;
                t.a / (d * d)
            })
            .sum::<f64>()
    }

    /// All `m + 1` roots in ascending order; they interlace the poles.
    pub fn all_roots(&self) -> Vec<f64> {
        (0..=self.m()).map(|k| self.root_in_interval(k)).collect()
    }

    /// The root to the right of every pole.
    pub fn largest_root(&self) -> f64 {
        self.root_in_interval(self.m())
    }

    /// The root to the left of every pole; may be `<= 0`.
    pub fn smallest_root(&self) -> f64 {
        self.root_in_interval(0)
    }

    /// Root in the `k`-th gap: `(-inf, b_1)`, `(b_1, b_2)`, ..., `(b_m, inf)`.
    fn root_in_interval(&self, k: usize) -> f64 {
        let m = self.m();
        assert!(k <= m);
        if m == 0 {
            return self.c0;
        }
        let f = |x: f64| self.evaluate(x);
        let (lo, hi) = match (k.checked_sub(1).map(|i| self.terms[i].b), self.terms.get(k).map(|t| t.b)) {
            (None, Some(right)) => {
                let hi = approach(right, -1.0, f, |v| v > 0.0);
                let lo = expand(hi, -1.0, f, |v| v < 0.0);
                (lo, hi)
            }
            (Some(left), None) => {
                let lo = approach(left, 1.0, f, |v| v < 0.0);
                let hi = expand(lo, 1.0, f, |v| v > 0.0);
                (lo, hi)
            }
            (Some(left), Some(right)) => {
                let width = right - left;
                let lo = approach_within(left, 1.0, width / 2.0, f, |v| v < 0.0);
                let hi = approach_within(right, -1.0, width / 2.0, f, |v| v > 0.0);
                (lo, hi)
            }
            (None, None) => unreachable!(),
        };
        bisect_increasing(f, |x| self.derivative(x), lo, hi)
    }

    /// Magnitude of the summands at `x`, the natural scale for `|f(x)|`.
    pub fn residual_scale(&self, x: f64) -> f64 {
        x.abs() + self.c0 + self.terms.iter().map(|t| (t.a / (x - t.b)).abs()).sum::<f64>()
    }
}

// Steps from a pole `p` in direction `dir` by geometrically shrinking offsets
// until `accept(f(x))`. Near the pole the sign is guaranteed, so this ends.
fn approach(p: f64, dir: f64, f: impl Fn(f64) -> f64, accept: impl Fn(f64) -> bool) -> f64 {
    approach_within(p, dir, 1.0 + p.abs(), f, accept)
}

fn approach_within(p: f64, dir: f64, start: f64, f: impl Fn(f64) -> f64, accept: impl Fn(f64) -> bool) -> f64 {
    let mut delta = start;
    for _ in 0..MAX_BRACKET_STEPS {
        let x = p + dir * delta;
        if x != p && accept(f(x)) {
            return x;
        }
        if x == p {
            break;
        }
        delta *= 0.5;
    }
    // The offset underflowed past the pole: use the adjacent float.
    let x = next_toward(p, dir);
    debug_assert!(accept(f(x)));
    x
}

// Walks away from `start` in direction `dir` with doubling steps until `accept(f(x))`.
fn expand(start: f64, dir: f64, f: impl Fn(f64) -> f64, accept: impl Fn(f64) -> bool) -> f64 {
    let mut step = 1.0 + start.abs();
    let mut x = start + dir * step;
    for _ in 0..MAX_BRACKET_STEPS {
        if accept(f(x)) {
            return x;
        }
        step *= 2.0;
        x = start + dir * step;
    }
    panic!("no sign change found expanding from {start}");
}

fn next_toward(x: f64, dir: f64) -> f64 {
    if dir > 0.0 {
        x.next_up()
    } else {
        x.next_down()
    }
}

// Bisection on an increasing function with `f(lo) < 0 < f(hi)`, then one
// guarded Newton step. Returns the candidate with the smallest residual.
fn bisect_increasing(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BRACKET_RTOL * (1.0 + mid.abs()) || mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = mid;
    let mut best_res = f(mid).abs();
    for x in [lo, hi] {
        let r = f(x).abs();
        if r < best_res {
            best = x;
            best_res = r;
        }
    }
    let d = df(best);
    if d.is_finite() && d != 0.0 {
        let x = best - f(best) / d;
        if x >= lo && x <= hi && f(x).abs() < best_res {
            best = x;
        }
    }
    best
}

/// Which of the two norm polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtKind {
    /// `u(x) = ||A_d^{-1}||^{-1} x^d - ||A_{d-1}|| x^{d-1} - ... - ||A_0||`
    Upper,
    /// `l(x) = ||A_d|| x^d + ... + ||A_1|| x - ||A_0^{-1}||^{-1}`
    Lower,
}

/// Scalar polynomial whose unique positive root bounds eigenvalue moduli of a
/// matrix polynomial from above (`Upper`) or below (`Lower`).
#[derive(Debug, Clone, PartialEq)]
pub struct HtPolynomial {
    kind: HtKind,
    /// Signed coefficients, ascending powers.
    coeffs: Vec<f64>,
}

impl HtPolynomial {
    /// `u` from `||A_d^{-1}||^{-1}` and `[||A_0||, ..., ||A_{d-1}||]`.
    pub fn upper(leading_inv_norm_inv: f64, lower_norms: &[f64]) -> Self {
        let mut coeffs: Vec<f64> = lower_norms.iter().map(|&x| -x).collect();
        coeffs.push(leading_inv_norm_inv);
        Self {
            kind: HtKind::Upper,
            coeffs,
        }
    }

    /// `l` from `[||A_1||, ..., ||A_d||]` and `||A_0^{-1}||^{-1}`.
    pub fn lower(upper_norms: &[f64], trailing_inv_norm_inv: f64) -> Self {
        let mut coeffs = vec![-trailing_inv_norm_inv];
        coeffs.extend_from_slice(upper_norms);
        Self {
            kind: HtKind::Lower,
            coeffs,
        }
    }

    pub fn kind(&self) -> HtKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, &c)| acc * x + i as f64 * c)
    }

    /// `Σ |c_i| x^i`, the scale for residuals at `x`.
    pub fn residual_scale(&self, x: f64) -> f64 {
        let x = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c.abs())
    }

    /// The unique positive root.
    ///
    /// An upper polynomial whose lower coefficients all vanish returns 0
    /// (every eigenvalue is zero). Fails on a zero leading coefficient
    /// (`Upper`) or a nonnegative constant term (`Lower`).
    pub fn positive_root(&self) -> Result<f64> {
        if self.degree() == 0 {
            return Err(Error::InvalidArgument("constant polynomial has no root".into()));
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        match self.kind {
            HtKind::Upper => {
                let lead = *self.coeffs.last().unwrap();
                if lead <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "upper polynomial has a nonpositive leading coefficient (singular leading matrix coefficient)"
                            .into(),
                    ));
                }
                if self.coeffs[..self.degree()].iter().any(|&c| c > 0.0) {
                    return Err(Error::InvalidArgument("upper polynomial has a positive lower coefficient".into()));
                }
                if self.coeffs[..self.degree()].iter().all(|&c| c == 0.0) {
                    return Ok(0.0);
                }
            }
            HtKind::Lower => {
                if self.coeffs[0] >= 0.0 {
                    return Err(Error::InvalidArgument(
                        "lower polynomial needs a negative constant term (singular trailing matrix coefficient)".into(),
                    ));
                }
                if self.coeffs[1..].iter().any(|&c| c < 0.0) {
                    return Err(Error::InvalidArgument("lower polynomial has a negative coefficient".into()));
                }
                if self.coeffs[1..].iter().all(|&c| c == 0.0) {
                    return Err(Error::InvalidArgument("lower polynomial has no positive root".into()));
                }
            }
        }
        // Dropping an x^k factor leaves the same positive root and a negative
        // value at 0; one sign change, so the root is bracketed by [0, hi].
        let k = self.coeffs.iter().position(|&c| c != 0.0).unwrap();
        let g = Self {
            kind: self.kind,
            coeffs: self.coeffs[k..].to_vec(),
        };
        let f = |x: f64| g.evaluate(x);
        let mut hi = 1.0;
        for _ in 0..MAX_BRACKET_STEPS {
            if f(hi) > 0.0 {
                break;
            }
            hi *= 2.0;
        }
        Ok(bisect_increasing(f, |x| g.derivative(x), 0.0, hi))
    }
}

/// Free-function form of [`HtPolynomial::positive_root`].
pub fn ht_positive_root(p: &HtPolynomial) -> Result<f64> {
    p.positive_root()
}
