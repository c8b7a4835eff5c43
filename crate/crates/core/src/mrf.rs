//! Matrix rational functions `T(λ) = -B0 + λI + Σ Bi/(λ - αi)` and the
//! structures built from them: the block companion matrix, the diagonal
//! plus perturbation split, and the pole-cleared matrix polynomial.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};

/// `|λ - α| <= POLE_PROXIMITY_RTOL * (1 + |α|)` is treated as evaluating at the pole.
pub const POLE_PROXIMITY_RTOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// One `Bi / (λ - αi)` summand.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTerm {
    pub pole: C64,
    pub coeff: ComplexMatrix,
}

impl RationalTerm {
    pub fn new(pole: C64, coeff: ComplexMatrix) -> Self {
        Self { pole, coeff }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicatePole { first: usize, second: usize, pole: C64 },
    Dimension { what: String, expected: usize, got: (usize, usize) },
    NonFinitePole { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePole { first, second, pole } => write!(
                f,
                "duplicate pole {pole} at positions {} and {}",
                first + 1,
                second + 1
            ),
            Violation::Dimension { what, expected, got } => write!(
                f,
                "dimension of {what} is {}x{}, expected {expected}x{expected}",
                got.0, got.1
            ),
            Violation::NonFinitePole { index } => write!(f, "pole {} is not finite", index + 1),
        }
    }
}

/// `T(λ) = -B0 + λI + Σ_i Bi / (λ - αi)` with `n x n` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRationalFunction {
    n: usize,
    b0: ComplexMatrix,
    terms: Vec<RationalTerm>,
}

impl MatrixRationalFunction {
    /// Validating constructor.
    pub fn new(b0: ComplexMatrix, terms: Vec<RationalTerm>) -> Result<Self> {
        let t = Self::new_unchecked(b0.rows(), b0, terms);
        t.validate().map_err(|v| Error::InvalidProblem(v.iter().map(ToString::to_string).collect()))?;
        Ok(t)
    }

    /// Assembles without checks; pair with [`validate`](Self::validate).
    pub fn new_unchecked(n: usize, b0: ComplexMatrix, terms: Vec<RationalTerm>) -> Self {
        Self { n, b0, terms }
    }

    /// The degenerate linear case `T(λ) = λI - B0`.
    pub fn linear(b0: ComplexMatrix) -> Result<Self> {
        Self::new(b0, Vec::new())
    }

    /// Lists every structural problem; an empty list means the function is well formed.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let n = self.n;
        if self.b0.shape() != (n, n) {
            out.push(Violation::Dimension {
                what: "B0".into(),
                expected: n,
                got: self.b0.shape(),
            });
        }
        for (i, term) in self.terms.iter().enumerate() {
            if term.coeff.shape() != (n, n) {
                out.push(Violation::Dimension {
                    what: format!("B{}", i + 1),
                    expected: n,
                    got: term.coeff.shape(),
                });
            }
            if !term.pole.is_finite() {
                out.push(Violation::NonFinitePole { index: i });
            }
        }
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if self.terms[i].pole == self.terms[j].pole {
                    out.push(Violation::DuplicatePole {
                        first: i,
                        second: j,
                        pole: self.terms[i].pole,
                    });
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of poles.
    #[inline]
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn b0(&self) -> &ComplexMatrix {
        &self.b0
    }

    pub fn terms(&self) -> &[RationalTerm] {
        &self.terms
    }

    pub fn poles(&self) -> impl Iterator<Item = C64> + '_ {
        self.terms.iter().map(|t| t.pole)
    }

    /// `max |αi|`, zero when there are no poles.
    pub fn max_pole_modulus(&self) -> f64 {
        self.poles().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// `T(λ)`; fails within the pole-proximity threshold of any pole.
    pub fn evaluate(&self, lambda: C64) -> Result<ComplexMatrix> {
        let mut out = (-&self.b0).shift_diagonal(lambda);
        for term in &self.terms {
            let d = lambda - term.pole;
            if d.norm() <= POLE_PROXIMITY_RTOL * (1.0 + term.pole.norm()) {
                return Err(Error::PoleProximity {
                    point: lambda,
                    pole: term.pole,
                    distance: d.norm(),
                });
            }
            out = &out + &term.coeff.scale(ONE / d);
        }
        Ok(out)
    }

    /// The `(m+1)n` block companion matrix `C_T` with `λI - C_T` a polynomial
    /// system matrix of `T`:
    ///
    /// ```text
    /// [ α1 I              -I ]
    /// [        ...        -I ]
    /// [             αm I  -I ]
    /// [ B1   ...   Bm     B0 ]
    /// ```
    pub fn companion(&self) -> ComplexMatrix {
        let (a, e) = self.perturbation_split();
        &a + &e
    }

    /// Splits `C_T = A + E` with `A = diag(α1 I, ..., αm I, 0)`.
    pub fn perturbation_split(&self) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.n;
        let m = self.m();
        let dim = (m + 1) * n;
        let mut a = ComplexMatrix::zeros(dim, dim);
        let mut e = ComplexMatrix::zeros(dim, dim);
        for (i, term) in self.terms.iter().enumerate() {
            for k in 0..n {
                a[(i * n + k, i * n + k)] = term.pole;
                e[(i * n + k, m * n + k)] = -ONE;
            }
            e.set_block(m * n, i * n, &term.coeff);
        }
        e.set_block(m * n, m * n, &self.b0);
        (a, e)
    }

    /// `P(λ) = Π(λ - αi) T(λ)`, a monic matrix polynomial of degree `m + 1`.
    pub fn to_polynomial(&self) -> MatrixPolynomial {
        let n = self.n;
        let m = self.m();
        let poles: Vec<C64> = self.poles().collect();
        let full = poly_from_roots(&poles);
        let identity = ComplexMatrix::identity(n);

        let mut coeffs: Vec<ComplexMatrix> = (0..=m + 1)
            .map(|k| {
                let mut c = ComplexMatrix::zeros(n, n);
                if k >= 1 {
                    c = &c + &identity.scale(full[k - 1]);
                }
                if k <= m {
                    c = &c - &self.b0.scale(full[k]);
                }
                c
            })
            .collect();

        for (i, term) in self.terms.iter().enumerate() {
            let others: Vec<C64> = poles
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p)
                .collect();
            for (k, s) in poly_from_roots(&others).into_iter().enumerate() {
                coeffs[k] = &coeffs[k] + &term.coeff.scale(s);
            }
        }
        // The leading coefficient is exactly the identity; keep it that way.
        coeffs[m + 1] = identity;
        MatrixPolynomial { coeffs }
    }
}

/// Ascending coefficients of `Π (x - r)`; these are the signed elementary
/// symmetric polynomials of the roots.
pub fn poly_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![ONE];
    for &r in roots {
        let mut next = vec![ZERO; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= r * ck;
        }
        c = next;
    }
    c
}

/// `P(λ) = Σ coeffs[i] λ^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("matrix polynomial needs a coefficient".into()))?;
        if !first.is_square() {
            return Err(Error::NotSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        if let Some(bad) = coeffs.iter().find(|c| c.shape() != first.shape()) {
            return Err(Error::Dimension {
                context: "matrix polynomial coefficients",
                left: first.shape(),
                right: bad.shape(),
            });
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn n(&self) -> usize {
        self.coeffs[0].rows()
    }

    /// Horner evaluation.
    pub fn evaluate(&self, lambda: C64) -> ComplexMatrix {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &acc.scale(lambda) + c;
        }
        acc
    }

    /// Standard block companion linearization; its eigenvalues are those of `P`.
    ///
    /// Fails when the leading coefficient is singular.
    pub fn companion(&self) -> Result<ComplexMatrix> {
        let n = self.n();
        let d = self.degree();
        if d == 0 {
            return Err(Error::InvalidArgument("constant matrix polynomial has no linearization".into()));
        }
        let lead = &self.coeffs[d];
        let identity = ComplexMatrix::identity(n);
        let monic: Vec<ComplexMatrix> = if *lead == identity {
            self.coeffs[..d].to_vec()
        } else {
            self.coeffs[..d]
                .iter()
                .map(|c| linalg::solve(lead, c))
                .collect::<Result<_>>()?
        };
        let mut out = ComplexMatrix::zeros(d * n, d * n);
        for blk in 0..d - 1 {
            out.set_block(blk * n, (blk + 1) * n, &identity);
        }
        for (k, c) in monic.iter().enumerate() {
            out.set_block((d - 1) * n, k * n, &(-c));
        }
        Ok(out)
    }
}

/// Free-function form of [`MatrixPolynomial::evaluate`].
pub fn poly_evaluate(p: &MatrixPolynomial, lambda: C64) -> ComplexMatrix {
    p.evaluate(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar(x: C64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&[x])
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn validate_reports_violations() {
        let eye = ComplexMatrix::identity(2);
        let ok = MatrixRationalFunction::new(eye.clone(), vec![RationalTerm::new(c(1.0, 0.0), eye.clone())]);
        assert!(ok.is_ok());

        let dup = MatrixRationalFunction::new_unchecked(
            2,
            eye.clone(),
            vec![
                RationalTerm::new(c(1.0, 0.0), eye.clone()),
                RationalTerm::new(c(1.0, 0.0), eye.clone()),
            ],
        );
        let v = dup.validate().unwrap_err();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("duplicate pole"));

        let bad = MatrixRationalFunction::new_unchecked(
            2,
            eye.clone(),
            vec![RationalTerm::new(c(1.0, 0.0), ComplexMatrix::identity(3))],
        );
        let v = bad.validate().unwrap_err();
        assert!(v[0].to_string().contains("dimension"));

        let err = MatrixRationalFunction::new(
            eye.clone(),
            vec![
                RationalTerm::new(c(2.0, 1.0), eye.clone()),
                RationalTerm::new(c(2.0, 1.0), eye),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidProblem(_)));
    }

    #[test]
    fn evaluate_cases() {
        let t = MatrixRationalFunction::linear(ComplexMatrix::identity(3)).unwrap();
        assert_eq!(t.evaluate(c(1.0, 0.0)).unwrap().max_abs(), 0.0);

        let t = MatrixRationalFunction::new(
            scalar(c(0.0, 0.0)),
            vec![RationalTerm::new(c(0.0, 0.0), scalar(c(1.0, 0.0)))],
        )
        .unwrap();
        assert_eq!(t.evaluate(c(2.0, 0.0)).unwrap()[(0, 0)], c(2.5, 0.0));
        assert!(matches!(t.evaluate(c(0.0, 0.0)), Err(Error::PoleProximity { .. })));
        assert!(matches!(t.evaluate(c(1e-13, 0.0)), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn companion_scalar_layout() {
        let (b0, b1, alpha) = (c(0.3, 0.1), c(-2.0, 0.5), c(1.5, -0.25));
        let t = MatrixRationalFunction::new(scalar(b0), vec![RationalTerm::new(alpha, scalar(b1))]).unwrap();
        let ct = t.companion();
        assert_eq!(ct.shape(), (2, 2));
        assert_eq!(ct[(0, 0)], alpha);
        assert_eq!(ct[(0, 1)], -ONE);
        assert_eq!(ct[(1, 0)], b1);
        assert_eq!(ct[(1, 1)], b0);

        let (a, e) = t.perturbation_split();
        assert_eq!(a, ComplexMatrix::from_diag(&[alpha, ZERO]));
        assert_eq!(e[(0, 0)], ZERO);
        assert_eq!(e[(0, 1)], -ONE);
        assert_eq!(e[(1, 0)], b1);
        assert_eq!(e[(1, 1)], b0);
    }

    #[test]
    fn companion_degenerate_linear() {
        let b0 = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let t = MatrixRationalFunction::linear(b0.clone()).unwrap();
        assert_eq!(t.companion(), b0);
        let (a, e) = t.perturbation_split();
        assert_eq!(a.max_abs(), 0.0);
        assert_eq!(e, b0);
    }

    #[test]
    fn companion_eigenvalues_scalar_oracle() {
        // det(λI - C_T) = (λ - α)(λ - b0) + b1 = λ^2 - 1 for b0 = 0, b1 = -1, α = 0.
        let t = MatrixRationalFunction::new(
            scalar(c(0.0, 0.0)),
            vec![RationalTerm::new(c(0.0, 0.0), scalar(c(-1.0, 0.0)))],
        )
        .unwrap();
        let ev = sorted(eigenvalues(&t.companion()).unwrap());
        assert!((ev[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn split_sums_to_companion_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 0..4 {
            let n = 3;
            let terms = (0..m)
                .map(|i| RationalTerm::new(c(i as f64 + 0.5, -0.25 * i as f64), random_matrix(&mut rng, n)))
                .collect();
            let t = MatrixRationalFunction::new(random_matrix(&mut rng, n), terms).unwrap();
            let (a, e) = t.perturbation_split();
            let ct = t.companion();
            assert_eq!(ct.rows(), (m + 1) * n);
            assert_eq!(&a + &e, ct);
        }
    }

    #[test]
    fn to_polynomial_first_order_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (b0, b1) = (random_matrix(&mut rng, 2), random_matrix(&mut rng, 2));
        let alpha = c(0.7, -1.2);
        let t = MatrixRationalFunction::new(b0.clone(), vec![RationalTerm::new(alpha, b1.clone())]).unwrap();
        let p = t.to_polynomial();
        assert_eq!(p.degree(), 2);
        let want0 = &b0.scale(alpha) + &b1;
        let want1 = -&b0.shift_diagonal(alpha);
        assert!((&p.coeffs()[0] - &want0).max_abs() < 1e-15);
        assert!((&p.coeffs()[1] - &want1).max_abs() < 1e-15);
        assert_eq!(p.coeffs()[2], ComplexMatrix::identity(2));

        let lin = MatrixRationalFunction::linear(b0.clone()).unwrap().to_polynomial();
        assert_eq!(lin.coeffs(), &[-&b0, ComplexMatrix::identity(2)]);
    }

    #[test]
    fn to_polynomial_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for m in 1..=3 {
            let n = 3;
            let terms = (0..m)
                .map(|_| RationalTerm::new(c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)), random_matrix(&mut rng, n)))
                .collect();
            let t = MatrixRationalFunction::new(random_matrix(&mut rng, n), terms).unwrap();
            let p = t.to_polynomial();
            for _ in 0..10 {
                let lam = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let scale: C64 = t.poles().map(|a| lam - a).product();
                let want = t.evaluate(lam).unwrap().scale(scale);
                let got = poly_evaluate(&p, lam);
                let rel = (&got - &want).max_abs() / want.max_abs();
                assert!(rel <= 1e-10, "m={m} rel={rel}");
            }
        }
    }

    #[test]
    fn poly_evaluate_cases() {
        let k = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let constant = MatrixPolynomial::new(vec![k.clone()]).unwrap();
        assert_eq!(constant.evaluate(c(7.0, -2.0)), k);
        let lin = MatrixPolynomial::new(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(lin.evaluate(c(3.0, 0.0)), ComplexMatrix::identity(2).scale(c(3.0, 0.0)));
        assert!(MatrixPolynomial::new(vec![k.clone(), ComplexMatrix::identity(3)]).is_err());
    }

    #[test]
    fn polynomial_companion_matches_rational_companion() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 2;
        let terms = vec![
            RationalTerm::new(c(1.0, 0.5), random_matrix(&mut rng, n)),
            RationalTerm::new(c(-0.5, 1.0), random_matrix(&mut rng, n)),
        ];
        let t = MatrixRationalFunction::new(random_matrix(&mut rng, n), terms).unwrap();
        let a = sorted(eigenvalues(&t.companion()).unwrap());
        let b = sorted(eigenvalues(&t.to_polynomial().companion().unwrap()).unwrap());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-8, "{x} {y}");
        }
    }

    #[test]
    fn non_monic_companion_uses_leading_solve() {
        let two = ComplexMatrix::identity(1).scale(c(2.0, 0.0));
        // 2x - 4 has root 2
        let p = MatrixPolynomial::new(vec![scalar(c(-4.0, 0.0)), two]).unwrap();
        let ev = eigenvalues(&p.companion().unwrap()).unwrap();
        assert!((ev[0] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn elementary_symmetric_expansion() {
        let p = poly_from_roots(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(p, vec![c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(poly_from_roots(&[]), vec![ONE]);
    }
}
