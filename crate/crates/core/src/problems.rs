//! Concrete instances: the loaded-string finite element problem, the six small
//! comparison examples, and seeded random generators for property suites.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, spectral_norm_power, vec_norm, ComplexMatrix, FnOperator, PowerIteration, C64};
use crate::mrf::{MatrixRationalFunction, RationalTerm};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Eigenvibration of a string with a load of mass attached by a spring,
/// discretized with `n` linear finite elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringProblemSpec {
    pub n: usize,
    pub alpha: C64,
}

impl StringProblemSpec {
    pub fn new(n: usize, alpha: C64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("string problem needs n >= 2, got {n}")));
        }
        if alpha == ZERO {
            return Err(Error::InvalidArgument("string problem needs a nonzero pole".into()));
        }
        Ok(Self { n, alpha })
    }

    /// The stiffness / mass / spring matrices `(A, B, C)` of `A - Bλ + C λ/(λ - α)`.
    pub fn matrices(&self) -> StringMatrices {
        let n = self.n;
        let h = 1.0 / n as f64;
        let stiffness = Tridiagonal::toeplitz(n, -1.0 / h, 2.0 / h, -1.0 / h).with_last_diag(1.0 / h);
        let mass = Tridiagonal::toeplitz(n, h / 6.0, 4.0 * h / 6.0, h / 6.0).with_last_diag(2.0 * h / 6.0);
        StringMatrices { stiffness, mass }
    }
}

/// Symmetric-pattern tridiagonal matrix with real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn toeplitz(n: usize, sub: f64, diag: f64, sup: f64) -> Self {
        Self {
            sub: vec![sub; n - 1],
            diag: vec![diag; n],
            sup: vec![sup; n - 1],
        }
    }

    fn with_last_diag(mut self, v: f64) -> Self {
        *self.diag.last_mut().unwrap() = v;
        self
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let v = if i == j {
                self.diag[i]
            } else if j == i + 1 {
                self.sup[i]
            } else if i == j + 1 {
                self.sub[j]
            } else {
                0.0
            };
            C64::new(v, 0.0)
        })
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = x[i] * self.diag[i];
                if i > 0 {
                    s += x[i - 1] * self.sub[i - 1];
                }
                if i + 1 < n {
                    s += x[i + 1] * self.sup[i];
                }
                s
            })
            .collect()
    }

    /// Thomas algorithm; stable for the diagonally dominant matrices used here.
    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut c = vec![0.0; n];
        let mut d = vec![ZERO; n];
        c[0] = if n > 1 { self.sup[0] / self.diag[0] } else { 0.0 };
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let denom = self.diag[i] - self.sub[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.sup[i] / denom;
            }
            d[i] = (rhs[i] - d[i - 1] * self.sub[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= next * c[i];
        }
        d
    }

    /// `min_i (|d_i| - Σ_{j≠i} |a_ij|)`; positive means strictly diagonally dominant.
    pub fn dominance_margin(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut off = 0.0;
                if i > 0 {
                    off += self.sub[i - 1].abs();
                }
                if i + 1 < n {
                    off += self.sup[i].abs();
                }
                self.diag[i].abs() - off
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StringMatrices {
    /// `A`
    pub stiffness: Tridiagonal,
    /// `B`
    pub mass: Tridiagonal,
}

impl StringMatrices {
    /// `A + C` with `C = e_n e_n^T`.
    fn stiffness_plus_spring(&self) -> Tridiagonal {
        let mut t = self.stiffness.clone();
        *t.diag.last_mut().unwrap() += 1.0;
        t
    }

    /// Dense `C = e_n e_n^T`.
    pub fn spring_dense(&self) -> ComplexMatrix {
        let n = self.stiffness.n();
        let mut c = ComplexMatrix::zeros(n, n);
        c[(n - 1, n - 1)] = C64::new(1.0, 0.0);
        c
    }
}

/// Rewrites `A - Bλ + C λ/(λ - α)` (right-multiplied by `-B^{-1}`) as
/// `-B0 + λI + B1/(λ - α)` with `B0 = (A + C) B^{-1}` and `B1 = -α C B^{-1}`.
pub fn string_problem(spec: &StringProblemSpec) -> Result<MatrixRationalFunction> {
    let n = spec.n;
    let mats = spec.matrices();
    let b = mats.mass.to_dense();
    let apc = mats.stiffness_plus_spring().to_dense();
    // A + C and B are symmetric, so (A + C) B^{-1} = (B^{-1} (A + C))^T.
    let b0 = linalg::solve(&b, &apc)?.transpose();
    // C B^{-1} keeps only row n, which is (B^{-1} e_n)^T.
    let mut en = vec![ZERO; n];
    en[n - 1] = C64::new(1.0, 0.0);
    let w = mats.mass.solve(&en);
    let mut b1 = ComplexMatrix::zeros(n, n);
    for (j, &wj) in w.iter().enumerate() {
        b1[(n - 1, j)] = -spec.alpha * wj;
    }
    MatrixRationalFunction::new(b0, vec![RationalTerm::new(spec.alpha, b1)])
}

/// Spectral norms needed by the three upper bounds on the string problem,
/// computed without forming any dense matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringNorms {
    /// `||E||_2` of the companion split.
    pub e: PowerIteration,
    /// `||B0||_2`
    pub b0: PowerIteration,
    /// `||B1||_2` (exact: `B1` has rank one).
    pub b1: f64,
    /// `||B0 + αI||_2`
    pub b0_shifted: PowerIteration,
    /// `||α B0 + B1||_2`
    pub constant_coeff: PowerIteration,
}

impl StringNorms {
    pub fn all_converged(&self) -> bool {
        self.e.converged && self.b0.converged && self.b0_shifted.converged && self.constant_coeff.converged
    }
}

/// Matrix-free spectral norms for the string problem; each product costs
/// `O(n)` through tridiagonal solves, so this scales to large `n`.
pub fn string_norms_matrix_free(spec: &StringProblemSpec, tol: f64, max_iter: usize) -> StringNorms {
    let n = spec.n;
    let alpha = spec.alpha;
    let mats = spec.matrices();
    let apc = mats.stiffness_plus_spring();
    let mass = &mats.mass;
    let mut en = vec![ZERO; n];
    en[n - 1] = C64::new(1.0, 0.0);
    let w = mass.solve(&en);

    // B0 x = (A + C) B^{-1} x ;  B0^H y = B^{-1} (A + C) y  (real symmetric factors)
    let b0 = |x: &[C64]| apc.mul_vec(&mass.solve(x));
    let b0_adj = |y: &[C64]| mass.solve(&apc.mul_vec(y));
    // B1 x = -α e_n (w^T x) ;  B1^H y = -conj(α) w y_n
    let b1 = |x: &[C64]| {
        let s: C64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
        let mut out = vec![ZERO; n];
        out[n - 1] = -alpha * s;
        out
    };
    let b1_adj = |y: &[C64]| w.iter().map(|&wj| -alpha.conj() * wj * y[n - 1]).collect::<Vec<_>>();

    let add = |a: Vec<C64>, b: Vec<C64>| a.into_iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
    let axpy = |s: C64, x: &[C64], y: Vec<C64>| x.iter().zip(y).map(|(&a, b)| s * a + b).collect::<Vec<_>>();

    let b0_op = FnOperator::new(n, n, b0, b0_adj);
    let shifted_op = FnOperator::new(n, n, |x: &[C64]| axpy(alpha, x, b0(x)), |y: &[C64]| {
        axpy(alpha.conj(), y, b0_adj(y))
    });
    let constant_op = FnOperator::new(
        n,
        n,
        |x: &[C64]| add(b0(x).into_iter().map(|z| alpha * z).collect(), b1(x)),
        |y: &[C64]| add(b0_adj(y).into_iter().map(|z| alpha.conj() * z).collect(), b1_adj(y)),
    );
    // E = [[0, -I], [B1, B0]]
    let e_op = FnOperator::new(
        2 * n,
        2 * n,
        |x: &[C64]| {
            let (x1, x2) = x.split_at(n);
            let mut out: Vec<C64> = x2.iter().map(|&z| -z).collect();
            out.extend(add(b1(x1), b0(x2)));
            out
        },
        |y: &[C64]| {
            let (y1, y2) = y.split_at(n);
            let mut out = b1_adj(y2);
            out.extend(axpy(C64::new(-1.0, 0.0), y1, b0_adj(y2)));
            out
        },
    );

    StringNorms {
        e: spectral_norm_power(&e_op, tol, max_iter),
        b0: spectral_norm_power(&b0_op, tol, max_iter),
        b1: alpha.norm() * vec_norm(&w),
        b0_shifted: spectral_norm_power(&shifted_op, tol, max_iter),
        constant_coeff: spectral_norm_power(&constant_op, tol, max_iter),
    }
}

/// The six small examples contrasting the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RemarkId {
    R1a,
    R1b,
    R2a,
    R2b,
    R3a,
    R3b,
}

impl RemarkId {
    pub const ALL: [RemarkId; 6] = [
        RemarkId::R1a,
        RemarkId::R1b,
        RemarkId::R2a,
        RemarkId::R2b,
        RemarkId::R3a,
        RemarkId::R3b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RemarkId::R1a => "1a",
            RemarkId::R1b => "1b",
            RemarkId::R2a => "2a",
            RemarkId::R2b => "2b",
            RemarkId::R3a => "3a",
            RemarkId::R3b => "3b",
        }
    }
}

impl fmt::Display for RemarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RemarkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RemarkId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// 1x: nilpotent `B0`, projector `B1`, `α ∈ {0.1, 1}`.
/// 2x / 3x: `B0 = B1 = I_2` with `α ∈ {1, i}` and `{-1.5, 1.5}`.
pub fn remark_example(id: RemarkId) -> MatrixRationalFunction {
    let (b0, b1, alpha) = match id {
        RemarkId::R1a | RemarkId::R1b => {
            let b0 = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
            let b1 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
            let alpha = if id == RemarkId::R1a { 0.1 } else { 1.0 };
            (b0, b1, C64::new(alpha, 0.0))
        }
        _ => {
            let alpha = match id {
                RemarkId::R2a => C64::new(1.0, 0.0),
                RemarkId::R2b => C64::new(0.0, 1.0),
                RemarkId::R3a => C64::new(-1.5, 0.0),
                _ => C64::new(1.5, 0.0),
            };
            (ComplexMatrix::identity(2), ComplexMatrix::identity(2), alpha)
        }
    };
    MatrixRationalFunction::new(b0, vec![RationalTerm::new(alpha, b1)]).expect("remark examples are well formed")
}

/// Where random poles are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoleRegion {
    /// Uniform radius in `[inner, outer]`, uniform angle.
    Annulus { inner: f64, outer: f64 },
    /// Uniform in a rectangle of the complex plane.
    Rect { re: (f64, f64), im: (f64, f64) },
    /// Uniform on the real segment.
    Real { lo: f64, hi: f64 },
}

impl Default for PoleRegion {
    fn default() -> Self {
        PoleRegion::Annulus { inner: 0.1, outer: 10.0 }
    }
}

impl PoleRegion {
    fn sample(&self, rng: &mut ChaCha8Rng) -> C64 {
        match *self {
            PoleRegion::Annulus { inner, outer } => {
                let r = rng.random_range(inner..=outer);
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                C64::from_polar(r, theta)
            }
            PoleRegion::Rect { re, im } => C64::new(rng.random_range(re.0..=re.1), rng.random_range(im.0..=im.1)),
            PoleRegion::Real { lo, hi } => C64::new(rng.random_range(lo..=hi), 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    /// Independent standard normal real and imaginary parts.
    Gaussian,
    /// Haar-distributed unitary matrices.
    HaarUnitary,
}

/// Minimum pole separation enforced by [`random_mrf`].
pub const POLE_SEPARATION: f64 = 1e-6;

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar unitary: QR of a complex Gaussian matrix with the phases of `diag(R)` folded into `Q`.
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let (q, r) = linalg::qr(&gaussian_matrix(n, rng));
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        })
        .collect();
    ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}

/// Deterministic random instance for a given seed.
pub fn random_mrf(n: usize, m: usize, region: PoleRegion, kind: CoeffKind, seed: u64) -> MatrixRationalFunction {
    assert!(n >= 1, "n must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeff = |rng: &mut ChaCha8Rng| match kind {
        CoeffKind::Gaussian => gaussian_matrix(n, rng),
        CoeffKind::HaarUnitary => haar_unitary(n, rng),
    };
    let b0 = coeff(&mut rng);
    let mut poles: Vec<C64> = Vec::with_capacity(m);
    while poles.len() < m {
        let p = region.sample(&mut rng);
        if poles.iter().all(|&q| (p - q).norm() > POLE_SEPARATION) {
            poles.push(p);
        }
    }
    let terms = poles.into_iter().map(|p| RationalTerm::new(p, coeff(&mut rng))).collect();
    MatrixRationalFunction::new(b0, terms).expect("random instance is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::unitary_dominance_check;
    use crate::linalg::{induced_norm, unitarity_defect, NormKind};

    #[test]
    fn string_matrices_n2() {
        let spec = StringProblemSpec::new(2, C64::new(1.0, 0.0)).unwrap();
        let m = spec.matrices();
        let a = ComplexMatrix::from_real_rows(&[&[4.0, -2.0], &[-2.0, 2.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[4.0 / 12.0, 1.0 / 12.0], &[1.0 / 12.0, 2.0 / 12.0]]).unwrap();
        assert!((&m.stiffness.to_dense() - &a).max_abs() < 1e-15);
        assert!((&m.mass.to_dense() - &b).max_abs() < 1e-15);
        let c = m.spring_dense();
        assert_eq!(c[(1, 1)], C64::new(1.0, 0.0));
        assert_eq!(c.max_abs(), 1.0);
    }

    #[test]
    fn string_structure() {
        for n in [2, 3, 7, 40] {
            let m = StringProblemSpec::new(n, C64::new(1.0, 0.0)).unwrap().matrices();
            assert!(m.mass.dominance_margin() > 0.0);
            let a = m.stiffness.to_dense();
            assert_eq!(a, a.transpose());
            let sv = linalg::singular_values(&m.spring_dense());
            assert_eq!(sv.iter().filter(|&&s| s > 1e-14).count(), 1);
        }
    }

    #[test]
    fn string_problem_rejects_bad_spec() {
        assert!(StringProblemSpec::new(1, C64::new(1.0, 0.0)).is_err());
        assert!(StringProblemSpec::new(4, ZERO).is_err());
    }

    #[test]
    fn thomas_solve_matches_dense() {
        let t = StringProblemSpec::new(9, C64::new(1.0, 0.0)).unwrap().matrices().mass;
        let rhs: Vec<C64> = (0..9).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let x = t.solve(&rhs);
        let back = t.to_dense().mul_vec(&x);
        for (a, b) in back.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn string_coefficients_match_explicit_inverse() {
        let spec = StringProblemSpec::new(6, C64::new(1.0, 0.0)).unwrap();
        let t = string_problem(&spec).unwrap();
        let m = spec.matrices();
        let binv = linalg::inverse(&m.mass.to_dense()).unwrap();
        let apc = &m.stiffness.to_dense() + &m.spring_dense();
        let b0 = linalg::matmul(&apc, &binv).unwrap();
        let b1 = linalg::matmul(&m.spring_dense(), &binv).unwrap().scale(C64::new(-1.0, 0.0));
        assert!((t.b0() - &b0).max_abs() <= 1e-10 * b0.max_abs());
        assert!((&t.terms()[0].coeff - &b1).max_abs() <= 1e-10 * b1.max_abs());
    }

    #[test]
    fn matrix_free_norms_match_dense() {
        let spec = StringProblemSpec::new(30, C64::new(1.0, 0.0)).unwrap();
        let t = string_problem(&spec).unwrap();
        let norms = string_norms_matrix_free(&spec, 1e-14, 200_000);
        let s = NormKind::Spectral;
        let (_, e) = t.perturbation_split();
        let b0 = t.b0();
        let b1 = &t.terms()[0].coeff;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-7 * b;
        assert!(close(norms.e.value, induced_norm(&e, s)));
        assert!(close(norms.b0.value, induced_norm(b0, s)));
        assert!(close(norms.b1, induced_norm(b1, s)));
        assert!(close(norms.b0_shifted.value, induced_norm(&b0.shift_diagonal(spec.alpha), s)));
        assert!(close(norms.constant_coeff.value, induced_norm(&(&b0.scale(spec.alpha) + b1), s)));
    }

    #[test]
    fn remark_ids_parse() {
        for id in RemarkId::ALL {
            assert_eq!(id.as_str().parse::<RemarkId>().unwrap(), id);
        }
        assert!(matches!("4c".parse::<RemarkId>(), Err(Error::UnknownExample(_))));
        let t = remark_example(RemarkId::R2b);
        assert_eq!(t.terms()[0].pole, C64::new(0.0, 1.0));
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_mrf(3, 2, PoleRegion::default(), CoeffKind::Gaussian, 42);
        let b = random_mrf(3, 2, PoleRegion::default(), CoeffKind::Gaussian, 42);
        let c = random_mrf(3, 2, PoleRegion::default(), CoeffKind::Gaussian, 43);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.validate().is_ok());
        for p in a.poles() {
            assert!(p.norm() >= 0.1 && p.norm() <= 10.0);
        }
    }

    #[test]
    fn haar_coefficients_are_unitary() {
        let t = random_mrf(4, 3, PoleRegion::default(), CoeffKind::HaarUnitary, 7);
        assert!(unitarity_defect(t.b0()) <= 1e-12);
        for term in t.terms() {
            assert!(unitarity_defect(&term.coeff) <= 1e-12);
        }
        assert_eq!(unitary_dominance_check(&t), Ok(true));
    }
}
