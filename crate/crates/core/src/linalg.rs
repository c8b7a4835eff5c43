//! Dense complex matrices and the matrix-analytic primitives the bounds need.
//!
//! Storage is row-major. Factorizations (SVD, Schur, LU) are delegated to
//! `faer`; matrices whose entries are all real are handed over as real
//! matrices, which roughly halves the cost of the large eigensolves.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// `sigma_min <= SINGULAR_RTOL * sigma_max` marks a matrix as numerically singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Largest dimension for which the spectral norm comes from a full SVD.
/// Above this, power iteration on `M^H M` is used.
pub const DENSE_SVD_LIMIT: usize = 4096;

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 10_000;

/// Induced matrix norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Largest singular value.
    #[default]
    Spectral,
    /// Maximum absolute column sum.
    One,
    /// Maximum absolute row sum.
    #[serde(rename = "inf")]
    Infinity,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Spectral => "spectral",
            NormKind::One => "one",
            NormKind::Infinity => "inf",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" | "2" | "two" => Ok(NormKind::Spectral),
            "one" | "1" => Ok(NormKind::One),
            "inf" | "infinity" => Ok(NormKind::Infinity),
            other => Err(Error::InvalidArgument(format!("unknown norm {other:?}"))),
        }
    }
}

/// Dense `rows x cols` complex matrix, row-major, all entries finite.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} has an empty dimension")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Panics if `f` produces a non-finite entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    /// Real matrix from a slice of equal-length rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `self + c I` for square matrices.
    pub fn shift_diagonal(&self, c: C64) -> Self {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] += c;
        }
        out
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ComplexMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// `y = self * x`
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `y = self^H * x`
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![C64::new(0.0, 0.0); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a.conj() * xi;
            }
        }
        y
    }

    pub(crate) fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    fn to_faer_real(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re)
    }

    pub(crate) fn from_faer(m: &Mat<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn from_faer_real(m: &Mat<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> ComplexMatrix {
    assert_eq!(a.shape(), b.shape(), "elementwise op on mismatched shapes");
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, c: C64) -> ComplexMatrix {
        self.scale(c)
    }
}

/// Matrix product `a * b`.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::Dimension {
            context: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    if a.is_real() && b.is_real() {
        let p = a.to_faer_real() * b.to_faer_real();
        Ok(ComplexMatrix::from_faer_real(&p))
    } else {
        let p = a.to_faer() * b.to_faer();
        Ok(ComplexMatrix::from_faer(&p))
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let sv = if m.is_real() {
        let fm = m.to_faer_real();
        fm.singular_values().or_else(|_| gram_singular_values_real(&fm))
    } else {
        let fm = m.to_faer();
        fm.singular_values().or_else(|_| gram_singular_values(&fm))
    };
    let mut sv = sv.expect("SVD and Gram-matrix eigensolve both failed");
    // faer already sorts; the fallback path does not.
    sv.iter_mut().for_each(|s| *s = s.max(0.0));
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

// Square roots of the eigenvalues of M^H M (or M M^H, whichever is smaller).
fn gram_singular_values(m: &Mat<C64>) -> std::result::Result<Vec<f64>, faer::linalg::evd::EvdError> {
    let g = if m.nrows() >= m.ncols() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    let ev = g.self_adjoint_eigenvalues(faer::Side::Lower)?;
    Ok(ev.into_iter().map(|e| e.max(0.0).sqrt()).collect())
}

fn gram_singular_values_real(m: &Mat<f64>) -> std::result::Result<Vec<f64>, faer::linalg::evd::EvdError> {
    let g = if m.nrows() >= m.ncols() {
        m.transpose() * m
    } else {
        m * m.transpose()
    };
    let ev = g.self_adjoint_eigenvalues(faer::Side::Lower)?;
    Ok(ev.into_iter().map(|e| e.max(0.0).sqrt()).collect())
}

/// Induced norm of `m`.
pub fn induced_norm(m: &ComplexMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Spectral => {
            if m.rows.max(m.cols) <= DENSE_SVD_LIMIT {
                singular_values(m)[0]
            } else {
                spectral_norm_power(m, POWER_TOL, POWER_MAX_ITER).value
            }
        }
        NormKind::One => (0..m.cols)
            .map(|j| (0..m.rows).map(|i| m[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Infinity => (0..m.rows)
            .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max),
    }
}

/// All eigenvalues of a square matrix, with multiplicity, in no particular order.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let ev = if m.is_real() {
        m.to_faer_real().eigenvalues()
    } else {
        m.to_faer().eigenvalues()
    };
    ev.map_err(|e| Error::NoConvergence(format!("eigenvalue iteration: {e:?}")))
}

fn check_nonsingular(m: &ComplexMatrix) -> Result<()> {
    let sv = singular_values(m);
    let (max, min) = (sv[0], *sv.last().unwrap());
    if is_singular_pair(min, max) {
        return Err(Error::Singular {
            ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    Ok(())
}

#[inline]
fn is_singular_pair(sigma_min: f64, sigma_max: f64) -> bool {
    sigma_max == 0.0 || sigma_min <= SINGULAR_RTOL * sigma_max
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if a.rows != b.rows {
        return Err(Error::Dimension {
            context: "solve",
            left: a.shape(),
            right: b.shape(),
        });
    }
    check_nonsingular(a)?;
    if a.is_real() && b.is_real() {
        let x = a.to_faer_real().partial_piv_lu().solve(b.to_faer_real());
        Ok(ComplexMatrix::from_faer_real(&x))
    } else {
        let x = a.to_faer().partial_piv_lu().solve(b.to_faer());
        Ok(ComplexMatrix::from_faer(&x))
    }
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    solve(m, &ComplexMatrix::identity(m.rows))
}

/// `||m^{-1}||^{-1}`, or 0 when `m` is numerically singular.
///
/// For the spectral norm this is `sigma_min(m)`, read off the singular values
/// without forming the inverse.
pub fn inv_norm_inverse(m: &ComplexMatrix, kind: NormKind) -> f64 {
    assert!(m.is_square(), "inv_norm_inverse needs a square matrix");
    match kind {
        NormKind::Spectral => {
            let sv = singular_values(m);
            let (max, min) = (sv[0], *sv.last().unwrap());
            if is_singular_pair(min, max) {
                0.0
            } else {
                min
            }
        }
        _ => match inverse(m) {
            Ok(inv) => 1.0 / induced_norm(&inv, kind),
            Err(_) => 0.0,
        },
    }
}

/// Smallest singular value.
pub fn sigma_min(m: &ComplexMatrix) -> f64 {
    *singular_values(m).last().unwrap()
}

/// `||m|| ||m^{-1}||`, infinite for singular matrices.
pub fn condition_number(m: &ComplexMatrix, kind: NormKind) -> f64 {
    let r = inv_norm_inverse(m, kind);
    if r == 0.0 {
        f64::INFINITY
    } else {
        induced_norm(m, kind) / r
    }
}

/// Householder QR: `m = Q R` with `Q` unitary and `R` upper triangular.
pub fn qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let f = m.to_faer().qr();
    let q = ComplexMatrix::from_faer(&f.compute_Q());
    let r = ComplexMatrix::from_faer(&f.R().to_owned());
    (q, r)
}

/// `||a^H a - I||_2`, the deviation from unitarity.
pub fn unitarity_defect(a: &ComplexMatrix) -> f64 {
    let g = matmul(&a.adjoint(), a).expect("square");
    induced_norm(&g.shift_diagonal(C64::new(-1.0, 0.0)), NormKind::Spectral)
}

/// A linear map known only through its action and the action of its adjoint.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64>;
}

impl LinearOperator for ComplexMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.mul_vec(x)
    }

    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        self.adjoint_mul_vec(y)
    }
}

/// Operator assembled from a pair of closures.
pub struct FnOperator<F, G> {
    rows: usize,
    cols: usize,
    forward: F,
    adjoint: G,
}

impl<F, G> FnOperator<F, G>
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    pub fn new(rows: usize, cols: usize, forward: F, adjoint: G) -> Self {
        Self {
            rows,
            cols,
            forward,
            adjoint,
        }
    }
}

impl<F, G> LinearOperator for FnOperator<F, G>
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        (self.forward)(x)
    }

    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        (self.adjoint)(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value by power iteration on `A^H A`.
///
/// Stops when the estimate changes by at most `tol` relative, or after
/// `max_iter` sweeps (`converged == false`).
pub fn spectral_norm_power(op: &dyn LinearOperator, tol: f64, max_iter: usize) -> PowerIteration {
    let n = op.ncols();
    // Deterministic start with no special alignment to structured operators.
    let mut x: Vec<C64> = (0..n)
        .map(|i| {
            let t = ((i as u64).wrapping_mul(2_654_435_761) % 1009) as f64 / 1009.0;
            C64::new(1.0 + t, 0.5 - t)
        })
        .collect();
    let nx = vec_norm(&x);
    x.iter_mut().for_each(|z| *z /= nx);

    let mut sigma = 0.0;
    for it in 1..=max_iter {
        let y = op.apply(&x);
        let new_sigma = vec_norm(&y);
        if new_sigma == 0.0 {
            return PowerIteration {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        let z = op.apply_adjoint(&y);
        let nz = vec_norm(&z);
        if nz == 0.0 {
            return PowerIteration {
                value: new_sigma,
                iterations: it,
                converged: true,
            };
        }
        x = z.into_iter().map(|v| v / nz).collect();
        let done = (new_sigma - sigma).abs() <= tol * new_sigma;
        sigma = new_sigma;
        if done {
            return PowerIteration {
                value: sigma,
                iterations: it,
                converged: true,
            };
        }
    }
    PowerIteration {
        value: sigma,
        iterations: max_iter,
        converged: false,
    }
}
