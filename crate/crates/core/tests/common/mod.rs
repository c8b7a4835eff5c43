#![allow(dead_code)]

use rembound::linalg::{ComplexMatrix, C64};
use rembound::mrf::{MatrixPolynomial, MatrixRationalFunction};

/// Greedy nearest matching of two multisets; returns the worst scaled distance
/// `|a - b| / (1 + |a|)`, or infinity when the sizes differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..a.len()).collect();
    // Match large eigenvalues first; they carry the largest absolute errors.
    order.sort_by(|&i, &j| a[j].norm().total_cmp(&a[i].norm()));
    for i in order {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|&(j, _)| !used[j])
            .map(|(j, &z)| (j, (z - a[i]).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d / (1.0 + a[i].norm()));
    }
    worst
}

/// Drops entries within `tol * (1 + |p|)` of any pole `p`.
pub fn drop_near_poles(values: Vec<C64>, poles: &[C64], tol: f64) -> Vec<C64> {
    values
        .into_iter()
        .filter(|&z| poles.iter().all(|&p| (z - p).norm() > tol * (1.0 + p.norm())))
        .collect()
}

/// `Π(λ - αi) T(λ)` companion eigenvalues, computed from the polynomial form.
pub fn polynomial_spectrum(t: &MatrixRationalFunction) -> Vec<C64> {
    rembound::linalg::eigenvalues(&t.to_polynomial().companion().unwrap()).unwrap()
}

/// The string problem in its original form, pole-cleared:
/// `(λ - α)(A - Bλ) + Cλ = -Bλ² + (A + αB + C)λ - αA`.
pub fn string_original_polynomial(n: usize, alpha: C64) -> MatrixPolynomial {
    let spec = rembound::problems::StringProblemSpec::new(n, alpha).unwrap();
    let m = spec.matrices();
    let a = m.stiffness.to_dense();
    let b = m.mass.to_dense();
    let c = m.spring_dense();
    let p0 = a.scale(-alpha);
    let p1 = &(&a + &b.scale(alpha)) + &c;
    let p2 = b.scale(C64::new(-1.0, 0.0));
    MatrixPolynomial::new(vec![p0, p1, p2]).unwrap()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).unwrap()
}
