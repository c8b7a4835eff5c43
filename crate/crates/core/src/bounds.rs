//! Bounds on the moduli of the eigenvalues of a matrix rational function.
//!
//! Four constructions are provided:
//!
//! * Bauer-Fike on the companion split `C_T = A + E`: `|λ| <= ||E|| + max|αi|`.
//!   With unitary coefficients `||E||_2` has a closed form depending on `m` only.
//! * Pole-sum roots: the largest root of `x - ||B0|| - Σ ||Bi|| / (x - |αi|)` is an
//!   upper bound; when `||B0^{-1}||^{-1} > Σ ||Bi|| / |αi|`, the smallest root of
//!   the same function with `||B0^{-1}||^{-1}` in place of `||B0||` is a lower bound.
//! * Pole clearing: the positive root of `u(x) = x^{m+1} - Σ ||Ai|| x^i` built from
//!   `P(λ) = Π(λ - αi) T(λ)`.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{induced_norm, inv_norm_inverse, unitarity_defect, NormKind};
use crate::mrf::MatrixRationalFunction;
use crate::scalar_roots::{HtPolynomial, PoleSumFunction};

/// `||B^H B - I||_2` at or below this counts as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Absolute margin required by the lower-bound hypothesis.
pub const LOWER_HYPOTHESIS_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BauerFike,
    UnitaryClosedForm,
    RationalUpper,
    RationalLower,
    Polynomial,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::BauerFike,
        Method::UnitaryClosedForm,
        Method::RationalUpper,
        Method::RationalLower,
        Method::Polynomial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::BauerFike => "bauer-fike",
            Method::UnitaryClosedForm => "unitary-closed-form",
            Method::RationalUpper => "rational-upper",
            Method::RationalLower => "rational-lower",
            Method::Polynomial => "polynomial",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Method::RationalLower => Direction::Lower,
            _ => Direction::Upper,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bauer-fike" | "bf" => Ok(Method::BauerFike),
            "unitary" | "unitary-closed-form" => Ok(Method::UnitaryClosedForm),
            "rational" | "rational-upper" => Ok(Method::RationalUpper),
            "rational-lower" | "lower" => Ok(Method::RationalLower),
            "polynomial" | "poly" => Ok(Method::Polynomial),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
        })
    }
}

/// Outcome of one bound computation.
///
/// When `hypothesis_ok` is false the value is kept for diagnostics only and
/// certifies nothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub method: Method,
    pub value: f64,
    pub direction: Direction,
    pub norm: NormKind,
    pub hypothesis_ok: bool,
    pub notes: Vec<String>,
    #[serde(rename = "elapsed_seconds", with = "duration_secs")]
    pub elapsed: Duration,
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

impl BoundReport {
    fn timed(method: Method, norm: NormKind, f: impl FnOnce(&mut Vec<String>) -> (f64, bool)) -> Self {
        let start = Instant::now();
        let mut notes = Vec::new();
        let (value, hypothesis_ok) = f(&mut notes);
        Self {
            method,
            value,
            direction: method.direction(),
            norm,
            hypothesis_ok,
            notes,
            elapsed: start.elapsed(),
        }
    }

    /// True when the report can be relied on as a bound.
    pub fn is_certificate(&self) -> bool {
        self.hypothesis_ok && self.value.is_finite()
    }
}

/// `sqrt(((2m + 1) + sqrt(4m + 1)) / 2)`, the spectral norm of `E` for unitary coefficients.
pub fn unitary_e_norm(m: usize) -> f64 {
    let m = m as f64;
    (((2.0 * m + 1.0) + (4.0 * m + 1.0).sqrt()) / 2.0).sqrt()
}

/// Largest root of `x - c0 - Σ a/(x - b)` over `(norm, |pole|)` pairs.
pub fn rational_upper_value(b0_norm: f64, terms: &[(f64, f64)]) -> Result<f64> {
    Ok(PoleSumFunction::build(b0_norm, terms)?.largest_root())
}

/// Positive root of `x^{d} - Σ_{i<d} ||A_i|| x^i` for a monic polynomial.
pub fn polynomial_value(lower_coeff_norms: &[f64]) -> Result<f64> {
    HtPolynomial::upper(1.0, lower_coeff_norms).positive_root()
}

fn term_norms(t: &MatrixRationalFunction, norm: NormKind) -> Vec<(f64, f64)> {
    t.terms()
        .iter()
        .map(|term| (induced_norm(&term.coeff, norm), term.pole.norm()))
        .collect()
}

/// `||E|| + max|αi|`.
pub fn bauer_fike_bound(t: &MatrixRationalFunction, norm: NormKind) -> BoundReport {
    BoundReport::timed(Method::BauerFike, norm, |_| {
        let (_, e) = t.perturbation_split();
        (induced_norm(&e, norm) + t.max_pole_modulus(), true)
    })
}

/// Closed form for unitary coefficients; spectral norm only.
pub fn unitary_closed_form_bound(t: &MatrixRationalFunction) -> BoundReport {
    BoundReport::timed(Method::UnitaryClosedForm, NormKind::Spectral, |notes| {
        let ok = match check_unitary(t) {
            Ok(()) => true,
            Err(e) => {
                notes.push(format!("{e}; value is not a valid bound"));
                false
            }
        };
        (unitary_e_norm(t.m()) + t.max_pole_modulus(), ok)
    })
}

/// Largest root of `q(x) = x - ||B0|| - Σ ||Bi|| / (x - |αi|)`.
pub fn rational_upper_bound(t: &MatrixRationalFunction, norm: NormKind) -> BoundReport {
    BoundReport::timed(Method::RationalUpper, norm, |_| {
        let value = rational_upper_value(induced_norm(t.b0(), norm), &term_norms(t, norm))
            .expect("norms and pole moduli are finite and nonnegative");
        (value, true)
    })
}

/// Smallest root of `p(x) = x - ||B0^{-1}||^{-1} - Σ ||Bi|| / (x - |αi|)`.
///
/// Certified only when `B0` is invertible, no pole is zero, and
/// `||B0^{-1}||^{-1} > Σ ||Bi|| / |αi|`.
pub fn rational_lower_bound(t: &MatrixRationalFunction, norm: NormKind) -> BoundReport {
    BoundReport::timed(Method::RationalLower, norm, |notes| {
        let c0 = inv_norm_inverse(t.b0(), norm);
        let terms = term_norms(t, norm);
        let mut ok = true;
        if c0 == 0.0 {
            notes.push("B0 is singular".into());
            ok = false;
        }
        if terms.iter().any(|&(_, b)| b == 0.0) {
            notes.push("a pole is zero".into());
            ok = false;
        }
        if ok {
            let load: f64 = terms.iter().map(|&(a, b)| a / b).sum();
            if c0 <= load + LOWER_HYPOTHESIS_MARGIN {
                notes.push(format!(
                    "hypothesis fails: ||B0^-1||^-1 = {c0:.6e} is not greater than sum ||Bi||/|ai| = {load:.6e}"
                ));
                ok = false;
            }
        }
        let value = PoleSumFunction::build(c0, &terms)
            .expect("norms and pole moduli are finite and nonnegative")
            .smallest_root();
        (value, ok)
    })
}

/// Upper bound from the pole-cleared polynomial `Π(λ - αi) T(λ)`.
pub fn polynomial_bound(t: &MatrixRationalFunction, norm: NormKind) -> BoundReport {
    BoundReport::timed(Method::Polynomial, norm, |notes| {
        if t.m() > 1 {
            notes.push("general-m extension".into());
        }
        let p = t.to_polynomial();
        let d = p.degree();
        let norms: Vec<f64> = p.coeffs()[..d].iter().map(|a| induced_norm(a, norm)).collect();
        // Leading coefficient is I, so ||A_d^{-1}||^{-1} = 1.
        let value = polynomial_value(&norms).expect("monic polynomial has a positive root");
        (value, true)
    })
}

/// Runs one method.
pub fn compute(method: Method, t: &MatrixRationalFunction, norm: NormKind) -> BoundReport {
    match method {
        Method::BauerFike => bauer_fike_bound(t, norm),
        Method::UnitaryClosedForm => unitary_closed_form_bound(t),
        Method::RationalUpper => rational_upper_bound(t, norm),
        Method::RationalLower => rational_lower_bound(t, norm),
        Method::Polynomial => polynomial_bound(t, norm),
    }
}

/// Every method; the unitary closed form is included only when its
/// hypothesis holds (it is meaningless otherwise).
pub fn all_bounds(t: &MatrixRationalFunction, norm: NormKind) -> Vec<BoundReport> {
    let mut out = vec![bauer_fike_bound(t, norm)];
    if norm == NormKind::Spectral && check_unitary(t).is_ok() {
        out.push(unitary_closed_form_bound(t));
    }
    out.push(rational_upper_bound(t, norm));
    out.push(rational_lower_bound(t, norm));
    out.push(polynomial_bound(t, norm));
    out
}

/// Ok when every coefficient `B0, ..., Bm` is unitary within [`UNITARY_TOL`].
pub fn check_unitary(t: &MatrixRationalFunction) -> Result<()> {
    let coeffs = std::iter::once(t.b0()).chain(t.terms().iter().map(|term| &term.coeff));
    for (index, b) in coeffs.enumerate() {
        let deviation = unitarity_defect(b);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { index, deviation });
        }
    }
    Ok(())
}

/// With unitary coefficients, is the pole-sum bound strictly below the closed form?
pub fn unitary_dominance_check(t: &MatrixRationalFunction) -> Result<bool> {
    check_unitary(t)?;
    let rational = rational_upper_bound(t, NormKind::Spectral).value;
    let closed = unitary_closed_form_bound(t).value;
    Ok(rational < closed)
}
