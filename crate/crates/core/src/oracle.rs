//! Reference spectrum of `T(λ)` from the eigenvalues of its block companion
//! matrix, with eigenvalues sitting on poles filtered out.

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, Direction, Method};
use crate::error::Result;
use crate::linalg::{eigenvalues, sigma_min, C64};
use crate::mrf::MatrixRationalFunction;

/// Default pole filter: an eigenvalue within `DEFAULT_POLE_TOL * (1 + |α|)` of
/// pole `α` is attributed to the pole.
pub const DEFAULT_POLE_TOL: f64 = 1e-8;

/// Residuals need one SVD of `T(λ)` per eigenvalue; skipped above this `n`.
pub const RESIDUAL_DIM_LIMIT: usize = 256;

/// Relative slack allowed when checking a bound against the oracle.
pub const VERIFY_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Scale factor for the per-pole filter radius `pole_tol * (1 + |α|)`.
    pub pole_tol: f64,
    pub residual_dim_limit: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            pole_tol: DEFAULT_POLE_TOL,
            residual_dim_limit: RESIDUAL_DIM_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Companion eigenvalues away from every pole.
    pub eigenvalues: Vec<C64>,
    /// Poles that absorbed at least one companion eigenvalue, with counts.
    pub removed_at_poles: Vec<(C64, usize)>,
    /// `sigma_min(T(λ))` per kept eigenvalue, when `n` is small enough.
    pub residuals: Option<Vec<f64>>,
    /// Largest kept modulus, 0 when nothing is kept.
    pub mu: f64,
}

impl SpectrumResult {
    pub fn removed_count(&self) -> usize {
        self.removed_at_poles.iter().map(|&(_, k)| k).sum()
    }

    /// Smallest kept modulus.
    pub fn min_modulus(&self) -> Option<f64> {
        self.eigenvalues.iter().map(|z| z.norm()).reduce(f64::min)
    }
}

/// Spectrum with the default options and the given pole-tolerance factor.
pub fn spectrum(t: &MatrixRationalFunction, pole_tol: f64) -> Result<SpectrumResult> {
    spectrum_with(
        t,
        &SpectrumOptions {
            pole_tol,
            ..SpectrumOptions::default()
        },
    )
}

pub fn spectrum_with(t: &MatrixRationalFunction, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let all = eigenvalues(&t.companion())?;
    let poles: Vec<C64> = t.poles().collect();
    let mut counts = vec![0usize; poles.len()];
    let mut kept = Vec::with_capacity(all.len());

    for lam in all {
        let nearest = poles
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, (lam - p).norm(), p))
            .filter(|&(_, d, p)| d <= opts.pole_tol * (1.0 + p.norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((i, _, _)) => counts[i] += 1,
            None => kept.push(lam),
        }
    }

    let residuals = if t.n() <= opts.residual_dim_limit {
        Some(
            kept.iter()
                .map(|&lam| t.evaluate(lam).map(|m| sigma_min(&m)))
                .collect::<Result<Vec<f64>>>()?,
        )
    } else {
        None
    };

    let mu = kept.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let removed_at_poles = poles
        .into_iter()
        .zip(counts)
        .filter(|&(_, k)| k > 0)
        .collect();
    Ok(SpectrumResult {
        eigenvalues: kept,
        removed_at_poles,
        residuals,
        mu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The report is not a certificate (hypothesis failed), so nothing is checked.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub method: Method,
    pub direction: Direction,
    pub value: f64,
    pub status: CheckStatus,
    /// `value - mu` for upper bounds, `min modulus - value` for lower bounds.
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub mu: f64,
    pub min_modulus: Option<f64>,
    pub kept: usize,
    pub removed: usize,
    pub checks: Vec<BoundCheck>,
}

impl Verification {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// Checks each certified report against an already computed spectrum.
pub fn check_reports(spec: &SpectrumResult, reports: &[BoundReport]) -> Verification {
    let min_modulus = spec.min_modulus();
    let checks = reports
        .iter()
        .map(|r| {
            let (status, slack) = if !r.is_certificate() {
                (CheckStatus::Skipped, None)
            } else {
                match r.direction {
                    Direction::Upper => {
                        let ok = spec.mu <= r.value * (1.0 + VERIFY_RTOL);
                        (if ok { CheckStatus::Pass } else { CheckStatus::Fail }, Some(r.value - spec.mu))
                    }
                    Direction::Lower => match min_modulus {
                        Some(lo) => {
                            let ok = lo >= r.value * (1.0 - VERIFY_RTOL);
                            (if ok { CheckStatus::Pass } else { CheckStatus::Fail }, Some(lo - r.value))
                        }
                        None => (CheckStatus::Pass, None),
                    },
                }
            };
            BoundCheck {
                method: r.method,
                direction: r.direction,
                value: r.value,
                status,
                slack,
            }
        })
        .collect();
    Verification {
        mu: spec.mu,
        min_modulus,
        kept: spec.eigenvalues.len(),
        removed: spec.removed_count(),
        checks,
    }
}

/// Computes the spectrum and checks every certified report against it.
pub fn verify_bounds(t: &MatrixRationalFunction, reports: &[BoundReport], pole_tol: f64) -> Result<Verification> {
    Ok(check_reports(&spectrum(t, pole_tol)?, reports))
}
