//! Report documents for the command line: per-method bound tables and the
//! string-problem comparison table, rendered as JSON or aligned text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, polynomial_value, rational_upper_value, BoundReport, Direction};
use crate::error::{Error, Result};
use crate::linalg::{NormKind, C64};
use crate::oracle::{self, SpectrumResult, Verification};
use crate::problems::{string_norms_matrix_free, string_problem, StringProblemSpec};

/// Default cap on the companion dimension `(m + 1) n` handed to the oracle.
pub const DEFAULT_ORACLE_LIMIT: usize = 2500;

/// Environment variable overriding [`DEFAULT_ORACLE_LIMIT`].
pub const ORACLE_LIMIT_ENV: &str = "REMBOUND_ORACLE_LIMIT";

/// Above this `n` the string-problem bounds are computed matrix-free.
pub const DENSE_ROUTE_LIMIT: usize = 2048;

/// Stopping rule for the matrix-free power iterations.
pub const MATRIX_FREE_TOL: f64 = 1e-15;
pub const MATRIX_FREE_MAX_ITER: usize = 400_000;

/// Oracle limit from the environment, falling back to the default.
pub fn oracle_limit() -> Result<usize> {
    match std::env::var(ORACLE_LIMIT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{ORACLE_LIMIT_ENV} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_ORACLE_LIMIT),
    }
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

/// Right-aligned columns except those listed in `left`.
fn render_table(header: &[&str], rows: &[Vec<String>], left: &[usize]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| if left.contains(&i) { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut header.iter().copied(), &mut out);
    let rule: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    let _ = writeln!(out, "{}", "-".repeat(rule));
    for row in rows {
        line(&mut row.iter().map(String::as_str), &mut out);
    }
    out
}

/// Output of `bounds` and `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub n: usize,
    pub m: usize,
    pub norm: NormKind,
    pub reports: Vec<BoundReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

impl ReportDocument {
    /// `value - mu` for certified upper bounds when the oracle ran.
    pub fn slack(&self, report: &BoundReport) -> Option<f64> {
        match (self.mu, report.direction) {
            (Some(mu), Direction::Upper) => Some(report.value - mu),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report documents serialize")
    }

    pub fn to_text(&self) -> String {
        let mut header = vec!["method", "direction", "value", "certified"];
        if self.mu.is_some() {
            header.push("slack");
        }
        if self.verification.is_some() {
            header.push("check");
        }
        header.push("notes");
        let rows: Vec<Vec<String>> = self
            .reports
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = vec![
                    r.method.to_string(),
                    r.direction.to_string(),
                    fmt2(r.value),
                    if r.is_certificate() { "yes".into() } else { "no".into() },
                ];
                if self.mu.is_some() {
                    row.push(self.slack(r).map(fmt2).unwrap_or_else(|| "-".into()));
                }
                if let Some(v) = &self.verification {
                    row.push(
                        v.checks
                            .get(i)
                            .map(|c| serde_json::to_value(c.status).unwrap().as_str().unwrap().to_string())
                            .unwrap_or_else(|| "-".into()),
                    );
                }
                row.push(if r.notes.is_empty() { String::new() } else { r.notes.join("; ") });
                row
            })
            .collect();
        let mut out = format!("n = {}, m = {}, norm = {}\n", self.n, self.m, self.norm);
        if let Some(mu) = self.mu {
            let _ = writeln!(out, "mu = {}", fmt2(mu));
        }
        if let Some(v) = &self.verification {
            let _ = writeln!(
                out,
                "oracle: {} eigenvalues kept, {} removed at poles, min modulus {}",
                v.kept,
                v.removed,
                v.min_modulus.map(fmt2).unwrap_or_else(|| "-".into())
            );
        }
        out.push_str(&render_table(&header, &rows, &[0, header.len() - 1]));
        if let Some(v) = &self.verification {
            out.push_str(if v.all_passed() { "all certified bounds hold\n" } else { "VIOLATION: a certified bound fails\n" });
        }
        out
    }
}

/// How a comparison-table row was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Dense,
    MatrixFree,
}

/// One row of the string-problem comparison: `(n, μ, R1, R2, R3)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub alpha: [f64; 2],
    pub mu: Option<f64>,
    /// Bauer-Fike bound.
    pub r1: f64,
    /// Pole-sum bound.
    pub r2: f64,
    /// Pole-cleared polynomial bound.
    pub r3: f64,
    pub route: Route,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuMode {
    /// Oracle runs when `2n` is within the limit.
    #[default]
    Auto,
    /// Oracle runs regardless of the limit.
    Force,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Options {
    pub alpha: C64,
    pub mu: MuMode,
    pub oracle_limit: usize,
    pub dense_limit: usize,
}

impl Default for Table1Options {
    fn default() -> Self {
        Self {
            alpha: C64::new(1.0, 0.0),
            mu: MuMode::Auto,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            dense_limit: DENSE_ROUTE_LIMIT,
        }
    }
}

pub fn table1_row(n: usize, opts: &Table1Options) -> Result<Table1Row> {
    let spec = StringProblemSpec::new(n, opts.alpha)?;
    let want_mu = match opts.mu {
        MuMode::Auto => 2 * n <= opts.oracle_limit,
        MuMode::Force => true,
        MuMode::Skip => false,
    };
    let mut notes = Vec::new();
    let (r1, r2, r3, route, mu) = if n <= opts.dense_limit || want_mu {
        let t = string_problem(&spec)?;
        let s = NormKind::Spectral;
        let r1 = bounds::bauer_fike_bound(&t, s).value;
        let r2 = bounds::rational_upper_bound(&t, s).value;
        let r3 = bounds::polynomial_bound(&t, s).value;
        let mu = if want_mu {
            let spec: SpectrumResult = oracle::spectrum(&t, oracle::DEFAULT_POLE_TOL)?;
            Some(spec.mu)
        } else {
            None
        };
        (r1, r2, r3, Route::Dense, mu)
    } else {
        let norms = string_norms_matrix_free(&spec, MATRIX_FREE_TOL, MATRIX_FREE_MAX_ITER);
        if !norms.all_converged() {
            notes.push(format!(
                "power iteration stopped at {MATRIX_FREE_MAX_ITER} steps before reaching relative change {MATRIX_FREE_TOL:e}"
            ));
        }
        let a = opts.alpha.norm();
        let r1 = norms.e.value + a;
        let r2 = rational_upper_value(norms.b0.value, &[(norms.b1, a)])?;
        let r3 = polynomial_value(&[norms.constant_coeff.value, norms.b0_shifted.value])?;
        (r1, r2, r3, Route::MatrixFree, None)
    };
    Ok(Table1Row {
        n,
        alpha: [opts.alpha.re, opts.alpha.im],
        mu,
        r1,
        r2,
        r3,
        route,
        notes,
    })
}

/// Rows are independent, so each runs on its own thread.
pub fn table1(ns: &[usize], opts: &Table1Options) -> Result<Vec<Table1Row>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = ns.iter().map(|&n| scope.spawn(move || table1_row(n, opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("table row worker panicked"))
            .collect()
    })
}

pub fn table1_text(rows: &[Table1Row]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.mu.map(fmt2).unwrap_or_else(|| "-".into()),
                fmt2(r.r1),
                fmt2(r.r2),
                fmt2(r.r3),
            ]
        })
        .collect();
    let mut out = render_table(&["n", "mu", "R1", "R2", "R3"], &cells, &[]);
    for r in rows {
        for note in &r.notes {
            let _ = writeln!(out, "n = {}: {note}", r.n);
        }
    }
    out
}
