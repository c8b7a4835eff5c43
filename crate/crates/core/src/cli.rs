//! Problem-file I/O and the command implementations behind the `rembound` binary.
//!
//! Commands return their rendered output together with an exit code so they can
//! be exercised without spawning a process.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundReport, Direction, Method};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, NormKind, C64};
use crate::mrf::{MatrixRationalFunction, RationalTerm};
use crate::oracle::{self, check_reports};
use crate::report::{self, MuMode, ReportDocument, Table1Options};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for an error: 3 for numerical failures, 2 for everything the user can fix.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Singular { .. } | Error::NoConvergence(_) | Error::PoleProximity { .. } => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// On-disk problem description; complex numbers are `[re, im]` pairs and
/// matrices are arrays of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub poles: Vec<[f64; 2]>,
    #[serde(rename = "B0")]
    pub b0: JsonMatrix,
    #[serde(rename = "B")]
    pub b: Vec<JsonMatrix>,
}

fn to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&z| to_pair(z)).collect()).collect()
}

fn matrix_from_json(name: &str, n: usize, rows: &JsonMatrix, problems: &mut Vec<String>) -> Option<ComplexMatrix> {
    if rows.len() != n {
        problems.push(format!("{name} has {} rows, expected n = {n}", rows.len()));
        return None;
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            problems.push(format!("{name} row {i} has {} entries, expected n = {n}", row.len()));
            return None;
        }
        data.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    match ComplexMatrix::new(n, n, data) {
        Ok(m) => Some(m),
        Err(e) => {
            problems.push(format!("{name}: {e}"));
            None
        }
    }
}

impl ProblemFile {
    pub fn from_mrf(t: &MatrixRationalFunction) -> Self {
        Self {
            n: t.n(),
            poles: t.poles().map(to_pair).collect(),
            b0: matrix_to_json(t.b0()),
            b: t.terms().iter().map(|term| matrix_to_json(&term.coeff)).collect(),
        }
    }

    /// Checks shapes, then hands the rest (pole distinctness, finiteness) to
    /// [`MatrixRationalFunction::new`].
    pub fn to_mrf(&self) -> Result<MatrixRationalFunction> {
        let mut problems = Vec::new();
        if self.n == 0 {
            problems.push("n must be positive".to_string());
            return Err(Error::InvalidProblem(problems));
        }
        if self.poles.len() != self.b.len() {
            problems.push(format!(
                "{} poles but {} coefficient matrices in B",
                self.poles.len(),
                self.b.len()
            ));
        }
        let b0 = matrix_from_json("B0", self.n, &self.b0, &mut problems);
        let coeffs: Vec<Option<ComplexMatrix>> = self
            .b
            .iter()
            .enumerate()
            .map(|(i, m)| matrix_from_json(&format!("B[{i}]"), self.n, m, &mut problems))
            .collect();
        for (i, p) in self.poles.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                problems.push(format!("pole {i} is not finite"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidProblem(problems));
        }
        let terms = self
            .poles
            .iter()
            .zip(coeffs)
            .map(|(&[re, im], m)| RationalTerm::new(C64::new(re, im), m.expect("checked above")))
            .collect();
        MatrixRationalFunction::new(b0.expect("checked above"), terms)
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }
}

pub fn read_problem(path: &Path) -> Result<MatrixRationalFunction> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    ProblemFile::parse(&text, &shown)?.to_mrf()
}

pub fn write_problem(path: &Path, t: &MatrixRationalFunction) -> Result<()> {
    let mut text = ProblemFile::from_mrf(t).to_json();
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

/// Rendered command output plus the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

fn reports_for(t: &MatrixRationalFunction, methods: Option<&[Method]>, norm: NormKind) -> Vec<BoundReport> {
    match methods {
        None => bounds::all_bounds(t, norm),
        Some(ms) => ms.iter().map(|&m| bounds::compute(m, t, norm)).collect(),
    }
}

pub fn cmd_bounds(path: &Path, methods: Option<&[Method]>, norm: NormKind, format: OutputFormat) -> Result<Outcome> {
    let t = read_problem(path)?;
    let doc = ReportDocument {
        n: t.n(),
        m: t.m(),
        norm,
        reports: reports_for(&t, methods, norm),
        mu: None,
        verification: None,
    };
    Ok(Outcome::ok(match format {
        OutputFormat::Text => doc.to_text(),
        OutputFormat::Json => doc.to_json() + "\n",
    }))
}

pub fn cmd_table1(ns: &[usize], opts: &Table1Options, format: OutputFormat) -> Result<Outcome> {
    let rows = report::table1(ns, opts)?;
    Ok(Outcome::ok(match format {
        OutputFormat::Text => report::table1_text(&rows),
        OutputFormat::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
    }))
}

/// Negative-control hook: pushes the named method's value past the oracle
/// so the check must fail.
fn corrupt(reports: &mut [BoundReport], method: Method, mu: f64, min_modulus: Option<f64>) {
    for r in reports.iter_mut().filter(|r| r.method == method) {
        r.hypothesis_ok = true;
        r.value = match r.direction {
            Direction::Upper => mu / 2.0 - 1.0,
            Direction::Lower => 2.0 * min_modulus.unwrap_or(0.0) + 1.0,
        };
    }
}

pub struct VerifyOptions {
    pub pole_tol: f64,
    pub oracle_limit: usize,
    pub corrupt: Option<Method>,
}

pub fn cmd_verify(path: &Path, opts: &VerifyOptions, format: OutputFormat) -> Result<Outcome> {
    let t = read_problem(path)?;
    let dim = (t.m() + 1) * t.n();
    if dim > opts.oracle_limit {
        return Err(Error::NoConvergence(format!(
            "companion dimension {dim} exceeds the oracle limit {} (set {})",
            opts.oracle_limit,
            report::ORACLE_LIMIT_ENV
        )));
    }
    let norm = NormKind::Spectral;
    let mut reports = bounds::all_bounds(&t, norm);
    let spec = oracle::spectrum(&t, opts.pole_tol)?;
    if let Some(m) = opts.corrupt {
        corrupt(&mut reports, m, spec.mu, spec.min_modulus());
    }
    let verification = check_reports(&spec, &reports);
    let code = if verification.all_passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let doc = ReportDocument {
        n: t.n(),
        m: t.m(),
        norm,
        reports,
        mu: Some(spec.mu),
        verification: Some(verification),
    };
    Ok(Outcome {
        stdout: match format {
            OutputFormat::Text => doc.to_text(),
            OutputFormat::Json => doc.to_json() + "\n",
        },
        code,
    })
}

/// Parses `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::InvalidArgument(format!("expected `re,im` or a real number, got {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

pub fn parse_mu_mode(with_mu: bool, no_mu: bool) -> MuMode {
    match (with_mu, no_mu) {
        (true, _) => MuMode::Force,
        (false, true) => MuMode::Skip,
        _ => MuMode::Auto,
    }
}
