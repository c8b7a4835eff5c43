use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rembound::cli::{self, OutputFormat, VerifyOptions};
use rembound::oracle::DEFAULT_POLE_TOL;
use rembound::problems::{random_mrf, remark_example, string_problem, CoeffKind, PoleRegion, RemarkId, StringProblemSpec};
use rembound::report::{self, Table1Options};
use rembound::{Error, Method, NormKind, Result};

#[derive(Parser)]
#[command(name = "rembound", version, about = "Eigenvalue modulus bounds for matrix rational functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Text,
    Json,
}

impl From<Out> for OutputFormat {
    fn from(o: Out) -> Self {
        match o {
            Out::Text => OutputFormat::Text,
            Out::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute bounds for a problem file.
    Bounds {
        file: PathBuf,
        /// Comma-separated methods (default: every applicable one).
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long, default_value = "spectral")]
        norm: String,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Bounds and maximum modulus for the loaded-string problem.
    Table1 {
        #[arg(long, value_delimiter = ',', default_value = "3,5,10,100")]
        n: Vec<usize>,
        /// Pole as `re,im` or a real number.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
        /// Compute mu even above the oracle limit.
        #[arg(long, conflicts_with = "no_mu")]
        with_mu: bool,
        /// Never compute mu.
        #[arg(long)]
        no_mu: bool,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
    },
    /// Check every certified bound against the companion eigenvalues.
    Verify {
        file: PathBuf,
        /// Pole filter radius factor: eigenvalues within tol * (1 + |pole|) are dropped.
        #[arg(long, default_value_t = DEFAULT_POLE_TOL)]
        pole_tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        out: Out,
        /// Testing hook: falsify the named method's value before checking.
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Write a built-in instance as a problem file.
    Export {
        /// `1a`..`3b`, `string:N[:re,im]`, or `random:N:M:SEED[:haar]`.
        instance: String,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn instance(name: &str) -> Result<rembound::MatrixRationalFunction> {
    let bad = || Error::UnknownExample(name.to_string());
    let parts: Vec<&str> = name.splitn(2, ':').collect();
    match parts.as_slice() {
        ["string", rest] => {
            let (n, alpha) = match rest.split_once(':') {
                Some((n, a)) => (n, cli::parse_complex(a)?),
                None => (*rest, rembound::C64::new(1.0, 0.0)),
            };
            let n = n.parse().map_err(|_| bad())?;
            string_problem(&StringProblemSpec::new(n, alpha)?)
        }
        ["random", rest] => {
            let f: Vec<&str> = rest.split(':').collect();
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
            let kind = match f.get(3) {
                None => CoeffKind::Gaussian,
                Some(&"haar") => CoeffKind::HaarUnitary,
                Some(_) => return Err(bad()),
            };
            if f.len() < 3 || f.len() > 4 || num(f[0])? == 0 {
                return Err(bad());
            }
            Ok(random_mrf(num(f[0])? as usize, num(f[1])? as usize, PoleRegion::default(), kind, num(f[2])?))
        }
        _ => Ok(remark_example(name.parse::<RemarkId>()?)),
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names.iter().map(|s| s.parse()).collect()
}

fn run(cli: Cli) -> Result<cli::Outcome> {
    match cli.command {
        Command::Bounds { file, methods, norm, out } => {
            let norm: NormKind = norm.parse()?;
            let methods = methods.as_deref().map(parse_methods).transpose()?;
            cli::cmd_bounds(&file, methods.as_deref(), norm, out.into())
        }
        Command::Table1 {
            n,
            alpha,
            with_mu,
            no_mu,
            out,
        } => {
            let opts = Table1Options {
                alpha: cli::parse_complex(&alpha)?,
                mu: cli::parse_mu_mode(with_mu, no_mu),
                oracle_limit: report::oracle_limit()?,
                ..Table1Options::default()
            };
            cli::cmd_table1(&n, &opts, out.into())
        }
        Command::Verify {
            file,
            pole_tol,
            out,
            corrupt,
        } => {
            if !(pole_tol.is_finite() && pole_tol >= 0.0) {
                return Err(Error::InvalidArgument(format!("--pole-tol must be a nonnegative number, got {pole_tol}")));
            }
            let opts = VerifyOptions {
                pole_tol,
                oracle_limit: report::oracle_limit()?,
                corrupt: corrupt.as_deref().map(str::parse).transpose()?,
            };
            cli::cmd_verify(&file, &opts, out.into())
        }
        Command::Export { instance: name, out } => {
            let t = instance(&name)?;
            match out {
                Some(path) => {
                    cli::write_problem(&path, &t)?;
                    Ok(cli::Outcome {
                        stdout: String::new(),
                        code: cli::EXIT_OK,
                    })
                }
                None => Ok(cli::Outcome {
                    stdout: cli::ProblemFile::from_mrf(&t).to_json() + "\n",
                    code: cli::EXIT_OK,
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_VALIDATION as u8 } else { 0 });
        }
    };
    match run(parsed) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
