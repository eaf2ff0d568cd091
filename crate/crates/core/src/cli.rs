//! The `matleg` command line: `eval`, `grad`, `dual`, `verify` and `solve`
//! over JSON descriptors.
//!
//! Exit codes: 0 success, 1 check or solve failure, 2 usage or parse error,
//! 3 domain error. Every failure prints one line to standard error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::duality::{verify, SampleSpec, Tolerances};
use crate::error::Error;
use crate::family::{Family, LegendrePair};
use crate::linalg::Matrix;
use crate::variational::{solve, Problem, SolverOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Caps the thread count used by `verify`.
pub const THREADS_ENV: &str = "MATLEG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "matleg", version, about = "Legendre transforms of determinant and cofactor functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print F(x) for a family and a matrix.
    Eval(PointArgs),
    /// Print F'(x) as a matrix.
    Grad(PointArgs),
    /// Print the descriptor of the transform family.
    Dual {
        #[arg(long)]
        family: String,
    },
    /// Run the duality checks on seeded samples and write a report.
    Verify(VerifyArgs),
    /// Find a critical point of a variational problem and write the result.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Family descriptor: inline JSON or a path to a JSON file.
    #[arg(long)]
    family: String,
    /// Matrix JSON file.
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    report: PathBuf,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    window: Option<Vec<f64>>,
    #[arg(long)]
    sign_mix: Option<f64>,
    /// Tolerance overrides: inline JSON or a path, e.g. '{"roundtrip":1e-9}'.
    #[arg(long)]
    tolerances: Option<String>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Problem JSON file.
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Solver option overrides: inline JSON or a path, e.g. '{"max_iter":500}'.
    #[arg(long)]
    options: Option<String>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_domain() || matches!(e, Error::Sampling(_)) {
            EXIT_DOMAIN
        } else if matches!(e, Error::NoConvergence { .. }) {
            EXIT_FAILED
        } else {
            EXIT_USAGE
        };
        Failure { code, message: e.to_string() }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<S: AsRef<str>>(argv: &[S], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("usage error");
            let _ = writeln!(err, "{line}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "matleg: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Eval(args) => {
            let (family, x) = load_point(&args)?;
            let value = family.eval(&x)?;
            if !value.is_finite() {
                return Err(Error::Domain(format!("F(x) = {value}")).into());
            }
            emit(out, &to_json(&value)?)
        }
        Command::Grad(args) => {
            let (family, x) = load_point(&args)?;
            emit(out, &to_json(&family.grad(&x)?)?)
        }
        Command::Dual { family } => {
            let family: Family = parse_inline_or_file(&family, "family")?;
            emit(out, &family.dual_descriptor())
        }
        Command::Verify(args) => run_verify(args),
        Command::Solve(args) => run_solve(args),
    }
}

fn emit(out: &mut dyn Write, line: &str) -> Result<i32, Failure> {
    writeln!(out, "{line}").map_err(|e| Failure::usage(format!("cannot write output: {e}")))?;
    Ok(EXIT_OK)
}

fn load_point(args: &PointArgs) -> Result<(Family, Matrix), Failure> {
    let family: Family = parse_inline_or_file(&args.family, "family")?;
    let x: Matrix = parse_file(&args.matrix, "matrix")?;
    if x.shape() != family.shape() {
        let (r, c) = family.shape();
        return Err(Failure::usage(format!(
            "matrix is {}x{}, family expects {r}x{c}",
            x.rows(),
            x.cols()
        )));
    }
    Ok((family, x))
}

fn run_verify(args: VerifyArgs) -> Result<i32, Failure> {
    let family: Family = parse_inline_or_file(&args.family, "family")?;
    let tolerances: Tolerances = match &args.tolerances {
        Some(t) => parse_inline_or_file(t, "tolerances")?,
        None => Tolerances::default(),
    };
    let mut spec = SampleSpec::new(family, args.samples, args.seed);
    if let Some(w) = &args.window {
        spec = spec.with_window(w[0], w[1]);
    }
    if let Some(mix) = args.sign_mix {
        spec = spec.with_sign_mix(mix);
    }
    spec.validate()?;
    let pool = thread_pool()?;
    let report = pool.install(|| verify(&spec, &tolerances))?;
    write_file(&args.report, &report.to_json())?;
    Ok(if report.overall { EXIT_OK } else { EXIT_FAILED })
}

fn run_solve(args: SolveArgs) -> Result<i32, Failure> {
    let problem: Problem = parse_file(&args.problem, "problem")?;
    let options: SolverOptions = match &args.options {
        Some(o) => parse_inline_or_file(o, "solver options")?,
        None => SolverOptions::default(),
    };
    let result = solve(&problem, &options)?;
    let json = serde_json::to_string_pretty(&result).map_err(|e| Failure::usage(e.to_string()))?;
    write_file(&args.output, &json)?;
    Ok(if result.success { EXIT_OK } else { EXIT_FAILED })
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Failure::usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| Failure::usage(format!("cannot start thread pool: {e}")))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string(value).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_inline_or_file<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    if arg.trim_start().starts_with('{') {
        parse_str(arg, what)
    } else {
        parse_file(Path::new(arg), what)
    }
}

fn parse_file<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {what} file {}: {e}", path.display())))?;
    parse_str(&text, what)
}

fn parse_str<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::usage(format!("invalid {what}: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, format!("{contents}\n"))
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}
