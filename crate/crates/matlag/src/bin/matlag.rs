//! Command-line interface: construct, verify, and classify 2x2
//! Laguerre-type matrix differential operators and their matrix
//! weights.
//!
//! Exit codes: `0` success, `1` malformed input or runtime error, `2`
//! negative verdict (verification failure, classification refusal, or
//! a failed self-test criterion).  Output is deterministic
//! byte-for-byte for a fixed configuration and seed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use matlag::classify::{self, Verdict};
use matlag::io;
use matlag::mops::{self, build_by_moments};
use matlag::operators::LagOperator;
use matlag::reduce;
use matlag::selftest;
use matlag::symmetry;
use matlag::weights::WeightSpec;
use matlag::{Error, Result};

#[derive(Parser)]
#[command(
    name = "matlag",
    version,
    about = "Matrix weights and 2x2 Laguerre-type differential operators on (0, oo): \
             construction, orthogonal polynomials, symmetry verification, and \
             classification up to equivalence"
)]
struct Cli {
    /// Quadrature evaluation budget (overrides the MATLAG_QUAD_BUDGET
    /// environment variable)
    #[arg(long, global = true)]
    quad_budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an operator-weight pair from a named family: the matrix
    /// weight W on (0, oo) together with the second-order operator it
    /// symmetrizes (JSON pair, or a CSV dump of W over a t-grid)
    Family(FamilyCmd),
    /// Construct monic orthogonal polynomials for a matrix weight:
    /// coefficients, Gram matrices, and the three-term recurrence
    /// terms A_n and B_n
    Mops(MopsCmd),
    /// Verify the three symmetry equations tying a weight to its
    /// operator, plus boundary vanishing at 0 and decay at infinity
    Verify(VerifyCmd),
    /// Decide which canonical family an operator is
    /// conjugation-equivalent to, recovering parameters and an
    /// explicit equivalence witness (shift, time rescale, frame)
    Classify(ClassifyCmd),
    /// Probe irreducibility: the commutant of the weight over sampled
    /// points, and optionally of the polynomial coefficients, with a
    /// scalar-only / non-scalar verdict
    #[command(name = "reduce-check")]
    ReduceCheck(ReduceCmd),
    /// Run the built-in acceptance suite of ten numbered end-to-end
    /// checks and print a summary table
    Selftest(SelftestCmd),
}

/// Family selection flags, shared by every subcommand that can build
/// its input instead of reading a file.
#[derive(Args, Clone, Debug, Default)]
struct FamilyArgs {
    /// Family name: F1, F2, F3, raw-v-eq-u, raw-v-eq-2u,
    /// raw-v-eq-half-u, raw-scalar-u, or diag-laguerre
    #[arg(long)]
    family: Option<String>,
    /// Laguerre exponent alpha (F1, F2)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Shape parameter beta (F1, F3)
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Coupling b (F1, F2)
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Linear-coefficient eigenvalue u (raw families)
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    /// Constant-term entry c21; complex accepted as "re,im" (raw
    /// families)
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    c21: Option<Complex64>,
    /// Constant-term entry c22 (raw families)
    #[arg(long, allow_hyphen_values = true)]
    c22: Option<f64>,
    /// Weight coupling gamma (raw families)
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// First exponent of the diagonal Laguerre weight
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    /// Second exponent of the diagonal Laguerre weight
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<f64>,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad number {p:?}: {e}"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(format!("expected \"re\" or \"re,im\", got {s:?}")),
    }
}

fn required<T: Copy>(x: Option<T>, flag: &str, family: &str) -> Result<T> {
    x.ok_or_else(|| Error::InvalidInput(format!("{family} requires {flag}")))
}

fn required_real(x: Option<Complex64>, flag: &str, family: &str) -> Result<f64> {
    let z = required(x, flag, family)?;
    if z.im != 0.0 {
        return Err(Error::InvalidInput(format!(
            "{family} takes a real {flag} (got imaginary part {})",
            z.im
        )));
    }
    Ok(z.re)
}

impl FamilyArgs {
    fn is_present(&self) -> bool {
        self.family.is_some()
    }

    fn resolve(&self) -> Result<WeightSpec> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("--family is required".into()))?;
        let spec = match name {
            "F1" | "f1" => WeightSpec::F1 {
                alpha: required(self.alpha, "--alpha", name)?,
                beta: required(self.beta, "--beta", name)?,
                b: required(self.b, "--b", name)?,
            },
            "F2" | "f2" => WeightSpec::F2 {
                alpha: required(self.alpha, "--alpha", name)?,
                b: required(self.b, "--b", name)?,
            },
            "F3" | "f3" => WeightSpec::F3 {
                beta: required(self.beta, "--beta", name)?,
            },
            "raw-v-eq-u" => WeightSpec::RawVEqU {
                u: required(self.u, "--u", name)?,
                c21: required_real(self.c21, "--c21", name)?,
                c22: required(self.c22, "--c22", name)?,
                gamma: required(self.gamma, "--gamma", name)?,
            },
            "raw-v-eq-2u" => WeightSpec::RawVEq2U {
                u: required(self.u, "--u", name)?,
                c21: required_real(self.c21, "--c21", name)?,
                gamma: required(self.gamma, "--gamma", name)?,
            },
            "raw-v-eq-half-u" => WeightSpec::RawVEqHalfU {
                u: required(self.u, "--u", name)?,
                c22: required(self.c22, "--c22", name)?,
            },
            "raw-scalar-u" => WeightSpec::RawScalarU {
                u: required(self.u, "--u", name)?,
                c21: required(self.c21, "--c21", name)?,
                c22: required(self.c22, "--c22", name)?,
                gamma: required(self.gamma, "--gamma", name)?,
            },
            "diag-laguerre" => WeightSpec::DiagLaguerre {
                alpha1: required(self.alpha1, "--alpha1", name)?,
                alpha2: required(self.alpha2, "--alpha2", name)?,
            },
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown family {other:?}; expected F1, F2, F3, raw-v-eq-u, \
                     raw-v-eq-2u, raw-v-eq-half-u, raw-scalar-u, or diag-laguerre"
                )))
            }
        };
        spec.check_valid()?;
        Ok(spec)
    }
}

/// A weight comes from exactly one source: a JSON file or family
/// flags.
#[derive(Args, Clone, Debug)]
struct WeightSource {
    /// Weight JSON: a bare spec or any document with a "weight" key
    #[arg(long)]
    weight: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
}

impl WeightSource {
    fn resolve(&self) -> Result<WeightSpec> {
        match (&self.weight, self.family.is_present()) {
            (Some(_), true) => Err(Error::InvalidInput(
                "conflicting weight sources: give --weight or --family, not both".into(),
            )),
            (Some(path), false) => {
                let spec = io::read_weight(path)?;
                spec.check_valid()?;
                Ok(spec)
            }
            (None, true) => self.family.resolve(),
            (None, false) => Err(Error::InvalidInput(
                "a weight source is required: --weight <file> or --family <name>".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Args)]
struct FamilyCmd {
    #[command(flatten)]
    family: FamilyArgs,
    /// Output format: a JSON operator-weight pair, or CSV values of W
    /// over a t-grid
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Comma-separated t values for the CSV dump (default: the
    /// standard verification grid)
    #[arg(long)]
    grid: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MopsCmd {
    #[command(flatten)]
    weight: WeightSource,
    /// Highest polynomial degree to construct
    #[arg(long, default_value_t = mops::DEFAULT_N)]
    n: usize,
    /// Output format: a JSON document, or CSV with one row per matrix
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCmd {
    /// Operator JSON: bare {C, U, V} or any document with an
    /// "operator" key (default: the weight family's own operator)
    #[arg(long)]
    op: Option<PathBuf>,
    #[command(flatten)]
    weight: WeightSource,
    /// Residual tolerance for the symmetry equations
    #[arg(long, default_value_t = symmetry::DEFAULT_TOL)]
    tol: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyCmd {
    /// Operator JSON: bare {C, U, V} or any document with an
    /// "operator" key
    #[arg(long)]
    op: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceCmd {
    #[command(flatten)]
    weight: WeightSource,
    /// Also probe the commutant of the polynomial coefficients up to
    /// this degree
    #[arg(long)]
    mops: Option<usize>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestCmd {
    /// Run a single criterion (1-10) instead of the whole suite
    #[arg(long)]
    criterion: Option<usize>,
    /// Seed for the randomized criteria
    #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
    seed: u64,
    /// Output format: the summary table, or a JSON document
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Positive outcome or a negative verdict (exit code 2).
enum Outcome {
    Ok,
    Negative,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(budget) = cli.quad_budget {
        std::env::set_var("MATLAG_QUAD_BUDGET", budget.to_string());
    }
    match dispatch(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Family(args) => family_cmd(&args),
        Command::Mops(args) => mops_cmd(&args),
        Command::Verify(args) => verify_cmd(&args),
        Command::Classify(args) => classify_cmd(&args),
        Command::ReduceCheck(args) => reduce_cmd(&args),
        Command::Selftest(args) => selftest_cmd(&args),
    }
}

fn parse_grid(arg: Option<&str>) -> Result<Vec<f64>> {
    match arg {
        None => Ok(symmetry::default_grid()),
        Some(s) => s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad grid value {p:?}: {e}")))
            })
            .collect(),
    }
}

fn family_cmd(args: &FamilyCmd) -> Result<Outcome> {
    let spec = args.family.resolve()?;
    let content = match args.format {
        Format::Json => {
            let op = spec.operator()?;
            io::to_json_string(&io::pair_doc(&op, &spec))
        }
        Format::Csv => {
            let grid = parse_grid(args.grid.as_deref())?;
            io::weight_grid_csv(&spec, &grid)?
        }
    };
    io::write_output(args.out.as_deref(), &content)?;
    Ok(Outcome::Ok)
}

fn mops_cmd(args: &MopsCmd) -> Result<Outcome> {
    let spec = args.weight.resolve()?;
    let seq = build_by_moments(&spec, args.n)?;
    let content = match args.format {
        Format::Json => io::to_json_string(&io::mops_doc(&spec, &seq)),
        Format::Csv => io::mops_csv(&seq)?,
    };
    io::write_output(args.out.as_deref(), &content)?;
    Ok(Outcome::Ok)
}

fn verify_cmd(args: &VerifyCmd) -> Result<Outcome> {
    let spec = args.weight.resolve()?;
    let op = match &args.op {
        Some(path) => io::read_operator(path)?,
        None => spec.operator()?,
    };
    let grid = symmetry::default_grid();
    let report = symmetry::check(&op, &spec, &grid, args.tol)?;
    let pass = report.pass;
    let content = io::to_json_string(&io::verify_doc(&op, &spec, &report));
    io::write_output(args.out.as_deref(), &content)?;
    Ok(if pass { Outcome::Ok } else { Outcome::Negative })
}

fn classify_cmd(args: &ClassifyCmd) -> Result<Outcome> {
    let op: LagOperator = match (&args.op, args.family.is_present()) {
        (Some(_), true) => {
            return Err(Error::InvalidInput(
                "conflicting operator sources: give --op or --family, not both".into(),
            ))
        }
        (Some(path), false) => io::read_operator(path)?,
        (None, true) => args.family.resolve()?.operator()?,
        (None, false) => {
            return Err(Error::InvalidInput(
                "an operator source is required: --op <file> or --family <name>".into(),
            ))
        }
    };
    let cls = classify::classify(&op);
    let refused = matches!(cls.verdict, Verdict::NotSymmetrizable { .. });
    let content = io::to_json_string(&io::classification_doc(&op, &cls));
    io::write_output(args.out.as_deref(), &content)?;
    Ok(if refused { Outcome::Negative } else { Outcome::Ok })
}

fn reduce_cmd(args: &ReduceCmd) -> Result<Outcome> {
    let spec = args.weight.resolve()?;
    let samples = reduce::default_samples();
    let mut reports = vec![reduce::weight_commutant(&spec, &samples)?];
    if let Some(n) = args.mops {
        let seq = build_by_moments(&spec, n)?;
        reports.push(reduce::mop_commutant(&seq)?);
    }
    let content = io::to_json_string(&io::reduce_doc(&spec, &reports));
    io::write_output(args.out.as_deref(), &content)?;
    Ok(Outcome::Ok)
}

fn selftest_cmd(args: &SelftestCmd) -> Result<Outcome> {
    let results = match args.criterion {
        Some(id) => vec![selftest::run(id, args.seed)?],
        None => selftest::run_all(args.seed)?,
    };
    let content = match args.format {
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "schema": io::SCHEMA,
                "kind": "selftest",
                "seed": args.seed,
                "results": results,
            });
            io::to_json_string(&doc)
        }
        ReportFormat::Table => selftest::format_table(&results),
    };
    io::write_output(args.out.as_deref(), &content)?;
    Ok(if selftest::all_passed(&results) {
        Outcome::Ok
    } else {
        Outcome::Negative
    })
}
