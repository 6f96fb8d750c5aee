//! `jetcalc`: compute jets of DSL maps, apply canonical maps and run the law
//! suite, all over JSON.
//!
//! Exit codes: 0 success, 1 verify found failing laws, 2 parse or usage
//! error, 3 domain error, 4 type or shape mismatch, 5 unknown law. Every
//! error is reported as a JSON object on stderr.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jetcalc::canon::{ell, flip_jet2, lambda, prolong1, prolong2, prolong_double};
use jetcalc::jet::{doublejet_of, jet1_of, jet2_of, vbjet_of};
use jetcalc::props::{run_suite, SuiteConfig};
use jetcalc::{AnyJet, Error, SmoothMap};
use serde_json::json;

#[derive(Parser)]
#[command(name = "jetcalc", version, about = "Jet-bundle calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jet at the origin of a map given in the DSL.
    Jet {
        #[arg(long, value_enum)]
        order: Order,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        m: usize,
        /// Fiber dimension; only with --fiber-map.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// Fiber part of a section; turns an order-1 jet into a VBJet.
        #[arg(long, allow_hyphen_values = true)]
        fiber_map: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Applies a canonical map to a jet payload.
    Apply {
        #[arg(long, value_enum)]
        op: Op,
        /// Map h for --op prolong, with variables x1..xm.
        #[arg(long = "with", allow_hyphen_values = true)]
        with: Option<String>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the law suite and prints its report.
    Verify {
        #[arg(long, env = "JETCALC_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Comma-separated law names; all laws when absent.
        #[arg(long, value_delimiter = ',')]
        laws: Option<Vec<String>>,
        #[arg(long)]
        tol_exact: Option<f64>,
        #[arg(long)]
        tol_fd: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Double,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Lambda,
    Ell,
    Flip,
    Prolong,
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            kind,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(2, "usage", message)
    }

    fn mismatch(message: impl Into<String>) -> Self {
        Self::new(4, "type_mismatch", message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Parse(_) => (2, "parse"),
            Error::Domain(_) => (3, "domain"),
            Error::Shape(_) | Error::AnchorMismatch { .. } => (4, "shape"),
            Error::Invalid(_) => (4, "invalid_payload"),
            Error::UnknownLaw(_) => (5, "unknown_law"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

impl From<jetcalc::ParseError> for Failure {
    fn from(e: jetcalc::ParseError) -> Self {
        Error::from(e).into()
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = fs::read_to_string(p)
                .map_err(|e| Failure::new(4, "io", format!("{}: {e}", p.display())))?
        }
        None => {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::new(4, "io", format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::new(4, "io", e.to_string());
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(io_err),
        None => writeln!(io::stdout().lock(), "{text}").map_err(io_err),
    }
}

fn cmd_jet(
    order: Order,
    p: usize,
    m: usize,
    k: Option<usize>,
    map: &str,
    fiber_map: Option<&str>,
) -> Result<AnyJet, Failure> {
    if k.is_some() != fiber_map.is_some() {
        return Err(Failure::usage("--k and --fiber-map go together"));
    }
    let jet = match (order, fiber_map, k) {
        (Order::One, Some(fiber), Some(k)) => {
            let base = SmoothMap::parse(map, p, m)?;
            let fiber = SmoothMap::parse(fiber, p, k)?;
            AnyJet::Vb(vbjet_of(&base, &fiber)?)
        }
        (_, Some(_), _) => return Err(Failure::usage("--fiber-map needs --order 1")),
        (Order::One, None, _) => AnyJet::Jet1(jet1_of(&SmoothMap::parse(map, p, m)?)?),
        (Order::Two, None, _) => AnyJet::Jet2(jet2_of(&SmoothMap::parse_split(map, p, m)?)?),
        (Order::Double, None, _) => {
            AnyJet::Double(doublejet_of(&SmoothMap::parse_split(map, p, m)?)?)
        }
    };
    Ok(jet)
}

fn cmd_apply(op: Op, with: Option<&str>, payload: &str) -> Result<AnyJet, Failure> {
    let jet = AnyJet::from_json(payload)?;
    if matches!(op, Op::Prolong) != with.is_some() {
        return Err(Failure::usage("--with is required for --op prolong and only there"));
    }
    let wrong = |want: &str| {
        Failure::mismatch(format!("--op needs a {want} payload, got {}", jet.kind()))
    };
    let out = match (op, &jet) {
        (Op::Lambda, AnyJet::Jet2(j)) => AnyJet::Double(lambda(j)),
        (Op::Lambda, _) => return Err(wrong("Jet2")),
        (Op::Ell, AnyJet::Double(v)) => AnyJet::Double(ell(v)),
        (Op::Ell, _) => return Err(wrong("DoubleJet")),
        (Op::Flip, AnyJet::Jet2(j)) => AnyJet::Jet2(flip_jet2(j)),
        (Op::Flip, _) => return Err(wrong("Jet2")),
        (Op::Prolong, _) => {
            let src = with.expect("checked above");
            let m = match &jet {
                AnyJet::Jet1(j) => j.m,
                AnyJet::Jet2(j) => j.m,
                AnyJet::Double(v) => v.m,
                AnyJet::Vb(_) => return Err(wrong("Jet1, Jet2 or DoubleJet")),
            };
            let h = SmoothMap::parse_inferred(src, m)?;
            match &jet {
                AnyJet::Jet1(j) => AnyJet::Jet1(prolong1(&h, j)?),
                AnyJet::Jet2(j) => AnyJet::Jet2(prolong2(&h, j)?),
                AnyJet::Double(v) => AnyJet::Double(prolong_double(&h, v)?),
                AnyJet::Vb(_) => unreachable!("rejected above"),
            }
        }
    };
    Ok(out)
}

fn cmd_verify(
    seed: u64,
    trials: usize,
    laws: Option<&[String]>,
    tol_exact: Option<f64>,
    tol_fd: Option<f64>,
) -> Result<(String, bool), Failure> {
    let defaults = SuiteConfig::default();
    let config = SuiteConfig {
        seed,
        trials,
        tol_exact: tol_exact.unwrap_or(defaults.tol_exact),
        tol_fd: tol_fd.unwrap_or(defaults.tol_fd),
        ..defaults
    };
    config.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let reports = run_suite(&config, laws)?;
    let passed = reports.iter().all(|r| r.passed);
    let report = serde_json::to_string(&reports).expect("reports serialize");
    Ok((report, passed))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Jet {
            order,
            p,
            m,
            k,
            map,
            fiber_map,
            out,
        } => {
            let jet = cmd_jet(order, p, m, k, &map, fiber_map.as_deref())?;
            write_output(out.as_ref(), &jet.to_json())?;
            Ok(true)
        }
        Command::Apply {
            op,
            with,
            input,
            out,
        } => {
            let payload = read_input(input.as_ref())?;
            let jet = cmd_apply(op, with.as_deref(), &payload)?;
            write_output(out.as_ref(), &jet.to_json())?;
            Ok(true)
        }
        Command::Verify {
            seed,
            trials,
            laws,
            tol_exact,
            tol_fd,
            out,
        } => {
            let (report, passed) = cmd_verify(seed, trials, laws.as_deref(), tol_exact, tol_fd)?;
            write_output(out.as_ref(), &report)?;
            Ok(passed)
        }
    }
}

fn report(f: &Failure) {
    let body = json!({ "error": f.kind, "message": f.message, "exit_code": f.code });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&Failure::usage(e.to_string().trim_end()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            report(&f);
            ExitCode::from(f.code)
        }
    }
}
