//! The `cutleg` command line: point evaluation, identity verification,
//! sweeps and closure round trips, reported as JSON or CSV.
//!
//! [`run`] is the whole program and writes to caller-supplied streams,
//! so it can be driven in-process.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::gegenbauer::{gegenbauer_all, renorm_gegenbauer};
use crate::harness::{
    closure_roundtrip, default_closure_grid, sweep, verify_identity, worst_rel_err, GridSpec,
    IdentityId, IdentityParams, IdentityReport, COHERENCE_TOL, SERIES_TOL,
};
use crate::legendre::{ferrers_p, ferrers_q, offcut_q_phase_removed};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: &str = "identity_id,n,lambda,kappa,x,t,z,lhs,rhs,abs_err,rel_err,tol,pass";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cutleg", version, about = "Gegenbauer and Ferrers function evaluation and identity checks")]
struct Cli {
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// key=value file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a special function at one point
    Eval {
        #[command(subcommand)]
        func: EvalFn,
    },
    /// Check one identity at one parameter tuple
    Verify {
        identity: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Check one identity over a Cartesian grid
    Sweep {
        identity: String,
        /// param=start:stop:count,... over n, lambda, kappa, x, t, z
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Expand a function in Gegenbauer terms and resynthesize it
    Closure {
        /// poly:c0,c1,.. | exp | runge
        #[arg(long = "fn")]
        func: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long = "N")]
        degree: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum EvalFn {
    /// C_n^λ(t)
    Gegenbauer(PolyArgs),
    /// ((n+λ)/λ) C_n^λ(t)
    RenormGegenbauer(PolyArgs),
    /// Ferrers P_ν^μ(x)
    FerrersP(CutArgs),
    /// Ferrers Q_ν^μ(x)
    FerrersQ(CutArgs),
    /// e^{-iπμ}𝔔_ν^μ(z), z > 1
    OffcutQ(OffcutArgs),
}

#[derive(Debug, Args)]
struct PolyArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
struct CutArgs {
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
}

#[derive(Debug, Args)]
struct OffcutArgs {
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub worst_rel_err: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub command: String,
    pub reports: Vec<IdentityReport>,
    pub summary: Summary,
}

impl ReportDocument {
    fn new(command: String, reports: Vec<IdentityReport>, started: Instant) -> Self {
        let summary = Summary {
            total: reports.len(),
            passed: reports.iter().filter(|r| r.pass).count(),
            worst_rel_err: worst_rel_err(&reports),
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        ReportDocument {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            reports,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }
}

/// Failures that end the run with exit code 2.
#[derive(Debug, thiserror::Error)]
enum UsageError {
    #[error("{0}")]
    Lib(#[from] Error),
    #[error("missing required flag --{0}")]
    Missing(&'static str),
    #[error("config: {0}")]
    Config(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

/// Plain `key = value` lines; `#` starts a comment.
#[derive(Debug, Default)]
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self, UsageError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError::Config(format!("line {}: expected key=value", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Config(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, UsageError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| UsageError::Config(format!("bad value '{v}' for {key}"))),
        }
    }

    /// The flag if given, else the config entry.
    fn or<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, UsageError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn tol_for(&self, flag: Option<f64>, id: IdentityId) -> Result<f64, UsageError> {
        if let Some(t) = self.or(flag, "tol")? {
            return Ok(t);
        }
        let (key, fallback) = match id.default_tol() {
            t if t == SERIES_TOL => ("series_tol", t),
            t if t == COHERENCE_TOL => ("coherence_tol", t),
            t => ("quadrature_tol", t),
        };
        Ok(self.get(key)?.unwrap_or(fallback))
    }
}

fn required<T>(v: Option<T>, name: &'static str) -> Result<T, UsageError> {
    v.ok_or(UsageError::Missing(name))
}

/// Test function for `closure --fn`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosureFn {
    Poly(Vec<f64>),
    Exp,
    Runge,
}

impl ClosureFn {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "exp" => Ok(ClosureFn::Exp),
            "runge" => Ok(ClosureFn::Runge),
            _ => {
                let body = s
                    .strip_prefix("poly:")
                    .ok_or_else(|| Error::Domain(format!("unknown function '{s}'")))?;
                let coeffs = body
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Domain(format!("bad coefficient '{c}'")))
                    })
                    .collect::<Result<Vec<f64>, Error>>()?;
                Ok(ClosureFn::Poly(coeffs))
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ClosureFn::Poly(c) => c.iter().rev().fold(0.0, |acc, &a| acc * t + a),
            ClosureFn::Exp => t.exp(),
            ClosureFn::Runge => 1.0 / (1.0 + 25.0 * t * t),
        }
    }
}

fn csv_field<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map(|v| format!("{v:?}")).unwrap_or_default()
}

fn write_csv(out: &mut dyn Write, reports: &[IdentityReport]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        let p = &r.params;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:?},{:?},{:?},{}",
            r.identity_id,
            p.n.map(|n| n.to_string()).unwrap_or_default(),
            csv_field(p.lambda),
            csv_field(p.kappa),
            csv_field(p.x),
            csv_field(p.t),
            csv_field(p.z),
            r.lhs,
            r.rhs,
            r.abs_err,
            r.rel_err,
            r.tol,
            r.pass
        )?;
    }
    Ok(())
}

fn emit_reports(
    out: &mut dyn Write,
    format: Format,
    doc: &ReportDocument,
) -> Result<i32, UsageError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, doc).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(out, &doc.reports)?,
    }
    Ok(if doc.all_passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn emit_value(out: &mut dyn Write, format: Format, value: serde_json::Value) -> Result<i32, UsageError> {
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &value).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let obj = value.as_object().expect("eval output is an object");
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            writeln!(out, "{}", keys.join(","))?;
            let vals: Vec<String> = obj
                .values()
                .map(|v| v.as_str().map_or_else(|| v.to_string(), str::to_string))
                .collect();
            writeln!(out, "{}", vals.join(","))?;
        }
    }
    Ok(EXIT_PASS)
}

fn eval(func: EvalFn, cfg: &Config) -> Result<serde_json::Value, UsageError> {
    Ok(match func {
        EvalFn::Gegenbauer(a) => {
            let (n, lambda, t) = poly_args(a, cfg)?;
            let v = gegenbauer_all(n, lambda, t)?[n];
            json!({ "value": v })
        }
        EvalFn::RenormGegenbauer(a) => {
            let (n, lambda, t) = poly_args(a, cfg)?;
            json!({ "value": renorm_gegenbauer(n, lambda, t)? })
        }
        EvalFn::FerrersP(a) => {
            let (nu, mu, x) = cut_args(a, cfg)?;
            serde_json::to_value(ferrers_p(nu, mu, x)?).expect("serializable")
        }
        EvalFn::FerrersQ(a) => {
            let (nu, mu, x) = cut_args(a, cfg)?;
            serde_json::to_value(ferrers_q(nu, mu, x)?).expect("serializable")
        }
        EvalFn::OffcutQ(a) => {
            let nu = required(cfg.or(a.nu, "nu")?, "nu")?;
            let mu = required(cfg.or(a.mu, "mu")?, "mu")?;
            let z = required(cfg.or(a.z, "z")?, "z")?;
            json!({ "value": offcut_q_phase_removed(nu, mu, z)? })
        }
    })
}

fn poly_args(a: PolyArgs, cfg: &Config) -> Result<(usize, f64, f64), UsageError> {
    Ok((
        required(cfg.or(a.n, "n")?, "n")?,
        required(cfg.or(a.lambda, "lambda")?, "lambda")?,
        required(cfg.or(a.t, "t")?, "t")?,
    ))
}

fn cut_args(a: CutArgs, cfg: &Config) -> Result<(f64, f64, f64), UsageError> {
    Ok((
        required(cfg.or(a.nu, "nu")?, "nu")?,
        required(cfg.or(a.mu, "mu")?, "mu")?,
        required(cfg.or(a.x, "x")?, "x")?,
    ))
}

fn dispatch(
    cli: Cli,
    command_line: String,
    out: &mut dyn Write,
) -> Result<i32, UsageError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let format = match (cli.format, cfg.0.get("format")) {
        (Some(f), _) => f,
        (None, Some(v)) => Format::from_str(v, true)
            .map_err(|_| UsageError::Config(format!("bad value '{v}' for format")))?,
        (None, None) => Format::Json,
    };
    let started = Instant::now();
    match cli.command {
        Command::Eval { func } => {
            let value = eval(func, &cfg)?;
            emit_value(out, format, value)
        }
        Command::Verify { identity, params, tol } => {
            let id: IdentityId = identity.parse()?;
            let p = IdentityParams {
                n: cfg.or(params.n, "n")?,
                lambda: cfg.or(params.lambda, "lambda")?,
                kappa: cfg.or(params.kappa, "kappa")?,
                x: cfg.or(params.x, "x")?,
                t: cfg.or(params.t, "t")?,
                z: cfg.or(params.z, "z")?,
            };
            let tol = cfg.tol_for(tol, id)?;
            let report = verify_identity(id, &p, tol)?;
            emit_reports(out, format, &ReportDocument::new(command_line, vec![report], started))
        }
        Command::Sweep { identity, grid, tol } => {
            let id: IdentityId = identity.parse()?;
            let grid: GridSpec = required(cfg.or(grid, "grid")?, "grid")?.parse()?;
            let tol = cfg.tol_for(tol, id)?;
            let result = sweep(id, &grid, tol);
            emit_reports(out, format, &ReportDocument::new(command_line, result.reports, started))
        }
        Command::Closure { func, lambda, degree, tol } => {
            let f = ClosureFn::parse(&required(cfg.or(func, "fn")?, "fn")?)?;
            let lambda = required(cfg.or(lambda, "lambda")?, "lambda")?;
            let degree = required(cfg.or(degree, "N")?, "N")?;
            let tol = cfg.tol_for(tol, IdentityId::Eq1_4Roundtrip)?;
            let report =
                closure_roundtrip(|t| f.eval(t), lambda, degree, &default_closure_grid(), tol)?;
            emit_reports(out, format, &ReportDocument::new(command_line, vec![report], started))
        }
    }
}

/// Runs the program on `argv` (including the program name) and returns
/// the exit code. Documents go to `out`, messages to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let command_line = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    // buffer so that a late error leaves stdout empty
    let mut buf = Vec::new();
    match dispatch(cli, command_line, &mut buf) {
        Ok(code) => {
            if out.write_all(&buf).and_then(|_| out.flush()).is_err() {
                return EXIT_USAGE;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
