//! The `mmes` command line.
//!
//! Exit codes: `0` success (for `check`: the state is an MMES), `1` `check`
//! found a non-MMES state, `2` parse or validation error, `3` I/O error,
//! `64` usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::ket::{format_ket, parse_ket, eval_ket};
use crate::numfmt::fmt_sig;
use crate::potential::{analyze, BipartitionReport, Verdict, DEFAULT_TOL};
use crate::qstate::{catalog, catalog_lookup, NormalizePolicy, PureState};
use crate::search::{minimize_potential, Method, MinimizeConfig, MinimizeResult};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_MMES: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "mmes", version, about = "Multipartite entanglement potential of pure qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print all balanced purities, π_ME, K and the verdict.
    Analyze(StateArgs),
    /// Print only the MMES verdict; exit 0 for an MMES, 1 otherwise.
    Check(StateArgs),
    /// Minimize π_ME from random starts.
    Minimize(MinimizeArgs),
    /// List the catalog, or emit one entry with --state.
    States(StatesArgs),
    /// Validate an input and echo its normalized amplitudes.
    Parse(StateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
#[group(id = "input", required = true, multiple = false)]
pub struct Input {
    /// Catalog state as name/variant, e.g. hs/omega.
    #[arg(long)]
    pub state: Option<String>,
    /// Ket expression, e.g. "(|0011>+|1100>)/sqrt(2)".
    #[arg(long)]
    pub expr: Option<String>,
    /// State file: .json amplitudes or .ket expression.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Scale the input to unit norm instead of rejecting it.
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::ProjectedGradient)]
    pub method: MethodArg,
    /// Write the (iteration, restart, value) trace here.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MethodArg {
    ProjectedGradient,
    AnnealThenPolish,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ProjectedGradient => Method::ProjectedGradient,
            MethodArg::AnnealThenPolish => Method::AnnealThenPolish,
        }
    }
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    /// Emit a single entry.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Failure of one invocation, mapped to an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn from_error(err: Error, source: Option<&str>) -> Self {
        let code = match err {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_INVALID,
        };
        let message = match (&err, source) {
            (Error::Parse(p), Some(src)) => p.render(src),
            _ => format!("error: {err}"),
        };
        Failure { code, message }
    }
}

/// Run one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args, out),
        Command::Check(args) => cmd_check(&args, out),
        Command::Minimize(args) => cmd_minimize(&args, out),
        Command::States(args) => cmd_states(&args, out),
        Command::Parse(args) => cmd_parse(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn policy(renormalize: bool) -> NormalizePolicy {
    if renormalize {
        NormalizePolicy::Renormalize
    } else {
        NormalizePolicy::Strict
    }
}

fn parse_expression(text: &str, policy: NormalizePolicy) -> Result<PureState, Failure> {
    let ast = parse_ket(text).map_err(|e| Failure::from_error(e.into(), Some(text)))?;
    eval_ket(&ast, policy).map_err(|e| Failure::from_error(e, Some(text)))
}

fn read_file(path: &Path, policy: NormalizePolicy) -> Result<PureState, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("error: cannot read {}: {e}", path.display()),
    })?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            PureState::from_json_str(&text, policy).map_err(|e| Failure::from_error(e, None))
        }
        Some("ket") => parse_expression(&text, policy),
        _ => Err(Failure {
            code: EXIT_USAGE,
            message: format!(
                "error: {}: expected a .json or .ket file",
                path.display()
            ),
        }),
    }
}

fn load_state(input: &Input, renormalize: bool) -> Result<PureState, Failure> {
    let policy = policy(renormalize);
    if let Some(key) = &input.state {
        catalog_lookup(key).map_err(|e| Failure::from_error(e, None))
    } else if let Some(expr) = &input.expr {
        parse_expression(expr, policy)
    } else if let Some(path) = &input.file {
        read_file(path, policy)
    } else {
        unreachable!("clap enforces exactly one input")
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("error: {e}"),
    }
}

fn report_for(args: &StateArgs) -> Result<BipartitionReport, Failure> {
    let state = load_state(&args.input, args.renormalize)?;
    analyze(&state, args.tol).map_err(|e| Failure::from_error(e, None))
}

fn cmd_analyze(args: &StateArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let report = report_for(args)?;
    let text = match args.format {
        Format::Text => report.to_text(),
        Format::Json => format!("{}\n", report.to_json()),
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

/// One-line verdict, e.g. `MMES: yes (K = 0.0e0 ≤ 1e-8)`.
pub fn verdict_line(report: &BipartitionReport) -> String {
    let yes = report.verdict == Verdict::Mmes;
    let answer = if yes { "yes" } else { "no" };
    let cmp = if yes { '≤' } else { '>' };
    match (report.k_total, report.lower_bound) {
        (Some(k), _) => format!("MMES: {answer} (K = {k:.1e} {cmp} {:e})", report.tol),
        (None, Some(bound)) => format!(
            "MMES: {answer} (pi_ME - {} = {:.1e} {cmp} {:e})",
            fmt_sig(bound, 12),
            report.pi_me - bound,
            report.tol
        ),
        (None, None) => format!(
            "MMES: unknown (pi_ME = {}; no known lower bound for n = {})",
            fmt_sig(report.pi_me, 12),
            report.n
        ),
    }
}

fn cmd_check(args: &StateArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let report = report_for(args)?;
    let text = match args.format {
        Format::Text => verdict_line(&report),
        Format::Json => json!({
            "mmes": report.verdict == Verdict::Mmes,
            "verdict": report.verdict,
            "k_total": report.k_total,
            "pi_me": report.pi_me,
            "tol": report.tol,
        })
        .to_string(),
    };
    writeln!(out, "{text}").map_err(io_failure)?;
    Ok(if report.verdict == Verdict::Mmes {
        EXIT_OK
    } else {
        EXIT_NOT_MMES
    })
}

fn minimize_json(cfg: &MinimizeConfig, r: &MinimizeResult) -> serde_json::Value {
    let state: serde_json::Value =
        serde_json::from_str(&r.best_state.to_json_string()).expect("state json");
    json!({
        "n": cfg.n_qubits,
        "method": cfg.method,
        "seed": r.seed,
        "best_value": r.best_value,
        "best_restart": r.best_restart,
        "ket": format_ket(&r.best_state, 17),
        "state": state,
        "restarts": r.restarts.iter().map(|o| json!({
            "restart": o.restart,
            "final_value": o.final_value,
            "converged": o.converged,
            "iterations": o.iterations,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_minimize(args: &MinimizeArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let cfg = MinimizeConfig {
        n_qubits: args.n,
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed: args.seed,
        method: args.method.into(),
        ..MinimizeConfig::default()
    };
    let result = minimize_potential(&cfg).map_err(|e| Failure::from_error(e, None))?;
    if let Some(path) = &args.trace_csv {
        let file = fs::File::create(path).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("error: cannot write {}: {e}", path.display()),
        })?;
        result
            .write_trace_csv(std::io::BufWriter::new(file))
            .map_err(io_failure)?;
    }
    let doc = minimize_json(&cfg, &result);
    let text = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
        Format::Text => {
            let converged = result.restarts.iter().filter(|r| r.converged).count();
            format!(
                "best pi_ME = {}\nbest restart = {} of {} (seed {})\nconverged restarts = {converged}\nstate = {}\n{}\n",
                fmt_sig(result.best_value, 12),
                result.best_restart,
                cfg.restarts,
                result.seed,
                format_ket(&result.best_state, 12),
                serde_json::to_string(&doc["state"]).expect("json"),
            )
        }
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn cmd_states(args: &StatesArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let entries: Vec<_> = match &args.state {
        Some(key) => {
            let e = catalog()
                .iter()
                .find(|e| &e.key() == key)
                .ok_or_else(|| Failure::from_error(Error::CatalogMiss(key.clone()), None))?;
            vec![*e]
        }
        None => catalog().to_vec(),
    };
    let text = match args.format {
        Format::Text => entries
            .iter()
            .map(|e| {
                if args.state.is_some() {
                    format!("{}\t{}\n{}\n", e.key(), e.description, format_ket(&e.build(), 17))
                } else {
                    format!("{}\t{}\n", e.key(), e.description)
                }
            })
            .collect::<String>(),
        Format::Json => {
            let docs: Vec<serde_json::Value> = entries
                .iter()
                .map(|e| {
                    let s = e.build();
                    json!({
                        "name": e.name,
                        "variant": e.variant,
                        "description": e.description,
                        "ket": format_ket(&s, 17),
                        "state": serde_json::from_str::<serde_json::Value>(&s.to_json_string())
                            .expect("state json"),
                    })
                })
                .collect();
            let v = if args.state.is_some() {
                docs.into_iter().next().expect("one entry")
            } else {
                serde_json::Value::Array(docs)
            };
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn cmd_parse(args: &StateArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let state = load_state(&args.input, args.renormalize)?;
    let text = match args.format {
        Format::Json => format!("{}\n", state.to_json_string()),
        Format::Text => {
            let n = state.n_qubits();
            let mut s = format!("n = {n}\n");
            for (i, a) in state.amplitudes().iter().enumerate() {
                s.push_str(&format!(
                    "{i:>4} |{i:0n$b}> {} {}\n",
                    fmt_sig(a.re, 12),
                    fmt_sig(a.im, 12)
                ));
            }
            s
        }
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}
