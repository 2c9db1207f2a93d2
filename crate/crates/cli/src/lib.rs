//! The `pat` command-line tool.
//!
//! Every command reads its inputs, does all of its work in memory and only
//! then writes files under the directory given by `--out`. A failing command
//! therefore leaves nothing behind. Exit codes: 0 on success, 1 on a domain,
//! validation or IO error, 2 on a usage or syntax error.

pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use pat_core::event::{parse_log, write_log};
use pat_core::{AccountId, Attestation, ClaimId, ClaimStatus, Engine, EngineParams, TokenDesign, TokenId, Verification};
use pat_sim::sweep::write_rows_csv;
use pat_sim::{replay, sweep, write_csv, Grid, ScenarioConfig, SimError};
use serde::Deserialize;

use report::Section;

pub const LOG_FILE: &str = "events.log";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Parser)]
#[command(name = "pat", version, about = "Positive-action token engine and simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a token from a TOML design and write the extended log.
    CreateToken {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Existing log to extend; a fresh ledger is started without one.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Creator account as 64 hex digits.
        #[arg(long)]
        creator: Option<AccountId>,
    },
    /// Apply a file of claim operations (one JSON object per line) to a log.
    SubmitClaims {
        #[arg(long)]
        attestations: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario and write its event log and metrics.
    RunSim {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a scenario over a parameter grid and write one CSV row per point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a log's hash chain.
    VerifyLog { log: PathBuf },
    /// Print tables describing a log.
    Report {
        log: PathBuf,
        /// Comma-separated; all sections when omitted.
        #[arg(long, value_delimiter = ',')]
        sections: Vec<Section>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input syntax.
    #[error("{0}")]
    Usage(String),
    #[error("{name}: {detail}")]
    Failed { name: &'static str, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed { .. } => 1,
        }
    }

    fn failed(name: &'static str, detail: impl ToString) -> Self {
        CliError::Failed { name, detail: detail.to_string() }
    }

    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::failed("Io", format!("{}: {err}", path.display()))
    }
}

impl From<pat_core::Error> for CliError {
    fn from(e: pat_core::Error) -> Self {
        CliError::failed(e.name(), e)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Engine(e) => e.into(),
            e @ SimError::InvalidConfig { .. } => CliError::failed("InvalidConfig", e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// One line of a `submit-claims` input file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum ClaimOp {
    Submit { claimant: AccountId, token: TokenId, quantity: u64 },
    Attest(Attestation),
    Finalize { claim: ClaimId },
    Advance { ticks: u64 },
}

/// Runs a parsed command, writing human-readable output to `stdout`.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::CreateToken { design, out, log, creator } => {
            create_token(design, out, log.as_deref(), creator.as_ref(), stdout)
        }
        Command::SubmitClaims { attestations, log, out } => submit_claims(attestations, log, out, stdout),
        Command::RunSim { config, out, seed } => run_sim(config, out, *seed, stdout),
        Command::Sweep { config, grid, out } => run_sweep(config, grid, out, stdout),
        Command::VerifyLog { log } => verify(log, stdout),
        Command::Report { log, sections } => print_report(log, sections, stdout),
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read(path)?).map_err(|_| CliError::Usage(format!("{}: not UTF-8 text", path.display())))
}

/// Reads a TOML file, separating syntax errors (usage) from schema errors.
fn read_toml(path: &Path) -> CliResult<String> {
    let text = read_text(path)?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message())))?;
    Ok(text)
}

fn write_outputs(out: &Path, files: &[(&str, &[u8])]) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    for (name, bytes) in files {
        let path = out.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

fn log_bytes(engine: &Engine) -> Vec<u8> {
    let mut buf = Vec::new();
    write_log(engine.log(), &mut buf).expect("writing to memory cannot fail");
    buf
}

fn load_engine(path: &Path) -> CliResult<Engine> {
    let records = parse_log(&read(path)?)?;
    if records.is_empty() {
        return Err(CliError::failed("EmptyLog", format!("{} has no records", path.display())));
    }
    Ok(Engine::replay(&records)?)
}

fn create_token(
    design: &Path,
    out: &Path,
    log: Option<&Path>,
    creator: Option<&AccountId>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let text = read_toml(design)?;
    let design: TokenDesign =
        toml::from_str(&text).map_err(|e| CliError::failed("InvalidDesign", e.message()))?;
    let mut engine = match log {
        Some(path) => load_engine(path)?,
        None => Engine::new(EngineParams::default())?,
    };
    let creator = creator.copied().unwrap_or_else(|| AccountId::derive("creator"));
    let id = engine.create_token(creator, design)?;
    write_outputs(out, &[(LOG_FILE, &log_bytes(&engine))])?;
    writeln!(stdout, "created token {id}").ok();
    Ok(())
}

fn submit_claims(ops: &Path, log: &Path, out: &Path, stdout: &mut dyn Write) -> CliResult<()> {
    let text = read_text(ops)?;
    let mut engine = load_engine(log)?;
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| CliError::Usage(format!("line {n}: {e}")))?;
        let op: ClaimOp =
            serde_json::from_value(value).map_err(|e| CliError::failed("InvalidOperation", format!("line {n}: {e}")))?;
        let at_line = |e: pat_core::Error| CliError::failed(e.name(), format!("line {n}: {e}"));
        let msg = match op {
            ClaimOp::Submit { claimant, token, quantity } => {
                let id = engine.submit_claim(claimant, token, quantity).map_err(at_line)?;
                format!("submitted claim {id}{}", closed_note(&engine, id))
            }
            ClaimOp::Attest(att) => {
                let slot = engine.submit_attestation(&att).map_err(at_line)?;
                format!("claim {} verifier {}: {slot:?}{}", att.claim, att.verifier_index, closed_note(&engine, att.claim))
            }
            ClaimOp::Finalize { claim } => {
                let minted = engine.finalize_claim(claim).map_err(at_line)?;
                let status = engine.get_claim(claim).map_err(at_line)?.status;
                format!("claim {claim}: {status:?}, minted {minted}")
            }
            ClaimOp::Advance { ticks } => {
                let now = engine.advance_time(ticks).map_err(at_line)?;
                format!("time is now {now}")
            }
        };
        lines.push(format!("{n}: {msg}"));
    }
    write_outputs(out, &[(LOG_FILE, &log_bytes(&engine))])?;
    for line in lines {
        writeln!(stdout, "{line}").ok();
    }
    Ok(())
}

/// `"; claim Approved, minted 1"` once a claim has closed, else nothing.
fn closed_note(engine: &Engine, claim: ClaimId) -> String {
    match engine.get_claim(claim) {
        Ok(c) if c.status != ClaimStatus::Open => format!("; claim {:?}, minted {}", c.status, c.minted),
        _ => String::new(),
    }
}

fn load_config(path: &Path) -> CliResult<ScenarioConfig> {
    Ok(ScenarioConfig::from_toml(&read_toml(path)?)?)
}

fn run_sim(config: &Path, out: &Path, seed: Option<u64>, stdout: &mut dyn Write) -> CliResult<()> {
    let mut config = load_config(config)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let result = pat_sim::run(&config)?;
    let mut metrics = Vec::new();
    write_csv(&result.frames, &mut metrics).map_err(|e| CliError::failed("Io", e))?;
    write_outputs(out, &[(LOG_FILE, &log_bytes(&result.engine)), (METRICS_FILE, &metrics)])?;

    let s = result.summary();
    writeln!(
        stdout,
        "scenario {} seed {}\ntokens {}\nclaims submitted {} approved {} rejected {} open {}\n\
         approval ratio {:.3}\nlisted tokens {}\nlog records {}\nhead {}",
        config.name,
        config.seed,
        s.tokens,
        s.claims_submitted,
        s.claims_approved,
        s.claims_rejected,
        s.claims_open,
        s.approval_ratio(),
        s.listed_tokens,
        s.log_records,
        s.head_hash,
    )
    .ok();
    Ok(())
}

fn run_sweep(config: &Path, grid: &Path, out: &Path, stdout: &mut dyn Write) -> CliResult<()> {
    let base = load_config(config)?;
    let grid = Grid::from_toml(&read_toml(grid)?)?;
    let rows = sweep(&base, &grid)?;
    let mut csv = Vec::new();
    write_rows_csv(&grid, &rows, &mut csv).map_err(|e| CliError::failed("Io", e))?;
    write_outputs(out, &[(SWEEP_FILE, &csv)])?;
    writeln!(stdout, "{} runs written to {}", rows.len(), out.join(SWEEP_FILE).display()).ok();
    Ok(())
}

fn verify(log: &Path, stdout: &mut dyn Write) -> CliResult<()> {
    let bytes = read(log)?;
    match pat_core::verify_log_bytes::<u64>(&bytes) {
        Verification::Intact => {
            let records = parse_log::<u64>(&bytes)?;
            let head = records.last().map_or_else(|| "none".to_owned(), |r| r.hash.to_string());
            writeln!(stdout, "ok: {} records, head {head}", records.len()).ok();
            Ok(())
        }
        Verification::FirstBad(seq) => {
            Err(CliError::failed("CorruptLog", format!("first bad record at seq {seq}")))
        }
    }
}

fn print_report(log: &Path, sections: &[Section], stdout: &mut dyn Write) -> CliResult<()> {
    let records = parse_log(&read(log)?)?;
    let (engine, _) = replay(&records)?;
    let sections = if sections.is_empty() { &Section::ALL[..] } else { sections };
    let tables = report::build(engine.as_ref(), sections);
    let text: Vec<String> = tables.iter().map(|t| t.to_string()).collect();
    write!(stdout, "{}", text.join("\n")).ok();
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                write!(stdout, "{text}").ok();
            } else {
                write!(stderr, "{text}").ok();
            }
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            writeln!(stderr, "error: {e}").ok();
            e.exit_code()
        }
    }
}
