//! `kstab`: compute `η(S)`, Donaldson-Futaki values and stability verdicts
//! for plane blowups in Fano manifolds, from presets or JSON configs.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 config validation error.

pub mod document;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kstab_core::invariants::{self, InvariantError};
use kstab_core::models::{self, AmpleModelSequence, ModelError, SequenceConfig};
use kstab_core::verify::{self, Mutation, PRESET_DIMENSIONS};

use document::{EtaDocument, Format, Meta, TableDocument, TableRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "kstab",
    version,
    about = "Exact eta / Donaldson-Futaki invariants of plane blowups in Fano manifolds"
)]
pub struct Cli {
    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        env = "KSTAB_FORMAT",
        default_value = "json"
    )]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Omit the run metadata block (for golden comparisons).
    #[arg(long, global = true)]
    pub no_meta: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute eta(S), its volume cross-check and the verdict.
    Eta(SourceArgs),
    /// Reproduce the eta table for the degree-five del Pezzo presets n = 4, 5, 6.
    Table,
    /// Run the exact self-check suite.
    Verify(VerifyArgs),
    /// Compute the Donaldson-Futaki value at a given r.
    Df(DfArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct SourceSelect {
    /// Degree-five del Pezzo preset of dimension n (4, 5 or 6).
    #[arg(long)]
    pub preset_n: Option<u32>,
    /// JSON sequence config.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    #[command(flatten)]
    pub source: SourceSelect,
    /// Override deg c2 of the normal bundle.
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<i64>,
    /// Also emit K exact volume samples per piece.
    #[arg(long, value_name = "K")]
    pub emit_volume_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DfArgs {
    #[command(flatten)]
    pub inner: SourceArgs,
    /// Exponent r of the polarization; r·τ(S) must be a positive integer.
    #[arg(long, allow_hyphen_values = true)]
    pub r: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MutationArg {
    None,
    FlipSegreSign,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Only check this dimension.
    #[arg(long)]
    pub n: Option<u32>,
    /// Inject a defect to confirm the suite catches it.
    #[arg(long, value_enum, default_value = "none", hide = true)]
    pub mutate: MutationArg,
}

/// Failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnsupportedPreset(_) => Failure::usage(e.to_string()),
            _ => Failure::config(e.to_string()),
        }
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::InvalidSequence(_) | InvariantError::BoundaryVolumeNonzero(_) => {
                Failure::config(e.to_string())
            }
            InvariantError::NonPositiveR(_) | InvariantError::NonIntegralRTau { .. } => {
                Failure::usage(e.to_string())
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let echo: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let meta = (!cli.no_meta).then(|| Meta::new(echo));
    match execute(&cli, meta) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("kstab: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, meta: Option<Meta>) -> Result<i32, Failure> {
    match &cli.command {
        Command::Eta(args) => {
            let text = eta_document(args, None, meta)?.render(cli.format);
            emit(cli, &text)?;
            Ok(EXIT_OK)
        }
        Command::Df(args) => {
            let text = eta_document(&args.inner, Some(args.r), meta)?.render(cli.format);
            emit(cli, &text)?;
            Ok(EXIT_OK)
        }
        Command::Table => {
            let text = table_document(meta)?.render(cli.format);
            emit(cli, &text)?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => run_verify(cli, args),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
        }
    }
}

/// Resolves the sequence selected by `--preset-n` / `--config` and `--c2`.
pub fn load_sequence(args: &SourceArgs) -> Result<(String, AmpleModelSequence), Failure> {
    match (&args.source.preset_n, &args.source.config) {
        (Some(n), None) => {
            let base = models::preset_del_pezzo5(*n)?;
            match args.c2 {
                None => Ok((format!("preset n={n}"), base)),
                Some(c2) => {
                    // the two-piece shape with the degree re-solved for continuity
                    let cfg = SequenceConfig {
                        comment: None,
                        n: *n,
                        d: None,
                        degree: None,
                        c2,
                        c1_multiple: None,
                        pieces: None,
                    };
                    Ok((format!("preset n={n}, c2={c2}"), models::from_config(&cfg)?))
                }
            }
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let mut cfg = SequenceConfig::from_json(&text)?;
            if let Some(c2) = args.c2 {
                cfg.c2 = c2;
            }
            Ok((
                format!("config {}", path.display()),
                models::from_config(&cfg)?,
            ))
        }
        _ => Err(Failure::usage(
            "exactly one of --preset-n or --config is required",
        )),
    }
}

pub fn eta_document(
    args: &SourceArgs,
    r: Option<i64>,
    meta: Option<Meta>,
) -> Result<EtaDocument, Failure> {
    let (source, seq) = load_sequence(args)?;
    let report = invariants::eta_report(&seq, r)?;
    let samples = args
        .emit_volume_samples
        .map(|k| models::volume_samples(&seq, k));
    Ok(EtaDocument::new(meta, source, &seq, &report, samples))
}

pub fn table_document(meta: Option<Meta>) -> Result<TableDocument, Failure> {
    let mut rows = Vec::new();
    for n in PRESET_DIMENSIONS {
        let seq = models::preset_del_pezzo5(n)?;
        let eta = invariants::eta(&seq)?;
        let taus = seq.breakpoints();
        rows.push(TableRow {
            n,
            c2: seq.bundle.c2,
            tau1: (&taus[1]).into(),
            tau2: (&taus[2]).into(),
            verdict: invariants::verdict(&eta).to_string(),
            eta: (&eta).into(),
        });
    }
    Ok(TableDocument { meta, rows })
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> Result<i32, Failure> {
    let dims: Vec<u32> = match args.n {
        Some(n) if PRESET_DIMENSIONS.contains(&n) => vec![n],
        Some(n) => {
            return Err(Failure::usage(format!(
                "no preset for n = {n} (supported: 4, 5, 6)"
            )))
        }
        None => PRESET_DIMENSIONS.to_vec(),
    };
    let mutation = match args.mutate {
        MutationArg::None => Mutation::None,
        MutationArg::FlipSegreSign => Mutation::FlipSegreSign,
    };
    let checks = verify::run_suite(&dims, mutation);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut text = String::new();
    for check in &checks {
        text.push_str(&check.to_string());
        text.push('\n');
    }
    text.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    emit(cli, &text)?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}
