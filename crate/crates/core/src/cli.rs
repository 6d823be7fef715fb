//! `gradsens` command-line surface. Exit codes: 0 success, 1 usage error,
//! 2 data error, 3 numerical divergence.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{
    binary_task, load_csv, load_mnist_idx, standardize, synth_generate, ColumnScaling, Dataset,
    SynthSpec, STD_CONVENTION,
};
use crate::error::{Error, Result};
use crate::export::{mask_csv, pgm, surface_csv, to_json, trace_csv, write_file};
use crate::model::{loss, run_seed, train, TrainConfig};
use crate::sensitivity::{
    apply_mask, build_mask, compare, surface_slice, Agreement, DEFAULT_FLAT_EPSILON,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

const MASKED_EXAMPLES: usize = 5;

#[derive(Debug, Parser)]
#[command(
    name = "gradsens",
    version,
    about = "Feature sensitivity from loss-derivative trajectories of a tanh unit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train, record derivative traces and compare trends with Spearman's rho.
    Analyze(AnalyzeArgs),
    /// Train one run and export a 2-D loss-surface slice at the final parameters.
    Surface(SurfaceArgs),
    /// Build a pixel mask from second-derivative trends on an MNIST one-vs-rest task.
    MnistMask(MnistArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long, conflicts_with = "synth")]
    pub input: Option<PathBuf>,
    /// Use the built-in 13-feature synthetic dataset (seeded by --seed).
    #[arg(long)]
    pub synth: bool,
    /// Target column name (default: last column).
    #[arg(long)]
    pub target: Option<String>,
    /// Skip z-score standardization of features and target.
    #[arg(long)]
    pub no_standardize: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_FLAT_EPSILON)]
    pub flat_epsilon: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 1.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MnistArgs {
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub digit: u8,
    #[arg(long, default_value_t = 500)]
    pub limit: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_FLAT_EPSILON)]
    pub flat_epsilon: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Failure of a command, already mapped to its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Divergence { .. } => EXIT_DIVERGENCE,
            Error::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
struct RunManifest<T: Serialize> {
    command: &'static str,
    config: T,
    seed: u64,
    run_seeds: Vec<u64>,
    standardization: Option<StandardizationInfo>,
    started_unix_ms: u128,
    finished_unix_ms: u128,
    files: Vec<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    extra: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct StandardizationInfo {
    convention: &'static str,
    columns: Vec<ColumnScaling>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn load_data(
    args: &DataArgs,
    seed: u64,
) -> std::result::Result<(Dataset, Option<StandardizationInfo>), CliError> {
    let raw = match (&args.input, args.synth) {
        (Some(path), false) => load_csv(path, args.target.as_deref())?,
        (None, true) => {
            if args.target.is_some() {
                return Err(CliError::usage("--target applies only to --input"));
            }
            synth_generate(&SynthSpec::default_13(seed))?
        }
        _ => {
            return Err(CliError::usage(
                "exactly one of --input or --synth is required",
            ))
        }
    };
    if args.no_standardize {
        return Ok((raw, None));
    }
    let (data, columns) = standardize(&raw)?;
    Ok((
        data,
        Some(StandardizationInfo {
            convention: STD_CONVENTION,
            columns,
        }),
    ))
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Open {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn cmd_analyze(
    args: &AnalyzeArgs,
    stdout: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let started = now_ms();
    let cfg = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        seed: args.seed,
        runs: args.runs,
    };
    cfg.validate()?;
    let (data, standardization) = load_data(&args.data, args.seed)?;
    let results = train(&data, &cfg)?;
    let traces: Vec<_> = results.into_iter().map(|(_, t)| t).collect();
    let report = compare(&traces, &data, args.flat_epsilon)?;

    prepare_out(&args.out)?;
    let mut files = Vec::new();
    for t in &traces {
        let name = format!("trace_run{}.csv", t.run_id);
        write_file(&args.out, &name, &trace_csv(t, data.names()), &mut files)?;
    }
    write_file(&args.out, "report.json", &to_json(&report)?, &mut files)?;
    files.push("manifest.json".into());
    let manifest = RunManifest {
        command: "analyze",
        config: args,
        seed: args.seed,
        run_seeds: traces.iter().map(|t| t.seed_used).collect(),
        standardization,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        files: files.clone(),
        extra: serde_json::Value::Null,
    };
    std::fs::write(args.out.join("manifest.json"), to_json(&manifest)?).map_err(Error::from)?;

    let w = &mut *stdout;
    let io = |e: std::io::Error| CliError::from(Error::Io(e));
    writeln!(
        w,
        "{:<24} {:>22} {:>11} {:>6}",
        "feature", "rho", "trend", "agree"
    )
    .map_err(io)?;
    for f in &report.features {
        let rho = f
            .spearman_rho
            .value()
            .map_or("undefined".to_string(), |r| r.to_string());
        let agree = match f.agree {
            Agreement::Known(b) => b.to_string(),
            Agreement::NotApplicable(_) => "n/a".to_string(),
        };
        writeln!(
            w,
            "{:<24} {:>22} {:>11} {:>6}",
            f.name,
            rho,
            format!("{:?}", f.majority_trend),
            agree
        )
        .map_err(io)?;
    }
    let s = &report.summary;
    writeln!(
        w,
        "agree {} / disagree {} / undefined {} of {} features ({} runs x {} epochs)",
        s.n_agree, s.n_disagree, s.n_undefined, s.n_features, s.runs, s.epochs
    )
    .map_err(io)?;
    Ok(())
}

pub fn cmd_surface(
    args: &SurfaceArgs,
    stdout: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let started = now_ms();
    if args.grid < 3 || args.grid.is_multiple_of(2) {
        return Err(CliError::usage("grid must be odd"));
    }
    if !(args.half_width > 0.0 && args.half_width.is_finite()) {
        return Err(CliError::usage("half-width must be positive"));
    }
    let cfg = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        seed: args.seed,
        runs: 1,
    };
    cfg.validate()?;
    let (data, standardization) = load_data(&args.data, args.seed)?;
    let (params, trace) = train(&data, &cfg)?.remove(0);
    let direction_seed = run_seed(args.seed, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(direction_seed);
    let slice = surface_slice(&params, &data, args.half_width, args.grid, &mut rng)?;
    let final_loss = loss(&params, &data);

    prepare_out(&args.out)?;
    let mut files = Vec::new();
    write_file(&args.out, "surface.csv", &surface_csv(&slice), &mut files)?;
    files.push("manifest.json".into());
    let manifest = RunManifest {
        command: "surface",
        config: args,
        seed: args.seed,
        run_seeds: vec![trace.seed_used],
        standardization,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        files,
        extra: serde_json::json!({
            "direction_seed": direction_seed,
            "directions": slice.directions,
            "final_params": params,
            "final_loss": final_loss,
        }),
    };
    std::fs::write(args.out.join("manifest.json"), to_json(&manifest)?).map_err(Error::from)?;
    writeln!(
        stdout,
        "final loss {final_loss}; wrote {} grid points",
        args.grid * args.grid
    )
    .map_err(|e| CliError::from(Error::Io(e)))?;
    Ok(())
}

pub fn cmd_mnist_mask(
    args: &MnistArgs,
    stdout: &mut dyn Write,
) -> std::result::Result<(), CliError> {
    let started = now_ms();
    if args.digit > 9 {
        return Err(CliError::usage("digit must be 0..9"));
    }
    if args.limit == 0 {
        return Err(CliError::usage("limit must be positive"));
    }
    let cfg = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        seed: args.seed,
        runs: 1,
    };
    cfg.validate()?;
    let images = load_mnist_idx(&args.images, &args.labels, args.limit)?;
    let data = binary_task(&images, args.digit)?;
    let (_, trace) = train(&data, &cfg)?.remove(0);
    let mask = build_mask(&trace, args.flat_epsilon)?;

    prepare_out(&args.out)?;
    let mut files = Vec::new();
    write_file(&args.out, "mask.csv", &mask_csv(&mask), &mut files)?;
    for i in 0..images.len().min(MASKED_EXAMPLES) {
        let masked = apply_mask(images.image(i), &mask)?;
        write_file(
            &args.out,
            &format!("masked_{i}.pgm"),
            &pgm(&masked, images.cols, images.rows),
            &mut files,
        )?;
    }
    files.push("manifest.json".into());
    let kept = mask.iter().filter(|&&m| m == 1).count();
    let manifest = RunManifest {
        command: "mnist-mask",
        config: args,
        seed: args.seed,
        run_seeds: vec![trace.seed_used],
        standardization: None,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        files,
        extra: serde_json::json!({
            "images_used": images.len(),
            "positives": data.target().iter().filter(|&&t| t > 0.0).count(),
            "mask_kept": kept,
            "initial_loss": trace.loss.first(),
            "last_recorded_loss": trace.loss.last(),
        }),
    };
    std::fs::write(args.out.join("manifest.json"), to_json(&manifest)?).map_err(Error::from)?;
    writeln!(stdout, "mask keeps {kept} of {} pixels", mask.len())
        .map_err(|e| CliError::from(Error::Io(e)))?;
    Ok(())
}

/// Parse `argv` and run the selected command; returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, stdout),
        Command::Surface(a) => cmd_surface(a, stdout),
        Command::MnistMask(a) => cmd_mnist_mask(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
