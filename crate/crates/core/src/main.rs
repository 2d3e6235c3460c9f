use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tfinpaint::degradation::{default_margin, default_separation, degrade, plan_gaps};
use tfinpaint::error::{Error, Result};
use tfinpaint::experiment::{inpaint_signal, run_experiment, ExperimentConfig, MaskFile};
use tfinpaint::metrics::{aggregate, snr, snr_in_region, Method, MetricsRecord};
use tfinpaint::stft::{affected_samples, StftOperator, StftParams, WindowKind};
use tfinpaint::td_baseline::BaselineConfig;
use tfinpaint::tf_solver::AdmmConfig;
use tfinpaint::wav::{load_wav, save_wav};

#[derive(Parser)]
#[command(name = "tfinpaint", version, about = "Spectrogram inpainting with AR-model priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a gap pattern for a signal and write the mask file.
    Degrade(DegradeArgs),
    /// Reconstruct the masked columns of a signal.
    Inpaint(InpaintArgs),
    /// SNR of an estimate, or aggregate table of a results CSV.
    Evaluate(EvaluateArgs),
    /// Run a configured corpus experiment.
    RunExperiment(RunArgs),
    /// Print the version.
    Version,
}

#[derive(Args, Clone, Copy)]
struct StftArgs {
    #[arg(long, default_value_t = 2048)]
    win_len: usize,
    #[arg(long, default_value_t = 512)]
    hop: usize,
    #[arg(long, default_value_t = 2048)]
    n_channels: usize,
    #[arg(long, default_value_t = WindowKind::Hann)]
    window: WindowKind,
    #[arg(long, default_value_t = 0)]
    frame_offset: usize,
}

impl StftArgs {
    fn params(self) -> Result<StftParams> {
        let p = StftParams {
            win_len: self.win_len,
            hop: self.hop,
            n_channels: self.n_channels,
            window: self.window,
            frame_offset: self.frame_offset,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct DegradeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Gap length in columns.
    #[arg(long)]
    gap_len: usize,
    #[arg(long, default_value_t = 5)]
    n_gaps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    margin: Option<usize>,
    #[arg(long)]
    separation: Option<usize>,
    /// Output mask file (JSON).
    #[arg(long)]
    mask: PathBuf,
    /// Optional WAV of the degraded signal (synthesis of the masked spectrogram).
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    stft: StftArgs,
}

#[derive(Args)]
struct InpaintArgs {
    /// Signal whose STFT is masked; masked columns are discarded before solving.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    #[arg(long, default_value = "janssen_tf_context")]
    method: Method,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 20)]
    inner_iters: usize,
    #[arg(long, default_value_t = 10)]
    outer_iters: usize,
    #[arg(long, default_value_t = 512)]
    ar_order: usize,
    #[arg(long, default_value_t = 512)]
    baseline_order: usize,
    #[arg(long, default_value_t = 10)]
    baseline_iters: usize,
    #[arg(long)]
    baseline_context: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, requires = "estimate", conflicts_with = "results")]
    reference: Option<PathBuf>,
    #[arg(long, requires = "reference")]
    estimate: Option<PathBuf>,
    /// Also report SNR over the samples touched by the masked columns.
    #[arg(long, requires = "reference")]
    mask: Option<PathBuf>,
    /// Results CSV to aggregate instead.
    #[arg(long, required_unless_present = "reference")]
    results: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    n_resamples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// `key=value` override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    workers: Option<usize>,
}

fn cmd_degrade(a: &DegradeArgs) -> Result<()> {
    let params = a.stft.params()?;
    let x = load_wav(&a.input)?;
    let op = StftOperator::new(params)?;
    let spec = op.analyze(x.samples(), x.sample_rate());
    let plan = plan_gaps(
        spec.n_frames(),
        a.gap_len,
        a.n_gaps,
        a.seed,
        a.margin.unwrap_or_else(|| default_margin(&params)),
        a.separation.unwrap_or_else(|| default_separation(&params)),
    )?;
    let (x_cor, _) = degrade(&spec, &plan)?;
    MaskFile::new(&plan.gaps, a.gap_len, a.seed, x.len(), &params).save(&a.mask)?;
    if let Some(out) = &a.output {
        let y = tfinpaint::stft::TimeSignal::new(op.synthesize(&x_cor), x.sample_rate())?;
        save_wav(out, &y)?;
    }
    println!("gap starts: {:?}", plan.gaps);
    Ok(())
}

fn cmd_inpaint(a: &InpaintArgs) -> Result<()> {
    let mf = MaskFile::load(&a.mask)?;
    let params = mf.stft_params()?;
    let mask = mf.mask()?;
    let x = load_wav(&a.input)?;
    if x.len() != mf.signal_len {
        return Err(Error::DimensionMismatch {
            expected: mf.signal_len,
            got: x.len(),
        });
    }
    let admm = AdmmConfig {
        rho: a.rho,
        inner_iters: a.inner_iters,
        outer_iters: a.outer_iters,
        ar_order: a.ar_order,
    };
    admm.validate()?;
    let baseline = BaselineConfig {
        ar_order: a.baseline_order,
        iters: a.baseline_iters,
        context: a.baseline_context,
    };
    let recon = inpaint_signal(&x, &mask, &[a.method], &params, &admm, &baseline)?;
    let r = &recon[0];
    save_wav(&a.output, &r.signal)?;
    println!("{}: {:.3} s", r.method, r.runtime_s);
    Ok(())
}

fn read_results(path: &Path) -> Result<Vec<MetricsRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let parse_err = |line: usize, msg: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    };
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(parse_err(i + 1, "expected 5 fields"));
        }
        records.push(MetricsRecord {
            signal_id: f[0].to_string(),
            method: f[1].parse().map_err(|_| parse_err(i + 1, "unknown method"))?,
            gap_len: f[2].parse().map_err(|_| parse_err(i + 1, "bad gap length"))?,
            snr_db: f[3].parse().map_err(|_| parse_err(i + 1, "bad snr"))?,
            runtime_s: f[4].parse().map_err(|_| parse_err(i + 1, "bad runtime"))?,
        });
    }
    Ok(records)
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    if let Some(results) = &a.results {
        let rows = aggregate(&read_results(results)?, a.alpha, a.n_resamples, a.seed)?;
        println!("{}", tfinpaint::experiment::AGGREGATE_HEADER);
        for r in rows {
            println!(
                "{},{},{:.6},{:.6},{:.6},{}",
                r.method, r.gap_len, r.mean_snr_db, r.ci_lo, r.ci_hi, r.n
            );
        }
        return Ok(());
    }
    let (Some(reference), Some(estimate)) = (&a.reference, &a.estimate) else {
        return Err(Error::Config("need --reference and --estimate, or --results".into()));
    };
    let x = load_wav(reference)?;
    let y = load_wav(estimate)?;
    println!("snr_db {:.6}", snr(x.samples(), y.samples())?);
    if let Some(mask_path) = &a.mask {
        let mf = MaskFile::load(mask_path)?;
        let region = affected_samples(&mf.mask()?, &mf.stft_params()?, x.len())?;
        let missing: Vec<bool> = region.flags().iter().map(|r| !r).collect();
        println!("gap_snr_db {:.6}", snr_in_region(x.samples(), y.samples(), &missing)?);
    }
    Ok(())
}

fn cmd_run(a: &RunArgs) -> std::result::Result<usize, (u8, Error)> {
    let mut cfg = ExperimentConfig::load(&a.config).map_err(|e| (2, e))?;
    for o in &a.overrides {
        cfg.apply_override(o).map_err(|e| (2, e))?;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    cfg.validate().map_err(|e| (2, e))?;
    let report = run_experiment(&cfg).map_err(|e| (1, e))?;
    println!(
        "{} records, {} failed tasks, results in {}",
        report.records.len(),
        report.failures.len(),
        cfg.output_dir.display()
    );
    Ok(report.failures.len())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Degrade(a) => cmd_degrade(a).map(|_| 0).map_err(|e| (1, e)),
        Command::Inpaint(a) => cmd_inpaint(a).map(|_| 0).map_err(|e| (1, e)),
        Command::Evaluate(a) => cmd_evaluate(a).map(|_| 0).map_err(|e| (1, e)),
        Command::RunExperiment(a) => cmd_run(a),
        Command::Version => {
            println!("tfinpaint {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err((code, e)) => {
            log::error!("{e}");
            let code = if matches!(e, Error::Config(_)) { 2 } else { code };
            ExitCode::from(code)
        }
    }
}
