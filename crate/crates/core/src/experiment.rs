//! Corpus experiment runner, configuration file and mask file formats.
//!
//! Configuration is a line-based `key = value` document; `#` starts a
//! comment. Recognized keys:
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `corpus_dir` | (required) | directory of `.wav` files |
//! | `output_dir` | (required) | results directory, created if absent |
//! | `methods` | all | comma list of `janssen_tf_raw`, `janssen_tf_context`, `gapwise_janssen` |
//! | `gap_lengths` | `1,2,3,4,5,6` | comma list of gap lengths in columns |
//! | `n_gaps` | 5 | gaps per signal |
//! | `seed` | 0 | master seed |
//! | `margin_columns` | `win_len / hop` | reliable columns kept at both ends |
//! | `separation_columns` | `2 * win_len / hop` | minimum reliable columns between gaps |
//! | `rho`, `inner_iters`, `outer_iters`, `ar_order` | 1, 20, 10, 512 | Janssen-TF settings |
//! | `baseline_order`, `baseline_iters`, `baseline_context` | 512, 10, `max(2p, 4096)` | gap-wise baseline |
//! | `win_len`, `hop`, `n_channels`, `window`, `frame_offset` | 2048, 512, 2048, hann, 0 | STFT |
//! | `alpha`, `n_resamples` | 0.05, 10000 | bootstrap interval |
//! | `workers` | 1 | parallel tasks |
//! | `record_runtime` | false | write wall-clock seconds into `results.csv` |
//!
//! Wall-clock times always go to `timings.csv`; `results.csv` carries them
//! only when `record_runtime = true`, because timings would otherwise break
//! byte-for-byte reproducibility of the results table.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::degradation::{default_margin, default_separation, degrade, plan_gaps};
use crate::error::{Error, Result};
use crate::metrics::{aggregate, snr, snr_in_region, AggregateRow, Method, MetricsRecord};
use crate::stft::{affected_samples, StftOperator, StftParams, TfMask, TimeSignal, WindowKind};
use crate::td_baseline::{gapwise_janssen, BaselineConfig};
use crate::tf_solver::{janssen_tf, AdmmConfig};
use crate::wav::{load_wav, save_wav};

pub const RESULTS_HEADER: &str = "signal_id,method,gap_len,snr_db,runtime_s";
pub const AGGREGATE_HEADER: &str = "method,gap_len,mean_snr_db,ci_lo,ci_hi,n";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus_dir: PathBuf,
    pub output_dir: PathBuf,
    pub methods: Vec<Method>,
    pub gap_lengths: Vec<usize>,
    pub n_gaps: usize,
    pub seed: u64,
    pub margin_columns: Option<usize>,
    pub separation_columns: Option<usize>,
    pub admm: AdmmConfig,
    pub baseline: BaselineConfig,
    pub stft: StftParams,
    pub alpha: f64,
    pub n_resamples: usize,
    pub workers: usize,
    pub record_runtime: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            corpus_dir: PathBuf::new(),
            output_dir: PathBuf::new(),
            methods: Method::ALL.to_vec(),
            gap_lengths: (1..=6).collect(),
            n_gaps: 5,
            seed: 0,
            margin_columns: None,
            separation_columns: None,
            admm: AdmmConfig::default(),
            baseline: BaselineConfig::default(),
            stft: StftParams::default(),
            alpha: 0.05,
            n_resamples: 10_000,
            workers: 1,
            record_runtime: false,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Parses a `key = value` document on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies a single `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "corpus_dir" => self.corpus_dir = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "methods" => {
                self.methods = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| Error::Config(format!("unknown method `{s}`"))))
                    .collect::<Result<_>>()?
            }
            "gap_lengths" => self.gap_lengths = parse_list(key, value)?,
            "n_gaps" => self.n_gaps = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "margin_columns" => self.margin_columns = Some(parse_value(key, value)?),
            "separation_columns" => self.separation_columns = Some(parse_value(key, value)?),
            "rho" => self.admm.rho = parse_value(key, value)?,
            "inner_iters" => self.admm.inner_iters = parse_value(key, value)?,
            "outer_iters" => self.admm.outer_iters = parse_value(key, value)?,
            "ar_order" => self.admm.ar_order = parse_value(key, value)?,
            "baseline_order" => self.baseline.ar_order = parse_value(key, value)?,
            "baseline_iters" => self.baseline.iters = parse_value(key, value)?,
            "baseline_context" => self.baseline.context = Some(parse_value(key, value)?),
            "win_len" => self.stft.win_len = parse_value(key, value)?,
            "hop" => self.stft.hop = parse_value(key, value)?,
            "n_channels" => self.stft.n_channels = parse_value(key, value)?,
            "window" => self.stft.window = value.parse::<WindowKind>().map_err(|e| Error::Config(e.to_string()))?,
            "frame_offset" => self.stft.frame_offset = parse_value(key, value)?,
            "alpha" => self.alpha = parse_value(key, value)?,
            "n_resamples" => self.n_resamples = parse_value(key, value)?,
            "workers" => self.workers = parse_value(key, value)?,
            "record_runtime" => self.record_runtime = parse_value(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override string.
    pub fn apply_override(&mut self, setting: &str) -> Result<()> {
        let (key, value) = setting
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{setting}` is not `key=value`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn margin(&self) -> usize {
        self.margin_columns.unwrap_or_else(|| default_margin(&self.stft))
    }

    pub fn separation(&self) -> usize {
        self.separation_columns
            .unwrap_or_else(|| default_separation(&self.stft))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.gap_lengths.is_empty() || self.gap_lengths.contains(&0) {
            return Err(Error::Config("gap lengths must be a nonempty list of positive values".into()));
        }
        if !self.corpus_dir.is_dir() {
            return Err(Error::Config(format!(
                "corpus directory `{}` does not exist",
                self.corpus_dir.display()
            )));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::Config("output_dir is required".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || self.n_resamples == 0 {
            return Err(Error::Config("alpha must lie in (0, 1) and n_resamples be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.stft.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.admm.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.baseline.ar_order == 0 || self.baseline.iters == 0 {
            return Err(Error::Config("baseline order and iterations must be positive".into()));
        }
        Ok(())
    }
}

/// STFT parameters as stored in a mask file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskFileStft {
    pub win_len: usize,
    pub hop: usize,
    pub n_channels: usize,
    pub window: String,
    pub frame_offset: usize,
}

/// JSON mask document:
///
/// ```json
/// {
///   "total_columns": 157,
///   "gap_length": 2,
///   "starts": [12, 40, 71, 99, 130],
///   "seed": 1234,
///   "signal_len": 80000,
///   "stft": { "win_len": 2048, "hop": 512, "n_channels": 2048, "window": "hann", "frame_offset": 0 }
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskFile {
    pub total_columns: usize,
    pub gap_length: usize,
    pub starts: Vec<usize>,
    pub seed: u64,
    pub signal_len: usize,
    pub stft: MaskFileStft,
}

impl MaskFile {
    pub fn new(mask_starts: &[usize], gap_length: usize, seed: u64, signal_len: usize, params: &StftParams) -> Self {
        Self {
            total_columns: params.n_frames(signal_len),
            gap_length,
            starts: mask_starts.to_vec(),
            seed,
            signal_len,
            stft: MaskFileStft {
                win_len: params.win_len,
                hop: params.hop,
                n_channels: params.n_channels,
                window: params.window.to_string(),
                frame_offset: params.frame_offset,
            },
        }
    }

    pub fn stft_params(&self) -> Result<StftParams> {
        let params = StftParams {
            win_len: self.stft.win_len,
            hop: self.stft.hop,
            n_channels: self.stft.n_channels,
            window: self.stft.window.parse()?,
            frame_offset: self.stft.frame_offset,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn mask(&self) -> Result<TfMask> {
        let params = self.stft_params()?;
        if params.n_frames(self.signal_len) != self.total_columns {
            return Err(Error::InconsistentMask(format!(
                "{} columns do not match a {}-sample signal",
                self.total_columns, self.signal_len
            )));
        }
        TfMask::new(
            self.total_columns,
            self.starts.iter().flat_map(|&s| s..s + self.gap_length),
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("mask file serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Gap seed for one signal and gap length, independent of the rest of the
/// corpus.
pub fn derive_seed(master_seed: u64, signal_id: &str, gap_len: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update((signal_id.len() as u64).to_le_bytes());
    h.update(signal_id.as_bytes());
    h.update((gap_len as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// One inpainting run ready for the evaluator.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub method: Method,
    pub signal: TimeSignal,
    pub runtime_s: f64,
}

/// Degrades `x` with `mask` and runs the requested methods.
pub fn inpaint_signal(
    x: &TimeSignal,
    mask: &TfMask,
    methods: &[Method],
    stft: &StftParams,
    admm: &AdmmConfig,
    baseline: &BaselineConfig,
) -> Result<Vec<Reconstruction>> {
    let op = StftOperator::new(*stft)?;
    let spec = op.analyze(x.samples(), x.sample_rate());
    let x_cor = crate::degradation::apply_mask(&spec, mask)?;
    let mut out = Vec::new();

    let wants_tf = methods
        .iter()
        .any(|m| matches!(m, Method::JanssenTfRaw | Method::JanssenTfContext));
    if wants_tf {
        let started = Instant::now();
        let solved = janssen_tf(&x_cor, mask, admm)?;
        let runtime_s = started.elapsed().as_secs_f64();
        for &m in methods {
            match m {
                Method::JanssenTfRaw => out.push(Reconstruction {
                    method: m,
                    signal: solved.signal.clone(),
                    runtime_s,
                }),
                Method::JanssenTfContext => out.push(Reconstruction {
                    method: m,
                    signal: solved.signal_with_context.clone(),
                    runtime_s,
                }),
                Method::GapwiseJanssen => {}
            }
        }
    }
    if methods.contains(&Method::GapwiseJanssen) {
        let started = Instant::now();
        let corrupted = op.synthesize(&x_cor);
        let time_mask = affected_samples(mask, stft, x.len())?;
        let zeroed: Vec<f64> = corrupted
            .iter()
            .zip(time_mask.flags())
            .map(|(v, r)| if *r { *v } else { 0.0 })
            .collect();
        let filled = gapwise_janssen(&TimeSignal::new(zeroed, x.sample_rate())?, &time_mask, baseline)?;
        out.push(Reconstruction {
            method: Method::GapwiseJanssen,
            signal: filled,
            runtime_s: started.elapsed().as_secs_f64(),
        });
    }
    out.sort_by_key(|r| r.method);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapSnrRecord {
    pub signal_id: String,
    pub method: Method,
    pub gap_len: usize,
    pub gap_snr_db: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub records: Vec<MetricsRecord>,
    pub gap_records: Vec<GapSnrRecord>,
    pub aggregate: Vec<AggregateRow>,
    /// `(signal_id, gap_len, error message)` of every failed task.
    pub failures: Vec<(String, usize, String)>,
}

struct TaskOutput {
    records: Vec<MetricsRecord>,
    gap_records: Vec<GapSnrRecord>,
}

/// Lists `.wav` files of the corpus, sorted by file name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn signal_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn reconstruction_file_name(signal_id: &str, method: Method, gap_len: usize, seed: u64) -> String {
    format!("{signal_id}__{method}__g{gap_len}__s{seed}.wav")
}

pub fn mask_file_name(signal_id: &str, gap_len: usize, seed: u64) -> String {
    format!("{signal_id}__g{gap_len}__s{seed}.json")
}

fn run_task(cfg: &ExperimentConfig, path: &Path, id: &str, gap_len: usize) -> Result<TaskOutput> {
    let x = load_wav(path)?;
    let params = cfg.stft;
    let t_total = params.n_frames(x.len());
    let seed = derive_seed(cfg.seed, id, gap_len);
    let plan = plan_gaps(t_total, gap_len, cfg.n_gaps, seed, cfg.margin(), cfg.separation())?;

    let op = StftOperator::new(params)?;
    let spec = op.analyze(x.samples(), x.sample_rate());
    let (_, mask) = degrade(&spec, &plan)?;
    MaskFile::new(&plan.gaps, gap_len, seed, x.len(), &params)
        .save(cfg.output_dir.join("masks").join(mask_file_name(id, gap_len, seed)))?;

    let region = affected_samples(&mask, &params, x.len())?;
    let missing: Vec<bool> = region.flags().iter().map(|r| !r).collect();
    let has_region = missing.iter().any(|m| *m);

    let recons = inpaint_signal(&x, &mask, &cfg.methods, &params, &cfg.admm, &cfg.baseline)?;
    let mut out = TaskOutput {
        records: Vec::new(),
        gap_records: Vec::new(),
    };
    for r in recons {
        save_wav(
            cfg.output_dir
                .join("reconstructions")
                .join(reconstruction_file_name(id, r.method, gap_len, seed)),
            &r.signal,
        )?;
        out.records.push(MetricsRecord {
            signal_id: id.to_string(),
            method: r.method,
            gap_len,
            snr_db: snr(x.samples(), r.signal.samples())?,
            runtime_s: r.runtime_s,
        });
        if has_region {
            out.gap_records.push(GapSnrRecord {
                signal_id: id.to_string(),
                method: r.method,
                gap_len,
                gap_snr_db: snr_in_region(x.samples(), r.signal.samples(), &missing)?,
            });
        }
    }
    Ok(out)
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn results_csv(records: &[MetricsRecord], with_runtime: bool) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in records {
        let runtime = if with_runtime { r.runtime_s } else { 0.0 };
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.signal_id,
            r.method,
            r.gap_len,
            fmt_f64(r.snr_db),
            fmt_f64(runtime)
        );
    }
    s
}

fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.method,
            r.gap_len,
            fmt_f64(r.mean_snr_db),
            fmt_f64(r.ci_lo),
            fmt_f64(r.ci_hi),
            r.n
        );
    }
    s
}

#[derive(Serialize)]
struct AggregateJsonRow<'a> {
    method: &'a str,
    gap_len: usize,
    mean_snr_db: Option<f64>,
    ci_lo: Option<f64>,
    ci_hi: Option<f64>,
    n: usize,
    n_infinite: usize,
    degenerate: bool,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn aggregate_json(rows: &[AggregateRow], alpha: f64) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        alpha: f64,
        rows: Vec<AggregateJsonRow<'a>>,
    }
    let doc = Doc {
        alpha,
        rows: rows
            .iter()
            .map(|r| AggregateJsonRow {
                method: r.method.as_str(),
                gap_len: r.gap_len,
                mean_snr_db: finite(r.mean_snr_db),
                ci_lo: finite(r.ci_lo),
                ci_hi: finite(r.ci_hi),
                n: r.n,
                n_infinite: r.n_infinite,
                degenerate: r.degenerate,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("aggregate serializes");
    s.push('\n');
    s
}

/// Whitespace-separated series: gap length, mean, lower and upper bound.
fn plot_series(rows: &[AggregateRow], method: Method) -> String {
    let mut s = String::from("# gap_len mean_snr_db ci_lo ci_hi\n");
    for r in rows.iter().filter(|r| r.method == method) {
        let _ = writeln!(
            s,
            "{} {} {} {}",
            r.gap_len,
            fmt_f64(r.mean_snr_db),
            fmt_f64(r.ci_lo),
            fmt_f64(r.ci_hi)
        );
    }
    s
}

fn gap_snr_csv(records: &[GapSnrRecord]) -> String {
    let mut s = String::from("signal_id,method,gap_len,gap_snr_db\n");
    for r in records {
        let _ = writeln!(s, "{},{},{},{}", r.signal_id, r.method, r.gap_len, fmt_f64(r.gap_snr_db));
    }
    s
}

fn timings_csv(records: &[MetricsRecord]) -> String {
    let mut s = String::from("signal_id,method,gap_len,runtime_s\n");
    for r in records {
        let _ = writeln!(s, "{},{},{},{}", r.signal_id, r.method, r.gap_len, fmt_f64(r.runtime_s));
    }
    s
}

/// Runs every `(signal, gap length)` task of the corpus and writes the
/// result tables. Failed tasks are logged and listed in the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    for sub in ["masks", "reconstructions", "plots"] {
        let dir = cfg.output_dir.join(sub);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    let files = corpus_files(&cfg.corpus_dir)?;
    if files.is_empty() {
        return Err(Error::Config(format!(
            "no .wav files in `{}`",
            cfg.corpus_dir.display()
        )));
    }
    let tasks: Vec<(PathBuf, String, usize)> = files
        .iter()
        .flat_map(|p| {
            let id = signal_id(p);
            cfg.gap_lengths.iter().map(move |&g| (p.clone(), id.clone(), g))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outputs: Vec<(String, usize, Result<TaskOutput>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(path, id, g)| {
                log::info!("{id}: gap length {g}");
                (id.clone(), *g, run_task(cfg, path, id, *g))
            })
            .collect()
    });

    let mut report = ExperimentReport::default();
    for (id, g, res) in outputs {
        match res {
            Ok(t) => {
                report.records.extend(t.records);
                report.gap_records.extend(t.gap_records);
            }
            Err(e) => {
                log::error!("{id} (gap length {g}): {e}");
                report.failures.push((id, g, e.to_string()));
            }
        }
    }
    report.records.sort_by(|a, b| {
        (&a.signal_id, a.method, a.gap_len).cmp(&(&b.signal_id, b.method, b.gap_len))
    });
    report.gap_records.sort_by(|a, b| {
        (&a.signal_id, a.method, a.gap_len).cmp(&(&b.signal_id, b.method, b.gap_len))
    });

    let out = &cfg.output_dir;
    write_file(&out.join("results.csv"), &results_csv(&report.records, cfg.record_runtime))?;
    write_file(&out.join("gap_snr.csv"), &gap_snr_csv(&report.gap_records))?;
    write_file(&out.join("timings.csv"), &timings_csv(&report.records))?;
    if !report.records.is_empty() {
        report.aggregate = aggregate(&report.records, cfg.alpha, cfg.n_resamples, cfg.seed)?;
    }
    write_file(&out.join("aggregate.csv"), &aggregate_csv(&report.aggregate))?;
    write_file(&out.join("aggregate.json"), &aggregate_json(&report.aggregate, cfg.alpha))?;
    for &m in &cfg.methods {
        write_file(
            &out.join("plots").join(format!("{m}.dat")),
            &plot_series(&report.aggregate, m),
        )?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config() {
        let cfg = ExperimentConfig::parse(
            "# comment\ncorpus_dir = /data/in\noutput_dir=/data/out\nmethods = janssen_tf_raw, gapwise_janssen\n\
             gap_lengths = 1,3\nseed = 42 # trailing\nar_order = 16\nbaseline_context = 1000\nwindow = hann\n",
        )
        .unwrap();
        assert_eq!(cfg.corpus_dir, PathBuf::from("/data/in"));
        assert_eq!(cfg.methods, vec![Method::JanssenTfRaw, Method::GapwiseJanssen]);
        assert_eq!(cfg.gap_lengths, vec![1, 3]);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.admm.ar_order, 16);
        assert_eq!(cfg.baseline.context(), 1000);
        assert_eq!(cfg.margin(), 4);
        assert_eq!(cfg.separation(), 8);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(ExperimentConfig::parse("nonsense"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse("bogus = 1"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse("seed = x"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse("methods = spline"), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.apply_override("rho").is_err());
        cfg.apply_override("rho=2.5").unwrap();
        assert_eq!(cfg.admm.rho, 2.5);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = derive_seed(1, "song", 3);
        assert_eq!(a, derive_seed(1, "song", 3));
        assert_ne!(a, derive_seed(2, "song", 3));
        assert_ne!(a, derive_seed(1, "song", 4));
        assert_ne!(a, derive_seed(1, "other", 3));
    }

    #[test]
    fn mask_file_round_trip() {
        let params = StftParams::default();
        let mf = MaskFile::new(&[10, 40], 2, 99, 80000, &params);
        let back: MaskFile = serde_json::from_str(&mf.to_json()).unwrap();
        assert_eq!(back, mf);
        let mask = back.mask().unwrap();
        assert_eq!(mask.n_frames(), 157);
        assert_eq!(mask.missing_columns(), &[10, 11, 40, 41]);

        let mut bad = mf.clone();
        bad.total_columns = 100;
        assert!(bad.mask().is_err());
    }

    #[test]
    fn csv_formatting() {
        let records = vec![MetricsRecord {
            signal_id: "a".into(),
            method: Method::JanssenTfRaw,
            gap_len: 2,
            snr_db: f64::INFINITY,
            runtime_s: 1.25,
        }];
        assert_eq!(
            results_csv(&records, true),
            "signal_id,method,gap_len,snr_db,runtime_s\na,janssen_tf_raw,2,inf,1.250000\n"
        );
        assert!(results_csv(&records, false).ends_with(",inf,0.000000\n"));
    }
}
