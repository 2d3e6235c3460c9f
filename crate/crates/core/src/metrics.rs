//! SNR and bootstrap aggregation of per-signal results.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    JanssenTfRaw,
    JanssenTfContext,
    GapwiseJanssen,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::JanssenTfRaw,
        Method::JanssenTfContext,
        Method::GapwiseJanssen,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::JanssenTfRaw => "janssen_tf_raw",
            Method::JanssenTfContext => "janssen_tf_context",
            Method::GapwiseJanssen => "gapwise_janssen",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub signal_id: String,
    pub method: Method,
    pub gap_len: usize,
    /// `+inf` for an exact reconstruction.
    pub snr_db: f64,
    pub runtime_s: f64,
}

/// `10 log10(||x_ref||^2 / ||x_ref - x_est||^2)`; `+inf` when the estimate
/// is exact.
pub fn snr(x_ref: &[f64], x_est: &[f64]) -> Result<f64> {
    if x_ref.len() != x_est.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            got: x_est.len(),
        });
    }
    let signal: f64 = x_ref.iter().map(|v| v * v).sum();
    if signal == 0.0 {
        return Err(Error::UndefinedReference);
    }
    let noise: f64 = x_ref
        .iter()
        .zip(x_est)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

/// SNR restricted to the samples where `region` is true.
pub fn snr_in_region(x_ref: &[f64], x_est: &[f64], region: &[bool]) -> Result<f64> {
    if region.len() != x_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            got: region.len(),
        });
    }
    let pick = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(region)
            .filter_map(|(v, r)| r.then_some(*v))
            .collect()
    };
    if x_est.len() != x_ref.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            got: x_est.len(),
        });
    }
    snr(&pick(x_ref), &pick(x_est))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanInterval {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Linear-interpolated empirical quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for the mean at significance `alpha`.
pub fn bootstrap_mean_ci(values: &[f64], alpha: f64, n_resamples: usize, seed: u64) -> Result<MeanInterval> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            got: values.len(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} must lie in (0, 1)")));
    }
    if n_resamples == 0 {
        return Err(Error::InvalidParameter("need at least one resample".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..n_resamples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let lower = quantile(&means, alpha / 2.0).min(mean);
    let upper = quantile(&means, 1.0 - alpha / 2.0).max(mean);
    Ok(MeanInterval { mean, lower, upper })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub method: Method,
    pub gap_len: usize,
    pub mean_snr_db: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Finite values entering the mean.
    pub n: usize,
    /// Exact reconstructions left out of the mean.
    pub n_infinite: usize,
    /// Fewer than two finite values: the interval collapses to the mean.
    pub degenerate: bool,
}

/// Mean SNR with bootstrap interval per `(method, gap_len)`, sorted by key.
pub fn aggregate(records: &[MetricsRecord], alpha: f64, n_resamples: usize, seed: u64) -> Result<Vec<AggregateRow>> {
    let mut groups: BTreeMap<(Method, usize), (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let entry = groups.entry((r.method, r.gap_len)).or_default();
        if r.snr_db.is_finite() {
            entry.0.push(r.snr_db);
        } else {
            entry.1 += 1;
        }
    }
    groups
        .into_iter()
        .map(|((method, gap_len), (values, n_infinite))| {
            let (interval, degenerate) = match values.len() {
                0 => (
                    MeanInterval {
                        mean: f64::INFINITY,
                        lower: f64::INFINITY,
                        upper: f64::INFINITY,
                    },
                    true,
                ),
                1 => (
                    MeanInterval {
                        mean: values[0],
                        lower: values[0],
                        upper: values[0],
                    },
                    true,
                ),
                _ => (bootstrap_mean_ci(&values, alpha, n_resamples, seed)?, false),
            };
            Ok(AggregateRow {
                method,
                gap_len,
                mean_snr_db: interval.mean,
                ci_lo: interval.lower,
                ci_hi: interval.upper,
                n: values.len(),
                n_infinite,
                degenerate,
            })
        })
        .collect()
}

/// Whether the mean SNR of `method` strictly decreases with gap length.
pub fn strictly_decreasing(rows: &[AggregateRow], method: Method) -> bool {
    let mut series: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.method == method)
        .map(|r| (r.gap_len, r.mean_snr_db))
        .collect();
    series.sort_by_key(|(g, _)| *g);
    series.windows(2).all(|w| w[1].1 < w[0].1)
}
