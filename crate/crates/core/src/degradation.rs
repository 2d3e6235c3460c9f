//! Seeded placement of missing-column gaps and spectrogram corruption.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stft::{Spectrogram, StftParams, TfMask};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegradationPlan {
    pub t_total: usize,
    pub gap_len_columns: usize,
    pub n_gaps: usize,
    pub seed: u64,
    pub margin_columns: usize,
    pub separation_columns: usize,
    /// Sorted first columns of each gap.
    pub gaps: Vec<usize>,
}

impl DegradationPlan {
    pub fn mask(&self) -> Result<TfMask> {
        TfMask::new(
            self.t_total,
            self.gaps
                .iter()
                .flat_map(|&s| s..s + self.gap_len_columns),
        )
    }
}

/// Margin that keeps cyclic frames of a gap from wrapping over the signal
/// edge: one window length in columns.
pub fn default_margin(params: &StftParams) -> usize {
    params.win_len / params.hop
}

/// Separation that keeps the time-domain footprints of distinct gaps apart.
pub fn default_separation(params: &StftParams) -> usize {
    2 * params.win_len / params.hop
}

/// Draws `n_gaps` gaps of `gap_len` columns uniformly over all placements
/// that stay in `[margin, t_total - margin)` with at least `separation`
/// reliable columns between consecutive gaps.
///
/// A placement is a choice of nonnegative slacks; drawing `n_gaps` distinct
/// values from `0..slack + n_gaps` and sorting them enumerates those
/// uniformly (stars and bars), so no retries are needed.
pub fn plan_gaps(
    t_total: usize,
    gap_len: usize,
    n_gaps: usize,
    seed: u64,
    margin: usize,
    separation: usize,
) -> Result<DegradationPlan> {
    let mut plan = DegradationPlan {
        t_total,
        gap_len_columns: gap_len,
        n_gaps,
        seed,
        margin_columns: margin,
        separation_columns: separation,
        gaps: Vec::new(),
    };
    if n_gaps == 0 {
        return Ok(plan);
    }
    if gap_len == 0 {
        return Err(Error::InvalidParameter("gap length must be at least 1".into()));
    }
    let needed = n_gaps * gap_len + (n_gaps - 1) * separation;
    let available = t_total.saturating_sub(2 * margin);
    if needed > available {
        return Err(Error::CannotPlaceGaps {
            t_total,
            gap_len,
            n_gaps,
            margin,
            separation,
        });
    }
    let slack = available - needed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = index::sample(&mut rng, slack + n_gaps, n_gaps).into_vec();
    picks.sort_unstable();
    plan.gaps = picks
        .iter()
        .enumerate()
        .map(|(i, &v)| margin + (v - i) + i * (gap_len + separation))
        .collect();
    Ok(plan)
}

/// Zeros the planned columns. Returns the corrupted spectrogram and its mask.
pub fn degrade(x: &Spectrogram, plan: &DegradationPlan) -> Result<(Spectrogram, TfMask)> {
    if plan.t_total != x.n_frames() {
        return Err(Error::InconsistentInput(format!(
            "plan is for {} columns, spectrogram has {}",
            plan.t_total,
            x.n_frames()
        )));
    }
    let mask = plan.mask()?;
    let out = apply_mask(x, &mask)?;
    Ok((out, mask))
}

/// `M ⊙ X`.
pub fn apply_mask(x: &Spectrogram, mask: &TfMask) -> Result<Spectrogram> {
    if mask.n_frames() != x.n_frames() {
        return Err(Error::InconsistentMask(format!(
            "mask has {} columns, spectrogram has {}",
            mask.n_frames(),
            x.n_frames()
        )));
    }
    let mut out = x.clone();
    for &t in mask.missing_columns() {
        out.column_mut(t).fill(Complex64::new(0.0, 0.0));
    }
    Ok(out)
}
