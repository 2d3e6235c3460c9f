//! Time-domain Janssen inpainting and its gap-wise variant.

use rayon::prelude::*;

use crate::armodel::{lpc, ArModel};
use crate::banded::{banded_cholesky, banded_solve_in_place, BandedSpdMatrix};
use crate::error::{Error, Result};
use crate::stft::{TimeMask, TimeSignal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub ar_order: usize,
    pub iters: usize,
    /// Reliable samples taken on each side of a gap; `None` means
    /// `max(2 * ar_order, 4096)`.
    pub context: Option<usize>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            ar_order: 512,
            iters: 10,
            context: None,
        }
    }
}

impl BaselineConfig {
    pub fn context(&self) -> usize {
        self.context.unwrap_or((2 * self.ar_order).max(4096))
    }
}

/// Window around one gap used by the gap-wise solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapContext {
    pub gap_start: usize,
    pub gap_len: usize,
    pub context_left: usize,
    pub context_right: usize,
}

impl GapContext {
    pub fn window(&self) -> std::ops::Range<usize> {
        self.gap_start - self.context_left..self.gap_start + self.gap_len + self.context_right
    }
}

/// Least-squares fill: minimizes `1/2 ||A x||^2` over the missing samples
/// with the reliable ones held fixed, i.e. solves
/// `(A^T A)_mm x_m = -(A^T A)_mo x_o`.
pub fn fill_missing_ls(model: &ArModel, x: &[f64], mask: &TimeMask) -> Result<Vec<f64>> {
    if mask.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: mask.len(),
        });
    }
    let missing = mask.missing_indices();
    if missing.is_empty() {
        return Ok(x.to_vec());
    }
    if missing.len() == x.len() {
        return Err(Error::NoReliableData);
    }
    let g = model.gram_bands();
    let p = model.order();
    let n = x.len();

    let mut known = x.to_vec();
    for &i in &missing {
        known[i] = 0.0;
    }
    let mut rhs: Vec<f64> = missing
        .iter()
        .map(|&i| {
            let lo = i.saturating_sub(p);
            let hi = (i + p).min(n - 1);
            -(lo..=hi).map(|j| g[i.abs_diff(j)] * known[j]).sum::<f64>()
        })
        .collect();

    // Sorted missing indices keep the submatrix within bandwidth p.
    let m = missing.len();
    let mut sub = BandedSpdMatrix::zeros(m, p);
    for r in 0..m {
        for c in r.saturating_sub(sub.bandwidth())..=r {
            let d = missing[r] - missing[c];
            if d <= p {
                sub.set(r, c, g[d])?;
            }
        }
    }
    let factor = banded_cholesky(&sub)?;
    banded_solve_in_place(&factor, &mut rhs)?;

    let mut out = x.to_vec();
    for (&i, v) in missing.iter().zip(rhs) {
        out[i] = v;
    }
    Ok(out)
}

/// Janssen iteration: alternate model estimation and least-squares fill.
pub fn janssen_td(x_cor: &[f64], mask: &TimeMask, ar_order: usize, iters: usize) -> Result<Vec<f64>> {
    if mask.len() != x_cor.len() {
        return Err(Error::DimensionMismatch {
            expected: x_cor.len(),
            got: mask.len(),
        });
    }
    if x_cor.len() <= ar_order {
        return Err(Error::InvalidOrder {
            order: ar_order,
            len: x_cor.len(),
        });
    }
    let mut x: Vec<f64> = x_cor
        .iter()
        .zip(mask.flags())
        .map(|(v, r)| if *r { *v } else { 0.0 })
        .collect();
    if mask.n_missing() == 0 {
        return Ok(x);
    }
    if x.iter().all(|v| *v == 0.0) {
        return Ok(x);
    }
    let mut model: Option<ArModel> = None;
    for _ in 0..iters {
        model = match (lpc(&x, ar_order), model) {
            (Ok(m), _) => Some(m),
            (Err(Error::DegenerateSignal(_)), Some(prev)) => Some(prev),
            (Err(e), _) => return Err(e),
        };
        x = fill_missing_ls(model.as_ref().expect("model set above"), &x, mask)?;
    }
    Ok(x)
}

/// Context windows for every maximal run of missing samples. Windows stop
/// at neighbouring gaps so they only contain the gap itself plus reliable
/// samples.
pub fn gap_contexts(mask: &TimeMask, ar_order: usize, context: usize) -> Result<Vec<GapContext>> {
    let runs = mask.missing_runs();
    let n = mask.len();
    runs.iter()
        .enumerate()
        .map(|(i, run)| {
            let left_bound = if i > 0 { runs[i - 1].end } else { 0 };
            let right_bound = runs.get(i + 1).map_or(n, |r| r.start);
            let lo = run.start.saturating_sub(context).max(left_bound);
            let hi = (run.end + context).min(right_bound);
            let gap_len = run.len();
            if hi - lo < ar_order + gap_len {
                return Err(Error::InsufficientContext {
                    available: hi - lo,
                    required: ar_order + gap_len,
                });
            }
            Ok(GapContext {
                gap_start: run.start,
                gap_len,
                context_left: run.start - lo,
                context_right: hi - run.end,
            })
        })
        .collect()
}

/// Gap-wise Janssen: each gap is inpainted independently from a local
/// window; only missing samples are written back.
pub fn gapwise_janssen(x_cor: &TimeSignal, mask: &TimeMask, cfg: &BaselineConfig) -> Result<TimeSignal> {
    if mask.len() != x_cor.len() {
        return Err(Error::DimensionMismatch {
            expected: x_cor.len(),
            got: mask.len(),
        });
    }
    let contexts = gap_contexts(mask, cfg.ar_order, cfg.context())?;
    let x = x_cor.samples();
    let filled: Vec<(GapContext, Vec<f64>)> = contexts
        .par_iter()
        .map(|ctx| {
            let window = ctx.window();
            let local_mask = TimeMask::new(mask.flags()[window.clone()].to_vec());
            let local = janssen_td(&x[window], &local_mask, cfg.ar_order, cfg.iters)?;
            Ok((*ctx, local))
        })
        .collect::<Result<_>>()?;

    let mut out = x.to_vec();
    for (ctx, local) in filled {
        let offset = ctx.context_left;
        out[ctx.gap_start..ctx.gap_start + ctx.gap_len]
            .copy_from_slice(&local[offset..offset + ctx.gap_len]);
    }
    TimeSignal::new(out, x_cor.sample_rate())
}
