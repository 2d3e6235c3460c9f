//! Parseval tight-frame short-time Fourier transform.
//!
//! Framing is cyclic: the signal is zero-padded to a multiple of the hop and
//! frame `t` reads samples `t * hop - frame_offset .. + win_len` modulo the
//! padded length. With a tight window this makes the analysis operator an
//! exact isometry, so the synthesis operator (its adjoint) is also its left
//! inverse. Spectra are stored one-sided with a `sqrt(2)` weight on the
//! interior bins so that coefficient energy equals signal energy.

use std::ops::Range;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Tolerance on the flatness of the overlap-added squared window.
const TILING_TOL: f64 = 1e-12;

/// Sampled real waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl TimeSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("signal must have at least one sample".into()));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidParameter("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn zeros(len: usize, sample_rate: u32) -> Result<Self> {
        Self::new(vec![0.0; len], sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WindowKind {
    #[default]
    Hann,
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hann" => Ok(WindowKind::Hann),
            other => Err(Error::InvalidParameter(format!("unknown window kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowKind::Hann => f.write_str("hann"),
        }
    }
}

/// STFT configuration. The default is a 2048-sample Hann window, hop 512
/// (75% overlap) and 2048 DFT channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StftParams {
    pub win_len: usize,
    pub hop: usize,
    pub n_channels: usize,
    pub window: WindowKind,
    /// Frame `t` starts at sample `t * hop - frame_offset` (cyclically).
    /// `win_len / 2` reproduces centred frame indexing.
    pub frame_offset: usize,
}

impl Default for StftParams {
    fn default() -> Self {
        Self {
            win_len: 2048,
            hop: 512,
            n_channels: 2048,
            window: WindowKind::Hann,
            frame_offset: 0,
        }
    }
}

impl StftParams {
    pub fn new(win_len: usize, hop: usize, n_channels: usize) -> Result<Self> {
        let params = Self {
            win_len,
            hop,
            n_channels,
            window: WindowKind::Hann,
            frame_offset: 0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.win_len < 2 {
            return Err(Error::InvalidParameter(format!(
                "window length {} is below 2",
                self.win_len
            )));
        }
        if self.hop == 0 || self.win_len % self.hop != 0 {
            return Err(Error::InvalidParameter(format!(
                "hop {} must divide the window length {}",
                self.hop, self.win_len
            )));
        }
        if self.n_channels < self.win_len || self.n_channels % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "channel count {} must be even and at least the window length {}",
                self.n_channels, self.win_len
            )));
        }
        Ok(())
    }

    /// Number of one-sided frequency bins.
    pub fn n_bins(&self) -> usize {
        self.n_channels / 2 + 1
    }

    /// Signal length rounded up to a multiple of the hop.
    pub fn padded_len(&self, n: usize) -> usize {
        n.div_ceil(self.hop) * self.hop
    }

    pub fn n_frames(&self, n: usize) -> usize {
        self.padded_len(n) / self.hop
    }

    /// First sample of frame `t` in the padded signal of length `padded`.
    pub fn frame_start(&self, t: usize, padded: usize) -> usize {
        let offset = self.frame_offset % padded;
        (t * self.hop + padded - offset) % padded
    }
}

/// Window of the given kind. Hann is the periodic variant
/// `0.5 * (1 - cos(2 pi n / len))`.
pub fn make_window(kind: WindowKind, len: usize) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::InvalidParameter(format!("window length {len} is below 2")));
    }
    let window = match kind {
        WindowKind::Hann => (0..len)
            .map(|n| {
                0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
            })
            .collect(),
    };
    Ok(window)
}

/// Rescales `window` so that its squared hop-shifts sum to one everywhere.
pub fn normalize_tight(window: &[f64], hop: usize) -> Result<Vec<f64>> {
    if hop == 0 || window.is_empty() || window.len() % hop != 0 {
        return Err(Error::InvalidParameter(format!(
            "hop {hop} must divide the window length {}",
            window.len()
        )));
    }
    let sums: Vec<f64> = (0..hop)
        .map(|n| window.iter().skip(n).step_by(hop).map(|w| w * w).sum())
        .collect();
    let max = sums.iter().cloned().fold(f64::MIN, f64::max);
    let min = sums.iter().cloned().fold(f64::MAX, f64::min);
    if max <= 0.0 || !max.is_finite() {
        return Err(Error::NonTileableWindow {
            hop,
            deviation: f64::INFINITY,
        });
    }
    let deviation = (max - min) / max;
    if deviation > TILING_TOL {
        return Err(Error::NonTileableWindow { hop, deviation });
    }
    let c = sums.iter().sum::<f64>() / hop as f64;
    let scale = c.sqrt().recip();
    Ok(window.iter().map(|w| w * scale).collect())
}

/// Complex coefficients, `n_frames` columns of `n_bins` one-sided bins,
/// stored column after column.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    coeffs: Vec<Complex64>,
    n_frames: usize,
    n_bins: usize,
    signal_len: usize,
    sample_rate: u32,
    params: StftParams,
}

impl Spectrogram {
    pub fn zeros(params: StftParams, signal_len: usize, sample_rate: u32) -> Self {
        let n_frames = params.n_frames(signal_len);
        let n_bins = params.n_bins();
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n_frames * n_bins],
            n_frames,
            n_bins,
            signal_len,
            sample_rate,
            params,
        }
    }

    /// Builds a spectrogram from raw column-major coefficients.
    pub fn from_coeffs(
        params: StftParams,
        signal_len: usize,
        sample_rate: u32,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        params.validate()?;
        let mut spec = Self::zeros(params, signal_len, sample_rate);
        if coeffs.len() != spec.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: spec.coeffs.len(),
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("spectrogram has non-finite entries".into()));
        }
        spec.coeffs = coeffs;
        Ok(spec)
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn params(&self) -> &StftParams {
        &self.params
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn column(&self, t: usize) -> &[Complex64] {
        &self.coeffs[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub fn column_mut(&mut self, t: usize) -> &mut [Complex64] {
        &mut self.coeffs[t * self.n_bins..(t + 1) * self.n_bins]
    }

    pub fn get(&self, t: usize, k: usize) -> Complex64 {
        self.coeffs[t * self.n_bins + k]
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn column_energy(&self, t: usize) -> f64 {
        self.column(t).iter().map(|c| c.norm_sqr()).sum()
    }

    /// True when both spectrograms have the same geometry.
    pub fn same_shape(&self, other: &Spectrogram) -> bool {
        self.n_frames == other.n_frames
            && self.n_bins == other.n_bins
            && self.signal_len == other.signal_len
            && self.params == other.params
    }
}

/// Set of missing spectrogram columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TfMask {
    missing: Vec<usize>,
    n_frames: usize,
}

impl TfMask {
    pub fn new(n_frames: usize, missing: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut missing: Vec<usize> = missing.into_iter().collect();
        missing.sort_unstable();
        missing.dedup();
        if let Some(&last) = missing.last() {
            if last >= n_frames {
                return Err(Error::InconsistentMask(format!(
                    "column {last} is outside 0..{n_frames}"
                )));
            }
        }
        Ok(Self { missing, n_frames })
    }

    pub fn empty(n_frames: usize) -> Self {
        Self {
            missing: Vec::new(),
            n_frames,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn missing_columns(&self) -> &[usize] {
        &self.missing
    }

    pub fn is_missing(&self, t: usize) -> bool {
        self.missing.binary_search(&t).is_ok()
    }

    pub fn n_missing(&self) -> usize {
        self.missing.len()
    }

    pub fn n_reliable(&self) -> usize {
        self.n_frames - self.missing.len()
    }

    /// Per-column reliability, `true` where the column is observed.
    pub fn reliable_flags(&self) -> Vec<bool> {
        let mut flags = vec![true; self.n_frames];
        for &t in &self.missing {
            flags[t] = false;
        }
        flags
    }
}

/// Per-sample reliability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeMask {
    reliable: Vec<bool>,
}

impl TimeMask {
    pub fn new(reliable: Vec<bool>) -> Self {
        Self { reliable }
    }

    pub fn all_reliable(len: usize) -> Self {
        Self {
            reliable: vec![true; len],
        }
    }

    /// Mask with the given half-open ranges marked missing.
    pub fn with_gaps(len: usize, gaps: &[Range<usize>]) -> Self {
        let mut reliable = vec![true; len];
        for gap in gaps {
            for r in &mut reliable[gap.start.min(len)..gap.end.min(len)] {
                *r = false;
            }
        }
        Self { reliable }
    }

    pub fn len(&self) -> usize {
        self.reliable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reliable.is_empty()
    }

    pub fn is_reliable(&self, i: usize) -> bool {
        self.reliable[i]
    }

    pub fn flags(&self) -> &[bool] {
        &self.reliable
    }

    pub fn n_missing(&self) -> usize {
        self.reliable.iter().filter(|r| !**r).count()
    }

    pub fn missing_indices(&self) -> Vec<usize> {
        self.reliable
            .iter()
            .enumerate()
            .filter_map(|(i, r)| (!r).then_some(i))
            .collect()
    }

    /// Maximal runs of consecutive missing samples.
    pub fn missing_runs(&self) -> Vec<Range<usize>> {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &r) in self.reliable.iter().enumerate() {
            match (r, start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    runs.push(s..i);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push(s..self.reliable.len());
        }
        runs
    }
}

/// Precomputed analysis/synthesis operator for one parameter set.
#[derive(Clone)]
pub struct StftOperator {
    params: StftParams,
    window: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for StftOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StftOperator")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl StftOperator {
    pub fn new(params: StftParams) -> Result<Self> {
        params.validate()?;
        let window = normalize_tight(&make_window(params.window, params.win_len)?, params.hop)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            params,
            window,
            forward: planner.plan_fft_forward(params.n_channels),
            inverse: planner.plan_fft_inverse(params.n_channels),
        })
    }

    pub fn params(&self) -> &StftParams {
        &self.params
    }

    /// Tight (normalized) analysis window.
    pub fn window(&self) -> &[f64] {
        &self.window
    }

    /// Analysis `G x`.
    pub fn analyze(&self, x: &[f64], sample_rate: u32) -> Spectrogram {
        let mut out = Spectrogram::zeros(self.params, x.len(), sample_rate);
        self.analyze_into(x, &mut out);
        out
    }

    /// Analysis into an existing spectrogram of matching geometry.
    pub fn analyze_into(&self, x: &[f64], out: &mut Spectrogram) {
        let p = &self.params;
        let padded = p.padded_len(x.len());
        let m = p.n_channels;
        let scale = (m as f64).sqrt().recip();
        let interior = std::f64::consts::SQRT_2 * scale;
        debug_assert_eq!(out.n_frames, padded / p.hop);
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        for t in 0..out.n_frames {
            let start = p.frame_start(t, padded);
            for (n, slot) in buf.iter_mut().enumerate() {
                *slot = if n < p.win_len {
                    let idx = (start + n) % padded;
                    let v = if idx < x.len() { x[idx] } else { 0.0 };
                    Complex64::new(v * self.window[n], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            self.forward.process_with_scratch(&mut buf, &mut scratch);
            let col = out.column_mut(t);
            let last = col.len() - 1;
            for (k, c) in col.iter_mut().enumerate() {
                let w = if k == 0 || k == last { scale } else { interior };
                *c = buf[k] * w;
            }
        }
    }

    /// Synthesis `G* X`, truncated to the spectrogram's signal length.
    pub fn synthesize(&self, spec: &Spectrogram) -> Vec<f64> {
        let mut out = self.synthesize_padded(spec);
        out.truncate(spec.signal_len);
        out
    }

    /// Synthesis over the full padded length.
    pub fn synthesize_padded(&self, spec: &Spectrogram) -> Vec<f64> {
        let p = &self.params;
        let padded = p.padded_len(spec.signal_len);
        let m = p.n_channels;
        let scale = (m as f64).sqrt().recip();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = vec![0.0; padded];
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        for t in 0..spec.n_frames {
            let col = spec.column(t);
            let nyq = m / 2;
            buf[0] = Complex64::new(col[0].re, 0.0);
            buf[nyq] = Complex64::new(col[nyq].re, 0.0);
            for k in 1..nyq {
                let v = col[k] * half;
                buf[k] = v;
                buf[m - k] = v.conj();
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            let start = p.frame_start(t, padded);
            for n in 0..p.win_len {
                let idx = (start + n) % padded;
                out[idx] += self.window[n] * buf[n].re * scale;
            }
        }
        out
    }
}

/// Tight-frame STFT of `x`.
pub fn stft(x: &TimeSignal, params: &StftParams) -> Result<Spectrogram> {
    let op = StftOperator::new(*params)?;
    Ok(op.analyze(x.samples(), x.sample_rate()))
}

/// Adjoint (and left inverse) of [`stft`].
pub fn istft(spec: &Spectrogram) -> Result<TimeSignal> {
    let op = StftOperator::new(spec.params)?;
    TimeSignal::new(op.synthesize(spec), spec.sample_rate)
}

/// Samples touched by any missing column's window footprint.
pub fn affected_samples(mask: &TfMask, params: &StftParams, n: usize) -> Result<TimeMask> {
    params.validate()?;
    let n_frames = params.n_frames(n);
    if mask.n_frames() != n_frames {
        return Err(Error::InconsistentMask(format!(
            "mask has {} columns but a signal of {n} samples has {n_frames}",
            mask.n_frames()
        )));
    }
    let padded = params.padded_len(n);
    let mut reliable = vec![true; n];
    for &t in mask.missing_columns() {
        let start = params.frame_start(t, padded);
        for j in 0..params.win_len {
            let idx = (start + j) % padded;
            if idx < n {
                reliable[idx] = false;
            }
        }
    }
    Ok(TimeMask::new(reliable))
}
