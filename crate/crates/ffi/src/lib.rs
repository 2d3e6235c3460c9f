//! C interface to `tfinpaint`.
//!
//! Conventions:
//! - every fallible function returns a [`TfiStatus`]; on failure a message is
//!   available from [`tfi_last_error_message`] on the same thread;
//! - spectrograms and masks are opaque handles created by `*_new`/analysis
//!   functions and released with the matching `*_free`;
//! - output sample buffers are caller-allocated; the required length is the
//!   input signal length (or is reported through an `out_len` argument);
//! - panics never cross the boundary, they surface as `TFI_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tfinpaint::degradation::apply_mask;
use tfinpaint::{
    affected_samples, gapwise_janssen, istft, janssen_tf, plan_gaps, snr, stft, AdmmConfig,
    BaselineConfig, Error, Spectrogram, StftParams, TfMask, TimeMask, TimeSignal, WindowKind,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DimensionMismatch = 3,
    InconsistentMask = 4,
    NoReliableData = 5,
    NotPositiveDefinite = 6,
    DegenerateSignal = 7,
    InsufficientContext = 8,
    CannotPlaceGaps = 9,
    UndefinedReference = 10,
    BufferTooSmall = 11,
    Internal = 12,
    Panic = 13,
}

/// Window shapes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfiWindow {
    Hann = 0,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TfiStftParams {
    pub win_len: usize,
    pub hop: usize,
    pub n_channels: usize,
    pub window: TfiWindow,
    pub frame_offset: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfiAdmmConfig {
    pub rho: f64,
    pub inner_iters: usize,
    pub outer_iters: usize,
    pub ar_order: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TfiBaselineConfig {
    pub ar_order: usize,
    pub iters: usize,
    /// Reliable samples per side; 0 selects the default `max(2 * ar_order, 4096)`.
    pub context: usize,
}

/// Opaque complex spectrogram.
pub struct TfiSpectrogram(Spectrogram);

/// Opaque set of missing spectrogram columns.
pub struct TfiMask(TfMask);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> TfiStatus {
    match err {
        Error::InvalidParameter(_)
        | Error::NonTileableWindow { .. }
        | Error::InvalidOrder { .. }
        | Error::InsufficientData { .. }
        | Error::Config(_) => TfiStatus::InvalidParameter,
        Error::InconsistentMask(_) => TfiStatus::InconsistentMask,
        Error::InconsistentInput(_) | Error::DimensionMismatch { .. } => TfiStatus::DimensionMismatch,
        Error::DegenerateSignal(_) => TfiStatus::DegenerateSignal,
        Error::NotPositiveDefinite { .. } => TfiStatus::NotPositiveDefinite,
        Error::NoReliableData => TfiStatus::NoReliableData,
        Error::InsufficientContext { .. } => TfiStatus::InsufficientContext,
        Error::CannotPlaceGaps { .. } => TfiStatus::CannotPlaceGaps,
        Error::UndefinedReference => TfiStatus::UndefinedReference,
        _ => TfiStatus::Internal,
    }
}

struct Fail(TfiStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TfiStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TfiStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfiStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            TfiStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn fill(out: &mut [f64], values: &[f64]) -> Result<(), Fail> {
    if out.len() < values.len() {
        return Err(Fail(
            TfiStatus::BufferTooSmall,
            format!("buffer holds {} values, {} needed", out.len(), values.len()),
        ));
    }
    out[..values.len()].copy_from_slice(values);
    Ok(())
}

impl From<TfiStftParams> for StftParams {
    fn from(p: TfiStftParams) -> Self {
        StftParams {
            win_len: p.win_len,
            hop: p.hop,
            n_channels: p.n_channels,
            window: match p.window {
                TfiWindow::Hann => WindowKind::Hann,
            },
            frame_offset: p.frame_offset,
        }
    }
}

impl From<TfiAdmmConfig> for AdmmConfig {
    fn from(c: TfiAdmmConfig) -> Self {
        AdmmConfig {
            rho: c.rho,
            inner_iters: c.inner_iters,
            outer_iters: c.outer_iters,
            ar_order: c.ar_order,
        }
    }
}

impl From<TfiBaselineConfig> for BaselineConfig {
    fn from(c: TfiBaselineConfig) -> Self {
        BaselineConfig {
            ar_order: c.ar_order,
            iters: c.iters,
            context: (c.context > 0).then_some(c.context),
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tfi_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn tfi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Default STFT: 2048-sample Hann window, hop 512, 2048 channels.
#[no_mangle]
pub extern "C" fn tfi_stft_params_default() -> TfiStftParams {
    let d = StftParams::default();
    TfiStftParams {
        win_len: d.win_len,
        hop: d.hop,
        n_channels: d.n_channels,
        window: TfiWindow::Hann,
        frame_offset: d.frame_offset,
    }
}

#[no_mangle]
pub extern "C" fn tfi_admm_config_default() -> TfiAdmmConfig {
    let d = AdmmConfig::default();
    TfiAdmmConfig {
        rho: d.rho,
        inner_iters: d.inner_iters,
        outer_iters: d.outer_iters,
        ar_order: d.ar_order,
    }
}

#[no_mangle]
pub extern "C" fn tfi_baseline_config_default() -> TfiBaselineConfig {
    let d = BaselineConfig::default();
    TfiBaselineConfig {
        ar_order: d.ar_order,
        iters: d.iters,
        context: 0,
    }
}

/// Number of STFT columns for a signal of `len` samples.
///
/// # Safety
/// `params` and `out_n_frames` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tfi_n_frames(params: *const TfiStftParams, len: usize, out_n_frames: *mut usize) -> TfiStatus {
    guard(|| {
        let p: StftParams = (*deref(params, "params")?).into();
        p.validate()?;
        *out_n_frames.as_mut().ok_or_else(|| null("out_n_frames"))? = p.n_frames(len);
        Ok(())
    })
}

/// Analyzes `len` samples into a new spectrogram handle.
///
/// # Safety
/// `samples` must point to `len` doubles; `params` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfi_stft(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    params: *const TfiStftParams,
    out: *mut *mut TfiSpectrogram,
) -> TfiStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let x = TimeSignal::new(slice(samples, len, "samples")?.to_vec(), sample_rate)?;
        let p: StftParams = (*deref(params, "params")?).into();
        *out = Box::into_raw(Box::new(TfiSpectrogram(stft(&x, &p)?)));
        Ok(())
    })
}

/// # Safety
/// `spec` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfi_spectrogram_free(spec: *mut TfiSpectrogram) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Shape of a spectrogram and the length of the signal it was computed from.
///
/// # Safety
/// `spec` must be a live handle; output pointers may be NULL.
#[no_mangle]
pub unsafe extern "C" fn tfi_spectrogram_shape(
    spec: *const TfiSpectrogram,
    out_n_frames: *mut usize,
    out_n_bins: *mut usize,
    out_signal_len: *mut usize,
) -> TfiStatus {
    guard(|| {
        let s = &deref(spec, "spec")?.0;
        if let Some(v) = out_n_frames.as_mut() {
            *v = s.n_frames();
        }
        if let Some(v) = out_n_bins.as_mut() {
            *v = s.n_bins();
        }
        if let Some(v) = out_signal_len.as_mut() {
            *v = s.signal_len();
        }
        Ok(())
    })
}

/// Copies the coefficients, column-major (frame-major), into separate real
/// and imaginary buffers of `n_frames * n_bins` entries each.
///
/// # Safety
/// `spec` must be live; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tfi_spectrogram_coeffs(
    spec: *const TfiSpectrogram,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> TfiStatus {
    guard(|| {
        let s = &deref(spec, "spec")?.0;
        let re = slice_mut(re, len, "re")?;
        let im = slice_mut(im, len, "im")?;
        let c = s.coeffs();
        fill(re, &c.iter().map(|z| z.re).collect::<Vec<_>>())?;
        fill(im, &c.iter().map(|z| z.im).collect::<Vec<_>>())?;
        Ok(())
    })
}

/// Synthesizes a spectrogram into `out`, which must hold the signal length.
///
/// # Safety
/// `spec` must be live; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tfi_istft(spec: *const TfiSpectrogram, out: *mut f64, out_len: usize) -> TfiStatus {
    guard(|| {
        let x = istft(&deref(spec, "spec")?.0)?;
        fill(slice_mut(out, out_len, "out")?, x.samples())
    })
}

/// Mask with the given missing columns (duplicates allowed, any order).
///
/// # Safety
/// `columns` must hold `n_columns` entries; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfi_mask_new(
    n_frames: usize,
    columns: *const usize,
    n_columns: usize,
    out: *mut *mut TfiMask,
) -> TfiStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let cols = slice(columns, n_columns, "columns")?;
        *out = Box::into_raw(Box::new(TfiMask(TfMask::new(n_frames, cols.iter().copied())?)));
        Ok(())
    })
}

/// Random placement of `n_gaps` gaps of `gap_len` columns.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfi_mask_plan(
    n_frames: usize,
    gap_len: usize,
    n_gaps: usize,
    seed: u64,
    margin: usize,
    separation: usize,
    out: *mut *mut TfiMask,
) -> TfiStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let plan = plan_gaps(n_frames, gap_len, n_gaps, seed, margin, separation)?;
        *out = Box::into_raw(Box::new(TfiMask(plan.mask()?)));
        Ok(())
    })
}

/// # Safety
/// `mask` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tfi_mask_free(mask: *mut TfiMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// Writes the sorted missing columns to `out` and their count to
/// `out_count`. With `out` NULL only the count is reported.
///
/// # Safety
/// `mask` must be live; `out` must hold `capacity` entries unless NULL.
#[no_mangle]
pub unsafe extern "C" fn tfi_mask_missing_columns(
    mask: *const TfiMask,
    out: *mut usize,
    capacity: usize,
    out_count: *mut usize,
) -> TfiStatus {
    guard(|| {
        let cols = deref(mask, "mask")?.0.missing_columns();
        *out_count.as_mut().ok_or_else(|| null("out_count"))? = cols.len();
        if out.is_null() {
            return Ok(());
        }
        if capacity < cols.len() {
            return Err(Fail(TfiStatus::BufferTooSmall, format!("{} columns do not fit in {capacity}", cols.len())));
        }
        std::slice::from_raw_parts_mut(out, cols.len()).copy_from_slice(cols);
        Ok(())
    })
}

/// Copy of `spec` with the masked columns set to zero.
///
/// # Safety
/// `spec` and `mask` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfi_degrade(
    spec: *const TfiSpectrogram,
    mask: *const TfiMask,
    out: *mut *mut TfiSpectrogram,
) -> TfiStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let y = apply_mask(&deref(spec, "spec")?.0, &deref(mask, "mask")?.0)?;
        *out = Box::into_raw(Box::new(TfiSpectrogram(y)));
        Ok(())
    })
}

/// Janssen-TF inpainting of `x_cor`. Writes the reconstructed signal to
/// `out`; with `with_context` nonzero the observed columns are reinserted
/// before synthesis.
///
/// # Safety
/// `x_cor`, `mask` and `cfg` must be valid; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tfi_janssen_tf(
    x_cor: *const TfiSpectrogram,
    mask: *const TfiMask,
    cfg: *const TfiAdmmConfig,
    with_context: bool,
    out: *mut f64,
    out_len: usize,
) -> TfiStatus {
    guard(|| {
        let cfg: AdmmConfig = (*deref(cfg, "cfg")?).into();
        let res = janssen_tf(&deref(x_cor, "x_cor")?.0, &deref(mask, "mask")?.0, &cfg)?;
        let x = if with_context { &res.signal_with_context } else { &res.signal };
        fill(slice_mut(out, out_len, "out")?, x.samples())
    })
}

/// Marks, with 1 for reliable and 0 for missing, the samples untouched by the
/// masked columns. `out` must hold `len` bytes.
///
/// # Safety
/// `mask` and `params` must be valid; `out` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn tfi_affected_samples(
    mask: *const TfiMask,
    params: *const TfiStftParams,
    len: usize,
    out: *mut u8,
) -> TfiStatus {
    guard(|| {
        let p: StftParams = (*deref(params, "params")?).into();
        let tm = affected_samples(&deref(mask, "mask")?.0, &p, len)?;
        let out = slice_mut(out, len, "out")?;
        for (o, r) in out.iter_mut().zip(tm.flags()) {
            *o = u8::from(*r);
        }
        Ok(())
    })
}

/// Gap-wise time-domain Janssen. `reliable[i]` nonzero marks a known sample.
///
/// # Safety
/// `samples`, `reliable` and `out` must hold `len` elements; `cfg` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfi_gapwise_janssen(
    samples: *const f64,
    reliable: *const u8,
    len: usize,
    sample_rate: u32,
    cfg: *const TfiBaselineConfig,
    out: *mut f64,
) -> TfiStatus {
    guard(|| {
        let cfg: BaselineConfig = (*deref(cfg, "cfg")?).into();
        let x = TimeSignal::new(slice(samples, len, "samples")?.to_vec(), sample_rate)?;
        let mask = TimeMask::new(slice(reliable, len, "reliable")?.iter().map(|v| *v != 0).collect());
        let y = gapwise_janssen(&x, &mask, &cfg)?;
        fill(slice_mut(out, len, "out")?, y.samples())
    })
}

/// SNR in dB of `estimate` against `reference`; +inf for an exact match.
///
/// # Safety
/// Both buffers must hold `len` doubles; `out_db` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfi_snr(
    reference: *const f64,
    estimate: *const f64,
    len: usize,
    out_db: *mut f64,
) -> TfiStatus {
    guard(|| {
        let v = snr(slice(reference, len, "reference")?, slice(estimate, len, "estimate")?)?;
        *out_db.as_mut().ok_or_else(|| null("out_db"))? = v;
        Ok(())
    })
}
