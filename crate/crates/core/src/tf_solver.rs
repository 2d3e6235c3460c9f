//! Janssen-TF: spectrogram inpainting under an autoregressive signal model.
//!
//! Each outer iteration fits an AR model to the current estimate and then
//! solves
//!
//! ```text
//! minimize  1/2 ||A x||^2   subject to   G x agrees with X_cor on reliable columns
//! ```
//!
//! by ADMM. Since `G* G = I`, the `x`-step is the proximal operator of
//! `(1/rho) 1/2 ||A .||^2` at `G*(z - u)`, i.e. one banded solve with
//! `I + (1/rho) A^T A`. That matrix only changes with the model, so it is
//! factored once per outer iteration.

use std::time::Instant;

use rustfft::num_complex::Complex64;

use crate::armodel::{ar_objective, gram_plus_identity, lpc, ArModel};
use crate::banded::{banded_cholesky, banded_solve_in_place};
use crate::error::{Error, Result};
use crate::stft::{Spectrogram, StftOperator, TfMask, TimeSignal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmConfig {
    pub rho: f64,
    pub inner_iters: usize,
    pub outer_iters: usize,
    pub ar_order: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            inner_iters: 20,
            outer_iters: 10,
            ar_order: 512,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step size {} must be positive",
                self.rho
            )));
        }
        if self.inner_iters == 0 || self.outer_iters == 0 {
            return Err(Error::InvalidParameter(
                "iteration counts must be at least 1".into(),
            ));
        }
        if self.ar_order == 0 {
            return Err(Error::InvalidParameter("AR order must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterRecord {
    /// `1/2 ||A x||^2` of the iterate under the model fitted in this iteration.
    pub objective: f64,
    /// `||G x - z||` after the last inner iteration.
    pub primal_residual: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveDiagnostics {
    pub outer: Vec<OuterRecord>,
}

/// Result of one ADMM signal update.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmUpdate {
    pub signal: Vec<f64>,
    /// Primal residual `||G x^(k+1) - z^(k+1)||` for `k = 1..=K`.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JanssenTfOutput {
    /// Final iterate, the algorithm's return value.
    pub signal: TimeSignal,
    /// `G x` of the final iterate.
    pub spectrogram: Spectrogram,
    /// `G x` with the observed columns put back.
    pub spectrogram_with_context: Spectrogram,
    /// Synthesis of `spectrogram_with_context`.
    pub signal_with_context: TimeSignal,
    pub diagnostics: SolveDiagnostics,
}

fn check_shapes(x: &Spectrogram, x_cor: &Spectrogram, mask: &TfMask) -> Result<()> {
    if !x.same_shape(x_cor) {
        return Err(Error::InconsistentInput(format!(
            "spectrogram shapes differ: {}x{} vs {}x{}",
            x.n_frames(),
            x.n_bins(),
            x_cor.n_frames(),
            x_cor.n_bins()
        )));
    }
    if mask.n_frames() != x.n_frames() {
        return Err(Error::InconsistentInput(format!(
            "mask has {} columns, spectrogram has {}",
            mask.n_frames(),
            x.n_frames()
        )));
    }
    Ok(())
}

/// Projection onto the spectrograms that agree with `x_cor` on the
/// reliable columns.
pub fn project_feasible(x: &Spectrogram, x_cor: &Spectrogram, mask: &TfMask) -> Result<Spectrogram> {
    check_shapes(x, x_cor, mask)?;
    let mut out = x.clone();
    project_in_place(&mut out, x_cor, &mask.reliable_flags());
    Ok(out)
}

fn project_in_place(x: &mut Spectrogram, x_cor: &Spectrogram, reliable: &[bool]) {
    for (t, _) in reliable.iter().enumerate().filter(|(_, r)| **r) {
        x.column_mut(t).copy_from_slice(x_cor.column(t));
    }
}

/// ADMM solve of the signal subproblem for a fixed AR model, starting from
/// `z = G x_init` and `u = 0`.
pub fn admm_signal_update(
    model: &ArModel,
    x_cor: &Spectrogram,
    mask: &TfMask,
    x_init: &TimeSignal,
    cfg: &AdmmConfig,
) -> Result<AdmmUpdate> {
    cfg.validate()?;
    let op = StftOperator::new(*x_cor.params())?;
    admm_with_operator(&op, model, x_cor, mask, x_init.samples(), cfg)
}

fn admm_with_operator(
    op: &StftOperator,
    model: &ArModel,
    x_cor: &Spectrogram,
    mask: &TfMask,
    x_init: &[f64],
    cfg: &AdmmConfig,
) -> Result<AdmmUpdate> {
    if x_init.len() != x_cor.signal_len() {
        return Err(Error::DimensionMismatch {
            expected: x_cor.signal_len(),
            got: x_init.len(),
        });
    }
    let rate = x_cor.sample_rate();
    let mut z = op.analyze(x_init, rate);
    check_shapes(&z, x_cor, mask)?;
    let reliable = mask.reliable_flags();
    let factor = banded_cholesky(&gram_plus_identity(model, x_init.len(), cfg.rho)?)?;

    let mut u = Spectrogram::zeros(*x_cor.params(), x_cor.signal_len(), rate);
    let mut v = u.clone();
    let mut gx = u.clone();
    let mut xbar = Vec::new();
    let mut residuals = Vec::with_capacity(cfg.inner_iters);
    for _ in 0..cfg.inner_iters {
        for ((vi, zi), ui) in v.coeffs_mut().iter_mut().zip(z.coeffs()).zip(u.coeffs()) {
            *vi = zi - ui;
        }
        xbar = op.synthesize(&v);
        banded_solve_in_place(&factor, &mut xbar)?;

        op.analyze_into(&xbar, &mut gx);
        for ((zi, gi), ui) in z.coeffs_mut().iter_mut().zip(gx.coeffs()).zip(u.coeffs()) {
            *zi = gi + ui;
        }
        project_in_place(&mut z, x_cor, &reliable);
        for ((ui, gi), zi) in u.coeffs_mut().iter_mut().zip(gx.coeffs()).zip(z.coeffs()) {
            *ui += gi - zi;
        }
        // gx - z is nonzero on reliable columns only.
        let r: f64 = reliable
            .iter()
            .enumerate()
            .filter(|(_, r)| **r)
            .map(|(t, _)| {
                gx.column(t)
                    .iter()
                    .zip(z.column(t))
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        residuals.push(r.sqrt());
    }
    Ok(AdmmUpdate {
        signal: xbar,
        residuals,
    })
}

/// Janssen iteration in the time-frequency domain: LPC estimation alternating
/// with the ADMM update.
///
/// Starts from `istft(x_cor)`; coefficients of `x_cor` in missing columns
/// are ignored. If a later iterate is too degenerate for model estimation,
/// the previous model is reused. With no missing columns the result is
/// `istft(x_cor)` and no iterations are run.
pub fn janssen_tf(x_cor: &Spectrogram, mask: &TfMask, cfg: &AdmmConfig) -> Result<JanssenTfOutput> {
    cfg.validate()?;
    if mask.n_frames() != x_cor.n_frames() {
        return Err(Error::InconsistentMask(format!(
            "mask has {} columns, spectrogram has {}",
            mask.n_frames(),
            x_cor.n_frames()
        )));
    }
    if mask.n_reliable() == 0 {
        return Err(Error::NoReliableData);
    }
    let op = StftOperator::new(*x_cor.params())?;
    let rate = x_cor.sample_rate();

    let mut observed = x_cor.clone();
    for &t in mask.missing_columns() {
        observed.column_mut(t).fill(Complex64::new(0.0, 0.0));
    }

    let mut x = op.synthesize(&observed);
    let mut diagnostics = SolveDiagnostics::default();

    // Zero observations: zero is feasible and minimizes the objective for any model.
    if observed.coeffs().iter().all(|c| c.re == 0.0 && c.im == 0.0) {
        x.iter_mut().for_each(|v| *v = 0.0);
    } else if mask.n_missing() == 0 {
        // Nothing to inpaint: the synthesis is the only (least-squares) feasible point.
    } else {
        let mut model: Option<ArModel> = None;
        for i in 0..cfg.outer_iters {
            let started = Instant::now();
            model = match (lpc(&x, cfg.ar_order), model) {
                (Ok(m), _) => Some(m),
                (Err(Error::DegenerateSignal(_)), Some(prev)) if i > 0 => {
                    log::warn!("outer iteration {}: degenerate estimate, reusing model", i + 1);
                    Some(prev)
                }
                (Err(e), _) => return Err(e),
            };
            let m = model.as_ref().expect("model set above");
            let update = admm_with_operator(&op, m, &observed, mask, &x, cfg)?;
            x = update.signal;
            diagnostics.outer.push(OuterRecord {
                objective: ar_objective(m, &x),
                primal_residual: update.residuals.last().copied().unwrap_or(0.0),
                wall_time_s: started.elapsed().as_secs_f64(),
            });
        }
    }

    let spectrogram = op.analyze(&x, rate);
    let mut spectrogram_with_context = spectrogram.clone();
    project_in_place(&mut spectrogram_with_context, &observed, &mask.reliable_flags());
    let signal_with_context = TimeSignal::new(op.synthesize(&spectrogram_with_context), rate)?;
    Ok(JanssenTfOutput {
        signal: TimeSignal::new(x, rate)?,
        spectrogram,
        spectrogram_with_context,
        signal_with_context,
        diagnostics,
    })
}
