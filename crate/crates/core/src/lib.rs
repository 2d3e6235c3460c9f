//! Spectrogram inpainting with an autoregressive signal model.
//!
//! The central routine is [`tf_solver::janssen_tf`]: it alternates LPC model
//! estimation with an ADMM solve that keeps the reconstruction's spectrogram
//! equal to the observation on the reliable columns. The time-domain Janssen
//! method in [`td_baseline`] serves as the reference competitor, and
//! [`experiment`] drives both over a WAV corpus.

pub mod armodel;
pub mod banded;
pub mod degradation;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod stft;
pub mod synth;
pub mod td_baseline;
pub mod tf_solver;
pub mod wav;

pub use armodel::{ar_error, autocorrelation, gram_plus_identity, levinson, lpc, ArModel};
pub use banded::{banded_cholesky, banded_solve, BandedCholesky, BandedSpdMatrix};
pub use degradation::{degrade, plan_gaps, DegradationPlan};
pub use error::{Error, Result};
pub use metrics::{aggregate, bootstrap_mean_ci, snr, Method, MetricsRecord};
pub use stft::{
    affected_samples, istft, make_window, normalize_tight, stft, Spectrogram, StftParams, TfMask,
    TimeMask, TimeSignal, WindowKind,
};
pub use td_baseline::{fill_missing_ls, gapwise_janssen, janssen_td, BaselineConfig};
pub use tf_solver::{admm_signal_update, janssen_tf, project_feasible, AdmmConfig, SolveDiagnostics};
