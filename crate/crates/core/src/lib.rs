//! Super-resolution spectrogram fusion.
//!
//! Fuses two or more spectrograms of the same signal, computed with different
//! time-frequency resolutions, into one spectrogram that keeps the frequency
//! localization of the long-window input and the temporal localization of the
//! short-window input. The fusion is an unbalanced optimal-transport
//! barycenter on a fixed target grid, solved by block
//! majorization-minimization over sparse, geometry-aware cost patterns that
//! only connect physically overlapping analysis windows.

pub mod cost;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod io;
pub mod melscale;
pub mod metrics;
pub mod overlap;
pub mod stft;
pub mod synthgen;
pub mod tf_core;
pub mod uot;

pub use error::{Error, Result};
pub use tf_core::{MeasureView, Spectrogram, TFSupport};
