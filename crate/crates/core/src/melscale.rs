//! Hz <-> mel conversion (O'Shaughnessy constants) and mel-spaced frequency axes.

use crate::error::{Error, Result};

/// Configuration of a mel-spaced target frequency axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelAxisConfig {
    /// Number of mel bands `M >= 2`.
    pub n_bands: usize,
    /// Sample rate in Hz; the axis spans `[0, sample_rate / 2]`.
    pub sample_rate: f64,
}

impl MelAxisConfig {
    pub fn new(n_bands: usize, sample_rate: f64) -> Result<Self> {
        if n_bands < 2 {
            return Err(Error::InvalidArgument(format!(
                "mel axis needs at least 2 bands, got {n_bands}"
            )));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        Ok(MelAxisConfig {
            n_bands,
            sample_rate,
        })
    }

    /// Mel value of the Nyquist frequency, `m_r = mel(f_s / 2)`.
    pub fn mel_range(&self) -> f64 {
        hz_to_mel(self.sample_rate / 2.0).expect("positive Nyquist")
    }
}

/// `mel(f) = 2595 * log10(1 + f / 700)`, defined for `f >= 0`.
pub fn hz_to_mel(f: f64) -> Result<f64> {
    if !(f >= 0.0) {
        return Err(Error::Domain(format!(
            "hz_to_mel requires a nonnegative frequency, got {f}"
        )));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

/// Inverse of [`hz_to_mel`]: `700 * (10^(m / 2595) - 1)`, defined for `m >= 0`.
pub fn mel_to_hz(m: f64) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::Domain(format!(
            "mel_to_hz requires a nonnegative mel value, got {m}"
        )));
    }
    Ok(700.0 * (10f64.powf(m / 2595.0) - 1.0))
}

/// `M` frequencies regularly spaced in mel from 0 to `mel(f_s / 2)`, in Hz.
///
/// `f_1 = 0` and `f_M = f_s / 2` exactly (endpoints pinned so downstream axis
/// comparisons do not depend on round-trip error).
pub fn mel_axis(cfg: &MelAxisConfig) -> Vec<f64> {
    let m_r = cfg.mel_range();
    let m_count = cfg.n_bands;
    let mut axis: Vec<f64> = (0..m_count)
        .map(|i| mel_to_hz(i as f64 / (m_count - 1) as f64 * m_r).expect("nonnegative mel"))
        .collect();
    axis[0] = 0.0;
    axis[m_count - 1] = cfg.sample_rate / 2.0;
    axis
}
