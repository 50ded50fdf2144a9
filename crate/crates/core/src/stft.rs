//! Hann-windowed STFT, power spectrograms, and uniform sampling axes.
//!
//! Frames are centered: frame `n` (1-based) covers samples
//! `(n-1)*H - W/2 + 1 ..= (n-1)*H + W/2` (1-based), with the signal taken as
//! zero outside its range. Frequency bins are the first `M` bins of an
//! `n_fft`-point DFT.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tf_core::{Spectrogram, TFSupport};

/// STFT analysis parameters. Window and FFT lengths are in samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StftParams {
    /// Window length `W` (positive even integer).
    pub window_len: usize,
    /// Hop size `H` in samples.
    pub hop: usize,
    /// DFT length, even and `>= window_len`.
    pub n_fft: usize,
    /// Sample rate in Hz.
    pub sample_rate: f64,
}

impl StftParams {
    pub fn new(window_len: usize, hop: usize, n_fft: usize, sample_rate: f64) -> Result<Self> {
        if window_len < 2 || window_len % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "window length must be a positive even integer, got {window_len}"
            )));
        }
        if n_fft < window_len || n_fft % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "n_fft must be even and >= window length, got {n_fft} (W = {window_len})"
            )));
        }
        if hop == 0 {
            return Err(Error::InvalidArgument("hop must be >= 1".into()));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        Ok(StftParams {
            window_len,
            hop,
            n_fft,
            sample_rate,
        })
    }

    /// Parameters with `n_fft = W` (the minimum), the usual complete-sampling setup.
    pub fn complete(window_len: usize, hop: usize, sample_rate: f64) -> Result<Self> {
        StftParams::new(window_len, hop, window_len, sample_rate)
    }

    /// Parameters whose one-sided complete sampling achieves a frequency
    /// spacing of at most `max_spacing_hz`: `n_fft` is the smallest power of
    /// two that is `>= W` and gives `sample_rate / n_fft <= max_spacing_hz`.
    pub fn with_spacing(
        window_len: usize,
        hop: usize,
        sample_rate: f64,
        max_spacing_hz: f64,
    ) -> Result<Self> {
        if !(max_spacing_hz > 0.0) {
            return Err(Error::InvalidArgument(
                "frequency spacing must be positive".into(),
            ));
        }
        let mut n_fft = window_len.next_power_of_two().max(2);
        while sample_rate / n_fft as f64 > max_spacing_hz {
            n_fft = n_fft
                .checked_mul(2)
                .ok_or_else(|| Error::ResourceLimit("n_fft overflow".into()))?;
        }
        StftParams::new(window_len, hop, n_fft, sample_rate)
    }

    /// Bin count of the full one-sided spectrum, `n_fft / 2 + 1`.
    pub fn complete_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    /// Window length in seconds.
    pub fn window_len_s(&self) -> f64 {
        self.window_len as f64 / self.sample_rate
    }
}

/// Periodic (DFT-even) Hann window: `g_l = 0.5 * (1 - cos(2 pi (l-1) / W))`,
/// `l = 1..W`; the first sample is exactly zero.
pub fn hann_window(window_len: usize) -> Result<Vec<f64>> {
    if window_len < 2 {
        return Err(Error::Domain(format!(
            "Hann window needs W >= 2, got {window_len}"
        )));
    }
    Ok((0..window_len)
        .map(|l| 0.5 * (1.0 - (2.0 * PI * l as f64 / window_len as f64).cos()))
        .collect())
}

/// Number of frames with centers at samples `0, H, 2H, ... <= L-1`:
/// `N = floor((L-1)/H) + 1`.
pub fn frame_count(signal_len: usize, hop: usize) -> Result<usize> {
    if signal_len == 0 {
        return Err(Error::InvalidArgument("signal must be nonempty".into()));
    }
    if hop == 0 {
        return Err(Error::InvalidArgument("hop must be >= 1".into()));
    }
    Ok((signal_len - 1) / hop + 1)
}

/// Frame times `t_n = (n-1) * H / f_s`, starting at zero.
pub fn time_axis(params: &StftParams, n_frames: usize) -> Vec<f64> {
    (0..n_frames)
        .map(|n| n as f64 * params.hop as f64 / params.sample_rate)
        .collect()
}

/// Uniform frequency axis `f_m = (m-1) / (M-1) * f_s / 2`, from 0 to Nyquist.
pub fn freq_axis(m_count: usize, sample_rate: f64) -> Result<Vec<f64>> {
    if m_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "frequency axis needs M >= 2, got {m_count}"
        )));
    }
    Ok((0..m_count)
        .map(|m| m as f64 / (m_count - 1) as f64 * sample_rate / 2.0)
        .collect())
}

/// Power spectrogram of a real signal: squared magnitude of the first
/// `m_count` DFT bins of every Hann-windowed frame.
///
/// The per-entry definition is
/// `X[m][n] = |sum_l y[l + (n-1)H - W/2] g_l exp(-j 2 pi (l-1)(m-1)/n_fft)|^2`
/// (1-based), with zero-padding outside the signal. Evaluation uses a complex
/// rotation recurrence per bin; it matches the naive per-entry evaluation to
/// well below 1e-9 relative.
pub fn spectrogram(y: &[f64], params: &StftParams, m_count: usize) -> Result<Spectrogram> {
    if m_count < 2 || m_count > params.n_fft / 2 + 1 {
        return Err(Error::Domain(format!(
            "bin count {m_count} out of range 2..={}",
            params.n_fft / 2 + 1
        )));
    }
    let w = params.window_len;
    let g = hann_window(w)?;
    let n_frames = frame_count(y.len(), params.hop)?;
    let freqs = freq_axis(m_count, params.sample_rate)?;
    let times = time_axis(params, n_frames);
    let support = TFSupport::new(freqs, times)?;

    let mut values = vec![0.0f64; m_count * n_frames];
    let mut segment = vec![0.0f64; w];
    for n0 in 0..n_frames {
        let start = n0 as i64 * params.hop as i64 - (w / 2) as i64;
        for (l0, s) in segment.iter_mut().enumerate() {
            let j = start + l0 as i64;
            *s = if j >= 0 && (j as usize) < y.len() {
                y[j as usize] * g[l0]
            } else {
                0.0
            };
        }
        let column = &mut values[n0 * m_count..(n0 + 1) * m_count];
        dft_power(&segment, params.n_fft, column);
    }

    Spectrogram::new(
        support,
        values,
        params.window_len_s(),
        params.hop as u32,
        params.sample_rate,
    )
}

/// Squared magnitudes of the first `out.len()` bins of the `n_fft`-point DFT
/// of `segment` (zero-padded).
fn dft_power(segment: &[f64], n_fft: usize, out: &mut [f64]) {
    for (m, o) in out.iter_mut().enumerate() {
        let theta = -2.0 * PI * m as f64 / n_fft as f64;
        let (step_cos, step_sin) = (theta.cos(), theta.sin());
        let (mut c, mut s) = (1.0f64, 0.0f64);
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for &x in segment {
            re += x * c;
            im += x * s;
            let c_next = c * step_cos - s * step_sin;
            s = c * step_sin + s * step_cos;
            c = c_next;
        }
        *o = re * re + im * im;
    }
}

/// Full `n_fft`-bin one-frame power DFT by direct per-entry evaluation.
/// Used as an oracle for symmetry and cross-checks; not a production path.
pub fn dft_power_full_naive(segment: &[f64], n_fft: usize) -> Vec<f64> {
    (0..n_fft)
        .map(|m| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (l, &x) in segment.iter().enumerate() {
                let theta = -2.0 * PI * (l as f64) * (m as f64) / n_fft as f64;
                re += x * theta.cos();
                im += x * theta.sin();
            }
            re * re + im * im
        })
        .collect()
}
