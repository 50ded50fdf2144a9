//! Core time-frequency domain types: grids, spectrograms and their measure view.
//!
//! A spectrogram is an `M x N` nonnegative energy matrix bound to a grid of
//! `M` frequencies and `N` time frames. Vectorization is column-wise and
//! grid indices in the public index helpers are 1-based, matching the
//! convention used everywhere in this crate's documentation and error
//! messages. Internal storage is 0-based and column-major.

use crate::error::{Error, Result};

/// An ordered time-frequency grid: strictly increasing frequency and time axes.
#[derive(Debug, Clone, PartialEq)]
pub struct TFSupport {
    freqs: Vec<f64>,
    times: Vec<f64>,
}

impl TFSupport {
    /// Builds a support from explicit axes.
    ///
    /// Both axes must be strictly increasing with at least two points each
    /// (normalized-coordinate costs divide by `M-1` and `N-1`), frequencies
    /// and times must be nonnegative.
    pub fn new(freqs: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if freqs.len() < 2 || times.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "support needs at least 2 points per axis, got {} freqs and {} times",
                freqs.len(),
                times.len()
            )));
        }
        if freqs[0] < 0.0 || times[0] < 0.0 {
            return Err(Error::InvalidArgument(
                "axes must start at a nonnegative value".into(),
            ));
        }
        for axis in [&freqs, &times] {
            if axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("axis values must be finite".into()));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(
                    "axes must be strictly increasing".into(),
                ));
            }
        }
        Ok(TFSupport { freqs, times })
    }

    /// Number of frequency bins `M`.
    pub fn n_freqs(&self) -> usize {
        self.freqs.len()
    }

    /// Number of time frames `N`.
    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    /// Total number of grid points `M * N`.
    pub fn len(&self) -> usize {
        self.freqs.len() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor guarantees at least 2x2
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Column-wise vectorization index: `(m, n) -> (n-1)*M + m`, all 1-based.
///
/// Bijective from `{1..M} x {1..N}` onto `{1..M*N}`.
pub fn index_map(m: usize, n: usize, m_count: usize) -> Result<usize> {
    if m < 1 || m > m_count {
        return Err(Error::InvalidArgument(format!(
            "frequency index {m} out of range 1..={m_count}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("time index must be >= 1".into()));
    }
    Ok((n - 1) * m_count + m)
}

/// Inverse of [`index_map`]: 1-based linear index back to 1-based `(m, n)`.
pub fn index_unmap(i: usize, m_count: usize) -> Result<(usize, usize)> {
    if i < 1 {
        return Err(Error::InvalidArgument("linear index must be >= 1".into()));
    }
    let m = (i - 1) % m_count + 1;
    let n = (i - 1) / m_count + 1;
    Ok((m, n))
}

/// A nonnegative energy matrix on a [`TFSupport`], with STFT provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    support: TFSupport,
    /// Column-major `M x N` values; entry `(m, n)` (0-based) lives at `n*M + m`.
    values: Vec<f64>,
    /// Analysis window length in seconds.
    window_len: f64,
    /// Hop size in samples.
    hop: u32,
    /// Sample rate in Hz.
    sample_rate: f64,
}

impl Spectrogram {
    /// Wraps column-major values on a support; checks shape and nonnegativity.
    pub fn new(
        support: TFSupport,
        values: Vec<f64>,
        window_len: f64,
        hop: u32,
        sample_rate: f64,
    ) -> Result<Self> {
        if values.len() != support.len() {
            return Err(Error::InvalidArgument(format!(
                "value count {} does not match {}x{} support",
                values.len(),
                support.n_freqs(),
                support.n_times()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(
                "spectrogram values must be finite and nonnegative".into(),
            ));
        }
        if !(window_len > 0.0) || hop == 0 || !(sample_rate > 0.0) {
            return Err(Error::InvalidArgument(
                "window length, hop and sample rate must be positive".into(),
            ));
        }
        Ok(Spectrogram {
            support,
            values,
            window_len,
            hop,
            sample_rate,
        })
    }

    pub fn support(&self) -> &TFSupport {
        &self.support
    }

    /// Column-major values, same layout as the measure-view weights.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry at 0-based `(row m, column n)`.
    pub fn value(&self, m: usize, n: usize) -> f64 {
        self.values[n * self.support.n_freqs() + m]
    }

    pub fn n_freqs(&self) -> usize {
        self.support.n_freqs()
    }

    pub fn n_times(&self) -> usize {
        self.support.n_times()
    }

    /// Window length in seconds.
    pub fn window_len(&self) -> f64 {
        self.window_len
    }

    /// Hop size in samples.
    pub fn hop(&self) -> u32 {
        self.hop
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Total energy.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Returns a copy with every value multiplied by `s >= 0`.
    pub fn scaled(&self, s: f64) -> Result<Spectrogram> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain("scale factor must be finite and >= 0".into()));
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        Ok(out)
    }
}

/// A spectrogram flattened to a weight vector over its support points.
///
/// `weights[index_map(m, n, M) - 1]` equals the spectrogram entry `(m, n)`;
/// since storage is already column-major the two layouts coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureView {
    weights: Vec<f64>,
    support: TFSupport,
}

impl MeasureView {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> &TFSupport {
        &self.support
    }

    /// Total mass.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Interprets a spectrogram as a nonnegative discrete measure on its grid.
pub fn to_measure(spec: &Spectrogram) -> MeasureView {
    MeasureView {
        weights: spec.values.clone(),
        support: spec.support.clone(),
    }
}

/// Rescales a measure to unit mass. Zero-mass input is undefined.
pub fn normalize(view: &MeasureView) -> Result<MeasureView> {
    let mass = view.mass();
    if !(mass > 0.0) {
        return Err(Error::Domain(
            "cannot normalize a measure with zero total mass".into(),
        ));
    }
    let weights = view.weights.iter().map(|w| w / mass).collect();
    Ok(MeasureView {
        weights,
        support: view.support.clone(),
    })
}
