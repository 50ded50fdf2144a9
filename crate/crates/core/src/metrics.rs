//! Localization metrics: energy-concentration errors in frequency, time,
//! jointly over packet boxes, and over harmonic supports of voiced speech.
//!
//! Every metric is a ratio of energies, so it lies in `[0, 1]`, is invariant
//! to global rescaling of the spectrogram, and is non-increasing in its
//! tolerance parameters. Tolerance intervals are closed.

use crate::error::{Error, Result};
use crate::synthgen::PacketSpec;
use crate::tf_core::Spectrogram;

/// Joint tolerance box: frequency half-width in Hz, time half-width in s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceBox {
    pub delta_f: f64,
    pub delta_t: f64,
}

impl ToleranceBox {
    pub fn new(delta_f: f64, delta_t: f64) -> Result<Self> {
        if !(delta_f >= 0.0) || !(delta_t >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be >= 0".into()));
        }
        Ok(ToleranceBox { delta_f, delta_t })
    }
}

/// A fundamental-frequency track: `f0 = 0` marks unvoiced frames.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    pub frame_times: Vec<f64>,
    pub f0: Vec<f64>,
}

impl PitchTrack {
    pub fn new(frame_times: Vec<f64>, f0: Vec<f64>) -> Result<Self> {
        if frame_times.len() != f0.len() {
            return Err(Error::InvalidArgument(
                "pitch track times and values must have equal length".into(),
            ));
        }
        if frame_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "pitch track times must be strictly increasing".into(),
            ));
        }
        if f0.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "f0 values must be finite and nonnegative".into(),
            ));
        }
        Ok(PitchTrack { frame_times, f0 })
    }

    pub fn voiced_mask(&self) -> Vec<bool> {
        self.f0.iter().map(|&f| f > 0.0).collect()
    }

    pub fn voiced_count(&self) -> usize {
        self.f0.iter().filter(|&&f| f > 0.0).count()
    }

    pub fn len(&self) -> usize {
        self.f0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0.is_empty()
    }
}

fn nearest(x: f64, axis: &[f64]) -> f64 {
    debug_assert!(!axis.is_empty());
    let i = axis.partition_point(|&v| v < x);
    if i == 0 {
        return axis[0];
    }
    if i == axis.len() {
        return axis[axis.len() - 1];
    }
    let (lo, hi) = (axis[i - 1], axis[i]);
    // ties select the smaller grid value
    if x - lo <= hi - x {
        lo
    } else {
        hi
    }
}

/// Nearest grid frequency to `f`; ties pick the smaller one.
pub fn nearest_freq(f: f64, axis: &[f64]) -> f64 {
    nearest(f, axis)
}

/// Nearest grid time to `t`; ties pick the smaller one.
pub fn nearest_time(t: f64, axis: &[f64]) -> f64 {
    nearest(t, axis)
}

fn total_mass(spec: &Spectrogram) -> Result<f64> {
    let mass = spec.mass();
    if !(mass > 0.0) {
        return Err(Error::Domain(
            "concentration error is undefined for a zero-mass spectrogram".into(),
        ));
    }
    Ok(mass)
}

/// Fraction of energy at rows outside
/// `[P_F(f_star) - delta_f, P_F(f_star) + delta_f]`.
pub fn error_freq(spec: &Spectrogram, f_star: f64, delta_f: f64) -> Result<f64> {
    let mass = total_mass(spec)?;
    let center = nearest_freq(f_star, spec.support().freqs());
    let (m_count, n_count) = (spec.n_freqs(), spec.n_times());
    let mut outside = 0.0;
    for (m, &fm) in spec.support().freqs().iter().enumerate() {
        if (fm - center).abs() > delta_f {
            for n in 0..n_count {
                outside += spec.values()[n * m_count + m];
            }
        }
    }
    Ok(outside / mass)
}

/// Fraction of energy at columns outside
/// `[P_T(t_on) - delta_t, P_T(t_off) + delta_t]`.
pub fn error_time(spec: &Spectrogram, t_on: f64, t_off: f64, delta_t: f64) -> Result<f64> {
    let mass = total_mass(spec)?;
    let times = spec.support().times();
    let lo = nearest_time(t_on, times) - delta_t;
    let hi = nearest_time(t_off, times) + delta_t;
    let m_count = spec.n_freqs();
    let mut outside = 0.0;
    for (n, &tn) in times.iter().enumerate() {
        if tn < lo || tn > hi {
            outside += spec.values()[n * m_count..(n + 1) * m_count].iter().sum::<f64>();
        }
    }
    Ok(outside / mass)
}

/// Fraction of energy outside the union of enlarged packet boxes
/// `I_df(f_k) x I_dt(t_on_k, t_off_k)`.
pub fn error_joint(
    spec: &Spectrogram,
    packets: &[PacketSpec],
    delta_f: f64,
    delta_t: f64,
) -> Result<f64> {
    if packets.is_empty() {
        return Err(Error::InvalidArgument(
            "joint error needs at least one packet".into(),
        ));
    }
    let mass = total_mass(spec)?;
    let freqs = spec.support().freqs();
    let times = spec.support().times();
    let boxes: Vec<(f64, f64, f64, f64)> = packets
        .iter()
        .map(|p| {
            let fc = nearest_freq(p.freq, freqs);
            let t_lo = nearest_time(p.onset, times) - delta_t;
            let t_hi = nearest_time(p.offset, times) + delta_t;
            (fc - delta_f, fc + delta_f, t_lo, t_hi)
        })
        .collect();
    let m_count = spec.n_freqs();
    let mut outside = 0.0;
    for (n, &tn) in times.iter().enumerate() {
        // packets whose time interval contains this column
        let active: Vec<&(f64, f64, f64, f64)> = boxes
            .iter()
            .filter(|b| tn >= b.2 && tn <= b.3)
            .collect();
        for (m, &fm) in freqs.iter().enumerate() {
            if !active.iter().any(|b| fm >= b.0 && fm <= b.1) {
                outside += spec.values()[n * m_count + m];
            }
        }
    }
    Ok(outside / mass)
}

/// Row indices (0-based into `axis`) of the enlarged harmonic support:
/// bins within `delta_f` of the projection of some harmonic `k f0 <= f_s/2`.
pub fn harmonic_support(f0: f64, axis: &[f64], sample_rate: f64, delta_f: f64) -> Result<Vec<usize>> {
    if !(f0 > 0.0) {
        return Err(Error::Domain(format!(
            "harmonic support needs a positive fundamental, got {f0}"
        )));
    }
    let k_max = (sample_rate / 2.0 / f0).floor() as usize;
    let mut member = vec![false; axis.len()];
    for k in 1..=k_max {
        let center = nearest_freq(k as f64 * f0, axis);
        for (m, &fm) in axis.iter().enumerate() {
            if (fm - center).abs() <= delta_f {
                member[m] = true;
            }
        }
    }
    Ok(member
        .iter()
        .enumerate()
        .filter_map(|(m, &v)| v.then_some(m))
        .collect())
}

/// Largest harmonic index with `k f0 <= f_s / 2`.
pub fn max_harmonic(f0: f64, sample_rate: f64) -> usize {
    (sample_rate / 2.0 / f0).floor() as usize
}

/// Harmonic energy-concentration error over voiced frames.
///
/// Track frames map to spectrogram columns by nearest time; when several
/// frames land on one column the closest frame wins. A column is voiced iff
/// its winning frame has `f0 > 0`; the error is the voiced-column energy
/// lying outside the per-column enlarged harmonic support, relative to all
/// voiced-column energy.
pub fn error_harmonic(spec: &Spectrogram, track: &PitchTrack, delta_f: f64) -> Result<f64> {
    let times = spec.support().times();
    let freqs = spec.support().freqs();
    let m_count = spec.n_freqs();

    // winning track frame per column
    let mut winner: Vec<Option<(f64, f64)>> = vec![None; times.len()]; // (distance, f0)
    for (&ft, &f0) in track.frame_times.iter().zip(&track.f0) {
        let n = match times.partition_point(|&v| v < ft) {
            0 => 0,
            i if i == times.len() => times.len() - 1,
            i => {
                if ft - times[i - 1] <= times[i] - ft {
                    i - 1
                } else {
                    i
                }
            }
        };
        let dist = (ft - times[n]).abs();
        match winner[n] {
            Some((best, _)) if best <= dist => {}
            _ => winner[n] = Some((dist, f0)),
        }
    }

    let mut voiced_energy = 0.0;
    let mut outside = 0.0;
    for (n, w) in winner.iter().enumerate() {
        let f0 = match w {
            Some((_, f0)) if *f0 > 0.0 => *f0,
            _ => continue,
        };
        let support = harmonic_support(f0, freqs, spec.sample_rate(), delta_f)?;
        let mut member = vec![false; m_count];
        for &m in &support {
            member[m] = true;
        }
        for m in 0..m_count {
            let v = spec.values()[n * m_count + m];
            voiced_energy += v;
            if !member[m] {
                outside += v;
            }
        }
    }
    if !(voiced_energy > 0.0) {
        return Err(Error::Domain(
            "no voiced energy: harmonic error undefined".into(),
        ));
    }
    Ok(outside / voiced_energy)
}

/// Mean and standard error `SE = s / sqrt(N)` with `s` the sample standard
/// deviation (N-1 denominator).
pub fn experiment_stats(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Domain(
            "standard error needs at least two values".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}
