//! Neighboring-index sets: which target frames/bins physically overlap a
//! given source frame/bin, in closed form.
//!
//! Two analysis frames capture common signal content only if their windows
//! overlap in time; two bins only if their effective (main-lobe) frequency
//! supports overlap. All index sets are contiguous integer ranges, returned
//! 1-based and clamped to the valid target range. Interval endpoints are
//! inclusive; bounds get a small absolute slack before rounding so that
//! membership does not flicker across platforms when a bound lands exactly
//! on an integer.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::melscale::{hz_to_mel, MelAxisConfig};

/// Absolute slack applied to interval bounds before ceil/floor.
pub const BOUNDARY_SLACK: f64 = 1e-9;

/// STFT parameters of an input pair needed by the overlap formulas.
///
/// Convention: `1` is the long-window (high frequency resolution) input whose
/// window also sets the target's effective frequency support, `2` is the
/// short-window input. Hops are in samples, windows in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapContext {
    pub w1: f64,
    pub w2: f64,
    pub h1: usize,
    pub h2: usize,
    pub sample_rate: f64,
    pub m1: usize,
    pub m2: usize,
}

impl OverlapContext {
    pub fn new(
        w1: f64,
        w2: f64,
        h1: usize,
        h2: usize,
        sample_rate: f64,
        m1: usize,
        m2: usize,
    ) -> Result<Self> {
        if !(w1 > 0.0 && w2 > 0.0) {
            return Err(Error::InvalidArgument("window sizes must be positive".into()));
        }
        if h1 == 0 || h2 == 0 {
            return Err(Error::InvalidArgument("hop sizes must be >= 1".into()));
        }
        if m1 < 2 || m2 < 2 {
            return Err(Error::InvalidArgument("bin counts must be >= 2".into()));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        Ok(OverlapContext {
            w1,
            w2,
            h1,
            h2,
            sample_rate,
            m1,
            m2,
        })
    }
}

/// Temporal support of a window of `w` seconds centered at `t`: `[t - w/2, t + w/2]`.
pub fn temporal_support(t: f64, w: f64) -> (f64, f64) {
    (t - w / 2.0, t + w / 2.0)
}

/// Effective (main-lobe) frequency support of the Hann window of `w` seconds
/// centered at `f`: `[f - 2/w, f + 2/w]`.
pub fn freq_support(f: f64, w: f64) -> (f64, f64) {
    (f - 2.0 / w, f + 2.0 / w)
}

fn round_to_range(lo: f64, hi: f64, max_index: usize) -> RangeInclusive<usize> {
    let lo_i = (lo - BOUNDARY_SLACK).ceil().max(1.0) as usize;
    let hi_f = (hi + BOUNDARY_SLACK).floor();
    let hi_i = if hi_f < 1.0 { 0 } else { (hi_f as usize).min(max_index) };
    lo_i..=hi_i // empty when lo_i > hi_i
}

/// Target frames `n` whose `w2`-window overlaps the `w1`-window of source
/// frame `n1` (1-based): integers in
/// `[(n1-1) H1/H2 - f_s (W1+W2) / (2 H2) + 1, (n1-1) H1/H2 + f_s (W1+W2) / (2 H2) + 1]`,
/// clamped to `[1, n_target]`.
pub fn temporal_neighbors(
    n1: usize,
    ctx: &OverlapContext,
    n_target: usize,
) -> RangeInclusive<usize> {
    let center = (n1 - 1) as f64 * ctx.h1 as f64 / ctx.h2 as f64 + 1.0;
    let half_width = ctx.sample_rate * (ctx.w1 + ctx.w2) / (2.0 * ctx.h2 as f64);
    round_to_range(center - half_width, center + half_width, n_target)
}

/// Target bins `m` (on the uniform `[0, f_s/2]` axis with `m_target` bins,
/// effective window `w1`) whose main lobe overlaps that of source bin `m2`
/// of the short-window input: integers in
/// `[(m2-1)(M-1)/(M2-1) - 4(M-1)(1/W1 + 1/W2)/f_s + 1, ... + 1]`,
/// clamped to `[1, m_target]`.
pub fn freq_neighbors(m2: usize, ctx: &OverlapContext, m_target: usize) -> RangeInclusive<usize> {
    let scale = (m_target - 1) as f64;
    let center = (m2 - 1) as f64 * scale / (ctx.m2 - 1) as f64 + 1.0;
    let half_width = 4.0 * scale * (1.0 / ctx.w1 + 1.0 / ctx.w2) / ctx.sample_rate;
    round_to_range(center - half_width, center + half_width, m_target)
}

/// Mel-axis variant: target bins `m` of a mel-spaced axis whose `w1` main
/// lobe overlaps the main lobe of source bin `m_src` (from a uniform axis
/// with `src_bins` bins and window `src_window` seconds).
///
/// In Hz the overlap condition is
/// `|f_src - f_m| <= 2 (1/W1 + 1/W_src)`; the bounds are mapped to mel bin
/// positions through the exact mel transform, so membership agrees with the
/// Hz-domain interval test. When the lower Hz bound is `<= 0` the set starts
/// at bin 1. The long-window variant is obtained with `src_window = W1`.
pub fn mel_freq_neighbors(
    m_src: usize,
    src_bins: usize,
    src_window: f64,
    ctx: &OverlapContext,
    mel: &MelAxisConfig,
) -> RangeInclusive<usize> {
    let f_src = (m_src - 1) as f64 / (src_bins - 1) as f64 * ctx.sample_rate / 2.0;
    let reach = 2.0 * (1.0 / ctx.w1 + 1.0 / src_window);
    let m_r = mel.mel_range();
    let scale = (mel.n_bands - 1) as f64 / m_r;

    let f_lo = f_src - reach;
    let lo = if f_lo <= 0.0 {
        1.0
    } else {
        1.0 + scale * hz_to_mel(f_lo).expect("positive lower bound")
    };
    let f_hi = f_src + reach;
    let hi = 1.0 + scale * hz_to_mel(f_hi).expect("positive upper bound");
    round_to_range(lo, hi, mel.n_bands)
}
