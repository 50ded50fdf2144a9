//! Experiment drivers: the paper-style STFT parameter presets, the seeded
//! synthetic localization studies, and the per-file speech evaluation.
//!
//! Cost patterns depend only on the STFT parameters, so each experiment
//! builds them once and shares them across signals; signals are processed in
//! parallel with per-signal sub-seeded generators and collected in index
//! order, making outputs independent of the thread count.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::cost::{build_structured_freq, build_structured_time, SharedCost};
use crate::error::{Error, Result};
use crate::fusion::{fuse_multi, geometric_mean_fusion, FuseOutcome};
use crate::metrics::{error_freq, error_harmonic, error_joint, error_time, PitchTrack};
use crate::overlap::OverlapContext;
use crate::stft::{frame_count, freq_axis, spectrogram, time_axis, StftParams};
use crate::synthgen::{gen_mixture, gen_packet, render, signal_rng, PacketSpec, SynthConfig};
use crate::tf_core::{Spectrogram, TFSupport};
use crate::uot::UotConfig;

/// STFT parameters for one long-window/short-window input pair, plus the
/// common fine grid used by the same-grid comparators.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPreset {
    pub sample_rate: f64,
    /// Long window (high frequency resolution) input.
    pub long: StftParams,
    pub long_bins: usize,
    /// Short window (high temporal resolution) input.
    pub short: StftParams,
    pub short_bins: usize,
    /// Long/short windows on the common fine grid.
    pub grid_long: StftParams,
    pub grid_short: StftParams,
    pub grid_bins: usize,
    /// Marginal relaxation parameter for all four KL penalties.
    pub eta: f64,
    /// Relative objective-decrease tolerance.
    pub tol: f64,
}

impl PairPreset {
    pub fn uot_config(&self) -> UotConfig {
        UotConfig::uniform(2, self.eta).with_tol(self.tol)
    }

    /// Spacing of the fine frequency grid in Hz.
    pub fn grid_spacing_hz(&self) -> f64 {
        self.sample_rate / 2.0 / (self.grid_bins - 1) as f64
    }
}

/// Single sinusoidal packets at 1 kHz: 100 ms / 20 ms windows, 2 Hz and 2 ms
/// target spacings, eta = 10, tol = 1e-6.
pub fn synthetic_preset() -> PairPreset {
    let fs = 1000.0;
    PairPreset {
        sample_rate: fs,
        long: StftParams::with_spacing(100, 25, fs, 2.0).unwrap(),
        long_bins: 257,
        short: StftParams::complete(20, 2, fs).unwrap(),
        short_bins: 11,
        grid_long: StftParams::with_spacing(100, 2, fs, 2.0).unwrap(),
        grid_short: StftParams::with_spacing(20, 2, fs, 2.0).unwrap(),
        grid_bins: 257,
        eta: 10.0,
        tol: 1e-6,
    }
}

/// Speech at 8 kHz: 100 ms / 20 ms windows, 8 Hz and 5 ms target spacings,
/// eta = 1, tol = 5e-7.
pub fn speech_preset() -> PairPreset {
    let fs = 8000.0;
    PairPreset {
        sample_rate: fs,
        long: StftParams::with_spacing(800, 200, fs, 8.0).unwrap(),
        long_bins: 513,
        short: StftParams::complete(160, 40, fs).unwrap(),
        short_bins: 81,
        grid_long: StftParams::with_spacing(800, 40, fs, 8.0).unwrap(),
        grid_short: StftParams::with_spacing(160, 40, fs, 8.0).unwrap(),
        grid_bins: 513,
        eta: 1.0,
        tol: 5e-7,
    }
}

/// Bass-guitar notes at 2 kHz: 200 ms / 30 ms windows, hop of half the
/// window, complete sampling.
pub fn bass_preset() -> PairPreset {
    let fs = 2000.0;
    PairPreset {
        sample_rate: fs,
        long: StftParams::complete(400, 200, fs).unwrap(),
        long_bins: 201,
        short: StftParams::complete(60, 30, fs).unwrap(),
        short_bins: 31,
        grid_long: StftParams::new(400, 30, 400, fs).unwrap(),
        grid_short: StftParams::new(60, 30, 400, fs).unwrap(),
        grid_bins: 201,
        eta: 10.0,
        tol: 1e-6,
    }
}

/// Mel-target speech at 22.05 kHz (window lengths rounded to even sample
/// counts), eta = 1, tol = 5e-7.
pub fn mel_speech_preset() -> PairPreset {
    let fs = 22050.0;
    PairPreset {
        sample_rate: fs,
        long: StftParams::with_spacing(2206, 551, fs, 8.0).unwrap(),
        long_bins: 2049,
        short: StftParams::complete(442, 110, fs).unwrap(),
        short_bins: 222,
        grid_long: StftParams::with_spacing(2206, 110, fs, 8.0).unwrap(),
        grid_short: StftParams::with_spacing(442, 110, fs, 8.0).unwrap(),
        grid_bins: 2049,
        eta: 1.0,
        tol: 5e-7,
    }
}

/// Shared immutable state of a fusion setting: target support and both cost
/// patterns, reusable across all signals with the same STFT parameters.
pub struct FusionSetting {
    pub target: TFSupport,
    pub costs: Vec<SharedCost>,
    pub uot: UotConfig,
}

impl FusionSetting {
    /// Canonical different-grid setting for signals of `signal_len` samples.
    pub fn different_grid(
        preset: &PairPreset,
        signal_len: usize,
        overlap: bool,
        uot: UotConfig,
    ) -> Result<FusionSetting> {
        let src1 = support_for(&preset.long, preset.long_bins, signal_len)?;
        let src2 = support_for(&preset.short, preset.short_bins, signal_len)?;
        let target = TFSupport::new(src1.freqs().to_vec(), src2.times().to_vec())?;
        let ctx = OverlapContext::new(
            preset.long.window_len_s(),
            preset.short.window_len_s(),
            preset.long.hop,
            preset.short.hop,
            preset.sample_rate,
            preset.long_bins,
            preset.short_bins,
        )?;
        let c1 = build_structured_freq(&src1, &target, &ctx, overlap)?;
        let c2 = build_structured_time(&src2, &target, &ctx, overlap)?;
        Ok(FusionSetting {
            target,
            costs: vec![Arc::new(c1), Arc::new(c2)],
            uot,
        })
    }

    /// Same-grid setting on the common fine grid.
    pub fn same_grid(
        preset: &PairPreset,
        signal_len: usize,
        overlap: bool,
        uot: UotConfig,
    ) -> Result<FusionSetting> {
        let target = support_for(&preset.grid_long, preset.grid_bins, signal_len)?;
        let ctx = OverlapContext::new(
            preset.grid_long.window_len_s(),
            preset.grid_short.window_len_s(),
            preset.grid_long.hop,
            preset.grid_short.hop,
            preset.sample_rate,
            preset.grid_bins,
            preset.grid_bins,
        )?;
        let c1 = build_structured_freq(&target, &target, &ctx, overlap)?;
        let c2 = build_structured_time(&target, &target, &ctx, overlap)?;
        Ok(FusionSetting {
            target,
            costs: vec![Arc::new(c1), Arc::new(c2)],
            uot,
        })
    }

    pub fn nnz(&self) -> (usize, usize) {
        (self.costs[0].nnz(), self.costs[1].nnz())
    }

    /// Solves the barycenter for one input pair, returning the outcome and
    /// the solve wall time in seconds.
    pub fn fuse_timed(&self, a: &Spectrogram, b: &Spectrogram) -> Result<(FuseOutcome, f64)> {
        let start = Instant::now();
        let outcome = fuse_multi(&[a, b], &self.costs, &self.target, &self.uot)?;
        Ok((outcome, start.elapsed().as_secs_f64()))
    }
}

/// Support of a spectrogram computed with `params` on a signal of
/// `signal_len` samples, without touching any signal data.
pub fn support_for(params: &StftParams, bins: usize, signal_len: usize) -> Result<TFSupport> {
    let n = frame_count(signal_len, params.hop)?;
    TFSupport::new(freq_axis(bins, params.sample_rate)?, time_axis(params, n))
}

/// How packets are drawn per signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PacketDraw {
    Single,
    Mixture { k_min: usize, k_max: usize },
}

#[derive(Debug, Clone)]
pub struct SynthExperimentConfig {
    pub synth: SynthConfig,
    pub draw: PacketDraw,
    pub preset: PairPreset,
    pub max_iter: usize,
    pub overlap: bool,
    /// Also compute the expensive same-grid barycenter.
    pub with_same_grid_fusion: bool,
    /// Frequency-tolerance curve: steps of the fine grid spacing, 0..=steps.
    pub delta_f_steps: usize,
    /// Time-tolerance curve: steps of the target hop, 0..=steps.
    pub delta_t_steps: usize,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
}

impl SynthExperimentConfig {
    pub fn single_packet(n_signals: usize, seed: u64) -> Self {
        SynthExperimentConfig {
            synth: SynthConfig {
                n_signals,
                seed,
                ..SynthConfig::default()
            },
            draw: PacketDraw::Single,
            preset: synthetic_preset(),
            max_iter: 100_000,
            overlap: true,
            with_same_grid_fusion: true,
            delta_f_steps: 25,
            delta_t_steps: 3,
            threads: 0,
        }
    }

    pub fn mixture(n_signals: usize, seed: u64, k_min: usize, k_max: usize) -> Self {
        SynthExperimentConfig {
            draw: PacketDraw::Mixture { k_min, k_max },
            with_same_grid_fusion: false,
            ..SynthExperimentConfig::single_packet(n_signals, seed)
        }
    }
}

/// Per-spectrogram metrics of one signal.
#[derive(Debug, Clone)]
pub struct ComparatorMetrics {
    pub name: &'static str,
    /// Temporal concentration error per hop step (single-packet runs).
    pub e_time: Vec<f64>,
    /// Frequency concentration error per grid step (single-packet runs).
    pub e_freq: Vec<f64>,
    /// Joint concentration error per grid step at zero time tolerance
    /// (mixture runs).
    pub e_joint: Vec<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub seconds: Option<f64>,
    /// Final objective value of the solve.
    pub objective: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SignalRecord {
    pub index: usize,
    pub packets: Vec<PacketSpec>,
    pub comparators: Vec<ComparatorMetrics>,
}

#[derive(Debug, Clone)]
pub struct SynthExperimentOutput {
    /// Frequency tolerances of the curves, in Hz.
    pub delta_f_grid_hz: Vec<f64>,
    /// Time tolerances of the curves, in seconds.
    pub delta_t_grid_s: Vec<f64>,
    pub signals: Vec<SignalRecord>,
    pub nnz_different_grid: (usize, usize),
    pub nnz_same_grid: Option<(usize, usize)>,
    /// (rows of input 1, rows of input 2, target size) per setting.
    pub sizes_different_grid: (usize, usize, usize),
    pub sizes_same_grid: Option<(usize, usize, usize)>,
}

impl SynthExperimentOutput {
    /// Per-signal values of one metric for one comparator name.
    pub fn values<F>(&self, name: &str, select: F) -> Vec<f64>
    where
        F: Fn(&ComparatorMetrics) -> Option<f64>,
    {
        self.signals
            .iter()
            .filter_map(|s| s.comparators.iter().find(|c| c.name == name).and_then(&select))
            .collect()
    }

    /// Strict-regime temporal error (zero tolerance).
    pub fn e_time_strict(&self, name: &str) -> Vec<f64> {
        self.e_time_at(name, 0)
    }

    pub fn e_time_at(&self, name: &str, step: usize) -> Vec<f64> {
        self.values(name, |c| c.e_time.get(step).copied())
    }

    pub fn e_freq_at(&self, name: &str, step: usize) -> Vec<f64> {
        self.values(name, |c| c.e_freq.get(step).copied())
    }

    pub fn e_joint_at(&self, name: &str, step: usize) -> Vec<f64> {
        self.values(name, |c| c.e_joint.get(step).copied())
    }

    pub fn iterations(&self, name: &str) -> Vec<f64> {
        self.values(name, |c| c.iterations.map(|i| i as f64))
    }

    pub fn seconds(&self, name: &str) -> Vec<f64> {
        self.values(name, |c| c.seconds)
    }

    pub fn objectives(&self, name: &str) -> Vec<f64> {
        self.values(name, |c| c.objective)
    }
}

/// Comparator names used in records and CSV output: the raw inputs `X1`/`X2`,
/// their fine-grid versions `X1p`/`X2p`, the geometric mean `XG`, the
/// different-grid barycenter `X`, and the same-grid barycenter `Xp`.
pub const COMPARATORS: [&str; 7] = ["X1", "X2", "X1p", "X2p", "XG", "X", "Xp"];

fn run_in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        job()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(job)
    }
}

/// Runs the seeded synthetic localization study.
pub fn run_synth_experiment(cfg: &SynthExperimentConfig) -> Result<SynthExperimentOutput> {
    cfg.synth.validate()?;
    let preset = &cfg.preset;
    let signal_len = cfg.synth.n_samples();
    let uot = UotConfig::uniform(2, preset.eta)
        .with_tol(preset.tol)
        .with_max_iter(cfg.max_iter);
    let different = FusionSetting::different_grid(preset, signal_len, cfg.overlap, uot.clone())?;
    let same = if cfg.with_same_grid_fusion {
        Some(FusionSetting::same_grid(preset, signal_len, cfg.overlap, uot)?)
    } else {
        None
    };
    let spacing = preset.grid_spacing_hz();
    let delta_f_grid_hz: Vec<f64> = (0..=cfg.delta_f_steps).map(|j| j as f64 * spacing).collect();
    let hop_s = preset.grid_short.hop as f64 / preset.sample_rate;
    let delta_t_grid_s: Vec<f64> = (0..=cfg.delta_t_steps).map(|j| j as f64 * hop_s).collect();

    let signals = run_in_pool(cfg.threads, || {
        (0..cfg.synth.n_signals)
            .into_par_iter()
            .map(|i| {
                process_signal(i, cfg, &different, same.as_ref(), &delta_f_grid_hz, &delta_t_grid_s)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let sizes = |f: &FusionSetting| (f.costs[0].n_rows(), f.costs[1].n_rows(), f.target.len());
    Ok(SynthExperimentOutput {
        delta_f_grid_hz,
        delta_t_grid_s,
        signals,
        nnz_different_grid: different.nnz(),
        nnz_same_grid: same.as_ref().map(|s| s.nnz()),
        sizes_different_grid: sizes(&different),
        sizes_same_grid: same.as_ref().map(sizes),
    })
}

fn process_signal(
    index: usize,
    cfg: &SynthExperimentConfig,
    different: &FusionSetting,
    same: Option<&FusionSetting>,
    deltas_f: &[f64],
    deltas_t: &[f64],
) -> Result<SignalRecord> {
    let mut rng = signal_rng(cfg.synth.seed, index as u64);
    let packets = match cfg.draw {
        PacketDraw::Single => vec![gen_packet(&mut rng, &cfg.synth)],
        PacketDraw::Mixture { k_min, k_max } => gen_mixture(&mut rng, &cfg.synth, (k_min, k_max))?,
    };
    let y = render(&packets, &cfg.synth);
    let preset = &cfg.preset;

    let x1 = spectrogram(&y, &preset.long, preset.long_bins)?;
    let x2 = spectrogram(&y, &preset.short, preset.short_bins)?;
    let x1p = spectrogram(&y, &preset.grid_long, preset.grid_bins)?;
    let x2p = spectrogram(&y, &preset.grid_short, preset.grid_bins)?;
    let xg = geometric_mean_fusion(&x1p, &x2p)?;
    let (fused, fused_s) = different.fuse_timed(&x1, &x2)?;

    let mut comparators = Vec::with_capacity(7);
    let single = matches!(cfg.draw, PacketDraw::Single);
    let mut push = |name: &'static str,
                    spec: &Spectrogram,
                    solver: Option<(usize, bool, f64, f64)>|
     -> Result<()> {
        let e_time = if single {
            deltas_t
                .iter()
                .map(|&d| error_time(spec, packets[0].onset, packets[0].offset, d))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let e_freq = if single {
            deltas_f
                .iter()
                .map(|&d| error_freq(spec, packets[0].freq, d))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let e_joint = if single {
            Vec::new()
        } else {
            deltas_f
                .iter()
                .map(|&d| error_joint(spec, &packets, d, 0.0))
                .collect::<Result<Vec<_>>>()?
        };
        comparators.push(ComparatorMetrics {
            name,
            e_time,
            e_freq,
            e_joint,
            iterations: solver.map(|s| s.0),
            converged: solver.map(|s| s.1),
            seconds: solver.map(|s| s.2),
            objective: solver.map(|s| s.3),
        });
        Ok(())
    };

    push("X1", &x1, None)?;
    push("X2", &x2, None)?;
    push("X1p", &x1p, None)?;
    push("X2p", &x2p, None)?;
    push("XG", &xg, None)?;
    push(
        "X",
        &fused.spectrogram,
        Some((fused.iterations, fused.converged, fused_s, fused.final_objective)),
    )?;
    if let Some(same) = same {
        let (fused_same, same_s) = same.fuse_timed(&x1p, &x2p)?;
        push(
            "Xp",
            &fused_same.spectrogram,
            Some((
                fused_same.iterations,
                fused_same.converged,
                same_s,
                fused_same.final_objective,
            )),
        )?;
    }

    Ok(SignalRecord {
        index,
        packets,
        comparators,
    })
}

/// Per-spectrogram harmonic-concentration results for one speech file.
#[derive(Debug, Clone)]
pub struct SpeechComparator {
    pub name: &'static str,
    /// Harmonic concentration error per frequency-tolerance step.
    pub e_harmonic: Vec<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SpeechFileOutput {
    pub delta_f_grid_hz: Vec<f64>,
    pub comparators: Vec<SpeechComparator>,
    pub voiced_frames: usize,
    pub nnz_different_grid: (usize, usize),
    pub nnz_same_grid: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct SpeechRunConfig {
    pub preset: PairPreset,
    pub max_iter: usize,
    pub overlap: bool,
    pub with_same_grid_fusion: bool,
    pub delta_f_steps: usize,
}

impl Default for SpeechRunConfig {
    fn default() -> Self {
        SpeechRunConfig {
            preset: speech_preset(),
            max_iter: 100_000,
            overlap: true,
            with_same_grid_fusion: false,
            delta_f_steps: 25,
        }
    }
}

/// Evaluates harmonic energy concentration for one speech signal with its
/// pitch track: fine-grid inputs, geometric mean, different-grid barycenter,
/// and optionally the same-grid barycenter.
pub fn run_speech_file(
    signal: &[f64],
    track: &PitchTrack,
    cfg: &SpeechRunConfig,
) -> Result<SpeechFileOutput> {
    if track.voiced_count() == 0 {
        return Err(Error::Domain(
            "pitch track has no voiced frames".into(),
        ));
    }
    let preset = &cfg.preset;
    let uot = preset.uot_config().with_max_iter(cfg.max_iter);
    let different = FusionSetting::different_grid(preset, signal.len(), cfg.overlap, uot.clone())?;
    let same = if cfg.with_same_grid_fusion {
        Some(FusionSetting::same_grid(preset, signal.len(), cfg.overlap, uot)?)
    } else {
        None
    };

    let x1 = spectrogram(signal, &preset.long, preset.long_bins)?;
    let x2 = spectrogram(signal, &preset.short, preset.short_bins)?;
    let x1p = spectrogram(signal, &preset.grid_long, preset.grid_bins)?;
    let x2p = spectrogram(signal, &preset.grid_short, preset.grid_bins)?;
    let xg = geometric_mean_fusion(&x1p, &x2p)?;
    let (fused, fused_s) = different.fuse_timed(&x1, &x2)?;

    let spacing = preset.grid_spacing_hz();
    let delta_f_grid_hz: Vec<f64> = (0..=cfg.delta_f_steps).map(|j| j as f64 * spacing).collect();
    let curve = |spec: &Spectrogram| -> Result<Vec<f64>> {
        delta_f_grid_hz
            .iter()
            .map(|&d| error_harmonic(spec, track, d))
            .collect()
    };

    let mut comparators = vec![
        SpeechComparator {
            name: "X1p",
            e_harmonic: curve(&x1p)?,
            iterations: None,
            converged: None,
            seconds: None,
        },
        SpeechComparator {
            name: "X2p",
            e_harmonic: curve(&x2p)?,
            iterations: None,
            converged: None,
            seconds: None,
        },
        SpeechComparator {
            name: "XG",
            e_harmonic: curve(&xg)?,
            iterations: None,
            converged: None,
            seconds: None,
        },
        SpeechComparator {
            name: "X",
            e_harmonic: curve(&fused.spectrogram)?,
            iterations: Some(fused.iterations),
            converged: Some(fused.converged),
            seconds: Some(fused_s),
        },
    ];
    let nnz_same_grid = same.as_ref().map(|s| s.nnz());
    if let Some(same) = same {
        let (fused_same, same_s) = same.fuse_timed(&x1p, &x2p)?;
        comparators.push(SpeechComparator {
            name: "Xp",
            e_harmonic: curve(&fused_same.spectrogram)?,
            iterations: Some(fused_same.iterations),
            converged: Some(fused_same.converged),
            seconds: Some(same_s),
        });
    }

    Ok(SpeechFileOutput {
        delta_f_grid_hz,
        comparators,
        voiced_frames: track.voiced_count(),
        nnz_different_grid: different.nnz(),
        nnz_same_grid,
    })
}
