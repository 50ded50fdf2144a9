//! End-to-end fusion pipelines: canonical different-grid fusion, same-grid
//! fusion, mel-target fusion, the dense-cost mode, and the geometric-mean
//! baseline.

use std::sync::Arc;

use crate::cost::{
    build_dense_cost, build_mel_costs, build_structured_freq, build_structured_time, SharedCost,
    DEFAULT_ENTRY_CAP,
};
use crate::error::{Error, Result};
use crate::melscale::{mel_axis, MelAxisConfig};
use crate::overlap::OverlapContext;
use crate::tf_core::{to_measure, Spectrogram, TFSupport};
use crate::uot::{solve_barycenter, UotConfig};

/// Target-grid and cost-pattern selection for [`fuse`].
#[derive(Debug, Clone, PartialEq)]
pub enum FusionMode {
    /// Target `F_1 x T_2`: frequency axis of the long-window input, time axis
    /// of the short-window one.
    Canonical,
    /// Both inputs and the target share one grid.
    SameGrid,
    /// Target `mel_axis(bands) x T_2`.
    Mel { bands: usize },
    /// Canonical target with fully dense cost matrices (slow; for comparison).
    DenseCost,
}

/// Optional output energy rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rescale {
    /// Keep the solver's output energy (UOT preserves input energy itself).
    None,
    /// Scale the output to the arithmetic mean of the input masses.
    MeanMass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionSpec {
    pub mode: FusionMode,
    /// Restrict transport to overlapping analysis windows (structured modes).
    pub overlap_enabled: bool,
    pub uot: UotConfig,
    pub rescale: Rescale,
    /// Stored-entry cap for [`FusionMode::DenseCost`].
    pub entry_cap: usize,
}

impl Default for FusionSpec {
    fn default() -> Self {
        FusionSpec {
            mode: FusionMode::Canonical,
            overlap_enabled: true,
            uot: UotConfig::default(),
            rescale: Rescale::None,
            entry_cap: DEFAULT_ENTRY_CAP,
        }
    }
}

/// A fused spectrogram plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct FuseOutcome {
    pub spectrogram: Spectrogram,
    pub iterations: usize,
    pub converged: bool,
    /// Last recorded objective value.
    pub final_objective: f64,
    /// Finite-entry count of each cost matrix, input order.
    pub finite_entries: Vec<usize>,
}

/// The canonical super-resolution target: frequencies of the long-window
/// input, times of the short-window input.
pub fn canonical_target(spec1: &Spectrogram, spec2: &Spectrogram) -> Result<TFSupport> {
    TFSupport::new(
        spec1.support().freqs().to_vec(),
        spec2.support().times().to_vec(),
    )
}

fn overlap_context(spec1: &Spectrogram, spec2: &Spectrogram) -> Result<OverlapContext> {
    if spec1.sample_rate() != spec2.sample_rate() {
        return Err(Error::InvalidArgument(format!(
            "inputs have different sample rates ({} vs {})",
            spec1.sample_rate(),
            spec2.sample_rate()
        )));
    }
    OverlapContext::new(
        spec1.window_len(),
        spec2.window_len(),
        spec1.hop() as usize,
        spec2.hop() as usize,
        spec1.sample_rate(),
        spec1.n_freqs(),
        spec2.n_freqs(),
    )
}

/// Fuses a long-window and a short-window spectrogram of the same signal
/// into one spectrogram on the target grid selected by `fspec.mode`.
///
/// Builds the cost matrices, solves the UOT barycenter, and reshapes the
/// barycenter weights onto the target grid. Energy is not rescaled unless
/// `fspec.rescale` says so.
pub fn fuse(spec1: &Spectrogram, spec2: &Spectrogram, fspec: &FusionSpec) -> Result<FuseOutcome> {
    let ctx = overlap_context(spec1, spec2)?;
    let (target, costs): (TFSupport, Vec<SharedCost>) = match &fspec.mode {
        FusionMode::Canonical => {
            let target = canonical_target(spec1, spec2)?;
            let c1 = build_structured_freq(spec1.support(), &target, &ctx, fspec.overlap_enabled)?;
            let c2 = build_structured_time(spec2.support(), &target, &ctx, fspec.overlap_enabled)?;
            (target, vec![Arc::new(c1), Arc::new(c2)])
        }
        FusionMode::SameGrid => {
            if spec1.support() != spec2.support() {
                return Err(Error::AxisMismatch(
                    "same-grid fusion needs inputs on one common support".into(),
                ));
            }
            let target = spec1.support().clone();
            let c1 = build_structured_freq(spec1.support(), &target, &ctx, fspec.overlap_enabled)?;
            let c2 = build_structured_time(spec2.support(), &target, &ctx, fspec.overlap_enabled)?;
            (target, vec![Arc::new(c1), Arc::new(c2)])
        }
        FusionMode::Mel { bands } => {
            let mel = MelAxisConfig::new(*bands, spec1.sample_rate())?;
            let target = TFSupport::new(mel_axis(&mel), spec2.support().times().to_vec())?;
            let (c1, c2) = build_mel_costs(spec1.support(), spec2.support(), &target, &ctx, &mel)?;
            (target, vec![Arc::new(c1), Arc::new(c2)])
        }
        FusionMode::DenseCost => {
            let target = canonical_target(spec1, spec2)?;
            let c1 = build_dense_cost(spec1.support(), &target, fspec.entry_cap)?;
            let c2 = build_dense_cost(spec2.support(), &target, fspec.entry_cap)?;
            (target, vec![Arc::new(c1), Arc::new(c2)])
        }
    };

    let outcome = fuse_multi(&[spec1, spec2], &costs, &target, &fspec.uot)?;
    let out = match fspec.rescale {
        Rescale::None => outcome.spectrogram,
        Rescale::MeanMass => {
            let target_mass = 0.5 * (spec1.mass() + spec2.mass());
            let mass = outcome.spectrogram.mass();
            if mass > 0.0 {
                outcome.spectrogram.scaled(target_mass / mass)?
            } else {
                outcome.spectrogram
            }
        }
    };
    Ok(FuseOutcome {
        spectrogram: out,
        ..outcome
    })
}

/// Entrywise geometric mean `sqrt(X1 . X2)` of two same-support spectrograms.
pub fn geometric_mean_fusion(a: &Spectrogram, b: &Spectrogram) -> Result<Spectrogram> {
    if a.support() != b.support() {
        return Err(Error::AxisMismatch(
            "geometric-mean fusion needs identical supports".into(),
        ));
    }
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x * y).sqrt())
        .collect();
    Spectrogram::new(
        a.support().clone(),
        values,
        a.window_len(),
        a.hop(),
        a.sample_rate(),
    )
}

/// UOT barycenter of `P >= 2` spectrograms with caller-provided cost matrices
/// onto an explicit target support, reshaped to a spectrogram.
///
/// `cfg.lambda` are the barycentric weights; the output inherits the window
/// length of the first input and the hop/sample rate of the last (frequency
/// resolution comes from the long-window input, time resolution from the
/// short-window one).
pub fn fuse_multi(
    specs: &[&Spectrogram],
    costs: &[SharedCost],
    target: &TFSupport,
    cfg: &UotConfig,
) -> Result<FuseOutcome> {
    if specs.len() < 2 {
        return Err(Error::InvalidArgument(
            "barycentric fusion needs at least two inputs".into(),
        ));
    }
    if costs.iter().any(|c| c.n_cols() != target.len()) {
        return Err(Error::InvalidArgument(
            "cost matrices must target the output support".into(),
        ));
    }
    let measures: Vec<_> = specs.iter().map(|s| to_measure(s)).collect();
    let weights: Vec<&[f64]> = measures.iter().map(|m| m.weights()).collect();
    let result = solve_barycenter(&weights, costs, cfg)?;

    let last = specs[specs.len() - 1];
    let spectrogram = Spectrogram::new(
        target.clone(),
        result.weights,
        specs[0].window_len(),
        last.hop(),
        last.sample_rate(),
    )?;
    // loose mass sanity for equal-eta canonical fusions
    debug_assert!(
        spectrogram.mass()
            <= specs
                .iter()
                .map(|s| s.mass())
                .fold(0.0f64, f64::max)
                * std::f64::consts::E
            + 1e-9
    );
    Ok(FuseOutcome {
        spectrogram,
        iterations: result.iterations,
        converged: result.converged,
        final_objective: *result.objective_trace.last().unwrap_or(&f64::NAN),
        finite_entries: costs.iter().map(|c| c.nnz()).collect(),
    })
}
