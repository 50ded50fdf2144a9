//! Command-line driver: single-spectrogram computation, fusion, and the
//! synthetic/speech localization experiments, all emitting TFSP and CSV
//! files.
//!
//! Exit codes: 0 success, 2 usage error, 3 solver non-convergence, 4 I/O or
//! file-format error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use specfuse::error::Error;
use specfuse::experiment::{
    bass_preset, run_speech_file, run_synth_experiment, speech_preset, synthetic_preset,
    PacketDraw, PairPreset, SpeechRunConfig, SynthExperimentConfig, SynthExperimentOutput,
};
use specfuse::fusion::{fuse, FusionMode, FusionSpec, Rescale};
use specfuse::io::{
    decimate, parse_pitch_track, read_spectrogram, read_wav, write_results_csv, write_spectrogram,
    CsvField,
};
use specfuse::metrics::experiment_stats;
use specfuse::stft::{spectrogram, StftParams};
use specfuse::synthgen::SynthConfig;
use specfuse::uot::UotConfig;

const EXIT_USAGE: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "specfuse",
    about = "Super-resolution spectrogram fusion via sparse unbalanced optimal transport",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one spectrogram from a WAV file and write it as TFSP.
    Stft(StftArgs),
    /// Fuse two TFSP spectrograms into a super-resolution TFSP.
    Fuse(FuseArgs),
    /// Run the seeded synthetic packet localization study.
    SynthExperiment(SynthArgs),
    /// Evaluate harmonic concentration on a directory of speech files.
    SpeechExperiment(SpeechArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Synthetic,
    Speech,
    Bass,
}

impl Preset {
    fn pair(self) -> PairPreset {
        match self {
            Preset::Synthetic => synthetic_preset(),
            Preset::Speech => speech_preset(),
            Preset::Bass => bass_preset(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Role {
    /// Long analysis window (high frequency resolution).
    Long,
    /// Short analysis window (high temporal resolution).
    Short,
}

#[derive(Args)]
struct StftArgs {
    /// Input WAV file (PCM 8/16/24-bit or float32).
    #[arg(long)]
    input: PathBuf,
    /// Output TFSP file.
    #[arg(long)]
    output: PathBuf,
    /// Analysis window length in milliseconds.
    #[arg(long, conflicts_with = "preset")]
    window_ms: Option<f64>,
    /// Hop size in milliseconds.
    #[arg(long, conflicts_with = "preset")]
    hop_ms: Option<f64>,
    /// Zero-pad the DFT until the bin spacing is at most this many Hz.
    #[arg(long, conflicts_with_all = ["complete_sampling", "preset"])]
    freq_spacing_hz: Option<f64>,
    /// Use the minimal DFT length (n_fft = window length).
    #[arg(long, conflicts_with = "preset")]
    complete_sampling: bool,
    /// Paper parameter set; requires --role to pick the pair member.
    #[arg(long, value_enum, requires = "role")]
    preset: Option<Preset>,
    /// Which member of the preset pair to compute.
    #[arg(long, value_enum)]
    role: Option<Role>,
    /// Low-pass and downsample the signal to this rate first (the original
    /// rate must be an integer multiple).
    #[arg(long)]
    decimate_to_hz: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Canonical,
    SameGrid,
    Mel,
    Dense,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RescaleArg {
    None,
    MeanMass,
}

#[derive(Args)]
struct FuseArgs {
    /// Long-window input TFSP.
    #[arg(long)]
    input1: PathBuf,
    /// Short-window input TFSP.
    #[arg(long)]
    input2: PathBuf,
    /// Output TFSP.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "canonical")]
    mode: ModeArg,
    /// Mel bands of the target axis (mel mode only).
    #[arg(long)]
    mel_bands: Option<usize>,
    /// Drop the window-overlap masking (structured modes transport further).
    #[arg(long)]
    no_overlap: bool,
    /// Marginal relaxation parameter (all four KL penalties).
    #[arg(long, default_value_t = 10.0)]
    eta: f64,
    /// Barycentric weight of the second input.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Relative objective-decrease convergence threshold.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "none")]
    rescale: RescaleArg,
    /// Stored-entry cap for dense mode.
    #[arg(long, default_value_t = specfuse::cost::DEFAULT_ENTRY_CAP)]
    entry_cap: usize,
    /// Append a solver report line to this CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Case label used in the report line.
    #[arg(long, default_value = "fuse")]
    case: String,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for the CSV files.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 100)]
    n_signals: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw a mixture of packets per signal instead of a single packet.
    #[arg(long)]
    mixture: bool,
    #[arg(long, default_value_t = 2, requires = "mixture")]
    k_min: usize,
    #[arg(long, default_value_t = 10, requires = "mixture")]
    k_max: usize,
    #[arg(long, default_value_t = 10.0)]
    eta: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Frequency-tolerance curve length in grid steps.
    #[arg(long, default_value_t = 25)]
    delta_f_steps: usize,
    /// Time-tolerance curve length in hop steps.
    #[arg(long, default_value_t = 3)]
    delta_t_steps: usize,
    /// Skip the expensive same-grid barycenter.
    #[arg(long)]
    no_same_grid: bool,
    #[arg(long)]
    no_overlap: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct SpeechArgs {
    /// Directory of WAV files.
    #[arg(long)]
    wav_dir: PathBuf,
    /// Directory of pitch annotation files matched to WAVs by file stem.
    #[arg(long)]
    pitch_dir: PathBuf,
    /// Output directory for the CSV files.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 5e-7)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 25)]
    delta_f_steps: usize,
    /// Also compute the same-grid barycenter per file.
    #[arg(long)]
    with_same_grid: bool,
    /// Target rate the signals are decimated to (integer factor).
    #[arg(long, default_value_t = 8000.0)]
    target_rate_hz: f64,
    /// Pitch annotation frame hop in milliseconds.
    #[arg(long, default_value_t = 10.0)]
    pitch_hop_ms: f64,
    /// 0-based column of the f0 value in the annotation files.
    #[arg(long, default_value_t = 0)]
    pitch_column: usize,
    /// Extension of the pitch files.
    #[arg(long, default_value = "f0")]
    pitch_ext: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } | Error::Format { .. } | Error::Parse { .. } => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stft(args) => cmd_stft(args),
        Command::Fuse(args) => cmd_fuse(args),
        Command::SynthExperiment(args) => cmd_synth_experiment(args),
        Command::SpeechExperiment(args) => cmd_speech_experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn even_samples(ms: f64, sample_rate: f64) -> usize {
    let raw = (ms / 1000.0 * sample_rate).round().max(2.0) as usize;
    raw + raw % 2
}

fn cmd_stft(args: StftArgs) -> Result<(), Failure> {
    let (mut signal, mut rate) = read_wav(&args.input)?;
    if let Some(target) = args.decimate_to_hz {
        if !(target > 0.0) {
            return Err(usage("--decimate-to-hz must be positive"));
        }
        let ratio = rate / target;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(usage(format!(
                "cannot decimate {rate} Hz to {target} Hz: non-integer factor {ratio}"
            )));
        }
        signal = decimate(&signal, ratio.round() as usize, 0.45)?;
        rate = target;
    }

    let (params, bins) = match (args.preset, args.role) {
        (Some(preset), Some(role)) => {
            let pair = preset.pair();
            if (pair.sample_rate - rate).abs() > 1e-9 {
                return Err(usage(format!(
                    "preset expects {} Hz input, signal is at {rate} Hz (use --decimate-to-hz)",
                    pair.sample_rate
                )));
            }
            match role {
                Role::Long => (pair.long, pair.long_bins),
                Role::Short => (pair.short, pair.short_bins),
            }
        }
        (Some(_), None) => unreachable!("clap enforces --role with --preset"),
        (None, _) => {
            let window_ms = args
                .window_ms
                .ok_or_else(|| usage("--window-ms is required without --preset"))?;
            let hop_ms = args
                .hop_ms
                .ok_or_else(|| usage("--hop-ms is required without --preset"))?;
            let w = even_samples(window_ms, rate);
            let hop = ((hop_ms / 1000.0 * rate).round() as usize).max(1);
            let params = if let Some(spacing) = args.freq_spacing_hz {
                StftParams::with_spacing(w, hop, rate, spacing)?
            } else if args.complete_sampling {
                StftParams::complete(w, hop, rate)?
            } else {
                return Err(usage(
                    "pick a frequency sampling: --freq-spacing-hz or --complete-sampling",
                ));
            };
            let bins = params.complete_bins();
            (params, bins)
        }
    };

    let spec = spectrogram(&signal, &params, bins)?;
    write_spectrogram(&args.output, &spec)?;
    println!(
        "M={} N={} mass={}",
        spec.n_freqs(),
        spec.n_times(),
        spec.mass()
    );
    Ok(())
}

fn cmd_fuse(args: FuseArgs) -> Result<(), Failure> {
    if !(args.lambda >= 0.0 && args.lambda <= 1.0) {
        return Err(usage("--lambda must lie in [0, 1]"));
    }
    let mode = match args.mode {
        ModeArg::Canonical => FusionMode::Canonical,
        ModeArg::SameGrid => FusionMode::SameGrid,
        ModeArg::Dense => FusionMode::DenseCost,
        ModeArg::Mel => {
            let bands = args
                .mel_bands
                .ok_or_else(|| usage("--mel-bands is required with --mode mel"))?;
            FusionMode::Mel { bands }
        }
    };
    if args.mel_bands.is_some() && !matches!(mode, FusionMode::Mel { .. }) {
        return Err(usage("--mel-bands only applies to --mode mel"));
    }
    let mut uot = UotConfig::uniform(2, args.eta)
        .with_tol(args.tol)
        .with_max_iter(args.max_iter);
    uot.lambda = vec![1.0 - args.lambda, args.lambda];
    uot.validate()?;

    let spec1 = read_spectrogram(&args.input1)?;
    let spec2 = read_spectrogram(&args.input2)?;
    let fspec = FusionSpec {
        mode,
        overlap_enabled: !args.no_overlap,
        uot,
        rescale: match args.rescale {
            RescaleArg::None => Rescale::None,
            RescaleArg::MeanMass => Rescale::MeanMass,
        },
        entry_cap: args.entry_cap,
    };

    let start = std::time::Instant::now();
    let outcome = fuse(&spec1, &spec2, &fspec)?;
    let seconds = start.elapsed().as_secs_f64();
    write_spectrogram(&args.output, &outcome.spectrogram)?;

    if let Some(report) = &args.report {
        let row = vec![
            CsvField::from(args.case.as_str()),
            CsvField::from(spec1.support().len()),
            CsvField::from(spec2.support().len()),
            CsvField::from(outcome.spectrogram.support().len()),
            CsvField::from(outcome.finite_entries[0]),
            CsvField::from(outcome.finite_entries[1]),
            CsvField::from(outcome.iterations),
            CsvField::from(outcome.final_objective),
            CsvField::from(seconds),
        ];
        write_results_csv(report, REPORT_HEADER, &[row])?;
    }
    println!(
        "M={} N={} mass={} iterations={} nnz={}+{}",
        outcome.spectrogram.n_freqs(),
        outcome.spectrogram.n_times(),
        outcome.spectrogram.mass(),
        outcome.iterations,
        outcome.finite_entries[0],
        outcome.finite_entries[1],
    );
    if !outcome.converged {
        return Err(Failure {
            code: EXIT_NO_CONVERGENCE,
            message: format!(
                "solver hit max_iter = {} before the tolerance; partial result written to {}",
                args.max_iter,
                args.output.display()
            ),
        });
    }
    Ok(())
}

const REPORT_HEADER: &[&str] = &[
    "case",
    "rows1",
    "rows2",
    "cols",
    "nnz1",
    "nnz2",
    "iterations",
    "objective",
    "seconds",
];
const SUMMARY_HEADER: &[&str] = &["spectrogram", "delta", "metric", "mean", "se"];
const PER_SIGNAL_HEADER: &[&str] = &["signal", "spectrogram", "metric", "delta", "value"];
const SPEECH_HEADER: &[&str] = &["file", "delta_f", "spectrogram", "e_h"];

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::from(Error::io(dir, e)))
}

fn cmd_synth_experiment(args: SynthArgs) -> Result<(), Failure> {
    if args.mixture && args.k_min > args.k_max {
        return Err(usage("--k-min must not exceed --k-max"));
    }
    if args.n_signals == 0 {
        return Err(usage("--n-signals must be >= 1"));
    }
    ensure_dir(&args.out_dir)?;

    let mut preset = synthetic_preset();
    preset.eta = args.eta;
    preset.tol = args.tol;
    let cfg = SynthExperimentConfig {
        synth: SynthConfig {
            n_signals: args.n_signals,
            seed: args.seed,
            ..SynthConfig::default()
        },
        draw: if args.mixture {
            PacketDraw::Mixture {
                k_min: args.k_min,
                k_max: args.k_max,
            }
        } else {
            PacketDraw::Single
        },
        preset,
        max_iter: args.max_iter,
        overlap: !args.no_overlap,
        with_same_grid_fusion: !args.no_same_grid,
        delta_f_steps: args.delta_f_steps,
        delta_t_steps: args.delta_t_steps,
        threads: args.threads,
    };
    let out = run_synth_experiment(&cfg)?;

    write_per_signal_csv(&args.out_dir.join("per_signal.csv"), &out)?;
    write_summary_csv(&args.out_dir.join("summary.csv"), &out)?;
    write_solver_report(&args.out_dir.join("solver_report.csv"), &out)?;
    println!(
        "wrote {} signals to {} (different-grid nnz {}+{}{})",
        out.signals.len(),
        args.out_dir.display(),
        out.nnz_different_grid.0,
        out.nnz_different_grid.1,
        match out.nnz_same_grid {
            Some((a, b)) => format!(", same-grid nnz {a}+{b}"),
            None => String::new(),
        }
    );
    Ok(())
}

fn write_per_signal_csv(path: &Path, out: &SynthExperimentOutput) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for s in &out.signals {
        for c in &s.comparators {
            for (j, &e) in c.e_time.iter().enumerate() {
                rows.push(vec![
                    CsvField::from(s.index),
                    CsvField::from(c.name),
                    CsvField::from("e_time"),
                    CsvField::from(out.delta_t_grid_s[j]),
                    CsvField::from(e),
                ]);
            }
            for (metric, curve) in [("e_freq", &c.e_freq), ("e_joint", &c.e_joint)] {
                for (j, &e) in curve.iter().enumerate() {
                    rows.push(vec![
                        CsvField::from(s.index),
                        CsvField::from(c.name),
                        CsvField::from(metric),
                        CsvField::from(out.delta_f_grid_hz[j]),
                        CsvField::from(e),
                    ]);
                }
            }
        }
    }
    write_results_csv(path, PER_SIGNAL_HEADER, &rows)?;
    Ok(())
}

fn write_summary_csv(path: &Path, out: &SynthExperimentOutput) -> Result<(), Failure> {
    let mut rows = Vec::new();
    let names: Vec<&str> = out.signals[0].comparators.iter().map(|c| c.name).collect();
    for name in &names {
        for (j, &delta) in out.delta_t_grid_s.iter().enumerate() {
            let e_time = out.e_time_at(name, j);
            if e_time.len() >= 2 {
                let (mean, se) = experiment_stats(&e_time)?;
                rows.push(summary_row(name, delta, "e_time", mean, se));
            }
        }
        for (metric, values_at) in [
            ("e_freq", &out.e_freq_at(name, 0).is_empty()),
            ("e_joint", &out.e_joint_at(name, 0).is_empty()),
        ] {
            if *values_at {
                continue;
            }
            for (j, &delta) in out.delta_f_grid_hz.iter().enumerate() {
                let values = match metric {
                    "e_freq" => out.e_freq_at(name, j),
                    _ => out.e_joint_at(name, j),
                };
                if values.len() >= 2 {
                    let (mean, se) = experiment_stats(&values)?;
                    rows.push(summary_row(name, delta, metric, mean, se));
                }
            }
        }
        let iters = out.iterations(name);
        if iters.len() >= 2 {
            let (mean, se) = experiment_stats(&iters)?;
            rows.push(summary_row(name, 0.0, "iterations", mean, se));
        }
        let secs = out.seconds(name);
        if secs.len() >= 2 {
            let (mean, se) = experiment_stats(&secs)?;
            rows.push(summary_row(name, 0.0, "seconds", mean, se));
        }
    }
    write_results_csv(path, SUMMARY_HEADER, &rows)?;
    Ok(())
}

fn summary_row(name: &str, delta: f64, metric: &str, mean: f64, se: f64) -> Vec<CsvField> {
    vec![
        CsvField::from(name),
        CsvField::from(delta),
        CsvField::from(metric),
        CsvField::from(mean),
        CsvField::from(se),
    ]
}

fn write_solver_report(path: &Path, out: &SynthExperimentOutput) -> Result<(), Failure> {
    let mut rows = Vec::new();
    let cases = [
        ("different_grid_X", "X", Some(out.nnz_different_grid)),
        ("same_grid_Xp", "Xp", out.nnz_same_grid),
    ];
    let cases = [
        (cases[0].0, cases[0].1, cases[0].2, Some(out.sizes_different_grid)),
        (cases[1].0, cases[1].1, cases[1].2, out.sizes_same_grid),
    ];
    for (case, name, nnz, sizes) in cases {
        let (Some((nnz1, nnz2)), Some((rows1, rows2, cols))) = (nnz, sizes) else {
            continue;
        };
        let iters = out.iterations(name);
        let secs = out.seconds(name);
        let objs = out.objectives(name);
        if iters.is_empty() {
            continue;
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        rows.push(vec![
            CsvField::from(case),
            CsvField::from(rows1),
            CsvField::from(rows2),
            CsvField::from(cols),
            CsvField::from(nnz1),
            CsvField::from(nnz2),
            CsvField::from(mean(&iters)),
            CsvField::from(mean(&objs)),
            CsvField::from(mean(&secs)),
        ]);
    }
    write_results_csv(path, REPORT_HEADER, &rows)?;
    Ok(())
}

fn cmd_speech_experiment(args: SpeechArgs) -> Result<(), Failure> {
    ensure_dir(&args.out_dir)?;
    let mut preset = speech_preset();
    if (preset.sample_rate - args.target_rate_hz).abs() > 1e-9 {
        return Err(usage(
            "only the 8 kHz speech preset rate is supported for --target-rate-hz",
        ));
    }
    preset.eta = args.eta;
    preset.tol = args.tol;
    let cfg = SpeechRunConfig {
        preset,
        max_iter: args.max_iter,
        overlap: true,
        with_same_grid_fusion: args.with_same_grid,
        delta_f_steps: args.delta_f_steps,
    };

    let mut wavs: Vec<PathBuf> = std::fs::read_dir(&args.wav_dir)
        .map_err(|e| Failure::from(Error::io(&args.wav_dir, e)))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .is_some_and(|ext| ext.eq_ignore_ascii_case("wav"))
        })
        .collect();
    wavs.sort();

    let mut rows = Vec::new();
    let mut report_rows = Vec::new();
    let mut skipped = 0usize;
    let mut processed = 0usize;
    for wav in &wavs {
        let stem = wav.file_stem().unwrap_or_default().to_string_lossy();
        let pitch = args.pitch_dir.join(format!("{stem}.{}", args.pitch_ext));
        if !pitch.exists() {
            eprintln!("warning: no pitch file for {}, skipped", wav.display());
            skipped += 1;
            continue;
        }
        let (mut signal, rate) = read_wav(wav)?;
        if (rate - args.target_rate_hz).abs() > 1e-9 {
            let ratio = rate / args.target_rate_hz;
            if (ratio - ratio.round()).abs() > 1e-9 {
                eprintln!(
                    "warning: {} is at {rate} Hz (non-integer factor to {}), skipped",
                    wav.display(),
                    args.target_rate_hz
                );
                skipped += 1;
                continue;
            }
            signal = decimate(&signal, ratio.round() as usize, 0.45)?;
        }
        let track = parse_pitch_track(&pitch, args.pitch_hop_ms / 1000.0, args.pitch_column)?;
        if track.voiced_count() == 0 {
            eprintln!(
                "warning: {} has no voiced frames, skipped",
                pitch.display()
            );
            skipped += 1;
            continue;
        }
        let out = run_speech_file(&signal, &track, &cfg)?;
        println!(
            "{stem}: {} voiced frames, different-grid nnz {}+{}",
            out.voiced_frames, out.nnz_different_grid.0, out.nnz_different_grid.1
        );
        for c in &out.comparators {
            for (j, &e) in c.e_harmonic.iter().enumerate() {
                rows.push(vec![
                    CsvField::from(stem.to_string()),
                    CsvField::from(out.delta_f_grid_hz[j]),
                    CsvField::from(c.name),
                    CsvField::from(e),
                ]);
            }
            if let (Some(iterations), Some(seconds)) = (c.iterations, c.seconds) {
                report_rows.push(vec![
                    CsvField::from(format!("{stem}:{}", c.name)),
                    CsvField::from(0usize),
                    CsvField::from(0usize),
                    CsvField::from(0usize),
                    CsvField::from(out.nnz_different_grid.0),
                    CsvField::from(out.nnz_different_grid.1),
                    CsvField::from(iterations),
                    CsvField::Float(f64::NAN),
                    CsvField::from(seconds),
                ]);
            }
        }
        processed += 1;
    }

    write_results_csv(&args.out_dir.join("e_harmonic.csv"), SPEECH_HEADER, &rows)?;
    write_results_csv(
        &args.out_dir.join("solver_report.csv"),
        REPORT_HEADER,
        &report_rows,
    )?;
    if processed == 0 {
        eprintln!("warning: no matched WAV/pitch pairs processed ({skipped} skipped)");
    } else {
        println!("processed {processed} files, skipped {skipped}");
    }
    Ok(())
}
