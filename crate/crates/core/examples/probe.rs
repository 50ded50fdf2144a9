use specfuse::experiment::*;
use specfuse::stft::spectrogram;
use specfuse::synthgen::{gen_packet, render, signal_rng};
use specfuse::fusion::fuse_multi;
use specfuse::uot::UotConfig;

fn main() {
    let cfg = SynthExperimentConfig::single_packet(1, 42);
    let preset = cfg.preset.clone();
    let mut rng = signal_rng(42, 0);
    let p = gen_packet(&mut rng, &cfg.synth);
    let y = render(&[p], &cfg.synth);
    let x1 = spectrogram(&y, &preset.long, preset.long_bins).unwrap();
    let x2 = spectrogram(&y, &preset.short, preset.short_bins).unwrap();
    let x1p = spectrogram(&y, &preset.grid_long, preset.grid_bins).unwrap();
    let x2p = spectrogram(&y, &preset.grid_short, preset.grid_bins).unwrap();
    let uot = UotConfig::uniform(2, 10.0).with_tol(1e-13).with_max_iter(3000);
    for (label, setting, a, b) in [
        ("same-grid", FusionSetting::same_grid(&preset, 500, true, uot.clone()).unwrap(), &x1p, &x2p),
        ("diff-grid", FusionSetting::different_grid(&preset, 500, true, uot.clone()).unwrap(), &x1, &x2),
    ] {
        let out = fuse_multi(&[a, b], &setting.costs, &setting.target, &setting.uot).unwrap();
        // re-derive stopping iteration under different denominators
        let tr = {
            let ms = [specfuse::tf_core::to_measure(a), specfuse::tf_core::to_measure(b)];
            let ws: Vec<&[f64]> = ms.iter().map(|m| m.weights()).collect();
            specfuse::uot::solve_barycenter(&ws, &setting.costs, &setting.uot).unwrap().objective_trace
        };
        println!("{label}: trace len {} F0={:.4e} F1={:.4e} F_end={:.6e}", tr.len(), tr[0], tr[1], tr.last().unwrap());
        let mut k_f0 = None; let mut k_fk = None; let mut k_f1 = None;
        for k in 1..tr.len() {
            let d = (tr[k] - tr[k-1]).abs();
            if k_f0.is_none() && d <= 1e-6 * tr[0] { k_f0 = Some(k); }
            if k_fk.is_none() && d <= 1e-6 * tr[k] { k_fk = Some(k); }
            if k_f1.is_none() && d <= 1e-6 * tr[1] { k_f1 = Some(k); }
        }
        println!("  k(denom F0) = {k_f0:?}, k(denom F_current) = {k_fk:?}, k(denom F1) = {k_f1:?}");
        let _ = out;
    }
}
