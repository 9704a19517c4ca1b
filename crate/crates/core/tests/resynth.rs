mod common;

use adaspec::adapt::{adapt_signal, plan_segments};
use adaspec::entropy::EntropyOrder;
use adaspec::frames::{build_multiframe, make_hanning};
use adaspec::resynth::{extract_windowed_segments, reconstruct_adapted, reconstruct_fixed};
use adaspec::transform::{covering_frames, stft};
use adaspec::{Error, Signal};
use common::*;
use num_complex::Complex64;

#[test]
fn adapted_round_trip_is_exact_across_configurations() {
    let fixtures = [
        ("sinusoid", sinusoid(0.8)),
        ("impulse", impulse(0.8)),
        ("struck", struck(0.8)),
        ("fm", fm(0.8)),
        ("noise", white_noise(0.8, 21)),
    ];
    for count in [2, 8] {
        let mf = build_multiframe(512, 4096, count, 0.75).unwrap();
        for (fps, ovf) in [(4, 0), (4, 2), (4, 3), (6, 1)] {
            let plan = plan_segments(fixtures[0].1.len(), &mf, fps, ovf).unwrap();
            for (name, sig) in &fixtures {
                let (aa, _) = adapt_signal(sig, &mf, EntropyOrder::default(), &plan).unwrap();
                let out = reconstruct_adapted(&aa).unwrap();
                assert_eq!(out.len(), sig.len());
                let err = max_abs_diff(sig, &out);
                assert!(err < 1e-9, "{name}, {count} windows, fps {fps}, ovf {ovf}: {err}");
            }
        }
    }
}

#[test]
fn single_slice_matches_fixed_reconstruction() {
    let mf = build_multiframe(512, 4096, 8, 0.75).unwrap();
    let sig = white_noise(0.06, 4);
    let plan = plan_segments(sig.len(), &mf, 4, 2).unwrap();
    let (aa, _) = adapt_signal(&sig, &mf, EntropyOrder::default(), &plan).unwrap();
    assert_eq!(aa.slices.len(), 1);
    let slice = &aa.slices[0];
    let window = mf.window(slice.window_id);
    let segs = extract_windowed_segments(&slice.stft, window).unwrap();
    let fixed = reconstruct_fixed(&segs, window, mf.hop(slice.window_id)).unwrap();
    assert_eq!(reconstruct_adapted(&aa).unwrap(), fixed);
}

#[test]
fn every_transition_zone_present_is_still_exact() {
    let mf = build_multiframe(512, 4096, 8, 0.75).unwrap();
    let sig = fm(1.5);
    let plan = plan_segments(sig.len(), &mf, 4, 3).unwrap();
    let (aa, report) = adapt_signal(&sig, &mf, EntropyOrder::default(), &plan).unwrap();
    let switches = report.chosen().windows(2).filter(|p| p[0] != p[1]).count();
    assert_eq!(aa.transitions.len(), switches);
    assert!(switches > 5);
    let out = reconstruct_adapted(&aa).unwrap();
    assert!(snr_db(&sig, &out) >= 120.0);
    assert!(max_abs_diff(&sig, &out) < 1e-9);
}

#[test]
fn dropping_slices_is_a_coverage_error() {
    let mf = build_multiframe(512, 4096, 8, 0.75).unwrap();
    let sig = struck(0.8);
    let plan = plan_segments(sig.len(), &mf, 4, 2).unwrap();
    let (mut aa, _) = adapt_signal(&sig, &mf, EntropyOrder::default(), &plan).unwrap();
    let keep = aa.slices.len() / 2;
    aa.slices.truncate(keep);
    assert!(matches!(reconstruct_adapted(&aa), Err(Error::Coverage { .. })));
    assert!(aa.check_coverage().is_err());
}

fn two_tone(n: usize, fft: usize, k0: usize, k1: usize) -> (Signal, Signal) {
    let tone = |k: usize, amp: f64| -> Vec<f64> {
        (0..n).map(|t| amp * (2.0 * std::f64::consts::PI * (k * t) as f64 / fft as f64).cos()).collect()
    };
    let a = tone(k0, 1.0);
    let mix = a.iter().zip(tone(k1, 0.6)).map(|(x, y)| x + y).collect();
    (Signal::new(mix, 8000).unwrap(), Signal::new(a, 8000).unwrap())
}

#[test]
fn band_limited_coefficients_give_least_squares_signal() {
    let (n, fft, len, hop, k0) = (64, 16, 16, 4, 2);
    let (mix, target) = two_tone(n, fft, k0, 5);
    let w = make_hanning(len).unwrap();
    let (start, count) = covering_frames(n, len, hop);
    let mut m = stft(&mix, &w, hop, fft, start, count).unwrap();
    for (k, mut col) in m.coeffs.columns_mut().into_iter().enumerate() {
        if k != k0 {
            col.fill(Complex64::default());
        }
    }
    let out = reconstruct_fixed(&extract_windowed_segments(&m, &w).unwrap(), &w, hop).unwrap();

    let oracle = normal_equations_solution(&m, w.values(), n);
    let err = relative_l2(&oracle, out.samples());
    assert!(err < 1e-6, "{err}");

    let dist = |s: &[f64]| s.iter().zip(target.samples()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    assert!(dist(out.samples()) < dist(mix.samples()));
}

#[test]
fn unmodified_coefficients_agree_with_oracle_and_signal() {
    let sig = white_noise(64.0 / SR as f64, 8);
    let w = make_hanning(24).unwrap();
    let (start, count) = covering_frames(sig.len(), 24, 6);
    let m = stft(&sig, &w, 6, 32, start, count).unwrap();
    let oracle = normal_equations_solution(&m, w.values(), sig.len());
    assert!(relative_l2(sig.samples(), &oracle) < 1e-9);
    let out = reconstruct_fixed(&extract_windowed_segments(&m, &w).unwrap(), &w, 6).unwrap();
    assert!(max_abs_diff(&sig, &out) < 1e-12);
}
