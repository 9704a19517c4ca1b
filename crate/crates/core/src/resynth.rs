//! Weighted overlap-add reconstruction.
//!
//! Each frame's inverse FFT gives a windowed piece `w(t)·f(p + t)` of the
//! signal. Summing `w·piece` over all frames and dividing by `Σ w²` recovers
//! `f` exactly, whatever the windows and placements, as long as every sample
//! is covered. Applied to modified coefficients it yields the signal whose
//! STFT is closest to them in the least-squares sense.

use crate::adapt::{accumulate_window_energy, AdaptedAnalysis, COVERAGE_EPSILON};
use crate::error::{Error, Result};
use crate::fft;
use crate::frames::ScaledWindow;
use crate::signal::Signal;
use crate::transform::StftMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedFrame {
    /// Position of the first sample in the parent signal.
    pub start: i64,
    pub buffer: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedSegments {
    pub frames: Vec<WindowedFrame>,
    pub signal_len: usize,
    pub sample_rate: u32,
}

/// Inverse transform of every frame, truncated to the window length.
pub fn extract_windowed_segments(m: &StftMatrix, window: &ScaledWindow) -> Result<WindowedSegments> {
    let len = window.len();
    if m.window_len != len || m.fft_size < len || m.bins() != m.fft_size / 2 + 1 {
        return Err(Error::Incompatible(format!(
            "{}x{} coefficients (fft {}, window {}) do not match a window of {len}",
            m.frame_count(),
            m.bins(),
            m.fft_size,
            m.window_len
        )));
    }
    let plan = fft::inverse(m.fft_size);
    let mut spectrum = vec![Default::default(); m.bins()];
    let mut out = vec![0.0; m.fft_size];
    let frames = m
        .coeffs
        .outer_iter()
        .enumerate()
        .map(|(n, row)| {
            spectrum.iter_mut().zip(row).for_each(|(s, c)| *s = *c);
            fft::irfft(plan.as_ref(), &mut spectrum, &mut out);
            WindowedFrame { start: m.frame_start(n), buffer: out[..len].to_vec() }
        })
        .collect();
    Ok(WindowedSegments { frames, signal_len: m.signal_len, sample_rate: m.sample_rate })
}

fn overlap_add(num: &mut [f64], frame: &WindowedFrame, w: &[f64]) {
    let lo = frame.start.max(0);
    let hi = (frame.start + w.len() as i64).min(num.len() as i64);
    for l in lo..hi {
        let t = (l - frame.start) as usize;
        num[l as usize] += w[t] * frame.buffer[t];
    }
}

/// Reconstruction from the frames of a single window and hop.
pub fn reconstruct_fixed(segs: &WindowedSegments, window: &ScaledWindow, hop: usize) -> Result<Signal> {
    let w = window.analysis_values();
    if let Some(f) = segs.frames.iter().find(|f| f.buffer.len() != w.len()) {
        return Err(Error::Incompatible(format!("frame of {} samples for a window of {}", f.buffer.len(), w.len())));
    }
    if segs.frames.windows(2).any(|p| p[1].start - p[0].start != hop as i64) {
        return Err(Error::Incompatible(format!("frames are not spaced by the hop {hop}")));
    }

    let mut num = vec![0.0; segs.signal_len];
    let mut den = vec![0.0; segs.signal_len];
    for frame in &segs.frames {
        overlap_add(&mut num, frame, &w);
        accumulate_window_energy(&mut den, &w, frame.start);
    }
    if let Some(sample) = den.iter().position(|&d| d < COVERAGE_EPSILON) {
        return Err(Error::NotAFrame { sample });
    }
    num.iter_mut().zip(&den).for_each(|(n, d)| *n /= d);
    Signal::new(num, segs.sample_rate)
}

/// Reconstruction from every retained frame of an adapted analysis, each
/// with its own window and placement.
pub fn reconstruct_adapted(aa: &AdaptedAnalysis) -> Result<Signal> {
    let mut num = vec![0.0; aa.signal_len];
    let mut den = vec![0.0; aa.signal_len];
    for slice in &aa.slices {
        let window = aa.multiframe.window(slice.window_id);
        let w = window.analysis_values();
        let segs = extract_windowed_segments(&slice.stft, window)?;
        for frame in &segs.frames {
            overlap_add(&mut num, frame, &w);
            accumulate_window_energy(&mut den, &w, frame.start);
        }
    }
    if let Some(sample) = den.iter().position(|&d| d < COVERAGE_EPSILON) {
        return Err(Error::Coverage { sample });
    }
    num.iter_mut().zip(&den).for_each(|(n, d)| *n /= d);
    Signal::new(num, aa.sample_rate)
}
