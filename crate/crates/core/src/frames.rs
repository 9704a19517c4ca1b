//! Scaled Hanning windows and the equal-redundancy multiple Gabor frame.
//!
//! Every window in a [`MultiFrame`] uses the same overlap ratio, so its hop
//! grows with its length and all constituent frames have the same
//! redundancy. All windows share one FFT size, which fixes a common frequency
//! step `b = sample_rate / fft_size`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A discrete Hanning window at some scale, optionally tied to a hop.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledWindow {
    values: Vec<f64>,
    scale: f64,
    hop: Option<usize>,
    amplitude_norm: f64,
}

impl ScaledWindow {
    /// Raw window samples, without the amplitude normalization.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Length relative to the base window of the family.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Hop in samples once the window belongs to a frame.
    pub fn hop(&self) -> Option<usize> {
        self.hop
    }

    /// The `1/sqrt(scale)` factor that keeps the window energy independent of
    /// its length.
    pub fn amplitude_norm(&self) -> f64 {
        self.amplitude_norm
    }

    /// Window samples as used for analysis and synthesis
    /// (`amplitude_norm * values`).
    pub fn analysis_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * self.amplitude_norm).collect()
    }

    pub fn with_hop(mut self, hop: usize) -> Result<Self> {
        if hop == 0 || hop >= self.len() {
            return Err(Error::InvalidWindow(format!("hop {hop} must lie in [1, {})", self.len())));
        }
        self.hop = Some(hop);
        Ok(self)
    }
}

/// Periodic Hanning window `0.5·(1 − cos(2πn/length))`.
pub fn make_hanning(length: usize) -> Result<ScaledWindow> {
    if length < 2 {
        return Err(Error::InvalidWindow(format!("length {length} < 2")));
    }
    let values = (0..length).map(|n| 0.5 * (1.0 - (2.0 * PI * n as f64 / length as f64).cos())).collect();
    Ok(ScaledWindow { values, scale: 1.0, hop: None, amplitude_norm: 1.0 })
}

/// Stretches `base` by `l`: a Hanning of length `round(l·len)` whose
/// amplitude is divided by `sqrt(l)`.
pub fn scale_window(base: &ScaledWindow, l: f64) -> Result<ScaledWindow> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidWindow(format!("scale {l} must be positive")));
    }
    let length = (l * base.len() as f64).round() as usize;
    let mut w = make_hanning(length)?;
    w.scale = base.scale * l;
    w.amplitude_norm = base.amplitude_norm / l.sqrt();
    Ok(w)
}

/// An ordered family of scaled Hanning windows sharing one overlap ratio and
/// one FFT size.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiFrame {
    windows: Vec<ScaledWindow>,
    fft_size: usize,
    overlap: f64,
}

impl MultiFrame {
    /// Windows in ascending length. Every window has a hop.
    pub fn windows(&self) -> &[ScaledWindow] {
        &self.windows
    }

    pub fn window(&self, id: usize) -> &ScaledWindow {
        &self.windows[id]
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn hop(&self, id: usize) -> usize {
        self.windows[id].hop.expect("multi-frame windows carry a hop")
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.windows.iter().map(ScaledWindow::len).collect()
    }

    pub fn largest(&self) -> &ScaledWindow {
        self.windows.last().expect("multi-frame is never empty")
    }

    pub fn smallest(&self) -> &ScaledWindow {
        &self.windows[0]
    }

    /// Replaces the shared FFT size (more zero-padding).
    pub fn with_fft_size(mut self, fft_size: usize) -> Result<Self> {
        if fft_size < self.largest().len() {
            return Err(Error::InvalidMultiFrame(format!(
                "fft size {fft_size} is smaller than the largest window ({})",
                self.largest().len()
            )));
        }
        self.fft_size = fft_size;
        Ok(self)
    }
}

fn nearest_even(x: f64) -> usize {
    ((x / 2.0).round() as usize * 2).max(2)
}

/// Builds `count` windows whose lengths are geometrically spaced between
/// `min_len` and `max_len`, rounded to even lengths, with
/// `hop = round((1 − overlap)·length)`.
pub fn build_multiframe(min_len: usize, max_len: usize, count: usize, overlap: f64) -> Result<MultiFrame> {
    if min_len < 2 || min_len >= max_len {
        return Err(Error::InvalidMultiFrame(format!(
            "window lengths must satisfy 2 <= min ({min_len}) < max ({max_len})"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidMultiFrame(format!("need at least 2 windows, got {count}")));
    }
    if !(0.5..1.0).contains(&overlap) {
        return Err(Error::InvalidMultiFrame(format!("overlap {overlap} outside [0.5, 1)")));
    }

    let ratio = max_len as f64 / min_len as f64;
    let mut lengths: Vec<usize> = (0..count)
        .map(|i| match i {
            0 => nearest_even(min_len as f64),
            i if i == count - 1 => nearest_even(max_len as f64),
            i => nearest_even(min_len as f64 * ratio.powf(i as f64 / (count - 1) as f64)),
        })
        .collect();
    lengths.dedup();

    let base = lengths[0] as f64;
    let windows = lengths
        .iter()
        .map(|&len| {
            let scale = len as f64 / base;
            let hop = (((1.0 - overlap) * len as f64).round() as usize).max(1);
            let w = make_hanning(len)?;
            ScaledWindow { scale, amplitude_norm: 1.0 / scale.sqrt(), ..w }.with_hop(hop)
        })
        .collect::<Result<Vec<_>>>()?;
    let fft_size = lengths.last().unwrap().next_power_of_two();
    Ok(MultiFrame { windows, fft_size, overlap })
}

/// Extremes of `Σ_n h²(t − n·hop)` over one hop period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// The translates form a frame only if no sample is left uncovered.
    pub fn is_frame(&self) -> bool {
        self.lower > 0.0
    }
}

/// Painless-case frame bounds of the window translated by `hop`.
///
/// Panics if `hop` is zero.
pub fn estimate_frame_bounds(window: &ScaledWindow, hop: usize) -> FrameBounds {
    assert!(hop >= 1, "hop must be at least one sample");
    let values = window.values();
    let (mut lower, mut upper) = (f64::INFINITY, 0.0f64);
    for t in 0..hop {
        let s: f64 = values.iter().skip(t).step_by(hop).map(|v| v * v).sum();
        lower = lower.min(s);
        upper = upper.max(s);
    }
    FrameBounds { lower, upper }
}
