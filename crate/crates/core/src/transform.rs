//! Sampled STFT on a Gabor lattice and its squared modulus.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::frames::ScaledWindow;
use crate::signal::Signal;

/// STFT coefficients `[frame][bin]` for bins `0..=fft_size/2`.
///
/// Frame `n` covers samples `start_offset + n·hop .. + window_len` of the
/// parent signal. The phase is referenced to the start of each frame.
#[derive(Debug, Clone, PartialEq)]
pub struct StftMatrix {
    pub coeffs: Array2<Complex64>,
    pub hop: usize,
    pub fft_size: usize,
    pub window_id: usize,
    pub window_len: usize,
    pub start_offset: i64,
    pub sample_rate: u32,
    /// Length of the parent signal the frames were taken from.
    pub signal_len: usize,
}

impl StftMatrix {
    pub fn frame_count(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn bins(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn frame_start(&self, n: usize) -> i64 {
        self.start_offset + (n * self.hop) as i64
    }

    pub fn with_window_id(mut self, id: usize) -> Self {
        self.window_id = id;
        self
    }
}

/// `|STFT|²` with the lattice steps needed by the entropy measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramSlab {
    pub power: Array2<f64>,
    /// Time step `a` in seconds.
    pub time_step_a: f64,
    /// Frequency step `b` in Hz.
    pub freq_step_b: f64,
    pub hop: usize,
    pub fft_size: usize,
    pub window_id: usize,
    pub start_offset: i64,
    pub sample_rate: u32,
}

impl SpectrogramSlab {
    /// Area `a·b` of one lattice cell (dimensionless).
    pub fn cell_area(&self) -> f64 {
        self.time_step_a * self.freq_step_b
    }

    pub fn total_power(&self) -> f64 {
        self.power.sum()
    }
}

/// Number of frames of a left-aligned lattice needed to span `span` samples;
/// the last frame may overhang the end.
pub fn frames_in_span(span: usize, window_len: usize, hop: usize) -> usize {
    if span <= window_len {
        1
    } else {
        (span - window_len).div_ceil(hop) + 1
    }
}

/// Lattice `(start, frame_count)` on which every sample of a signal of
/// `signal_len` samples is covered by all `window_len/hop` overlapping frames.
pub fn covering_frames(signal_len: usize, window_len: usize, hop: usize) -> (i64, usize) {
    let lead = window_len.saturating_sub(hop);
    let count = (signal_len.max(1) - 1 + lead) / hop + 1;
    (-(lead as i64), count)
}

/// STFT of `signal` with `frame_count` frames starting at sample `start`.
/// Frames overhanging the signal read zeros.
pub fn stft(
    signal: &Signal,
    window: &ScaledWindow,
    hop: usize,
    fft_size: usize,
    start: i64,
    frame_count: usize,
) -> Result<StftMatrix> {
    stft_samples(signal.samples(), signal.sample_rate(), window, hop, fft_size, start, frame_count)
}

/// [`stft`] over a raw sample buffer.
pub fn stft_samples(
    samples: &[f64],
    sample_rate: u32,
    window: &ScaledWindow,
    hop: usize,
    fft_size: usize,
    start: i64,
    frame_count: usize,
) -> Result<StftMatrix> {
    let len = window.len();
    if fft_size < len {
        return Err(Error::InvalidTransform(format!("fft size {fft_size} is smaller than the window ({len})")));
    }
    if hop == 0 {
        return Err(Error::InvalidTransform("hop must be at least one sample".into()));
    }
    if frame_count == 0 {
        return Err(Error::InvalidTransform("frame count must be positive".into()));
    }

    let w = window.analysis_values();
    let plan = fft::forward(fft_size);
    let bins = fft_size / 2 + 1;
    let mut coeffs = Array2::<Complex64>::zeros((frame_count, bins));
    let mut buf = vec![0.0; fft_size];
    let at = |i: i64| if i < 0 { 0.0 } else { samples.get(i as usize).copied().unwrap_or(0.0) };

    for (n, mut row) in coeffs.outer_iter_mut().enumerate() {
        let p = start + (n * hop) as i64;
        for (t, (b, wv)) in buf.iter_mut().zip(&w).enumerate() {
            *b = wv * at(p + t as i64);
        }
        buf[len..].fill(0.0);
        fft::rfft(plan.as_ref(), &mut buf, row.as_slice_mut().expect("rows are contiguous"));
    }

    Ok(StftMatrix {
        coeffs,
        hop,
        fft_size,
        window_id: 0,
        window_len: len,
        start_offset: start,
        sample_rate,
        signal_len: samples.len(),
    })
}

/// Squared modulus of the coefficients.
pub fn spectrogram(m: &StftMatrix) -> SpectrogramSlab {
    let sr = m.sample_rate as f64;
    SpectrogramSlab {
        power: m.coeffs.mapv(|c| c.norm_sqr()),
        time_step_a: m.hop as f64 / sr,
        freq_step_b: sr / m.fft_size as f64,
        hop: m.hop,
        fft_size: m.fft_size,
        window_id: m.window_id,
        start_offset: m.start_offset,
        sample_rate: m.sample_rate,
    }
}
