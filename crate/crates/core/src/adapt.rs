//! Segment-wise window selection and assembly of the adapted analysis.
//!
//! The signal is cut into overlapping segments whose geometry is anchored to
//! the largest window: a segment spans `frames_per_segment` frames of it, and
//! consecutive segments share `overlap_frames` of those frames. Inside a
//! segment every window of the multi-frame is laid out left-aligned at the
//! segment start with its own hop. The segment is tapered at both ends by the
//! halves of the largest window (so that short windows do not over-weight the
//! boundaries), each window's spectrogram is scored by its Rényi entropy over
//! the whole frequency axis, and the minimizer is kept.
//!
//! The retained analysis is the unweighted STFT of each segment with its
//! chosen window. Neighbouring slices overlap, so every sample is covered by
//! frames of both neighbours wherever their windows differ; weighted
//! overlap-add over all retained frames stays exact.

use std::ops::Range;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{normalize_density, renyi_entropy, EntropyOrder, Region};
use crate::error::{Error, Result};
use crate::frames::MultiFrame;
use crate::signal::Signal;
use crate::transform::{frames_in_span, spectrogram, stft, stft_samples, StftMatrix};

/// Denominators below this are treated as "no frame covers the sample".
pub const COVERAGE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    /// First sample, relative to the signal start (may be negative).
    pub start: i64,
    pub len: usize,
}

impl Segment {
    pub fn end(&self) -> i64 {
        self.start + self.len as i64
    }

    pub fn contains(&self, sample: i64) -> bool {
        (self.start..self.end()).contains(&sample)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPlan {
    pub segments: Vec<Segment>,
    /// `(frames_per_segment − 1)·hop_max + len_max`
    pub segment_len: usize,
    /// `(frames_per_segment − overlap_frames)·hop_max`
    pub stride: usize,
    /// `overlap_frames·hop_max`: overlap of the cores of consecutive segments.
    pub overlap_len: usize,
    pub frames_per_segment: usize,
    pub overlap_frames: usize,
    /// Samples by which the first segment starts before the signal.
    pub lead_in: usize,
    /// The signal fits in a single zero-padded segment.
    pub single_padded: bool,
    core_offset: usize,
    core_len: usize,
}

impl SegmentPlan {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Core of segment `s`: the `frames_per_segment·hop_max` samples centred
    /// in it. Cores of consecutive segments overlap by exactly `overlap_len`.
    pub fn core(&self, s: usize) -> Range<i64> {
        let start = self.segments[s].start + self.core_offset as i64;
        start..start + self.core_len as i64
    }

    fn centre(&self, s: usize) -> f64 {
        self.segments[s].start as f64 + self.segment_len as f64 / 2.0
    }
}

/// Tiles a signal of `signal_len` samples with segments of
/// `frames_per_segment` largest-window frames, consecutive segments sharing
/// `overlap_frames` of them.
///
/// The grid starts one smallest hop before the signal so that its first
/// sample does not fall on the zero of every window's first frame; segments
/// continue until the signal end is likewise inside.
pub fn plan_segments(
    signal_len: usize,
    mf: &MultiFrame,
    frames_per_segment: usize,
    overlap_frames: usize,
) -> Result<SegmentPlan> {
    if signal_len == 0 {
        return Err(Error::InvalidPlan("signal is empty".into()));
    }
    if frames_per_segment == 0 || overlap_frames >= frames_per_segment {
        return Err(Error::InvalidPlan(format!(
            "need frames_per_segment ({frames_per_segment}) > overlap_frames ({overlap_frames}) >= 0"
        )));
    }
    let hop_max = mf.hop(mf.len() - 1);
    let len_max = mf.largest().len();
    let segment_len = (frames_per_segment - 1) * hop_max + len_max;
    let stride = (frames_per_segment - overlap_frames) * hop_max;
    let lead_in = mf.hop(0);

    let needed = signal_len + 2 * lead_in;
    let single_padded = needed <= segment_len;
    let count = if single_padded { 1 } else { (needed - segment_len).div_ceil(stride) + 1 };
    let segments =
        (0..count).map(|s| Segment { start: (s * stride) as i64 - lead_in as i64, len: segment_len }).collect();

    Ok(SegmentPlan {
        segments,
        segment_len,
        stride,
        overlap_len: overlap_frames * hop_max,
        frames_per_segment,
        overlap_frames,
        lead_in,
        single_padded,
        core_offset: (len_max - hop_max) / 2,
        core_len: frames_per_segment * hop_max,
    })
}

/// Copies the samples of `segment`, zero outside the signal.
pub fn extract_segment(signal: &Signal, segment: &Segment) -> Vec<f64> {
    (segment.start..segment.end()).map(|i| signal.get(i)).collect()
}

/// Tapers the first and last `len_max/2` samples with the rising and falling
/// halves of the largest window. Only used for scoring.
pub fn preweight_segment(seg: &[f64], mf: &MultiFrame) -> Result<Vec<f64>> {
    let taper = mf.largest().values();
    if seg.len() < taper.len() {
        return Err(Error::InvalidPlan(format!(
            "segment of {} samples is shorter than the largest window ({})",
            seg.len(),
            taper.len()
        )));
    }
    let half = taper.len() / 2;
    let mut out = seg.to_vec();
    let tail = out.len() - half;
    out[..half].iter_mut().zip(&taper[..half]).for_each(|(s, w)| *s *= w);
    out[tail..].iter_mut().zip(&taper[half..]).for_each(|(s, w)| *s *= w);
    Ok(out)
}

/// How to resolve exactly equal entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    PreferLarger,
    PreferSmaller,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdaptOptions {
    pub tie_break: TieBreak,
}

/// Outcome of scoring one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowChoice {
    /// Entropy in bits per window id; `None` where the window saw no energy.
    pub entropies: Vec<Option<f64>>,
    pub chosen: usize,
    pub degenerate: bool,
}

/// Rényi entropy of each window's spectrogram over a (pre-weighted) segment.
pub fn segment_entropies(
    seg: &[f64],
    sample_rate: u32,
    mf: &MultiFrame,
    alpha: EntropyOrder,
) -> Result<Vec<Option<f64>>> {
    mf.windows()
        .iter()
        .enumerate()
        .map(|(id, w)| {
            let hop = mf.hop(id);
            let frames = frames_in_span(seg.len(), w.len(), hop);
            let m = stft_samples(seg, sample_rate, w, hop, mf.fft_size(), 0, frames)?;
            let slab = spectrogram(&m);
            match normalize_density(&slab, &Region::full(&slab)) {
                Ok(d) => Ok(Some(renyi_entropy(&d, alpha))),
                Err(Error::DegenerateSegment) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

fn choose(entropies: Vec<Option<f64>>, previous: Option<usize>, tie_break: TieBreak, largest: usize) -> WindowChoice {
    let mut best: Option<(usize, f64)> = None;
    for (id, h) in entropies.iter().enumerate() {
        let Some(h) = *h else { continue };
        let better = match (best, tie_break) {
            (None, _) => true,
            (Some((_, b)), TieBreak::PreferLarger) => h <= b,
            (Some((_, b)), TieBreak::PreferSmaller) => h < b,
        };
        if better {
            best = Some((id, h));
        }
    }
    match best {
        Some((chosen, _)) => WindowChoice { entropies, chosen, degenerate: false },
        None => WindowChoice { entropies, chosen: previous.unwrap_or(largest), degenerate: true },
    }
}

/// Picks the window of minimum entropy for a pre-weighted segment. A silent
/// segment is flagged degenerate and keeps `previous` (or the largest window).
pub fn select_window(
    seg: &[f64],
    sample_rate: u32,
    mf: &MultiFrame,
    alpha: EntropyOrder,
    previous: Option<usize>,
    tie_break: TieBreak,
) -> Result<WindowChoice> {
    let entropies = segment_entropies(seg, sample_rate, mf, alpha)?;
    Ok(choose(entropies, previous, tie_break, mf.len() - 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSelection {
    pub start: i64,
    pub len: usize,
    pub entropies: Vec<Option<f64>>,
    pub chosen: usize,
    pub degenerate: bool,
}

/// Per-segment entropies and choices; serializes to the report JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub alpha: f64,
    /// Window lengths in samples, indexed by window id.
    pub windows: Vec<usize>,
    pub segments: Vec<SegmentSelection>,
}

impl SelectionReport {
    pub fn chosen(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.chosen).collect()
    }
}

/// One segment's retained coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub segment: Segment,
    pub window_id: usize,
    pub stft: StftMatrix,
}

/// Overlap between consecutive segments whose chosen windows differ. Both
/// slices keep their coefficients over it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionZone {
    pub start: i64,
    pub len: usize,
    /// Index of the earlier segment; the later one is `left + 1`.
    pub left: usize,
    pub left_window: usize,
    pub right_window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedAnalysis {
    pub slices: Vec<Slice>,
    pub transitions: Vec<TransitionZone>,
    pub plan: SegmentPlan,
    pub multiframe: MultiFrame,
    pub sample_rate: u32,
    pub signal_len: usize,
}

impl AdaptedAnalysis {
    /// `Σ w²` over all retained frames at every signal sample.
    pub fn coverage(&self) -> Vec<f64> {
        let mut den = vec![0.0; self.signal_len];
        for slice in &self.slices {
            let w = self.multiframe.window(slice.window_id).analysis_values();
            for n in 0..slice.stft.frame_count() {
                accumulate_window_energy(&mut den, &w, slice.stft.frame_start(n));
            }
        }
        den
    }

    /// Fails with the first sample no retained frame covers.
    pub fn check_coverage(&self) -> Result<()> {
        match self.coverage().iter().position(|&d| d < COVERAGE_EPSILON) {
            Some(sample) => Err(Error::Coverage { sample }),
            None => Ok(()),
        }
    }
}

pub(crate) fn accumulate_window_energy(den: &mut [f64], w: &[f64], start: i64) {
    let lo = start.max(0);
    let hi = (start + w.len() as i64).min(den.len() as i64);
    for l in lo..hi {
        let v = w[(l - start) as usize];
        den[l as usize] += v * v;
    }
}

/// Runs the selection over every segment of `plan` with default options.
pub fn adapt_signal(
    signal: &Signal,
    mf: &MultiFrame,
    alpha: EntropyOrder,
    plan: &SegmentPlan,
) -> Result<(AdaptedAnalysis, SelectionReport)> {
    adapt_signal_with(signal, mf, alpha, plan, AdaptOptions::default())
}

pub fn adapt_signal_with(
    signal: &Signal,
    mf: &MultiFrame,
    alpha: EntropyOrder,
    plan: &SegmentPlan,
    options: AdaptOptions,
) -> Result<(AdaptedAnalysis, SelectionReport)> {
    let sr = signal.sample_rate();

    // Entropies are independent per segment; choices are resolved in time
    // order afterwards because silent segments inherit their predecessor.
    let entropies = plan
        .segments
        .par_iter()
        .map(|seg| {
            let weighted = preweight_segment(&extract_segment(signal, seg), mf)?;
            segment_entropies(&weighted, sr, mf, alpha)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut previous = None;
    let mut selections = Vec::with_capacity(plan.len());
    for (seg, e) in plan.segments.iter().zip(entropies) {
        let choice = choose(e, previous, options.tie_break, mf.len() - 1);
        previous = Some(choice.chosen);
        selections.push(SegmentSelection {
            start: seg.start,
            len: seg.len,
            entropies: choice.entropies,
            chosen: choice.chosen,
            degenerate: choice.degenerate,
        });
    }

    let slices = plan
        .segments
        .par_iter()
        .zip(selections.par_iter())
        .map(|(seg, sel)| {
            let id = sel.chosen;
            let w = mf.window(id);
            let hop = mf.hop(id);
            let frames = frames_in_span(seg.len, w.len(), hop);
            let m = stft(signal, w, hop, mf.fft_size(), seg.start, frames)?;
            Ok(Slice { segment: *seg, window_id: id, stft: m.with_window_id(id) })
        })
        .collect::<Result<Vec<_>>>()?;

    let transitions = if plan.overlap_len == 0 {
        Vec::new()
    } else {
        selections
            .windows(2)
            .enumerate()
            .filter(|(_, pair)| pair[0].chosen != pair[1].chosen)
            .map(|(s, pair)| TransitionZone {
                start: plan.core(s + 1).start,
                len: plan.overlap_len,
                left: s,
                left_window: pair[0].chosen,
                right_window: pair[1].chosen,
            })
            .collect()
    };

    let analysis = AdaptedAnalysis {
        slices,
        transitions,
        plan: plan.clone(),
        multiframe: mf.clone(),
        sample_rate: sr,
        signal_len: signal.len(),
    };
    analysis.check_coverage()?;

    let report = SelectionReport { alpha: alpha.alpha(), windows: mf.lengths(), segments: selections };
    Ok((analysis, report))
}

/// Adapted spectrogram resampled on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplayGrid {
    /// Power, `[time][bin]`.
    pub power: Array2<f64>,
    pub time_step_s: f64,
    pub freq_step_hz: f64,
    /// Grid time step in samples (the smallest hop of the multi-frame).
    pub hop: usize,
}

impl DisplayGrid {
    pub fn rows(&self) -> usize {
        self.power.nrows()
    }

    pub fn cols(&self) -> usize {
        self.power.ncols()
    }
}

fn nearest_frame(m: &StftMatrix, t: f64) -> usize {
    let first_centre = m.start_offset as f64 + m.window_len as f64 / 2.0;
    let n = ((t - first_centre) / m.hop as f64).round();
    n.clamp(0.0, (m.frame_count() - 1) as f64) as usize
}

/// Places every slice on a grid with the smallest hop as time step.
///
/// Each row at sample time `t` takes the nearest-centred frame of the
/// segment owning `t` (segments own `stride`-wide pieces around their
/// centres). Across a transition zone the two neighbours' powers are
/// cross-faded linearly over `min(overlap_len, stride)` samples centred on
/// the ownership boundary.
pub fn render_display_grid(aa: &AdaptedAnalysis) -> DisplayGrid {
    let mf = &aa.multiframe;
    let plan = &aa.plan;
    let hop = mf.hop(0);
    let bins = mf.fft_size() / 2 + 1;
    let rows = aa.signal_len.div_ceil(hop) + 1;
    let stride = plan.stride as f64;
    let ramp = plan.overlap_len.min(plan.stride) as f64;
    let last = aa.slices.len() - 1;
    let fading = |left: usize| aa.transitions.iter().any(|z| z.left == left);

    let mut power = Array2::<f64>::zeros((rows, bins));
    for (r, mut row) in power.outer_iter_mut().enumerate() {
        let t = (r * hop) as f64;
        let origin = plan.centre(0) - stride / 2.0;
        let owner = (((t - origin) / stride).floor().max(0.0) as usize).min(last);

        let mut blend: Vec<(usize, f64)> = vec![(owner, 1.0)];
        if ramp > 0.0 {
            let boundary_after = plan.centre(owner) + stride / 2.0;
            let boundary_before = plan.centre(owner) - stride / 2.0;
            if owner < last && fading(owner) && t >= boundary_after - ramp / 2.0 {
                let w = (t - (boundary_after - ramp / 2.0)) / ramp;
                blend = vec![(owner, 1.0 - w), (owner + 1, w)];
            } else if owner > 0 && fading(owner - 1) && t < boundary_before + ramp / 2.0 {
                let w = (t - (boundary_before - ramp / 2.0)) / ramp;
                blend = vec![(owner - 1, 1.0 - w), (owner, w)];
            }
        }

        for (s, weight) in blend {
            let m = &aa.slices[s].stft;
            let n = nearest_frame(m, t);
            row.zip_mut_with(&m.coeffs.row(n), |p, c| *p += weight * c.norm_sqr());
        }
    }

    let sr = aa.sample_rate as f64;
    DisplayGrid { power, time_step_s: hop as f64 / sr, freq_step_hz: sr / mf.fft_size() as f64, hop }
}
