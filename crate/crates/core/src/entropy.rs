//! Rényi entropy of a normalized spectrogram region.
//!
//! A region of a spectrogram is normalized to unit mass and read as a
//! discrete probability density over lattice cells of area `a·b`. Its order-α
//! Rényi entropy, in bits, is
//!
//! ```text
//! H_α = 1/(1−α) · log2 Σ p^α + log2(a·b)
//! ```
//!
//! with the Shannon entropy at α = 1 and the log-cardinality of the support at
//! α = 0. The `log2(a·b)` term makes entropies of spectrograms taken with
//! different hops and FFT sizes comparable.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::transform::SpectrogramSlab;

/// Values at or below this are not counted as support by the order-0 entropy.
pub const SUPPORT_EPSILON: f64 = 1e-12;

// Orders this close to 1 use the Shannon form; the general formula loses
// all precision there.
const SHANNON_BAND: f64 = 1e-9;

/// Rectangle of lattice points: frames × bins, half-open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub frames: Range<usize>,
    pub bins: Range<usize>,
}

impl Region {
    /// Every frame and the whole frequency axis.
    pub fn full(slab: &SpectrogramSlab) -> Self {
        let (n, k) = slab.power.dim();
        Self { frames: 0..n, bins: 0..k }
    }

    pub fn cell_count(&self) -> usize {
        self.frames.len() * self.bins.len()
    }
}

/// Non-negative values summing to one, with the lattice cell area.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    values: Vec<f64>,
    cell_area: f64,
}

impl Density {
    /// Normalizes `weights` to unit sum.
    pub fn from_weights(mut weights: Vec<f64>, cell_area: f64) -> Result<Self> {
        if !(cell_area.is_finite() && cell_area > 0.0) {
            return Err(Error::InvalidDensity(format!("cell area {cell_area} must be positive")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidDensity(format!("weight {w} is not a non-negative number")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateSegment);
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { values: weights, cell_area })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Entropy order α ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyOrder(f64);

impl EntropyOrder {
    pub const SHANNON: Self = Self(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

impl Default for EntropyOrder {
    fn default() -> Self {
        Self(0.7)
    }
}

/// Restricts `slab` to `region` and normalizes it to unit mass.
///
/// A region without energy yields [`Error::DegenerateSegment`].
pub fn normalize_density(slab: &SpectrogramSlab, region: &Region) -> Result<Density> {
    let (n, k) = slab.power.dim();
    if region.frames.is_empty() || region.bins.is_empty() {
        return Err(Error::InvalidRegion("region is empty".into()));
    }
    if region.frames.end > n || region.bins.end > k {
        return Err(Error::InvalidRegion(format!(
            "region {:?}x{:?} exceeds the {n}x{k} slab",
            region.frames, region.bins
        )));
    }
    let weights = slab.power.slice(ndarray::s![region.frames.clone(), region.bins.clone()]).iter().copied().collect();
    Density::from_weights(weights, slab.cell_area())
}

/// Order-α Rényi entropy of `d`, in bits.
pub fn renyi_entropy(d: &Density, order: EntropyOrder) -> f64 {
    let alpha = order.alpha();
    let area_term = d.cell_area.log2();
    let density_term = if alpha == 0.0 {
        let support = d.values.iter().filter(|&&p| p > SUPPORT_EPSILON).count();
        (support as f64).log2()
    } else if (alpha - 1.0).abs() < SHANNON_BAND {
        -d.values.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
    } else {
        let s: f64 = d.values.iter().filter(|&&p| p > 0.0).map(|&p| p.powf(alpha)).sum();
        s.log2() / (1.0 - alpha)
    };
    density_term + area_term
}
