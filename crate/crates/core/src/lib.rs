//! Time-adapted spectrograms.
//!
//! A signal is cut into overlapping analysis segments. Inside each segment a
//! family of Hanning windows of different lengths (a multiple Gabor frame whose
//! members all share the same overlap ratio) is evaluated, and the window whose
//! spectrogram has the lowest Rényi entropy is retained. The retained
//! variable-window, variable-hop coefficients are assembled into a display
//! grid and can be inverted exactly by weighted overlap-add.
//!
//! ```no_run
//! use adaspec::{adapt, frames, resynth, signal, entropy::EntropyOrder};
//!
//! let sig = signal::gen_fm_sinusoid(2000.0, 2.0, 300.0, 4.0, 44_100).unwrap();
//! let mf = frames::build_multiframe(512, 4096, 8, 0.75).unwrap();
//! let plan = adapt::plan_segments(sig.len(), &mf, 4, 3).unwrap();
//! let alpha = EntropyOrder::new(0.7).unwrap();
//! let (analysis, report) = adapt::adapt_signal(&sig, &mf, alpha, &plan).unwrap();
//! let rebuilt = resynth::reconstruct_adapted(&analysis).unwrap();
//! assert_eq!(rebuilt.len(), sig.len());
//! # let _ = report;
//! ```

pub mod adapt;
pub mod entropy;
pub mod error;
mod fft;
pub mod frames;
pub mod resynth;
pub mod signal;
pub mod transform;

pub use error::{Error, Result};
pub use signal::Signal;
