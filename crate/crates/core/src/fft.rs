use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

pub(crate) fn forward(len: usize) -> Arc<dyn RealToComplex<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse(len: usize) -> Arc<dyn ComplexToReal<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Unnormalized real-to-complex transform of `input` into `output`
/// (`input.len()/2 + 1` bins). `input` is clobbered.
pub(crate) fn rfft(plan: &dyn RealToComplex<f64>, input: &mut [f64], output: &mut [Complex64]) {
    plan.process(input, output).expect("buffer sizes are fixed by the plan");
}

/// Inverse of [`rfft`], scaled by `1/len` so that `irfft(rfft(x)) == x`.
/// The imaginary parts of the DC and Nyquist bins are dropped, which is the
/// Hermitian projection of an arbitrary half spectrum.
pub(crate) fn irfft(plan: &dyn ComplexToReal<f64>, spectrum: &mut [Complex64], output: &mut [f64]) {
    let n = output.len();
    spectrum[0].im = 0.0;
    if n.is_multiple_of(2) {
        spectrum[n / 2].im = 0.0;
    }
    plan.process(spectrum, output).expect("buffer sizes are fixed by the plan");
    let scale = 1.0 / n as f64;
    output.iter_mut().for_each(|v| *v *= scale);
}
