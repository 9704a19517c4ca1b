#![allow(dead_code)]

use adaspec::signal::{gen_fm_sinusoid, gen_impulse, gen_sinusoid, gen_struck_tone};
use adaspec::Signal;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SR: u32 = 44_100;

// Box-Muller
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn white_noise(duration: f64, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (duration * SR as f64).round() as usize;
    Signal::new((0..n).map(|_| 0.25 * gaussian(&mut rng)).collect(), SR).unwrap()
}

pub fn sinusoid(duration: f64) -> Signal {
    gen_sinusoid(440.0, duration, SR, 1.0).unwrap()
}

/// Slow FM: both the stationary and the sweeping regime occur every half
/// period.
pub fn fm(duration: f64) -> Signal {
    gen_fm_sinusoid(2000.0, 2.0, 300.0, duration, SR).unwrap()
}

pub fn impulse(duration: f64) -> Signal {
    let n = (duration * SR as f64).round() as usize;
    gen_impulse(n / 2, duration, SR).unwrap()
}

/// Struck B4 bar: click at 0.2 s then decaying partials.
pub fn struck(duration: f64) -> Signal {
    gen_struck_tone(493.88, 0.2, duration, SR).unwrap()
}

pub fn snr_db(reference: &Signal, estimate: &Signal) -> f64 {
    let (sig, err) = reference
        .samples()
        .iter()
        .zip(estimate.samples())
        .fold((0.0, 0.0), |(s, e), (a, b)| (s + a * a, e + (a - b) * (a - b)));
    10.0 * (sig / err).log10()
}

pub fn max_abs_diff(a: &Signal, b: &Signal) -> f64 {
    a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Least-squares signal for `coeffs` by brute force: build the analysis
/// operator as a dense real matrix (full conjugate-symmetric spectrum) and
/// solve the normal equations.
pub fn normal_equations_solution(
    coeffs: &adaspec::transform::StftMatrix,
    window: &[f64],
    signal_len: usize,
) -> Vec<f64> {
    use nalgebra::{DMatrix, DVector};
    use std::f64::consts::PI;

    let n_fft = coeffs.fft_size;
    let half = coeffs.bins();
    let rows = coeffs.frame_count() * n_fft * 2;
    let mut a = DMatrix::<f64>::zeros(rows, signal_len);
    let mut b = DVector::<f64>::zeros(rows);
    let mut r = 0;
    for n in 0..coeffs.frame_count() {
        let start = coeffs.frame_start(n);
        for k in 0..n_fft {
            let c = if k < half { coeffs.coeffs[[n, k]] } else { coeffs.coeffs[[n, n_fft - k]].conj() };
            for (t, w) in window.iter().enumerate() {
                let l = start + t as i64;
                if l < 0 || l >= signal_len as i64 {
                    continue;
                }
                let phi = -2.0 * PI * (k * t) as f64 / n_fft as f64;
                a[(r, l as usize)] = w * phi.cos();
                a[(r + 1, l as usize)] = w * phi.sin();
            }
            b[r] = c.re;
            b[r + 1] = c.im;
            r += 2;
        }
    }
    let ata = a.transpose() * &a;
    let atb = a.transpose() * b;
    ata.cholesky().expect("operator has full column rank").solve(&atb).iter().copied().collect()
}

pub fn relative_l2(reference: &[f64], estimate: &[f64]) -> f64 {
    let (num, den) =
        reference.iter().zip(estimate).fold((0.0, 0.0), |(n, d), (a, b)| (n + (a - b) * (a - b), d + a * a));
    (num / den).sqrt()
}
