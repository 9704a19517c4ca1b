//! Mono signals, WAV I/O and the synthetic fixtures used throughout the
//! test-suite (sinusoids, FM sinusoids, impulses and a struck-bar surrogate).

use std::f64::consts::PI;
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

/// A sampled mono waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if sample_rate == 0 {
            return Err(Error::InvalidSignal("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidSignal(format!("non-finite sample at index {i}")));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }

    /// Sample at a possibly out-of-range index; the signal is zero outside.
    #[inline]
    pub fn get(&self, index: i64) -> f64 {
        if index < 0 {
            0.0
        } else {
            self.samples.get(index as usize).copied().unwrap_or(0.0)
        }
    }
}

/// Reads a PCM16, PCM24 or float-32 WAV file, mixing stereo down to mono.
pub fn load_wav(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let read_err = |source| Error::Read { path: path.to_owned(), source };
    let mut reader = WavReader::open(path).map_err(|e| match e {
        hound::Error::Unsupported => Error::UnsupportedCodec("only PCM and IEEE float WAV are supported".into()),
        e => read_err(e),
    })?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels != 1 && channels != 2 {
        return Err(Error::UnsupportedCodec(format!("{channels} channels")));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (16 | 24)) => {
            let scale = 1.0 / (1u32 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(read_err)?
        }
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(read_err)?,
        (format, bits) => {
            return Err(Error::UnsupportedCodec(format!("{bits}-bit {format:?}")));
        }
    };

    let samples =
        if channels == 1 { interleaved } else { interleaved.chunks_exact(2).map(|lr| 0.5 * (lr[0] + lr[1])).collect() };
    Signal::new(samples, spec.sample_rate)
}

/// Writes a mono IEEE float-32 WAV.
pub fn save_wav(signal: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let write_err = |source| Error::Write { path: path.to_owned(), source };
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(write_err)?;
    for &s in &signal.samples {
        writer.write_sample(s as f32).map_err(write_err)?;
    }
    writer.finalize().map_err(write_err)
}

fn sample_count(duration: f64, sample_rate: u32) -> Result<usize> {
    if sample_rate == 0 {
        return Err(Error::InvalidGenerator("sample rate must be positive".into()));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidGenerator(format!("duration must be positive, got {duration}")));
    }
    let n = (duration * sample_rate as f64).round() as usize;
    if n == 0 {
        return Err(Error::InvalidGenerator("duration yields no samples".into()));
    }
    Ok(n)
}

#[inline]
fn carrier_phase(freq: f64, n: usize, sample_rate: u32) -> f64 {
    2.0 * PI * freq * n as f64 / sample_rate as f64
}

/// `amplitude * sin(2π·freq·t)`.
pub fn gen_sinusoid(freq: f64, duration: f64, sample_rate: u32, amplitude: f64) -> Result<Signal> {
    let nyquist = sample_rate as f64 / 2.0;
    if !(freq > 0.0 && freq < nyquist) {
        return Err(Error::InvalidGenerator(format!("frequency {freq} Hz outside (0, {nyquist}) Hz")));
    }
    let n = sample_count(duration, sample_rate)?;
    let samples = (0..n).map(|i| amplitude * carrier_phase(freq, i, sample_rate).sin()).collect();
    Signal::new(samples, sample_rate)
}

/// Unit-amplitude sinusoid with instantaneous frequency
/// `carrier + mod_depth·cos(2π·mod_rate·t)`.
pub fn gen_fm_sinusoid(carrier: f64, mod_rate: f64, mod_depth: f64, duration: f64, sample_rate: u32) -> Result<Signal> {
    let nyquist = sample_rate as f64 / 2.0;
    let depth = mod_depth.abs();
    if !(carrier - depth > 0.0 && carrier + depth < nyquist) {
        return Err(Error::InvalidGenerator(format!(
            "instantaneous frequency {carrier}±{depth} Hz leaves (0, {nyquist}) Hz"
        )));
    }
    if depth > 0.0 && !(mod_rate.is_finite() && mod_rate > 0.0) {
        return Err(Error::InvalidGenerator(format!("modulation rate must be positive, got {mod_rate}")));
    }
    let n = sample_count(duration, sample_rate)?;
    let sr = sample_rate as f64;
    let samples = (0..n)
        .map(|i| {
            let mut phase = carrier_phase(carrier, i, sample_rate);
            if mod_depth != 0.0 {
                phase += (mod_depth / mod_rate) * (2.0 * PI * mod_rate * i as f64 / sr).sin();
            }
            phase.sin()
        })
        .collect();
    Signal::new(samples, sample_rate)
}

/// A single unit sample at `position`.
pub fn gen_impulse(position: usize, duration: f64, sample_rate: u32) -> Result<Signal> {
    let n = sample_count(duration, sample_rate)?;
    if position >= n {
        return Err(Error::InvalidGenerator(format!("impulse position {position} outside signal of {n} samples")));
    }
    let mut samples = vec![0.0; n];
    samples[position] = 1.0;
    Signal::new(samples, sample_rate)
}

// (frequency ratio, relative amplitude, decay time in seconds)
const BAR_PARTIALS: [(f64, f64, f64); 3] = [(1.0, 1.0, 0.5), (3.9, 0.3, 0.15), (9.2, 0.1, 0.05)];
const BAR_TAIL_GAIN: f64 = 0.05;

/// Struck-bar surrogate: a unit click at `onset` seconds followed by
/// exponentially decaying, inharmonic partials of `fundamental`.
pub fn gen_struck_tone(fundamental: f64, onset: f64, duration: f64, sample_rate: u32) -> Result<Signal> {
    let n = sample_count(duration, sample_rate)?;
    let sr = sample_rate as f64;
    let top = BAR_PARTIALS.iter().map(|p| p.0).fold(0.0, f64::max) * fundamental;
    if !(fundamental > 0.0 && top < sr / 2.0) {
        return Err(Error::InvalidGenerator(format!("partials of {fundamental} Hz exceed the Nyquist frequency")));
    }
    let start = (onset * sr).round();
    if !(start >= 0.0 && (start as usize) < n) {
        return Err(Error::InvalidGenerator(format!("onset {onset} s outside the signal")));
    }
    let start = start as usize;
    let mut samples = vec![0.0; n];
    samples[start] = 1.0;
    for (i, s) in samples[start..].iter_mut().enumerate() {
        let t = i as f64 / sr;
        let tail: f64 = BAR_PARTIALS
            .iter()
            .map(|&(ratio, amp, decay)| amp * (-t / decay).exp() * (2.0 * PI * ratio * fundamental * t).sin())
            .sum();
        *s += BAR_TAIL_GAIN * tail;
    }
    Signal::new(samples, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_pcm(path: &Path, spec: WavSpec, samples: &[i32]) {
        let mut w = WavWriter::create(path, spec).unwrap();
        for &s in samples {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn pcm16_is_scaled_by_full_scale() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let spec = WavSpec { channels: 1, sample_rate: 22_050, bits_per_sample: 16, sample_format: SampleFormat::Int };
        write_pcm(&path, spec, &[0, 16384]);
        let s = load_wav(&path).unwrap();
        assert_eq!(s.samples(), &[0.0, 0.5]);
        assert_eq!(s.sample_rate(), 22_050);
    }

    #[test]
    fn pcm24_is_scaled_by_full_scale() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let spec = WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 24, sample_format: SampleFormat::Int };
        write_pcm(&path, spec, &[-(1 << 23), 1 << 21]);
        let s = load_wav(&path).unwrap();
        assert_eq!(s.samples(), &[-1.0, 0.25]);
    }

    #[test]
    fn stereo_is_averaged() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec =
            WavSpec { channels: 2, sample_rate: 44_100, bits_per_sample: 32, sample_format: SampleFormat::Float };
        let mut w = WavWriter::create(&path, spec).unwrap();
        w.write_sample(1.0f32).unwrap();
        w.write_sample(0.0f32).unwrap();
        w.finalize().unwrap();
        assert_eq!(load_wav(&path).unwrap().samples(), &[0.5]);
    }

    fn mulaw_file(path: &Path) {
        // 16-byte fmt chunk with format tag 7 (mu-law), 8 bits, one sample.
        let mut b = Vec::new();
        b.extend_from_slice(b"RIFF");
        b.extend_from_slice(&37u32.to_le_bytes());
        b.extend_from_slice(b"WAVEfmt ");
        b.extend_from_slice(&16u32.to_le_bytes());
        b.extend_from_slice(&7u16.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&8000u32.to_le_bytes());
        b.extend_from_slice(&8000u32.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&8u16.to_le_bytes());
        b.extend_from_slice(b"data");
        b.extend_from_slice(&1u32.to_le_bytes());
        b.push(0xff);
        std::fs::write(path, b).unwrap();
    }

    #[test]
    fn mulaw_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.wav");
        mulaw_file(&path);
        let err = load_wav(&path).unwrap_err();
        assert!(matches!(err, Error::UnsupportedCodec(_)), "{err}");
        assert!(err.to_string().starts_with("unsupported codec"));
    }

    #[test]
    fn pcm8_and_zero_length_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p8 = dir.path().join("8.wav");
        let spec = WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 8, sample_format: SampleFormat::Int };
        write_pcm(&p8, spec, &[3]);
        assert!(matches!(load_wav(&p8), Err(Error::UnsupportedCodec(_))));

        let p0 = dir.path().join("0.wav");
        let spec = WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 16, sample_format: SampleFormat::Int };
        write_pcm(&p0, spec, &[]);
        assert!(matches!(load_wav(&p0), Err(Error::EmptySignal)));

        assert!(matches!(load_wav(dir.path().join("missing.wav")), Err(Error::Read { .. })));
    }

    #[test]
    fn save_round_trip_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.wav");
        let s = Signal::new(vec![0.0, 0.5, -0.25], 44_100).unwrap();
        save_wav(&s, &path).unwrap();
        assert_eq!(load_wav(&path).unwrap(), s);
        let spec = WavReader::open(&path).unwrap().spec();
        assert_eq!(spec.sample_rate, 44_100);
        assert_eq!((spec.bits_per_sample, spec.sample_format), (32, SampleFormat::Float));
    }

    #[test]
    fn empty_signals_cannot_exist_or_be_saved() {
        assert!(matches!(Signal::new(vec![], 44_100), Err(Error::EmptySignal)));
        let s = Signal { samples: vec![], sample_rate: 1 };
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(save_wav(&s, dir.path().join("e.wav")), Err(Error::EmptySignal)));
    }

    #[test]
    fn unwritable_path_errors() {
        let s = Signal::new(vec![0.0], 8000).unwrap();
        let err = save_wav(&s, "/nonexistent-dir/x.wav").unwrap_err();
        assert!(matches!(err, Error::Write { .. }));
    }

    #[test]
    fn quarter_rate_sinusoid() {
        let s = gen_sinusoid(11_025.0, 0.001, 44_100, 1.0).unwrap();
        for (i, expect) in [0.0, 1.0, 0.0, -1.0, 0.0].iter().enumerate() {
            assert!((s.samples()[i] - expect).abs() < 1e-12);
        }
        assert!(gen_sinusoid(440.0, 0.01, 8000, 0.0).unwrap().samples().iter().all(|&v| v == 0.0));
        assert_eq!(gen_sinusoid(440.0, 1.0, 44_100, 1.0).unwrap().len(), 44_100);
        assert!(gen_sinusoid(4000.0, 1.0, 8000, 1.0).is_err());
        assert!(gen_sinusoid(-1.0, 1.0, 8000, 1.0).is_err());
    }

    #[test]
    fn fm_instantaneous_frequency_by_phase_differencing() {
        let (sr, carrier, rate, depth) = (16_000u32, 3000.0, 5.0, 1200.0);
        let n = 16_000;
        // Same phase law the generator uses, differenced numerically.
        let phase = |i: usize| {
            let t = i as f64 / sr as f64;
            2.0 * PI * carrier * t + (depth / rate) * (2.0 * PI * rate * t).sin()
        };
        for i in (1..n - 1).step_by(97) {
            let f_num = (phase(i + 1) - phase(i - 1)) / 2.0 * sr as f64 / (2.0 * PI);
            let t = i as f64 / sr as f64;
            let f_exact = carrier + depth * (2.0 * PI * rate * t).cos();
            // central difference of a sinusoidal phase: relative error ~ (ω/sr)²/6
            assert!((f_num - f_exact).abs() < 0.05, "{f_num} vs {f_exact}");
        }
        let s = gen_fm_sinusoid(carrier, rate, depth, 1.0, sr).unwrap();
        for i in (0..n).step_by(101) {
            assert!((s.samples()[i] - phase(i).sin()).abs() < 1e-9);
        }
        assert!(gen_fm_sinusoid(8000.0, 4.0, 6000.0, 1.0, 16_000).is_err());
        assert!(gen_fm_sinusoid(1000.0, 4.0, 1000.0, 1.0, 16_000).is_err());
    }

    #[test]
    fn impulse_contract() {
        let s = gen_impulse(0, 0.01, 8000).unwrap();
        assert_eq!(s.samples()[0], 1.0);
        assert!(s.samples()[1..].iter().all(|&v| v == 0.0));
        assert_eq!(s.energy(), 1.0);
        assert!(gen_impulse(80, 0.01, 8000).is_err());
    }

    #[test]
    fn struck_tone_starts_with_click() {
        let s = gen_struck_tone(493.88, 0.1, 1.0, 44_100).unwrap();
        assert!(s.samples()[..4410].iter().all(|&v| v == 0.0));
        assert_eq!(s.samples()[4410], 1.0);
        assert!(s.samples().iter().all(|v| v.abs() <= 1.0));
        assert!(s.samples()[4411..].iter().any(|&v| v != 0.0));
    }

    proptest! {
        #[test]
        fn float_round_trip_is_bit_exact(v in prop::collection::vec(-1.0f32..1.0, 1..200), sr in 1u32..200_000) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p.wav");
            let s = Signal::new(v.iter().map(|&x| x as f64).collect(), sr).unwrap();
            save_wav(&s, &path).unwrap();
            let back = load_wav(&path).unwrap();
            prop_assert_eq!(back.sample_rate(), sr);
            for (a, b) in back.samples().iter().zip(s.samples()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn generators_respect_amplitude_bound(freq in 20.0f64..10_000.0, amp in 0.0f64..2.0,
                                              rate in 0.5f64..20.0, depth in 0.0f64..900.0) {
            let s = gen_sinusoid(freq, 0.05, 44_100, amp).unwrap();
            prop_assert!(s.samples().iter().all(|v| v.abs() <= amp + 1e-12));
            let fm = gen_fm_sinusoid(freq.max(1000.0), rate, depth, 0.05, 44_100).unwrap();
            prop_assert!(fm.samples().iter().all(|v| v.abs() <= 1.0));
        }

        #[test]
        fn unmodulated_fm_equals_sinusoid(freq in 1.0f64..20_000.0, rate in 0.0f64..30.0) {
            let a = gen_fm_sinusoid(freq, rate, 0.0, 0.02, 44_100).unwrap();
            let b = gen_sinusoid(freq, 0.02, 44_100, 1.0).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
