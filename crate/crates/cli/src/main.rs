mod generator;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaspec::adapt::{adapt_signal, plan_segments, render_display_grid, SegmentPlan};
use adaspec::entropy::EntropyOrder;
use adaspec::frames::{build_multiframe, MultiFrame};
use adaspec::resynth::reconstruct_adapted;
use adaspec::signal::{load_wav, save_wav};
use adaspec::transform::{covering_frames, spectrogram, stft};
use adaspec::Signal;
use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use ndarray::Array2;
use serde::Serialize;

/// Adaptive-resolution spectrograms: per segment, the window whose
/// spectrogram has the lowest Rényi entropy is kept.
#[derive(Parser)]
#[command(name = "adaspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the selection report, the adapted spectrogram and optionally
    /// one fixed-window spectrogram per window.
    Analyze(AnalyzeArgs),
    /// Reconstruct the signal from the adapted analysis and report the SNR.
    Roundtrip(RoundtripArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "gen"])))]
struct RunArgs {
    /// Input WAV file.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Synthetic input, e.g. sin:freq=440,dur=2 or fm:carrier=2000,rate=4,depth=1500,dur=4.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long, value_name = "N", default_value_t = 512)]
    win_min: usize,
    #[arg(long, value_name = "N", default_value_t = 4096)]
    win_max: usize,
    #[arg(long, value_name = "N", default_value_t = 8)]
    num_windows: usize,
    /// Frame overlap as a fraction of the window length.
    #[arg(long, value_name = "F", default_value_t = 0.75)]
    overlap: f64,
    /// Rényi entropy order.
    #[arg(long, value_name = "F", default_value_t = 0.7)]
    alpha: f64,
    /// Segment length in frames of the largest window.
    #[arg(long, value_name = "N", default_value_t = 4)]
    frames_per_segment: usize,
    /// Frames of the largest window shared by consecutive segments.
    #[arg(long, value_name = "N", default_value_t = 2)]
    overlap_frames: usize,
    /// FFT size; defaults to the next power of two above the largest window.
    #[arg(long, value_name = "N")]
    fft_size: Option<usize>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Also write the spectrogram of every window over the whole signal.
    #[arg(long)]
    emit_fixed_spectrograms: bool,
}

#[derive(Args)]
struct RoundtripArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Drops half of the retained slices before reconstructing.
    #[arg(long, hide = true)]
    corrupt_coverage: bool,
}

const SNR_THRESHOLD_DB: f64 = 120.0;

struct Setup {
    signal: Signal,
    mf: MultiFrame,
    plan: SegmentPlan,
    alpha: EntropyOrder,
    out: PathBuf,
}

/// Everything that can be checked without touching the output directory.
fn validate(args: &RunArgs) -> Result<Setup> {
    if args.threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    let alpha = EntropyOrder::new(args.alpha).context("--alpha")?;
    let mut mf = build_multiframe(args.win_min, args.win_max, args.num_windows, args.overlap)
        .context("--win-min/--win-max/--num-windows/--overlap")?;
    if let Some(n) = args.fft_size {
        mf = mf.with_fft_size(n).context("--fft-size")?;
    }
    let signal = match (&args.input, &args.gen) {
        (Some(path), _) => load_wav(path)?,
        (None, Some(spec)) => generator::generate(spec).context("--gen")?,
        (None, None) => unreachable!("clap enforces an input"),
    };
    let plan = plan_segments(signal.len(), &mf, args.frames_per_segment, args.overlap_frames)
        .context("--frames-per-segment/--overlap-frames")?;
    if args.out.exists() && !args.out.is_dir() {
        bail!("--out {} exists and is not a directory", args.out.display());
    }
    Ok(Setup { signal, mf, plan, alpha, out: args.out.clone() })
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Sidecar {
    rows: usize,
    cols: usize,
    time_step_s: f64,
    freq_step_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    window_len: Option<usize>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `power` as little-endian float-32, row-major, plus a JSON sidecar.
fn write_matrix(dir: &Path, stem: &str, power: &Array2<f64>, sidecar: &Sidecar) -> Result<()> {
    let path = dir.join(format!("{stem}.f32"));
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for v in power.iter() {
        w.write_all(&(*v as f32).to_le_bytes())?;
    }
    w.flush()?;
    write_json(&dir.join(format!("{stem}.json")), sidecar)
}

fn analyze(args: &AnalyzeArgs, setup: Setup) -> Result<()> {
    init_threads(args.run.threads)?;
    let (aa, report) = adapt_signal(&setup.signal, &setup.mf, setup.alpha, &setup.plan)?;
    fs::create_dir_all(&setup.out).with_context(|| format!("creating {}", setup.out.display()))?;

    write_json(&setup.out.join("report.json"), &report)?;
    let grid = render_display_grid(&aa);
    let sidecar = Sidecar {
        rows: grid.rows(),
        cols: grid.cols(),
        time_step_s: grid.time_step_s,
        freq_step_hz: grid.freq_step_hz,
        window_len: None,
    };
    write_matrix(&setup.out, "spectrogram", &grid.power, &sidecar)?;

    if args.emit_fixed_spectrograms {
        let sr = setup.signal.sample_rate() as f64;
        for (id, w) in setup.mf.windows().iter().enumerate() {
            let hop = setup.mf.hop(id);
            let (start, count) = covering_frames(setup.signal.len(), w.len(), hop);
            let slab = spectrogram(&stft(&setup.signal, w, hop, setup.mf.fft_size(), start, count)?);
            let sidecar = Sidecar {
                rows: slab.power.nrows(),
                cols: slab.power.ncols(),
                time_step_s: hop as f64 / sr,
                freq_step_hz: slab.freq_step_b,
                window_len: Some(w.len()),
            };
            write_matrix(&setup.out, &format!("fixed_{}", w.len()), &slab.power, &sidecar)?;
        }
    }

    let chosen = report.chosen();
    let degenerate = report.segments.iter().filter(|s| s.degenerate).count();
    println!(
        "{} segments ({degenerate} silent), {} transitions, windows used: {:?}",
        chosen.len(),
        aa.transitions.len(),
        used_lengths(&setup.mf, &chosen)
    );
    println!("wrote {}", setup.out.display());
    Ok(())
}

fn used_lengths(mf: &MultiFrame, chosen: &[usize]) -> Vec<usize> {
    let mut ids = chosen.to_vec();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter().map(|id| mf.window(id).len()).collect()
}

fn snr_db(reference: &Signal, estimate: &Signal) -> f64 {
    let (sig, err) = reference
        .samples()
        .iter()
        .zip(estimate.samples())
        .fold((0.0, 0.0), |(s, e), (a, b)| (s + a * a, e + (a - b) * (a - b)));
    if err == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (sig / err).log10()
    }
}

fn roundtrip(args: &RoundtripArgs, setup: Setup) -> Result<bool> {
    init_threads(args.run.threads)?;
    let (mut aa, _) = adapt_signal(&setup.signal, &setup.mf, setup.alpha, &setup.plan)?;
    if args.corrupt_coverage {
        let keep = aa.slices.len() / 2;
        aa.slices.truncate(keep);
    }
    let rebuilt = reconstruct_adapted(&aa)?;
    fs::create_dir_all(&setup.out).with_context(|| format!("creating {}", setup.out.display()))?;
    let path = setup.out.join("reconstructed.wav");
    save_wav(&rebuilt, &path)?;
    let snr = snr_db(&setup.signal, &rebuilt);
    println!("SNR: {snr:.2} dB");
    println!("wrote {}", path.display());
    Ok(snr >= SNR_THRESHOLD_DB)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match &cli.command {
        Command::Analyze(args) => &args.run,
        Command::Roundtrip(args) => &args.run,
    };
    let setup = match validate(run) {
        Ok(setup) => setup,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Analyze(args) => analyze(args, setup).map(|()| true),
        Command::Roundtrip(args) => roundtrip(args, setup),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: reconstruction SNR below {SNR_THRESHOLD_DB} dB");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
