//! `eventenf`: simulate, extract and evaluate electric network frequency
//! traces from event-camera streams and video.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use eventenf::eenf::extract_eenf_detailed;
use eventenf::evaluate::{emit_report, run_scenario, Report, Scenario};
use eventenf::ingest::{
    read_events_csv, read_frames, read_reference_csv, read_trace_csv, reference_enf, write_events_csv, write_frames,
    write_polarity_csv, write_reference_csv, write_trace_csv, ReferenceSignal,
};
use eventenf::simulate::{mains_signal, simulate_events, simulate_frames, synthesize_enf, Shutter, Texture};
use eventenf::trace::GridConfig;
use eventenf::venf::{extract_venf, Detrend, VenfMode};

use crate::config::Config;

const EXIT_USAGE: u8 = 1;
const EXIT_LOW_CONFIDENCE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "eventenf",
    version,
    about = "Electric network frequency from event cameras and video"
)]
struct Cli {
    /// TOML file with per-module sections overriding the defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a ground-truth ENF trace, a mains recording, an event stream and optionally video.
    Simulate(SimulateArgs),
    /// Estimate ENF from an event stream.
    ExtractEenf(EenfArgs),
    /// Estimate ENF from a frame directory.
    ExtractVenf(VenfArgs),
    /// Compute the reference ENF trace from a mains recording.
    Reference(ReferenceArgs),
    /// Run the synthetic closed-loop experiments.
    Evaluate(EvaluateArgs),
    /// Draw an estimate against a reference trace as SVG (plus CSV).
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 120.0)]
    duration: f64,
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridConfig>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Co-located +/- event pairs per second.
    #[arg(long)]
    motion_rate: Option<f64>,
    /// Background events per second per pixel.
    #[arg(long)]
    noise_rate: Option<f64>,
    /// Also render video frames into OUT_DIR/frames.
    #[arg(long)]
    frames: bool,
    #[arg(long)]
    shutter: Option<Shutter>,
    #[arg(long)]
    fps: Option<f64>,
    #[arg(long, default_value_t = 32)]
    frame_width: usize,
    #[arg(long, default_value_t = 120)]
    frame_rows: usize,
    /// Sample rate of the simulated mains recording.
    #[arg(long, default_value_t = 1000.0)]
    reference_rate: f64,
}

#[derive(Args, Debug)]
struct StftArgs {
    /// STFT window, seconds.
    #[arg(long)]
    window: Option<f64>,
    /// STFT hop, seconds.
    #[arg(long)]
    hop: Option<f64>,
}

#[derive(Args, Debug)]
struct EenfArgs {
    #[arg(long, value_name = "CSV")]
    events: PathBuf,
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridConfig>,
    #[arg(long)]
    delta_t: Option<f64>,
    #[command(flatten)]
    stft: StftArgs,
    /// Highest flicker harmonic to analyse.
    #[arg(long)]
    harmonics: Option<usize>,
    /// Harmonic selection segment, seconds.
    #[arg(long)]
    segment: Option<f64>,
    #[arg(long, value_name = "CSV")]
    out: PathBuf,
    /// Directory for one trace per harmonic.
    #[arg(long, value_name = "DIR")]
    per_harmonic_out: Option<PathBuf>,
    /// File for the voted polarity sequence.
    #[arg(long, value_name = "CSV")]
    polarity_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VenfArgs {
    #[arg(long, value_name = "DIR")]
    frames: PathBuf,
    #[arg(long)]
    mode: Option<VenfMode>,
    #[arg(long)]
    detrend: Option<Detrend>,
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridConfig>,
    #[command(flatten)]
    stft: StftArgs,
    #[arg(long, value_name = "CSV")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReferenceArgs {
    /// Single-column mains recording with a `# sample_rate=` comment.
    #[arg(long, value_name = "CSV")]
    signal: PathBuf,
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridConfig>,
    #[command(flatten)]
    stft: StftArgs,
    #[arg(long, value_name = "CSV")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// static, dynamic, extreme or all.
    #[arg(long, default_value = "all")]
    scenario: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 120.0)]
    duration: f64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long, value_name = "CSV")]
    estimate: PathBuf,
    /// Reference trace, e.g. from `reference`.
    #[arg(long, value_name = "CSV")]
    truth: PathBuf,
    /// SVG path; the CSV goes next to it.
    #[arg(long, value_name = "SVG")]
    out: PathBuf,
    #[arg(long, default_value = "ENF estimate vs reference")]
    title: String,
}

fn parse_grid(s: &str) -> Result<GridConfig, String> {
    let hz: u32 = s.parse().map_err(|_| format!("'{s}' is not 50 or 60"))?;
    GridConfig::new(hz).map_err(|e| e.to_string())
}

enum Outcome {
    Done,
    LowConfidence,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Warn,
        (false, 0) => log::LevelFilter::Info,
        (false, 1) => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .init();

    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::LowConfidence) => ExitCode::from(EXIT_LOW_CONFIDENCE),
        Err(e) => {
            log::error!("{}", describe(&e));
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Joins the error chain, skipping causes already spelled out by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !out.ends_with(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    let io = e.chain().any(|c| {
        c.is::<std::io::Error>() || matches!(c.downcast_ref::<eventenf::Error>(), Some(eventenf::Error::Io { .. }))
    });
    if io {
        EXIT_IO
    } else {
        EXIT_USAGE
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Simulate(a) => simulate(&mut cfg, a),
        Command::ExtractEenf(a) => extract_eenf_cmd(&mut cfg, a),
        Command::ExtractVenf(a) => extract_venf_cmd(&mut cfg, a),
        Command::Reference(a) => reference_cmd(&mut cfg, a),
        Command::Evaluate(a) => evaluate_cmd(&mut cfg, a),
        Command::Plot(a) => plot_cmd(a),
    }
}

fn log_effective(cfg: &Config) {
    log::info!("effective config:\n{}", cfg.to_toml());
}

fn apply_stft(cfg: &mut Config, a: &StftArgs) {
    if let Some(w) = a.window {
        cfg.stft.window_s = w;
    }
    if let Some(h) = a.hop {
        cfg.stft.hop_s = h;
    }
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| {
        eventenf::Error::Io {
            path: dir.to_path_buf(),
            source: e,
        }
        .into()
    })
}

fn simulate(cfg: &mut Config, a: SimulateArgs) -> anyhow::Result<Outcome> {
    if let Some(g) = a.grid {
        cfg.enf.grid = g;
    }
    if let Some(s) = a.seed {
        cfg.enf.seed = s;
    }
    if let Some(r) = a.motion_rate {
        cfg.contamination.motion_pair_rate = r;
    }
    if let Some(r) = a.noise_rate {
        cfg.contamination.noise_rate = r;
    }
    if let Some(s) = a.shutter {
        cfg.frames.shutter = s;
    }
    if let Some(f) = a.fps {
        cfg.frames.fps = f;
    }
    if cfg.frames.shutter == Shutter::Rolling && cfg.frames.row_readout == 0.0 {
        cfg.frames.row_readout = 1.0 / (cfg.frames.fps * a.frame_rows as f64);
    }
    log_effective(cfg);
    let seed = cfg.enf.seed;
    create_dir(&a.out_dir)?;

    let enf = synthesize_enf(&cfg.enf, a.duration, 0.01)?;
    write_trace_csv(&enf, a.out_dir.join("truth.csv"))?;
    let mains = ReferenceSignal::new(a.reference_rate, mains_signal(&enf, a.reference_rate)?)?;
    write_reference_csv(&mains, a.out_dir.join("reference.csv"))?;
    let stream = simulate_events(&cfg.sensor, &cfg.illumination, &enf, &cfg.contamination, seed)?;
    log::info!("simulated {} events over {} s", stream.len(), a.duration);
    write_events_csv(&stream, a.out_dir.join("events.csv"))?;
    if a.frames {
        let texture = Texture::smooth(a.frame_width, a.frame_rows, 0.05, 0.95, seed);
        let frames = simulate_frames(&cfg.illumination, &enf, &cfg.frames, &texture)?;
        log::info!("rendered {} frames", frames.frames.len());
        write_frames(&frames, a.out_dir.join("frames"))?;
    }
    Ok(Outcome::Done)
}

fn extract_eenf_cmd(cfg: &mut Config, a: EenfArgs) -> anyhow::Result<Outcome> {
    if let Some(g) = a.grid {
        cfg.enf.grid = g;
    }
    if let Some(d) = a.delta_t {
        cfg.sampling.delta_t = d;
    }
    apply_stft(cfg, &a.stft);
    if let Some(m) = a.harmonics {
        cfg.harmonics.max_order_m = m;
    }
    if let Some(s) = a.segment {
        cfg.harmonics.segment_s = s;
    }
    log_effective(cfg);
    let stream = read_events_csv(&a.events)?;
    log::info!("read {} events from {}", stream.len(), a.events.display());
    let result = extract_eenf_detailed(&stream, &cfg.sampling, &cfg.stft, &cfg.harmonics, cfg.enf.grid)?;
    write_trace_csv(&result.trace, &a.out)?;
    if let Some(dir) = &a.per_harmonic_out {
        create_dir(dir)?;
        for h in result.harmonics.iter() {
            write_trace_csv(&h.trace, dir.join(format!("harmonic_{}.csv", h.order)))?;
        }
    }
    if let Some(p) = &a.polarity_out {
        write_polarity_csv(&result.polarity, p)?;
    }
    for s in &result.selection.segments {
        log::debug!(
            "segment start={} len={} order={} score={:.6} prominence_db={:?} low_confidence={}",
            s.start,
            s.len,
            s.order,
            s.score,
            s.prominence_db,
            s.low_confidence
        );
    }
    if result.all_low_confidence() {
        log::warn!("no segment has a trustworthy spectral peak");
        return Ok(Outcome::LowConfidence);
    }
    Ok(Outcome::Done)
}

fn extract_venf_cmd(cfg: &mut Config, a: VenfArgs) -> anyhow::Result<Outcome> {
    if let Some(m) = a.mode {
        cfg.venf.mode = m;
    }
    if let Some(d) = a.detrend {
        cfg.venf.detrend = d;
    }
    if let Some(g) = a.grid {
        cfg.venf.grid = g;
    }
    apply_stft(cfg, &a.stft);
    cfg.venf.stft = cfg.stft;
    log_effective(cfg);
    let frames = read_frames(&a.frames)?;
    log::info!("read {} frames from {}", frames.frames.len(), a.frames.display());
    let trace = extract_venf(&frames, &cfg.venf)?;
    write_trace_csv(&trace, &a.out)?;
    Ok(Outcome::Done)
}

fn reference_cmd(cfg: &mut Config, a: ReferenceArgs) -> anyhow::Result<Outcome> {
    if let Some(g) = a.grid {
        cfg.enf.grid = g;
    }
    apply_stft(cfg, &a.stft);
    log_effective(cfg);
    let sig = read_reference_csv(&a.signal)?;
    let trace = reference_enf(&sig, &cfg.stft, cfg.enf.grid)?;
    write_trace_csv(&trace, &a.out)?;
    Ok(Outcome::Done)
}

fn evaluate_cmd(cfg: &mut Config, a: EvaluateArgs) -> anyhow::Result<Outcome> {
    let scenarios: Vec<Scenario> = match a.scenario.as_str() {
        "all" => Scenario::ALL.to_vec(),
        s => vec![s
            .parse()
            .context("--scenario must be static, dynamic, extreme or all")?],
    };
    if a.seeds.is_empty() {
        anyhow::bail!("--seeds needs at least one seed");
    }
    log_effective(cfg);
    let mut report = Report::default();
    for s in scenarios {
        report.merge(run_scenario(s, &cfg.evaluate, &a.seeds, a.duration)?);
    }
    emit_report(&report, &a.out)?;
    for (s, m) in report.summaries() {
        log::info!(
            "{s}: E-ENF cc={:.4} mae={:.2e}, V-ENF cc={:.4} mae={:.2e}",
            m.eenf_cc,
            m.eenf_mae,
            m.venf_cc,
            m.venf_mae
        );
    }
    Ok(Outcome::Done)
}

fn plot_cmd(a: PlotArgs) -> anyhow::Result<Outcome> {
    let estimate = read_trace_csv(&a.estimate)?;
    let truth = read_trace_csv(&a.truth)?;
    eventenf::plot::write_overlay(&estimate, &truth, &a.title, &a.out)?;
    Ok(Outcome::Done)
}
