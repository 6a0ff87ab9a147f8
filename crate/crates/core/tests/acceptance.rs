//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::time::Instant;

use eventenf::eenf::{
    harmonic_select, spatial_vote, stft_peak_track, temporal_sample, HarmonicConfig, HarmonicTraces, HarmonicTrack,
    SamplingConfig, StftConfig,
};
use eventenf::evaluate::{emit_report, run_scenario, run_seed, Scenario, ScenarioParams, SeedOutcome};
use eventenf::event::{Event, EventStream, Polarity};
use eventenf::ingest::{
    reference_enf, write_events_csv, write_frames, write_polarity_csv, write_reference_csv, write_trace_csv,
    ReferenceSignal,
};
use eventenf::metrics::mae;
use eventenf::simulate::{
    log_expansion_coeffs, mains_signal, simulate_events, simulate_frames, synthesize_enf, ContaminationConfig,
    EnfProcessConfig, FrameParams, IlluminationModel, SensorConfig, Shutter, Texture,
};
use eventenf::trace::{EnfTrace, GridConfig};
use eventenf::venf::{extract_venf, Detrend, VenfConfig, VenfMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const SEEDS: [u64; 3] = [1, 2, 3];
const DURATION: f64 = 120.0;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// Closed-loop runs shared by the first three criteria.
struct Runs {
    static_: Vec<(SeedOutcome, f64)>,
    dynamic: Vec<SeedOutcome>,
    extreme: Vec<SeedOutcome>,
}

fn closed_loop() -> Result<Runs, String> {
    let params = ScenarioParams::default();
    let run =
        |s: Scenario, seed: u64| run_seed(s, &params, seed, DURATION).map_err(|e| format!("{s} seed {seed}: {e}"));
    let mut static_ = Vec::new();
    for seed in SEEDS {
        let started = Instant::now();
        let o = run(Scenario::Static, seed)?;
        static_.push((o, started.elapsed().as_secs_f64()));
    }
    let dynamic = SEEDS
        .iter()
        .map(|&s| run(Scenario::Dynamic, s))
        .collect::<Result<_, _>>()?;
    let extreme = SEEDS
        .iter()
        .map(|&s| run(Scenario::Extreme, s))
        .collect::<Result<_, _>>()?;
    Ok(Runs {
        static_,
        dynamic,
        extreme,
    })
}

fn static_closed_loop(r: &Runs) -> Outcome {
    let cc = mean(r.static_.iter().map(|(o, _)| o.eenf_cc));
    let err = mean(r.static_.iter().map(|(o, _)| o.eenf_mae));
    let slowest = r.static_.iter().map(|(_, t)| *t).fold(0.0, f64::max);
    check(
        cc >= 0.98 && err <= 2e-3 && slowest <= 60.0,
        format!("mean CC {cc:.4} (>= 0.98), mean MAE {err:.2e} Hz (<= 2e-3), slowest seed {slowest:.1} s (<= 60)"),
    )
}

fn dynamic_closed_loop(r: &Runs) -> Outcome {
    let cc = mean(r.dynamic.iter().map(|o| o.eenf_cc));
    let v_dyn = mean(r.dynamic.iter().map(|o| o.venf_cc));
    let v_static = mean(r.static_.iter().map(|(o, _)| o.venf_cc));
    check(
        cc >= 0.95 && v_dyn < v_static,
        format!("E-ENF mean CC {cc:.4} (>= 0.95); V-ENF CC dynamic {v_dyn:.6} < static {v_static:.6}"),
    )
}

fn extreme_lighting(r: &Runs) -> Outcome {
    let err = mean(r.extreme.iter().map(|o| o.eenf_mae));
    let base = mean(r.static_.iter().map(|(o, _)| o.eenf_mae));
    let rel = (err - base).abs() / base;
    check(
        err <= 2e-3 && rel <= 0.10,
        format!(
            "E-ENF mean MAE {err:.2e} Hz (<= 2e-3), {:.1}% from static {base:.2e} (<= 10%)",
            rel * 100.0
        ),
    )
}

fn random_stream(rng: &mut ChaCha8Rng, max_events: usize) -> Vec<Event> {
    let n = rng.random_range(1..=max_events);
    // Coarse microsecond ticks so that cohorts with shared timestamps occur.
    let span_ticks = rng.random_range(1..=20_000u64);
    (0..n)
        .map(|_| {
            let t = rng.random_range(0..=span_ticks) as f64 * 1e-6;
            let pol = if rng.random_bool(0.5) {
                Polarity::On
            } else {
                Polarity::Off
            };
            Event::new(t, rng.random_range(0..8), rng.random_range(0..8), pol)
        })
        .collect()
}

fn vote_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = SamplingConfig { delta_t: 0.001 };
    let mut pairs_added = 0usize;
    for case in 0..1000 {
        let events = random_stream(&mut rng, 200);
        let base = EventStream::new(8, 8, events.clone()).map_err(|e| e.to_string())?;
        let slices = temporal_sample(&base, &cfg).map_err(|e| e.to_string())?;
        let before = spatial_vote(&slices).map_err(|e| e.to_string())?;
        // Balanced pairs share a picked cohort's timestamp, so they land in
        // that cohort and leave the sampling grid alone.
        let mut augmented = events;
        for slice in slices.iter() {
            let t = slice[0].t;
            for _ in 0..rng.random_range(0..4) {
                let (x, y) = (rng.random_range(0..8), rng.random_range(0..8));
                augmented.push(Event::new(t, x, y, Polarity::On));
                augmented.push(Event::new(
                    t,
                    rng.random_range(0..8),
                    rng.random_range(0..8),
                    Polarity::Off,
                ));
                pairs_added += 1;
            }
        }
        let grown = EventStream::new(8, 8, augmented).map_err(|e| e.to_string())?;
        let after =
            spatial_vote(&temporal_sample(&grown, &cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if before != after {
            return Err(format!("case {case}: vote changed after adding balanced pairs"));
        }
    }
    Ok(format!(
        "1000 slice sets, {pairs_added} balanced pairs added, votes unchanged"
    ))
}

/// Direct reading of the sampling rule: at each moment take every event
/// carrying the smallest timestamp not earlier than the moment.
fn brute_force_slices(events: &[Event], delta_t: f64) -> Vec<Vec<Event>> {
    let t1 = events.iter().map(|e| e.t).fold(f64::INFINITY, f64::min);
    let tn = events.iter().map(|e| e.t).fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    let mut n = 0usize;
    loop {
        let moment = t1 + n as f64 * delta_t;
        if moment > tn {
            break;
        }
        let next = events
            .iter()
            .map(|e| e.t)
            .filter(|&t| t >= moment)
            .fold(f64::INFINITY, f64::min);
        out.push(events.iter().filter(|e| e.t == next).copied().collect());
        n += 1;
    }
    out
}

fn temporal_sampling_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut slices_checked = 0usize;
    for case in 0..500 {
        let events = random_stream(&mut rng, 200);
        let delta_t = [0.0005, 0.001, 0.002][case % 3];
        let stream = EventStream::new(8, 8, events).map_err(|e| e.to_string())?;
        let expected = brute_force_slices(stream.events(), delta_t);
        let got = temporal_sample(&stream, &SamplingConfig { delta_t }).map_err(|e| e.to_string())?;
        let got: Vec<Vec<Event>> = got.iter().map(|s| s.to_vec()).collect();
        if got != expected {
            return Err(format!("case {case}: slices differ from the brute-force trace"));
        }
        slices_checked += got.len();
    }
    Ok(format!("500 streams, {slices_checked} slices identical to brute force"))
}

fn log_series_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = rng.random_range(0.01..10.0);
        let b = a * rng.random_range(1.25..20.0);
        let model = IlluminationModel {
            amplitude: a,
            bias: b,
            ..Default::default()
        };
        let series = log_expansion_coeffs(&model, 30).map_err(|e| e.to_string())?;
        for k in 0..10_000 {
            let omega = 2.0 * std::f64::consts::PI * k as f64 / 10_000.0;
            let direct = (a * omega.cos() + b).ln();
            worst = worst.max((series.evaluate(omega) - direct).abs());
        }
    }
    check(
        worst < 1e-9,
        format!("sup error {worst:.2e} (< 1e-9) over 100 (A, B) pairs"),
    )
}

fn stft_resolution() -> Outcome {
    let fs = 1000.0;
    let signal: Vec<f64> = (0..60_000)
        .map(|n| (2.0 * std::f64::consts::PI * 100.02 * n as f64 / fs).sin())
        .collect();
    let track = stft_peak_track(&signal, fs, &StftConfig::default(), 100.0, 0.5).map_err(|e| e.to_string())?;
    let worst = track.freqs.iter().map(|f| (f - 100.02).abs()).fold(0.0, f64::max);
    check(
        worst <= 0.005,
        format!("{} hops, worst error {worst:.2e} Hz (<= 0.005)", track.freqs.len()),
    )
}

fn aliasing() -> Outcome {
    let enf = EnfTrace::new(0.0, 0.01, vec![50.0; 6001]).map_err(|e| e.to_string())?;
    let params = FrameParams {
        fps: 30.0,
        shutter: Shutter::Global,
        levels: 0,
        ..Default::default()
    };
    let texture = Texture::uniform(4, 4, 0.5);
    let frames = simulate_frames(&IlluminationModel::default(), &enf, &params, &texture).map_err(|e| e.to_string())?;
    let means: Vec<f64> = (0..frames.frames.len())
        .map(|k| frames.frame(k).iter().map(|&v| f64::from(v)).sum::<f64>() / frames.frame(k).len() as f64)
        .collect();
    let avg = means.iter().sum::<f64>() / means.len() as f64;
    // Direct DFT scan below Nyquist in 0.01 Hz steps.
    let (mut best_f, mut best_p) = (0.0, 0.0);
    for i in 50..1500 {
        let f = i as f64 * 0.01;
        let (mut re, mut im) = (0.0, 0.0);
        for (k, m) in means.iter().enumerate() {
            let ph = 2.0 * std::f64::consts::PI * f * k as f64 / 30.0;
            re += (m - avg) * ph.cos();
            im += (m - avg) * ph.sin();
        }
        let p = re * re + im * im;
        if p > best_p {
            (best_f, best_p) = (f, p);
        }
    }
    let cfg = VenfConfig {
        mode: VenfMode::GlobalMean,
        detrend: Detrend::None,
        ..Default::default()
    };
    let venf = extract_venf(&frames, &cfg).map_err(|e| e.to_string())?;
    let worst = venf.values().iter().map(|f| (f - 50.0).abs()).fold(0.0, f64::max);
    check(
        (best_f - 10.0).abs() <= 0.05 && worst <= 0.01,
        format!("frame-mean peak {best_f:.2} Hz (10.00 +/- 0.05); V-ENF worst |f - 50| {worst:.2e} Hz (<= 0.01)"),
    )
}

fn harmonic_selection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 120;
    let boundary = 60;
    // Slow drift next to estimator noise, as with mains frequency at 1 s hops.
    let truth: Vec<f64> = (0..n).map(|i| 50.0 + 0.005 * (i as f64 / 7.0).sin()).collect();
    let mut noisy = |scale: f64| scale * (rng.random::<f64>() - 0.5);
    let h1: Vec<f64> = (0..n)
        .map(|i| truth[i] + if i < boundary { noisy(0.0005) } else { noisy(0.06) })
        .collect();
    let h2: Vec<f64> = (0..n).map(|i| truth[i] + noisy(0.02)).collect();
    let h3: Vec<f64> = (0..n).map(|i| truth[i] + noisy(0.01)).collect();
    let tr = |v: Vec<f64>| EnfTrace::new(0.0, 1.0, v).unwrap();
    let truth = tr(truth);
    let singles = [tr(h1), tr(h2), tr(h3)];
    let traces = HarmonicTraces::new(
        singles
            .iter()
            .enumerate()
            .map(|(i, t)| HarmonicTrack::new(i + 1, t.clone())),
    )
    .map_err(|e| e.to_string())?;
    let sel = harmonic_select(&traces, &HarmonicConfig::default()).map_err(|e| e.to_string())?;
    let picked = mae(&sel.trace, &truth).map_err(|e| e.to_string())?;
    let best_single = singles
        .iter()
        .map(|t| mae(t, &truth).unwrap())
        .fold(f64::INFINITY, f64::min);
    let orders: Vec<usize> = sel.segments.iter().map(|s| s.order).collect();
    let first_switch = sel.segments.iter().find(|s| s.order != orders[0]).map(|s| s.start);
    check(
        picked <= best_single && orders[0] == 1 && first_switch == Some(boundary),
        format!("selected MAE {picked:.2e} <= best single {best_single:.2e}; segment orders {orders:?}, switch at sample {first_switch:?} (corruption starts at {boundary})"),
    )
}

/// Writes every artefact the command-line tool can produce into `dir`.
fn produce_artifacts(dir: &Path) -> eventenf::Result<()> {
    let grid = GridConfig::default();
    let enf = synthesize_enf(
        &EnfProcessConfig {
            seed: 21,
            ..Default::default()
        },
        40.0,
        0.01,
    )?;
    write_trace_csv(&enf, dir.join("truth.csv"))?;
    let mains = ReferenceSignal::new(1000.0, mains_signal(&enf, 1000.0)?)?;
    write_reference_csv(&mains, dir.join("reference_signal.csv"))?;
    let contamination = ContaminationConfig {
        motion_pair_rate: 500.0,
        noise_rate: 5.0,
        burst_fraction: 0.2,
    };
    let stream = simulate_events(
        &SensorConfig::default(),
        &IlluminationModel::default(),
        &enf,
        &contamination,
        21,
    )?;
    write_events_csv(&stream, dir.join("events.csv"))?;
    let rows = 60;
    let frame_params = FrameParams {
        shutter: Shutter::Rolling,
        row_readout: 1.0 / (30.0 * rows as f64),
        ..Default::default()
    };
    let frames = simulate_frames(
        &IlluminationModel::default(),
        &enf,
        &frame_params,
        &Texture::smooth(16, rows, 0.05, 0.95, 21),
    )?;
    write_frames(&frames, dir.join("frames"))?;

    let detailed = eventenf::eenf::extract_eenf_detailed(
        &stream,
        &SamplingConfig::default(),
        &StftConfig::default(),
        &HarmonicConfig::default(),
        grid,
    )?;
    write_trace_csv(&detailed.trace, dir.join("eenf.csv"))?;
    write_polarity_csv(&detailed.polarity, dir.join("polarity.csv"))?;
    for h in detailed.harmonics.iter() {
        write_trace_csv(&h.trace, dir.join(format!("harmonic_{}.csv", h.order)))?;
    }
    write_trace_csv(&extract_venf(&frames, &VenfConfig::default())?, dir.join("venf.csv"))?;
    let reference = reference_enf(&mains, &StftConfig::default(), grid)?;
    write_trace_csv(&reference, dir.join("reference.csv"))?;
    eventenf::plot::write_overlay(&detailed.trace, &reference, "overlay", dir.join("overlay.svg"))?;
    let report = run_scenario(Scenario::Dynamic, &ScenarioParams::default(), &[4], 40.0)?;
    emit_report(&report, dir.join("report"))?;
    Ok(())
}

fn files_under(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(files_under(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    produce_artifacts(a.path()).map_err(|e| e.to_string())?;
    produce_artifacts(b.path()).map_err(|e| e.to_string())?;
    let fa = files_under(a.path());
    let fb = files_under(b.path());
    let rel = |base: &Path, v: &[std::path::PathBuf]| {
        v.iter()
            .map(|p| p.strip_prefix(base).unwrap().to_path_buf())
            .collect::<Vec<_>>()
    };
    if rel(a.path(), &fa) != rel(b.path(), &fb) {
        return Err("runs produced different file sets".into());
    }
    for (x, y) in fa.iter().zip(&fb) {
        if std::fs::read(x).unwrap() != std::fs::read(y).unwrap() {
            return Err(format!(
                "{} differs between runs",
                x.strip_prefix(a.path()).unwrap().display()
            ));
        }
    }
    Ok(format!("{} files byte-identical across two runs", fa.len()))
}

fn main() {
    let started = Instant::now();
    let runs = closed_loop();
    let runs = &runs;
    let from_runs = |f: fn(&Runs) -> Outcome| move || runs.as_ref().map_err(Clone::clone).and_then(f);
    let criteria: Vec<Criterion> = vec![
        ("static closed loop", Box::new(from_runs(static_closed_loop))),
        ("dynamic closed loop", Box::new(from_runs(dynamic_closed_loop))),
        ("extreme lighting", Box::new(from_runs(extreme_lighting))),
        ("vote invariance", Box::new(vote_invariance)),
        ("temporal sampling oracle", Box::new(temporal_sampling_oracle)),
        ("log-intensity series oracle", Box::new(log_series_oracle)),
        ("STFT resolution", Box::new(stft_resolution)),
        ("aliasing", Box::new(aliasing)),
        ("harmonic selection fixture", Box::new(harmonic_selection)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
