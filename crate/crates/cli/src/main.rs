//! Command-line front end for element analysis.

mod io;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use element_core::noise::{
    estimate_noise_amplitude, simulate_maxima_cached, wavelet_spectrum, CacheKey, NoiseModel,
    RateTable,
};
use element_core::pipeline::{AmplitudeMode, AnalysisConfig, AnalysisResult, Analyzer};
use element_core::cwt::{fill_gaps, transform};
use element_core::maxima::Flags;
use element_core::synth::{paper_synthetic, red_noise_with_amplitude, white_noise, EventTrain};
use serde::Serialize;

use crate::io::{create, read_series, write_json, write_series, Segment};

#[derive(Parser)]
#[command(name = "element", version, about = "Detect isolated, significant events in noisy time series")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find events and write events.json and residual.csv.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Also write the transform plane as plane.csv.
        #[arg(long)]
        emit_plane: bool,
    },
    /// Simulate noise-maxima rate tables for a series length.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value = "ratetable.json")]
        out: PathBuf,
    },
    /// Generate a synthetic series and its truth table.
    Synth {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Series length for pure-noise kinds.
        #[arg(long, default_value_t = 12000)]
        length: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Time-averaged squared transform against the predicted noise spectrum.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "wavespec.csv")]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct Common {
    /// JSON analysis configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for simulated rate tables.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<AnalysisConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
                serde_json::from_str::<AnalysisConfig>(&text)
                    .with_context(|| format!("invalid config {}", p.display()))?
            }
            None => AnalysisConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn analyzer(&self) -> Result<Analyzer> {
        let a = Analyzer::new(self.config()?)?;
        Ok(match &self.cache_dir {
            Some(d) => a.with_cache_dir(d),
            None => a,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Six-event train in unit white noise.
    Paper,
    /// Six-event train in unit-variance red noise.
    #[value(name = "paper+red")]
    PaperRed,
    /// Six-event train without noise.
    Clean,
    /// Unit white noise.
    White,
    /// Unit-variance red noise.
    Red,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    match cli.command {
        Command::Detect { input, common, out_dir, emit_plane } => detect(&input, &common, &out_dir, emit_plane),
        Command::Simulate { common, length, out } => simulate(&common, length, &out),
        Command::Synth { kind, seed, length, out_dir } => synth(kind, seed, length, &out_dir),
        Command::Spectrum { input, common, out } => spectrum(&input, &common, &out),
    }
}

#[derive(Serialize)]
struct EventsFile<'a> {
    schema: &'static str,
    config: &'a AnalysisConfig,
    thresholds: Vec<SegmentThresholds<'a>>,
    events: Vec<EventRecord>,
    counts: Counts,
}

#[derive(Serialize)]
struct SegmentThresholds<'a> {
    segment: &'a str,
    length: usize,
    noise_amplitude: f64,
    omega_s: &'a [f64],
    cutoffs: &'a [f64],
    expected_false: &'a [f64],
    expected_false_total: f64,
}

#[derive(Serialize)]
struct EventRecord {
    segment: String,
    t: f64,
    omega_rho: f64,
    rho: f64,
    abs_c: f64,
    phase: f64,
    scale_index: usize,
    norm_magnitude: f64,
    flags: Flags,
    region: Vec<[f64; 2]>,
}

#[derive(Default, Serialize)]
struct Counts {
    maxima: usize,
    significant: usize,
    isolated: usize,
}

fn detect(input: &Path, common: &Common, out_dir: &Path, emit_plane: bool) -> Result<()> {
    let segments = read_series(input)?;
    let analyzer = common.analyzer()?.keep_plane(emit_plane);
    fs::create_dir_all(out_dir)?;

    let mut tables: Vec<(usize, Arc<Vec<RateTable>>)> = Vec::new();
    let mut results: Vec<AnalysisResult> = Vec::with_capacity(segments.len());
    for seg in &segments {
        let len = seg.values.len();
        let shared = match tables.iter().find(|(l, _)| *l == len) {
            Some((_, t)) => Arc::clone(t),
            None => {
                let t = analyzer.rate_tables(len)?;
                tables.push((len, Arc::clone(&t)));
                t
            }
        };
        let result = analyzer
            .clone()
            .with_tables(shared)
            .run(&seg.values, &seg.missing)
            .with_context(|| format!("segment {:?}", seg.name))?;
        results.push(result);
    }

    let mut counts = Counts::default();
    let mut events = Vec::new();
    let mut thresholds = Vec::new();
    for (seg, r) in segments.iter().zip(&results) {
        counts.maxima += r.maxima.len();
        counts.significant += r.count_significant();
        counts.isolated += r.events.len();
        let t0 = seg.t0 as f64;
        for (e, region) in r.events.iter().zip(&r.regions) {
            events.push(EventRecord {
                segment: seg.name.clone(),
                t: t0 + e.t_hat,
                omega_rho: e.omega_rho,
                rho: e.rho_hat,
                abs_c: e.abs_c(),
                phase: e.phase(),
                scale_index: e.source.scale_index,
                norm_magnitude: e.source.norm_magnitude,
                flags: e.source.flags,
                region: region.curve.iter().map(|&(tau, w)| [t0 + tau, w]).collect(),
            });
        }
        thresholds.push(SegmentThresholds {
            segment: &seg.name,
            length: seg.values.len(),
            noise_amplitude: r.noise.amplitude,
            omega_s: &r.grid.omegas,
            cutoffs: &r.thresholds.cutoffs,
            expected_false: &r.expected_false,
            expected_false_total: r.expected_false_total,
        });
    }
    let file = EventsFile {
        schema: "element-events/1",
        config: analyzer.config(),
        thresholds,
        events,
        counts,
    };
    write_json(&out_dir.join("events.json"), &file)?;
    write_residuals(&out_dir.join("residual.csv"), &segments, &results)?;
    if emit_plane {
        write_planes(&out_dir.join("plane.csv"), &segments, &results)?;
    }
    eprintln!(
        "{} events from {} maxima ({} significant) in {} segment(s)",
        file.counts.isolated,
        file.counts.maxima,
        file.counts.significant,
        segments.len()
    );
    Ok(())
}

fn write_residuals(path: &Path, segments: &[Segment], results: &[AnalysisResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["segment", "t", "value", "reconstruction", "residual"])?;
    for (seg, r) in segments.iter().zip(results) {
        for n in 0..seg.values.len() {
            let (value, residual) = if seg.missing[n] {
                (String::new(), String::new())
            } else {
                (seg.values[n].to_string(), r.residual[n].to_string())
            };
            let t = (seg.t0 + n as i64).to_string();
            w.write_record([seg.name.as_str(), &t, &value, &r.reconstruction[n].to_string(), &residual])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_planes(path: &Path, segments: &[Segment], results: &[AnalysisResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["segment", "t", "scale_index", "omega_s", "re", "im"])?;
    for (seg, r) in segments.iter().zip(results) {
        let plane = r.plane.as_ref().expect("plane kept on request");
        for j in 0..plane.n_scales() {
            let omega = plane.grid.omegas[j].to_string();
            let js = j.to_string();
            for (n, v) in plane.column(j).iter().enumerate() {
                let t = (seg.t0 + n as i64).to_string();
                w.write_record([seg.name.as_str(), &t, &js, &omega, &v.re.to_string(), &v.im.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RateTableFile<'a> {
    schema: &'static str,
    key: CacheKey,
    tables: Vec<TableRecord<'a>>,
}

#[derive(Serialize)]
struct TableRecord<'a> {
    scale_index: usize,
    omega_s: f64,
    footprint: f64,
    bins: &'a [f64],
    density: &'a [f64],
    survival: &'a [f64],
    tail_edges: &'a [f64],
    tail_survival: &'a [f64],
    mean: Option<f64>,
}

fn simulate(common: &Common, length: usize, out: &Path) -> Result<()> {
    let cfg = common.config()?;
    let grid = cfg.grid(length)?;
    let unit = NoiseModel::new(cfg.alpha, 1.0)?;
    let tables = simulate_maxima_cached(unit, &grid, cfg.n_realizations, cfg.seed, common.cache_dir.as_deref())?;
    let file = RateTableFile {
        schema: "ratetable/1",
        key: CacheKey::new(unit, &grid, cfg.n_realizations, cfg.seed),
        tables: tables
            .iter()
            .map(|t| TableRecord {
                scale_index: t.scale_index,
                omega_s: t.omega_s,
                footprint: t.footprint,
                bins: &t.bin_edges,
                density: &t.density,
                survival: &t.survival,
                tail_edges: &t.tail_edges,
                tail_survival: &t.tail_survival,
                mean: t.mean,
            })
            .collect(),
    };
    write_json(out, &file)
}

#[derive(Serialize)]
struct TruthFile {
    schema: &'static str,
    kind: String,
    seed: u64,
    length: usize,
    noise: Option<NoiseModel>,
    events: Vec<TruthEvent>,
}

#[derive(Serialize)]
struct TruthEvent {
    t: f64,
    rho: f64,
    omega_rho: f64,
    abs_c: f64,
    phase: f64,
}

fn synth(kind: Kind, seed: u64, length: usize, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let (clean, train) = paper_synthetic();
    let (x, noise, train): (Vec<f64>, Option<NoiseModel>, Option<EventTrain>) = match kind {
        Kind::Paper => {
            let n = white_noise(clean.len(), 1.0, seed);
            (add(&clean, &n), Some(NoiseModel::white(1.0)?), Some(train))
        }
        Kind::PaperRed => {
            let (n, a) = red_noise_with_amplitude(clean.len(), seed);
            (add(&clean, &n), Some(NoiseModel::new(1.0, a)?), Some(train))
        }
        Kind::Clean => (clean, None, Some(train)),
        Kind::White => (white_noise(length, 1.0, seed), Some(NoiseModel::white(1.0)?), None),
        Kind::Red => {
            let (n, a) = red_noise_with_amplitude(length, seed);
            (n, Some(NoiseModel::new(1.0, a)?), None)
        }
    };
    let omega_mu = train.as_ref().map(|t| t.element.function().omega_peak());
    let truth = TruthFile {
        schema: "element-truth/1",
        kind: kind.to_possible_value().expect("named").get_name().to_string(),
        seed,
        length: x.len(),
        noise,
        events: train
            .iter()
            .flat_map(|t| &t.events)
            .map(|e| TruthEvent {
                t: e.t0,
                rho: e.rho,
                omega_rho: e.omega_rho(omega_mu.unwrap_or(1.0)),
                abs_c: e.c.norm(),
                phase: e.c.arg(),
            })
            .collect(),
    };
    write_series(&out_dir.join("data.csv"), &x)?;
    write_json(&out_dir.join("truth.json"), &truth)
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn spectrum(input: &Path, common: &Common, out: &Path) -> Result<()> {
    let segments = read_series(input)?;
    if segments.len() != 1 {
        bail!("spectrum expects a single segment, found {}", segments.len());
    }
    let seg = &segments[0];
    let cfg = common.config()?;
    let grid = cfg.grid(seg.values.len())?;
    let plane = transform(&fill_gaps(&seg.values, &seg.missing)?, &seg.missing, &grid)?;
    let amplitude = match cfg.amplitude {
        AmplitudeMode::Fixed(a) => a,
        AmplitudeMode::Estimated => estimate_noise_amplitude(&plane, cfg.alpha)?,
    };
    let mut w = csv::Writer::from_writer(create(out)?);
    w.write_record(["scale_index", "omega_s", "period", "mean_power", "predicted"])?;
    for j in 0..grid.len() {
        let col = plane.column(j);
        let edge = plane.edge_column(j);
        let (sum, count) = (0..col.len())
            .filter(|&n| !edge[n] && !seg.missing[n])
            .fold((0.0, 0usize), |(s, c), n| (s + col[n].norm_sqr(), c + 1));
        let mean = if count > 0 { sum / count as f64 } else { f64::NAN };
        let predicted = if amplitude > 0.0 {
            wavelet_spectrum(NoiseModel::new(cfg.alpha, amplitude)?, grid.wavelet, grid.scale(j))?
        } else {
            0.0
        };
        w.write_record([
            j.to_string(),
            grid.omegas[j].to_string(),
            (2.0 * PI / grid.omegas[j]).to_string(),
            mean.to_string(),
            predicted.to_string(),
        ])?;
    }
    w.flush()?;
    eprintln!("noise amplitude {amplitude}");
    Ok(())
}
