use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use siegel_core::experiments::{
    bb_probe, cone_net_check, density_probe, distortion_probe, ExperimentConfig, OutputFormat, Report,
};
use siegel_core::plumbing::Family;
use siegel_core::reduction::{quotient_distance_upper, reduce, SiegelSetParams, DEFAULT_MAX_ITER};
use siegel_core::{distance, SiegelError, SiegelPoint};

#[derive(Parser)]
#[command(name = "siegel", version, about = "Probes of the Siegel upper half space and its degenerations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Distances from plumbed chains to chamber targets as the nodes pinch.
    Density,
    /// Chamber distance of reduced orbit points at growing scales.
    NetCheck,
    /// Quotient distance between a genus 4 chain and its reordered twin.
    Distortion,
    /// Boundary classification of a non-separating pinch and a separating control.
    BbProbe,
    /// Reduce a point given as JSON {"g", "re", "im"} (file or stdin).
    Reduce { input: Option<PathBuf> },
    /// Invariant distance between two points, plus a quotient upper bound.
    ///
    /// Reads two point files, or one JSON object {"z1": ..., "z2": ...}
    /// from a single file or stdin.
    Distance { first: Option<PathBuf>, second: Option<PathBuf> },
    /// Period matrix of a family given as JSON (file or stdin).
    Period { input: Option<PathBuf> },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true)]
    genus: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated, strictly decreasing values in (0, 0.1).
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    t_schedule: Option<Vec<f64>>,
    #[arg(long, global = true)]
    a_param: Option<f64>,
    #[arg(long, global = true)]
    search_radius: Option<usize>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Glue chains at 2-torsion points.
    #[arg(long, global = true)]
    hyperelliptic: bool,
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// Write to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Experiment configuration as JSON; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<SiegelError> for Failure {
    fn from(e: SiegelError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Failure::Config(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn parse_point(s: &str) -> Result<SiegelPoint, Failure> {
    serde_json::from_str(s).map_err(|e| Failure::Config(format!("point JSON: {e}")))
}

fn build_config(opts: &Opts) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &opts.config {
        Some(p) => {
            serde_json::from_str(&read_input(Some(p))?).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = opts.genus {
        cfg.genus = v;
    }
    if let Some(v) = opts.samples {
        cfg.samples = v;
    }
    if let Some(v) = opts.seed {
        cfg.seed = v;
    }
    if let Some(v) = &opts.t_schedule {
        cfg.t_schedule = v.clone();
    }
    if let Some(v) = opts.a_param {
        cfg.a_param = v;
    }
    if let Some(v) = opts.search_radius {
        cfg.search_radius = v;
    }
    if let Some(v) = opts.tolerance {
        cfg.tolerance = v;
    }
    if opts.hyperelliptic {
        cfg.hyperelliptic = true;
    }
    if let Some(f) = opts.output {
        cfg.output_format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(opts: &Opts, text: &str) -> Result<(), Failure> {
    match &opts.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Config(format!("stdout: {e}"))),
    }
}

fn emit_json<T: serde::Serialize>(opts: &Opts, value: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    emit(opts, &(s + "\n"))
}

fn emit_report(opts: &Opts, report: &Report) -> Result<(), Failure> {
    emit(opts, &report.render()?)
}

#[derive(Deserialize)]
struct PointPair {
    z1: SiegelPoint,
    z2: SiegelPoint,
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Density => emit_report(opts, &density_probe(&build_config(opts)?)?.report),
        Command::NetCheck => emit_report(opts, &cone_net_check(&build_config(opts)?)?.report),
        Command::Distortion => emit_report(opts, &distortion_probe(&build_config(opts)?)?.report),
        Command::BbProbe => emit_report(opts, &bb_probe(&build_config(opts)?)?.report),
        Command::Reduce { input } => {
            let z = parse_point(&read_input(input.as_deref())?)?;
            let a = opts.a_param.unwrap_or(SiegelSetParams::default().a);
            let params = SiegelSetParams::new(a, SiegelSetParams::default().n_bound)?;
            let r = reduce(&z, &params, DEFAULT_MAX_ITER)?.require_converged()?;
            emit_json(opts, &r)
        }
        Command::Distance { first, second } => {
            let (p, q) = match (first, second) {
                (Some(a), Some(b)) => (parse_point(&read_input(Some(a))?)?, parse_point(&read_input(Some(b))?)?),
                (a, None) => {
                    let pair: PointPair = serde_json::from_str(&read_input(a.as_deref())?)
                        .map_err(|e| Failure::Config(format!("point pair JSON: {e}")))?;
                    (pair.z1, pair.z2)
                }
                (None, Some(_)) => unreachable!("clap fills positionals in order"),
            };
            let radius = opts.search_radius.unwrap_or(ExperimentConfig::default().search_radius);
            let d = distance(&p, &q)?;
            let upper = quotient_distance_upper(&p, &q, radius)?;
            emit_json(opts, &serde_json::json!({ "distance": d, "quotient_upper": upper }))
        }
        Command::Period { input } => {
            let fam = Family::from_json(&read_input(input.as_deref())?)?;
            emit_json(opts, &fam.period_matrix()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
