//! `ccshape`: find, catalog, analyze and draw central configurations.

mod analyze;
mod catalog;
mod error;
mod io;
mod render;
mod run_config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use ccshape_core::solver::multi_start_search;

use crate::catalog::{namespace_minimum, Catalog, Record};
use crate::error::CliError;
use crate::run_config::{AnalysisOptions, RunConfigFile};

const DEFAULT_OUTPUT_DIR: &str = "ccshape-output";

#[derive(Debug, Parser)]
#[command(name = "ccshape", version, about = "Central configurations of the N-body shape complexity")]
struct Cli {
    /// Output directory holding the catalog, analyses and exports.
    #[arg(long, global = true, env = "CCSHAPE_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a multi-start search from a JSON run config and add new shapes to the catalog.
    Solve { config: PathBuf },
    /// Write structure reports for a catalog record or a particle CSV file.
    Analyze(AnalyzeArgs),
    /// Draw a catalog record as SVG.
    Render(RenderArgs),
    /// Inspect the catalog.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Record id, or path to a CSV file with one particle per row.
    target: String,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Relative gap that separates edge-length tiers.
    #[arg(long, default_value_t = ccshape_core::analysis::DEFAULT_GAP)]
    gap: f64,
    /// Nearest-neighbor statistics use particles within this fraction of the largest radius.
    #[arg(long, default_value_t = ccshape_core::analysis::DEFAULT_INNER_FRACTION)]
    inner_fraction: f64,
    /// Number of voids to report; 0 skips the void census.
    #[arg(long, default_value_t = 5)]
    voids: usize,
    /// Coordinate columns in a headerless CSV file.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    id: String,
    #[arg(short, long)]
    output: PathBuf,
    /// Color edges by length tier.
    #[arg(long)]
    tiers: bool,
    #[arg(long, default_value_t = ccshape_core::analysis::DEFAULT_GAP)]
    gap: f64,
    #[arg(long, default_value_t = 4.0)]
    point_radius: f64,
}

#[derive(Debug, Subcommand)]
enum CatalogCommand {
    /// List records ascending by complexity within each namespace.
    List,
    /// Print one record's metadata.
    Show { id: String },
    /// Write a record's particles as CSV.
    Export {
        id: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.output_dir.clone();
    let dir = |fallback: Option<PathBuf>| out.clone().or(fallback).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    match cli.command {
        Command::Solve { config } => solve(&config, out),
        Command::Analyze(args) => analyze_cmd(args, &dir(None)),
        Command::Render(args) => render_cmd(args, &dir(None)),
        Command::Catalog(c) => catalog_cmd(c, &dir(None)),
    }
}

fn solve(path: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let run = RunConfigFile::load(path)?;
    let out = out
        .or_else(|| run.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let cfg = &run.solver;
    let summary = multi_start_search(cfg, run.mode, run.band).map_err(|e| CliError::config(e.to_string()))?;

    let mode = serde_json::to_value(run.mode).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    println!(
        "solve: N={} d={} masses={} seed={} mode={} starts={}",
        cfg.n,
        cfg.dim,
        cfg.masses.label(),
        cfg.seed,
        mode,
        cfg.starts
    );
    println!(
        "starts: {} attempted, {} converged, {} failed, {} duplicates, {} outside band",
        summary.attempted, summary.converged, summary.failed, summary.duplicates, summary.outside_band
    );
    if summary.converged == 0 {
        return Err(CliError::no_convergence(format!(
            "none of {} starts converged",
            summary.attempted
        )));
    }

    let records: Vec<Record> = summary.points.iter().map(|p| Record::from_point(p, cfg, run.mode)).collect();
    let reference = summary.reference_c_min.unwrap_or(f64::NAN);
    println!("{:>4}  {:>23}  {:>9}  {:>5}  {:>4}  {:>9}  id", "#", "C", "C/C_min", "index", "zero", "residual");
    for (k, (p, r)) in summary.points.iter().zip(&records).enumerate() {
        println!(
            "{:>4}  {:>23}  {:>9.6}  {:>5}  {:>4}  {:>9.2e}  {}",
            k + 1,
            io::num(p.complexity),
            p.complexity / reference,
            p.index,
            p.zero_modes,
            p.residual,
            r.id
        );
    }

    let catalog = Catalog::at(out.join("catalog"));
    let lock = catalog.lock()?;
    let (added, present) = catalog.insert(&lock, records)?;
    drop(lock);
    for id in &added {
        let record = catalog.get(id)?;
        analyze::analyze(&record.configuration()?, &run.analysis, &out.join("analysis").join(id))?;
    }
    eprintln!(
        "catalog {}: {} added, {} already present",
        catalog.root().display(),
        added.len(),
        present.len()
    );
    Ok(())
}

fn analyze_cmd(args: AnalyzeArgs, out: &Path) -> Result<(), CliError> {
    let options = AnalysisOptions {
        bins: args.bins,
        gap: args.gap,
        inner_fraction: args.inner_fraction,
        voids: args.voids,
    };
    options.validate("--")?;
    if let Some(d) = args.dim {
        if d != 2 && d != 3 {
            return Err(CliError::config(format!("--dim: must be 2 or 3, got {d}")));
        }
    }
    let file = Path::new(&args.target);
    let (config, name) = if file.is_file() {
        let config = io::read_particles(file, args.dim)?;
        let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("particles").to_string();
        (config, format!("file-{stem}"))
    } else {
        let record = Catalog::at(out.join("catalog")).get(&args.target)?;
        (record.configuration()?, record.id)
    };
    let dir = out.join("analysis").join(&name);
    let result = analyze::analyze(&config, &options, &dir)?;
    let ladder = &result.ladder;
    println!("analysis written to {}", dir.display());
    println!("C = {}  fingerprint {}", io::num(result.complexity), result.fingerprint_hash);
    println!(
        "counting: {} pairs, {} shape coordinates, excess {}",
        result.counting.pairs, result.counting.coordinates, result.counting.excess
    );
    println!(
        "nearest neighbors (inner {}): {} sampled, cv {:.4}",
        options.inner_fraction, result.neighbors.sampled, result.neighbors.cv
    );
    println!(
        "tiers: {} (median cv {:.4}{})",
        ladder.tiers.len(),
        ladder.median_cv,
        if ladder.no_ladder { ", no ladder" } else { "" }
    );
    for (k, t) in ladder.tiers.iter().enumerate() {
        println!("  tier {}: {} edges, mean {:.6} l_rms, cv {:.4}", k + 1, t.lengths.len(), t.mean, t.cv);
    }
    Ok(())
}

fn render_cmd(args: RenderArgs, out: &Path) -> Result<(), CliError> {
    if !(args.point_radius > 0.0 && args.point_radius.is_finite()) {
        return Err(CliError::config(format!("--point-radius: must be positive, got {}", args.point_radius)));
    }
    if !(args.gap > 0.0 && args.gap.is_finite()) {
        return Err(CliError::config(format!("--gap: must be positive, got {}", args.gap)));
    }
    let record = Catalog::at(out.join("catalog")).get(&args.id)?;
    if record.metadata.dim == 3 {
        eprintln!("warning: 3D record drawn as an orthographic projection onto the x-y plane");
    }
    let svg = render::render_svg(
        &record.configuration()?,
        &render::RenderOptions {
            tiers: args.tiers,
            gap: args.gap,
            point_radius: args.point_radius,
        },
    );
    std::fs::write(&args.output, svg)
        .with_context(|| format!("cannot write {}", args.output.display()))
        .map_err(CliError::from)?;
    Ok(())
}

fn catalog_cmd(command: CatalogCommand, out: &Path) -> Result<(), CliError> {
    let catalog = Catalog::at(out.join("catalog"));
    match command {
        CatalogCommand::List => {
            let records = catalog.records()?;
            if records.is_empty() {
                println!("catalog is empty");
                return Ok(());
            }
            println!("{:<40}  {:>23}  {:>8}  {:>5}  kind", "id", "C", "C/C_min", "index");
            for r in &records {
                let min = namespace_minimum(&records, &r.namespace()).unwrap_or(f64::NAN);
                let kind = serde_json::to_value(r.metadata.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                println!(
                    "{:<40}  {:>23}  {:>8.4}  {:>5}  {}",
                    r.id,
                    io::num(r.metadata.complexity),
                    r.metadata.complexity / min,
                    r.metadata.index,
                    kind
                );
            }
        }
        CatalogCommand::Show { id } => {
            let record = catalog.get(&id)?;
            let records = catalog.records()?;
            let min = namespace_minimum(&records, &record.namespace()).unwrap_or(f64::NAN);
            let text = serde_json::to_string_pretty(&record.metadata).map_err(anyhow::Error::from)?;
            println!("id: {}", record.id);
            println!("C/C_min: {:.6}", record.metadata.complexity / min);
            println!("{text}");
        }
        CatalogCommand::Export { id, output } => {
            let record = catalog.get(&id)?;
            let path = output.unwrap_or_else(|| out.join("exports").join(format!("{id}.csv")));
            io::write_particles(&path, &record.configuration()?)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}
