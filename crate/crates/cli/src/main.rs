//! `cem` — capacity expansion planning with Benders decomposition.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cem_core::aggregate::{apply_weights, cluster_weeks, Partition};
use cem_core::builder::{build_monolithic, DecompositionMode};
use cem_core::caseio::{
    emit_benchmark, load_case, load_partition, write_results, BenchmarkRow,
};
use cem_core::engine::{
    run, run_two_stage, solve_monolithic, EngineConfig, PruneCadence, SolveReport,
};
use cem_core::model::{validate_system, System};

#[derive(Parser)]
#[command(name = "cem", version, about = "Multi-sector capacity expansion solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one case with one algorithm and write result files.
    Solve(SolveArgs),
    /// Run several algorithms over every case in a directory and emit a
    /// benchmark report.
    Benchmark(BenchmarkArgs),
    /// Load and validate a case, reporting every violation.
    Validate {
        #[arg(long)]
        case: PathBuf,
    },
    /// Cluster a case's horizon into representative subperiods and write
    /// the partition CSV.
    Aggregate {
        #[arg(long)]
        case: PathBuf,
        #[arg(long)]
        weeks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; defaults to `<case>/partition.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Monolithic,
    Temporal,
    Sectoral,
    Spatial,
    TwoStageSectoral,
    TwoStageSpatial,
}

impl Algorithm {
    fn all() -> &'static [Algorithm] {
        &[
            Algorithm::Monolithic,
            Algorithm::Temporal,
            Algorithm::Sectoral,
            Algorithm::Spatial,
            Algorithm::TwoStageSectoral,
            Algorithm::TwoStageSpatial,
        ]
    }

    fn name(&self) -> &'static str {
        match self {
            Algorithm::Monolithic => "monolithic",
            Algorithm::Temporal => "temporal",
            Algorithm::Sectoral => "sectoral",
            Algorithm::Spatial => "spatial",
            Algorithm::TwoStageSectoral => "two-stage-sectoral",
            Algorithm::TwoStageSpatial => "two-stage-spatial",
        }
    }
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Representative subperiods to cluster the horizon into; omitted
    /// means an explicit partition.csv if present, else no aggregation.
    #[arg(long)]
    weeks: Option<usize>,
    /// Convergence tolerance (UB - LB) / LB.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Stage-2 tolerance for two-stage algorithms.
    #[arg(long, default_value_t = 1e-2)]
    stage2_tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Level-set parameter.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Absolute cut slack above which pruning removes a cut.
    #[arg(long, default_value_t = 10.0)]
    slack_threshold: f64,
    /// Prune non-binding cuts every N iterations (0 = never); the default
    /// follows the mode: every 10 for spatial, otherwise only at the
    /// two-stage handoff.
    #[arg(long)]
    prune_cadence: Option<usize>,
    /// Worker threads for subproblem batches; the CEM_WORKERS environment
    /// variable overrides.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Seed for k-means clustering.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        let workers = std::env::var("CEM_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(self.workers);
        EngineConfig {
            eps_tol: self.tol,
            stage2_tol: self.stage2_tol,
            max_iters: self.max_iters,
            alpha: self.alpha,
            slack_threshold: self.slack_threshold,
            prune_cadence: match self.prune_cadence {
                None => PruneCadence::ModeDefault,
                Some(0) => PruneCadence::Never,
                Some(n) => PruneCadence::Every(n),
            },
            workers,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    case: PathBuf,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[command(flatten)]
    engine: EngineArgs,
    /// Output directory for result files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the assembled monolithic problem in LP text form.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Directory whose subdirectories are cases.
    #[arg(long)]
    cases: PathBuf,
    /// Comma-separated algorithms; defaults to all of them.
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    out: PathBuf,
}

fn prepare(case: &Path, engine: &EngineArgs) -> Result<(System, usize)> {
    let spec = load_case(case)?;
    let natural = spec.index_sets.subperiods.len();
    let partition: Option<Partition> = match engine.weeks {
        Some(k) => Some(cluster_weeks(&spec, k, engine.seed)?),
        None => load_partition(case)?,
    };
    let (spec, weeks) = match partition {
        Some(p) => {
            let k = p.k();
            (apply_weights(&spec, &p)?, k)
        }
        None => (spec, natural),
    };
    let system = validate_system(&spec).context("case failed validation")?;
    Ok((system, weeks))
}

fn dispatch_algorithm(
    algorithm: Algorithm,
    system: &System,
    config: &EngineConfig,
) -> Result<SolveReport> {
    let report = match algorithm {
        Algorithm::Monolithic => solve_monolithic(system, config)?,
        Algorithm::Temporal => run(DecompositionMode::Temporal, system, config)?,
        Algorithm::Sectoral => run(DecompositionMode::TemporalSectoral, system, config)?,
        Algorithm::Spatial => run(DecompositionMode::TemporalSpatial, system, config)?,
        Algorithm::TwoStageSectoral => {
            run_two_stage(DecompositionMode::TemporalSectoral, system, config)?
        }
        Algorithm::TwoStageSpatial => {
            run_two_stage(DecompositionMode::TemporalSpatial, system, config)?
        }
    };
    Ok(report)
}

fn cmd_solve(args: &SolveArgs) -> Result<bool> {
    let (system, _) = prepare(&args.case, &args.engine)?;
    if let Some(path) = &args.dump_lp {
        let lp = build_monolithic(&system)?;
        std::fs::write(path, lp.to_lp_text())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let config = args.engine.config();
    let report = dispatch_algorithm(args.algorithm, &system, &config)?;
    println!(
        "{} on {}: {} after {} iteration(s), objective {:.6}, gap {:.3e}, {} ms",
        report.algorithm,
        report.case,
        if report.converged { "converged" } else { "NOT converged" },
        report.iterations,
        report.objective,
        report.gap,
        report.wall_ms
    );
    for (id, v) in &report.capacities {
        println!("  {id}: {v:.4}");
    }
    if let Some(out) = &args.out {
        write_results(&report, &system, out)?;
        println!("results written to {}", out.display());
    }
    Ok(report.converged)
}

fn cmd_benchmark(args: &BenchmarkArgs) -> Result<bool> {
    let algorithms: Vec<Algorithm> = if args.algorithms.is_empty() {
        Algorithm::all().to_vec()
    } else {
        args.algorithms.clone()
    };
    let mut cases: Vec<PathBuf> = std::fs::read_dir(&args.cases)
        .with_context(|| format!("reading {}", args.cases.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.join("system.toml").exists())
        .collect();
    cases.sort();
    if cases.is_empty() {
        bail!("no cases under {}", args.cases.display());
    }
    let config = args.engine.config();
    let mut rows = Vec::new();
    let mut all_converged = true;
    for case in &cases {
        let (system, weeks) = prepare(case, &args.engine)?;
        for &algorithm in &algorithms {
            let report = dispatch_algorithm(algorithm, &system, &config)?;
            println!(
                "{} / {}: objective {:.6}, {} iteration(s), {} ms",
                system.name(),
                algorithm.name(),
                report.objective,
                report.iterations,
                report.wall_ms
            );
            all_converged &= report.converged;
            rows.push(BenchmarkRow::from_report(&report, &system, weeks));
        }
    }
    emit_benchmark(&rows, &args.out)?;
    println!("benchmark written to {}", args.out.display());
    Ok(all_converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Validate { case } => (|| {
            let spec = load_case(case)?;
            let system = validate_system(&spec)
                .map_err(|report| anyhow::anyhow!("{report}"))?;
            println!(
                "{}: valid ({} zones, {} sectors, {} vectors, {} subperiods, {} technologies)",
                system.name(),
                system.zones().len(),
                system.sectors().len(),
                system.vectors().len(),
                system.subperiods().len(),
                system.technologies().len()
            );
            Ok(true)
        })(),
        Command::Aggregate { case, weeks, seed, out } => (|| {
            let spec = load_case(case)?;
            let partition = cluster_weeks(&spec, *weeks, *seed)?;
            let path = out.clone().unwrap_or_else(|| case.join("partition.csv"));
            std::fs::write(&path, partition.to_csv())
                .with_context(|| format!("writing {}", path.display()))?;
            println!(
                "partition with {} representative(s) written to {}",
                partition.k(),
                path.display()
            );
            Ok(true)
        })(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
