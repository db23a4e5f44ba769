use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use max2sat_bench::{
    cmd_analyze, cmd_anneal, cmd_generate, cmd_solve, graph_info, BenchError, ExperimentConfig, Overrides, Selection,
    EXIT_CONFIG,
};

#[derive(Parser)]
#[command(name = "max2sat-bench", version, about = "MAX 2-SAT benchmark: exact solver versus simulated annealing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// JSON experiment config; defaults are used when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Master seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exact-solver time budget per instance in milliseconds
    #[arg(long, global = true)]
    budget_ms: Option<u64>,
    /// Annealer reads per instance
    #[arg(long, global = true)]
    reads: Option<usize>,
    /// Annealer sweeps per read
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    /// Standard deviation of field control errors
    #[arg(long, global = true)]
    noise_sigma_h: Option<f64>,
    /// Standard deviation of coupling control errors
    #[arg(long, global = true)]
    noise_sigma_j: Option<f64>,
    /// Target success probability for time to solution
    #[arg(long, global = true)]
    p_desired: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instance ensembles and the manifest
    Generate,
    /// Solve every instance exactly
    Solve,
    /// Run the annealer on every instance
    Anneal,
    /// Build analysis tables and plot data
    Analyze {
        /// Figure id: psat, window, tts-scaling, collapse, percentiles,
        /// correlation, density, rho, success-hist, fixed-m or all
        #[arg(long, default_value = "all")]
        figure: String,
    },
    /// Print hardware graph statistics and clause capacities
    GraphInfo,
}

fn load_config(g: &Global) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        out: g.out.clone(),
        workers: g.workers,
        seed: g.seed,
        budget_ms: g.budget_ms,
        reads: g.reads,
        sweeps: g.sweeps,
        noise_sigma_h: g.noise_sigma_h,
        noise_sigma_j: g.noise_sigma_j,
        p_desired: g.p_desired,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Generate => {
            let m = cmd_generate(&cfg)?;
            let total: usize = m.ensembles.iter().map(|e| e.count).sum();
            println!("generated {total} instances in {} ensembles under {}", m.ensembles.len(), cfg.output_dir.display());
        }
        Command::Solve => {
            let s = cmd_solve(&cfg)?;
            println!("solved {} instances to proven optimality", s.total);
        }
        Command::Anneal => {
            let s = cmd_anneal(&cfg)?;
            println!("annealed {} instances, mean success probability {:.4}", s.total, s.mean_p_success);
        }
        Command::Analyze { figure } => {
            let which: Selection = figure.parse()?;
            let report = cmd_analyze(&cfg, which)?;
            for p in &report.written {
                println!("wrote {}", p.display());
            }
            for (f, why) in &report.skipped {
                eprintln!("skipped {f}: {why}");
            }
        }
        Command::GraphInfo => {
            let info = graph_info(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&info)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.downcast_ref::<BenchError>().map_or(1, BenchError::exit_code);
            ExitCode::from(code)
        }
    }
}
