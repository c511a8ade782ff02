use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use lmsd_core::batch::Execution;
use lmsd_core::sweeps::Method;
use lmsd_lab::{compare_methods, parse_config, run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "lmsd-lab", version, about = "Limited memory steepest descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run methods and write trace CSVs and a summary file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Method to run; repeat to run several (overrides the config list).
        #[arg(long = "method")]
        methods: Vec<Method>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of right-hand sides, seeds `seed`, `seed + 1`, ...
        #[arg(long)]
        repeat: Option<usize>,
        #[arg(long)]
        sequential: bool,
    },
    /// Compare the gradient norms of two methods at checkpoints.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        a: Method,
        #[arg(long)]
        b: Method,
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sequential: bool,
    },
}

fn load(path: &PathBuf) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("parsing {}", path.display()))
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            methods,
            seed,
            out,
            repeat,
            sequential,
        } => {
            let mut cfg = load(&config)?;
            if !methods.is_empty() {
                cfg.select_methods(&methods);
            }
            if let Some(s) = seed {
                cfg.problem.seed = s;
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(r) = repeat {
                if r == 0 {
                    bail!("--repeat must be at least 1");
                }
                cfg.repeat = r;
            }
            let output = run_experiment(&cfg, execution(sequential))?;
            for s in &output.summaries {
                println!(
                    "{:<6} seed {:<4} converged {:<5} iterations {:<5} factorizations {:<4} f+ {:<3} g+ {}",
                    s.method, s.seed, s.converged, s.iterations, s.factorizations, s.f_increase_count, s.g_increase_count
                );
            }
            for m in &output.means {
                println!(
                    "{:<6} mean over {} runs: iterations {:.1} factorizations {:.1} f+ {:.1} g+ {:.1}",
                    m.method, m.runs, m.mean_iterations, m.mean_factorizations, m.mean_f_increase_count, m.mean_g_increase_count
                );
            }
            println!("summary written to {}", output.summary_file.display());
        }
        Command::Compare {
            config,
            a,
            b,
            checkpoints,
            seed,
            sequential,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.problem.seed = s;
            }
            let report = compare_methods(&cfg, a, b, checkpoints.as_deref(), execution(sequential))?;
            print!("{report}");
        }
    }
    Ok(())
}
