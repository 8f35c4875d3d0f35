use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};

use relaxcb::harness::config::{ExperimentConfig, LearnerKind};
use relaxcb::harness::output::emit_outputs;
use relaxcb::harness::run::run_experiment;
use relaxcb::harness::verify::{run_suite, SuiteSize};

#[derive(Debug, Parser)]
#[command(name = "relaxcb", version, about = "Relaxation-based contextual bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run replicated experiments and write regret.csv, realized.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `reps` in the config.
        #[arg(long)]
        reps: Option<usize>,
        /// Overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `learner` in the config.
        #[arg(long)]
        learner: Option<LearnerKind>,
    },
    /// Run the brute-force verification suites and print one line per check.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smaller sample sizes.
        #[arg(long)]
        quick: bool,
    },
}

fn run(config: PathBuf, out: PathBuf, reps: Option<usize>, seed: Option<u64>, learner: Option<LearnerKind>) -> Result<()> {
    let bytes = fs::read(&config).with_context(|| format!("reading {}", config.display()))?;
    let mut cfg = ExperimentConfig::from_json_bytes(&bytes).with_context(|| format!("invalid config {}", config.display()))?;
    if let Some(r) = reps {
        cfg.reps = r;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(l) = learner {
        cfg.learner = l;
    }
    cfg.validate().context("invalid config after command-line overrides")?;

    let result = run_experiment(&cfg)?;
    let paths = emit_outputs(&result, &out)?;
    let last = result.final_point();
    println!(
        "{} K={} T={} L={:.4} reps={}: final regret {:.4} ± {:.4}",
        cfg.learner,
        cfg.num_actions,
        cfg.horizon,
        result.scale,
        result.runs.len(),
        last.mean_regret,
        last.stderr_regret
    );
    println!("wrote {}", paths.regret_csv.display());
    println!("wrote {}", paths.realized_csv.display());
    println!("wrote {}", paths.summary_json.display());
    Ok(())
}

fn verify(seed: u64, quick: bool) -> Result<bool> {
    let size = if quick { SuiteSize::QUICK } else { SuiteSize::FULL };
    let outcomes = run_suite(seed, size)?;
    let mut all = true;
    for o in &outcomes {
        all &= o.passed;
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", o.name, o.detail);
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            reps,
            seed,
            learner,
        } => run(config, out, reps, seed, learner).map(|()| true),
        Command::Verify { seed, quick } => verify(seed, quick),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
