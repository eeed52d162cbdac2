use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trifree::harness::config::{DEFAULT_BLOCK_SAMPLES, DEFAULT_Y_SAMPLES};
use trifree::harness::{
    cmd_audit, cmd_run, cmd_sweep, exit, load_pattern_file, HarnessError, RunConfig, StopSpec,
    DEFAULT_SEED,
};

#[derive(Parser)]
#[command(name = "trifree", version, about = "Simulate and audit the triangle-free random graph process")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one process and write checkpoints, edge log and summary.
    Run {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run several seeds for each n in parallel.
    Sweep {
        /// Vertex counts, comma separated or repeated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Seeds per n: base seed, base seed + 1, ...
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Recompute every invariant at each checkpoint; exits 2 on any violation.
    Audit {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "saturation")]
        stop: StopSpec,
        #[arg(long)]
        checkpoint_every: Option<usize>,
        /// Also compare the saturated-graph distribution with an independent sampler (n ≤ 5).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Validate pattern files and print their parameters.
    PatternCheck {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunOpts {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// saturation, steps:K or horizon:X (X times the horizon m).
    #[arg(long, default_value = "saturation")]
    stop: StopSpec,
    /// Pattern file to monitor; repeatable.
    #[arg(long = "pattern")]
    patterns: Vec<PathBuf>,
    /// Checkpoint cadence in steps (default: ceil(m / 50)).
    #[arg(long)]
    checkpoint_every: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_Y_SAMPLES)]
    y_samples: usize,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SAMPLES)]
    block_samples: usize,
    /// Stop pattern monitors after this step (monitoring dense patterns
    /// late in a run is expensive).
    #[arg(long)]
    monitor_limit: Option<usize>,
    /// Keep the partial set of every pair at the moment it is inserted.
    #[arg(long)]
    record_frozen_y: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunOpts {
    fn into_config(self, n: usize) -> RunConfig {
        RunConfig {
            seed: self.seed,
            stop: self.stop,
            checkpoint_every: self.checkpoint_every,
            y_sample_count: self.y_samples,
            patterns: self.patterns,
            record_frozen_y: self.record_frozen_y,
            output_dir: self.out,
            block_samples: self.block_samples,
            monitor_limit: self.monitor_limit,
            ..RunConfig::new(n)
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, HarnessError> {
    serde_json::to_string_pretty(value).map_err(|e| HarnessError::Encode {
        what: "json",
        message: e.to_string(),
    })
}

fn execute(command: Command) -> Result<i32, HarnessError> {
    match command {
        Command::Run { n, opts } => {
            let artifacts = cmd_run(&opts.into_config(n))?;
            println!("{}", to_json(&artifacts.summary)?);
            for w in &artifacts.summary.warnings {
                eprintln!("warning: {w}");
            }
            Ok(exit::SUCCESS)
        }
        Command::Sweep { n, seeds, opts } => {
            let template = opts.into_config(n[0]);
            let result = cmd_sweep(&n, seeds, &template)?;
            for row in &result.rows {
                match &row.error {
                    None => println!(
                        "n={} seed={} final_edges={} c={:.4}",
                        row.n, row.seed, row.final_edges, row.scaling_ratio
                    ),
                    Some(e) => println!("n={} seed={} error: {e}", row.n, row.seed),
                }
            }
            Ok(exit::SUCCESS)
        }
        Command::Audit {
            n,
            seed,
            stop,
            checkpoint_every,
            oracle,
            trials,
        } => {
            let config = RunConfig {
                seed,
                stop,
                checkpoint_every,
                ..RunConfig::new(n)
            };
            let outcome = cmd_audit(&config, oracle.then_some(trials))?;
            for line in outcome.describe() {
                println!("{line}");
            }
            Ok(outcome.exit_code())
        }
        Command::PatternCheck { files } => {
            let mut code = exit::SUCCESS;
            for path in files {
                match load_pattern_file(&path) {
                    Ok(p) => println!(
                        "{}: k={} e={} dense={} e>=3k={}",
                        path.display(),
                        p.k(),
                        p.e(),
                        p.dense_flag(),
                        p.meets_subset_threshold()
                    ),
                    Err(e) => {
                        eprintln!("error: {e}");
                        code = exit::USAGE;
                    }
                }
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            return ExitCode::from(code as u8);
        }
    };
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
