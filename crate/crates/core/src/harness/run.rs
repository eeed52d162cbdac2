//! A single process run with checkpoints, pattern monitors and the horizon
//! measurements (blocked placements and densest `k`-subsets at step `m`).

use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::GraphView;
use crate::harness::config::{RunConfig, DEFAULT_BLOCKED_KEPT, T_GRID_STEP};
use crate::harness::output::{self, CHECKPOINTS_FILE, EDGE_LOG_FILE, SUMMARY_FILE};
use crate::harness::{load_patterns, HarnessError, SCHEMA_VERSION};
use crate::pattern::{
    blocked_placements, classify_placement, max_edges_k_subset, AppearanceMonitor, BlockReport,
    Pattern, PlacementClass, SubsetMode, EXACT_SUBSET_GUARD,
};
use crate::process::{AuditReport, ProcessConfig, ProcessState, StepResult};
use crate::trajectory::{check_event_h, step_at, Checkpoint, TrajectoryParams};

/// Independent random streams derived from the run seed. The process itself
/// uses stream 0, so measurements never perturb the edge sequence.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Stream {
    Checkpoints = 1,
    Blocking = 2,
    Densest = 3,
    Audit = 4,
}

pub(crate) fn derived_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockingSummary {
    pub step: usize,
    pub sampled: usize,
    pub blocked: usize,
    pub realized: usize,
    pub fraction_blocked: f64,
    /// Whether `step ≥ n^{4/3}`, the window where the blocking bound is stated.
    pub in_blocking_window: bool,
    /// Blocked placements re-examined at the end of the run.
    pub rechecked: usize,
    pub rechecked_realized: usize,
    pub recheck_step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensestSummary {
    pub step: usize,
    pub k: usize,
    pub edges: usize,
    pub exact: bool,
    pub subset: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSummary {
    pub name: String,
    pub source: Option<String>,
    pub k: usize,
    pub e: usize,
    pub dense_flag: bool,
    pub first_appearance: Option<usize>,
    /// Last step the monitor examined; `first_appearance = None` means no
    /// copy up to this step.
    pub monitored_through: usize,
    pub appeared_by_horizon: bool,
    pub blocking: Option<BlockingSummary>,
    /// Only measured for patterns with `e ≥ 3k`.
    pub densest_at_horizon: Option<DensestSummary>,
    /// `false` if an exact densest-subset count below `e` contradicts an
    /// appearance before the horizon.
    pub subset_cross_check_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub n: usize,
    pub seed: u64,
    pub stop: String,
    pub horizon_m: usize,
    pub final_step: usize,
    pub saturated: bool,
    pub final_edge_count: usize,
    pub open_pairs: usize,
    /// `final_edge_count / (n^{3/2} √(ln n))`.
    pub scaling_ratio: f64,
    pub checkpoint_count: usize,
    pub patterns: Vec<PatternSummary>,
    pub checkpoint_file: Option<String>,
    pub edge_log_file: Option<String>,
    pub wall_clock_secs: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Full audit of the state at every checkpoint.
    pub audit_at_checkpoints: bool,
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub summary: RunSummary,
    pub checkpoints: Vec<Checkpoint>,
    pub state: ProcessState,
    pub audits: Vec<AuditReport>,
    /// Blocking reports at the horizon, one per pattern (when measured).
    pub horizon_blocking: Vec<Option<BlockReport>>,
}

pub fn scaling_ratio(edges: usize, n: usize) -> f64 {
    let nf = n as f64;
    edges as f64 / (nf.powf(1.5) * nf.ln().sqrt())
}

struct Horizon {
    blocking: Option<BlockReport>,
    densest: Option<DensestSummary>,
}

fn measure_horizon(
    state: &ProcessState,
    patterns: &[(Option<PathBuf>, Pattern)],
    config: &RunConfig,
    block_rng: &mut ChaCha8Rng,
    densest_rng: &mut ChaCha8Rng,
) -> Vec<Horizon> {
    patterns
        .iter()
        .map(|(_, pattern)| {
            if pattern.k() > state.n() {
                return Horizon {
                    blocking: None,
                    densest: None,
                };
            }
            let blocking = blocked_placements(
                state,
                pattern,
                config.block_samples,
                DEFAULT_BLOCKED_KEPT,
                block_rng,
            );
            let densest = pattern.meets_subset_threshold().then(|| {
                let exact_ok = binomial_at_most(state.n(), pattern.k(), EXACT_SUBSET_GUARD);
                let mode = if exact_ok {
                    SubsetMode::Exact
                } else {
                    SubsetMode::LocalSearch {
                        restarts: config.densest_restarts,
                    }
                };
                let r = max_edges_k_subset(state, pattern.k(), mode, densest_rng)
                    .expect("k within range and guard checked");
                DensestSummary {
                    step: state.step_count(),
                    k: pattern.k(),
                    edges: r.edges,
                    exact: r.exact,
                    subset: r.subset,
                }
            });
            Horizon {
                blocking: Some(blocking),
                densest,
            }
        })
        .collect()
}

fn binomial_at_most(n: usize, k: usize, limit: u128) -> bool {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i as u128 + 1);
        if acc > limit {
            return false;
        }
    }
    true
}

/// Runs one process according to `config`. Patterns are given already
/// loaded, each with its source path if it came from a file.
pub fn execute_run(
    config: &RunConfig,
    patterns: &[(Option<PathBuf>, Pattern)],
    options: RunOptions,
) -> Result<RunArtifacts, HarnessError> {
    config.validate()?;
    let started = Instant::now();
    let n = config.n;
    let params = TrajectoryParams::new(n).map_err(|e| HarnessError::Usage(e.to_string()))?;
    let process_config = ProcessConfig {
        record_frozen_y: config.record_frozen_y,
        ..ProcessConfig::default()
    };
    let mut state = ProcessState::with_config(n, config.seed, process_config)?;
    let stop = config.stop.to_condition(&params);
    let interval = config.checkpoint_interval(&params);
    let mut warnings = Vec::new();
    if params.horizon_is_empty() {
        warnings.push(format!("horizon m = 0 for n = {n}; horizon measurements taken at step 0"));
    }

    let mut y_rng = derived_rng(config.seed, Stream::Checkpoints);
    let mut block_rng = derived_rng(config.seed, Stream::Blocking);
    let mut densest_rng = derived_rng(config.seed, Stream::Densest);
    let mut audit_rng = derived_rng(config.seed, Stream::Audit);

    let mut monitors: Vec<AppearanceMonitor> = patterns
        .iter()
        .map(|(_, p)| AppearanceMonitor::new(p.clone()))
        .collect();
    let mut checkpoints = Vec::new();
    let mut audits = Vec::new();
    let mut horizon: Option<Vec<Horizon>> = None;
    let mut grid_index = 1usize;
    let mut next_grid = step_at(T_GRID_STEP, n);

    let mut take_checkpoint = |state: &ProcessState,
                               checkpoints: &mut Vec<Checkpoint>,
                               audits: &mut Vec<AuditReport>| {
        checkpoints.push(check_event_h(state, &params, config.y_sample_count, &mut y_rng));
        if options.audit_at_checkpoints {
            audits.push(state.audit(usize::MAX, &mut audit_rng));
        }
    };

    take_checkpoint(&state, &mut checkpoints, &mut audits);
    if params.m == 0 {
        horizon = Some(measure_horizon(
            &state,
            patterns,
            config,
            &mut block_rng,
            &mut densest_rng,
        ));
    }

    let outcome = state.run_with(stop, |state, result: &StepResult| {
        let step = result.step;
        if config.monitor_limit.is_none_or(|limit| step <= limit) {
            for monitor in &mut monitors {
                monitor.observe(state, step, result.chosen);
            }
        }
        let mut on_grid = false;
        while step >= next_grid {
            on_grid |= step == next_grid;
            grid_index += 1;
            next_grid = step_at(T_GRID_STEP * grid_index as f64, n);
        }
        if on_grid || step.is_multiple_of(interval) {
            take_checkpoint(state, &mut checkpoints, &mut audits);
        }
        if step == params.m {
            horizon = Some(measure_horizon(
                state,
                patterns,
                config,
                &mut block_rng,
                &mut densest_rng,
            ));
        }
        ControlFlow::Continue(())
    });

    if checkpoints.last().map(|c| c.step) != Some(outcome.final_step) {
        take_checkpoint(&state, &mut checkpoints, &mut audits);
    }
    let horizon = match horizon {
        Some(h) => h,
        None => {
            warnings.push(format!(
                "run ended at step {} before the horizon m = {}; horizon measurements taken at the final step",
                outcome.final_step, params.m
            ));
            measure_horizon(&state, patterns, config, &mut block_rng, &mut densest_rng)
        }
    };

    let blocking_window = (n as f64).powf(4.0 / 3.0);
    let mut pattern_summaries = Vec::with_capacity(patterns.len());
    let mut horizon_blocking = Vec::with_capacity(patterns.len());
    for (((source, pattern), monitor), measured) in patterns.iter().zip(&monitors).zip(horizon) {
        let first = monitor.first_appearance();
        let appeared_by_horizon = first.is_some_and(|s| s <= params.m);
        let blocking = measured.blocking.as_ref().map(|b| {
            let rechecked_realized = b
                .blocked_examples
                .iter()
                .filter(|p| classify_placement(&state, pattern, p) == PlacementClass::Realized)
                .count();
            BlockingSummary {
                step: b.step,
                sampled: b.sampled,
                blocked: b.blocked,
                realized: b.realized,
                fraction_blocked: b.fraction_blocked,
                in_blocking_window: b.step as f64 >= blocking_window,
                rechecked: b.blocked_examples.len(),
                rechecked_realized,
                recheck_step: state.step_count(),
            }
        });
        let subset_cross_check_ok = match &measured.densest {
            Some(d) => !(appeared_by_horizon && d.exact && d.edges < pattern.e()),
            None => true,
        };
        pattern_summaries.push(PatternSummary {
            name: pattern.name().to_string(),
            source: source.as_ref().map(|p| p.display().to_string()),
            k: pattern.k(),
            e: pattern.e(),
            dense_flag: pattern.dense_flag(),
            first_appearance: first,
            monitored_through: config
                .monitor_limit
                .map_or(outcome.final_step, |limit| limit.min(outcome.final_step)),
            appeared_by_horizon,
            blocking,
            densest_at_horizon: measured.densest,
            subset_cross_check_ok,
        });
        horizon_blocking.push(measured.blocking);
    }

    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        n,
        seed: config.seed,
        stop: config.stop.to_string(),
        horizon_m: params.m,
        final_step: outcome.final_step,
        saturated: outcome.saturated,
        final_edge_count: state.edge_count(),
        open_pairs: outcome.open_pairs,
        scaling_ratio: scaling_ratio(state.edge_count(), n),
        checkpoint_count: checkpoints.len(),
        patterns: pattern_summaries,
        checkpoint_file: None,
        edge_log_file: None,
        wall_clock_secs: started.elapsed().as_secs_f64(),
        warnings,
    };
    Ok(RunArtifacts {
        summary,
        checkpoints,
        state,
        audits,
        horizon_blocking,
    })
}

/// Writes `checkpoints.csv`, `edges.log` and `summary.json` into `dir`.
pub fn write_run_files(dir: &Path, artifacts: &mut RunArtifacts) -> Result<(), HarnessError> {
    output::ensure_dir(dir)?;
    let checkpoints = dir.join(CHECKPOINTS_FILE);
    let edges = dir.join(EDGE_LOG_FILE);
    output::write_checkpoints(&checkpoints, &artifacts.checkpoints)?;
    output::write_edge_log(&edges, &artifacts.state)?;
    artifacts.summary.checkpoint_file = Some(checkpoints.display().to_string());
    artifacts.summary.edge_log_file = Some(edges.display().to_string());
    output::write_json(&dir.join(SUMMARY_FILE), &artifacts.summary)
}

/// Loads pattern files, executes the run and writes its files when an
/// output directory is configured. Pattern errors surface before any
/// simulation.
pub fn cmd_run(config: &RunConfig) -> Result<RunArtifacts, HarnessError> {
    config.validate()?;
    let patterns: Vec<_> = load_patterns(&config.patterns)?
        .into_iter()
        .map(|(path, p)| (Some(path), p))
        .collect();
    if let Some(dir) = &config.output_dir {
        output::ensure_dir(dir)?;
    }
    let mut artifacts = execute_run(config, &patterns, RunOptions::default())?;
    if let Some(dir) = &config.output_dir {
        write_run_files(dir, &mut artifacts)?;
    }
    Ok(artifacts)
}
