//! Parallel runs over several `n` and seeds, with per-run rows and
//! per-(n, t) trajectory aggregates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::harness::config::{RunConfig, T_GRID_STEP};
use crate::harness::output::{self, SWEEP_FILE, SWEEP_GRID_FILE};
use crate::harness::run::{execute_run, RunOptions};
use crate::harness::{load_patterns, HarnessError};
use crate::pattern::Pattern;
use crate::trajectory::{step_at, t_of, Checkpoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub seed: u64,
    pub stop: String,
    /// `None` for a successful run.
    pub error: Option<String>,
    pub final_step: usize,
    pub saturated: bool,
    pub final_edges: usize,
    pub scaling_ratio: f64,
    /// Per pattern, in the order given.
    pub first_appearance: Vec<Option<usize>>,
    pub fraction_blocked: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub n: usize,
    pub t: f64,
    pub step: usize,
    pub runs: usize,
    pub rel_q_mean: f64,
    pub rel_q_std: f64,
    pub rel_y_mean: f64,
    pub rel_y_std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub pattern_names: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub grid: Vec<GridRow>,
}

/// Mean and sample standard deviation of the finite values.
fn mean_std(values: impl Iterator<Item = f64>) -> (f64, f64, usize) {
    let v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let std = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    (mean, std, v.len())
}

fn grid_rows(n: usize, runs: &[Vec<Checkpoint>]) -> Vec<GridRow> {
    let mut rows = Vec::new();
    for j in 1.. {
        let step = step_at(T_GRID_STEP * j as f64, n);
        let at: Vec<&Checkpoint> = runs
            .iter()
            .filter_map(|cps| cps.iter().find(|c| c.step == step))
            .collect();
        if at.is_empty() {
            break;
        }
        let (rel_q_mean, rel_q_std, _) = mean_std(at.iter().map(|c| c.rel_q));
        let (rel_y_mean, rel_y_std, _) = mean_std(at.iter().map(|c| c.rel_y));
        rows.push(GridRow {
            n,
            t: t_of(step, n),
            step,
            runs: at.len(),
            rel_q_mean,
            rel_q_std,
            rel_y_mean,
            rel_y_std,
        });
    }
    rows
}

/// Runs `seeds_per_n` seeds (`template.seed + i`) for every `n` in `ns`.
/// Every requested run yields a row; failed runs carry their error.
pub fn run_sweep(
    ns: &[usize],
    seeds_per_n: usize,
    template: &RunConfig,
    patterns: &[(Option<std::path::PathBuf>, Pattern)],
) -> SweepResult {
    let jobs: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| (0..seeds_per_n as u64).map(move |i| (n, i)))
        .map(|(n, i)| (n, template.seed.wrapping_add(i)))
        .collect();
    let outcomes: Vec<(SweepRow, Vec<Checkpoint>)> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let config = RunConfig {
                n,
                seed,
                output_dir: None,
                ..template.clone()
            };
            match execute_run(&config, patterns, RunOptions::default()) {
                Ok(art) => {
                    let s = &art.summary;
                    let row = SweepRow {
                        n,
                        seed,
                        stop: s.stop.clone(),
                        error: None,
                        final_step: s.final_step,
                        saturated: s.saturated,
                        final_edges: s.final_edge_count,
                        scaling_ratio: s.scaling_ratio,
                        first_appearance: s.patterns.iter().map(|p| p.first_appearance).collect(),
                        fraction_blocked: s
                            .patterns
                            .iter()
                            .map(|p| p.blocking.as_ref().map(|b| b.fraction_blocked))
                            .collect(),
                    };
                    (row, art.checkpoints)
                }
                Err(e) => {
                    let row = SweepRow {
                        n,
                        seed,
                        stop: template.stop.to_string(),
                        error: Some(e.to_string()),
                        final_step: 0,
                        saturated: false,
                        final_edges: 0,
                        scaling_ratio: f64::NAN,
                        first_appearance: vec![None; patterns.len()],
                        fraction_blocked: vec![None; patterns.len()],
                    };
                    (row, Vec::new())
                }
            }
        })
        .collect();

    let mut distinct_ns: Vec<usize> = ns.to_vec();
    distinct_ns.sort_unstable();
    distinct_ns.dedup();
    let grid = distinct_ns
        .iter()
        .flat_map(|&n| {
            let runs: Vec<Vec<Checkpoint>> = outcomes
                .iter()
                .filter(|(row, _)| row.n == n && row.error.is_none())
                .map(|(_, cps)| cps.clone())
                .collect();
            grid_rows(n, &runs)
        })
        .collect();
    SweepResult {
        pattern_names: patterns.iter().map(|(_, p)| p.name().to_string()).collect(),
        rows: outcomes.into_iter().map(|(row, _)| row).collect(),
        grid,
    }
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn write_sweep_files(dir: &std::path::Path, result: &SweepResult) -> Result<(), HarnessError> {
    output::ensure_dir(dir)?;
    let mut header: Vec<String> = [
        "n", "seed", "stop", "status", "error", "final_step", "saturated", "final_edges", "scaling_ratio",
    ]
    .map(String::from)
    .to_vec();
    for name in &result.pattern_names {
        header.push(format!("first_{name}"));
        header.push(format!("blocked_{name}"));
    }
    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.n.to_string(),
                r.seed.to_string(),
                r.stop.clone(),
                if r.error.is_none() { "ok" } else { "error" }.to_string(),
                r.error.clone().unwrap_or_default(),
                r.final_step.to_string(),
                r.saturated.to_string(),
                r.final_edges.to_string(),
                r.scaling_ratio.to_string(),
            ];
            for (first, blocked) in r.first_appearance.iter().zip(&r.fraction_blocked) {
                row.push(fmt_opt(first));
                row.push(fmt_opt(blocked));
            }
            row
        })
        .collect();
    output::write_csv(&dir.join(SWEEP_FILE), &header, &rows)?;

    let grid_header: Vec<String> = [
        "n", "t", "step", "runs", "rel_q_mean", "rel_q_std", "rel_y_mean", "rel_y_std",
    ]
    .map(String::from)
    .to_vec();
    let grid: Vec<Vec<String>> = result
        .grid
        .iter()
        .map(|g| {
            vec![
                g.n.to_string(),
                g.t.to_string(),
                g.step.to_string(),
                g.runs.to_string(),
                g.rel_q_mean.to_string(),
                g.rel_q_std.to_string(),
                g.rel_y_mean.to_string(),
                g.rel_y_std.to_string(),
            ]
        })
        .collect();
    output::write_csv(&dir.join(SWEEP_GRID_FILE), &grid_header, &grid)
}

/// Loads patterns, runs the sweep and writes `sweep.csv` / `sweep_grid.csv`
/// when the template names an output directory.
pub fn cmd_sweep(ns: &[usize], seeds_per_n: usize, template: &RunConfig) -> Result<SweepResult, HarnessError> {
    if ns.is_empty() || seeds_per_n == 0 {
        return Err(HarnessError::Usage("a sweep needs at least one n and one seed".into()));
    }
    let patterns: Vec<_> = load_patterns(&template.patterns)?
        .into_iter()
        .map(|(path, p)| (Some(path), p))
        .collect();
    if let Some(dir) = &template.output_dir {
        output::ensure_dir(dir)?;
    }
    let result = run_sweep(ns, seeds_per_n, template, &patterns);
    if let Some(dir) = &template.output_dir {
        write_sweep_files(dir, &result)?;
    }
    Ok(result)
}
