//! Deterministic trajectories for the open-pair count and the partial-vertex
//! counts, with their error envelopes, and checkpoints comparing a running
//! process against them.
//!
//! With `t = i / n^{3/2}`:
//!
//! * `Q(i) ≈ n² q(t)`, `q(t) = exp(-4t²)/2`
//! * `|Y_{u,v}(i)| ≈ √n y(t)`, `y(t) = 4t exp(-4t²)`
//! * envelopes `n² g_q(t)` and `√n g_y(t)` with `g_y(t) = exp(41t²+40t) n^{-1/6}`
//!   and `g_q = g_y` for `t ≤ 1`, `g_y / t` beyond.
//!
//! The envelopes overflow `f64` near `t ≈ 3.7`, so comparisons against them
//! are done on logarithms.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Pair;
use crate::process::ProcessState;

/// Horizon constant `μ`.
pub const MU: f64 = 1.0 / 32.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("the step horizon needs n >= 2 (got {0})")]
    TooFewVertices(usize),
}

/// `t(i) = i / n^{3/2}`.
pub fn t_of(i: usize, n: usize) -> f64 {
    i as f64 / (n as f64).powf(1.5)
}

/// Smallest step whose scaled time is at least `t`.
pub fn step_at(t: f64, n: usize) -> usize {
    let raw = t * (n as f64).powf(1.5);
    let mut i = raw.ceil() as usize;
    // guard against the product landing a hair above an integer
    if i > 0 && t_of(i - 1, n) >= t {
        i -= 1;
    }
    i
}

pub fn q(t: f64) -> f64 {
    (-4.0 * t * t).exp() / 2.0
}

pub fn y(t: f64) -> f64 {
    4.0 * t * (-4.0 * t * t).exp()
}

/// `ln g_y(t, n) = 41t² + 40t − ln(n)/6`.
pub fn ln_g_y(t: f64, n: usize) -> f64 {
    41.0 * t * t + 40.0 * t - (n as f64).ln() / 6.0
}

/// `ln g_q(t, n)`: equal to `ln g_y` up to `t = 1`, minus `ln t` beyond.
pub fn ln_g_q(t: f64, n: usize) -> f64 {
    if t <= 1.0 {
        ln_g_y(t, n)
    } else {
        ln_g_y(t, n) - t.ln()
    }
}

pub fn g_y(t: f64, n: usize) -> f64 {
    ln_g_y(t, n).exp()
}

pub fn g_q(t: f64, n: usize) -> f64 {
    ln_g_q(t, n).exp()
}

/// Step horizon `⌊μ n^{3/2} √(ln n)⌋`.
pub fn m_of(n: usize) -> Result<usize, TrajectoryError> {
    if n < 2 {
        return Err(TrajectoryError::TooFewVertices(n));
    }
    let nf = n as f64;
    Ok((MU * nf.powf(1.5) * nf.ln().sqrt()).floor() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams {
    pub n: usize,
    pub mu: f64,
    pub m: usize,
}

impl TrajectoryParams {
    pub fn new(n: usize) -> Result<Self, TrajectoryError> {
        Ok(TrajectoryParams {
            n,
            mu: MU,
            m: m_of(n)?,
        })
    }

    /// `true` when the horizon is empty (tiny `n`).
    pub fn horizon_is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn t(&self, i: usize) -> f64 {
        t_of(i, self.n)
    }
}

/// Snapshot of a run compared against the trajectories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub step: usize,
    pub t: f64,
    /// Observed open-pair count `Q(i)`.
    pub q_obs: usize,
    pub q_pred: f64,
    pub q_env: f64,
    pub rel_q: f64,
    /// `|Y|` for each sampled open pair.
    pub y_samples: Vec<usize>,
    pub y_mean: f64,
    pub y_pred: f64,
    pub y_env: f64,
    pub rel_y: f64,
    /// Largest `||Y| − √n y(t)|` over the sample.
    pub y_worst_dev: f64,
    pub formal_q_ok: bool,
    pub formal_y_ok: bool,
    /// `g_q(t) ≥ q(t)`: the Q envelope is wider than the prediction itself.
    pub env_vacuous: bool,
    /// `false` once the step exceeds the horizon `m`.
    pub within_horizon: bool,
}

impl Checkpoint {
    pub fn has_y_samples(&self) -> bool {
        !self.y_samples.is_empty()
    }
}

/// `|a − b| ≤ e^{ln_bound}` without overflowing when the bound is huge.
fn within_log_bound(a: f64, b: f64, ln_bound: f64) -> bool {
    let dev = (a - b).abs();
    dev == 0.0 || dev.ln() <= ln_bound
}

/// Compares the current state with the trajectories. `y_sample_count`
/// open pairs are drawn uniformly (with replacement) and their partial sets
/// measured. Past the horizon the checkpoint is still produced but flagged.
pub fn check_event_h<R: Rng + ?Sized>(
    state: &ProcessState,
    params: &TrajectoryParams,
    y_sample_count: usize,
    rng: &mut R,
) -> Checkpoint {
    let n = params.n;
    let nf = n as f64;
    let i = state.step_count();
    let t = t_of(i, n);

    let q_obs = state.open_pair_count();
    let q_pred = nf * nf * q(t);
    let ln_q_env = 2.0 * nf.ln() + ln_g_q(t, n);
    let rel_q = (q_obs as f64 / q_pred - 1.0).abs();
    let formal_q_ok = within_log_bound(q_obs as f64, q_pred, ln_q_env);

    let open = state.open_pairs();
    let y_samples: Vec<usize> = if open.is_empty() {
        Vec::new()
    } else {
        (0..y_sample_count)
            .map(|_| {
                let p: Pair = open[rng.gen_range(0..open.len())];
                state.partial_count_unchecked(p)
            })
            .collect()
    };
    let y_pred = nf.sqrt() * y(t);
    let ln_y_env = 0.5 * nf.ln() + ln_g_y(t, n);
    let (y_mean, rel_y, y_worst_dev, formal_y_ok) = if y_samples.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN, false)
    } else {
        let mean = y_samples.iter().sum::<usize>() as f64 / y_samples.len() as f64;
        let rel = if y_pred == 0.0 {
            if mean == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (mean / y_pred - 1.0).abs()
        };
        let worst = y_samples
            .iter()
            .map(|&c| (c as f64 - y_pred).abs())
            .fold(0.0, f64::max);
        let ok = y_samples
            .iter()
            .all(|&c| within_log_bound(c as f64, y_pred, ln_y_env));
        (mean, rel, worst, ok)
    };

    Checkpoint {
        step: i,
        t,
        q_obs,
        q_pred,
        q_env: ln_q_env.exp(),
        rel_q,
        y_samples,
        y_mean,
        y_pred,
        y_env: ln_y_env.exp(),
        rel_y,
        y_worst_dev,
        formal_q_ok,
        formal_y_ok,
        env_vacuous: ln_g_q(t, n) >= q(t).ln(),
        within_horizon: i <= params.m,
    }
}

/// Exact column order of `checkpoints.csv`.
pub const CHECKPOINT_COLUMNS: [&str; 13] = [
    "step",
    "t",
    "Q",
    "q_pred",
    "q_env",
    "rel_q",
    "y_mean",
    "y_pred",
    "y_env",
    "rel_y",
    "formal_q_ok",
    "formal_y_ok",
    "env_vacuous",
];

/// One CSV row for the checkpoint, in [`CHECKPOINT_COLUMNS`] order.
pub fn checkpoint_record(c: &Checkpoint) -> [String; 13] {
    [
        c.step.to_string(),
        c.t.to_string(),
        c.q_obs.to_string(),
        c.q_pred.to_string(),
        c.q_env.to_string(),
        c.rel_q.to_string(),
        c.y_mean.to_string(),
        c.y_pred.to_string(),
        c.y_env.to_string(),
        c.rel_y.to_string(),
        c.formal_q_ok.to_string(),
        c.formal_y_ok.to_string(),
        c.env_vacuous.to_string(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn t_of_examples() {
        assert_eq!(t_of(0, 1000), 0.0);
        assert_eq!(t_of(8, 4), 1.0);
        assert_eq!(t_of(4, 4), 0.5);
        assert_eq!(step_at(0.5, 16), 32);
        assert_eq!(step_at(0.0, 16), 0);
    }

    #[test]
    fn q_and_y_values() {
        assert_eq!(q(0.0), 0.5);
        assert!(close(q(0.5), 0.183_939_720_585_721_2, 1e-12));
        assert!(close(q(1.0), 0.009_157_819_444_367_09, 1e-12));
        assert_eq!(y(0.0), 0.0);
        assert!(close(y(0.5), 0.735_758_882_342_884_6, 1e-12));
    }

    #[test]
    fn y_maximizer() {
        // dense grid search, independent of the calculus
        let (mut best_t, mut best) = (0.0, 0.0);
        for k in 1..=2_000_000 {
            let t = k as f64 * 1e-6;
            if y(t) > best {
                best = y(t);
                best_t = t;
            }
        }
        let t_star = 1.0 / (2.0 * 2f64.sqrt());
        assert!((best_t - t_star).abs() < 2e-6);
        assert!(close(best, 2f64.sqrt() * (-0.5f64).exp(), 1e-10));
        assert!(close(y(t_star), 2f64.sqrt() * (-0.5f64).exp(), 1e-14));
    }

    #[test]
    fn envelope_examples() {
        for n in [2, 64, 1000] {
            let expect = (n as f64).powf(-1.0 / 6.0);
            assert!(close(g_q(0.0, n), expect, 1e-14));
            assert!(close(g_y(0.0, n), expect, 1e-14));
        }
        let n = 1000;
        let at_one = 81.0 - (n as f64).ln() / 6.0;
        assert!(close(ln_g_q(1.0, n), at_one, 1e-15));
        assert!(close(ln_g_y(1.0, n), at_one, 1e-15));
        // t = 2, n = 64: exp(244)/2 * 64^{-1/6} = exp(244)/4
        assert!(close(ln_g_q(2.0, 64), 244.0 - 4f64.ln(), 1e-14));
    }

    #[test]
    fn m_of_examples() {
        assert_eq!(m_of(1024).unwrap(), 2695);
        assert_eq!(m_of(4).unwrap(), 0);
        assert!(TrajectoryParams::new(4).unwrap().horizon_is_empty());
        assert_eq!(m_of(1), Err(TrajectoryError::TooFewVertices(1)));
        // (1/32) 2000^{3/2} sqrt(ln 2000) = 2795.085 * 2.756966 = 7705.975
        // (independently: mpmath at 50 digits gives 7705.97498...)
        let n = 2000f64;
        let oracle = n.powf(1.5) * n.ln().sqrt() / 32.0;
        assert!((7705.9..7706.0).contains(&oracle));
        assert_eq!(m_of(2000).unwrap(), 7705);
    }

    #[test]
    fn m_of_ratio_band() {
        let mut prev = 0;
        for n in 2..3000 {
            let m = m_of(n).unwrap();
            assert!(m >= prev);
            prev = m;
            let nf = n as f64;
            let ratio = m as f64 / (nf.powf(1.5) * nf.ln().sqrt());
            assert!(ratio <= MU + 1e-15);
            assert!(ratio >= MU - 1.0 / nf, "n = {n}, ratio = {ratio}");
        }
        let n = 5000;
        let params = TrajectoryParams::new(n).unwrap();
        let t_m = params.t(params.m);
        let exact = MU * (n as f64).ln().sqrt();
        assert!(t_m <= exact && exact - t_m <= 1.0 / (n as f64).powf(1.5));
    }

    #[test]
    fn fresh_checkpoint() {
        for n in [2usize, 3, 10, 200] {
            let state = ProcessState::new(n, 0).unwrap();
            let params = TrajectoryParams::new(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let c = check_event_h(&state, &params, 20, &mut rng);
            assert_eq!(c.q_obs, n * (n - 1) / 2);
            assert_eq!(c.q_pred, (n * n) as f64 / 2.0);
            assert!(c.formal_q_ok);
            assert!(c.formal_y_ok);
            assert_eq!(c.y_mean, 0.0);
            assert_eq!(c.rel_y, 0.0);
            assert_eq!(c.y_samples.len(), 20);
        }
    }

    #[test]
    fn saturated_checkpoint_flags_missing_samples() {
        let mut state = ProcessState::new(3, 0).unwrap();
        state.run(crate::process::StopCondition::Saturation);
        let params = TrajectoryParams::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = check_event_h(&state, &params, 20, &mut rng);
        assert!(!c.has_y_samples());
        assert!(!c.formal_y_ok);
        assert!(c.y_mean.is_nan());
        assert!(!c.within_horizon);
    }

    #[test]
    fn envelope_flags_vacuous_early() {
        // at t = 0.5 the envelope exceeds q(t) for any realistic n
        assert!(ln_g_q(0.5, 1_000_000) >= q(0.5).ln());
        assert!(ln_g_q(0.01, 1_000_000) < q(0.01).ln());
    }

    #[test]
    fn huge_t_does_not_overflow_the_flags() {
        assert!(g_q(5.0, 100).is_infinite());
        assert!(within_log_bound(1.0, 1e300, ln_g_q(5.0, 100)));
    }

    proptest! {
        #[test]
        fn y_is_minus_dq_dt(t in 0.01f64..2.0) {
            let h = 1e-5;
            let fd = (q(t + h) - q(t - h)) / (2.0 * h);
            prop_assert!((fd + y(t)).abs() <= 1e-6);
        }

        #[test]
        fn q_decreasing(a in 0.0f64..3.0, d in 1e-3f64..1.0) {
            prop_assert!(q(a + d) < q(a));
        }

        #[test]
        fn envelopes_monotone(a in 0.0f64..0.99, d in 1e-3f64..0.01, n in 2usize..100_000) {
            prop_assert!(g_y(a + d, n) > g_y(a, n));
            prop_assert!(g_q(a + d, n) > g_q(a, n));
            prop_assert!(g_y(a, n + 1) < g_y(a, n));
        }
    }
}
