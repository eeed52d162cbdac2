//! Distribution check against an independent implementation.
//!
//! Choosing a uniform open pair at each step yields the same final graph
//! distribution as scanning all pairs in a uniformly random order and
//! keeping each pair that closes no triangle. The oracle implements the
//! latter with an adjacency matrix and shares no code with the engine.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::harness::HarnessError;
use crate::process::{ProcessState, StopCondition};

/// Largest `n` whose pairs fit a 64-bit edge-set key.
pub const MAX_ORACLE_N: usize = 11;
/// Total-variation distance tolerated by the audit.
pub const TV_TOLERANCE: f64 = 0.02;

/// Final graph (as a bit set over lexicographically ordered pairs) → count.
pub type Distribution = HashMap<u64, usize>;

fn check_n(n: usize) -> Result<(), HarnessError> {
    if !(2..=MAX_ORACLE_N).contains(&n) {
        return Err(HarnessError::Usage(format!(
            "oracle comparison needs 2 ≤ n ≤ {MAX_ORACLE_N} (got {n})"
        )));
    }
    Ok(())
}

fn bit(n: usize, u: usize, v: usize) -> u64 {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    // lexicographic rank of (u, v)
    let rank = u * (2 * n - u - 1) / 2 + (v - u - 1);
    1 << rank
}

/// Saturated engine runs with seeds `base_seed, base_seed + 1, ...`.
pub fn engine_distribution(n: usize, trials: usize, base_seed: u64) -> Result<Distribution, HarnessError> {
    check_n(n)?;
    let mut dist = Distribution::new();
    for t in 0..trials {
        let mut state = ProcessState::new(n, base_seed.wrapping_add(t as u64))?;
        state.run(StopCondition::Saturation);
        let key = state
            .edge_log()
            .iter()
            .fold(0u64, |acc, p| acc | bit(n, p.u as usize, p.v as usize));
        *dist.entry(key).or_default() += 1;
    }
    Ok(dist)
}

/// Random-order greedy triangle-free graphs.
pub fn permutation_distribution(n: usize, trials: usize, seed: u64) -> Result<Distribution, HarnessError> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut dist = Distribution::new();
    for _ in 0..trials {
        pairs.shuffle(&mut rng);
        let mut adj = vec![vec![false; n]; n];
        let mut key = 0u64;
        for &(u, v) in &pairs {
            if (0..n).any(|w| adj[u][w] && adj[v][w]) {
                continue;
            }
            adj[u][v] = true;
            adj[v][u] = true;
            key |= bit(n, u, v);
        }
        *dist.entry(key).or_default() += 1;
    }
    Ok(dist)
}

/// Half the L1 distance between the two empirical distributions.
pub fn total_variation(a: &Distribution, b: &Distribution) -> f64 {
    let na: usize = a.values().sum();
    let nb: usize = b.values().sum();
    if na == 0 || nb == 0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    let mut keys: Vec<&u64> = a.keys().chain(b.keys()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na as f64;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub trials: usize,
    pub engine_support: usize,
    pub oracle_support: usize,
    pub total_variation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares `trials` engine runs with `trials` oracle samples.
pub fn compare_with_oracle(n: usize, trials: usize, seed: u64) -> Result<OracleReport, HarnessError> {
    let engine = engine_distribution(n, trials, seed)?;
    // keep the oracle stream away from the engine seeds
    let oracle = permutation_distribution(n, trials, seed ^ 0x9E37_79B9_7F4A_7C15)?;
    let tv = total_variation(&engine, &oracle);
    Ok(OracleReport {
        n,
        trials,
        engine_support: engine.len(),
        oracle_support: oracle.len(),
        total_variation: tv,
        tolerance: TV_TOLERANCE,
        passed: tv <= TV_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_bits_are_distinct() {
        let n = MAX_ORACLE_N;
        let mut all = 0u64;
        for u in 0..n {
            for v in u + 1..n {
                let b = bit(n, u, v);
                assert_eq!(all & b, 0);
                all |= b;
            }
        }
        assert_eq!(all.count_ones() as usize, n * (n - 1) / 2);
    }

    #[test]
    fn n3_outcomes_are_the_three_paths() {
        for dist in [
            engine_distribution(3, 3000, 0).unwrap(),
            permutation_distribution(3, 3000, 0).unwrap(),
        ] {
            assert_eq!(dist.len(), 3);
            assert!(dist.keys().all(|k| k.count_ones() == 2));
            for &c in dist.values() {
                assert!((c as f64 / 3000.0 - 1.0 / 3.0).abs() < 0.04);
            }
        }
    }

    #[test]
    fn n4_outcomes() {
        // maximal triangle-free graphs on 4 vertices: 4 stars and 3 four-cycles
        let dist = permutation_distribution(4, 5000, 1).unwrap();
        for &k in dist.keys() {
            assert!(k.count_ones() == 3 || k.count_ones() == 4);
        }
        assert_eq!(dist.len(), 7);
    }

    #[test]
    fn tv_basics() {
        let a: Distribution = [(1, 5), (2, 5)].into_iter().collect();
        let b: Distribution = [(1, 10)].into_iter().collect();
        assert!((total_variation(&a, &a)).abs() < 1e-15);
        assert!((total_variation(&a, &b) - 0.5).abs() < 1e-15);
        assert!(compare_with_oracle(20, 1, 0).is_err());
    }
}
