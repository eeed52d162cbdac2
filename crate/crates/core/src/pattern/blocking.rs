//! Placement classification against pair statuses.
//!
//! A placement is blocked once some pattern edge lands on a closed pair.
//! Closed pairs never become edges, so a blocked placement stays blocked for
//! the rest of the run.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::GraphView;
use crate::pattern::{Pattern, Placement};
use crate::process::{PairStatus, ProcessState};

/// Neighbour count above which an outside vertex is heavy.
pub const DEFAULT_HEAVY_THRESHOLD: usize = 6;

/// Vertices outside `subset` with more than `threshold` neighbours in it.
pub fn heavy_neighbors<G: GraphView + ?Sized>(
    graph: &G,
    subset: &[u32],
    threshold: usize,
) -> Vec<u32> {
    let mut inside = vec![false; graph.vertex_count()];
    let mut links = vec![0usize; graph.vertex_count()];
    for &w in subset {
        inside[w as usize] = true;
    }
    for &w in subset {
        for &v in graph.neighbors(w) {
            links[v as usize] += 1;
        }
    }
    (0..graph.vertex_count() as u32)
        .filter(|&v| !inside[v as usize] && links[v as usize] > threshold)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlacementClass {
    /// Some pattern edge sits on a closed pair.
    Blocked,
    /// Every pattern edge is an edge of the graph.
    Realized,
    /// Neither: every pattern edge is an edge or an open pair.
    OpenCompatible,
}

pub fn classify_placement(state: &ProcessState, pattern: &Pattern, placement: &Placement) -> PlacementClass {
    let mut all_edges = true;
    for &(a, b) in pattern.edges() {
        let status = state
            .pair_status(placement.image(a), placement.image(b))
            .expect("placement images are distinct vertices in range");
        match status {
            PairStatus::Closed => return PlacementClass::Blocked,
            PairStatus::Open => all_edges = false,
            PairStatus::Edge => {}
        }
    }
    if all_edges {
        PlacementClass::Realized
    } else {
        PlacementClass::OpenCompatible
    }
}

/// Uniform injective map of the pattern's `k` vertices into `0..n`.
pub fn random_placement<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Placement {
    Placement(
        index::sample(rng, n, k)
            .into_iter()
            .map(|v| v as u32)
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub step: usize,
    pub sampled: usize,
    pub blocked: usize,
    pub realized: usize,
    pub fraction_blocked: f64,
    /// Up to the requested number of blocked placements, in sampling order.
    pub blocked_examples: Vec<Placement>,
}

/// Samples `sample_count` uniform injective placements and classifies each.
pub fn blocked_placements<R: Rng + ?Sized>(
    state: &ProcessState,
    pattern: &Pattern,
    sample_count: usize,
    keep_blocked: usize,
    rng: &mut R,
) -> BlockReport {
    assert!(pattern.k() <= state.n(), "pattern larger than the graph");
    let mut report = BlockReport {
        step: state.step_count(),
        sampled: sample_count,
        blocked: 0,
        realized: 0,
        fraction_blocked: 0.0,
        blocked_examples: Vec::new(),
    };
    for _ in 0..sample_count {
        let placement = random_placement(state.n(), pattern.k(), rng);
        match classify_placement(state, pattern, &placement) {
            PlacementClass::Blocked => {
                report.blocked += 1;
                if report.blocked_examples.len() < keep_blocked {
                    report.blocked_examples.push(placement);
                }
            }
            PlacementClass::Realized => report.realized += 1,
            PlacementClass::OpenCompatible => {}
        }
    }
    if sample_count > 0 {
        report.fraction_blocked = report.blocked as f64 / sample_count as f64;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use crate::process::StopCondition;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn heavy_neighbor_examples() {
        assert!(heavy_neighbors(&SimpleGraph::empty(10), &[0, 1, 2], 6).is_empty());
        let star = SimpleGraph::star(7);
        let leaves: Vec<u32> = (1..=7).collect();
        assert_eq!(heavy_neighbors(&star, &leaves, 6), vec![0]);
        assert!(heavy_neighbors(&star, &leaves, 7).is_empty());
    }

    #[test]
    fn heavy_set_forces_dense_union() {
        // W of size 2k and k + 1 outside vertices adjacent to all of W
        let k = 7usize;
        let w: Vec<u32> = (0..2 * k as u32).collect();
        let mut g = SimpleGraph::empty(2 * k + k + 1);
        for h in 2 * k as u32..(3 * k + 1) as u32 {
            for &x in &w {
                g.add_edge(h, x);
            }
        }
        let heavy = heavy_neighbors(&g, &w, DEFAULT_HEAVY_THRESHOLD);
        assert!(heavy.len() > k);
        let mut union = w.clone();
        union.extend(&heavy);
        assert!(g.edges_within(&union) > 6 * k);
        // each heavy vertex alone contributes more than 6 edges into W
        assert!(heavy.len() * (DEFAULT_HEAVY_THRESHOLD + 1) > 6 * k);
    }

    #[test]
    fn fresh_state_blocks_nothing() {
        let s = ProcessState::new(50, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = blocked_placements(&s, &Pattern::cycle(4).unwrap(), 500, 10, &mut rng);
        assert_eq!(r.blocked, 0);
        assert_eq!(r.fraction_blocked, 0.0);
        assert_eq!(r.realized, 0);
    }

    #[test]
    fn single_edge_blocking_matches_closed_density() {
        let mut s = ProcessState::new(40, 2).unwrap();
        s.run(StopCondition::Saturation);
        let density = s.closed_pair_count() as f64 / (40.0 * 39.0 / 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples = 200_000;
        let r = blocked_placements(&s, &Pattern::single_edge(), samples, 0, &mut rng);
        // binomial standard error is below 0.0012; allow five of them
        assert!((r.fraction_blocked - density).abs() < 0.006, "{} vs {density}", r.fraction_blocked);
        assert_eq!(r.realized + r.blocked, samples);
    }

    #[test]
    fn placements_are_injective_and_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let p = random_placement(15, 12, &mut rng);
            assert!(p.is_injective());
            assert!(p.0.iter().all(|&v| v < 15));
        }
    }

    #[test]
    fn blocked_stays_blocked() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pattern = Pattern::cycle(4).unwrap();
        let mut s = ProcessState::new(30, 8).unwrap();
        s.run(StopCondition::Steps(40));
        let r = blocked_placements(&s, &pattern, 2000, 200, &mut rng);
        assert!(!r.blocked_examples.is_empty());
        s.run(StopCondition::Saturation);
        for p in &r.blocked_examples {
            assert_eq!(classify_placement(&s, &pattern, p), PlacementClass::Blocked);
        }
    }
}
