//! Largest number of edges spanned by `k` vertices.
//!
//! Exact mode enumerates all `k`-subsets under a size guard. Local search is
//! a lower-bound estimator: each restart grows a subset greedily from a random
//! seed vertex and then applies improving single-vertex swaps.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphView;

/// Exact enumeration refuses more than this many subsets.
pub const EXACT_SUBSET_GUARD: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsetMode {
    Exact,
    LocalSearch { restarts: usize },
}

impl SubsetMode {
    pub const DEFAULT_RESTARTS: usize = 100;

    pub fn local_search() -> Self {
        SubsetMode::LocalSearch {
            restarts: Self::DEFAULT_RESTARTS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensestResult {
    pub edges: usize,
    /// A subset achieving `edges`, sorted.
    pub subset: Vec<u32>,
    /// `false` for local search: `edges` is then only a lower bound.
    pub exact: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubsetError {
    #[error("subset size {k} must satisfy 2 <= k <= n = {n}")]
    InvalidK { k: usize, n: usize },
    #[error("exact search over C({n},{k}) subsets exceeds the guard of {guard}; use local search")]
    ExactTooLarge { n: usize, k: usize, guard: u128 },
}

/// `C(n, k)`, saturating at `u128::MAX`.
fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn max_edges_k_subset<G, R>(
    graph: &G,
    k: usize,
    mode: SubsetMode,
    rng: &mut R,
) -> Result<DensestResult, SubsetError>
where
    G: GraphView + ?Sized,
    R: Rng + ?Sized,
{
    let n = graph.vertex_count();
    if k < 2 || k > n {
        return Err(SubsetError::InvalidK { k, n });
    }
    match mode {
        SubsetMode::Exact => {
            if binomial(n, k) > EXACT_SUBSET_GUARD {
                return Err(SubsetError::ExactTooLarge {
                    n,
                    k,
                    guard: EXACT_SUBSET_GUARD,
                });
            }
            Ok(exact(graph, k))
        }
        SubsetMode::LocalSearch { restarts } => Ok(local_search(graph, k, restarts.max(1), rng)),
    }
}

fn exact<G: GraphView + ?Sized>(graph: &G, k: usize) -> DensestResult {
    struct Walk<'a, G: ?Sized> {
        graph: &'a G,
        k: usize,
        current: Vec<u32>,
        best: usize,
        best_subset: Vec<u32>,
    }
    impl<G: GraphView + ?Sized> Walk<'_, G> {
        fn go(&mut self, next: u32, edges: usize) {
            if self.current.len() == self.k {
                if edges > self.best || self.best_subset.is_empty() {
                    self.best = edges;
                    self.best_subset = self.current.clone();
                }
                return;
            }
            let n = self.graph.vertex_count() as u32;
            let remaining = (self.k - self.current.len()) as u32;
            for v in next..=n - remaining {
                let gained = self
                    .current
                    .iter()
                    .filter(|&&w| self.graph.has_edge(v, w))
                    .count();
                self.current.push(v);
                self.go(v + 1, edges + gained);
                self.current.pop();
            }
        }
    }
    let mut walk = Walk {
        graph,
        k,
        current: Vec::with_capacity(k),
        best: 0,
        best_subset: Vec::new(),
    };
    walk.go(0, 0);
    DensestResult {
        edges: walk.best,
        subset: walk.best_subset,
        exact: true,
    }
}

/// Subset under construction with per-vertex counts of neighbours inside it.
struct Climber<'a, G: ?Sized> {
    graph: &'a G,
    inside: Vec<bool>,
    links: Vec<u32>,
    members: Vec<u32>,
    edges: usize,
}

impl<'a, G: GraphView + ?Sized> Climber<'a, G> {
    fn new(graph: &'a G) -> Self {
        let n = graph.vertex_count();
        Climber {
            graph,
            inside: vec![false; n],
            links: vec![0; n],
            members: Vec::new(),
            edges: 0,
        }
    }

    fn add(&mut self, v: u32) {
        self.edges += self.links[v as usize] as usize;
        self.inside[v as usize] = true;
        self.members.push(v);
        for &w in self.graph.neighbors(v) {
            self.links[w as usize] += 1;
        }
    }

    fn remove(&mut self, v: u32) {
        self.edges -= self.links[v as usize] as usize;
        self.inside[v as usize] = false;
        self.members.retain(|&x| x != v);
        for &w in self.graph.neighbors(v) {
            self.links[w as usize] -= 1;
        }
    }

    fn clear(&mut self) {
        while let Some(&v) = self.members.last() {
            self.remove(v);
        }
    }

    /// Outside vertex with the most neighbours inside; random among ties.
    fn best_addition<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let mut best = 0;
        let mut ties = 0u32;
        let mut choice = u32::MAX;
        for v in 0..self.graph.vertex_count() {
            if self.inside[v] {
                continue;
            }
            let l = self.links[v];
            if choice == u32::MAX || l > best {
                best = l;
                choice = v as u32;
                ties = 1;
            } else if l == best {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    choice = v as u32;
                }
            }
        }
        choice
    }

    /// Best improving swap `(out, in)`, if any.
    fn best_swap(&self) -> Option<(u32, u32)> {
        let mut candidates: Vec<u32> = self
            .members
            .iter()
            .flat_map(|&u| self.graph.neighbors(u).iter().copied())
            .filter(|&v| !self.inside[v as usize])
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let mut best: Option<(i64, u32, u32)> = None;
        for &u in &self.members {
            let loss = self.links[u as usize] as i64;
            for &v in &candidates {
                let gain = self.links[v as usize] as i64
                    - i64::from(self.graph.has_edge(u, v))
                    - loss;
                if gain > 0 && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, u, v));
                }
            }
        }
        best.map(|(_, u, v)| (u, v))
    }
}

fn local_search<G, R>(graph: &G, k: usize, restarts: usize, rng: &mut R) -> DensestResult
where
    G: GraphView + ?Sized,
    R: Rng + ?Sized,
{
    let n = graph.vertex_count();
    // seed vertices are endpoints of random edges when there are any
    let endpoints: Vec<u32> = (0..n as u32)
        .flat_map(|v| std::iter::repeat_n(v, graph.degree(v)))
        .collect();
    let pool: Vec<u32> = if endpoints.is_empty() {
        (0..n as u32).collect()
    } else {
        endpoints
    };
    let mut climber = Climber::new(graph);
    let mut best = DensestResult {
        edges: 0,
        subset: Vec::new(),
        exact: false,
    };
    for _ in 0..restarts {
        climber.clear();
        climber.add(*pool.choose(rng).expect("nonempty pool"));
        while climber.members.len() < k {
            let v = climber.best_addition(rng);
            climber.add(v);
        }
        while let Some((out, inn)) = climber.best_swap() {
            climber.remove(out);
            climber.add(inn);
        }
        if best.subset.is_empty() || climber.edges > best.edges {
            best.edges = climber.edges;
            best.subset = climber.members.clone();
        }
    }
    best.subset.sort_unstable();
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use crate::process::{ProcessState, StopCondition};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// All `k`-subsets of `0..n`, lexicographic.
    fn combinations(n: usize, k: usize) -> Vec<Vec<u32>> {
        fn rec(n: u32, k: usize, from: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in from..n {
                cur.push(v);
                rec(n, k, v + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n as u32, k, 0, &mut Vec::new(), &mut out);
        out
    }

    fn oracle<G: GraphView>(g: &G, k: usize) -> usize {
        combinations(g.vertex_count(), k)
            .iter()
            .map(|s| g.edges_within(s))
            .max()
            .unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(5)
    }

    #[test]
    fn enumeration_helper() {
        assert_eq!(combinations(5, 4).len(), 5);
        assert_eq!(combinations(6, 3).len(), 20);
        assert_eq!(binomial(5, 4), 5);
        assert_eq!(binomial(2000, 2), 1_999_000);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn empty_graph_is_zero() {
        let g = SimpleGraph::empty(8);
        for k in 2..=8 {
            let r = max_edges_k_subset(&g, k, SubsetMode::Exact, &mut rng()).unwrap();
            assert_eq!(r.edges, 0);
            assert_eq!(r.subset.len(), k);
        }
    }

    #[test]
    fn k23_four_subset() {
        let g = SimpleGraph::complete_bipartite(2, 3);
        assert_eq!(oracle(&g, 4), 4);
        let r = max_edges_k_subset(&g, 4, SubsetMode::Exact, &mut rng()).unwrap();
        assert_eq!(r.edges, 4);
        assert!(r.exact);
        assert_eq!(g.edges_within(&r.subset), 4);
        let ls = max_edges_k_subset(&g, 4, SubsetMode::local_search(), &mut rng()).unwrap();
        assert_eq!(ls.edges, 4);
        assert!(!ls.exact);
    }

    #[test]
    fn star_three_subset() {
        let g = SimpleGraph::star(4);
        assert_eq!(oracle(&g, 3), 2);
        let r = max_edges_k_subset(&g, 3, SubsetMode::Exact, &mut rng()).unwrap();
        assert_eq!(r.edges, 2);
    }

    #[test]
    fn errors() {
        let g = SimpleGraph::empty(5);
        assert_eq!(
            max_edges_k_subset(&g, 1, SubsetMode::Exact, &mut rng()),
            Err(SubsetError::InvalidK { k: 1, n: 5 })
        );
        assert!(max_edges_k_subset(&g, 6, SubsetMode::Exact, &mut rng()).is_err());
        let big = SimpleGraph::empty(2000);
        assert!(matches!(
            max_edges_k_subset(&big, 12, SubsetMode::Exact, &mut rng()),
            Err(SubsetError::ExactTooLarge { .. })
        ));
    }

    #[test]
    fn exact_matches_oracle_and_bounds_local_search() {
        for seed in 0..8 {
            let mut s = ProcessState::new(11, seed).unwrap();
            s.run(StopCondition::Saturation);
            for k in [3, 5, 7] {
                let truth = oracle(&s, k);
                let ex = max_edges_k_subset(&s, k, SubsetMode::Exact, &mut rng()).unwrap();
                assert_eq!(ex.edges, truth);
                assert_eq!(s.edges_within(&ex.subset), truth);
                let ls = max_edges_k_subset(&s, k, SubsetMode::LocalSearch { restarts: 20 }, &mut rng())
                    .unwrap();
                assert!(ls.edges <= ex.edges);
                assert_eq!(s.edges_within(&ls.subset), ls.edges);
            }
        }
    }

    #[test]
    fn local_search_finds_planted_bipartite_block() {
        // K_{4,4} planted among isolated vertices
        let mut g = SimpleGraph::empty(300);
        for a in 0..4u32 {
            for b in 0..4u32 {
                g.add_edge(100 + a, 200 + b);
            }
        }
        let ls = max_edges_k_subset(&g, 8, SubsetMode::LocalSearch { restarts: 5 }, &mut rng())
            .unwrap();
        assert_eq!(ls.edges, 16);
        assert_eq!(g.edges_within(&ls.subset), ls.edges);
    }
}
