//! Unordered vertex pairs and a read-only graph abstraction shared by the
//! process state and the pattern search.

use std::fmt;

use serde::{Deserialize, Serialize};

/// An unordered pair of distinct vertices, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    pub u: u32,
    pub v: u32,
}

impl Pair {
    /// Normalizes the endpoints so that `u < v`. Panics on `a == b`.
    #[inline]
    pub fn new(a: u32, b: u32) -> Self {
        assert_ne!(a, b, "a pair needs two distinct vertices");
        if a < b {
            Pair { u: a, v: b }
        } else {
            Pair { u: b, v: a }
        }
    }

    #[inline]
    pub fn contains(&self, w: u32) -> bool {
        self.u == w || self.v == w
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// Number of unordered pairs on `n` vertices.
#[inline]
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Read-only adjacency access.
pub trait GraphView {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, v: u32) -> &[u32];
    fn has_edge(&self, u: u32, v: u32) -> bool;

    fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    fn edge_count(&self) -> usize {
        (0..self.vertex_count() as u32)
            .map(|v| self.degree(v))
            .sum::<usize>()
            / 2
    }

    /// Number of edges with both endpoints in `subset`.
    fn edges_within(&self, subset: &[u32]) -> usize {
        let mut count = 0;
        for (i, &a) in subset.iter().enumerate() {
            for &b in &subset[i + 1..] {
                if self.has_edge(a, b) {
                    count += 1;
                }
            }
        }
        count
    }
}

/// A plain undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Vec<Vec<u32>>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; duplicate edges are ignored.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut g = SimpleGraph::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn complete_bipartite(left: usize, right: usize) -> Self {
        let mut edges = Vec::with_capacity(left * right);
        for a in 0..left {
            for b in 0..right {
                edges.push((a as u32, (left + b) as u32));
            }
        }
        SimpleGraph::from_edges(left + right, &edges)
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves as u32).map(|l| (0, l)).collect();
        SimpleGraph::from_edges(leaves + 1, &edges)
    }

    /// Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, a: u32, b: u32) -> bool {
        assert_ne!(a, b, "self-loops are not allowed");
        let list = &mut self.adjacency[a as usize];
        match list.binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                list.insert(pos, b);
                let other = &mut self.adjacency[b as usize];
                let pos = other.binary_search(&a).unwrap_err();
                other.insert(pos, a);
                true
            }
        }
    }

    pub fn edges(&self) -> Vec<Pair> {
        let mut out = Vec::new();
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if (u as u32) < v {
                    out.push(Pair::new(u as u32, v));
                }
            }
        }
        out
    }
}

impl GraphView for SimpleGraph {
    fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_normalizes() {
        assert_eq!(Pair::new(5, 2), Pair { u: 2, v: 5 });
        assert_eq!(Pair::new(2, 5), Pair::new(5, 2));
    }

    #[test]
    fn simple_graph_basics() {
        let g = SimpleGraph::complete_bipartite(2, 3);
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 6);
        assert!(g.has_edge(0, 4));
        assert!(!g.has_edge(0, 1));
        assert_eq!(g.edges_within(&[0, 1, 2, 3]), 4);
        let mut g = SimpleGraph::empty(3);
        assert!(g.add_edge(0, 1));
        assert!(!g.add_edge(1, 0));
    }
}
