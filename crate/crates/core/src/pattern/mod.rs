//! Fixed triangle-free patterns and the measurements made on them: copy
//! search, first appearance during a run, densest `k`-subsets, and the
//! fraction of placements blocked by closed pairs.

mod blocking;
mod densest;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trajectory::MU;

pub use blocking::{
    blocked_placements, classify_placement, heavy_neighbors, random_placement, BlockReport,
    PlacementClass, DEFAULT_HEAVY_THRESHOLD,
};
pub use densest::{max_edges_k_subset, DensestResult, SubsetError, SubsetMode, EXACT_SUBSET_GUARD};
pub use search::{contains_copy, count_copies, copy_through_edge, AppearanceMonitor};

/// Largest pattern size the search is tuned for.
pub const MAX_PATTERN_VERTICES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    Duplicate { line: usize, u: usize, v: usize },
    #[error("not triangle-free: vertices {0}, {1}, {2} form a triangle")]
    Triangle(usize, usize, usize),
    #[error("pattern needs k >= 2 and at least one edge (k = {k}, e = {e})")]
    TooSmall { k: usize, e: usize },
}

/// An injective map from pattern vertices to graph vertices; entry `x` is the
/// image of pattern vertex `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement(pub Vec<u32>);

impl Placement {
    pub fn image(&self, x: usize) -> u32 {
        self.0[x]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// A validated triangle-free pattern graph on vertices `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    name: String,
    k: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Pattern {
    /// Validates an edge list over `0..k`.
    pub fn new(
        name: impl Into<String>,
        k: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, PatternError> {
        let mut adjacency = vec![Vec::new(); k];
        let mut normalized = Vec::with_capacity(edges.len());
        for (idx, &(a, b)) in edges.iter().enumerate() {
            let line = idx + 1;
            if a >= k || b >= k {
                return Err(PatternError::Parse {
                    line,
                    message: format!("vertex out of range 0..{k}"),
                });
            }
            if a == b {
                return Err(PatternError::SelfLoop { line, vertex: a });
            }
            let (u, v) = (a.min(b), a.max(b));
            if adjacency[u].contains(&v) {
                return Err(PatternError::Duplicate { line, u, v });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            normalized.push((u, v));
        }
        if k < 2 || normalized.is_empty() {
            return Err(PatternError::TooSmall {
                k,
                e: normalized.len(),
            });
        }
        for &(u, v) in &normalized {
            if let Some(&w) = adjacency[u].iter().find(|w| adjacency[v].contains(w)) {
                let mut tri = [u, v, w];
                tri.sort_unstable();
                return Err(PatternError::Triangle(tri[0], tri[1], tri[2]));
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Pattern {
            name: name.into(),
            k,
            edges: normalized,
            adjacency,
        })
    }

    /// Parses the text format: a header line `k e`, then `e` lines `u v`
    /// with `0 <= u < v < k`. Blank lines and lines starting with `#` are
    /// skipped. Errors carry 1-based line numbers.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self, PatternError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        let mut edge_lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(PatternError::Parse {
                    line,
                    message: format!("expected two integers, found {} fields", fields.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| PatternError::Parse {
                    line,
                    message: format!("`{s}` is not a non-negative integer"),
                })
            };
            let (a, b) = (parse(fields[0])?, parse(fields[1])?);
            match header {
                None => header = Some((a, b)),
                Some((k, _)) => {
                    if a == b {
                        return Err(PatternError::SelfLoop { line, vertex: a });
                    }
                    if a > b {
                        return Err(PatternError::Parse {
                            line,
                            message: format!("edge `{a} {b}` must be written with u < v"),
                        });
                    }
                    if b >= k {
                        return Err(PatternError::Parse {
                            line,
                            message: format!("vertex {b} out of range 0..{k}"),
                        });
                    }
                    if edges.contains(&(a, b)) {
                        return Err(PatternError::Duplicate { line, u: a, v: b });
                    }
                    edges.push((a, b));
                    edge_lines.push(line);
                }
            }
        }
        let (k, e) = header.ok_or(PatternError::Parse {
            line: 1,
            message: "missing `k e` header".into(),
        })?;
        if edges.len() != e {
            return Err(PatternError::Parse {
                line: text.lines().count().max(1),
                message: format!("header declares {e} edges, found {}", edges.len()),
            });
        }
        Pattern::new(name, k, &edges)
    }

    pub fn cycle(len: usize) -> Result<Self, PatternError> {
        let edges: Vec<_> = (0..len).map(|i| (i, (i + 1) % len)).collect();
        Pattern::new(format!("C{len}"), len, &edges)
    }

    pub fn path(vertices: usize) -> Result<Self, PatternError> {
        let edges: Vec<_> = (1..vertices).map(|i| (i - 1, i)).collect();
        Pattern::new(format!("P{vertices}"), vertices, &edges)
    }

    pub fn complete_bipartite(left: usize, right: usize) -> Result<Self, PatternError> {
        let mut edges = Vec::with_capacity(left * right);
        for a in 0..left {
            for b in 0..right {
                edges.push((a, left + b));
            }
        }
        Pattern::new(format!("K{left},{right}"), left + right, &edges)
    }

    pub fn single_edge() -> Self {
        Pattern::new("K2", 2, &[(0, 1)]).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    /// `10k/μ² ≤ e`, i.e. `e ≥ 10240 k`.
    pub fn dense_flag(&self) -> bool {
        10.0 * self.k as f64 / (MU * MU) <= self.e() as f64
    }

    /// `e ≥ 3k`: enough edges that any copy is itself a dense `k`-subset.
    pub fn meets_subset_threshold(&self) -> bool {
        self.e() >= 3 * self.k
    }

    /// Text form accepted by [`Pattern::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.k, self.e());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (k = {}, e = {})", self.name, self.k, self.e())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_c4() {
        let p = Pattern::parse("c4", "# four-cycle\n4 4\n0 1\n1 2\n2 3\n0 3\n").unwrap();
        assert_eq!((p.k(), p.e()), (4, 4));
        assert!(!p.dense_flag());
        assert_eq!(p.neighbors(0), &[1, 3]);
    }

    #[test]
    fn rejects_triangle() {
        let err = Pattern::parse("t", "3 3\n0 1\n1 2\n0 2\n").unwrap_err();
        assert_eq!(err, PatternError::Triangle(0, 1, 2));
        assert!(err.to_string().contains("not triangle-free"));
    }

    #[test]
    fn k66_is_below_the_density_constant() {
        let p = Pattern::complete_bipartite(6, 6).unwrap();
        assert_eq!((p.k(), p.e()), (12, 36));
        assert!(!p.dense_flag());
        assert!(p.meets_subset_threshold());
        let roundtrip = Pattern::parse("K6,6", &p.to_text()).unwrap();
        assert_eq!(roundtrip, p);
    }

    #[test]
    fn dense_flag_threshold() {
        // the flag flips exactly at e = 10240 k; check the arithmetic with k = 1 scale
        assert_eq!(10.0 / (MU * MU), 10240.0);
    }

    #[test]
    fn malformed_inputs_report_lines() {
        let cases = [
            ("4 2\n0 1\n1 1\n", PatternError::SelfLoop { line: 3, vertex: 1 }),
            ("4 2\n0 1\n0 1\n", PatternError::Duplicate { line: 3, u: 0, v: 1 }),
        ];
        for (text, expected) in cases {
            assert_eq!(Pattern::parse("x", text).unwrap_err(), expected);
        }
        let cases = [
            ("4 2\n0 1\n2 x\n", 3),
            ("4 1\n0 1 2\n", 2),
            ("4 1\n0 7\n", 2),
            ("4 1\n3 1\n", 2),
            ("4 2\n0 1\n", 2),
            ("", 1),
        ];
        for (text, line) in cases {
            match Pattern::parse("x", text).unwrap_err() {
                PatternError::Parse { line: got, .. } => assert_eq!(got, line, "{text:?}"),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert!(matches!(
            Pattern::parse("x", "1 0\n"),
            Err(PatternError::TooSmall { .. })
        ));
    }

    #[test]
    fn placement_injectivity() {
        assert!(Placement(vec![3, 1, 2]).is_injective());
        assert!(!Placement(vec![3, 1, 3]).is_injective());
    }
}
