//! Exact simulation of the triangle-free graph process.
//!
//! Every unordered pair carries one of three statuses: `Edge` once inserted,
//! `Closed` when the endpoints share a neighbour (inserting it would create a
//! triangle), and `Open` otherwise. Statuses live in a triangular byte array
//! indexed by pair rank; open pairs are additionally kept in an
//! [`OpenPairSet`] so a step is one uniform draw plus a scan of the two
//! endpoint neighbourhoods.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::ops::ControlFlow;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{pair_count, GraphView, Pair};
use crate::open_set::OpenPairSet;

/// Default upper bound on `n`; the status store costs `n(n-1)/2` bytes.
pub const DEFAULT_MAX_VERTICES: usize = 65_535;

/// Largest `n` whose pair ranks fit the `u32` position table.
pub const HARD_MAX_VERTICES: usize = 92_681;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum PairStatus {
    Open = 0,
    Edge = 1,
    Closed = 2,
}

impl fmt::Display for PairStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PairStatus::Open => "open",
            PairStatus::Edge => "edge",
            PairStatus::Closed => "closed",
        };
        f.write_str(s)
    }
}

/// Role of a third vertex `w` relative to a non-edge `{u,v}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    /// Both `{u,w}` and `{v,w}` are open.
    OpenVertex,
    /// One of `{u,w}`, `{v,w}` is an edge and the other is open.
    Partial,
    /// Both are edges; `w` is a common neighbour and `{u,v}` is closed.
    Complete,
    /// Any combination involving a closed pair.
    Neither,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcessError {
    #[error("vertex count {n} outside the supported range 2..={max}")]
    Sizing { n: usize, max: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("vertices must be distinct (got {0} twice)")]
    RepeatedVertex(u32),
    #[error("pair {0} is an edge")]
    PairIsEdge(Pair),
    #[error("pair {0} was never inserted")]
    NeverInserted(Pair),
    #[error("pair {pair} is {status}, not open")]
    NotOpen { pair: Pair, status: PairStatus },
    #[error("frozen partial sets were not recorded for this run")]
    NotRecorded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProcessConfig {
    /// Reject `n` above this value (clamped to [`HARD_MAX_VERTICES`]).
    pub max_vertices: usize,
    /// Store each inserted pair's partial set as it was just before insertion.
    pub record_frozen_y: bool,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        ProcessConfig {
            max_vertices: DEFAULT_MAX_VERTICES,
            record_frozen_y: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StopCondition {
    /// Run until no open pair remains.
    Saturation,
    /// Stop once this many edges have been inserted.
    Steps(usize),
    /// Stop once the scaled time `i / n^{3/2}` reaches this value.
    Time(f64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepResult {
    /// Step index after the insertion (1 for the first edge).
    pub step: usize,
    pub chosen: Pair,
    /// Pairs that moved from open to closed because of this insertion.
    pub newly_closed: Vec<Pair>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub final_step: usize,
    pub open_pairs: usize,
    pub saturated: bool,
}

/// `numerator / denominator` kept exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub numerator: usize,
    pub denominator: usize,
}

impl Ratio {
    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub pair: Pair,
    pub stored: PairStatus,
    pub recomputed: PairStatus,
    pub step: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub step: usize,
    pub pairs_checked: usize,
    pub discrepancies: Vec<Discrepancy>,
    /// Number of distinct triangles in the graph.
    pub triangles: usize,
    /// Problems with the open-pair index (size mismatch, stale entries).
    pub open_set_errors: Vec<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty() && self.triangles == 0 && self.open_set_errors.is_empty()
    }
}

/// State of one run of the process.
#[derive(Clone, Debug)]
pub struct ProcessState {
    n: usize,
    step: usize,
    adjacency: Vec<Vec<u32>>,
    edge_log: Vec<Pair>,
    row_offset: Vec<usize>,
    status: Vec<PairStatus>,
    open: OpenPairSet,
    closed_count: usize,
    frozen_y: Option<HashMap<Pair, Vec<u32>>>,
    rng: ChaCha8Rng,
}

impl ProcessState {
    /// Fresh process on `n` vertices. The generator is ChaCha8 seeded with
    /// `ChaCha8Rng::seed_from_u64(seed)`.
    pub fn new(n: usize, seed: u64) -> Result<Self, ProcessError> {
        Self::with_config(n, seed, ProcessConfig::default())
    }

    pub fn with_config(n: usize, seed: u64, config: ProcessConfig) -> Result<Self, ProcessError> {
        let max = config.max_vertices.min(HARD_MAX_VERTICES);
        if n < 2 || n > max {
            return Err(ProcessError::Sizing { n, max });
        }
        let total = pair_count(n);
        // rank(u, v) = row_offset[u] + v for u < v
        let row_offset: Vec<usize> = (0..n)
            .map(|u| u * (2 * n - u - 1) / 2)
            .zip(0..n)
            .map(|(start, u)| start.wrapping_sub(u + 1))
            .collect();
        let mut open = OpenPairSet::with_rank_capacity(total);
        let mut rank = 0;
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                open.insert(rank, Pair { u, v });
                rank += 1;
            }
        }
        Ok(ProcessState {
            n,
            step: 0,
            adjacency: vec![Vec::new(); n],
            edge_log: Vec::new(),
            row_offset,
            status: vec![PairStatus::Open; total],
            open,
            closed_count: 0,
            frozen_y: config.record_frozen_y.then(HashMap::new),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of inserted edges, the `i` of `G_i`.
    #[inline]
    pub fn step_count(&self) -> usize {
        self.step
    }

    /// Inserted pairs in order; entry `j` was inserted at step `j + 1`.
    pub fn edge_log(&self) -> &[Pair] {
        &self.edge_log
    }

    pub fn open_pairs(&self) -> &[Pair] {
        self.open.as_slice()
    }

    pub fn closed_pair_count(&self) -> usize {
        self.closed_count
    }

    pub fn is_saturated(&self) -> bool {
        self.open.is_empty()
    }

    /// Scaled time `step / n^{3/2}`.
    pub fn scaled_time(&self) -> f64 {
        self.step as f64 / (self.n as f64).powf(1.5)
    }

    #[inline]
    fn rank(&self, p: Pair) -> usize {
        self.row_offset[p.u as usize].wrapping_add(p.v as usize)
    }

    #[inline]
    fn status_of(&self, a: u32, b: u32) -> PairStatus {
        self.status[self.rank(Pair::new(a, b))]
    }

    fn check_vertex(&self, v: u32) -> Result<(), ProcessError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(ProcessError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    fn checked_pair(&self, u: u32, v: u32) -> Result<Pair, ProcessError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(ProcessError::RepeatedVertex(u));
        }
        Ok(Pair::new(u, v))
    }

    /// Inserts one uniformly random open pair. Returns `None` when the
    /// process is saturated.
    pub fn step(&mut self) -> Option<StepResult> {
        let chosen = self.open.sample(&mut self.rng)?;
        Some(self.insert(chosen))
    }

    fn insert(&mut self, chosen: Pair) -> StepResult {
        debug_assert_eq!(self.status[self.rank(chosen)], PairStatus::Open);
        if self.frozen_y.is_some() {
            let y = self.scan_partial(chosen);
            if let Some(map) = self.frozen_y.as_mut() {
                map.insert(chosen, y);
            }
        }
        let Pair { u, v } = chosen;
        let mut newly_closed = Vec::new();
        // A neighbour w of one endpoint becomes a common neighbour of the
        // other endpoint and w.
        for (from, other) in [(u, v), (v, u)] {
            for i in 0..self.adjacency[from as usize].len() {
                let w = self.adjacency[from as usize][i];
                let pair = Pair::new(other, w);
                let rank = self.rank(pair);
                if self.status[rank] == PairStatus::Open {
                    self.status[rank] = PairStatus::Closed;
                    self.closed_count += 1;
                    let offsets = &self.row_offset;
                    self.open
                        .remove(rank, |p| offsets[p.u as usize].wrapping_add(p.v as usize));
                    newly_closed.push(pair);
                }
            }
        }
        let rank = self.rank(chosen);
        self.status[rank] = PairStatus::Edge;
        let offsets = &self.row_offset;
        self.open
            .remove(rank, |p| offsets[p.u as usize].wrapping_add(p.v as usize));
        self.adjacency[u as usize].push(v);
        self.adjacency[v as usize].push(u);
        self.edge_log.push(chosen);
        self.step += 1;
        StepResult {
            step: self.step,
            chosen,
            newly_closed,
        }
    }

    /// Whether `stop` is already satisfied (saturation aside).
    pub fn should_stop(&self, stop: StopCondition) -> bool {
        match stop {
            StopCondition::Saturation => false,
            StopCondition::Steps(limit) => self.step >= limit,
            StopCondition::Time(t) => self.scaled_time() >= t,
        }
    }

    pub fn run(&mut self, stop: StopCondition) -> RunOutcome {
        self.run_with(stop, |_, _| ControlFlow::Continue(()))
    }

    /// Runs until `stop`, saturation, or the observer breaks. The observer
    /// sees the state after each insertion.
    pub fn run_with<F>(&mut self, stop: StopCondition, mut observer: F) -> RunOutcome
    where
        F: FnMut(&ProcessState, &StepResult) -> ControlFlow<()>,
    {
        while !self.should_stop(stop) {
            match self.step() {
                Some(result) => {
                    if observer(self, &result).is_break() {
                        break;
                    }
                }
                None => break,
            }
        }
        RunOutcome {
            final_step: self.step,
            open_pairs: self.open.len(),
            saturated: self.open.is_empty(),
        }
    }

    pub fn pair_status(&self, u: u32, v: u32) -> Result<PairStatus, ProcessError> {
        let pair = self.checked_pair(u, v)?;
        Ok(self.status[self.rank(pair)])
    }

    pub fn classify_vertex(&self, u: u32, v: u32, w: u32) -> Result<VertexClass, ProcessError> {
        let pair = self.checked_pair(u, v)?;
        self.check_vertex(w)?;
        if w == u || w == v {
            return Err(ProcessError::RepeatedVertex(w));
        }
        if self.status[self.rank(pair)] == PairStatus::Edge {
            return Err(ProcessError::PairIsEdge(pair));
        }
        use PairStatus::*;
        Ok(match (self.status_of(u, w), self.status_of(v, w)) {
            (Open, Open) => VertexClass::OpenVertex,
            (Edge, Open) | (Open, Edge) => VertexClass::Partial,
            (Edge, Edge) => VertexClass::Complete,
            _ => VertexClass::Neither,
        })
    }

    /// `Y_{u,v}`: vertices `w` with one of `{u,w}`, `{v,w}` an edge and the
    /// other open. Costs `O(deg u + deg v)`. Sorted ascending.
    pub fn partial_set(&self, u: u32, v: u32) -> Result<Vec<u32>, ProcessError> {
        let pair = self.checked_pair(u, v)?;
        if self.status[self.rank(pair)] == PairStatus::Edge {
            return Err(ProcessError::PairIsEdge(pair));
        }
        Ok(self.scan_partial(pair))
    }

    /// Size of `Y_{u,v}` for a pair known to be a non-edge.
    pub(crate) fn partial_count_unchecked(&self, pair: Pair) -> usize {
        let mut count = 0;
        for (from, other) in [(pair.u, pair.v), (pair.v, pair.u)] {
            for &w in &self.adjacency[from as usize] {
                if w != other && self.status_of(other, w) == PairStatus::Open {
                    count += 1;
                }
            }
        }
        count
    }

    fn scan_partial(&self, pair: Pair) -> Vec<u32> {
        let mut out = Vec::new();
        for (from, other) in [(pair.u, pair.v), (pair.v, pair.u)] {
            for &w in &self.adjacency[from as usize] {
                if w != other && self.status_of(other, w) == PairStatus::Open {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Partial set of an edge as it was just before the edge was inserted.
    pub fn frozen_partial_set(&self, u: u32, v: u32) -> Result<&[u32], ProcessError> {
        let pair = self.checked_pair(u, v)?;
        if self.status[self.rank(pair)] != PairStatus::Edge {
            return Err(ProcessError::NeverInserted(pair));
        }
        let map = self.frozen_y.as_ref().ok_or(ProcessError::NotRecorded)?;
        map.get(&pair)
            .map(Vec::as_slice)
            .ok_or(ProcessError::NotRecorded)
    }

    /// `Q(i)`, the number of open pairs.
    pub fn open_pair_count(&self) -> usize {
        self.open.len()
    }

    /// `|Y_{u,v}| / Q(i)`: the chance that the next step closes the open pair `{u,v}`.
    pub fn closure_probability_estimate(&self, u: u32, v: u32) -> Result<Ratio, ProcessError> {
        let pair = self.checked_pair(u, v)?;
        let status = self.status[self.rank(pair)];
        if status != PairStatus::Open {
            return Err(ProcessError::NotOpen { pair, status });
        }
        Ok(Ratio {
            numerator: self.partial_count_unchecked(pair),
            denominator: self.open.len(),
        })
    }

    /// Recomputes statuses from the adjacency lists alone and checks the
    /// graph for triangles. All pairs are checked when `sample_size` is at
    /// least the number of pairs, otherwise a uniform sample (with
    /// replacement) of `sample_size` pairs.
    pub fn audit<R: Rng + ?Sized>(&self, sample_size: usize, rng: &mut R) -> AuditReport {
        let n = self.n;
        let total = pair_count(n);
        let mut report = AuditReport {
            step: self.step,
            ..AuditReport::default()
        };
        let mut mark = vec![false; n];
        let check = |report: &mut AuditReport, mark: &[bool], u: u32, v: u32| {
            let recomputed = if mark[v as usize] {
                PairStatus::Edge
            } else if self.adjacency[v as usize].iter().any(|&w| mark[w as usize]) {
                PairStatus::Closed
            } else {
                PairStatus::Open
            };
            let pair = Pair::new(u, v);
            let stored = self.status[self.rank(pair)];
            report.pairs_checked += 1;
            if stored != recomputed {
                report.discrepancies.push(Discrepancy {
                    pair,
                    stored,
                    recomputed,
                    step: self.step,
                });
            }
        };

        if sample_size >= total {
            let mut counts = [0usize; 3];
            for u in 0..n as u32 {
                for &w in &self.adjacency[u as usize] {
                    mark[w as usize] = true;
                }
                for v in u + 1..n as u32 {
                    check(&mut report, &mark, u, v);
                    counts[self.status_of(u, v) as usize] += 1;
                }
                for &w in &self.adjacency[u as usize] {
                    mark[w as usize] = false;
                }
            }
            if counts[PairStatus::Open as usize] != self.open.len() {
                report.open_set_errors.push(format!(
                    "open set holds {} pairs but {} statuses are open",
                    self.open.len(),
                    counts[PairStatus::Open as usize]
                ));
            }
            if counts[PairStatus::Edge as usize] != self.step {
                report.open_set_errors.push(format!(
                    "{} edge statuses after {} steps",
                    counts[PairStatus::Edge as usize],
                    self.step
                ));
            }
        } else {
            for _ in 0..sample_size {
                let u = rng.gen_range(0..n as u32);
                let mut v = rng.gen_range(0..n as u32 - 1);
                if v >= u {
                    v += 1;
                }
                for &w in &self.adjacency[u as usize] {
                    mark[w as usize] = true;
                }
                check(&mut report, &mark, u, v);
                for &w in &self.adjacency[u as usize] {
                    mark[w as usize] = false;
                }
            }
        }

        for (slot, &pair) in self.open.as_slice().iter().enumerate() {
            let rank = self.rank(pair);
            if self.status[rank] != PairStatus::Open || self.open.slot_of(rank) != Some(slot) {
                report
                    .open_set_errors
                    .push(format!("open set entry {slot} holds stale pair {pair}"));
            }
        }

        // Each triangle is seen once from each of its three edges.
        let mut corners = 0;
        for u in 0..n {
            for &w in &self.adjacency[u] {
                mark[w as usize] = true;
            }
            for &v in &self.adjacency[u] {
                if (u as u32) < v {
                    corners += self.adjacency[v as usize]
                        .iter()
                        .filter(|&&w| mark[w as usize])
                        .count();
                }
            }
            for &w in &self.adjacency[u] {
                mark[w as usize] = false;
            }
        }
        report.triangles = corners / 3;
        report
    }

    /// Writes the edge log as `step u v` lines, steps starting at 1.
    pub fn write_edge_log<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, p) in self.edge_log.iter().enumerate() {
            writeln!(out, "{} {} {}", i + 1, p.u, p.v)?;
        }
        Ok(())
    }

    /// Overwrites a stored status without touching anything else, so that
    /// audit sensitivity can be tested.
    #[doc(hidden)]
    pub fn corrupt_status(&mut self, u: u32, v: u32, status: PairStatus) {
        let rank = self.rank(Pair::new(u, v));
        self.status[rank] = status;
    }

    /// Inserts a specific open pair, bypassing the random draw. Used to build
    /// deterministic fixtures.
    pub fn insert_pair(&mut self, u: u32, v: u32) -> Result<StepResult, ProcessError> {
        let pair = self.checked_pair(u, v)?;
        let status = self.status[self.rank(pair)];
        if status != PairStatus::Open {
            return Err(ProcessError::NotOpen { pair, status });
        }
        Ok(self.insert(pair))
    }
}

impl GraphView for ProcessState {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    #[inline]
    fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.status_of(u, v) == PairStatus::Edge
    }

    fn edge_count(&self) -> usize {
        self.step
    }
}
