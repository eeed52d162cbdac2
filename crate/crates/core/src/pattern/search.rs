//! Backtracking search for (non-induced) copies of a pattern.
//!
//! Pattern vertices are matched in a fixed order where each vertex after the
//! first has as many already-matched neighbours as possible (ties broken by
//! higher pattern degree). Candidates for a vertex come from the graph
//! neighbourhood of the image of one matched neighbour, so for connected
//! patterns only the first vertex ever scans the whole vertex set.

use std::ops::ControlFlow;

use crate::graph::{GraphView, Pair, SimpleGraph};
use crate::pattern::{Pattern, Placement};

const UNMAPPED: u32 = u32::MAX;

/// Matching order plus, for each position, the earlier pattern neighbours.
#[derive(Clone, Debug)]
struct Plan {
    order: Vec<usize>,
    back: Vec<Vec<usize>>,
}

impl Plan {
    fn new(pattern: &Pattern, prefix: &[usize]) -> Plan {
        let k = pattern.k();
        let mut order: Vec<usize> = prefix.to_vec();
        let mut placed = vec![false; k];
        for &x in prefix {
            placed[x] = true;
        }
        while order.len() < k {
            let next = (0..k)
                .filter(|&x| !placed[x])
                .max_by_key(|&x| {
                    let linked = pattern.neighbors(x).iter().filter(|&&z| placed[z]).count();
                    (linked, pattern.degree(x), std::cmp::Reverse(x))
                })
                .expect("unplaced vertex exists");
            placed[next] = true;
            order.push(next);
        }
        let mut position = vec![0; k];
        for (pos, &x) in order.iter().enumerate() {
            position[x] = pos;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(pos, &x)| {
                pattern
                    .neighbors(x)
                    .iter()
                    .copied()
                    .filter(|&z| position[z] < pos)
                    .collect()
            })
            .collect();
        Plan { order, back }
    }
}

struct Matcher<'a, G: GraphView + ?Sized> {
    graph: &'a G,
    pattern: &'a Pattern,
    plan: &'a Plan,
    map: Vec<u32>,
    used: Vec<u32>,
}

impl<'a, G: GraphView + ?Sized> Matcher<'a, G> {
    fn new(graph: &'a G, pattern: &'a Pattern, plan: &'a Plan) -> Self {
        Matcher {
            graph,
            pattern,
            plan,
            map: vec![UNMAPPED; pattern.k()],
            used: Vec::with_capacity(pattern.k()),
        }
    }

    fn fits(&self, pos: usize, candidate: u32) -> bool {
        let x = self.plan.order[pos];
        if self.graph.degree(candidate) < self.pattern.degree(x) || self.used.contains(&candidate)
        {
            return false;
        }
        self.plan.back[pos]
            .iter()
            .all(|&z| self.graph.has_edge(candidate, self.map[z]))
    }

    fn assign(&mut self, pos: usize, image: u32) {
        self.map[self.plan.order[pos]] = image;
        self.used.push(image);
    }

    fn unassign(&mut self, pos: usize) {
        self.map[self.plan.order[pos]] = UNMAPPED;
        self.used.pop();
    }

    /// Fixes the first `images.len()` positions of the plan; returns `false`
    /// if that partial map is already inconsistent.
    fn seed(&mut self, images: &[u32]) -> bool {
        for (pos, &image) in images.iter().enumerate() {
            if !self.fits(pos, image) {
                return false;
            }
            self.assign(pos, image);
        }
        true
    }

    fn extend<F>(&mut self, pos: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        if pos == self.plan.order.len() {
            return visit(&self.map);
        }
        let plan = self.plan;
        let pivot = plan.back[pos]
            .iter()
            .copied()
            .min_by_key(|&z| self.graph.degree(self.map[z]));
        if let Some(pivot) = pivot {
            let graph = self.graph;
            let pivot_image = self.map[pivot];
            for &c in graph.neighbors(pivot_image) {
                if self.fits(pos, c) {
                    self.assign(pos, c);
                    let flow = self.extend(pos + 1, visit);
                    self.unassign(pos);
                    flow?;
                }
            }
        } else {
            for c in 0..self.graph.vertex_count() as u32 {
                if self.fits(pos, c) {
                    self.assign(pos, c);
                    let flow = self.extend(pos + 1, visit);
                    self.unassign(pos);
                    flow?;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// Some injective placement realizing every pattern edge as a graph edge.
pub fn contains_copy<G: GraphView + ?Sized>(graph: &G, pattern: &Pattern) -> Option<Placement> {
    if pattern.k() > graph.vertex_count() {
        return None;
    }
    let plan = Plan::new(pattern, &[]);
    let mut matcher = Matcher::new(graph, pattern, &plan);
    let mut found = None;
    let _ = matcher.extend(0, &mut |map: &[u32]| {
        found = Some(Placement(map.to_vec()));
        ControlFlow::Break(())
    });
    found
}

/// Number of labeled copies (injective placements), stopping at `cap`.
pub fn count_copies<G: GraphView + ?Sized>(graph: &G, pattern: &Pattern, cap: usize) -> usize {
    assert!(cap >= 1, "cap must be positive");
    if pattern.k() > graph.vertex_count() {
        return 0;
    }
    let plan = Plan::new(pattern, &[]);
    let mut matcher = Matcher::new(graph, pattern, &plan);
    let mut count = 0;
    let _ = matcher.extend(0, &mut |_: &[u32]| {
        count += 1;
        if count >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    count
}

/// Oriented pattern edges `(x, y)` whose anchored searches cover every copy:
/// one representative per orbit under the pattern's automorphisms.
fn anchor_representatives(pattern: &Pattern) -> Vec<(usize, usize)> {
    let k = pattern.k();
    let self_graph = SimpleGraph::from_edges(
        k,
        &pattern
            .edges()
            .iter()
            .map(|&(u, v)| (u as u32, v as u32))
            .collect::<Vec<_>>(),
    );
    let oriented: Vec<(usize, usize)> = pattern
        .edges()
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    let mut covered = vec![false; oriented.len()];
    let mut reps = Vec::new();
    for i in 0..oriented.len() {
        if covered[i] {
            continue;
        }
        let (x, y) = oriented[i];
        reps.push((x, y));
        let plan = Plan::new(pattern, &[x, y]);
        for j in i..oriented.len() {
            if covered[j] {
                continue;
            }
            let (a, b) = oriented[j];
            // a bijective placement of the pattern into itself is an automorphism
            let mut matcher = Matcher::new(&self_graph, pattern, &plan);
            if matcher.seed(&[a as u32, b as u32]) {
                let mut hit = false;
                let _ = matcher.extend(2, &mut |_: &[u32]| {
                    hit = true;
                    ControlFlow::Break(())
                });
                if hit {
                    covered[j] = true;
                }
            }
        }
    }
    reps
}

/// A copy whose image uses the graph edge `{a, b}`, if any.
pub fn copy_through_edge<G: GraphView + ?Sized>(
    graph: &G,
    pattern: &Pattern,
    edge: Pair,
) -> Option<Placement> {
    let plans: Vec<Plan> = anchor_representatives(pattern)
        .into_iter()
        .map(|(x, y)| Plan::new(pattern, &[x, y]))
        .collect();
    anchored_search(graph, pattern, &plans, edge)
}

fn anchored_search<G: GraphView + ?Sized>(
    graph: &G,
    pattern: &Pattern,
    plans: &[Plan],
    edge: Pair,
) -> Option<Placement> {
    if pattern.k() > graph.vertex_count() || !graph.has_edge(edge.u, edge.v) {
        return None;
    }
    for plan in plans {
        for (a, b) in [(edge.u, edge.v), (edge.v, edge.u)] {
            let mut matcher = Matcher::new(graph, pattern, plan);
            if !matcher.seed(&[a, b]) {
                continue;
            }
            let mut found = None;
            let _ = matcher.extend(2, &mut |map: &[u32]| {
                found = Some(Placement(map.to_vec()));
                ControlFlow::Break(())
            });
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

/// Tracks the first step at which a pattern copy exists. Every copy that is
/// new at step `i` must use the edge inserted at step `i`, so each step only
/// searches copies through that edge.
#[derive(Clone, Debug)]
pub struct AppearanceMonitor {
    pattern: Pattern,
    plans: Vec<Plan>,
    first: Option<(usize, Placement)>,
}

impl AppearanceMonitor {
    pub fn new(pattern: Pattern) -> Self {
        let plans = anchor_representatives(&pattern)
            .into_iter()
            .map(|(x, y)| Plan::new(&pattern, &[x, y]))
            .collect();
        AppearanceMonitor {
            pattern,
            plans,
            first: None,
        }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Records an insertion. Returns `true` when this step produced the
    /// first copy.
    pub fn observe<G: GraphView + ?Sized>(&mut self, graph: &G, step: usize, edge: Pair) -> bool {
        if self.first.is_some() {
            return false;
        }
        match anchored_search(graph, &self.pattern, &self.plans, edge) {
            Some(placement) => {
                self.first = Some((step, placement));
                true
            }
            None => false,
        }
    }

    pub fn first_appearance(&self) -> Option<usize> {
        self.first.as_ref().map(|(step, _)| *step)
    }

    pub fn witness(&self) -> Option<&Placement> {
        self.first.as_ref().map(|(_, p)| p)
    }

    pub fn has_appeared(&self) -> bool {
        self.first.is_some()
    }
}
