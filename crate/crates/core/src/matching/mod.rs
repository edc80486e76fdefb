//! Colourful matchings in balanced bipartite graphs: a near-perfect matching
//! improved by trace-back exchanges, completed to a perfect matching, and a
//! Latin-square front end.

mod audit;
mod complete;
mod exchange;
mod solver;

pub use audit::{audit_matching_ladder, AuditLevel, MatchingAudit};
pub use complete::{
    colourful_perfect_matching, complete_to_perfect, latin_colourful_permutation, Completion, LatinRun, PerfectRun,
};
pub use exchange::{
    apply_matching_exchange, build_matching_ladder, find_matching_exchange, MatchingExchange, MatchingLadder,
    MatchingMove,
};
pub use solver::{chain_cap, matching_bound, maximise_matching_colours, perfect_bound, MatchingRun, MatchingSolverConfig};

use std::collections::VecDeque;

use thiserror::Error;

use crate::generate::GenError;
use crate::graph::{ColouredGraph, Edge, GraphError, Vertex};
use crate::validate::{validate_matching, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("graph is not a balanced bipartite graph")]
    NotBipartite,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("maximum matching has {found} edges, {wanted} requested")]
    MatchingTooSmall { wanted: usize, found: usize },
    #[error("invalid matching: {0}")]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("plan no longer matches the matching")]
    PlanStale,
    #[error("invariant broken: {0}")]
    InvariantBroken(String),
    #[error("chain could not be completed")]
    ChainStuck,
    #[error("ladder audit failed at level {level}: {condition}")]
    AuditFailed { level: usize, condition: String },
    #[error("no swap edge for the unmatched pair ({0}, {1})")]
    NoSwapEdge(Vertex, Vertex),
    #[error("mask leaves too few cells in {0}")]
    MaskTooSparse(String),
}

pub(crate) const NONE: u32 = u32::MAX;

/// Part size of a balanced bipartite graph.
pub(crate) fn half_of(g: &ColouredGraph) -> Result<usize, MatchingError> {
    g.bipartite_half().ok_or(MatchingError::NotBipartite)
}

/// A matching with per-vertex partners and per-colour multiplicities.
#[derive(Debug, Clone)]
pub struct MatchingState {
    half: usize,
    mate: Vec<u32>,
    counts: Vec<u32>,
    distinct: usize,
    size: usize,
}

impl MatchingState {
    pub fn new(g: &ColouredGraph, edges: &[Edge]) -> Result<Self, MatchingError> {
        let half = half_of(g)?;
        validate_matching(g, edges)?;
        let mut st = MatchingState {
            half,
            mate: vec![NONE; g.n()],
            counts: vec![0; g.num_colours()],
            distinct: 0,
            size: 0,
        };
        for e in edges {
            st.add(g, e.u, e.v);
        }
        Ok(st)
    }

    pub(crate) fn add(&mut self, g: &ColouredGraph, a: Vertex, b: Vertex) {
        debug_assert!(self.mate[a] == NONE && self.mate[b] == NONE);
        self.mate[a] = b as u32;
        self.mate[b] = a as u32;
        let c = g.edge_colour_index(a, b).expect("matching edge");
        self.counts[c] += 1;
        if self.counts[c] == 1 {
            self.distinct += 1;
        }
        self.size += 1;
    }

    pub(crate) fn remove(&mut self, g: &ColouredGraph, a: Vertex, b: Vertex) {
        debug_assert!(self.mate[a] == b as u32);
        self.mate[a] = NONE;
        self.mate[b] = NONE;
        let c = g.edge_colour_index(a, b).expect("matching edge");
        self.counts[c] -= 1;
        if self.counts[c] == 0 {
            self.distinct -= 1;
        }
        self.size -= 1;
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn distinct_colours(&self) -> usize {
        self.distinct
    }

    pub fn mate(&self, v: Vertex) -> Option<Vertex> {
        let m = self.mate[v];
        (m != NONE).then_some(m as usize)
    }

    pub fn is_matched(&self, v: Vertex) -> bool {
        self.mate[v] != NONE
    }

    /// Multiplicity of each dense colour index in the matching.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn is_rainbow(&self) -> bool {
        self.distinct == self.size
    }

    /// Edges sorted by their `X` endpoint.
    pub fn edges(&self) -> Vec<Edge> {
        (0..self.half)
            .filter(|&x| self.mate[x] != NONE)
            .map(|x| Edge::new(x, self.mate[x] as usize))
            .collect()
    }

    /// Unmatched vertices, ascending.
    pub fn unmatched(&self) -> Vec<Vertex> {
        (0..self.mate.len()).filter(|&v| self.mate[v] == NONE).collect()
    }

    /// `|N_{C_0}(v)| ≥ deg(v) − |C(M)|` and, unless the matching is rainbow,
    /// no edge joining two unmatched vertices carries a colour unused by the
    /// matching. Returns the first unmatched vertex breaking either.
    pub fn check_unused_colours_land_in_matching(&self, g: &ColouredGraph) -> Result<(), Vertex> {
        for v in self.unmatched() {
            let mut unused = 0;
            for (w, c) in g.incident(v) {
                if self.counts[c] == 0 {
                    unused += 1;
                    if self.mate[w] == NONE && !self.is_rainbow() {
                        return Err(v);
                    }
                }
            }
            if unused + self.distinct < g.degree(v) {
                return Err(v);
            }
        }
        Ok(())
    }
}

/// Maximum matching by Hopcroft–Karp, truncated to `target` edges (the
/// edges with the largest `X` endpoints are dropped).
pub fn initial_matching(g: &ColouredGraph, target: usize) -> Result<Vec<Edge>, MatchingError> {
    let h = half_of(g)?;
    let mut mate = vec![NONE; g.n()];
    // Greedy start.
    for x in 0..h {
        if let Some((y, _)) = g.incident(x).find(|&(y, _)| mate[y] == NONE) {
            mate[x] = y as u32;
            mate[y] = x as u32;
        }
    }
    let mut dist = vec![u32::MAX; h];
    loop {
        // BFS layers from free X vertices.
        let mut queue = VecDeque::new();
        for x in 0..h {
            if mate[x] == NONE {
                dist[x] = 0;
                queue.push_back(x);
            } else {
                dist[x] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(x) = queue.pop_front() {
            for (y, _) in g.incident(x) {
                let m = mate[y];
                if m == NONE {
                    found = true;
                } else if dist[m as usize] == u32::MAX {
                    dist[m as usize] = dist[x] + 1;
                    queue.push_back(m as usize);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        let mut cursor = vec![0usize; h];
        for x in 0..h {
            if mate[x] == NONE && augment(g, x, &mut mate, &mut dist, &mut cursor) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    let mut edges: Vec<Edge> = (0..h).filter(|&x| mate[x] != NONE).map(|x| Edge::new(x, mate[x] as usize)).collect();
    if edges.len() < target {
        return Err(MatchingError::MatchingTooSmall {
            wanted: target,
            found: edges.len(),
        });
    }
    edges.truncate(target);
    Ok(edges)
}

/// Iterative layered DFS for one augmenting path from free `root`.
fn augment(g: &ColouredGraph, root: Vertex, mate: &mut [u32], dist: &mut [u32], cursor: &mut [usize]) -> bool {
    let mut stack: Vec<(Vertex, Vertex)> = vec![(root, usize::MAX)];
    while let Some(&(x, _)) = stack.last() {
        let deg = g.degree(x);
        let mut advanced = false;
        while cursor[x] < deg {
            let (y, _) = g.incident_at(x, cursor[x]);
            cursor[x] += 1;
            let m = mate[y];
            if m == NONE {
                // Flip the path.
                stack.last_mut().unwrap().1 = y;
                for &(a, b) in stack.iter().rev() {
                    mate[a] = b as u32;
                    mate[b] = a as u32;
                }
                return true;
            }
            let m = m as usize;
            if dist[m] == dist[x] + 1 {
                stack.last_mut().unwrap().1 = y;
                stack.push((m, usize::MAX));
                advanced = true;
                break;
            }
        }
        if !advanced {
            dist[x] = u32::MAX;
            stack.pop();
        }
    }
    false
}
