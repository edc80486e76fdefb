//! Colourful spanning linear forests: colour-set ladders, trace-back
//! exchanges and the stall certificate.

mod audit;
mod initial;
mod ladder;
mod solver;

pub use audit::{audit_growth, GrowthReport};
pub use initial::initial_forest;
pub use ladder::{
    apply_exchange, build_ladder, build_ladder_with, find_improving_exchange, ExchangePlan, MoveKind,
    ReachabilityLadder, Witness,
};
pub use solver::{check_params, forest_bound, maximise_forest_colours, ForestRun, MovePolicy, SolverConfig};

use thiserror::Error;

use crate::graph::{ColouredGraph, Edge, GraphError, Vertex};
use crate::validate::{validate_linear_forest, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("invalid forest: {0}")]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("could not reach {wanted} components, best was {achieved}")]
    CannotReachComponentCount { wanted: usize, achieved: usize },
    #[error("t = {t} is out of range for n = {n}")]
    BadComponentCount { n: usize, t: usize },
    #[error("plan no longer matches the forest")]
    PlanStale,
    #[error("invariant broken: {0}")]
    InvariantBroken(String),
    #[error("witness chain failed to descend at level {0}")]
    WitnessCycle(usize),
    #[error("growth audit failed at level {index}: {condition}")]
    AuditFailed { index: usize, condition: String },
    #[error("stalled at {achieved} colours, below the claimed bound {bound}")]
    BoundViolated { achieved: usize, bound: i64 },
}

const NONE: u32 = u32::MAX;

/// Spanning linear forest with a designated first endpoint per path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForest {
    paths: Vec<Vec<Vertex>>,
    path_of: Vec<u32>,
    pos: Vec<u32>,
}

impl LinearForest {
    /// Validates `paths` as a spanning linear forest of `g`; the first vertex
    /// of every path is its designated endpoint.
    pub fn new(g: &ColouredGraph, paths: Vec<Vec<Vertex>>) -> Result<Self, ForestError> {
        validate_linear_forest(g, &paths, paths.len())?;
        Ok(Self::from_valid(g.n(), paths))
    }

    pub(crate) fn from_valid(n: usize, paths: Vec<Vec<Vertex>>) -> Self {
        let mut path_of = vec![NONE; n];
        let mut pos = vec![NONE; n];
        for (i, p) in paths.iter().enumerate() {
            for (j, &v) in p.iter().enumerate() {
                path_of[v] = i as u32;
                pos[v] = j as u32;
            }
        }
        LinearForest { paths, path_of, pos }
    }

    pub fn paths(&self) -> &[Vec<Vertex>] {
        &self.paths
    }

    pub fn into_paths(self) -> Vec<Vec<Vertex>> {
        self.paths
    }

    pub fn t(&self) -> usize {
        self.paths.len()
    }

    pub fn n(&self) -> usize {
        self.path_of.len()
    }

    pub fn first_endpoint(&self, i: usize) -> Vertex {
        self.paths[i][0]
    }

    pub fn is_first_endpoint(&self, v: Vertex) -> bool {
        self.pos[v] == 0
    }

    pub fn path_index(&self, v: Vertex) -> usize {
        self.path_of[v] as usize
    }

    /// `P(v)`: the predecessor of `v` on its path.
    pub fn prefix(&self, v: Vertex) -> Option<Vertex> {
        let j = self.pos[v] as usize;
        (j > 0).then(|| self.paths[self.path_of[v] as usize][j - 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| Edge::new(w[0], w[1])))
    }

    pub fn edge_count(&self) -> usize {
        self.n() - self.t()
    }

    /// Number of forest edges per dense colour index.
    pub fn colour_counts(&self, g: &ColouredGraph) -> Vec<u32> {
        let mut counts = vec![0u32; g.num_colours()];
        for p in &self.paths {
            for w in p.windows(2) {
                counts[g.edge_colour_index(w[0], w[1]).expect("forest edge")] += 1;
            }
        }
        counts
    }

    pub fn distinct_colours(&self, g: &ColouredGraph) -> usize {
        self.colour_counts(g).iter().filter(|&&c| c > 0).count()
    }

    /// Same forest with every path reversed.
    pub fn reversed_all(&self) -> Self {
        let paths = self.paths.iter().map(|p| p.iter().rev().copied().collect()).collect();
        Self::from_valid(self.n(), paths)
    }

    /// Same forest with path `i` reversed.
    pub fn reversed_one(&self, i: usize) -> Self {
        let mut paths = self.paths.clone();
        paths[i].reverse();
        Self::from_valid(self.n(), paths)
    }
}
