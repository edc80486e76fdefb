//! Instance generation: Dirac graphs, proper edge-colourings, few-colour
//! regular graphs, Latin squares and the two blocker constructions.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed.

mod blocker;
mod colouring;
mod dirac;
mod latin;
mod regular;

pub use blocker::{construct_forest_blocker, construct_matching_blocker, ForestBlocker, MatchingBlocker};
pub use colouring::{edge_colour_proper, ColouringStrategy};
pub use dirac::{gen_dirac_bipartite, gen_dirac_graph, DiracOptions};
pub use latin::{
    gen_latin_cyclic, gen_latin_random, latin_to_graph, matching_to_permutation, CellMask, LatinGraph,
    LatinSquare, PermutationCell,
};
pub use regular::{gen_few_colour_regular, RegularVariant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ratio::Ratio;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("the general few-colour variant needs an even vertex count, got {0}")]
    ParityError(usize),
    #[error("c·n and (1−c)·n must be integers (n = {n}, c = {c})")]
    NonIntegralParams { n: usize, c: Ratio },
    #[error("not a Latin square: {0}")]
    NotLatin(String),
    #[error("shape mismatch: square of order {square}, mask of order {mask}")]
    ShapeMismatch { square: usize, mask: usize },
    #[error("matching edge {0}-{1} does not come from a Latin-square graph")]
    NotFromLatinGraph(usize, usize),
}

pub type RngSeed = u64;

pub(crate) fn rng_from(seed: RngSeed) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simple graph without colours; rows are sorted neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncolouredGraph {
    pub n: usize,
    /// Part size when bipartite with parts `0..h`, `h..2h`.
    pub half: Option<usize>,
    pub adj: Vec<Vec<u32>>,
}

impl UncolouredGraph {
    pub fn from_edges(n: usize, half: Option<usize>, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for row in adj.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        UncolouredGraph { n, half, adj }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n as u32).filter(|&v| v as usize != u).collect())
            .collect();
        UncolouredGraph { n, half: None, adj }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }
}

/// Checks `1/2 < c ≤ 1`.
pub(crate) fn check_dirac_fraction(c: Ratio) -> Result<(), GenError> {
    if c <= Ratio::half() || c > Ratio::one() {
        return Err(GenError::InfeasibleParams(format!("c = {c} must lie in (1/2, 1]")));
    }
    Ok(())
}
