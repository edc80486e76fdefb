use super::{edge_colour_proper, ColouringStrategy, GenError, UncolouredGraph};
use crate::graph::{ColouredGraph, Edge, Vertex};
use crate::ratio::Ratio;
use crate::validate::path_edges;

/// Independent set `A = 0..a` joined completely to the clique `B = a..n`,
/// with a Hamilton path of `B` as the forest.
#[derive(Debug, Clone)]
pub struct ForestBlocker {
    pub graph: ColouredGraph,
    pub a_size: usize,
    pub path: Vec<Vertex>,
}

impl ForestBlocker {
    pub fn forest_edges(&self) -> Vec<Edge> {
        path_edges(std::slice::from_ref(&self.path))
    }
}

/// Bipartite graph with `X = 0..n`, `Y = n..2n`, `X_1 = 0..k`, `Y_1 = n..n+k`
/// and edges `X_1 × Y` plus `X_2 × Y_1`; the matching pairs `i` with `n + i`.
#[derive(Debug, Clone)]
pub struct MatchingBlocker {
    pub graph: ColouredGraph,
    pub k: usize,
    pub matching: Vec<Edge>,
}

fn check_strict_fraction(c: Ratio) -> Result<(), GenError> {
    if c <= Ratio::half() || c >= Ratio::one() {
        return Err(GenError::InfeasibleParams(format!("c = {c} must lie in (1/2, 1)")));
    }
    Ok(())
}

fn integral_part(n: usize, c: Ratio) -> Result<usize, GenError> {
    if (c.num() as i128 * n as i128) % c.den() as i128 != 0 {
        return Err(GenError::NonIntegralParams { n, c });
    }
    Ok(c.floor_mul(n) as usize)
}

pub fn construct_forest_blocker(n: usize, c: Ratio) -> Result<ForestBlocker, GenError> {
    check_strict_fraction(c)?;
    let b = integral_part(n, c)?;
    let a = n - b;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1).max(a)..n {
            edges.push((u, v));
        }
    }
    let g = UncolouredGraph::from_edges(n, None, &edges);
    Ok(ForestBlocker {
        graph: edge_colour_proper(&g, ColouringStrategy::FanRecolour),
        a_size: a,
        path: (a..n).collect(),
    })
}

pub fn construct_matching_blocker(n: usize, c: Ratio) -> Result<MatchingBlocker, GenError> {
    check_strict_fraction(c)?;
    let k = integral_part(n, c)?;
    let mut edges = Vec::new();
    for x in 0..n {
        let cols = if x < k { n } else { k };
        for y in 0..cols {
            edges.push((x, n + y));
        }
    }
    let g = UncolouredGraph::from_edges(2 * n, Some(n), &edges);
    Ok(MatchingBlocker {
        graph: edge_colour_proper(&g, ColouringStrategy::FanRecolour),
        k,
        matching: (0..k).map(|i| Edge::new(i, n + i)).collect(),
    })
}
