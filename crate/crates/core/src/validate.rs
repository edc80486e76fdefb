//! Validators for spanning structures. All are pure and report the first violation.

use thiserror::Error;

use crate::graph::{ColouredGraph, Edge, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("vertex {0} is out of range")]
    UnknownVertex(Vertex),
    #[error("vertex {0} is used more than once")]
    Overlap(Vertex),
    #[error("{0}-{1} is not an edge")]
    NonEdge(Vertex, Vertex),
    #[error("vertex {0} is not covered")]
    NotSpanning(Vertex),
    #[error("expected {expected} components, found {found}")]
    WrongComponentCount { expected: usize, found: usize },
    #[error("two matching edges share vertex {0}")]
    SharedVertex(Vertex),
    #[error("a Hamilton cycle needs at least 3 vertices")]
    TooShort,
}

fn check_paths_cover(g: &ColouredGraph, seqs: &[Vec<Vertex>]) -> Result<(), Violation> {
    let n = g.n();
    let mut seen = vec![false; n];
    for seq in seqs {
        for &v in seq {
            if v >= n {
                return Err(Violation::UnknownVertex(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Violation::Overlap(v));
            }
        }
    }
    for seq in seqs {
        for w in seq.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(Violation::NonEdge(w[0], w[1]));
            }
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(Violation::NotSpanning(v));
    }
    Ok(())
}

/// Checks that `paths` is a spanning linear forest of `g` with exactly `t`
/// paths; single vertices count as paths of length zero.
pub fn validate_linear_forest(
    g: &ColouredGraph,
    paths: &[Vec<Vertex>],
    t: usize,
) -> Result<(), Violation> {
    if paths.iter().any(|p| p.is_empty()) {
        return Err(Violation::WrongComponentCount {
            expected: t,
            found: paths.iter().filter(|p| !p.is_empty()).count(),
        });
    }
    check_paths_cover(g, paths)?;
    if paths.len() != t {
        return Err(Violation::WrongComponentCount {
            expected: t,
            found: paths.len(),
        });
    }
    Ok(())
}

/// Checks that `m` consists of host edges that are pairwise vertex-disjoint.
pub fn validate_matching(g: &ColouredGraph, m: &[Edge]) -> Result<(), Violation> {
    let mut used = vec![false; g.n()];
    for e in m {
        for x in [e.u, e.v] {
            if x >= g.n() {
                return Err(Violation::UnknownVertex(x));
            }
        }
        if !g.has_edge(e.u, e.v) {
            return Err(Violation::NonEdge(e.u, e.v));
        }
        for x in [e.u, e.v] {
            if std::mem::replace(&mut used[x], true) {
                return Err(Violation::SharedVertex(x));
            }
        }
    }
    Ok(())
}

/// Checks that `cycle` (closing edge implied) is a Hamilton cycle of `g`.
pub fn validate_hamilton(g: &ColouredGraph, cycle: &[Vertex]) -> Result<(), Violation> {
    if g.n() < 3 || cycle.len() < 3 {
        return Err(Violation::TooShort);
    }
    check_paths_cover(g, std::slice::from_ref(&cycle.to_vec()))?;
    let (a, b) = (cycle[cycle.len() - 1], cycle[0]);
    if !g.has_edge(a, b) {
        return Err(Violation::NonEdge(a, b));
    }
    Ok(())
}

/// Edges of a cyclic vertex sequence, closing edge included.
pub fn cycle_edges(cycle: &[Vertex]) -> Vec<Edge> {
    let k = cycle.len();
    (0..k).map(|i| Edge::new(cycle[i], cycle[(i + 1) % k])).collect()
}

/// Edges of a family of paths.
pub fn path_edges(paths: &[Vec<Vertex>]) -> Vec<Edge> {
    paths
        .iter()
        .flat_map(|p| p.windows(2).map(|w| Edge::new(w[0], w[1])))
        .collect()
}
