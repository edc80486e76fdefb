use super::solver::{maximise_matching_colours, perfect_bound, MatchingRun, MatchingSolverConfig};
use super::{half_of, MatchingError, MatchingState, NONE};
use crate::certificate::{AuditOutcome, MatchingCertificate};
use crate::generate::{latin_to_graph, matching_to_permutation, CellMask, LatinSquare, PermutationCell};
use crate::graph::{ColouredGraph, Edge, Vertex};
use crate::ratio::{ceil_two_thirds_power, Ratio};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub matching: Vec<Edge>,
    /// Edges `ab` of the input replaced by `ay`, `bx`.
    pub swaps: usize,
    /// Edges added between two vertices the input left unmatched.
    pub direct: usize,
    /// `|E(M′) ∩ E(M)|`
    pub overlap: usize,
}

/// Extends `m` to a perfect matching.
///
/// Leftover vertices are first joined directly: unused colours greedily, then
/// by augmenting paths inside the leftover set. Each `x` still free then takes
/// a swap `ab → ay, bx` through an untouched edge `ab` of `m`, choosing the
/// swap with the largest colour gain and the lowest `a` among equals.
pub fn complete_to_perfect(g: &ColouredGraph, m: &[Edge]) -> Result<Completion, MatchingError> {
    let h = half_of(g)?;
    let mut st = MatchingState::new(g, m)?;
    let mut orig = vec![NONE; g.n()];
    for e in m {
        orig[e.u] = e.v as u32;
        orig[e.v] = e.u as u32;
    }
    let leftover: Vec<bool> = orig.iter().map(|&o| o == NONE).collect();

    let mut direct = 0;
    for x in (0..h).filter(|&x| leftover[x]) {
        if let Some((y, _)) = g.incident(x).find(|&(y, c)| !st.is_matched(y) && st.counts()[c] == 0) {
            st.add(g, x, y);
            direct += 1;
        }
    }
    for x in (0..h).filter(|&x| leftover[x]) {
        if st.is_matched(x) {
            continue;
        }
        let mut seen = vec![false; g.n()];
        if let Some(path) = augmenting_path(g, &st, x, &leftover, &mut seen) {
            for pair in path.chunks(2) {
                if let Some(old) = st.mate(pair[1]) {
                    st.remove(g, old, pair[1]);
                }
            }
            for pair in path.chunks(2) {
                st.add(g, pair[0], pair[1]);
            }
            direct += 1;
        }
    }

    let mut free_nbrs = vec![0u32; h];
    for y in (h..2 * h).filter(|&y| !st.is_matched(y)) {
        for (a, _) in g.incident(y) {
            free_nbrs[a] += 1;
        }
    }
    let untouched = |st: &MatchingState, a: Vertex| orig[a] != NONE && st.mate(a) == Some(orig[a] as usize);
    let mut swaps = 0;
    for x in 0..h {
        if st.is_matched(x) {
            continue;
        }
        // Colour gain of bx less the colour ab may lose; ay adds at most one more.
        let mut cands: Vec<(i64, Vertex, Vertex)> = Vec::new();
        for (b, cbx) in g.incident(x) {
            let Some(a) = st.mate(b) else { continue };
            if !untouched(&st, a) || free_nbrs[a] == 0 {
                continue;
            }
            let cab = g.edge_colour_index(a, b).unwrap();
            let score = (st.counts()[cbx] == 0) as i64 - (st.counts()[cab] == 1) as i64;
            cands.push((-score, a, b));
        }
        if cands.is_empty() {
            let y = (h..2 * h).find(|&y| !st.is_matched(y)).unwrap_or(NONE as usize);
            return Err(MatchingError::NoSwapEdge(x, y));
        }
        cands.sort_unstable();
        let top = cands[0].0;
        let fresh_partner = |a: Vertex, b: Vertex| {
            let (cab, cbx) = (g.edge_colour_index(a, b).unwrap(), g.edge_colour_index(b, x).unwrap());
            g.incident(a).find(|&(y, cay)| {
                !st.is_matched(y) && cay != cbx && (st.counts()[cay] == 0 || (cay == cab && st.counts()[cab] == 1))
            })
        };
        let (a, b, y) = cands
            .iter()
            .take_while(|c| c.0 == top)
            .find_map(|&(_, a, b)| fresh_partner(a, b).map(|(y, _)| (a, b, y)))
            .unwrap_or_else(|| {
                let (_, a, b) = cands[0];
                let y = g.incident(a).map(|(y, _)| y).find(|&y| !st.is_matched(y)).unwrap();
                (a, b, y)
            });
        st.remove(g, a, b);
        st.add(g, a, y);
        st.add(g, b, x);
        swaps += 1;
        for (v, _) in g.incident(y) {
            free_nbrs[v] -= 1;
        }
    }
    let matching = st.edges();
    let overlap = matching.iter().filter(|e| orig[e.u] == e.v as u32).count();
    Ok(Completion {
        matching,
        swaps,
        direct,
        overlap,
    })
}

/// Alternating path from free `x` to a free vertex using leftover vertices
/// only, as `[x, y, x′, y′, …]`.
fn augmenting_path(
    g: &ColouredGraph,
    st: &MatchingState,
    x: Vertex,
    leftover: &[bool],
    seen: &mut [bool],
) -> Option<Vec<Vertex>> {
    for (y, _) in g.incident(x) {
        if !leftover[y] || seen[y] {
            continue;
        }
        seen[y] = true;
        match st.mate(y) {
            None => return Some(vec![x, y]),
            Some(x2) => {
                if let Some(mut rest) = augmenting_path(g, st, x2, leftover, seen) {
                    let mut path = vec![x, y];
                    path.append(&mut rest);
                    return Some(path);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct PerfectRun {
    pub matching: Vec<Edge>,
    pub certificate: MatchingCertificate,
    pub near: MatchingRun,
    pub completion: Completion,
}

/// Near-perfect matching with `t = ⌈n^{2/3}⌉` leftover pairs, improved to a
/// stall, then completed. Needs `1/2 < c ≤ 1` and `δ ≥ ⌈cn⌉`.
pub fn colourful_perfect_matching(
    g: &ColouredGraph,
    c: Ratio,
    cfg: &MatchingSolverConfig,
) -> Result<PerfectRun, MatchingError> {
    let n = half_of(g)?;
    if c <= Ratio::half() || c > Ratio::one() {
        return Err(MatchingError::Precondition(format!("c = {c} is outside (1/2, 1]")));
    }
    if (g.min_degree() as i64) < c.ceil_mul(n) {
        return Err(MatchingError::Precondition(format!(
            "minimum degree {} is below ⌈cn⌉ = {}",
            g.min_degree(),
            c.ceil_mul(n)
        )));
    }
    let t = ceil_two_thirds_power(n).min(n);
    let near = maximise_matching_colours(g, c, t, cfg)?;
    let completion = complete_to_perfect(g, &near.matching)?;
    let achieved = MatchingState::new(g, &completion.matching)?.distinct_colours();
    let bound = Some(perfect_bound(n, c));
    let certificate = MatchingCertificate {
        n,
        c,
        t,
        achieved_before_completion: near.certificate.achieved,
        achieved,
        bound,
        exchanges: near.certificate.exchanges,
        swaps_in_completion: completion.swaps,
        audit: AuditOutcome::judge(bound, achieved),
        overlap: Some(completion.overlap),
    };
    Ok(PerfectRun {
        matching: completion.matching.clone(),
        certificate,
        near,
        completion,
    })
}

#[derive(Debug, Clone)]
pub struct LatinRun {
    pub cells: Vec<PermutationCell>,
    pub certificate: MatchingCertificate,
}

/// A permutation of the available cells of `sq` with many distinct symbols.
/// Every row and column must keep at least `⌈cn⌉` available cells.
pub fn latin_colourful_permutation(
    sq: &LatinSquare,
    mask: &CellMask,
    c: Ratio,
    cfg: &MatchingSolverConfig,
) -> Result<LatinRun, MatchingError> {
    let lg = latin_to_graph(sq, mask)?;
    let need = c.ceil_mul(sq.order()).max(0) as usize;
    if let Some(i) = lg.row_available.iter().position(|&a| a < need) {
        return Err(MatchingError::MaskTooSparse(format!("row {i}")));
    }
    if let Some(j) = lg.col_available.iter().position(|&a| a < need) {
        return Err(MatchingError::MaskTooSparse(format!("column {j}")));
    }
    let run = colourful_perfect_matching(&lg.graph, c, cfg)?;
    let cells = matching_to_permutation(&lg.graph, &run.matching)?;
    Ok(LatinRun {
        cells,
        certificate: run.certificate,
    })
}
