use serde::Serialize;

use super::exchange::{build_matching_ladder, MatchingLadder};
use super::{half_of, MatchingError, MatchingState};
use crate::graph::{ColouredGraph, Edge};
use crate::ratio::{ceil_sqrt, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditLevel {
    pub index: usize,
    /// `|C_i|`
    pub colours: usize,
    /// Edges of the greedy degree-sum sub-matching `H′_i` (0 at level 0).
    pub heavy_edges: usize,
    /// Smallest `|N_{C_i}(v)|` over unmatched `v`.
    pub min_leftover_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingAudit {
    pub t: usize,
    /// Smallest integer above `cn / 4t`.
    pub ell: usize,
    /// Whether `|C(M)| < ⌈cn⌉ − 8t`, which switches on the counting checks.
    pub below_bound: bool,
    /// The matching is rainbow, so every check holds vacuously.
    pub vacuous: bool,
    pub levels: Vec<AuditLevel>,
}

fn fail(level: usize, condition: impl Into<String>) -> MatchingError {
    MatchingError::AuditFailed {
        level,
        condition: condition.into(),
    }
}

/// Checks the stall structure of a near-perfect matching `m` level by level.
///
/// Always checked: ladder witnesses, no unused-colour edge inside the
/// leftover set, level-1 colours used once, and that no matching edge has
/// entries of two different unused colours at both ends. When `m` misses
/// `⌈cn⌉ − 8t` the counting checks run on every level up to `ℓ`, and getting
/// through all of them is itself reported as a failure.
pub fn audit_matching_ladder(g: &ColouredGraph, m: &[Edge], c: Ratio) -> Result<MatchingAudit, MatchingError> {
    let st = MatchingState::new(g, m)?;
    let ladder = build_matching_ladder(g, &st);
    audit_with(g, &st, &ladder, c)
}

pub(crate) fn audit_with(
    g: &ColouredGraph,
    st: &MatchingState,
    ladder: &MatchingLadder,
    c: Ratio,
) -> Result<MatchingAudit, MatchingError> {
    let n = half_of(g)?;
    let t = n - st.size();
    let k = g.num_colours();
    let counts = st.counts();
    let ell = if t == 0 {
        0
    } else {
        (c.num() as usize * n / (c.den() as usize * 4 * t)) + 1
    };
    let below_bound = (st.distinct_colours() as i64) < c.ceil_mul(n) - 8 * t as i64;
    if st.is_rainbow() {
        return Ok(MatchingAudit {
            t,
            ell,
            below_bound,
            vacuous: true,
            levels: Vec::new(),
        });
    }

    for col in 0..k {
        let Some(l) = ladder.level(col) else { continue };
        if l == 0 {
            continue;
        }
        let ok = ladder.witness(col).is_some_and(|(x, z, entry)| {
            ladder.level(entry) == Some(l - 1)
                && !st.is_matched(z)
                && g.edge_colour_index(x, z) == Some(entry)
                && st.mate(x).and_then(|y| g.edge_colour_index(x, y)) == Some(col)
        });
        if !ok {
            return Err(fail(l, format!("colour {} has no valid witness", g.colour_at(col))));
        }
    }

    let unmatched = st.unmatched();
    let matching = st.edges();
    let in_level = |col: usize, i: usize| ladder.level(col).is_some_and(|l| l <= i);
    let top = if below_bound { ell } else { ladder.levels().min(ell).max(1) };
    let s = 8 * ceil_sqrt(t);
    let mut levels = Vec::new();
    let mut entries = vec![0usize; g.n()];
    let mut entry_colour = vec![usize::MAX; g.n()];
    let mut two_colours = vec![false; g.n()];
    for i in 0..=top {
        let colours = (0..k).filter(|&col| in_level(col, i)).count();
        // R-degrees into the matching through C_{i-1}, and whether a vertex
        // sees two different C_{i-1} colours.
        let mut heavy = Vec::new();
        if i > 0 {
            entries.fill(0);
            entry_colour.fill(usize::MAX);
            two_colours.fill(false);
            for &z in &unmatched {
                for (x, col) in g.incident(z) {
                    if st.is_matched(x) && in_level(col, i - 1) {
                        entries[x] += 1;
                        if entry_colour[x] == usize::MAX {
                            entry_colour[x] = col;
                        } else if entry_colour[x] != col {
                            two_colours[x] = true;
                        }
                    }
                }
            }
            for e in &matching {
                let (x, y) = (e.u, e.v);
                let both = entries[x] > 0 && entries[y] > 0;
                let distinct = two_colours[x] || two_colours[y] || entry_colour[x] != entry_colour[y];
                if both && distinct && (i == 1 || below_bound) {
                    return Err(fail(i, format!("both ends of {x}-{y} reach the leftover set")));
                }
                if entries[x] + entries[y] >= s {
                    heavy.push(*e);
                }
            }
        }
        let mut min_deg = usize::MAX;
        for &v in &unmatched {
            let mut d = 0;
            for (w, col) in g.incident(v) {
                if !in_level(col, i) {
                    continue;
                }
                d += 1;
                if !st.is_matched(w) && (i == 0 || below_bound) {
                    return Err(fail(i, format!("edge {v}-{w} of a ladder colour joins two unmatched vertices")));
                }
            }
            min_deg = min_deg.min(d);
        }
        if i >= 1 && (i == 1 || below_bound) {
            if let Some(col) = (0..k).find(|&col| ladder.level(col) == Some(i) && counts[col] >= 2) {
                return Err(fail(i, format!("ladder colour {} is repeated", g.colour_at(col))));
            }
        }
        if below_bound {
            let mut seen = vec![false; k];
            for e in &heavy {
                let col = g.edge_colour_index(e.u, e.v).unwrap();
                if std::mem::replace(&mut seen[col], true) {
                    return Err(fail(i, format!("heavy sub-matching repeats colour {}", g.colour_at(col))));
                }
            }
            if heavy.len() < 4 * t * i {
                return Err(fail(i, format!("heavy sub-matching has {} edges, below {}", heavy.len(), 4 * t * i)));
            }
            if !unmatched.is_empty() && min_deg < (i + 2) * 4 * t {
                return Err(fail(i, format!("an unmatched vertex has {min_deg} ladder neighbours, below {}", (i + 2) * 4 * t)));
            }
        }
        levels.push(AuditLevel {
            index: i,
            colours,
            heavy_edges: heavy.len(),
            min_leftover_degree: if unmatched.is_empty() { 0 } else { min_deg },
        });
    }
    if below_bound {
        return Err(fail(
            ell,
            format!("every level up to {ell} holds, forcing a rainbow sub-matching with more than cn edges"),
        ));
    }
    Ok(MatchingAudit {
        t,
        ell,
        below_bound,
        vacuous: false,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{edge_colour_proper, gen_dirac_bipartite, ColouringStrategy, DiracOptions};
    use crate::matching::tests::bip;
    use crate::matching::{maximise_matching_colours, MatchingSolverConfig};

    #[test]
    fn rainbow_is_vacuous() {
        let g = bip(2, &[(0, 0, 1), (1, 1, 2), (0, 1, 3)]);
        let a = audit_matching_ladder(&g, &[Edge::new(0, 2), Edge::new(1, 3)], Ratio::one()).unwrap();
        assert!(a.vacuous);
    }

    #[test]
    fn unused_colour_inside_leftover_is_caught() {
        let g = bip(3, &[(0, 0, 1), (1, 1, 1), (2, 2, 3), (0, 1, 2)]);
        let err = audit_matching_ladder(&g, &[Edge::new(0, 3), Edge::new(1, 4)], Ratio::half()).unwrap_err();
        assert!(matches!(err, MatchingError::AuditFailed { level: 0, .. }), "{err}");
    }

    fn stalled_small(seed: u64) -> (ColouredGraph, Vec<Edge>) {
        let c: Ratio = "2/3".parse().unwrap();
        let u = gen_dirac_bipartite(12, c, seed, DiracOptions::default()).unwrap();
        let g = edge_colour_proper(&u, ColouringStrategy::FanRecolour);
        let run = maximise_matching_colours(&g, c, 4, &MatchingSolverConfig::default()).unwrap();
        assert!(run.stalled);
        (g, run.matching)
    }

    #[test]
    fn small_stall_has_one_sided_entries() {
        let c: Ratio = "2/3".parse().unwrap();
        for seed in 0..10 {
            let (g, m) = stalled_small(seed);
            audit_matching_ladder(&g, &m, c).unwrap();
            // Direct check over every matching edge: never two different
            // unused colours reaching the leftover set from both ends.
            let st = MatchingState::new(&g, &m).unwrap();
            if st.is_rainbow() {
                continue;
            }
            let unused = |x: usize| -> Vec<usize> {
                g.incident(x)
                    .filter(|&(w, col)| !st.is_matched(w) && st.counts()[col] == 0)
                    .map(|(_, col)| col)
                    .collect()
            };
            for e in &m {
                let (a, b) = (unused(e.u), unused(e.v));
                assert!(!a.iter().any(|p| b.iter().any(|q| p != q)), "seed {seed}, edge {e:?}");
            }
        }
    }

    #[test]
    fn dropped_witness_is_caught() {
        let g = bip(5, &[(0, 0, 1), (1, 1, 1), (2, 2, 5), (2, 3, 6), (0, 4, 5)]);
        let st = MatchingState::new(&g, &[Edge::new(0, 5), Edge::new(1, 6), Edge::new(2, 7)]).unwrap();
        let mut ladder = build_matching_ladder(&g, &st);
        let c1 = g.colour_index(1).unwrap();
        assert!(audit_with(&g, &st, &ladder, Ratio::half()).is_ok());
        ladder.forget_witness(c1);
        let err = audit_with(&g, &st, &ladder, Ratio::half()).unwrap_err();
        assert!(matches!(err, MatchingError::AuditFailed { level: 2, .. }), "{err}");
    }
}
