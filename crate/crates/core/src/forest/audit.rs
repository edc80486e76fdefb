use super::{ForestError, LinearForest, ReachabilityLadder};
use crate::graph::ColouredGraph;

/// Smallest slack seen for each family of inequalities (always ≥ 0 on success).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthReport {
    pub levels: usize,
    pub neighbourhood_slack: i64,
    pub level_growth_slack: i64,
    pub recurrence_slack: i64,
}

fn fail(index: usize, condition: impl Into<String>) -> ForestError {
    ForestError::AuditFailed {
        index,
        condition: condition.into(),
    }
}

/// Checks the ladder against the forest at a stall:
///
/// * ladder consistency: witnesses exist and descend, `C_i ∖ C_0 ⊆ C(F)`;
/// * for every vertex `v` and level `i`,
///   `|N_{C_i}(v)| ≥ deg(v) − |C(F)| + |C_i ∖ C_0|`;
/// * for every level `i` with endpoint `v`, every non-first `x` in
///   `N_{C_{i−1}}(v)` has a prefix colour used once in the forest;
/// * `|C_i ∖ C_0| ≥ |N_{C_{i−1}}(v)| − t`;
/// * `|C_i ∖ C_0| ≥ deg(v) − |C(F)| + |C_{i−1} ∖ C_0| − t`.
pub fn audit_growth(g: &ColouredGraph, f: &LinearForest, ladder: &ReachabilityLadder) -> Result<GrowthReport, ForestError> {
    let counts = f.colour_counts(g);
    let used = counts.iter().filter(|&&c| c > 0).count() as i64;
    let levels = ladder.levels();
    let t = f.t() as i64;

    for col in 0..g.num_colours() {
        match ladder.level_of(col) {
            Some(0) if counts[col] > 0 => return Err(fail(0, "colour of the forest placed in C_0")),
            None if counts[col] == 0 => return Err(fail(0, "unused colour missing from C_0")),
            Some(l) if l > 0 => {
                if counts[col] == 0 {
                    return Err(fail(l, "ladder colour absent from the forest"));
                }
                let w = ladder.witness(col).ok_or_else(|| fail(l, "missing witness"))?;
                if w.level != l {
                    return Err(fail(l, "witness level mismatch"));
                }
                if !ladder.level_of(w.entry_colour).is_some_and(|e| e < l) {
                    return Err(fail(l, "witness entry colour does not come from an earlier level"));
                }
                let px = f.prefix(w.vertex).ok_or_else(|| fail(l, "witness without prefix"))?;
                if g.edge_colour_index(px, w.vertex) != Some(col) {
                    return Err(fail(l, "witness prefix colour mismatch"));
                }
                if g.edge_colour_index(ladder.endpoint(l), w.vertex) != Some(w.entry_colour) {
                    return Err(fail(l, "witness entry edge mismatch"));
                }
            }
            _ => {}
        }
    }

    let c0 = ladder.size(0) as i64;
    let grown = |i: usize| ladder.size(i) as i64 - c0;

    let mut neighbourhood_slack = i64::MAX;
    let mut hist = vec![0i64; levels + 1];
    for v in 0..g.n() {
        hist.iter_mut().for_each(|h| *h = 0);
        for (_, col) in g.incident(v) {
            if let Some(l) = ladder.level_of(col) {
                hist[l] += 1;
            }
        }
        let deg = g.degree(v) as i64;
        let mut reach = 0;
        for (i, h) in hist.iter().enumerate() {
            reach += h;
            let slack = reach - (deg - used + grown(i));
            if slack < 0 {
                return Err(fail(i, format!("neighbourhood of vertex {v} too small")));
            }
            neighbourhood_slack = neighbourhood_slack.min(slack);
        }
    }

    let mut level_growth_slack = i64::MAX;
    let mut recurrence_slack = i64::MAX;
    for i in 1..=levels {
        let v = ladder.endpoint(i);
        let mut reach = 0i64;
        for (x, col) in g.incident(v) {
            if !ladder.in_level(col, i - 1) {
                continue;
            }
            reach += 1;
            if f.is_first_endpoint(x) {
                continue;
            }
            let px = f.prefix(x).expect("non-first vertices have a prefix");
            let fx = g.edge_colour_index(px, x).expect("forest edge");
            if counts[fx] != 1 {
                return Err(fail(i, format!("prefix colour of vertex {x} repeats")));
            }
        }
        let s = grown(i) - (reach - t);
        if s < 0 {
            return Err(fail(i, "level grew less than the reachable neighbourhood"));
        }
        level_growth_slack = level_growth_slack.min(s);
        let s = grown(i) - (g.degree(v) as i64 - used + grown(i - 1) - t);
        if s < 0 {
            return Err(fail(i, "level recurrence violated"));
        }
        recurrence_slack = recurrence_slack.min(s);
    }

    Ok(GrowthReport {
        levels,
        neighbourhood_slack,
        level_growth_slack,
        recurrence_slack,
    })
}
