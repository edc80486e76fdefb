use super::exchange::{apply_in_place, find_matching_exchange};
use super::{audit_matching_ladder, half_of, initial_matching, MatchingError, MatchingMove, MatchingState};
use crate::certificate::{AuditOutcome, MatchingCertificate};
use crate::graph::{ColouredGraph, Edge};
use crate::ratio::{ceil_two_thirds_power, floor_sqrt, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchingSolverConfig {
    pub max_iters: Option<usize>,
    /// Overrides [`chain_cap`].
    pub chain_cap: Option<usize>,
}

/// Longest trace-back chain tried: `⌊√t / 2⌋`, but never below 2.
pub fn chain_cap(t: usize) -> usize {
    (floor_sqrt(t) / 2).max(2)
}

/// `⌈cn⌉ − 8t`, claimed when `t ≥ ⌈n^{2/3}⌉`, `1/2 < c ≤ 1` and `δ ≥ ⌈cn⌉`.
pub fn matching_bound(g: &ColouredGraph, c: Ratio, t: usize) -> Option<i64> {
    let n = g.bipartite_half()?;
    let claimed = t >= ceil_two_thirds_power(n) && c > Ratio::half() && c <= Ratio::one() && g.min_degree() as i64 >= c.ceil_mul(n);
    claimed.then(|| c.ceil_mul(n) - 8 * t as i64)
}

/// `⌈cn⌉ − 10⌈n^{2/3}⌉`
pub fn perfect_bound(n: usize, c: Ratio) -> i64 {
    c.ceil_mul(n) - 10 * ceil_two_thirds_power(n) as i64
}

#[derive(Debug, Clone)]
pub struct MatchingRun {
    pub matching: Vec<Edge>,
    pub certificate: MatchingCertificate,
    /// Distinct colours before the first exchange and after each one.
    pub history: Vec<usize>,
    pub moves: Vec<MatchingMove>,
    pub stalled: bool,
}

/// Hill-climbs over matchings with exactly `n − t` edges until no exchange
/// improves the number of colours.
pub fn maximise_matching_colours(
    g: &ColouredGraph,
    c: Ratio,
    t: usize,
    cfg: &MatchingSolverConfig,
) -> Result<MatchingRun, MatchingError> {
    let n = half_of(g)?;
    if t > n {
        return Err(MatchingError::Precondition(format!("t = {t} exceeds the part size {n}")));
    }
    let start = initial_matching(g, n - t)?;
    let mut st = MatchingState::new(g, &start)?;
    let cap = cfg.chain_cap.unwrap_or_else(|| chain_cap(t));
    let mut history = vec![st.distinct_colours()];
    let mut moves = Vec::new();
    let mut stalled = false;
    loop {
        if cfg.max_iters.is_some_and(|m| moves.len() >= m) {
            break;
        }
        let Some(plan) = find_matching_exchange(g, &st, cap) else {
            stalled = true;
            break;
        };
        apply_in_place(g, &mut st, &plan)?;
        history.push(st.distinct_colours());
        moves.push(plan.kind);
    }
    if stalled {
        if let Err(v) = st.check_unused_colours_land_in_matching(g) {
            return Err(MatchingError::InvariantBroken(format!(
                "unmatched vertex {v} has an unused-colour edge inside the leftover set at a stall"
            )));
        }
    }
    let achieved = st.distinct_colours();
    let bound = matching_bound(g, c, t);
    let audit = AuditOutcome::judge(bound, achieved);
    let matching = st.edges();
    if stalled && audit == AuditOutcome::Fail {
        audit_matching_ladder(g, &matching, c)?;
        return Err(MatchingError::InvariantBroken(format!(
            "stalled at {achieved} colours below the bound {}",
            bound.unwrap()
        )));
    }
    let certificate = MatchingCertificate {
        n,
        c,
        t,
        achieved_before_completion: achieved,
        achieved,
        bound,
        exchanges: moves.len(),
        swaps_in_completion: 0,
        audit,
        overlap: None,
    };
    Ok(MatchingRun {
        matching,
        certificate,
        history,
        moves,
        stalled,
    })
}
