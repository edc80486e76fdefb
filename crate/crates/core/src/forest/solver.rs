use std::fmt;

use super::ladder::search;
use super::{apply_exchange, audit_growth, build_ladder_with, initial_forest, ForestError, LinearForest, ReachabilityLadder};
use crate::certificate::{AuditOutcome, ForestCertificate};
use crate::graph::ColouredGraph;
use crate::ratio::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MovePolicy {
    /// First valid move in the deterministic scan.
    #[default]
    FirstImprovement,
    /// Valid move with the fewest swaps.
    ShortestChain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub policy: MovePolicy,
    /// Repeat endpoint sweeps until the ladder stops growing.
    pub fixpoint_ladder: bool,
    /// Retry with reversed paths before declaring a stall.
    pub try_orientations: bool,
    pub max_iters: Option<usize>,
    /// Run the growth audit at the stall.
    pub audit: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            policy: MovePolicy::FirstImprovement,
            fixpoint_ladder: false,
            try_orientations: true,
            max_iters: None,
            audit: true,
        }
    }
}

/// The inequality of the parameter window that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamViolation {
    FractionRange(Ratio),
    TooFewPaths { t_delta: Ratio, two_c: Ratio },
    TooManyPaths { t_delta: Ratio, cap: Ratio },
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamViolation::FractionRange(c) => write!(f, "c = {c} is not in (1/2, 1]"),
            ParamViolation::TooFewPaths { t_delta, two_c } => write!(f, "tδ = {t_delta} is not above 2c = {two_c}"),
            ParamViolation::TooManyPaths { t_delta, cap } => write!(f, "tδ = {t_delta} is not below δ²n/2 = {cap}"),
        }
    }
}

/// `2c < tδ < δ²n/2` and `1/2 < c ≤ 1`, in exact arithmetic.
pub fn check_params(n: usize, c: Ratio, t: usize, delta: Ratio) -> Result<(), ParamViolation> {
    if c <= Ratio::half() || c > Ratio::one() {
        return Err(ParamViolation::FractionRange(c));
    }
    let t_delta = delta.mul_int(t as i64);
    let two_c = c.mul_int(2);
    if t_delta <= two_c {
        return Err(ParamViolation::TooFewPaths { t_delta, two_c });
    }
    let cap = delta.mul(&delta).mul_int(n as i64).mul(&Ratio::half());
    if t_delta >= cap {
        return Err(ParamViolation::TooManyPaths { t_delta, cap });
    }
    Ok(())
}

/// `⌈(c − δ)n⌉`
pub fn forest_bound(n: usize, c: Ratio, delta: Ratio) -> i64 {
    c.sub(&delta).ceil_mul(n)
}

#[derive(Debug, Clone)]
pub struct ForestRun {
    pub forest: LinearForest,
    pub certificate: ForestCertificate,
    /// Distinct colours before the first exchange and after each one.
    pub history: Vec<usize>,
    /// Ladder of the final forest.
    pub ladder: ReachabilityLadder,
    /// Whether the loop ended because no move was left (not the iteration cap).
    pub stalled: bool,
}

fn flipped_move(
    g: &ColouredGraph,
    f: &LinearForest,
    cfg: &SolverConfig,
) -> Result<Option<(LinearForest, super::ExchangePlan)>, ForestError> {
    let shortest = cfg.policy == MovePolicy::ShortestChain;
    let mut variants = vec![f.reversed_all()];
    variants.extend((0..f.t()).filter(|&i| f.paths()[i].len() > 1).map(|i| f.reversed_one(i)));
    for h in variants {
        let ladder = build_ladder_with(g, &h, cfg.fixpoint_ladder);
        if let Some(plan) = search(g, &h, &ladder, shortest)? {
            return Ok(Some((h, plan)));
        }
    }
    Ok(None)
}

/// Hill-climbs with trace-back exchanges from an initial forest with `t`
/// paths until no improving exchange exists in any orientation.
pub fn maximise_forest_colours(
    g: &ColouredGraph,
    c: Ratio,
    t: usize,
    delta: Ratio,
    cfg: &SolverConfig,
) -> Result<ForestRun, ForestError> {
    let mut f = initial_forest(g, t)?;
    let mut history = vec![f.distinct_colours(g)];
    let shortest = cfg.policy == MovePolicy::ShortestChain;
    let mut stalled = false;
    loop {
        if cfg.max_iters.is_some_and(|cap| history.len() > cap) {
            break;
        }
        let ladder = build_ladder_with(g, &f, cfg.fixpoint_ladder);
        let mv = match search(g, &f, &ladder, shortest)? {
            Some(plan) => Some((f.clone(), plan)),
            None if cfg.try_orientations => flipped_move(g, &f, cfg)?,
            None => None,
        };
        let Some((base, plan)) = mv else {
            stalled = true;
            break;
        };
        f = apply_exchange(g, &base, &plan)?;
        history.push(f.distinct_colours(g));
    }
    let ladder = build_ladder_with(g, &f, cfg.fixpoint_ladder);
    if stalled && cfg.audit {
        audit_growth(g, &f, &ladder)?;
    }
    let achieved = *history.last().unwrap();
    let bound = check_params(g.n(), c, t, delta).ok().map(|_| forest_bound(g.n(), c, delta));
    let audit = AuditOutcome::judge(bound, achieved);
    if audit == AuditOutcome::Fail && stalled {
        return Err(ForestError::BoundViolated {
            achieved,
            bound: bound.unwrap(),
        });
    }
    let certificate = ForestCertificate {
        n: g.n(),
        c,
        t,
        delta,
        achieved,
        bound,
        exchanges: history.len() - 1,
        audit,
    };
    Ok(ForestRun {
        forest: f,
        certificate,
        history,
        ladder,
        stalled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::ratio::ceil_sqrt;

    fn r(s: &str) -> Ratio {
        s.parse().unwrap()
    }

    #[test]
    fn parameter_window() {
        for n in [100usize, 400, 2500] {
            let s = ceil_sqrt(n);
            let delta = Ratio::new(4, s as i64).unwrap();
            assert_eq!(check_params(n, r("3/5"), s, delta), Ok(()));
        }
        assert!(matches!(
            check_params(100, r("1"), 1, r("1/10")),
            Err(ParamViolation::TooFewPaths { .. })
        ));
        assert!(matches!(
            check_params(100, r("1/2"), 10, r("2/5")),
            Err(ParamViolation::FractionRange(_))
        ));
    }

    #[test]
    fn bound_at_four_hundred() {
        let delta = Ratio::new(4, 20).unwrap();
        assert_eq!(forest_bound(400, r("3/5"), delta), 160);
        assert_eq!(forest_bound(400, r("3/4"), delta), 220);
        assert_eq!(forest_bound(400, r("1"), delta), 320);
    }

    #[test]
    fn k4_one_factorisation_tops_out_at_two_colours() {
        // First and last edges of a Hamilton path of K_4 are disjoint, hence equal in colour.
        let k4 = build_graph(4, &[(0, 1, 1), (2, 3, 1), (0, 2, 2), (1, 3, 2), (0, 3, 3), (1, 2, 3)]).unwrap();
        let run = maximise_forest_colours(&k4, r("1"), 1, r("1/2"), &SolverConfig::default()).unwrap();
        assert_eq!(run.certificate.achieved, 2);
        assert!(run.stalled);
        assert!(run.history.windows(2).all(|w| w[1] > w[0]));
    }
}
