//! Bound certificates emitted by the solvers, serialised as flat JSON objects.

use serde::{Deserialize, Serialize};

use crate::ratio::Ratio;

/// How the achieved colour count relates to the instantiated bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditOutcome {
    /// The bound is claimed for these parameters and was met.
    Pass,
    /// Parameters fall outside the window in which the bound is claimed.
    NotClaimed,
    /// The bound is claimed and was missed.
    Fail,
}

impl AuditOutcome {
    pub fn judge(bound: Option<i64>, achieved: usize) -> Self {
        match bound {
            None => AuditOutcome::NotClaimed,
            Some(b) if achieved as i64 >= b => AuditOutcome::Pass,
            Some(_) => AuditOutcome::Fail,
        }
    }

    pub fn passed(self) -> bool {
        self != AuditOutcome::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestCertificate {
    pub n: usize,
    pub c: Ratio,
    pub t: usize,
    pub delta: Ratio,
    pub achieved: usize,
    /// `⌈(c − δ)n⌉`, or `None` when the parameter window fails.
    pub bound: Option<i64>,
    pub exchanges: usize,
    pub audit: AuditOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonCertificate {
    pub n: usize,
    pub c: Ratio,
    pub t: usize,
    pub delta: Ratio,
    pub achieved: usize,
    pub bound: Option<i64>,
    pub exchanges: usize,
    pub audit: AuditOutcome,
    pub reservoir_size: usize,
    pub connectors_used: usize,
    pub inserted: usize,
    pub colour_loss_insertion: usize,
    /// Colours on the forest computed outside the reservoir.
    pub forest_colours: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingCertificate {
    pub n: usize,
    pub c: Ratio,
    pub t: usize,
    pub achieved_before_completion: usize,
    pub achieved: usize,
    pub bound: Option<i64>,
    pub exchanges: usize,
    pub swaps_in_completion: usize,
    pub audit: AuditOutcome,
    /// Edges kept from the near-perfect matching after completion.
    pub overlap: Option<usize>,
}
