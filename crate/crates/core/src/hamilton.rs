//! Colourful Hamilton cycles: a colourful forest outside a small reservoir,
//! joined through reservoir connectors, with the unused reservoir vertices
//! inserted between consecutive cycle vertices.

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::certificate::{AuditOutcome, HamiltonCertificate};
use crate::forest::{check_params, maximise_forest_colours, ForestError, SolverConfig};
use crate::generate::{rng_from, RngSeed};
use crate::graph::{ColouredGraph, Vertex};
use crate::ratio::{ceil_sqrt, Ratio};
use crate::validate::{validate_hamilton, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HamiltonError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no reservoir found; worst pair ({x}, {y}) has {common} common reservoir neighbours, need {tau}")]
    ReservoirNotFound { x: Vertex, y: Vertex, common: usize, tau: usize },
    #[error("no unused connector for component {0}")]
    ConnectorExhausted(usize),
    #[error("vertex {0} has no pair of consecutive cycle neighbours")]
    NoInsertionSlot(Vertex),
    #[error("minimum degree {min_degree} of the {n}-vertex remainder is at most half its order")]
    DegreeCollapse { min_degree: usize, n: usize },
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("assembled cycle is invalid: {0}")]
    Invalid(#[from] Violation),
}

/// A vertex set in which every pair of vertices has at least `tau` common neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reservoir {
    /// Sorted ascending.
    pub vertices: Vec<Vertex>,
    pub tau: usize,
    pub forbidden: Vec<Vertex>,
}

/// Worst pair `(x, y, |N(x) ∩ N(y) ∩ R|)` over all `x ≤ y`.
fn worst_pair(g: &ColouredGraph, r: &[Vertex]) -> (Vertex, Vertex, usize) {
    let n = g.n();
    let mut slot = vec![usize::MAX; n];
    for (i, &v) in r.iter().enumerate() {
        slot[v] = i;
    }
    let rows: Vec<BitSet> = (0..n)
        .map(|v| {
            let mut b = BitSet::new(r.len());
            for (w, _) in g.incident(v) {
                if slot[w] != usize::MAX {
                    b.insert(slot[w]);
                }
            }
            b
        })
        .collect();
    let mut worst = (0, 0, usize::MAX);
    for x in 0..n {
        for y in x..n {
            let k = rows[x].intersection_count(&rows[y]);
            if k < worst.2 {
                worst = (x, y, k);
            }
        }
    }
    worst
}

/// Samples `size` vertices outside `forbidden` uniformly until every pair of
/// vertices of `g` has at least `tau` common neighbours in the sample.
pub fn select_reservoir(
    g: &ColouredGraph,
    forbidden: &[Vertex],
    size: usize,
    tau: usize,
    max_resamples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Reservoir, HamiltonError> {
    let mut banned = vec![false; g.n()];
    for &w in forbidden {
        banned[w] = true;
    }
    let pool: Vec<Vertex> = (0..g.n()).filter(|&v| !banned[v]).collect();
    if size > pool.len() {
        return Err(HamiltonError::Precondition(format!(
            "reservoir of size {size} requested from {} free vertices",
            pool.len()
        )));
    }
    let mut worst = (0, 0, 0);
    for _ in 0..=max_resamples {
        let mut r: Vec<Vertex> = index::sample(rng, pool.len(), size).into_iter().map(|i| pool[i]).collect();
        r.sort_unstable();
        worst = worst_pair(g, &r);
        if worst.2 >= tau {
            return Ok(Reservoir {
                vertices: r,
                tau,
                forbidden: forbidden.to_vec(),
            });
        }
    }
    Err(HamiltonError::ReservoirNotFound {
        x: worst.0,
        y: worst.1,
        common: worst.2,
        tau,
    })
}

/// A cycle assembled from forest paths and connector vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePath {
    pub cycle: Vec<Vertex>,
    pub connectors: Vec<Vertex>,
}

impl CyclePath {
    /// Vertices of `g` not on the cycle, ascending.
    pub fn uncovered(&self, n: usize) -> Vec<Vertex> {
        let mut on = vec![false; n];
        for &v in &self.cycle {
            on[v] = true;
        }
        (0..n).filter(|&v| !on[v]).collect()
    }
}

/// Joins the last vertex of path `i` to the first vertex of path `i + 1`
/// (cyclically) through the smallest unused common neighbour in the reservoir.
/// Forest edges are kept.
pub fn connect_through_reservoir(
    g: &ColouredGraph,
    paths: &[Vec<Vertex>],
    reservoir: &Reservoir,
) -> Result<CyclePath, HamiltonError> {
    let mut used = vec![false; g.n()];
    let mut cycle = Vec::with_capacity(g.n());
    let mut connectors = Vec::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let y = *p.last().unwrap();
        let x = paths[(i + 1) % paths.len()][0];
        let z = reservoir
            .vertices
            .iter()
            .copied()
            .find(|&z| !used[z] && g.has_edge(y, z) && g.has_edge(z, x))
            .ok_or(HamiltonError::ConnectorExhausted(i))?;
        used[z] = true;
        cycle.extend_from_slice(p);
        cycle.push(z);
        connectors.push(z);
    }
    Ok(CyclePath { cycle, connectors })
}

fn cycle_colour_counts(g: &ColouredGraph, cycle: &[Vertex]) -> Vec<u32> {
    let mut counts = vec![0u32; g.num_colours()];
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        if let Some(c) = g.edge_colour_index(a, b) {
            counts[c] += 1;
        }
    }
    counts
}

/// Inserts every vertex of `leftover` between two consecutive cycle vertices
/// it is adjacent to, choosing the slot with the best colour balance. Vertices
/// are handled in ascending order; ones without a slot are retried after the
/// others.
pub fn insert_leftover(g: &ColouredGraph, cycle: &[Vertex], leftover: &[Vertex]) -> Result<Vec<Vertex>, HamiltonError> {
    if cycle.len() < 2 && !leftover.is_empty() {
        return Err(HamiltonError::NoInsertionSlot(leftover[0]));
    }
    let mut cycle = cycle.to_vec();
    let mut counts = cycle_colour_counts(g, &cycle);
    let mut pending: Vec<Vertex> = leftover.to_vec();
    pending.sort_unstable();
    let mut mark = vec![usize::MAX; g.n()];
    while !pending.is_empty() {
        let mut deferred = Vec::new();
        for &v in &pending {
            for (w, c) in g.incident(v) {
                mark[w] = c;
            }
            let len = cycle.len();
            let mut best: Option<(i64, usize)> = None;
            for i in 0..len {
                let (a, b) = (cycle[i], cycle[(i + 1) % len]);
                let (ca, cb) = (mark[a], mark[b]);
                if ca == usize::MAX || cb == usize::MAX {
                    continue;
                }
                // ca, cb and the colour of ab are pairwise distinct by properness.
                let cab = g.edge_colour_index(a, b).expect("cycle edge");
                let gain = (counts[ca] == 0) as i64 + (counts[cb] == 0) as i64 - (counts[cab] == 1) as i64;
                if best.is_none_or(|(bg, _)| gain > bg) {
                    best = Some((gain, i));
                }
            }
            for (w, _) in g.incident(v) {
                mark[w] = usize::MAX;
            }
            let Some((_, i)) = best else {
                deferred.push(v);
                continue;
            };
            let (a, b) = (cycle[i], cycle[(i + 1) % len]);
            counts[g.edge_colour_index(a, b).unwrap()] -= 1;
            counts[g.edge_colour_index(a, v).unwrap()] += 1;
            counts[g.edge_colour_index(v, b).unwrap()] += 1;
            cycle.insert(i + 1, v);
        }
        if deferred.len() == pending.len() {
            return Err(HamiltonError::NoInsertionSlot(deferred[0]));
        }
        pending = deferred;
    }
    Ok(cycle)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonParams {
    pub seed: RngSeed,
    pub max_resamples: usize,
    pub forest: SolverConfig,
}

impl Default for HamiltonParams {
    fn default() -> Self {
        HamiltonParams {
            seed: 0,
            max_resamples: 32,
            forest: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonRun {
    pub cycle: Vec<Vertex>,
    pub reservoir: Reservoir,
    pub certificate: HamiltonCertificate,
}

const INSERTION_NOTE: &str = "leftover reservoir vertices are placed between consecutive cycle neighbours; \
each placement removes one cycle edge, so at most one colour is lost per inserted vertex";

/// Distinct colours on a cyclic vertex sequence.
pub fn cycle_colours(g: &ColouredGraph, cycle: &[Vertex]) -> usize {
    cycle_colour_counts(g, cycle).iter().filter(|&&c| c > 0).count()
}

/// `⌈cn⌉ − 12⌈√n⌉`
pub fn hamilton_bound(n: usize, c: Ratio) -> i64 {
    c.ceil_mul(n) - 12 * ceil_sqrt(n) as i64
}

struct Attempt {
    cycle: Vec<Vertex>,
    reservoir: Reservoir,
    connectors: usize,
    inserted: usize,
    forest_colours: usize,
    before_insertion: usize,
    exchanges: usize,
    t: usize,
    delta: Ratio,
    claimed: bool,
}

fn attempt(
    g: &ColouredGraph,
    reservoir: Reservoir,
    params: &HamiltonParams,
) -> Result<Attempt, HamiltonError> {
    let n = g.n();
    let mut in_r = vec![false; n];
    for &v in &reservoir.vertices {
        in_r[v] = true;
    }
    let keep: Vec<Vertex> = (0..n).filter(|&v| !in_r[v]).collect();
    let (sub, map) = g.induced(&keep);
    let n_sub = sub.n();
    let min_deg = sub.min_degree();
    if 2 * min_deg <= n_sub {
        return Err(HamiltonError::DegreeCollapse { min_degree: min_deg, n: n_sub });
    }
    let c_sub = Ratio::new(min_deg as i64, n_sub as i64).expect("positive order");
    let s = ceil_sqrt(n_sub);
    let t = s.min(reservoir.vertices.len()).max(1);
    let delta = Ratio::new(4, s as i64).expect("positive root");
    let run = maximise_forest_colours(&sub, c_sub, t, delta, &params.forest)?;
    let paths: Vec<Vec<Vertex>> = run
        .forest
        .paths()
        .iter()
        .map(|p| p.iter().map(|&v| map[v]).collect())
        .collect();
    let joined = connect_through_reservoir(g, &paths, &reservoir)?;
    let before_insertion = cycle_colours(g, &joined.cycle);
    let leftover = joined.uncovered(n);
    let cycle = insert_leftover(g, &joined.cycle, &leftover)?;
    validate_hamilton(g, &cycle)?;
    Ok(Attempt {
        cycle,
        reservoir,
        connectors: joined.connectors.len(),
        inserted: leftover.len(),
        forest_colours: run.certificate.achieved,
        before_insertion,
        exchanges: run.certificate.exchanges,
        t,
        delta,
        claimed: check_params(n_sub, c_sub, t, delta).is_ok(),
    })
}

/// Reservoir size for order `n`: `4⌈√n⌉`, at most a quarter of the vertices.
fn reservoir_size(n: usize) -> usize {
    (4 * ceil_sqrt(n)).min(n / 4).max(1)
}

/// Hamilton cycle of a graph with minimum degree `≥ ⌈cn⌉`, `c > 1/2`, using
/// many colours.
pub fn colourful_hamilton(g: &ColouredGraph, c: Ratio, params: &HamiltonParams) -> Result<HamiltonRun, HamiltonError> {
    let n = g.n();
    if c <= Ratio::half() || c > Ratio::one() {
        return Err(HamiltonError::Precondition(format!("c = {c} is not in (1/2, 1]")));
    }
    if n < 5 {
        return Err(HamiltonError::Precondition(format!("n = {n} is too small")));
    }
    let need = c.ceil_mul(n).min(n as i64 - 1) as usize;
    if g.min_degree() < need {
        return Err(HamiltonError::Precondition(format!(
            "minimum degree {} is below ⌈cn⌉ = {need}",
            g.min_degree()
        )));
    }
    let mut rng = rng_from(params.seed);
    let mut r = reservoir_size(n);
    let mut halvings = 0;
    let mut resampled = false;
    let done = loop {
        let tau = r.div_ceil(8);
        let reservoir = select_reservoir(g, &[], r, tau, params.max_resamples, &mut rng)?;
        match attempt(g, reservoir, params) {
            Ok(a) => break a,
            Err(HamiltonError::ConnectorExhausted(_)) if !resampled => resampled = true,
            Err(HamiltonError::DegreeCollapse { .. }) if halvings < 3 && r > 1 => {
                halvings += 1;
                r /= 2;
            }
            Err(e) => return Err(e),
        }
    };
    let achieved = cycle_colours(g, &done.cycle);
    let bound = done.claimed.then(|| hamilton_bound(n, c));
    let certificate = HamiltonCertificate {
        n,
        c,
        t: done.t,
        delta: done.delta,
        achieved,
        bound,
        exchanges: done.exchanges,
        audit: AuditOutcome::judge(bound, achieved),
        reservoir_size: done.reservoir.vertices.len(),
        connectors_used: done.connectors,
        inserted: done.inserted,
        colour_loss_insertion: done.before_insertion.saturating_sub(achieved),
        forest_colours: done.forest_colours,
        note: INSERTION_NOTE.to_string(),
    };
    Ok(HamiltonRun {
        cycle: done.cycle,
        reservoir: done.reservoir,
        certificate,
    })
}
