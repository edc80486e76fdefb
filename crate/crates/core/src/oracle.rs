//! Exhaustive branch-and-bound solvers for tiny instances.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{ColouredGraph, Edge, Vertex};
use crate::validate::{validate_hamilton, validate_linear_forest, validate_matching, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{problem} oracle is limited to size {limit}, got {size}")]
    BudgetExceeded { problem: &'static str, size: usize, limit: usize },
    #[error("search stopped after {0} nodes")]
    StepCeiling(u64),
    #[error("graph has no Hamilton cycle")]
    NoHamiltonCycle,
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("graph is not a balanced bipartite graph")]
    NotBipartite,
    #[error("no spanning linear forest with {t} paths on {n} vertices")]
    NoForest { n: usize, t: usize },
    #[error("no matching with {0} edges")]
    NoMatching(usize),
    #[error("witness failed validation: {0}")]
    BadWitness(#[from] Violation),
}

/// Largest instance each oracle accepts, plus a ceiling on search nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBudget {
    /// Vertices.
    pub forest: usize,
    /// Vertices per side.
    pub matching: usize,
    /// Vertices.
    pub hamilton_overlap: usize,
    /// Vertices per side.
    pub pm_overlap: usize,
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            forest: 9,
            matching: 8,
            hamilton_overlap: 12,
            pm_overlap: 15,
            max_nodes: 500_000_000,
        }
    }
}

impl OracleBudget {
    /// Warnings for every limit raised above the default, with a crude size
    /// estimate of the search space.
    pub fn warnings(&self) -> Vec<String> {
        let d = OracleBudget::default();
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        let mut out = Vec::new();
        let mut warn = |name: &str, size: usize, default: usize, space: f64| {
            if size > default {
                out.push(format!(
                    "{name} budget raised to {size} (default {default}); search space up to {space:.3e}"
                ));
            }
        };
        warn("forest", self.forest, d.forest, 2f64.powi((self.forest * self.forest.saturating_sub(1) / 2) as i32));
        warn("matching", self.matching, d.matching, fact(self.matching) * 2f64.powi(self.matching as i32));
        warn("hamilton-overlap", self.hamilton_overlap, d.hamilton_overlap, fact(self.hamilton_overlap.saturating_sub(1)) / 2.0);
        warn("pm-overlap", self.pm_overlap, d.pm_overlap, fact(self.pm_overlap));
        out
    }

    fn check(&self, problem: &'static str, size: usize, limit: usize) -> Result<(), OracleError> {
        if size > limit {
            Err(OracleError::BudgetExceeded { problem, size, limit })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult<W> {
    pub value: usize,
    pub witness: W,
    pub nodes_explored: u64,
    pub wall_ms: u64,
}

struct Counter {
    nodes: u64,
    limit: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            Err(OracleError::StepCeiling(self.limit))
        } else {
            Ok(())
        }
    }
}

fn distinct(g: &ColouredGraph, es: &[Edge]) -> usize {
    let mut seen = vec![false; g.num_colours()];
    es.iter()
        .filter(|e| !std::mem::replace(&mut seen[g.edge_colour_index(e.u, e.v).unwrap()], true))
        .count()
}

fn half(g: &ColouredGraph) -> Result<usize, OracleError> {
    g.bipartite_half().ok_or(OracleError::NotBipartite)
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

/// Paths of an acyclic edge set with maximum degree 2, each starting at its
/// smaller end, ordered by that end.
fn edges_to_paths(n: usize, es: &[Edge]) -> Vec<Vec<Vertex>> {
    let mut adj = vec![Vec::new(); n];
    for e in es {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut seen = vec![false; n];
    let mut paths = Vec::new();
    for s in 0..n {
        if seen[s] || adj[s].len() == 2 {
            continue;
        }
        let mut path = vec![s];
        seen[s] = true;
        let mut cur = s;
        while let Some(&nx) = adj[cur].iter().find(|&&w| !seen[w]) {
            seen[nx] = true;
            path.push(nx);
            cur = nx;
        }
        paths.push(path);
    }
    paths
}

/// Most distinct colours on a spanning linear forest with exactly `t` paths.
pub fn max_colour_forest_exact(
    g: &ColouredGraph,
    t: usize,
    budget: &OracleBudget,
) -> Result<OracleResult<Vec<Vec<Vertex>>>, OracleError> {
    let start = Instant::now();
    let n = g.n();
    budget.check("forest", n, budget.forest)?;
    if t == 0 || t > n {
        return Err(OracleError::NoForest { n, t });
    }
    let edges: Vec<(Edge, usize)> = {
        let mut v: Vec<_> = g.edges().map(|(e, _)| (e, g.edge_colour_index(e.u, e.v).unwrap())).collect();
        v.sort_unstable();
        v
    };
    struct S<'a> {
        edges: &'a [(Edge, usize)],
        deg: Vec<u8>,
        parent: Vec<usize>,
        counts: Vec<u32>,
        distinct: usize,
        chosen: Vec<Edge>,
        best: Option<(usize, Vec<Edge>)>,
        ctr: Counter,
    }
    fn root(p: &[usize], mut v: usize) -> usize {
        while p[v] != v {
            v = p[v];
        }
        v
    }
    fn go(s: &mut S, i: usize, need: usize) -> Result<(), OracleError> {
        s.ctr.tick()?;
        if need == 0 {
            if s.best.as_ref().is_none_or(|b| s.distinct > b.0) {
                s.best = Some((s.distinct, s.chosen.clone()));
            }
            return Ok(());
        }
        if s.edges.len() - i < need {
            return Ok(());
        }
        if let Some((b, _)) = &s.best {
            let mut fresh = vec![false; s.counts.len()];
            let avail = s.edges[i..]
                .iter()
                .filter(|(_, c)| s.counts[*c] == 0 && !std::mem::replace(&mut fresh[*c], true))
                .count();
            if s.distinct + avail.min(need) <= *b {
                return Ok(());
            }
        }
        let (e, c) = s.edges[i];
        let (ru, rv) = (root(&s.parent, e.u), root(&s.parent, e.v));
        if s.deg[e.u] < 2 && s.deg[e.v] < 2 && ru != rv {
            s.deg[e.u] += 1;
            s.deg[e.v] += 1;
            s.parent[ru] = rv;
            s.counts[c] += 1;
            s.distinct += (s.counts[c] == 1) as usize;
            s.chosen.push(e);
            go(s, i + 1, need - 1)?;
            s.chosen.pop();
            s.distinct -= (s.counts[c] == 1) as usize;
            s.counts[c] -= 1;
            s.parent[ru] = ru;
            s.deg[e.u] -= 1;
            s.deg[e.v] -= 1;
        }
        go(s, i + 1, need)
    }
    let mut s = S {
        edges: &edges,
        deg: vec![0; n],
        parent: (0..n).collect(),
        counts: vec![0; g.num_colours()],
        distinct: 0,
        chosen: Vec::new(),
        best: None,
        ctr: Counter {
            nodes: 0,
            limit: budget.max_nodes,
        },
    };
    go(&mut s, 0, n - t)?;
    let (value, es) = s.best.ok_or(OracleError::NoForest { n, t })?;
    let paths = edges_to_paths(n, &es);
    validate_linear_forest(g, &paths, t)?;
    debug_assert_eq!(distinct(g, &es), value);
    Ok(OracleResult {
        value,
        witness: paths,
        nodes_explored: s.ctr.nodes,
        wall_ms: elapsed_ms(start),
    })
}

/// Most distinct colours on a matching with exactly `size` edges.
pub fn max_colour_matching_exact(
    g: &ColouredGraph,
    size: usize,
    budget: &OracleBudget,
) -> Result<OracleResult<Vec<Edge>>, OracleError> {
    let start = Instant::now();
    let h = half(g)?;
    budget.check("matching", h, budget.matching)?;
    struct S<'a> {
        g: &'a ColouredGraph,
        h: usize,
        used: Vec<bool>,
        counts: Vec<u32>,
        distinct: usize,
        chosen: Vec<Edge>,
        best: Option<(usize, Vec<Edge>)>,
        ctr: Counter,
    }
    fn go(s: &mut S, x: usize, need: usize) -> Result<(), OracleError> {
        s.ctr.tick()?;
        if need == 0 {
            if s.best.as_ref().is_none_or(|b| s.distinct > b.0) {
                s.best = Some((s.distinct, s.chosen.clone()));
            }
            return Ok(());
        }
        if s.h - x < need || s.best.as_ref().is_some_and(|b| s.distinct + need <= b.0) {
            return Ok(());
        }
        let g = s.g;
        for (y, c) in g.incident(x) {
            if s.used[y] {
                continue;
            }
            s.used[y] = true;
            s.counts[c] += 1;
            s.distinct += (s.counts[c] == 1) as usize;
            s.chosen.push(Edge::new(x, y));
            go(s, x + 1, need - 1)?;
            s.chosen.pop();
            s.distinct -= (s.counts[c] == 1) as usize;
            s.counts[c] -= 1;
            s.used[y] = false;
        }
        go(s, x + 1, need)
    }
    let mut s = S {
        g,
        h,
        used: vec![false; g.n()],
        counts: vec![0; g.num_colours()],
        distinct: 0,
        chosen: Vec::new(),
        best: None,
        ctr: Counter {
            nodes: 0,
            limit: budget.max_nodes,
        },
    };
    go(&mut s, 0, size)?;
    let (value, witness) = s.best.ok_or(OracleError::NoMatching(size))?;
    validate_matching(g, &witness)?;
    Ok(OracleResult {
        value,
        witness,
        nodes_explored: s.ctr.nodes,
        wall_ms: elapsed_ms(start),
    })
}

fn membership(n: usize, f: &[Edge]) -> Vec<bool> {
    let mut m = vec![false; n * n];
    for e in f {
        if e.u < n && e.v < n {
            m[e.u * n + e.v] = true;
            m[e.v * n + e.u] = true;
        }
    }
    m
}

/// Largest number of edges of `f` on a single Hamilton cycle of `g`.
pub fn max_overlap_hamilton(
    g: &ColouredGraph,
    f: &[Edge],
    budget: &OracleBudget,
) -> Result<OracleResult<Vec<Vertex>>, OracleError> {
    let start = Instant::now();
    let n = g.n();
    budget.check("hamilton-overlap", n, budget.hamilton_overlap)?;
    if n < 3 {
        return Err(OracleError::NoHamiltonCycle);
    }
    let inf = membership(n, f);
    let fl: Vec<Edge> = f.iter().copied().filter(|e| e.u < n && e.v < n && g.has_edge(e.u, e.v)).collect();
    struct S<'a> {
        g: &'a ColouredGraph,
        n: usize,
        inf: &'a [bool],
        f: &'a [Edge],
        on: Vec<bool>,
        path: Vec<Vertex>,
        cur: usize,
        best: Option<(usize, Vec<Vertex>)>,
        ctr: Counter,
    }
    fn go(s: &mut S) -> Result<(), OracleError> {
        s.ctr.tick()?;
        let n = s.n;
        let last = *s.path.last().unwrap();
        if s.path.len() == n {
            // Each cycle once: second vertex below the last.
            if s.g.has_edge(last, 0) && s.path[1] < last {
                let v = s.cur + s.inf[last * n] as usize;
                if s.best.as_ref().is_none_or(|b| v > b.0) {
                    s.best = Some((v, s.path.clone()));
                }
            }
            return Ok(());
        }
        if let Some((b, _)) = &s.best {
            // Remaining cycle edges all lie inside the unvisited set plus the two ends.
            let open = |v: Vertex| !s.on[v] || v == last || v == 0;
            let avail = s.f.iter().filter(|e| open(e.u) && open(e.v)).count();
            if s.cur + avail.min(n - s.path.len() + 1) <= *b {
                return Ok(());
            }
        }
        let g = s.g;
        for (w, _) in g.incident(last) {
            if s.on[w] {
                continue;
            }
            let gain = s.inf[last * n + w] as usize;
            s.on[w] = true;
            s.path.push(w);
            s.cur += gain;
            go(s)?;
            s.cur -= gain;
            s.path.pop();
            s.on[w] = false;
        }
        Ok(())
    }
    let mut on = vec![false; n];
    on[0] = true;
    let mut s = S {
        g,
        n,
        inf: &inf,
        f: &fl,
        on,
        path: vec![0],
        cur: 0,
        best: None,
        ctr: Counter {
            nodes: 0,
            limit: budget.max_nodes,
        },
    };
    go(&mut s)?;
    let (value, witness) = s.best.ok_or(OracleError::NoHamiltonCycle)?;
    validate_hamilton(g, &witness)?;
    Ok(OracleResult {
        value,
        witness,
        nodes_explored: s.ctr.nodes,
        wall_ms: elapsed_ms(start),
    })
}

/// Largest number of edges of `m` on a single perfect matching of `g`.
pub fn max_overlap_perfect_matching(
    g: &ColouredGraph,
    m: &[Edge],
    budget: &OracleBudget,
) -> Result<OracleResult<Vec<Edge>>, OracleError> {
    let start = Instant::now();
    let h = half(g)?;
    budget.check("pm-overlap", h, budget.pm_overlap)?;
    let n = g.n();
    let mut partner = vec![usize::MAX; n];
    for e in m {
        if g.has_edge(e.u, e.v) && e.u < h && e.v >= h {
            partner[e.u] = e.v;
        }
    }
    // Rows with fewer options first; ties by index.
    let mut rows: Vec<Vertex> = (0..h).collect();
    rows.sort_by_key(|&x| (g.degree(x), x));
    struct S<'a> {
        g: &'a ColouredGraph,
        rows: &'a [Vertex],
        partner: &'a [usize],
        used: Vec<bool>,
        assign: Vec<usize>,
        cur: usize,
        best: Option<(usize, Vec<usize>)>,
        ctr: Counter,
    }
    fn go(s: &mut S, i: usize) -> Result<(), OracleError> {
        s.ctr.tick()?;
        if i == s.rows.len() {
            if s.best.as_ref().is_none_or(|b| s.cur > b.0) {
                s.best = Some((s.cur, s.assign.clone()));
            }
            return Ok(());
        }
        let rest = &s.rows[i..];
        if let Some((b, _)) = &s.best {
            let avail = rest.iter().filter(|&&x| s.partner[x] != usize::MAX && !s.used[s.partner[x]]).count();
            if s.cur + avail <= *b {
                return Ok(());
            }
        }
        let g = s.g;
        if rest.iter().any(|&x| g.incident(x).all(|(y, _)| s.used[y])) {
            return Ok(());
        }
        let x = s.rows[i];
        let p = s.partner[x];
        let order = (p != usize::MAX && !s.used[p])
            .then_some(p)
            .into_iter()
            .chain(g.incident(x).map(|(y, _)| y).filter(|&y| y != p));
        let choices: Vec<Vertex> = order.collect();
        for y in choices {
            if s.used[y] {
                continue;
            }
            let gain = (y == p) as usize;
            s.used[y] = true;
            s.assign[x] = y;
            s.cur += gain;
            go(s, i + 1)?;
            s.cur -= gain;
            s.used[y] = false;
        }
        Ok(())
    }
    let mut s = S {
        g,
        rows: &rows,
        partner: &partner,
        used: vec![false; n],
        assign: vec![usize::MAX; h],
        cur: 0,
        best: None,
        ctr: Counter {
            nodes: 0,
            limit: budget.max_nodes,
        },
    };
    go(&mut s, 0)?;
    let (value, assign) = s.best.ok_or(OracleError::NoPerfectMatching)?;
    let witness: Vec<Edge> = assign.iter().enumerate().map(|(x, &y)| Edge::new(x, y)).collect();
    validate_matching(g, &witness)?;
    Ok(OracleResult {
        value,
        witness,
        nodes_explored: s.ctr.nodes,
        wall_ms: elapsed_ms(start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{
        construct_forest_blocker, construct_matching_blocker, gen_latin_cyclic, latin_to_graph, CellMask,
    };
    use crate::graph::build_graph;
    use crate::ratio::Ratio;

    fn b() -> OracleBudget {
        OracleBudget::default()
    }

    fn k4() -> ColouredGraph {
        build_graph(4, &[(0, 1, 1), (2, 3, 1), (0, 2, 2), (1, 3, 2), (0, 3, 3), (1, 2, 3)]).unwrap()
    }

    fn cycle(n: usize, rainbow: bool) -> ColouredGraph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, if rainbow { i as u32 + 1 } else { (i % 2) as u32 + 1 })).collect();
        build_graph(n, &e).unwrap()
    }

    #[test]
    fn forest_values() {
        // The end edges of any Hamilton path of K_4 form a perfect matching,
        // so a 1-factorisation colours them alike.
        assert_eq!(max_colour_forest_exact(&k4(), 1, &b()).unwrap().value, 2);
        assert_eq!(max_colour_forest_exact(&k4(), 2, &b()).unwrap().value, 2);
        assert_eq!(max_colour_forest_exact(&k4(), 4, &b()).unwrap().value, 0);
        let r = max_colour_forest_exact(&cycle(5, true), 1, &b()).unwrap();
        assert_eq!(r.value, 4);
        assert_eq!(r.witness.len(), 1);
        assert_eq!(max_colour_forest_exact(&k4(), 0, &b()).unwrap_err(), OracleError::NoForest { n: 4, t: 0 });
        let big = cycle(10, true);
        assert!(matches!(max_colour_forest_exact(&big, 1, &b()), Err(OracleError::BudgetExceeded { .. })));
    }

    #[test]
    fn matching_values() {
        let l2 = latin_to_graph(&gen_latin_cyclic(2), &CellMask::full(2)).unwrap().graph;
        assert_eq!(max_colour_matching_exact(&l2, 2, &b()).unwrap().value, 1);
        let l3 = latin_to_graph(&gen_latin_cyclic(3), &CellMask::full(3)).unwrap().graph;
        assert_eq!(max_colour_matching_exact(&l3, 3, &b()).unwrap().value, 3);
        let r = max_colour_matching_exact(&l3, 0, &b()).unwrap();
        assert_eq!((r.value, r.witness.len()), (0, 0));
        assert_eq!(max_colour_matching_exact(&l3, 4, &b()).unwrap_err(), OracleError::NoMatching(4));
    }

    #[test]
    fn hamilton_overlap_values() {
        let c6 = cycle(6, false);
        let all: Vec<Edge> = c6.edges().map(|(e, _)| e).collect();
        assert_eq!(max_overlap_hamilton(&c6, &all[1..], &b()).unwrap().value, 5);
        assert_eq!(max_overlap_hamilton(&c6, &[], &b()).unwrap().value, 0);
        let path = build_graph(3, &[(0, 1, 1), (1, 2, 2)]).unwrap();
        assert_eq!(max_overlap_hamilton(&path, &[], &b()).unwrap_err(), OracleError::NoHamiltonCycle);
        let fb = construct_forest_blocker(10, Ratio::new(3, 5).unwrap()).unwrap();
        assert!(max_overlap_hamilton(&fb.graph, &fb.forest_edges(), &b()).unwrap().value <= 2);
    }

    #[test]
    fn perfect_matching_overlap_values() {
        let mb = construct_matching_blocker(10, Ratio::new(3, 5).unwrap()).unwrap();
        let r = max_overlap_perfect_matching(&mb.graph, &mb.matching, &b()).unwrap();
        assert!(r.value <= 2);
        let pm = ColouredGraph::from_edges(4, &[(0, 2, 1), (1, 3, 2)], Some(2)).unwrap();
        let m: Vec<Edge> = pm.edges().map(|(e, _)| e).collect();
        assert_eq!(max_overlap_perfect_matching(&pm, &m, &b()).unwrap().value, 2);
        assert_eq!(max_overlap_perfect_matching(&pm, &[], &b()).unwrap().value, 0);
    }

    #[test]
    fn raised_budget_warns() {
        assert!(b().warnings().is_empty());
        let mut big = b();
        big.forest = 11;
        let w = big.warnings();
        assert_eq!(w.len(), 1);
        assert!(w[0].starts_with("forest budget raised to 11"));
    }
}
