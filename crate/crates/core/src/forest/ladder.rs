use super::{ForestError, LinearForest, NONE};
use crate::graph::{ColourSet, ColouredGraph, Edge, Vertex};

/// Record of the first vertex that brought a colour into the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub level: usize,
    /// `x` with `f(x)` equal to the witnessed colour.
    pub vertex: Vertex,
    /// Dense colour index of the entry edge `v_1 x`.
    pub entry_colour: usize,
}

/// Nested colour sets `C_0 ⊆ C_1 ⊆ …` grown from the first endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityLadder {
    /// Path whose first endpoint drives each level `1..=levels`.
    level_path: Vec<usize>,
    level_endpoint: Vec<Vertex>,
    /// Per dense colour: the level at which it entered, `NONE` if never.
    level_of: Vec<u32>,
    witness: Vec<Option<Witness>>,
    /// `sizes[i] = |C_i|`
    sizes: Vec<usize>,
}

impl ReachabilityLadder {
    pub fn levels(&self) -> usize {
        self.level_path.len()
    }

    pub fn endpoint(&self, level: usize) -> Vertex {
        self.level_endpoint[level - 1]
    }

    pub fn path_at(&self, level: usize) -> usize {
        self.level_path[level - 1]
    }

    pub fn level_of(&self, colour: usize) -> Option<usize> {
        let l = self.level_of[colour];
        (l != NONE).then_some(l as usize)
    }

    /// Whether colour index `colour` lies in `C_i`.
    #[inline]
    pub fn in_level(&self, colour: usize, i: usize) -> bool {
        let l = self.level_of[colour];
        l != NONE && (l as usize) <= i
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn set(&self, g: &ColouredGraph, i: usize) -> ColourSet {
        let mut s = ColourSet::empty(g);
        for c in 0..self.level_of.len() {
            if self.in_level(c, i) {
                s.insert_index(c);
            }
        }
        s
    }

    pub fn witness(&self, colour: usize) -> Option<&Witness> {
        self.witness[colour].as_ref()
    }

    /// Removes a witness; used to exercise the audit on corrupted ladders.
    pub fn forget_witness(&mut self, colour: usize) {
        self.witness[colour] = None;
    }
}

pub fn build_ladder(g: &ColouredGraph, f: &LinearForest) -> ReachabilityLadder {
    build_ladder_with(g, f, false)
}

/// With `fixpoint`, sweeps over the endpoints repeat (levels `t+1, …`) until
/// a sweep adds no colour.
pub fn build_ladder_with(g: &ColouredGraph, f: &LinearForest, fixpoint: bool) -> ReachabilityLadder {
    let counts = f.colour_counts(g);
    let k = g.num_colours();
    let mut level_of: Vec<u32> = counts.iter().map(|&c| if c == 0 { 0 } else { NONE }).collect();
    let mut witness = vec![None; k];
    let mut sizes = vec![level_of.iter().filter(|&&l| l == 0).count()];
    let mut level_path = Vec::new();
    let mut level_endpoint = Vec::new();
    let t = f.t();
    let mut pending: Vec<(usize, Vertex, usize)> = Vec::new();
    loop {
        let mut grew = false;
        for p in 0..t {
            let level = level_path.len() + 1;
            let v = f.first_endpoint(p);
            level_path.push(p);
            level_endpoint.push(v);
            pending.clear();
            for (x, col) in g.incident(v) {
                let l = level_of[col];
                if l == NONE || l as usize >= level {
                    continue;
                }
                let Some(px) = f.prefix(x) else { continue };
                let fx = g.edge_colour_index(px, x).expect("forest edge");
                if level_of[fx] == NONE {
                    pending.push((fx, x, col));
                }
            }
            let mut added = 0;
            for &(fx, x, col) in &pending {
                if level_of[fx] == NONE {
                    level_of[fx] = level as u32;
                    witness[fx] = Some(Witness {
                        level,
                        vertex: x,
                        entry_colour: col,
                    });
                    added += 1;
                }
            }
            grew |= added > 0;
            sizes.push(sizes.last().unwrap() + added);
        }
        if !fixpoint || !grew || t == 0 {
            break;
        }
    }
    ReachabilityLadder {
        level_path,
        level_endpoint,
        level_of,
        witness,
        sizes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// One swap whose new edge has a colour absent from the forest.
    Direct,
    /// Trace-back chain through the ladder witnesses.
    Chain,
}

/// Ordered `(remove, add)` swaps with the predicted change in distinct colours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangePlan {
    pub steps: Vec<(Edge, Edge)>,
    pub delta: i64,
    pub kind: MoveKind,
    /// Distinct colours of the forest the plan was computed for.
    pub base_colours: usize,
}

/// Follows witnesses from `(x, level)` down to an entry colour in `C_0`.
fn trace_back(
    g: &ColouredGraph,
    f: &LinearForest,
    ladder: &ReachabilityLadder,
    mut x: Vertex,
    mut level: usize,
) -> Result<Vec<(Edge, Edge)>, ForestError> {
    let mut steps = Vec::new();
    loop {
        let v1 = ladder.endpoint(level);
        let px = f.prefix(x).ok_or(ForestError::WitnessCycle(level))?;
        let entry = g.edge_colour_index(v1, x).ok_or(ForestError::WitnessCycle(level))?;
        steps.push((Edge::new(px, x), Edge::new(x, v1)));
        let next = ladder.level_of(entry).ok_or(ForestError::WitnessCycle(level))?;
        if next == 0 {
            return Ok(steps);
        }
        if next >= level {
            return Err(ForestError::WitnessCycle(level));
        }
        let w = ladder.witness(entry).ok_or(ForestError::WitnessCycle(level))?;
        x = w.vertex;
        level = w.level;
    }
}

/// Candidate chains for a vertex `x` reached at `level` whose prefix colour
/// is repeated in the forest: the chain from `x` itself, then the chain from
/// the witness of `f(x)`. The witness chain gains the same colour (its first
/// removed edge also carries the repeated colour) and is always a valid
/// forest move, so it backs up the direct chain when that one revisits a
/// vertex or would re-add the edge it removes.
fn candidates(
    g: &ColouredGraph,
    f: &LinearForest,
    ladder: &ReachabilityLadder,
    level: usize,
    x: Vertex,
    fx: usize,
) -> Result<Vec<Vec<(Edge, Edge)>>, ForestError> {
    let w = ladder.witness(fx).ok_or(ForestError::WitnessCycle(level))?;
    let from_witness = (w.vertex != x || w.level != level).then_some((w.vertex, w.level));
    let mut out = Vec::with_capacity(2);
    if f.prefix(x) != Some(ladder.endpoint(level)) {
        out.push(trace_back(g, f, ladder, x, level)?);
    }
    if let Some((wx, wl)) = from_witness {
        out.push(trace_back(g, f, ladder, wx, wl)?);
    }
    Ok(out)
}

/// Applies the swaps to a copy of the forest's adjacency. Returns the new
/// paths, or `None` if some step is impossible or the result is not a
/// spanning linear forest with `t` paths.
fn simulate(g: &ColouredGraph, f: &LinearForest, steps: &[(Edge, Edge)]) -> Result<Option<Vec<Vec<Vertex>>>, ForestError> {
    let n = f.n();
    let mut nbr = vec![[NONE; 2]; n];
    let link = |nbr: &mut Vec<[u32; 2]>, a: Vertex, b: Vertex| -> bool {
        for (x, y) in [(a, b), (b, a)] {
            match nbr[x].iter().position(|&s| s == NONE) {
                Some(k) => nbr[x][k] = y as u32,
                None => return false,
            }
        }
        true
    };
    let unlink = |nbr: &mut Vec<[u32; 2]>, a: Vertex, b: Vertex| -> bool {
        for (x, y) in [(a, b), (b, a)] {
            match nbr[x].iter().position(|&s| s == y as u32) {
                Some(k) => nbr[x][k] = NONE,
                None => return false,
            }
        }
        true
    };
    for e in f.edges() {
        link(&mut nbr, e.u, e.v);
    }
    for &(rem, add) in steps {
        if !unlink(&mut nbr, rem.u, rem.v) {
            return Err(ForestError::PlanStale);
        }
        if !g.has_edge(add.u, add.v) || nbr[add.u].contains(&(add.v as u32)) {
            return Ok(None);
        }
        if !link(&mut nbr, add.u, add.v) {
            return Ok(None);
        }
    }
    let mut seen = vec![false; n];
    let mut paths = Vec::with_capacity(f.t());
    for s in 0..n {
        if seen[s] || nbr[s].iter().filter(|&&x| x != NONE).count() == 2 {
            continue;
        }
        let mut path = vec![s];
        seen[s] = true;
        let mut prev = NONE;
        let mut cur = s;
        loop {
            let next = nbr[cur].iter().copied().find(|&x| x != NONE && x != prev);
            match next {
                Some(x) => {
                    prev = cur as u32;
                    cur = x as usize;
                    seen[cur] = true;
                    path.push(cur);
                }
                None => break,
            }
        }
        paths.push(path);
    }
    if seen.iter().any(|&s| !s) || paths.len() != f.t() {
        return Ok(None);
    }
    for p in paths.iter_mut() {
        let (a, b) = (p[0], *p.last().unwrap());
        let keep_a = match (f.is_first_endpoint(a), f.is_first_endpoint(b)) {
            (true, false) => true,
            (false, true) => false,
            _ => a <= b,
        };
        if !keep_a {
            p.reverse();
        }
    }
    paths.sort_by_key(|p| p[0]);
    Ok(Some(paths))
}

/// Scans levels ascending and, within a level, neighbours of the endpoint by
/// ascending id. Direct moves are tried before chains. With `shortest`, the
/// valid plan with fewest steps wins (ties by scan order).
pub(crate) fn search(
    g: &ColouredGraph,
    f: &LinearForest,
    ladder: &ReachabilityLadder,
    shortest: bool,
) -> Result<Option<ExchangePlan>, ForestError> {
    let counts = f.colour_counts(g);
    let base_colours = counts.iter().filter(|&&c| c > 0).count();
    let mut chains: Vec<Vec<(Edge, Edge)>> = Vec::new();
    for direct_pass in [true, false] {
        for level in 1..=ladder.levels() {
            let v1 = ladder.endpoint(level);
            for (x, col) in g.incident(v1) {
                if !ladder.in_level(col, level - 1) || f.is_first_endpoint(x) {
                    continue;
                }
                let px = f.prefix(x).expect("non-first vertices have a prefix");
                let fx = g.edge_colour_index(px, x).expect("forest edge");
                if counts[fx] < 2 {
                    continue;
                }
                let is_direct = ladder.in_level(col, 0) && px != v1;
                if is_direct != direct_pass {
                    continue;
                }
                for steps in candidates(g, f, ladder, level, x, fx)? {
                    if shortest {
                        chains.push(steps);
                    } else if simulate(g, f, &steps)?.is_some() {
                        let kind = if steps.len() == 1 { MoveKind::Direct } else { MoveKind::Chain };
                        return Ok(Some(ExchangePlan {
                            steps,
                            delta: 1,
                            kind,
                            base_colours,
                        }));
                    }
                }
            }
        }
    }
    if shortest {
        let mut order: Vec<usize> = (0..chains.len()).collect();
        order.sort_by_key(|&i| chains[i].len());
        for i in order {
            if simulate(g, f, &chains[i])?.is_some() {
                let steps = std::mem::take(&mut chains[i]);
                let kind = if steps.len() == 1 { MoveKind::Direct } else { MoveKind::Chain };
                return Ok(Some(ExchangePlan {
                    steps,
                    delta: 1,
                    kind,
                    base_colours,
                }));
            }
        }
    }
    Ok(None)
}

/// First strictly improving exchange in the deterministic scan, if any.
pub fn find_improving_exchange(
    g: &ColouredGraph,
    f: &LinearForest,
    ladder: &ReachabilityLadder,
) -> Result<Option<ExchangePlan>, ForestError> {
    search(g, f, ladder, false)
}

/// Applies `plan`; the result must keep `t` paths, span every vertex and
/// gain at least one colour.
pub fn apply_exchange(g: &ColouredGraph, f: &LinearForest, plan: &ExchangePlan) -> Result<LinearForest, ForestError> {
    let before = f.distinct_colours(g);
    if before != plan.base_colours {
        return Err(ForestError::PlanStale);
    }
    let paths = simulate(g, f, &plan.steps)?
        .ok_or_else(|| ForestError::InvariantBroken("plan does not yield a spanning linear forest".into()))?;
    let next = LinearForest::from_valid(f.n(), paths);
    let after = next.distinct_colours(g);
    if after < before + 1 {
        return Err(ForestError::InvariantBroken(format!(
            "exchange changed colours from {before} to {after}"
        )));
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    // Path 0-1-2-3 coloured a=1, b=2, c=3 plus chord 0-2 coloured d=4.
    fn four() -> (ColouredGraph, LinearForest) {
        let g = build_graph(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 3), (0, 2, 4)]).unwrap();
        let f = LinearForest::new(&g, vec![vec![0, 1, 2, 3]]).unwrap();
        (g, f)
    }

    #[test]
    fn ladder_on_the_four_vertex_instance() {
        let (g, f) = four();
        let l = build_ladder(&g, &f);
        let d = g.colour_index(4).unwrap();
        let b = g.colour_index(2).unwrap();
        assert_eq!(l.set(&g, 0).colours(&g), vec![4]);
        assert_eq!(l.set(&g, 1).colours(&g), vec![2, 4]);
        assert_eq!(l.level_of(d), Some(0));
        assert_eq!(
            l.witness(b),
            Some(&Witness {
                level: 1,
                vertex: 2,
                entry_colour: d
            })
        );
        // f(2) = b is not repeated, so no move.
        assert_eq!(find_improving_exchange(&g, &f, &l).unwrap(), None);
    }

    #[test]
    fn rainbow_forest_using_every_colour_has_empty_ladder() {
        let g = build_graph(3, &[(0, 1, 1), (1, 2, 2)]).unwrap();
        let f = LinearForest::new(&g, vec![vec![0, 1, 2]]).unwrap();
        let l = build_ladder(&g, &f);
        assert_eq!(l.size(0), 0);
        assert_eq!(l.size(1), 0);
        assert_eq!(find_improving_exchange(&g, &f, &l).unwrap(), None);
    }

    #[test]
    fn single_path_c0_is_the_unused_colour() {
        let g = build_graph(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 3)]).unwrap();
        let f = LinearForest::new(&g, vec![vec![0, 1, 2]]).unwrap();
        let l = build_ladder(&g, &f);
        assert_eq!(l.set(&g, 0).colours(&g), vec![3]);
    }

    // 5 vertices: forest 0-1-2 (colours 1, 2) and 3-4 (colour 1), so colour 1
    // is repeated. Endpoint 3 sees vertex 1 through the unused colour 5.
    fn direct_instance() -> (ColouredGraph, LinearForest) {
        let g = build_graph(5, &[(0, 1, 1), (1, 2, 2), (3, 4, 1), (3, 1, 5)]).unwrap();
        let f = LinearForest::new(&g, vec![vec![0, 1, 2], vec![3, 4]]).unwrap();
        (g, f)
    }

    #[test]
    fn direct_move_gains_one_colour() {
        let (g, f) = direct_instance();
        let l = build_ladder(&g, &f);
        let plan = find_improving_exchange(&g, &f, &l).unwrap().unwrap();
        assert_eq!(plan.kind, MoveKind::Direct);
        assert_eq!(plan.steps, vec![(Edge::new(0, 1), Edge::new(1, 3))]);
        let next = apply_exchange(&g, &f, &plan).unwrap();
        assert_eq!(next.distinct_colours(&g), f.distinct_colours(&g) + 1);
        assert_eq!(next.t(), 2);
        assert_eq!(apply_exchange(&g, &next, &plan).unwrap_err(), ForestError::PlanStale);
    }

    // Paths 0-1-2 (colours 1, 2), 3-4-5 (colours 3, 1) and the lone vertex 6;
    // colour 1 repeats. Endpoint 0 reaches 4 through the unused colour 9, so
    // colour 3 enters at level 1. Endpoint 6 reaches 1 through colour 3.
    fn chain_instance() -> (ColouredGraph, LinearForest) {
        let g = build_graph(
            7,
            &[(0, 1, 1), (1, 2, 2), (3, 4, 3), (4, 5, 1), (0, 4, 9), (6, 1, 3)],
        )
        .unwrap();
        let f = LinearForest::new(&g, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6]]).unwrap();
        (g, f)
    }

    #[test]
    fn two_step_chain_gains_one_colour() {
        let (g, f) = chain_instance();
        let l = build_ladder(&g, &f);
        let c3 = g.colour_index(3).unwrap();
        assert_eq!(l.level_of(c3), Some(1));
        let plan = find_improving_exchange(&g, &f, &l).unwrap().unwrap();
        assert_eq!(plan.kind, MoveKind::Chain);
        assert_eq!(
            plan.steps,
            vec![(Edge::new(0, 1), Edge::new(1, 6)), (Edge::new(3, 4), Edge::new(0, 4))]
        );
        let next = apply_exchange(&g, &f, &plan).unwrap();
        assert_eq!(next.distinct_colours(&g), 4);
        assert_eq!(f.distinct_colours(&g), 3);
        assert_eq!(crate::validate::validate_linear_forest(&g, next.paths(), 3), Ok(()));
    }

    #[test]
    fn fixpoint_ladder_contains_plain_ladder() {
        let (g, f) = chain_instance();
        let plain = build_ladder(&g, &f);
        let fix = build_ladder_with(&g, &f, true);
        assert!(fix.levels() >= plain.levels());
        let last = plain.levels();
        assert!(plain.set(&g, last).is_subset(&fix.set(&g, fix.levels())));
    }
}
