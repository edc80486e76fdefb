use super::{ForestError, LinearForest};
use crate::graph::{ColouredGraph, Vertex};

/// Largest order for which the exhaustive fallback search is attempted.
const EXHAUSTIVE_LIMIT: usize = 12;

struct Grower<'a> {
    g: &'a ColouredGraph,
    in_path: Vec<bool>,
    path: Vec<Vertex>,
    // scratch marks for neighbourhood tests
    mark: Vec<u32>,
    epoch: u32,
}

impl<'a> Grower<'a> {
    fn new(g: &'a ColouredGraph, start: Vertex) -> Self {
        let mut in_path = vec![false; g.n()];
        in_path[start] = true;
        Grower {
            g,
            in_path,
            path: vec![start],
            mark: vec![0; g.n()],
            epoch: 0,
        }
    }

    fn extend_tail(&mut self) {
        loop {
            let tail = *self.path.last().unwrap();
            let next = self.g.incident(tail).map(|(w, _)| w).find(|&w| !self.in_path[w]);
            match next {
                Some(w) => {
                    self.in_path[w] = true;
                    self.path.push(w);
                }
                None => return,
            }
        }
    }

    fn extend_both(&mut self) {
        self.extend_tail();
        self.path.reverse();
        self.extend_tail();
    }

    fn mark_neighbours(&mut self, v: Vertex) -> u32 {
        self.epoch += 1;
        for (w, _) in self.g.incident(v) {
            self.mark[w] = self.epoch;
        }
        self.epoch
    }

    /// Reorders the path so that its vertices form a cycle (closing edge
    /// between last and first). Uses the endpoint-crossing argument, then a
    /// bounded number of rotations at the tail.
    fn close(&mut self) -> bool {
        let a = self.path.len() - 1;
        if a < 2 {
            return false;
        }
        let mut tried = vec![false; self.g.n()];
        for _ in 0..self.g.n() {
            let u = self.path[0];
            let v = self.path[a];
            tried[v] = true;
            if self.g.has_edge(u, v) {
                return true;
            }
            let eu = self.mark_neighbours(u);
            let crossing = (0..a).find(|&j| self.mark[self.path[j + 1]] == eu && self.g.has_edge(v, self.path[j]));
            if let Some(j) = crossing {
                self.path[j + 1..].reverse();
                return true;
            }
            // Rotate at the tail: v ~ p_j gives the path p_0..p_j p_a..p_{j+1}.
            let mut position = vec![usize::MAX; self.g.n()];
            for (i, &x) in self.path.iter().enumerate() {
                position[x] = i;
            }
            let pivot = self
                .g
                .incident(v)
                .map(|(w, _)| position[w])
                .filter(|&j| j != usize::MAX && j + 1 < a)
                .find(|&j| !tried[self.path[j + 1]]);
            match pivot {
                Some(j) => self.path[j + 1..].reverse(),
                None => return false,
            }
            // A rotation may expose an end with a neighbour off the path.
            let tail = self.path[a];
            if self.g.incident(tail).any(|(w, _)| !self.in_path[w]) {
                return true;
            }
        }
        false
    }

    /// Grows the path as far as extension, cycle closing and re-opening allow.
    fn grow(&mut self) {
        let n = self.g.n();
        loop {
            self.extend_both();
            if self.path.len() == n {
                return;
            }
            if !self.close() {
                return;
            }
            let a = self.path.len() - 1;
            let tail = self.path[a];
            if let Some(w) = self.g.incident(tail).map(|(w, _)| w).find(|&w| !self.in_path[w]) {
                // Rotation exposed a free neighbour at the tail.
                self.in_path[w] = true;
                self.path.push(w);
                continue;
            }
            if !self.g.has_edge(self.path[0], tail) {
                return;
            }
            // Cycle: open it next to a vertex with a neighbour off the cycle.
            let mut position = vec![usize::MAX; n];
            for (i, &x) in self.path.iter().enumerate() {
                position[x] = i;
            }
            let hook = (0..n).filter(|&w| !self.in_path[w]).find_map(|w| {
                self.g
                    .incident(w)
                    .map(|(x, _)| position[x])
                    .find(|&k| k != usize::MAX)
                    .map(|k| (w, k))
            });
            let Some((w, k)) = hook else { return };
            self.path.rotate_left(k + 1);
            self.in_path[w] = true;
            self.path.push(w);
        }
    }
}

/// Greedy cover of the vertices outside `taken` by paths.
fn cover_rest(g: &ColouredGraph, taken: &mut [bool]) -> Vec<Vec<Vertex>> {
    let mut paths = Vec::new();
    for s in 0..g.n() {
        if taken[s] {
            continue;
        }
        taken[s] = true;
        let mut p = vec![s];
        for _ in 0..2 {
            while let Some(w) = g.incident(*p.last().unwrap()).map(|(w, _)| w).find(|&w| !taken[w]) {
                taken[w] = true;
                p.push(w);
            }
            p.reverse();
        }
        paths.push(p);
    }
    paths
}

/// Joins paths whose endpoints are adjacent until none remain or `t` is reached.
fn join_endpoints(g: &ColouredGraph, paths: &mut Vec<Vec<Vertex>>, t: usize) {
    'outer: while paths.len() > t {
        for i in 0..paths.len() {
            for j in 0..paths.len() {
                if i == j {
                    continue;
                }
                for (ri, rj) in [(false, false), (false, true), (true, false), (true, true)] {
                    let a = if ri { paths[i][0] } else { *paths[i].last().unwrap() };
                    let b = if rj { *paths[j].last().unwrap() } else { paths[j][0] };
                    if g.has_edge(a, b) {
                        let mut pj = paths[j].clone();
                        if rj {
                            pj.reverse();
                        }
                        if ri {
                            paths[i].reverse();
                        }
                        paths[i].extend(pj);
                        paths.remove(j);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
}

/// Exhaustive search for a spanning linear forest with at most `t` paths.
/// Paths are generated with increasing start vertices; gives up after a
/// fixed number of search nodes.
fn exhaustive(g: &ColouredGraph, t: usize) -> Option<Vec<Vec<Vertex>>> {
    struct Search<'a> {
        g: &'a ColouredGraph,
        t: usize,
        used: Vec<bool>,
        paths: Vec<Vec<Vertex>>,
        nodes: usize,
    }
    impl Search<'_> {
        fn open(&mut self, left: usize) -> bool {
            let after = self.paths.last().map_or(0, |p| p[0] + 1);
            if self.paths.len() == self.t {
                return false;
            }
            for s in after..self.g.n() {
                if self.used[s] {
                    continue;
                }
                self.used[s] = true;
                self.paths.push(vec![s]);
                if self.extend(left - 1) {
                    return true;
                }
                self.paths.pop();
                self.used[s] = false;
            }
            false
        }

        fn extend(&mut self, left: usize) -> bool {
            self.nodes += 1;
            if self.nodes > 2_000_000 {
                return false;
            }
            if left == 0 {
                return true;
            }
            let tail = *self.paths.last().unwrap().last().unwrap();
            let nbrs: Vec<Vertex> = self.g.incident(tail).map(|(w, _)| w).filter(|&w| !self.used[w]).collect();
            for w in nbrs {
                self.used[w] = true;
                self.paths.last_mut().unwrap().push(w);
                if self.extend(left - 1) {
                    return true;
                }
                self.paths.last_mut().unwrap().pop();
                self.used[w] = false;
            }
            self.open(left)
        }
    }
    let mut search = Search {
        g,
        t,
        used: vec![false; g.n()],
        paths: Vec::new(),
        nodes: 0,
    };
    search.open(g.n()).then_some(search.paths)
}

/// Splits paths until there are exactly `t`, cutting the longest path at an
/// edge whose colour is repeated in the forest when there is one.
fn split_to(g: &ColouredGraph, paths: &mut Vec<Vec<Vertex>>, t: usize) {
    while paths.len() < t {
        let mut counts = vec![0u32; g.num_colours()];
        for p in paths.iter() {
            for w in p.windows(2) {
                counts[g.edge_colour_index(w[0], w[1]).unwrap()] += 1;
            }
        }
        let (li, _) = paths
            .iter()
            .enumerate()
            .max_by_key(|(i, p)| (p.len(), std::cmp::Reverse(*i)))
            .unwrap();
        let p = &paths[li];
        let cut = (0..p.len() - 1)
            .find(|&k| counts[g.edge_colour_index(p[k], p[k + 1]).unwrap()] >= 2)
            .unwrap_or((p.len() - 1) / 2);
        let rest = paths[li].split_off(cut + 1);
        paths.push(rest);
    }
}

/// A spanning linear forest of `g` with exactly `t` paths: one long path by
/// extension and cycle re-opening, a greedy cover of what is left, endpoint
/// joins, and finally splits down to `t` components.
pub fn initial_forest(g: &ColouredGraph, t: usize) -> Result<LinearForest, ForestError> {
    let n = g.n();
    if t == 0 || t > n {
        return Err(ForestError::BadComponentCount { n, t });
    }
    let start = (0..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).unwrap();
    let mut grower = Grower::new(g, start);
    grower.grow();
    let mut taken = grower.in_path;
    let mut paths = vec![grower.path];
    paths.extend(cover_rest(g, &mut taken));
    join_endpoints(g, &mut paths, t);
    if paths.len() > t {
        let achieved = paths.len();
        match (n <= EXHAUSTIVE_LIMIT).then(|| exhaustive(g, t)).flatten() {
            Some(found) => paths = found,
            None => return Err(ForestError::CannotReachComponentCount { wanted: t, achieved }),
        }
    }
    split_to(g, &mut paths, t);
    paths.sort_by_key(|p| p[0]);
    Ok(LinearForest::from_valid(n, paths))
}
