use super::UncolouredGraph;
use crate::graph::ColouredGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColouringStrategy {
    /// First colour free at both endpoints from a palette of `2Δ − 1`.
    Greedy,
    /// Alternating-path recolouring with a Misra–Gries fan fallback; at most
    /// `Δ + 1` colours.
    #[default]
    FanRecolour,
}

const NONE: u32 = u32::MAX;

/// Partial proper edge-colouring with O(1) colour lookups at every vertex.
struct Colourer {
    palette: usize,
    words: usize,
    used: Vec<u64>,
    // table[v * palette + c] = neighbour joined to v by colour c
    table: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
}

impl Colourer {
    fn new(n: usize, palette: usize) -> Self {
        let words = palette.div_ceil(64).max(1);
        Colourer {
            palette,
            words,
            used: vec![0; n * words],
            table: vec![NONE; n * palette],
            mark: vec![0; n],
            epoch: 0,
        }
    }

    #[inline]
    fn is_used(&self, v: usize, c: usize) -> bool {
        self.used[v * self.words + (c >> 6)] >> (c & 63) & 1 == 1
    }

    #[inline]
    fn via(&self, v: usize, c: usize) -> Option<usize> {
        let y = self.table[v * self.palette + c];
        (y != NONE).then_some(y as usize)
    }

    fn assign(&mut self, u: usize, v: usize, c: usize) {
        debug_assert!(!self.is_used(u, c) && !self.is_used(v, c));
        for (a, b) in [(u, v), (v, u)] {
            self.used[a * self.words + (c >> 6)] |= 1 << (c & 63);
            self.table[a * self.palette + c] = b as u32;
        }
    }

    fn unassign(&mut self, u: usize, v: usize, c: usize) {
        for a in [u, v] {
            self.used[a * self.words + (c >> 6)] &= !(1 << (c & 63));
            self.table[a * self.palette + c] = NONE;
        }
    }

    fn first_free_where(&self, f: impl Fn(usize) -> u64) -> Option<usize> {
        for w in 0..self.words {
            let occupied = f(w);
            if occupied != !0 {
                let c = w * 64 + occupied.trailing_ones() as usize;
                return (c < self.palette).then_some(c);
            }
        }
        None
    }

    fn free(&self, v: usize) -> Option<usize> {
        self.first_free_where(|w| self.used[v * self.words + w])
    }

    fn common_free(&self, a: usize, b: usize) -> Option<usize> {
        self.first_free_where(|w| self.used[a * self.words + w] | self.used[b * self.words + w])
    }

    /// Shifts colours down the fan: `x f[i]` takes the colour of `x f[i+1]`
    /// for `i < w`, leaving `x f[w]` uncoloured.
    fn rotate(&mut self, x: usize, fan: &[(usize, usize)], w: usize) {
        for &(y, col) in &fan[1..=w] {
            self.unassign(x, y, col);
        }
        for i in 0..w {
            self.assign(x, fan[i].0, fan[i + 1].1);
        }
    }

    /// Swaps colours `c` and `d` along the maximal `d/c` path from `x`.
    fn invert_path(&mut self, x: usize, c: usize, d: usize) {
        let mut path = Vec::new();
        let (mut cur, mut col) = (x, d);
        while let Some(y) = self.via(cur, col) {
            path.push((cur, y, col));
            cur = y;
            col = if col == d { c } else { d };
        }
        for &(a, b, col) in &path {
            self.unassign(a, b, col);
        }
        for &(a, b, col) in &path {
            self.assign(a, b, if col == d { c } else { d });
        }
    }

    fn colour_greedy(&mut self, x: usize, y: usize) {
        let c = self
            .common_free(x, y)
            .expect("palette of 2Δ-1 colours always leaves a common free colour");
        self.assign(x, y, c);
    }

    /// Frees colour `a` (free at `x`) at `v0` by swapping `a`/`b` on the
    /// alternating path from `v0`, unless that path ends at `x`. Never fails
    /// in a bipartite graph.
    fn try_alternating_path(&mut self, x: usize, v0: usize) -> bool {
        let a = self.free(x).expect("Δ+1 colours leave one free at x");
        let b = self.free(v0).expect("Δ+1 colours leave one free at v0");
        let mut path = Vec::new();
        let (mut cur, mut col) = (v0, a);
        while let Some(y) = self.via(cur, col) {
            if y == x {
                return false;
            }
            path.push((cur, y, col));
            cur = y;
            col = if col == a { b } else { a };
        }
        for &(p, q, col) in &path {
            self.unassign(p, q, col);
        }
        for &(p, q, col) in &path {
            self.assign(p, q, if col == a { b } else { a });
        }
        self.assign(x, v0, a);
        true
    }

    fn colour_misra_gries(&mut self, x: usize, v0: usize) {
        if let Some(c) = self.common_free(x, v0) {
            self.assign(x, v0, c);
            return;
        }
        if self.try_alternating_path(x, v0) {
            return;
        }
        self.epoch += 1;
        let epoch = self.epoch;
        self.mark[v0] = epoch;
        // (vertex, colour of its edge to x); the first edge is uncoloured.
        let mut fan: Vec<(usize, usize)> = vec![(v0, usize::MAX)];
        loop {
            let last = fan.last().unwrap().0;
            if fan.len() > 1 {
                if let Some(d) = self.common_free(x, last) {
                    self.rotate(x, &fan, fan.len() - 1);
                    self.assign(x, last, d);
                    return;
                }
            }
            let mut next = None;
            'search: for w in 0..self.words {
                let mut bits = self.used[x * self.words + w] & !self.used[last * self.words + w];
                while bits != 0 {
                    let col = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let y = self.via(x, col).unwrap();
                    if self.mark[y] != epoch {
                        next = Some((y, col));
                        break 'search;
                    }
                }
            }
            match next {
                Some((y, col)) => {
                    self.mark[y] = epoch;
                    fan.push((y, col));
                }
                None => break,
            }
        }
        let c = self.free(x).expect("Δ+1 colours leave one free at x");
        let last = fan.last().unwrap().0;
        let d = self.free(last).expect("Δ+1 colours leave one free at the fan tip");
        self.invert_path(x, c, d);
        for entry in fan.iter_mut() {
            if entry.1 == d {
                entry.1 = c;
            }
        }
        let mut target = None;
        for i in 0..fan.len() {
            if i >= 1 && self.is_used(fan[i - 1].0, fan[i].1) {
                break;
            }
            if !self.is_used(fan[i].0, d) {
                target = Some(i);
                break;
            }
        }
        let w = target.expect("an inverted cd-path leaves a valid fan prefix");
        self.rotate(x, &fan, w);
        self.assign(x, fan[w].0, d);
    }
}

/// Proper edge-colouring of `g` with colour ids starting at 1.
pub fn edge_colour_proper(g: &UncolouredGraph, strategy: ColouringStrategy) -> ColouredGraph {
    let n = g.n;
    let delta = g.max_degree();
    let palette = match strategy {
        ColouringStrategy::Greedy => (2 * delta).saturating_sub(1).max(1),
        ColouringStrategy::FanRecolour => delta + 1,
    };
    let mut col = Colourer::new(n, palette);
    for u in 0..n {
        for &v in &g.adj[u] {
            let v = v as usize;
            if v > u {
                match strategy {
                    ColouringStrategy::Greedy => col.colour_greedy(u, v),
                    ColouringStrategy::FanRecolour => col.colour_misra_gries(u, v),
                }
            }
        }
    }
    ColouredGraph::from_source(n, g.half, |emit| {
        for u in 0..n {
            let row = &col.table[u * palette..(u + 1) * palette];
            for (c, &y) in row.iter().enumerate() {
                if y != NONE && y as usize > u {
                    emit(u, y as usize, c as u32 + 1);
                }
            }
        }
    })
    .expect("colourer produces a proper colouring")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_graph(n: usize, p: f64, seed: u64) -> UncolouredGraph {
        use rand::Rng;
        let mut rng = super::super::rng_from(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        UncolouredGraph::from_edges(n, None, &edges)
    }

    #[test]
    fn petersen_uses_four_colours_at_most() {
        let outer: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let spokes: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 5)).collect();
        let inner: Vec<(usize, usize)> = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5)).collect();
        let edges: Vec<_> = outer.into_iter().chain(spokes).chain(inner).collect();
        let g = UncolouredGraph::from_edges(10, None, &edges);
        let cg = edge_colour_proper(&g, ColouringStrategy::FanRecolour);
        assert_eq!(cg.edge_count(), 15);
        assert!(cg.num_colours() <= 4);
    }

    #[test]
    fn complete_graphs() {
        for n in 2..14 {
            let g = UncolouredGraph::complete(n);
            let cg = edge_colour_proper(&g, ColouringStrategy::FanRecolour);
            assert_eq!(cg.edge_count(), n * (n - 1) / 2);
            assert!(cg.num_colours() <= n);
            let gg = edge_colour_proper(&g, ColouringStrategy::Greedy);
            assert!(gg.num_colours() <= (2 * n - 3).max(1));
        }
    }

    proptest! {
        #[test]
        fn fan_recolour_is_proper_with_delta_plus_one(n in 1usize..40, p in 0.05f64..1.0, seed in any::<u64>()) {
            let g = random_graph(n, p, seed);
            // ColouredGraph construction rejects improper colourings.
            let cg = edge_colour_proper(&g, ColouringStrategy::FanRecolour);
            prop_assert_eq!(cg.edge_count(), g.edge_count());
            prop_assert!(cg.palette().iter().all(|&c| c >= 1 && c as usize <= g.max_degree() + 1));
            for u in 0..n {
                for &v in &g.adj[u] {
                    prop_assert!(cg.has_edge(u, v as usize));
                }
            }
        }

        #[test]
        fn greedy_is_proper(n in 1usize..30, p in 0.05f64..1.0, seed in any::<u64>()) {
            let g = random_graph(n, p, seed);
            let cg = edge_colour_proper(&g, ColouringStrategy::Greedy);
            prop_assert_eq!(cg.edge_count(), g.edge_count());
            prop_assert!(cg.num_colours() <= (2 * g.max_degree()).max(1));
        }
    }
}
