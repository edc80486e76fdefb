//! Immutable properly edge-coloured graphs.
//!
//! Adjacency is stored in compressed rows. Every half-edge packs the
//! neighbour id (high 32 bits) and a dense colour index (low 32 bits); rows are
//! sorted by neighbour, so edge lookups are binary searches. Colour ids are
//! arbitrary non-negative integers and are mapped onto `0..num_colours()` in
//! ascending order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;

pub type Vertex = usize;
pub type Colour = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop edge at vertex {0}")]
    LoopEdge(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("colouring is not proper: two edges of colour {colour} meet at vertex {vertex}")]
    Proper { vertex: Vertex, colour: Colour },
    #[error("edge {0}-{1} does not cross the bipartition")]
    NotBipartite(Vertex, Vertex),
    #[error("bipartite graph must have an even vertex count, got {0}")]
    UnbalancedBipartition(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("{0}-{1} is not an edge of the host graph")]
    ForeignEdge(Vertex, Vertex),
    #[error("colour {0} is not used by the graph")]
    UnknownColour(Colour),
}

/// Unordered edge, normalised so that `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        if a <= b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }
}

/// Set of colours of one host graph, stored as dense colour indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourSet(BitSet);

impl ColourSet {
    pub fn empty(g: &ColouredGraph) -> Self {
        ColourSet(BitSet::new(g.num_colours()))
    }

    pub fn all(g: &ColouredGraph) -> Self {
        ColourSet(BitSet::full(g.num_colours()))
    }

    pub fn from_colours(g: &ColouredGraph, colours: &[Colour]) -> Result<Self, GraphError> {
        let mut s = Self::empty(g);
        for &c in colours {
            let idx = g.colour_index(c).ok_or(GraphError::UnknownColour(c))?;
            s.0.insert(idx);
        }
        Ok(s)
    }

    #[inline]
    pub fn contains_index(&self, idx: usize) -> bool {
        self.0.contains(idx)
    }

    pub fn insert_index(&mut self, idx: usize) -> bool {
        self.0.insert(idx)
    }

    pub fn remove_index(&mut self, idx: usize) -> bool {
        self.0.remove(idx)
    }

    pub fn contains(&self, g: &ColouredGraph, c: Colour) -> bool {
        g.colour_index(c).is_some_and(|i| self.0.contains(i))
    }

    pub fn len(&self) -> usize {
        self.0.count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter()
    }

    /// Colour ids in ascending order.
    pub fn colours(&self, g: &ColouredGraph) -> Vec<Colour> {
        self.0.iter().map(|i| g.colour_at(i)).collect()
    }

    pub fn union_with(&mut self, other: &ColourSet) {
        self.0.union_with(&other.0);
    }

    pub fn is_subset(&self, other: &ColourSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// `|self \ other|`
    pub fn difference_count(&self, other: &ColourSet) -> usize {
        self.0.difference_count(&other.0)
    }
}

#[inline]
fn pack(nbr: u32, col: u32) -> u64 {
    (u64::from(nbr) << 32) | u64::from(col)
}

#[inline]
fn nbr_of(h: u64) -> usize {
    (h >> 32) as usize
}

#[inline]
fn col_of(h: u64) -> usize {
    (h & 0xffff_ffff) as usize
}

/// A simple graph with a proper edge-colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    n: usize,
    offsets: Vec<usize>,
    adj: Vec<u64>,
    palette: Vec<Colour>,
    class_offsets: Vec<usize>,
    class_edges: Vec<u32>,
    half: Option<usize>,
    edge_count: usize,
}

/// Validated construction from an edge list. See [`ColouredGraph::from_source`].
pub fn build_graph(n: usize, edges: &[(Vertex, Vertex, Colour)]) -> Result<ColouredGraph, GraphError> {
    ColouredGraph::from_edges(n, edges, None)
}

impl ColouredGraph {
    /// Builds a graph from `(u, v, colour)` triples. When `half` is `Some(h)`
    /// the graph is bipartite with parts `0..h` and `h..2h`, and `n` must be `2h`.
    pub fn from_edges(
        n: usize,
        edges: &[(Vertex, Vertex, Colour)],
        half: Option<usize>,
    ) -> Result<Self, GraphError> {
        Self::from_source(n, half, |emit| {
            for &(u, v, c) in edges {
                emit(u, v, c);
            }
        })
    }

    /// Builds a graph from a re-playable edge stream. `source` is invoked twice
    /// (degree count, then fill), which keeps peak memory at one copy of the
    /// adjacency for graphs with tens of millions of edges.
    pub fn from_source<S>(n: usize, half: Option<usize>, source: S) -> Result<Self, GraphError>
    where
        S: Fn(&mut dyn FnMut(Vertex, Vertex, Colour)),
    {
        if let Some(h) = half {
            if n != 2 * h {
                return Err(GraphError::UnbalancedBipartition(n));
            }
        }
        let mut deg = vec![0usize; n];
        let mut first_err: Option<GraphError> = None;
        let mut max_colour: Colour = 0;
        source(&mut |u, v, c| {
            if first_err.is_some() {
                return;
            }
            if u >= n || v >= n {
                first_err = Some(GraphError::VertexOutOfRange { vertex: u.max(v), n });
                return;
            }
            if u == v {
                first_err = Some(GraphError::LoopEdge(u));
                return;
            }
            if let Some(h) = half {
                if (u < h) == (v < h) {
                    first_err = Some(GraphError::NotBipartite(u.min(v), u.max(v)));
                    return;
                }
            }
            deg[u] += 1;
            deg[v] += 1;
            max_colour = max_colour.max(c);
        });
        if let Some(e) = first_err {
            return Err(e);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        drop(deg);
        let total = *offsets.last().unwrap();
        let mut adj = vec![0u64; total];
        let mut cursor: Vec<usize> = offsets[..n].to_vec();
        source(&mut |u, v, c| {
            adj[cursor[u]] = pack(v as u32, c);
            cursor[u] += 1;
            adj[cursor[v]] = pack(u as u32, c);
            cursor[v] += 1;
        });
        drop(cursor);
        for v in 0..n {
            adj[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        for v in 0..n {
            let row = &adj[offsets[v]..offsets[v + 1]];
            for w in row.windows(2) {
                if nbr_of(w[0]) == nbr_of(w[1]) {
                    let x = nbr_of(w[0]);
                    return Err(GraphError::DuplicateEdge(v.min(x), v.max(x)));
                }
            }
        }

        // Dense colour indices.
        let palette: Vec<Colour>;
        if (max_colour as usize) <= (1 << 26) {
            let mut present = BitSet::new(max_colour as usize + 1);
            for &h in &adj {
                present.insert(col_of(h));
            }
            palette = present.iter().map(|c| c as Colour).collect();
            let mut lookup = vec![u32::MAX; max_colour as usize + 1];
            for (i, &c) in palette.iter().enumerate() {
                lookup[c as usize] = i as u32;
            }
            for h in adj.iter_mut() {
                *h = (*h & !0xffff_ffff) | u64::from(lookup[col_of(*h)]);
            }
        } else {
            let mut cols: Vec<Colour> = adj.iter().map(|&h| col_of(h) as Colour).collect();
            cols.sort_unstable();
            cols.dedup();
            palette = cols;
            for h in adj.iter_mut() {
                let idx = palette.binary_search(&(col_of(*h) as Colour)).unwrap();
                *h = (*h & !0xffff_ffff) | idx as u64;
            }
        }

        let mut stamp = vec![usize::MAX; palette.len()];
        for v in 0..n {
            for &h in &adj[offsets[v]..offsets[v + 1]] {
                let c = col_of(h);
                if stamp[c] == v {
                    return Err(GraphError::Proper {
                        vertex: v,
                        colour: palette[c],
                    });
                }
                stamp[c] = v;
            }
        }
        drop(stamp);

        let mut class_count = vec![0usize; palette.len() + 1];
        for v in 0..n {
            for &h in &adj[offsets[v]..offsets[v + 1]] {
                if nbr_of(h) > v {
                    class_count[col_of(h) + 1] += 1;
                }
            }
        }
        for i in 1..class_count.len() {
            class_count[i] += class_count[i - 1];
        }
        let class_offsets = class_count;
        let edge_count = total / 2;
        let mut class_edges = vec![0u32; edge_count];
        let mut cur: Vec<usize> = class_offsets[..palette.len()].to_vec();
        for v in 0..n {
            for (k, &h) in adj[offsets[v]..offsets[v + 1]].iter().enumerate() {
                if nbr_of(h) > v {
                    let c = col_of(h);
                    class_edges[cur[c]] = (offsets[v] + k) as u32;
                    cur[c] += 1;
                }
            }
        }

        Ok(ColouredGraph {
            n,
            offsets,
            adj,
            palette,
            class_offsets,
            class_edges,
            half,
            edge_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Part size of a bipartite graph (`X = 0..h`, `Y = h..2h`).
    pub fn bipartite_half(&self) -> Option<usize> {
        self.half
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn num_colours(&self) -> usize {
        self.palette.len()
    }

    /// All colour ids, ascending; position is the dense colour index.
    pub fn palette(&self) -> &[Colour] {
        &self.palette
    }

    pub fn colour_at(&self, idx: usize) -> Colour {
        self.palette[idx]
    }

    pub fn colour_index(&self, c: Colour) -> Option<usize> {
        self.palette.binary_search(&c).ok()
    }

    fn row(&self, v: Vertex) -> &[u64] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbour, dense colour index)` pairs, ascending by neighbour.
    #[inline]
    pub fn incident(&self, v: Vertex) -> impl ExactSizeIterator<Item = (Vertex, usize)> + '_ {
        self.row(v).iter().map(|&h| (nbr_of(h), col_of(h)))
    }

    /// `k`-th entry of [`incident`](Self::incident).
    #[inline]
    pub fn incident_at(&self, v: Vertex, k: usize) -> (Vertex, usize) {
        let h = self.row(v)[k];
        (nbr_of(h), col_of(h))
    }

    /// `(neighbour, colour id)` pairs, ascending by neighbour.
    pub fn neighbours(&self, v: Vertex) -> impl ExactSizeIterator<Item = (Vertex, Colour)> + '_ {
        self.row(v)
            .iter()
            .map(|&h| (nbr_of(h), self.palette[col_of(h)]))
    }

    fn find(&self, u: Vertex, v: Vertex) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let row = self.row(u);
        let key = (v as u64) << 32;
        let pos = row.partition_point(|&h| h < key);
        (pos < row.len() && nbr_of(row[pos]) == v).then_some(pos)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.find(u, v).is_some()
    }

    #[inline]
    pub fn edge_colour_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.find(u, v).map(|p| col_of(self.row(u)[p]))
    }

    pub fn edge_colour(&self, u: Vertex, v: Vertex) -> Option<Colour> {
        self.edge_colour_index(u, v).map(|i| self.palette[i])
    }

    /// Dense colour index of a host edge; errors on non-edges.
    pub fn colour_index_of(&self, e: Edge) -> Result<usize, GraphError> {
        self.edge_colour_index(e.u, e.v)
            .ok_or(GraphError::ForeignEdge(e.u, e.v))
    }

    fn endpoints_of_half(&self, h: usize) -> Edge {
        let u = self.offsets.partition_point(|&o| o <= h) - 1;
        Edge::new(u, nbr_of(self.adj[h]))
    }

    /// Edges of one colour, by dense index.
    pub fn colour_class_by_index(&self, idx: usize) -> impl Iterator<Item = Edge> + '_ {
        self.class_edges[self.class_offsets[idx]..self.class_offsets[idx + 1]]
            .iter()
            .map(|&h| self.endpoints_of_half(h as usize))
    }

    pub fn colour_class(&self, c: Colour) -> Vec<Edge> {
        match self.colour_index(c) {
            Some(i) => self.colour_class_by_index(i).collect(),
            None => Vec::new(),
        }
    }

    pub fn colour_class_size(&self, idx: usize) -> usize {
        self.class_offsets[idx + 1] - self.class_offsets[idx]
    }

    /// All edges with their colours, ordered by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, Colour)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.row(u)
                .iter()
                .filter(move |&&h| nbr_of(h) > u)
                .map(move |&h| (Edge::new(u, nbr_of(h)), self.palette[col_of(h)]))
        })
    }

    /// `{ u : uv ∈ E, colour(uv) ∈ allowed, u ∈ within }`.
    pub fn coloured_neighbourhood(
        &self,
        v: Vertex,
        allowed: &ColourSet,
        within: Option<&BitSet>,
    ) -> Result<Vec<Vertex>, GraphError> {
        if v >= self.n {
            return Err(GraphError::UnknownVertex(v));
        }
        Ok(self
            .incident(v)
            .filter(|&(u, c)| allowed.contains_index(c) && within.is_none_or(|w| w.contains(u)))
            .map(|(u, _)| u)
            .collect())
    }

    /// Number of distinct colours on `es`, and the colour set itself.
    pub fn distinct_colours(&self, es: &[Edge]) -> Result<(usize, ColourSet), GraphError> {
        let mut set = ColourSet::empty(self);
        for e in es {
            set.insert_index(self.colour_index_of(*e)?);
        }
        Ok((set.len(), set))
    }

    /// Subgraph induced on `keep` (relabelled `0..keep.len()` in the given order)
    /// with colour ids preserved. Returns the graph and the new-to-old map.
    pub fn induced(&self, keep: &[Vertex]) -> (ColouredGraph, Vec<Vertex>) {
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let g = ColouredGraph::from_source(keep.len(), None, |emit| {
            for (i, &v) in keep.iter().enumerate() {
                for (u, c) in self.incident(v) {
                    let j = new_id[u];
                    if j != usize::MAX && j > i {
                        emit(i, j, self.palette[c]);
                    }
                }
            }
        })
        .expect("induced subgraph of a valid graph is valid");
        (g, keep.to_vec())
    }
}

/// Minimum degree `δ(G)`.
pub fn min_degree(g: &ColouredGraph) -> usize {
    g.min_degree()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ColouredGraph {
        build_graph(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 3)]).unwrap()
    }

    #[test]
    fn builds_rainbow_triangle() {
        let g = triangle();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.num_colours(), 3);
        assert_eq!(g.edge_colour(2, 0), Some(3));
        assert_eq!(g.colour_class(2), vec![Edge::new(1, 2)]);
        assert_eq!(g.min_degree(), 2);
    }

    #[test]
    fn rejects_improper_colouring_at_the_shared_vertex() {
        let err = build_graph(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 2)]).unwrap_err();
        assert_eq!(err, GraphError::Proper { vertex: 1, colour: 1 });
    }

    #[test]
    fn rejects_parallel_and_loop_edges() {
        assert_eq!(
            build_graph(2, &[(0, 1, 5), (0, 1, 6)]).unwrap_err(),
            GraphError::DuplicateEdge(0, 1)
        );
        assert_eq!(build_graph(2, &[(1, 1, 5)]).unwrap_err(), GraphError::LoopEdge(1));
        assert!(matches!(
            build_graph(2, &[(0, 2, 5)]).unwrap_err(),
            GraphError::VertexOutOfRange { .. }
        ));
    }

    #[test]
    fn bipartite_tag_is_checked() {
        assert!(ColouredGraph::from_edges(4, &[(0, 2, 1), (1, 3, 1)], Some(2)).is_ok());
        assert_eq!(
            ColouredGraph::from_edges(4, &[(0, 1, 1)], Some(2)).unwrap_err(),
            GraphError::NotBipartite(0, 1)
        );
        assert_eq!(
            ColouredGraph::from_edges(5, &[], Some(2)).unwrap_err(),
            GraphError::UnbalancedBipartition(5)
        );
    }

    #[test]
    fn neighbourhood_by_colour() {
        let g = triangle();
        let allowed = ColourSet::from_colours(&g, &[1, 3]).unwrap();
        assert_eq!(g.coloured_neighbourhood(0, &allowed, None).unwrap(), vec![1, 2]);
        let none = ColourSet::empty(&g);
        assert!(g.coloured_neighbourhood(0, &none, None).unwrap().is_empty());
        let all = ColourSet::all(&g);
        let everyone = BitSet::full(3);
        assert_eq!(g.coloured_neighbourhood(1, &all, Some(&everyone)).unwrap(), vec![0, 2]);
        assert_eq!(
            g.coloured_neighbourhood(7, &all, None).unwrap_err(),
            GraphError::UnknownVertex(7)
        );
    }

    #[test]
    fn distinct_colour_counts() {
        let g = triangle();
        let all: Vec<Edge> = g.edges().map(|(e, _)| e).collect();
        assert_eq!(g.distinct_colours(&all).unwrap().0, 3);
        assert_eq!(g.distinct_colours(&[]).unwrap().0, 0);
        let p = build_graph(4, &[(0, 1, 4), (1, 2, 5), (2, 3, 4)]).unwrap();
        let es = [Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3)];
        assert_eq!(p.distinct_colours(&es).unwrap().0, 2);
        assert_eq!(
            p.distinct_colours(&[Edge::new(0, 3)]).unwrap_err(),
            GraphError::ForeignEdge(0, 3)
        );
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_degree(&triangle()), 2);
        let k22 = ColouredGraph::from_edges(4, &[(0, 2, 1), (0, 3, 2), (1, 2, 2), (1, 3, 1)], Some(2))
            .unwrap();
        assert_eq!(min_degree(&k22), 2);
        let p3 = build_graph(3, &[(0, 1, 1), (1, 2, 2)]).unwrap();
        assert_eq!(min_degree(&p3), 1);
    }

    #[test]
    fn sparse_colour_ids_and_induced_subgraphs() {
        let g = build_graph(4, &[(0, 1, 1_000_000_000), (1, 2, 7), (2, 3, 1_000_000_000)]).unwrap();
        assert_eq!(g.palette(), &[7, 1_000_000_000]);
        let (h, map) = g.induced(&[3, 2, 1]);
        assert_eq!(map, vec![3, 2, 1]);
        assert_eq!(h.edge_colour(0, 1), Some(1_000_000_000));
        assert_eq!(h.edge_colour(1, 2), Some(7));
        assert_eq!(h.edge_count(), 2);
    }
}
