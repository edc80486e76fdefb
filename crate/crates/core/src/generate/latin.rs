use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{rng_from, GenError, RngSeed};
use crate::graph::{ColouredGraph, Edge};

/// `n × n` array of symbols `1..=n`, each once per row and per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u32>,
}

impl LatinSquare {
    /// Validates the Latin property of a row-major symbol array.
    pub fn new(n: usize, cells: Vec<u32>) -> Result<Self, GenError> {
        if cells.len() != n * n {
            return Err(GenError::NotLatin(format!("expected {} cells, got {}", n * n, cells.len())));
        }
        let mut row_seen = vec![usize::MAX; n + 1];
        let mut col_seen = vec![vec![false; n + 1]; n];
        for i in 0..n {
            for j in 0..n {
                let s = cells[i * n + j] as usize;
                if s == 0 || s > n {
                    return Err(GenError::NotLatin(format!("symbol {s} at ({i}, {j}) is outside 1..={n}")));
                }
                if row_seen[s] == i {
                    return Err(GenError::NotLatin(format!("symbol {s} repeats in row {i}")));
                }
                row_seen[s] = i;
                if std::mem::replace(&mut col_seen[j][s], true) {
                    return Err(GenError::NotLatin(format!("symbol {s} repeats in column {j}")));
                }
            }
        }
        Ok(LatinSquare { n, cells })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn cell(&self, i: usize, j: usize) -> u32 {
        self.cells[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.cells[i * self.n..(i + 1) * self.n]
    }
}

/// Availability of each cell of an `n × n` square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMask {
    n: usize,
    bits: Vec<bool>,
}

impl CellMask {
    pub fn full(n: usize) -> Self {
        CellMask {
            n,
            bits: vec![true; n * n],
        }
    }

    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self, GenError> {
        if bits.len() != n * n {
            return Err(GenError::ShapeMismatch {
                square: n,
                mask: (bits.len() as f64).sqrt() as usize,
            });
        }
        Ok(CellMask { n, bits })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn available(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, available: bool) {
        self.bits[i * self.n + j] = available;
    }
}

pub fn gen_latin_cyclic(n: usize) -> LatinSquare {
    let cells = (0..n)
        .flat_map(|i| (0..n).map(move |j| ((i + j) % n) as u32 + 1))
        .collect();
    LatinSquare { n, cells }
}

/// Cyclic square scrambled by `steps` random row swaps and symbol swaps.
pub fn gen_latin_random(n: usize, steps: usize, seed: RngSeed) -> LatinSquare {
    let mut sq = gen_latin_cyclic(n);
    if n < 2 {
        return sq;
    }
    let mut rng = rng_from(seed);
    for _ in 0..steps {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if rng.random_bool(0.5) {
            for j in 0..n {
                sq.cells.swap(a * n + j, b * n + j);
            }
        } else {
            let (sa, sb) = (a as u32 + 1, b as u32 + 1);
            for s in sq.cells.iter_mut() {
                if *s == sa {
                    *s = sb;
                } else if *s == sb {
                    *s = sa;
                }
            }
        }
    }
    sq
}

/// Bipartite graph of a masked Latin square with per-line availability counts.
#[derive(Debug, Clone)]
pub struct LatinGraph {
    /// Rows are `0..n`, column `j` is vertex `n + j`; colour = symbol.
    pub graph: ColouredGraph,
    pub row_available: Vec<usize>,
    pub col_available: Vec<usize>,
}

impl LatinGraph {
    pub fn min_row_available(&self) -> usize {
        self.row_available.iter().copied().min().unwrap_or(0)
    }

    pub fn min_col_available(&self) -> usize {
        self.col_available.iter().copied().min().unwrap_or(0)
    }
}

pub fn latin_to_graph(sq: &LatinSquare, mask: &CellMask) -> Result<LatinGraph, GenError> {
    let n = sq.n;
    if mask.n != n {
        return Err(GenError::ShapeMismatch {
            square: n,
            mask: mask.n,
        });
    }
    let mut row_available = vec![0; n];
    let mut col_available = vec![0; n];
    for i in 0..n {
        for j in 0..n {
            if mask.available(i, j) {
                row_available[i] += 1;
                col_available[j] += 1;
            }
        }
    }
    let graph = ColouredGraph::from_source(2 * n, Some(n), |emit| {
        for i in 0..n {
            for j in 0..n {
                if mask.available(i, j) {
                    emit(i, n + j, sq.cell(i, j));
                }
            }
        }
    })
    .expect("a Latin square gives a proper colouring");
    Ok(LatinGraph {
        graph,
        row_available,
        col_available,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationCell {
    pub row: usize,
    pub col: usize,
    pub symbol: u32,
}

/// Reads a matching of a Latin-square graph back as cells, sorted by row.
pub fn matching_to_permutation(g: &ColouredGraph, m: &[Edge]) -> Result<Vec<PermutationCell>, GenError> {
    let bad = |e: &Edge| GenError::NotFromLatinGraph(e.u, e.v);
    let n = match g.bipartite_half() {
        Some(h) => h,
        None => return m.first().map_or(Ok(Vec::new()), |e| Err(bad(e))),
    };
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; n];
    let mut cells = Vec::with_capacity(m.len());
    for e in m {
        if e.u >= n || e.v < n || e.v >= 2 * n {
            return Err(bad(e));
        }
        let symbol = g.edge_colour(e.u, e.v).ok_or_else(|| bad(e))?;
        let (row, col) = (e.u, e.v - n);
        if std::mem::replace(&mut row_used[row], true) || std::mem::replace(&mut col_used[col], true) {
            return Err(bad(e));
        }
        cells.push(PermutationCell { row, col, symbol });
    }
    cells.sort_by_key(|c| c.row);
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_squares() {
        let l2 = gen_latin_cyclic(2);
        assert_eq!(l2.row(0), &[1, 2]);
        assert_eq!(l2.row(1), &[2, 1]);
        assert_eq!(gen_latin_cyclic(3).row(0), &[1, 2, 3]);
    }

    #[test]
    fn random_square_stays_latin() {
        let sq = gen_latin_random(4, 100, 9);
        assert!(LatinSquare::new(4, sq.cells.clone()).is_ok());
        for n in 1..12 {
            let sq = gen_latin_random(n, 50, n as u64);
            assert!(LatinSquare::new(n, sq.cells.clone()).is_ok());
        }
        assert!(LatinSquare::new(2, vec![1, 2, 1, 2]).is_err());
        assert!(LatinSquare::new(2, vec![1, 1, 2, 2]).is_err());
        assert!(LatinSquare::new(2, vec![1, 3, 3, 1]).is_err());
    }

    #[test]
    fn graph_of_small_squares() {
        let lg = latin_to_graph(&gen_latin_cyclic(2), &CellMask::full(2)).unwrap();
        assert_eq!(lg.graph.edge_count(), 4);
        assert_eq!(lg.graph.palette(), &[1, 2]);
        assert_eq!(lg.graph.edge_colour(0, 2), Some(1));

        let mut mask = CellMask::full(3);
        for j in 0..3 {
            mask.set(0, j, false);
        }
        let lg = latin_to_graph(&gen_latin_cyclic(3), &mask).unwrap();
        assert_eq!(lg.graph.degree(0), 0);
        assert_eq!(lg.min_row_available(), 0);
        assert_eq!(lg.min_col_available(), 2);

        let lg = latin_to_graph(&gen_latin_cyclic(3), &CellMask::full(3)).unwrap();
        assert!((0..6).all(|v| lg.graph.degree(v) == 3));
        assert_eq!(lg.graph.num_colours(), 3);
        assert!(latin_to_graph(&gen_latin_cyclic(3), &CellMask::full(2)).is_err());
    }

    #[test]
    fn permutations_from_matchings() {
        let g = latin_to_graph(&gen_latin_cyclic(2), &CellMask::full(2)).unwrap().graph;
        let diag = matching_to_permutation(&g, &[Edge::new(0, 2), Edge::new(1, 3)]).unwrap();
        assert_eq!(
            diag,
            vec![
                PermutationCell { row: 0, col: 0, symbol: 1 },
                PermutationCell { row: 1, col: 1, symbol: 1 }
            ]
        );
        let anti = matching_to_permutation(&g, &[Edge::new(1, 2), Edge::new(0, 3)]).unwrap();
        assert_eq!(
            anti,
            vec![
                PermutationCell { row: 0, col: 1, symbol: 2 },
                PermutationCell { row: 1, col: 0, symbol: 2 }
            ]
        );
        assert!(matching_to_permutation(&g, &[]).unwrap().is_empty());
        assert_eq!(
            matching_to_permutation(&g, &[Edge::new(0, 1)]).unwrap_err(),
            GenError::NotFromLatinGraph(0, 1)
        );
    }
}
