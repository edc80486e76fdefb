use rand::seq::SliceRandom;
use rand::Rng;

use super::{check_dirac_fraction, rng_from, GenError, RngSeed, UncolouredGraph};
use crate::ratio::Ratio;

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct DiracOptions {
    /// Edge density (fraction of all vertex pairs) at which deletion stops.
    /// `None` means `1.15 · c`.
    pub density: Option<f64>,
}


/// Dense adjacency matrix used while thinning the complete graph.
struct BitMatrix {
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn full(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        let mut bits = vec![!0u64; rows * words_per_row];
        let extra = words_per_row * 64 - cols;
        if extra > 0 {
            for r in 0..rows {
                bits[r * words_per_row + words_per_row - 1] &= !0u64 >> extra;
            }
        }
        BitMatrix {
            cols,
            words_per_row,
            bits,
        }
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words_per_row + (c >> 6)] >> (c & 63) & 1 == 1
    }

    #[inline]
    fn clear(&mut self, r: usize, c: usize) {
        self.bits[r * self.words_per_row + (c >> 6)] &= !(1u64 << (c & 63));
    }

    fn row(&self, r: usize) -> Vec<u32> {
        let mut out = Vec::new();
        let base = r * self.words_per_row;
        for w in 0..self.words_per_row {
            let mut bits = self.bits[base + w];
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let c = w * 64 + b;
                if c < self.cols {
                    out.push(c as u32);
                }
            }
        }
        out
    }
}

fn target_edges(total_pairs: usize, c: Ratio, opts: &DiracOptions) -> usize {
    let density = opts.density.unwrap_or(1.15 * c.to_f64());
    if density >= 1.0 {
        total_pairs
    } else {
        (density.max(0.0) * total_pairs as f64).ceil() as usize
    }
}

/// Thins the full pair set `rows × cols` by deleting uniformly random edges,
/// never letting a degree drop below `floor`. A `symmetric` matrix is the
/// adjacency of a simple graph on `rows` vertices.
fn thin(
    rows: usize,
    cols: usize,
    symmetric: bool,
    floor: usize,
    target: usize,
    seed: RngSeed,
) -> (BitMatrix, Vec<usize>, Vec<usize>) {
    let mut rng = rng_from(seed);
    let mut m = BitMatrix::full(rows, cols);
    let mut row_deg = vec![cols; rows];
    let mut col_deg = vec![rows; cols];
    let mut edges = rows * cols;
    if symmetric {
        for v in 0..rows {
            m.clear(v, v);
        }
        row_deg.iter_mut().for_each(|d| *d -= 1);
        col_deg.iter_mut().for_each(|d| *d -= 1);
        edges = rows * (rows - 1) / 2;
    }
    let deletable = |m: &BitMatrix, rd: &[usize], cd: &[usize], r: usize, c: usize| {
        m.get(r, c) && rd[r] > floor && cd[c] > floor
    };
    let delete = |m: &mut BitMatrix, rd: &mut [usize], cd: &mut [usize], r: usize, c: usize| {
        m.clear(r, c);
        rd[r] -= 1;
        cd[c] -= 1;
        if symmetric {
            m.clear(c, r);
            rd[c] -= 1;
            cd[r] -= 1;
        }
    };

    let fail_budget = 64 * (rows + cols) + 1024;
    let mut fails = 0usize;
    while edges > target && fails < fail_budget {
        let r = rng.random_range(0..rows);
        let c = rng.random_range(0..cols);
        if (!symmetric || r != c) && deletable(&m, &row_deg, &col_deg, r, c) {
            delete(&mut m, &mut row_deg, &mut col_deg, r, c);
            edges -= 1;
            fails = 0;
        } else {
            fails += 1;
        }
    }
    if edges > target {
        // Sampling stalled: finish with one pass over the remaining edges in random order.
        let mut rest: Vec<(u32, u32)> = Vec::new();
        for r in 0..rows {
            for c in m.row(r) {
                if !symmetric || (c as usize) > r {
                    rest.push((r as u32, c));
                }
            }
        }
        rest.shuffle(&mut rng);
        for (r, c) in rest {
            if edges <= target {
                break;
            }
            let (r, c) = (r as usize, c as usize);
            if deletable(&m, &row_deg, &col_deg, r, c) {
                delete(&mut m, &mut row_deg, &mut col_deg, r, c);
                edges -= 1;
            }
        }
    }
    (m, row_deg, col_deg)
}

/// Degree floor `min(⌈cn⌉, n − 1)`; `c = 1` denotes the complete graph.
fn degree_floor(n: usize, c: Ratio) -> Result<usize, GenError> {
    check_dirac_fraction(c)?;
    let k = c.ceil_mul(n) as usize;
    if n < 2 {
        return Err(GenError::InfeasibleParams(format!("n = {n} is too small")));
    }
    if k > n - 1 && c != Ratio::one() {
        return Err(GenError::InfeasibleParams(format!(
            "⌈cn⌉ = {k} exceeds n − 1 = {}",
            n - 1
        )));
    }
    Ok(k.min(n - 1))
}

/// An `n`-vertex graph with minimum degree at least `min(⌈cn⌉, n − 1)`,
/// obtained from `K_n` by deleting random edges until the target density is
/// reached or no edge can be deleted.
pub fn gen_dirac_graph(
    n: usize,
    c: Ratio,
    seed: RngSeed,
    opts: DiracOptions,
) -> Result<UncolouredGraph, GenError> {
    let floor = degree_floor(n, c)?;
    let target = target_edges(n * (n - 1) / 2, c, &opts);
    let (m, _, _) = thin(n, n, true, floor, target, seed);
    let adj = (0..n).map(|r| m.row(r)).collect();
    Ok(UncolouredGraph { n, half: None, adj })
}

/// Balanced bipartite analogue on `2n` vertices (`X = 0..n`, `Y = n..2n`)
/// with minimum degree at least `⌈cn⌉`, thinned from `K_{n,n}`.
pub fn gen_dirac_bipartite(
    n: usize,
    c: Ratio,
    seed: RngSeed,
    opts: DiracOptions,
) -> Result<UncolouredGraph, GenError> {
    check_dirac_fraction(c)?;
    if n == 0 {
        return Err(GenError::InfeasibleParams("n = 0".into()));
    }
    let floor = c.ceil_mul(n) as usize;
    let target = target_edges(n * n, c, &opts);
    let (m, _, _) = thin(n, n, false, floor, target, seed);
    let mut adj: Vec<Vec<u32>> = (0..n)
        .map(|r| m.row(r).into_iter().map(|y| y + n as u32).collect())
        .collect();
    let mut y_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (x, row) in adj.iter().enumerate() {
        for &y in row {
            y_rows[y as usize - n].push(x as u32);
        }
    }
    adj.extend(y_rows);
    Ok(UncolouredGraph {
        n: 2 * n,
        half: Some(n),
        adj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Ratio {
        s.parse().unwrap()
    }

    #[test]
    fn tiny_complete_cases() {
        let g = gen_dirac_graph(4, r("1"), 0, DiracOptions::default()).unwrap();
        assert_eq!(g.edge_count(), 6);
        let g = gen_dirac_graph(10, r("9/10"), 3, DiracOptions::default()).unwrap();
        assert_eq!(g.edge_count(), 45);
    }

    #[test]
    fn respects_degree_floor() {
        let g = gen_dirac_graph(100, r("3/5"), 7, DiracOptions::default()).unwrap();
        assert!(g.min_degree() >= 60);
        assert!(g.edge_count() < 4950);
        let g = gen_dirac_graph(60, r("3/5"), 1, DiracOptions { density: Some(0.0) }).unwrap();
        assert!(g.min_degree() >= 36);
        let b = gen_dirac_bipartite(50, r("3/5"), 2, DiracOptions::default()).unwrap();
        assert!(b.min_degree() >= 30);
        for x in 0..50 {
            assert!(b.adj[x].iter().all(|&y| y >= 50));
        }
    }

    #[test]
    fn rejects_bad_fractions() {
        assert!(gen_dirac_graph(10, r("1/2"), 0, DiracOptions::default()).is_err());
        assert!(gen_dirac_graph(4, r("9/10"), 0, DiracOptions::default()).is_err());
    }

    #[test]
    fn deterministic() {
        let a = gen_dirac_graph(80, r("2/3"), 11, DiracOptions::default()).unwrap();
        let b = gen_dirac_graph(80, r("2/3"), 11, DiracOptions::default()).unwrap();
        let c = gen_dirac_graph(80, r("2/3"), 12, DiracOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
