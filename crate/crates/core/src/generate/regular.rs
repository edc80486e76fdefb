use rand::seq::SliceRandom;

use super::{check_dirac_fraction, edge_colour_proper, rng_from, ColouringStrategy, GenError, RngSeed, UncolouredGraph};
use crate::graph::ColouredGraph;
use crate::ratio::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularVariant {
    General,
    Bipartite,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Round-robin one-factorisation of `K_n` (`n` even): `n − 1` colours.
fn complete_factorised(n: usize) -> ColouredGraph {
    let m = n - 1;
    ColouredGraph::from_source(n, None, |emit| {
        for r in 0..m {
            emit(r, m, r as u32 + 1);
            for i in 1..n / 2 {
                emit((r + i) % m, (r + m - i) % m, r as u32 + 1);
            }
        }
    })
    .expect("round-robin schedule is a proper colouring")
}

/// `⌈cn⌉`-regular graph on `n` vertices whose colouring uses few colours.
///
/// * `General` (`n` even): circulant graph on `Z_n`. Each offset `s` with
///   `n / gcd(n, s)` even splits into two perfect matchings; offset `n/2` is
///   one matching. The result is `k`-regular with exactly `k` colours, except
///   when too few such offsets exist, in which case the circulant is recoloured
///   with at most `k + 1` colours.
/// * `Bipartite`: `X = 0..n`, `Y = n..2n`; `k` symbol classes of a randomly
///   permuted cyclic Latin square, one colour per symbol.
pub fn gen_few_colour_regular(
    n: usize,
    c: Ratio,
    seed: RngSeed,
    variant: RegularVariant,
) -> Result<ColouredGraph, GenError> {
    check_dirac_fraction(c)?;
    let mut rng = rng_from(seed);
    match variant {
        RegularVariant::Bipartite => {
            if n == 0 {
                return Err(GenError::InfeasibleParams("n = 0".into()));
            }
            let k = c.ceil_mul(n) as usize;
            let mut rows: Vec<usize> = (0..n).collect();
            let mut cols: Vec<usize> = (0..n).collect();
            let mut symbols: Vec<usize> = (0..n).collect();
            rows.shuffle(&mut rng);
            cols.shuffle(&mut rng);
            symbols.shuffle(&mut rng);
            // colour_of[symbol] = 1..=k for the kept symbols, 0 otherwise
            let mut colour_of = vec![0u32; n];
            for (i, &s) in symbols[..k].iter().enumerate() {
                colour_of[s] = i as u32 + 1;
            }
            Ok(ColouredGraph::from_source(2 * n, Some(n), |emit| {
                for x in 0..n {
                    for y in 0..n {
                        let col = colour_of[(rows[x] + cols[y]) % n];
                        if col != 0 {
                            emit(x, n + y, col);
                        }
                    }
                }
            })
            .expect("Latin square classes are matchings"))
        }
        RegularVariant::General => {
            if !n.is_multiple_of(2) {
                return Err(GenError::ParityError(n));
            }
            let k = c.ceil_mul(n) as usize;
            if k > n - 1 && c != Ratio::one() {
                return Err(GenError::InfeasibleParams(format!("⌈cn⌉ = {k} exceeds n − 1")));
            }
            let k = k.min(n - 1);
            if k == n - 1 {
                return Ok(complete_factorised(n));
            }
            let with_half = k % 2 == 1;
            let need = k / 2;
            let mut even_cycle: Vec<usize> = (1..n / 2).filter(|&s| (n / gcd(n, s)).is_multiple_of(2)).collect();
            if even_cycle.len() >= need {
                even_cycle.shuffle(&mut rng);
                let mut offsets = even_cycle[..need].to_vec();
                offsets.sort_unstable();
                return Ok(ColouredGraph::from_source(n, None, |emit| {
                    let mut colour = 0u32;
                    for &s in &offsets {
                        let g = gcd(n, s);
                        let len = n / g;
                        for r in 0..g {
                            for j in 0..len {
                                let a = (r + j * s) % n;
                                let b = (a + s) % n;
                                emit(a, b, colour + 1 + (j % 2) as u32);
                            }
                        }
                        colour += 2;
                    }
                    if with_half {
                        for a in 0..n / 2 {
                            emit(a, a + n / 2, colour + 1);
                        }
                    }
                })
                .expect("even circulant cycles alternate two colours"));
            }
            let mut all: Vec<usize> = (1..n / 2).collect();
            all.shuffle(&mut rng);
            let mut edges = Vec::with_capacity(n * k / 2);
            for &s in &all[..need] {
                for a in 0..n {
                    edges.push((a, (a + s) % n));
                }
            }
            if with_half {
                for a in 0..n / 2 {
                    edges.push((a, a + n / 2));
                }
            }
            let g = UncolouredGraph::from_edges(n, None, &edges);
            Ok(edge_colour_proper(&g, ColouringStrategy::FanRecolour))
        }
    }
}
