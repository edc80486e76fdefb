//! Plain-text formats: coloured edge lists, Latin squares, masks, forests,
//! cycles, matchings and permutations. All are ASCII decimal, space separated.

use std::fmt::Write as _;

use thiserror::Error;

use crate::generate::{CellMask, GenError, LatinSquare, PermutationCell};
use crate::graph::{ColouredGraph, Edge, GraphError, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

fn perr(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-blank lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn numbers<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>, FormatError> {
    s.split_whitespace()
        .map(|tok| tok.parse::<T>().map_err(|_| perr(line, format!("not a number: {tok:?}"))))
        .collect()
}

/// Header `n m [bipartite]`; `n` counts all vertices, so a bipartite graph
/// has parts `0..n/2` and `n/2..n`.
pub fn parse_graph(text: &str) -> Result<ColouredGraph, FormatError> {
    let mut it = lines(text);
    let (ln, header) = it.next().ok_or_else(|| perr(1, "missing header"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let bipartite = match parts.len() {
        2 => false,
        3 if parts[2] == "bipartite" => true,
        _ => return Err(perr(ln, "header must be `n m [bipartite]`")),
    };
    let n: usize = parts[0].parse().map_err(|_| perr(ln, "bad vertex count"))?;
    let m: usize = parts[1].parse().map_err(|_| perr(ln, "bad edge count"))?;
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in it {
        let v: Vec<u64> = numbers(ln, l)?;
        if v.len() != 3 {
            return Err(perr(ln, "expected `u v colour`"));
        }
        if v[2] > u32::MAX as u64 {
            return Err(perr(ln, "colour out of range"));
        }
        edges.push((v[0] as usize, v[1] as usize, v[2] as u32));
    }
    if edges.len() != m {
        return Err(perr(0, format!("header promises {m} edges, found {}", edges.len())));
    }
    let half = if bipartite {
        if !n.is_multiple_of(2) {
            return Err(GraphError::UnbalancedBipartition(n).into());
        }
        Some(n / 2)
    } else {
        None
    };
    Ok(ColouredGraph::from_edges(n, &edges, half)?)
}

pub fn write_graph(g: &ColouredGraph) -> String {
    let mut s = String::with_capacity(g.edge_count() * 16 + 32);
    let _ = write!(s, "{} {}", g.n(), g.edge_count());
    if g.bipartite_half().is_some() {
        s.push_str(" bipartite");
    }
    s.push('\n');
    for (e, c) in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u, e.v, c);
    }
    s
}

pub fn parse_latin(text: &str) -> Result<LatinSquare, FormatError> {
    let mut it = lines(text);
    let (ln, header) = it.next().ok_or_else(|| perr(1, "missing order"))?;
    let n: usize = header.parse().map_err(|_| perr(ln, "bad order"))?;
    let mut cells = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (ln, l) in it {
        let row: Vec<u32> = numbers(ln, l)?;
        if row.len() != n {
            return Err(perr(ln, format!("expected {n} symbols, found {}", row.len())));
        }
        cells.extend(row);
        rows += 1;
    }
    if rows != n {
        return Err(perr(0, format!("expected {n} rows, found {rows}")));
    }
    Ok(LatinSquare::new(n, cells)?)
}

pub fn write_latin(sq: &LatinSquare) -> String {
    let n = sq.order();
    let mut s = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = sq.row(i).iter().map(u32::to_string).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_mask(text: &str) -> Result<CellMask, FormatError> {
    let rows: Vec<(usize, &str)> = lines(text).collect();
    let n = rows.len();
    let mut bits = Vec::with_capacity(n * n);
    for (ln, l) in rows {
        if l.chars().count() != n {
            return Err(perr(ln, format!("expected {n} cells")));
        }
        for ch in l.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(perr(ln, format!("unexpected character {ch:?}"))),
            }
        }
    }
    Ok(CellMask::new(n, bits)?)
}

pub fn write_mask(mask: &CellMask) -> String {
    let n = mask.order();
    let mut s = String::with_capacity(n * (n + 1));
    for i in 0..n {
        for j in 0..n {
            s.push(if mask.available(i, j) { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

/// Line 1 `t`, then one path per line (first endpoint first).
pub fn parse_forest(text: &str) -> Result<Vec<Vec<Vertex>>, FormatError> {
    let mut it = lines(text);
    let (ln, header) = it.next().ok_or_else(|| perr(1, "missing path count"))?;
    let t: usize = header.parse().map_err(|_| perr(ln, "bad path count"))?;
    let paths = it
        .map(|(ln, l)| numbers::<usize>(ln, l))
        .collect::<Result<Vec<_>, _>>()?;
    if paths.len() != t {
        return Err(perr(0, format!("expected {t} paths, found {}", paths.len())));
    }
    Ok(paths)
}

pub fn write_forest(paths: &[Vec<Vertex>]) -> String {
    let mut s = format!("{}\n", paths.len());
    for p in paths {
        s.push_str(&join(p));
        s.push('\n');
    }
    s
}

fn join(vs: &[Vertex]) -> String {
    vs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn parse_cycle(text: &str) -> Result<Vec<Vertex>, FormatError> {
    let mut out = Vec::new();
    for (ln, l) in lines(text) {
        out.extend(numbers::<usize>(ln, l)?);
    }
    Ok(out)
}

pub fn write_cycle(cycle: &[Vertex]) -> String {
    format!("{}\n", join(cycle))
}

pub fn parse_matching(text: &str) -> Result<Vec<Edge>, FormatError> {
    lines(text)
        .map(|(ln, l)| {
            let v: Vec<usize> = numbers(ln, l)?;
            match v[..] {
                [a, b] => Ok(Edge::new(a, b)),
                _ => Err(perr(ln, "expected `u v`")),
            }
        })
        .collect()
}

pub fn write_matching(m: &[Edge]) -> String {
    let mut s = String::with_capacity(m.len() * 12);
    for e in m {
        let _ = writeln!(s, "{} {}", e.u, e.v);
    }
    s
}

pub fn write_permutation(cells: &[PermutationCell]) -> String {
    let mut s = String::with_capacity(cells.len() * 16);
    for c in cells {
        let _ = writeln!(s, "{} {} {}", c.row, c.col, c.symbol);
    }
    s
}

pub fn parse_permutation(text: &str) -> Result<Vec<PermutationCell>, FormatError> {
    lines(text)
        .map(|(ln, l)| {
            let v: Vec<u64> = numbers(ln, l)?;
            match v[..] {
                [row, col, symbol] if symbol <= u32::MAX as u64 => Ok(PermutationCell {
                    row: row as usize,
                    col: col as usize,
                    symbol: symbol as u32,
                }),
                _ => Err(perr(ln, "expected `row col symbol`")),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_latin_random, CellMask};
    use crate::graph::build_graph;

    #[test]
    fn graph_round_trip() {
        let g = build_graph(4, &[(0, 1, 7), (1, 2, 3), (2, 3, 7), (0, 3, 100)]).unwrap();
        let text = write_graph(&g);
        assert_eq!(text, "4 4\n0 1 7\n0 3 100\n1 2 3\n2 3 7\n");
        assert_eq!(parse_graph(&text).unwrap(), g);

        let b = ColouredGraph::from_edges(4, &[(0, 2, 1), (1, 3, 1)], Some(2)).unwrap();
        let text = write_graph(&b);
        assert!(text.starts_with("4 2 bipartite\n"));
        assert_eq!(parse_graph(&text).unwrap(), b);
    }

    #[test]
    fn graph_parse_errors() {
        assert_eq!(
            parse_graph("3 3\n0 1 1\n1 2 1\n0 2 2\n").unwrap_err(),
            FormatError::Graph(GraphError::Proper { vertex: 1, colour: 1 })
        );
        assert!(matches!(parse_graph("2 1\n0 x 1\n"), Err(FormatError::Parse { line: 2, .. })));
        assert!(parse_graph("2 2\n0 1 1\n").is_err());
        assert!(parse_graph("").is_err());
    }

    #[test]
    fn latin_and_mask_round_trip() {
        let sq = gen_latin_random(5, 40, 3);
        assert_eq!(parse_latin(&write_latin(&sq)).unwrap(), sq);
        let mut mask = CellMask::full(3);
        mask.set(1, 2, false);
        let text = write_mask(&mask);
        assert_eq!(text, "111\n110\n111\n");
        assert_eq!(parse_mask(&text).unwrap(), mask);
        assert!(parse_latin("2\n1 2\n1 2\n").is_err());
        assert!(parse_mask("10\n1\n").is_err());
    }

    #[test]
    fn structure_formats() {
        let paths = vec![vec![0, 1, 2], vec![3]];
        let text = write_forest(&paths);
        assert_eq!(text, "2\n0 1 2\n3\n");
        assert_eq!(parse_forest(&text).unwrap(), paths);
        assert_eq!(parse_cycle(&write_cycle(&[2, 0, 1])).unwrap(), vec![2, 0, 1]);
        let m = vec![Edge::new(0, 3), Edge::new(1, 2)];
        assert_eq!(parse_matching(&write_matching(&m)).unwrap(), m);
        let cells = vec![PermutationCell { row: 0, col: 1, symbol: 2 }];
        assert_eq!(write_permutation(&cells), "0 1 2\n");
        assert_eq!(parse_permutation("0 1 2\n").unwrap(), cells);
    }
}
