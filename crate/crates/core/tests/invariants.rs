use std::collections::HashSet;

use chroma_span::forest::{maximise_forest_colours, SolverConfig};
use chroma_span::generate::{
    edge_colour_proper, gen_dirac_bipartite, gen_dirac_graph, gen_latin_random, CellMask, ColouringStrategy,
    DiracOptions,
};
use chroma_span::harness::{verify_report, write_report, Problem, ReportRow};
use chroma_span::io;
use chroma_span::matching::{complete_to_perfect, latin_colourful_permutation, maximise_matching_colours, MatchingSolverConfig};
use chroma_span::oracle::{max_colour_forest_exact, max_colour_matching_exact, OracleBudget};
use chroma_span::validate::{validate_linear_forest, validate_matching};
use chroma_span::{ColouredGraph, Edge, Ratio};
use proptest::prelude::*;

fn fraction() -> impl Strategy<Value = Ratio> {
    prop::sample::select(vec!["3/5", "2/3", "3/4", "4/5", "1"]).prop_map(|s| s.parse().unwrap())
}

fn strategy() -> impl Strategy<Value = ColouringStrategy> {
    prop::sample::select(vec![ColouringStrategy::Greedy, ColouringStrategy::FanRecolour])
}

fn dirac(n: usize, c: Ratio, seed: u64, s: ColouringStrategy) -> Option<ColouredGraph> {
    gen_dirac_graph(n, c, seed, DiracOptions::default()).ok().map(|u| edge_colour_proper(&u, s))
}

fn bipartite(n: usize, c: Ratio, seed: u64, s: ColouringStrategy) -> ColouredGraph {
    edge_colour_proper(&gen_dirac_bipartite(n, c, seed, DiracOptions::default()).unwrap(), s)
}

fn strictly_increasing(h: &[usize]) -> bool {
    h.windows(2).all(|w| w[1] > w[0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forest_runs_are_valid_and_monotone(n in 6usize..60, c in fraction(), t in 1usize..6, seed: u64, s in strategy()) {
        let Some(g) = dirac(n, c, seed, s) else { return Ok(()) };
        let t = t.min(n);
        let delta = Ratio::new(4, chroma_span::ratio::ceil_sqrt(n) as i64).unwrap();
        let run = maximise_forest_colours(&g, c, t, delta, &SolverConfig::default()).unwrap();
        validate_linear_forest(&g, run.forest.paths(), t).unwrap();
        prop_assert!(strictly_increasing(&run.history));
        prop_assert_eq!(*run.history.last().unwrap(), run.certificate.achieved);
        prop_assert_eq!(run.forest.distinct_colours(&g), run.certificate.achieved);
        prop_assert!(run.certificate.exchanges <= g.num_colours());
        if let Some(b) = run.certificate.bound {
            prop_assert!(run.certificate.achieved as i64 >= b);
        }
    }

    #[test]
    fn forest_never_beats_the_optimum(n in 4usize..9, c in fraction(), t in 1usize..3, seed: u64) {
        let Some(g) = dirac(n, c, seed, ColouringStrategy::FanRecolour) else { return Ok(()) };
        let delta = Ratio::new(4, 3).unwrap();
        let run = maximise_forest_colours(&g, c, t, delta, &SolverConfig::default()).unwrap();
        let exact = max_colour_forest_exact(&g, t, &OracleBudget::default()).unwrap();
        prop_assert!(run.certificate.achieved <= exact.value);
    }

    #[test]
    fn matching_runs_are_valid_and_monotone(n in 4usize..40, c in fraction(), t in 1usize..10, seed: u64, s in strategy()) {
        let g = bipartite(n, c, seed, s);
        let t = t.min(n - 1);
        let run = maximise_matching_colours(&g, c, t, &MatchingSolverConfig::default()).unwrap();
        validate_matching(&g, &run.matching).unwrap();
        prop_assert_eq!(run.matching.len(), n - t);
        prop_assert!(strictly_increasing(&run.history));
        let (achieved, _) = g.distinct_colours(&run.matching).unwrap();
        prop_assert_eq!(achieved, run.certificate.achieved);
        if n <= 7 {
            let exact = max_colour_matching_exact(&g, n - t, &OracleBudget::default()).unwrap();
            prop_assert!(achieved <= exact.value);
        }
    }

    #[test]
    fn completion_is_perfect_and_keeps_most_edges(n in 4usize..40, c in fraction(), t in 1usize..10, seed: u64) {
        let g = bipartite(n, c, seed, ColouringStrategy::FanRecolour);
        let t = t.min(n - 1);
        let run = maximise_matching_colours(&g, c, t, &MatchingSolverConfig::default()).unwrap();
        let done = complete_to_perfect(&g, &run.matching).unwrap();
        validate_matching(&g, &done.matching).unwrap();
        prop_assert_eq!(done.matching.len(), n);
        let before: HashSet<Edge> = run.matching.iter().copied().collect();
        let kept = done.matching.iter().filter(|e| before.contains(e)).count();
        prop_assert_eq!(kept, done.overlap);
        prop_assert!(kept + 2 * t >= n);
    }

    #[test]
    fn latin_permutations_are_transversal_shaped(n in 2usize..24, steps in 0usize..100, seed: u64) {
        let sq = gen_latin_random(n, steps, seed);
        let run = latin_colourful_permutation(&sq, &CellMask::full(n), Ratio::one(), &MatchingSolverConfig::default()).unwrap();
        let rows: HashSet<usize> = run.cells.iter().map(|c| c.row).collect();
        let cols: HashSet<usize> = run.cells.iter().map(|c| c.col).collect();
        let symbols: HashSet<u32> = run.cells.iter().map(|c| c.symbol).collect();
        prop_assert_eq!(rows.len(), n);
        prop_assert_eq!(cols.len(), n);
        prop_assert!(run.cells.iter().all(|c| sq.cell(c.row, c.col) == c.symbol));
        prop_assert_eq!(symbols.len(), run.certificate.achieved);
    }

    #[test]
    fn graph_text_round_trips(n in 4usize..30, c in fraction(), seed: u64, s in strategy(), bip: bool) {
        let g = if bip {
            bipartite(n, c, seed, s)
        } else {
            let Some(g) = dirac(n, c, seed, s) else { return Ok(()) };
            g
        };
        let text = io::write_graph(&g);
        let back = io::parse_graph(&text).unwrap();
        prop_assert_eq!(io::write_graph(&back), text);
        prop_assert_eq!(back.bipartite_half(), g.bipartite_half());
    }

    #[test]
    fn ceil_and_floor_bracket_the_product(num in 1i64..50, den in 1i64..50, n in 0usize..100_000) {
        let r = Ratio::new(num, den).unwrap();
        let (lo, hi) = (r.floor_mul(n), r.ceil_mul(n));
        let exact = num as i128 * n as i128;
        prop_assert!((lo as i128) * den as i128 <= exact);
        prop_assert!((hi as i128) * den as i128 >= exact);
        prop_assert!(hi - lo <= 1);
        prop_assert_eq!(hi == lo, exact % den as i128 == 0);
    }

    #[test]
    fn reports_verify_and_flag_recomputes(achieved in prop::collection::vec(0usize..100, 1..8), bound in prop::collection::vec(prop::option::of(-10i64..100), 8)) {
        let rows: Vec<ReportRow> = achieved.iter().zip(&bound).enumerate().map(|(i, (&a, &b))| ReportRow {
            instance_id: format!("row-{i}"),
            problem: Problem::Forest,
            n: 100,
            c: "3/5".parse().unwrap(),
            t: 10,
            seed: i as u64,
            achieved_colours: a,
            bound: b,
            structure_size: 90,
            exchanges: 3,
            runtime_ms: None,
            pass: b.is_none_or(|b| a as i64 >= b),
        }).collect();
        let v = verify_report(&write_report(&rows, None)).unwrap();
        prop_assert_eq!(v.rows, rows.len());
        prop_assert!(v.mismatched.is_empty());
        prop_assert_eq!(v.failing.len(), rows.iter().filter(|r| !r.pass).count());
    }
}
