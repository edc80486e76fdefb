//! Browser bindings: generate a small instance, solve it, and hand the page
//! everything it needs to draw the result as JSON.

use chroma_span::generate::ColouringStrategy;
use chroma_span::harness::{generate, solve, Generator, Problem, SolveParams, Structure, Workload};
use chroma_span::{Colour, Ratio};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest instance the page will build; bigger ones stall the tab.
pub const MAX_N: usize = 300;

#[derive(Serialize)]
struct Drawing {
    n: usize,
    bipartite: bool,
    colours_in_graph: usize,
    achieved: usize,
    bound: Option<i64>,
    passed: bool,
    /// `[u, v, colour]` for every edge of the structure.
    structure: Vec<(usize, usize, Colour)>,
    certificate: serde_json::Value,
}

/// Runs one problem end to end and returns the drawing as JSON.
pub fn run(problem: &str, n: usize, c: &str, seed: u64) -> Result<String, String> {
    let problem: Problem = problem.parse()?;
    if !matches!(problem, Problem::Forest | Problem::Hamilton | Problem::PerfectMatching) {
        return Err(format!("{problem} is not offered here"));
    }
    if n == 0 || n > MAX_N {
        return Err(format!("n must be between 1 and {MAX_N}"));
    }
    let c: Ratio = c.parse().map_err(|e| format!("{e}"))?;
    let work = generate(problem, Generator::Dirac, ColouringStrategy::FanRecolour, n, c, seed).map_err(|e| e.to_string())?;
    let Workload::Graph(g) = &work else {
        return Err("expected a graph".into());
    };
    let params = SolveParams { c, t: None, seed, max_iters: None };
    let out = solve(problem, &work, &params).map_err(|e| e.to_string())?;
    let colour = |u: usize, v: usize| g.edge_colour(u, v).unwrap_or(0);
    let structure = match &out.structure {
        Structure::Forest(paths) => paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| (w[0], w[1], colour(w[0], w[1]))))
            .collect(),
        Structure::Cycle(cyc) => (0..cyc.len())
            .map(|i| {
                let (u, v) = (cyc[i], cyc[(i + 1) % cyc.len()]);
                (u, v, colour(u, v))
            })
            .collect(),
        Structure::Matching(m) => m.iter().map(|e| (e.u, e.v, colour(e.u, e.v))).collect(),
        Structure::Permutation(_) => Vec::new(),
    };
    let drawing = Drawing {
        n: g.n(),
        bipartite: g.bipartite_half().is_some(),
        colours_in_graph: g.num_colours(),
        achieved: out.achieved,
        bound: out.bound,
        passed: out.passed(),
        structure,
        certificate: out.certificate.clone(),
    };
    serde_json::to_string(&drawing).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn colourful_forest(n: usize, c: &str, seed: u64) -> Result<String, JsError> {
    run("forest", n, c, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn colourful_hamilton_cycle(n: usize, c: &str, seed: u64) -> Result<String, JsError> {
    run("hamilton", n, c, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn colourful_perfect_matching(n: usize, c: &str, seed: u64) -> Result<String, JsError> {
    run("perfect-matching", n, c, seed).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn forest_drawing_covers_all_vertices() {
        let d = parse(&run("forest", 49, "3/5", 1).unwrap());
        assert_eq!(d["n"], 49);
        // t = 7 paths on 49 vertices
        assert_eq!(d["structure"].as_array().unwrap().len(), 42);
        assert_eq!(d["passed"], true);
    }

    #[test]
    fn cycle_and_matching_sizes() {
        let d = parse(&run("hamilton", 60, "2/3", 3).unwrap());
        assert_eq!(d["structure"].as_array().unwrap().len(), 60);
        let d = parse(&run("perfect-matching", 30, "3/4", 3).unwrap());
        assert_eq!(d["bipartite"], true);
        assert_eq!(d["structure"].as_array().unwrap().len(), 30);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(run("forest", 1000, "3/5", 0).is_err());
        assert!(run("latin-perm", 10, "1", 0).is_err());
        assert!(run("forest", 20, "1/3", 0).is_err());
        assert!(run("forest", 20, "x", 0).is_err());
    }
}
