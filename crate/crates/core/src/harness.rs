//! Instance grids, a uniform solve entry point and CSV reports.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forest::{forest_bound, maximise_forest_colours, ForestError, SolverConfig};
use crate::generate::{
    edge_colour_proper, gen_dirac_bipartite, gen_dirac_graph, gen_few_colour_regular, gen_latin_cyclic,
    gen_latin_random, CellMask, ColouringStrategy, DiracOptions, GenError, LatinSquare, PermutationCell,
    RegularVariant,
};
use crate::graph::{ColouredGraph, Edge, Vertex};
use crate::hamilton::{colourful_hamilton, HamiltonError, HamiltonParams};
use crate::io::FormatError;
use crate::matching::{
    colourful_perfect_matching, latin_colourful_permutation, maximise_matching_colours, MatchingError,
    MatchingSolverConfig,
};
use crate::ratio::{ceil_sqrt, ceil_two_thirds_power, Ratio};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Hamilton(#[from] HamiltonError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

impl HarnessError {
    /// Whether the error comes from the input rather than a solver failing
    /// to deliver.
    pub fn is_input_error(&self) -> bool {
        match self {
            HarnessError::Input(_) | HarnessError::Gen(_) | HarnessError::Format(_) => true,
            HarnessError::Forest(e) => matches!(
                e,
                ForestError::BadComponentCount { .. } | ForestError::Invalid(_) | ForestError::Graph(_)
            ),
            HarnessError::Hamilton(e) => matches!(e, HamiltonError::Precondition(_) | HamiltonError::Invalid(_)),
            HarnessError::Matching(e) => matches!(
                e,
                MatchingError::NotBipartite
                    | MatchingError::Precondition(_)
                    | MatchingError::MatchingTooSmall { .. }
                    | MatchingError::Invalid(_)
                    | MatchingError::Graph(_)
                    | MatchingError::Gen(_)
                    | MatchingError::MaskTooSparse(_)
            ),
        }
    }
}

macro_rules! keyword_enum {
    ($name:ident { $($var:ident => $kw:literal),+ $(,)? }) => {
        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($kw => Ok($name::$var),)+
                    _ => Err(format!("unknown {}: {s:?} (expected one of {})", stringify!($name), [$($kw),+].join(", "))),
                }
            }
        }
        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($name::$var => $kw,)+ })
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Forest,
    Hamilton,
    Matching,
    PerfectMatching,
    LatinPerm,
}
keyword_enum!(Problem { Forest => "forest", Hamilton => "hamilton", Matching => "matching", PerfectMatching => "perfect-matching", LatinPerm => "latin-perm" });

impl Problem {
    pub fn is_bipartite(self) -> bool {
        matches!(self, Problem::Matching | Problem::PerfectMatching)
    }
}

/// Instance family. Latin problems read `Dirac` as cyclic and `FewColour`
/// as a scrambled cyclic square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Generator {
    #[default]
    Dirac,
    FewColour,
}
keyword_enum!(Generator { Dirac => "dirac", FewColour => "few-colour" });

/// Parses `greedy` or `fan-recolour`.
pub fn parse_strategy(s: &str) -> Result<ColouringStrategy, String> {
    match s {
        "greedy" => Ok(ColouringStrategy::Greedy),
        "fan-recolour" | "fan" => Ok(ColouringStrategy::FanRecolour),
        _ => Err(format!("unknown colouring strategy {s:?} (expected greedy or fan-recolour)")),
    }
}

/// Input to a solver: a coloured graph or a masked Latin square.
#[derive(Debug, Clone)]
pub enum Workload {
    Graph(ColouredGraph),
    Latin(LatinSquare, CellMask),
}

/// Builds the instance for `problem`. Bipartite problems get `n` vertices per
/// side.
pub fn generate(
    problem: Problem,
    generator: Generator,
    strategy: ColouringStrategy,
    n: usize,
    c: Ratio,
    seed: u64,
) -> Result<Workload, HarnessError> {
    Ok(match (problem, generator) {
        (Problem::LatinPerm, Generator::Dirac) => Workload::Latin(gen_latin_cyclic(n), CellMask::full(n)),
        (Problem::LatinPerm, Generator::FewColour) => {
            Workload::Latin(gen_latin_random(n, 4 * n, seed), CellMask::full(n))
        }
        (p, Generator::Dirac) if p.is_bipartite() => {
            let u = gen_dirac_bipartite(n, c, seed, DiracOptions::default())?;
            Workload::Graph(edge_colour_proper(&u, strategy))
        }
        (_, Generator::Dirac) => {
            let u = gen_dirac_graph(n, c, seed, DiracOptions::default())?;
            Workload::Graph(edge_colour_proper(&u, strategy))
        }
        (p, Generator::FewColour) => {
            let variant = if p.is_bipartite() {
                RegularVariant::Bipartite
            } else {
                RegularVariant::General
            };
            Workload::Graph(gen_few_colour_regular(n, c, seed, variant)?)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveParams {
    pub c: Ratio,
    /// Path count or leftover pairs; defaults per problem.
    pub t: Option<usize>,
    pub seed: u64,
    pub max_iters: Option<usize>,
}

/// The spanning structure a solver returns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Structure {
    Forest(Vec<Vec<Vertex>>),
    Cycle(Vec<Vertex>),
    Matching(Vec<Edge>),
    Permutation(Vec<PermutationCell>),
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub n: usize,
    pub t: usize,
    pub achieved: usize,
    pub bound: Option<i64>,
    pub structure_size: usize,
    pub exchanges: usize,
    pub certificate: serde_json::Value,
    pub structure: Structure,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.bound.is_none_or(|b| self.achieved as i64 >= b)
    }
}

/// Default `t`: `⌈√n⌉` paths for forests, `⌈n^{2/3}⌉` leftover pairs for matchings.
pub fn default_t(problem: Problem, n: usize) -> usize {
    match problem {
        Problem::Forest | Problem::Hamilton => ceil_sqrt(n),
        _ => ceil_two_thirds_power(n).min(n),
    }
}

fn cert_json<T: Serialize>(cert: &T) -> serde_json::Value {
    serde_json::to_value(cert).expect("certificates serialise")
}

fn graph_of(problem: Problem, w: &Workload) -> Result<&ColouredGraph, HarnessError> {
    match w {
        Workload::Graph(g) => Ok(g),
        Workload::Latin(..) => Err(HarnessError::Input(format!("{problem} needs a graph, not a Latin square"))),
    }
}

pub fn solve(problem: Problem, work: &Workload, p: &SolveParams) -> Result<Outcome, HarnessError> {
    let graph = |w| graph_of(problem, w);
    let mcfg = MatchingSolverConfig {
        max_iters: p.max_iters,
        chain_cap: None,
    };
    match problem {
        Problem::Forest => {
            let g = graph(work)?;
            let n = g.n();
            let t = p.t.unwrap_or_else(|| default_t(problem, n));
            let delta = Ratio::new(4, ceil_sqrt(n).max(1) as i64).expect("positive");
            let cfg = SolverConfig {
                max_iters: p.max_iters,
                ..SolverConfig::default()
            };
            let run = maximise_forest_colours(g, p.c, t, delta, &cfg)?;
            debug_assert!(run.certificate.bound.is_none_or(|b| b == forest_bound(n, p.c, delta)));
            Ok(Outcome {
                n,
                t,
                achieved: run.certificate.achieved,
                bound: run.certificate.bound,
                structure_size: run.forest.edge_count(),
                exchanges: run.certificate.exchanges,
                certificate: cert_json(&run.certificate),
                structure: Structure::Forest(run.forest.into_paths()),
            })
        }
        Problem::Hamilton => {
            let g = graph(work)?;
            let params = HamiltonParams {
                seed: p.seed,
                forest: SolverConfig {
                    max_iters: p.max_iters,
                    ..SolverConfig::default()
                },
                ..HamiltonParams::default()
            };
            let run = colourful_hamilton(g, p.c, &params)?;
            Ok(Outcome {
                n: g.n(),
                t: run.certificate.t,
                achieved: run.certificate.achieved,
                bound: run.certificate.bound,
                structure_size: run.cycle.len(),
                exchanges: run.certificate.exchanges,
                certificate: cert_json(&run.certificate),
                structure: Structure::Cycle(run.cycle),
            })
        }
        Problem::Matching => {
            let g = graph(work)?;
            let n = g.bipartite_half().ok_or(MatchingError::NotBipartite)?;
            let t = p.t.unwrap_or_else(|| default_t(problem, n));
            let run = maximise_matching_colours(g, p.c, t, &mcfg)?;
            Ok(Outcome {
                n,
                t,
                achieved: run.certificate.achieved,
                bound: run.certificate.bound,
                structure_size: run.matching.len(),
                exchanges: run.certificate.exchanges,
                certificate: cert_json(&run.certificate),
                structure: Structure::Matching(run.matching),
            })
        }
        Problem::PerfectMatching => {
            let g = graph(work)?;
            let run = colourful_perfect_matching(g, p.c, &mcfg)?;
            Ok(Outcome {
                n: run.certificate.n,
                t: run.certificate.t,
                achieved: run.certificate.achieved,
                bound: run.certificate.bound,
                structure_size: run.matching.len(),
                exchanges: run.certificate.exchanges,
                certificate: cert_json(&run.certificate),
                structure: Structure::Matching(run.matching),
            })
        }
        Problem::LatinPerm => {
            let Workload::Latin(sq, mask) = work else {
                return Err(HarnessError::Input("latin-perm needs a Latin square".into()));
            };
            let run = latin_colourful_permutation(sq, mask, p.c, &mcfg)?;
            Ok(Outcome {
                n: run.certificate.n,
                t: run.certificate.t,
                achieved: run.certificate.achieved,
                bound: run.certificate.bound,
                structure_size: run.cells.len(),
                exchanges: run.certificate.exchanges,
                certificate: cert_json(&run.certificate),
                structure: Structure::Permutation(run.cells),
            })
        }
    }
}

/// A grid of instances: every `n × c × seed` combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub problem: Problem,
    pub ns: Vec<usize>,
    pub cs: Vec<Ratio>,
    pub t: Option<usize>,
    pub seeds: Vec<u64>,
    pub generator: Generator,
    pub strategy: ColouringStrategy,
    pub max_iters: Option<usize>,
    /// Fill the runtime column. Off by default so reports are reproducible.
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub index: usize,
    pub n: usize,
    pub c: Ratio,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn instances(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        for &n in &self.ns {
            for &c in &self.cs {
                for &seed in &self.seeds {
                    out.push(Instance {
                        index: out.len(),
                        n,
                        c,
                        seed,
                    });
                }
            }
        }
        out
    }

    pub fn instance_id(&self, inst: &Instance) -> String {
        format!("{}-n{}-c{}-s{}", self.problem, inst.n, inst.c, inst.seed).replace('/', "_")
    }

    /// Generates and solves one grid point.
    pub fn run_instance(&self, inst: &Instance) -> Result<ReportRow, HarnessError> {
        let start = Instant::now();
        let work = generate(self.problem, self.generator, self.strategy, inst.n, inst.c, inst.seed)?;
        self.row_from(inst, &work, start)
    }

    /// Solves a grid point on an instance generated elsewhere.
    pub fn run_on(&self, inst: &Instance, work: &Workload) -> Result<ReportRow, HarnessError> {
        self.row_from(inst, work, Instant::now())
    }

    fn row_from(&self, inst: &Instance, work: &Workload, start: Instant) -> Result<ReportRow, HarnessError> {
        let params = SolveParams {
            c: inst.c,
            t: self.t,
            seed: inst.seed,
            max_iters: self.max_iters,
        };
        let out = solve(self.problem, work, &params)?;
        Ok(ReportRow {
            instance_id: self.instance_id(inst),
            problem: self.problem,
            n: inst.n,
            c: inst.c,
            t: out.t,
            seed: inst.seed,
            achieved_colours: out.achieved,
            bound: out.bound,
            structure_size: out.structure_size,
            exchanges: out.exchanges,
            runtime_ms: self.timing.then(|| start.elapsed().as_millis() as u64),
            pass: out.passed(),
        })
    }
}

pub const CSV_HEADER: &str =
    "instance_id,problem,n,c,t,seed,achieved_colours,bound,structure_size,exchanges,runtime_ms,pass";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance_id: String,
    pub problem: Problem,
    pub n: usize,
    pub c: Ratio,
    pub t: usize,
    pub seed: u64,
    pub achieved_colours: usize,
    /// Empty when the bound is not claimed for these parameters.
    pub bound: Option<i64>,
    pub structure_size: usize,
    pub exchanges: usize,
    pub runtime_ms: Option<u64>,
    pub pass: bool,
}

impl ReportRow {
    /// The pass flag implied by the achieved and bound columns.
    pub fn recomputed_pass(&self) -> bool {
        self.bound.is_none_or(|b| self.achieved_colours as i64 >= b)
    }
}

/// Header, rows and, after an abort, a `# aborted: …` comment line.
pub fn write_report(rows: &[ReportRow], aborted: Option<&str>) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialise");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ASCII output");
    let mut s = format!("{CSV_HEADER}\n{body}");
    if let Some(reason) = aborted {
        s.push_str("# aborted: ");
        s.push_str(&reason.replace('\n', " "));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub rows: usize,
    pub failing: Vec<String>,
    /// Rows whose stored flag disagrees with the recomputed one.
    pub mismatched: Vec<String>,
    pub aborted: bool,
}

/// Rereads a report and recomputes every pass flag.
pub fn verify_report(text: &str) -> Result<Verification, String> {
    if text.lines().next().map(str::trim) != Some(CSV_HEADER) {
        return Err("missing or unexpected header".into());
    }
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut v = Verification {
        rows: 0,
        failing: Vec::new(),
        mismatched: Vec::new(),
        aborted: text.lines().any(|l| l.starts_with("# aborted")),
    };
    for row in rd.deserialize::<ReportRow>() {
        let row = row.map_err(|e| e.to_string())?;
        v.rows += 1;
        if row.recomputed_pass() != row.pass {
            v.mismatched.push(row.instance_id.clone());
        }
        if !row.recomputed_pass() {
            v.failing.push(row.instance_id);
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(problem: Problem) -> ExperimentSpec {
        ExperimentSpec {
            problem,
            ns: vec![36],
            cs: vec!["3/5".parse().unwrap()],
            t: None,
            seeds: vec![1, 2, 3],
            generator: Generator::Dirac,
            strategy: ColouringStrategy::FanRecolour,
            max_iters: None,
            timing: false,
        }
    }

    #[test]
    fn grid_rows_and_round_trip() {
        let s = spec(Problem::Forest);
        let insts = s.instances();
        assert_eq!(insts.len(), 3);
        let rows: Vec<ReportRow> = insts.iter().map(|i| s.run_instance(i).unwrap()).collect();
        let again: Vec<ReportRow> = insts.iter().map(|i| s.run_instance(i).unwrap()).collect();
        assert_eq!(write_report(&rows, None), write_report(&again, None));
        assert!(rows.iter().all(|r| r.runtime_ms.is_none()));
        assert_eq!(rows[0].instance_id, "forest-n36-c3_5-s1");
        let text = write_report(&rows, Some("stopped"));
        let v = verify_report(&text).unwrap();
        assert_eq!(v.rows, 3);
        assert!(v.failing.is_empty());
        assert!(v.aborted);
        assert!(v.mismatched.is_empty());
    }

    #[test]
    fn advisory_rows_have_empty_bound() {
        // t = 1 is below the window at n = 36.
        let mut s = spec(Problem::Forest);
        s.t = Some(1);
        let row = s.run_instance(&s.instances()[0]).unwrap();
        assert_eq!(row.bound, None);
        assert!(row.pass);
        assert!(write_report(&[row], None).lines().nth(1).unwrap().contains(",,"));
    }

    #[test]
    fn verify_catches_tampering() {
        let text = format!("{CSV_HEADER}\nx,forest,10,3/5,2,1,3,5,8,1,,true\n");
        let v = verify_report(&text).unwrap();
        assert_eq!(v.mismatched, ["x"]);
        assert_eq!(v.failing, ["x"]);
        assert!(verify_report("nonsense\n").is_err());
    }

    #[test]
    fn keywords_parse() {
        assert_eq!("perfect-matching".parse::<Problem>(), Ok(Problem::PerfectMatching));
        assert_eq!(Problem::LatinPerm.to_string(), "latin-perm");
        assert!("tree".parse::<Problem>().is_err());
        assert_eq!("few-colour".parse::<Generator>(), Ok(Generator::FewColour));
        assert_eq!(parse_strategy("greedy"), Ok(ColouringStrategy::Greedy));
    }

    #[test]
    fn latin_and_matching_problems() {
        let mut s = spec(Problem::LatinPerm);
        s.ns = vec![3];
        s.cs = vec![Ratio::one()];
        let row = s.run_instance(&s.instances()[0]).unwrap();
        assert_eq!((row.achieved_colours, row.structure_size), (3, 3));
        let s = spec(Problem::PerfectMatching);
        let row = s.run_instance(&s.instances()[0]).unwrap();
        assert_eq!(row.structure_size, 36);
        let p = SolveParams {
            c: Ratio::one(),
            t: None,
            seed: 0,
            max_iters: None,
        };
        let latin = Workload::Latin(gen_latin_cyclic(2), CellMask::full(2));
        assert!(solve(Problem::Forest, &latin, &p).unwrap_err().is_input_error());
    }
}
