use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chroma_span::generate::{
    construct_forest_blocker, construct_matching_blocker, edge_colour_proper, gen_latin_cyclic, gen_latin_random,
    CellMask, ColouringStrategy, UncolouredGraph,
};
use chroma_span::harness::{
    generate, parse_strategy, solve, verify_report, write_report, ExperimentSpec, Generator, HarnessError, Problem,
    ReportRow, SolveParams, Structure, Workload,
};
use chroma_span::io;
use chroma_span::oracle::{
    max_colour_forest_exact, max_colour_matching_exact, max_overlap_hamilton, max_overlap_perfect_matching,
    OracleBudget, OracleError,
};
use chroma_span::{ColouredGraph, Ratio};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

/// Colourful spanning structures in properly edge-coloured graphs.
#[derive(Parser)]
#[command(name = "chroma-span", version)]
struct Cli {
    /// Worker threads for `bench`; CHROMA_SPAN_WORKERS takes precedence.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a Dirac graph (or few-colour regular graph) in edge-list format.
    GenGraph {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Balanced bipartite graph with `n` vertices per side.
        #[arg(long)]
        bipartite: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a cyclic Latin square, optionally scrambled.
    GenLatin {
        #[arg(long)]
        n: usize,
        /// Random row and symbol swaps applied to the cyclic square.
        #[arg(long)]
        scramble: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recolour the edges of a graph file with a proper colouring.
    Colour {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "fan-recolour", value_parser = parse_strategy)]
        strategy: ColouringStrategy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spanning linear forest with many colours.
    Forest(SolveArgs),
    /// Hamilton cycle with many colours.
    Hamilton(SolveArgs),
    /// Near-perfect bipartite matching with many colours.
    Matching(SolveArgs),
    /// Perfect bipartite matching with many colours.
    PerfectMatching(SolveArgs),
    /// Permutation of a Latin square with many distinct symbols.
    LatinPerm {
        #[command(flatten)]
        solve: SolveArgs,
        /// Mask file of `0`/`1` rows; all cells available when absent.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Extremal constructions with a prescribed structure.
    Blocker {
        kind: BlockerKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: Ratio,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Edge list of the prescribed forest or matching.
        #[arg(long)]
        structure_out: Option<PathBuf>,
    },
    /// Exact answers by exhaustive search on small graphs.
    Oracle {
        kind: OracleKind,
        #[arg(long = "in")]
        input: PathBuf,
        /// Path count (forest) or matching size (matching).
        #[arg(long)]
        t: Option<usize>,
        /// Edge list whose overlap is maximised.
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Compare an overlap value with the cap `(2c − 1)n`.
        #[arg(long)]
        c: Option<Ratio>,
        /// Raise the size limit of the chosen oracle.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a grid of instances and write a CSV report.
    Bench(BenchArgs),
    /// Recompute the pass flags of a CSV report.
    Verify { report: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockerKind {
    Forest,
    Matching,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Forest,
    Matching,
    OverlapHam,
    OverlapPm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    c: Option<Ratio>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "fan-recolour", value_parser = parse_strategy)]
    strategy: ColouringStrategy,
    #[arg(long, default_value = "dirac")]
    generator: Generator,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Read the instance from a file instead of generating it.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Where to write the structure; certificates go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Clone)]
struct BenchArgs {
    #[arg(long)]
    problem: Problem,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    c: Vec<Ratio>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, default_value = "dirac")]
    generator: Generator,
    #[arg(long, default_value = "fan-recolour", value_parser = parse_strategy)]
    strategy: ColouringStrategy,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Fill the runtime_ms column (reports stop being reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code: 1 for bad input, 2 for a missed bound.
struct Fail(u8, String);

impl Fail {
    fn input(msg: impl Into<String>) -> Self {
        Fail(1, msg.into())
    }
}

impl From<HarnessError> for Fail {
    fn from(e: HarnessError) -> Self {
        Fail(if e.is_input_error() { 1 } else { 2 }, e.to_string())
    }
}

impl From<OracleError> for Fail {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { .. } => Fail(1, format!("{e}; raise it with --budget")),
            _ => Fail(1, e.to_string()),
        }
    }
}

impl From<io::FormatError> for Fail {
    fn from(e: io::FormatError) -> Self {
        Fail(1, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::input(format!("cannot read {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            say(text);
            Ok(())
        }
    }
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Fail> {
    v.ok_or_else(|| Fail::input(format!("missing required flag --{flag}")))
}

fn uncoloured(g: &ColouredGraph) -> UncolouredGraph {
    let edges: Vec<(usize, usize)> = g.edges().map(|(e, _)| (e.u, e.v)).collect();
    UncolouredGraph::from_edges(g.n(), g.bipartite_half(), &edges)
}

fn gen_graph(inst: &InstanceArgs, bipartite: bool) -> Result<ColouredGraph, Fail> {
    let n = need(inst.n, "n")?;
    let c = need(inst.c, "c")?;
    let shape = if bipartite { Problem::Matching } else { Problem::Forest };
    match generate(shape, inst.generator, inst.strategy, n, c, inst.seed)? {
        Workload::Graph(g) => Ok(g),
        Workload::Latin(..) => unreachable!("graph problems generate graphs"),
    }
}

fn structure_text(s: &Structure) -> String {
    match s {
        Structure::Forest(p) => io::write_forest(p),
        Structure::Cycle(c) => io::write_cycle(c),
        Structure::Matching(m) => io::write_matching(m),
        Structure::Permutation(cells) => io::write_permutation(cells),
    }
}

fn run_solve(problem: Problem, a: &SolveArgs, mask: Option<&Path>) -> Result<(), Fail> {
    let work = match (&a.input, problem) {
        (Some(path), Problem::LatinPerm) => {
            let sq = io::parse_latin(&read(path)?)?;
            let mask = match mask {
                Some(m) => io::parse_mask(&read(m)?)?,
                None => CellMask::full(sq.order()),
            };
            Workload::Latin(sq, mask)
        }
        (Some(path), _) => Workload::Graph(io::parse_graph(&read(path)?)?),
        (None, _) => {
            let n = need(a.inst.n, "n")?;
            let c = a.inst.c.unwrap_or(Ratio::one());
            let mut w = generate(problem, a.inst.generator, a.inst.strategy, n, c, a.inst.seed)?;
            if let (Workload::Latin(sq, _), Some(m)) = (&w, mask) {
                w = Workload::Latin(sq.clone(), io::parse_mask(&read(m)?)?);
            }
            w
        }
    };
    let c = need(a.inst.c, "c")?;
    let params = SolveParams {
        c,
        t: a.t,
        seed: a.inst.seed,
        max_iters: a.max_iters,
    };
    let out = solve(problem, &work, &params)?;
    if let Some(path) = &a.out {
        emit(Some(path), &structure_text(&out.structure))?;
    }
    match a.format {
        Format::Json => say(&format!("{}\n", serde_json::to_string_pretty(&out.certificate).expect("JSON"))),
        Format::Csv => {
            let row = ReportRow {
                instance_id: format!("{problem}-n{}-c{}-s{}", out.n, c.to_string().replace('/', "_"), a.inst.seed),
                problem,
                n: out.n,
                c,
                t: out.t,
                seed: a.inst.seed,
                achieved_colours: out.achieved,
                bound: out.bound,
                structure_size: out.structure_size,
                exchanges: out.exchanges,
                runtime_ms: None,
                pass: out.passed(),
            };
            say(&write_report(&[row], None));
        }
    }
    if out.passed() {
        Ok(())
    } else {
        Err(Fail(2, format!("{} colours, below the bound {}", out.achieved, out.bound.unwrap_or_default())))
    }
}

fn workers(flag: Option<usize>) -> Result<usize, Fail> {
    match std::env::var("CHROMA_SPAN_WORKERS") {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| Fail::input(format!("CHROMA_SPAN_WORKERS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(flag.unwrap_or(1).max(1)),
    }
}

fn run_bench(a: &BenchArgs, workers: usize) -> Result<(), Fail> {
    let spec = ExperimentSpec {
        problem: a.problem,
        ns: a.n.clone(),
        cs: a.c.clone(),
        t: a.t,
        seeds: a.seeds.clone(),
        generator: a.generator,
        strategy: a.strategy,
        max_iters: a.max_iters,
        timing: a.timing,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Fail::input(e.to_string()))?;
    let results: Vec<Result<ReportRow, HarnessError>> =
        pool.install(|| spec.instances().par_iter().map(|i| spec.run_instance(i)).collect());
    let mut rows = Vec::new();
    let mut abort = None;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                abort = Some(e);
                break;
            }
        }
    }
    let reason = abort.as_ref().map(ToString::to_string);
    emit(a.out.as_deref(), &write_report(&rows, reason.as_deref()))?;
    if let Some(e) = abort {
        return Err(e.into());
    }
    let failing = rows.iter().filter(|r| !r.pass).count();
    if failing > 0 {
        return Err(Fail(2, format!("{failing} of {} rows miss their bound", rows.len())));
    }
    Ok(())
}

fn run_verify(path: &Path) -> Result<(), Fail> {
    let v = verify_report(&read(path)?).map_err(|e| Fail::input(format!("{}: {e}", path.display())))?;
    if !v.mismatched.is_empty() {
        return Err(Fail::input(format!("stored pass flags disagree for: {}", v.mismatched.join(", "))));
    }
    if v.aborted {
        return Err(Fail::input("report ends with an abort"));
    }
    if !v.failing.is_empty() {
        return Err(Fail(2, format!("rows below their bound: {}", v.failing.join(", "))));
    }
    say(&format!("{} rows, all pass\n", v.rows));
    Ok(())
}

fn run_oracle(
    kind: OracleKind,
    input: &Path,
    t: Option<usize>,
    edges: Option<&Path>,
    c: Option<Ratio>,
    budget: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Fail> {
    let g = io::parse_graph(&read(input)?)?;
    let mut b = OracleBudget::default();
    if let Some(limit) = budget {
        match kind {
            OracleKind::Forest => b.forest = limit,
            OracleKind::Matching => b.matching = limit,
            OracleKind::OverlapHam => b.hamilton_overlap = limit,
            OracleKind::OverlapPm => b.pm_overlap = limit,
        }
    }
    for w in b.warnings() {
        eprintln!("warning: {w}");
    }
    let edge_list = || -> Result<_, Fail> {
        let path = edges.ok_or_else(|| Fail::input("missing required flag --edges"))?;
        Ok(io::parse_matching(&read(path)?)?)
    };
    let (json, value, size) = match kind {
        OracleKind::Forest => {
            let r = max_colour_forest_exact(&g, need(t, "t")?, &b)?;
            (serde_json::to_string_pretty(&r), r.value, g.n())
        }
        OracleKind::Matching => {
            let r = max_colour_matching_exact(&g, need(t, "t")?, &b)?;
            (serde_json::to_string_pretty(&r), r.value, g.n() / 2)
        }
        OracleKind::OverlapHam => {
            let r = max_overlap_hamilton(&g, &edge_list()?, &b)?;
            (serde_json::to_string_pretty(&r), r.value, g.n())
        }
        OracleKind::OverlapPm => {
            let r = max_overlap_perfect_matching(&g, &edge_list()?, &b)?;
            (serde_json::to_string_pretty(&r), r.value, g.n() / 2)
        }
    };
    emit(out, &format!("{}\n", json.expect("JSON")))?;
    if let (Some(c), OracleKind::OverlapHam | OracleKind::OverlapPm) = (c, kind) {
        let cap = c.mul_int(2).sub(&Ratio::one()).floor_mul(size);
        if value as i64 > cap {
            return Err(Fail(2, format!("overlap {value} exceeds the cap (2c − 1)n = {cap}")));
        }
        eprintln!("overlap {value} within the cap {cap}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::GenGraph { inst, bipartite, out } => emit(out.as_deref(), &io::write_graph(&gen_graph(&inst, bipartite)?)),
        Cmd::GenLatin { n, scramble, seed, out } => {
            let sq = match scramble {
                Some(steps) => gen_latin_random(n, steps, seed),
                None => gen_latin_cyclic(n),
            };
            emit(out.as_deref(), &io::write_latin(&sq))
        }
        Cmd::Colour { input, strategy, out } => {
            let g = io::parse_graph(&read(&input)?)?;
            emit(out.as_deref(), &io::write_graph(&edge_colour_proper(&uncoloured(&g), strategy)))
        }
        Cmd::Forest(a) => run_solve(Problem::Forest, &a, None),
        Cmd::Hamilton(a) => run_solve(Problem::Hamilton, &a, None),
        Cmd::Matching(a) => run_solve(Problem::Matching, &a, None),
        Cmd::PerfectMatching(a) => run_solve(Problem::PerfectMatching, &a, None),
        Cmd::LatinPerm { solve, mask } => run_solve(Problem::LatinPerm, &solve, mask.as_deref()),
        Cmd::Blocker { kind, n, c, out, structure_out } => {
            let (g, edges) = match kind {
                BlockerKind::Forest => {
                    let b = construct_forest_blocker(n, c).map_err(HarnessError::from)?;
                    let e = b.forest_edges();
                    (b.graph, e)
                }
                BlockerKind::Matching => {
                    let b = construct_matching_blocker(n, c).map_err(HarnessError::from)?;
                    (b.graph, b.matching)
                }
            };
            emit(out.as_deref(), &io::write_graph(&g))?;
            if let Some(p) = structure_out {
                emit(Some(&p), &io::write_matching(&edges))?;
            }
            Ok(())
        }
        Cmd::Oracle { kind, input, t, edges, c, budget, out } => {
            run_oracle(kind, &input, t, edges.as_deref(), c, budget, out.as_deref())
        }
        Cmd::Bench(a) => run_bench(&a, workers(cli.workers)?),
        Cmd::Verify { report } => run_verify(&report),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
