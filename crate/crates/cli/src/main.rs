//! `fcm` — analyze, simulate, generate, and benchmark fuzzy cognitive maps.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input error (parse
//! failures name the offending line), 3 usage error.

mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fcm_core::bench::{
    self, format_density_sweep_csv, format_overall_csv, format_records_csv, format_summary_csv,
    format_variability_csv, run_plan, summarize, Algorithm, BenchPlan,
};
use fcm_core::dynamics::{simulate, Activation, ConvergenceStatus};
use fcm_core::graph::{ConceptId, FcmGraph};
use fcm_core::io::{
    self, format_dense_matrix, format_edge_list, read_graph_file, read_state_row,
    write_trajectory, GraphFileFormat,
};
use fcm_core::oracle::{total_effect_exhaustive, OracleError};
use fcm_core::solver::{
    par_total_effects_to_target, SearchMethod, SolverOptions, TotalEffectResult,
};
use fcm_core::synthgen::{generate, GenSpec, DEFAULT_MIN_MAGNITUDE};

const EXIT_MISMATCH: i32 = 1;
const EXIT_INPUT: i32 = 2;
const EXIT_USAGE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "fcm",
    version,
    about = "Fuzzy cognitive map toolbox: total causal effects, inference runs, \
             map generation, and solver benchmarks"
)]
struct Cli {
    /// Worker threads for parallel solves (0 or unset: one per core).
    #[arg(long, global = true, env = "FCM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random map.
    Generate(GenerateArgs),
    /// Compute total causal effects from a map file.
    Analyze(AnalyzeArgs),
    /// Iterate the inference rule from an initial activation state.
    Simulate(SimulateArgs),
    /// Time the solvers against each other on generated maps.
    Bench(BenchArgs),
    /// Cross-check all three solver routes on random maps.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    /// Detect from the first line.
    Auto,
    /// Dense n-by-n matrix, no header.
    Matrix,
    /// `source,target,weight` rows.
    Edgelist,
}

impl FileFormat {
    fn as_io(self) -> Option<GraphFileFormat> {
        match self {
            FileFormat::Auto => None,
            FileFormat::Matrix => Some(GraphFileFormat::DenseMatrix),
            FileFormat::Edgelist => Some(GraphFileFormat::EdgeList),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Binary,
    Linear,
    Exhaustive,
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of concepts (at least 2).
    #[arg(long)]
    concepts: usize,
    /// Fraction of possible edges, in (0, 1].
    #[arg(long)]
    density: f64,
    #[arg(long)]
    seed: u64,
    /// Smallest weight magnitude to generate.
    #[arg(long, default_value_t = DEFAULT_MIN_MAGNITUDE)]
    min_magnitude: f64,
    /// Output map file; a `<out>.spec.json` sidecar records the parameters.
    #[arg(long)]
    out: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Edgelist)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Matrix,
    Edgelist,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Map file to analyze.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormat::Auto)]
    format: FileFormat,
    /// Concept count for edge-list files (otherwise inferred).
    #[arg(long)]
    concepts: Option<usize>,
    #[arg(long, value_enum, default_value_t = Method::Binary)]
    method: Method,
    /// Effects of every concept on this target (0-based).
    #[arg(long, conflicts_with = "all_pairs")]
    target: Option<usize>,
    /// Restrict --target output to this single source (0-based).
    #[arg(long, requires = "target", conflicts_with = "all_pairs")]
    source: Option<usize>,
    /// Effects for every ordered pair, written as an n-by-n matrix.
    #[arg(long)]
    all_pairs: bool,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Let the exhaustive method skip subtrees that cannot improve its
    /// current best.
    #[arg(long)]
    prune: bool,
    /// Run the exhaustive method on maps beyond its practical size guard.
    #[arg(long)]
    force: bool,
    /// Maintain probe subgraphs incrementally between reachability probes.
    #[arg(long)]
    incremental: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Map file to simulate.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormat::Auto)]
    format: FileFormat,
    /// Concept count for edge-list files (otherwise inferred).
    #[arg(long)]
    concepts: Option<usize>,
    /// Single-row CSV with the initial activation of every concept.
    #[arg(long)]
    initial: PathBuf,
    #[arg(long, value_enum, default_value_t = ActivationKind::Sigmoid)]
    activation: ActivationKind,
    /// Steepness for the sigmoid and tanh activations.
    #[arg(long, default_value_t = 1.0)]
    steepness: f64,
    /// Max-norm convergence tolerance.
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    max_iterations: u64,
    /// Trajectory CSV, one row per iteration (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActivationKind {
    Sigmoid,
    Tanh,
    Bivalent,
    Trivalent,
}

#[derive(Args)]
struct BenchArgs {
    /// Algorithms to time.
    #[arg(long, value_delimiter = ',', default_values_t = vec![AlgorithmArg::Binary, AlgorithmArg::Linear])]
    algorithms: Vec<AlgorithmArg>,
    /// Concept counts for the prefix solvers.
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 12, 50, 100, 500])]
    sizes: Vec<usize>,
    /// Concept counts for the exhaustive baseline (kept small: its cost
    /// explodes combinatorially).
    #[arg(long, value_delimiter = ',', default_values_t = vec![8, 10, 12])]
    exhaustive_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
    densities: Vec<f64>,
    /// Timed runs per (n, density) cell.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    base_seed: u64,
    /// What one timed solve covers.
    #[arg(long, value_enum, default_value_t = TargetPolicyArg::LastConcept)]
    targets: TargetPolicyArg,
    /// Wall-clock cap per timed solve, in seconds.
    #[arg(long, default_value_t = 120)]
    cell_budget_secs: u64,
    /// Prune dominated subtrees in the exhaustive baseline.
    #[arg(long)]
    prune_exhaustive: bool,
    /// Allow exhaustive sizes past the practical guard.
    #[arg(long)]
    allow_large_exhaustive: bool,
    /// Skip the untimed warm-up solve before each timed one.
    #[arg(long)]
    no_warmup: bool,
    #[arg(long, default_value_t = DEFAULT_MIN_MAGNITUDE)]
    min_magnitude: f64,
    /// Maintain probe subgraphs incrementally in the prefix solvers.
    #[arg(long)]
    incremental: bool,
    /// Raw per-trial records CSV.
    #[arg(long)]
    records_out: PathBuf,
    /// Per-cell summary statistics CSV.
    #[arg(long)]
    summary_out: Option<PathBuf>,
    /// Overall (per algorithm and size, across densities) means CSV.
    #[arg(long)]
    overall_out: Option<PathBuf>,
    /// Per-trial spread sheet at full density and the largest size.
    #[arg(long)]
    variability_out: Option<PathBuf>,
    /// Mean elapsed per density sheet.
    #[arg(long)]
    density_sweep_out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum AlgorithmArg {
    Binary,
    Linear,
    Exhaustive,
}

impl std::fmt::Display for AlgorithmArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AlgorithmArg::Binary => "binary",
            AlgorithmArg::Linear => "linear",
            AlgorithmArg::Exhaustive => "exhaustive",
        })
    }
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Binary => Algorithm::Binary,
            AlgorithmArg::Linear => Algorithm::Linear,
            AlgorithmArg::Exhaustive => Algorithm::Exhaustive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetPolicyArg {
    /// Every source to the last concept.
    LastConcept,
    /// Every ordered pair.
    AllPairs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random maps to check.
    #[arg(long, default_value_t = 200)]
    graphs: usize,
    /// Largest map size in the mix (sizes cycle 3..=max-concepts).
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(3..=12))]
    max_concepts: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Print only the verdict.
    #[arg(long)]
    quiet: bool,
}

/// A command failure: what to tell the user and which exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<io::ReadError> for Failure {
    fn from(e: io::ReadError) -> Self {
        Failure::input(e.to_string())
    }
}

/// Prefixes the file name onto line-level read errors; I/O errors already
/// name the path.
fn read_failure(path: &Path, e: io::ReadError) -> Failure {
    match e {
        io::ReadError::Io { .. } => Failure::input(e.to_string()),
        io::ReadError::Syntax { .. } => {
            Failure::input(format!("{}: {e}", path.display()))
        }
    }
}

impl From<io::WriteError> for Failure {
    fn from(e: io::WriteError) -> Self {
        Failure::input(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Requested help/version is a success; anything else is a usage
            // error, which this tool reports as 3 (2 is reserved for bad
            // input files).
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli.threads {
        if threads > 0 {
            // A second build_global is harmless: the first pool wins.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => return cmd_verify(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, content).map_err(|source| {
                Failure::input(format!("{}: {source}", path.display()))
            })?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let spec = GenSpec {
        concepts: args.concepts,
        density: args.density,
        seed: args.seed,
        min_magnitude: args.min_magnitude,
    };
    let graph = generate(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    let content = match args.format {
        OutputFormat::Edgelist => format_edge_list(&graph),
        OutputFormat::Matrix => format_dense_matrix(&graph),
    };
    write_or_print(Some(&args.out), &content)?;

    let mut sidecar = args.out.as_os_str().to_owned();
    sidecar.push(".spec.json");
    let json = serde_json::to_string_pretty(&spec).expect("GenSpec always serializes");
    write_or_print(Some(Path::new(&sidecar)), &format!("{json}\n"))?;

    println!(
        "wrote {} concepts, {} edges to {} (spec sidecar {})",
        graph.concept_count(),
        graph.edge_count(),
        args.out.display(),
        Path::new(&sidecar).display()
    );
    Ok(())
}

/// Beyond this size a full-density exhaustive run is no longer a "wait for
/// it" affair; require --force so nobody trips into a multi-hour solve.
const EXHAUSTIVE_GUARD: usize = 13;

fn format_effect_rows(results: &[TotalEffectResult]) -> String {
    let mut out = String::from("source,value,critical_index,path_found\n");
    for r in results {
        let index = r
            .critical_index
            .map(|k| k.to_string())
            .unwrap_or_default();
        writeln!(out, "{},{},{},{}", r.source, r.value, index, r.path_found)
            .expect("writing to a String cannot fail");
    }
    out
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let graph = read_graph_file(&args.input, args.format.as_io(), args.concepts)
        .map_err(|e| read_failure(&args.input, e))?;
    let n = graph.concept_count();

    if matches!(args.method, Method::Exhaustive) && n > EXHAUSTIVE_GUARD && !args.force {
        return Err(Failure::usage(format!(
            "refusing to enumerate paths on a {n}-concept map: past {EXHAUSTIVE_GUARD} concepts \
             the path count explodes combinatorially; pass --force to run it anyway"
        )));
    }
    let check_index = |index: usize, what: &str| -> Result<ConceptId, Failure> {
        if index >= n {
            Err(Failure::usage(format!(
                "{what} {index} is out of range for a {n}-concept map"
            )))
        } else {
            Ok(ConceptId(index))
        }
    };

    let options = SolverOptions {
        incremental: args.incremental,
    };
    let content = match (args.target, args.all_pairs) {
        (Some(target), false) => {
            let target = check_index(target, "target")?;
            let results = match args.source {
                Some(source) => {
                    let source = check_index(source, "source")?;
                    if source == target {
                        return Err(Failure::usage(format!(
                            "source and target are both {source}; the total effect of a \
                             concept on itself is not defined"
                        )));
                    }
                    vec![solve_pair(&graph, source, target, args.method, args.prune, options)?]
                }
                None => solve_to_target(&graph, target, args.method, args.prune, options)?,
            };
            format_effect_rows(&results)
        }
        (None, true) => {
            let matrix = solve_all_pairs(&graph, args.method, args.prune, options)?;
            let mut out = String::new();
            for row in matrix {
                let rendered: Vec<String> = row.iter().map(f64::to_string).collect();
                out.push_str(&rendered.join(","));
                out.push('\n');
            }
            out
        }
        _ => {
            return Err(Failure::usage(
                "pass exactly one of --target <index> or --all-pairs",
            ))
        }
    };
    write_or_print(args.out.as_deref(), &content)
}

fn solve_pair(
    graph: &FcmGraph,
    source: ConceptId,
    target: ConceptId,
    method: Method,
    prune: bool,
    options: SolverOptions,
) -> Result<TotalEffectResult, Failure> {
    match method {
        Method::Binary | Method::Linear => {
            let sorted = graph.sorted_edges();
            let mut solver = fcm_core::solver::PrefixSolver::new(&sorted, options);
            solver
                .solve(source, target, search_method(method))
                .map_err(|e| Failure::usage(e.to_string()))
        }
        Method::Exhaustive => total_effect_exhaustive(graph, source, target, prune)
            .map(|r| TotalEffectResult {
                source: r.source,
                target: r.target,
                value: r.value,
                critical_index: r.critical_index,
                path_found: r.path_found,
            })
            .map_err(oracle_failure),
    }
}

fn search_method(method: Method) -> SearchMethod {
    match method {
        Method::Binary => SearchMethod::Binary,
        Method::Linear => SearchMethod::Linear,
        Method::Exhaustive => unreachable!("exhaustive does not use prefix search"),
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::SameConcept(_) => Failure::usage(e.to_string()),
        OracleError::PathBudgetExceeded { .. } | OracleError::TimeBudgetExceeded => {
            Failure::input(format!(
                "{e}; the map is too large for exact enumeration — use --method binary instead"
            ))
        }
    }
}

fn solve_to_target(
    graph: &FcmGraph,
    target: ConceptId,
    method: Method,
    prune: bool,
    options: SolverOptions,
) -> Result<Vec<TotalEffectResult>, Failure> {
    match method {
        Method::Binary | Method::Linear => Ok(par_total_effects_to_target(
            graph,
            target,
            search_method(method),
            options,
        )),
        Method::Exhaustive => (0..graph.concept_count())
            .map(ConceptId)
            .filter(|&s| s != target)
            .map(|s| solve_pair(graph, s, target, Method::Exhaustive, prune, options))
            .collect(),
    }
}

fn solve_all_pairs(
    graph: &FcmGraph,
    method: Method,
    prune: bool,
    options: SolverOptions,
) -> Result<Vec<Vec<f64>>, Failure> {
    let n = graph.concept_count();
    match method {
        Method::Binary | Method::Linear => Ok(fcm_core::solver::par_total_effects_all_pairs(
            graph,
            search_method(method),
            options,
        )),
        Method::Exhaustive => (0..n)
            .map(|s| {
                (0..n)
                    .map(|t| {
                        if s == t {
                            Ok(0.0)
                        } else {
                            solve_pair(
                                graph,
                                ConceptId(s),
                                ConceptId(t),
                                Method::Exhaustive,
                                prune,
                                options,
                            )
                            .map(|r| r.value)
                        }
                    })
                    .collect()
            })
            .collect(),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    if !(args.epsilon > 0.0) {
        return Err(Failure::usage(format!(
            "epsilon must be positive, got {}",
            args.epsilon
        )));
    }
    if args.steepness <= 0.0 {
        return Err(Failure::usage(format!(
            "steepness must be positive, got {}",
            args.steepness
        )));
    }
    let graph = read_graph_file(&args.input, args.format.as_io(), args.concepts)
        .map_err(|e| read_failure(&args.input, e))?;
    let initial = read_state_row(&args.initial)
        .map_err(|e| read_failure(&args.initial, e))?;
    let activation = match args.activation {
        ActivationKind::Sigmoid => Activation::Sigmoid {
            steepness: args.steepness,
        },
        ActivationKind::Tanh => Activation::HyperbolicTangent {
            steepness: args.steepness,
        },
        ActivationKind::Bivalent => Activation::Bivalent,
        ActivationKind::Trivalent => Activation::Trivalent,
    };
    let outcome = simulate(
        &graph,
        &initial,
        activation,
        args.epsilon,
        args.max_iterations as usize,
    )
    .map_err(|e| Failure::input(e.to_string()))?;
    match args.out.as_deref() {
        Some(path) => write_trajectory(path, &outcome.trajectory)?,
        None => print!("{}", fcm_core::io::format_trajectory(&outcome.trajectory)),
    }
    match outcome.status {
        ConvergenceStatus::FixedPoint { at } => {
            println!("fixed point reached at iteration {at}");
        }
        ConvergenceStatus::NotConverged => {
            println!(
                "no fixed point within {} iterations",
                outcome.iterations_run
            );
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let plan = BenchPlan {
        algorithms: args.algorithms.iter().map(|&a| a.into()).collect(),
        sizes: args.sizes,
        exhaustive_sizes: args.exhaustive_sizes,
        densities: args.densities,
        trials: args.trials,
        base_seed: args.base_seed,
        target_policy: match args.targets {
            TargetPolicyArg::LastConcept => bench::TargetPolicy::LastConcept,
            TargetPolicyArg::AllPairs => bench::TargetPolicy::AllPairs,
        },
        cell_budget: Duration::from_secs(args.cell_budget_secs),
        exhaustive_prune: args.prune_exhaustive,
        allow_large_exhaustive: args.allow_large_exhaustive,
        warmup: !args.no_warmup,
        min_magnitude: args.min_magnitude,
        incremental: args.incremental,
    };
    let records = run_plan(&plan).map_err(|e| Failure::usage(e.to_string()))?;
    write_or_print(Some(&args.records_out), &format_records_csv(&records))?;

    let summary = summarize(&records).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(path) = &args.summary_out {
        write_or_print(Some(path), &format_summary_csv(&summary.cells))?;
    }
    if let Some(path) = &args.overall_out {
        write_or_print(Some(path), &format_overall_csv(&summary.overall))?;
    }
    if let Some(path) = &args.variability_out {
        write_or_print(Some(path), &format_variability_csv(&records))?;
    }
    if let Some(path) = &args.density_sweep_out {
        write_or_print(Some(path), &format_density_sweep_csv(&summary.cells))?;
    }

    println!(
        "{} records ({} cut off by the budget) -> {}",
        records.len(),
        records
            .iter()
            .filter(|r| r.status == bench::RunStatus::BudgetExceeded)
            .count(),
        args.records_out.display()
    );
    for overall in &summary.overall {
        println!(
            "{} n={}: overall mean {:.6}s across {} densities",
            overall.algorithm, overall.n, overall.mean_s, overall.densities_counted
        );
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let report = verify::run(args.seed, args.max_concepts as usize, args.graphs, 16);
    if !args.quiet {
        println!(
            "checked {} ordered pairs across {} random maps",
            report.pairs_checked, report.graphs_checked
        );
    }
    if report.mismatches.is_empty() {
        println!("verify: OK — all methods agree exactly");
        0
    } else {
        for m in &report.mismatches {
            eprintln!(
                "MISMATCH on {} (replay: fcm generate --concepts {} --density {} --seed {})",
                m.detail, m.spec.concepts, m.spec.density, m.spec.seed
            );
        }
        eprintln!(
            "verify: FAILED — {} mismatch(es) across {} pairs",
            report.mismatches.len(),
            report.pairs_checked
        );
        EXIT_MISMATCH
    }
}
