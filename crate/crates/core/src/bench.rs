//! Benchmark harness: times the solvers against each other on generated
//! maps.
//!
//! A *cell* is one `(n, density, trial)` combination. For each cell the
//! harness generates a single map — every algorithm in the plan is timed on
//! the *same* map instance — and measures each algorithm's wall-clock time
//! for a full solve, sorting included. Each cell's seed is derived from the
//! plan's base seed by a fixed published hash, so any one record can be
//! reproduced in isolation.
//!
//! Cells run sequentially and every timed solve runs on the calling thread
//! with nothing co-scheduled by the harness, so timings are not contaminated
//! by sibling measurements. A per-cell wall-clock budget cuts off runaway
//! solves (the exhaustive algorithm at full density can cost hours from
//! about thirteen concepts up); cut-off runs are recorded with a
//! `budget_exceeded` status rather than dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{ConceptId, FcmGraph};
use crate::io::ReadError;
use crate::oracle::{total_effect_exhaustive_with_limits, OracleError, SearchLimits};
use crate::solver::{PrefixSolver, SearchMethod, SolverOptions};
use crate::synthgen::{generate, GenError, GenSpec, DEFAULT_MIN_MAGNITUDE};

/// Which solver a record measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// Binary search over the sorted-edge prefix.
    Binary,
    /// Linear scan over the sorted-edge prefix.
    Linear,
    /// Exhaustive simple-path enumeration.
    Exhaustive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Binary, Algorithm::Linear, Algorithm::Exhaustive];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Binary => "binary",
            Algorithm::Linear => "linear",
            Algorithm::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}; expected binary, linear, or exhaustive"))
    }
}

/// What one timed solve covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetPolicy {
    /// Effects of every source on the last concept (one column).
    LastConcept,
    /// Effects for every ordered pair.
    AllPairs,
}

/// Largest concept count the exhaustive algorithm accepts without
/// [`BenchPlan::allow_large_exhaustive`]. At full density, fourteen concepts
/// push simple-path enumeration past 10^9 paths per query.
pub const EXHAUSTIVE_SIZE_LIMIT: usize = 13;

/// A full experiment description. [`Default`] gives the desk-scale grid:
/// prefix solvers on n up to 500, the exhaustive baseline only on small
/// maps.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub algorithms: Vec<Algorithm>,
    /// Concept counts for the prefix solvers (binary and linear).
    pub sizes: Vec<usize>,
    /// Concept counts for the exhaustive baseline; entries above
    /// [`EXHAUSTIVE_SIZE_LIMIT`] require `allow_large_exhaustive`.
    pub exhaustive_sizes: Vec<usize>,
    pub densities: Vec<f64>,
    /// Timed runs per cell.
    pub trials: usize,
    pub base_seed: u64,
    pub target_policy: TargetPolicy,
    /// Wall-clock cap per timed solve.
    pub cell_budget: Duration,
    /// Prune dominated subtrees in the exhaustive baseline. Off by default:
    /// the baseline's role is to cost what plain enumeration costs.
    pub exhaustive_prune: bool,
    pub allow_large_exhaustive: bool,
    /// Run one untimed solve per (cell, algorithm) before the timed one.
    pub warmup: bool,
    pub min_magnitude: f64,
    /// Incremental prefix maintenance in the prefix solvers.
    pub incremental: bool,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            algorithms: vec![Algorithm::Binary, Algorithm::Linear],
            sizes: vec![10, 12, 50, 100, 500],
            exhaustive_sizes: vec![8, 10, 12],
            densities: vec![1.0],
            trials: 10,
            base_seed: 42,
            target_policy: TargetPolicy::LastConcept,
            cell_budget: Duration::from_secs(120),
            exhaustive_prune: false,
            allow_large_exhaustive: false,
            warmup: true,
            min_magnitude: DEFAULT_MIN_MAGNITUDE,
            incremental: false,
        }
    }
}

impl BenchPlan {
    fn sizes_for(&self, algorithm: Algorithm) -> &[usize] {
        match algorithm {
            Algorithm::Binary | Algorithm::Linear => &self.sizes,
            Algorithm::Exhaustive => &self.exhaustive_sizes,
        }
    }

    /// Every concept count at least one planned algorithm runs on, sorted.
    fn active_sizes(&self) -> BTreeSet<usize> {
        self.algorithms
            .iter()
            .flat_map(|&a| self.sizes_for(a).iter().copied())
            .collect()
    }

    fn validate(&self) -> Result<(), BenchError> {
        let invalid = |msg: String| Err(BenchError::InvalidPlan(msg));
        if self.algorithms.is_empty() {
            return invalid("no algorithms selected".into());
        }
        let mut seen = BTreeSet::new();
        for &a in &self.algorithms {
            if !seen.insert(a) {
                return invalid(format!("algorithm {a} listed twice"));
            }
            if self.sizes_for(a).is_empty() {
                return invalid(format!("no sizes listed for algorithm {a}"));
            }
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if self.densities.is_empty() {
            return invalid("no densities listed".into());
        }
        for &d in &self.densities {
            if !(d > 0.0 && d <= 1.0) {
                return invalid(format!("density {d} is outside (0, 1]"));
            }
        }
        if self.cell_budget.is_zero() {
            return invalid("cell budget must be positive".into());
        }
        if !(self.min_magnitude > 0.0 && self.min_magnitude <= 1.0) {
            return invalid(format!(
                "min_magnitude {} is outside (0, 1]",
                self.min_magnitude
            ));
        }
        if !self.allow_large_exhaustive && self.algorithms.contains(&Algorithm::Exhaustive) {
            if let Some(&n) = self
                .exhaustive_sizes
                .iter()
                .find(|&&n| n > EXHAUSTIVE_SIZE_LIMIT)
            {
                return invalid(format!(
                    "exhaustive at n = {n} exceeds the n <= {EXHAUSTIVE_SIZE_LIMIT} guard; \
                     set allow_large_exhaustive to run it anyway"
                ));
            }
        }
        for &n in &self.active_sizes() {
            if n < 2 {
                return invalid(format!("size {n} is below the 2-concept minimum"));
            }
            for &d in &self.densities {
                let m = (d * (n * (n - 1)) as f64).round();
                if m < 1.0 {
                    return invalid(format!(
                        "density {d} at n = {n} rounds to zero edges"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Fixed seed hash: any record's generator seed is reproducible from the
/// plan's base seed and the cell coordinates alone.
pub fn cell_seed(base_seed: u64, n: usize, density: f64, trial: usize) -> u64 {
    let mut s = splitmix64(base_seed);
    s = splitmix64(s ^ n as u64);
    s = splitmix64(s ^ density.to_bits());
    splitmix64(s ^ trial as u64)
}

/// The splitmix64 mixing step (Steele, Lea & Flood's published constants).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    /// The solve was cut off at the cell budget; `elapsed_s` is the time
    /// spent before the cutoff (from the warm-up attempt when that is the
    /// run that hit it).
    BudgetExceeded,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(RunStatus::Ok),
            "budget_exceeded" => Ok(RunStatus::BudgetExceeded),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// One timed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub density: f64,
    pub trial: usize,
    pub seed: u64,
    pub elapsed_s: f64,
    pub status: RunStatus,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark plan: {0}")]
    InvalidPlan(String),
    #[error("no records to summarize")]
    EmptyInput,
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(PartialEq)]
enum SolveOutcome {
    Completed,
    TimedOut,
}

fn pairs_for(policy: TargetPolicy, n: usize) -> Vec<(ConceptId, ConceptId)> {
    match policy {
        TargetPolicy::LastConcept => {
            let target = ConceptId(n - 1);
            (0..n - 1).map(|s| (ConceptId(s), target)).collect()
        }
        TargetPolicy::AllPairs => (0..n)
            .flat_map(|s| {
                (0..n)
                    .filter(move |&t| t != s)
                    .map(move |t| (ConceptId(s), ConceptId(t)))
            })
            .collect(),
    }
}

/// One full solve of the graph under the plan's target policy. The timed
/// region starts here so the edge sort is always included, matching the
/// one-shot cost a caller of the solver would pay.
fn run_algorithm(
    graph: &FcmGraph,
    algorithm: Algorithm,
    plan: &BenchPlan,
    deadline: Instant,
) -> SolveOutcome {
    let pairs = pairs_for(plan.target_policy, graph.concept_count());
    match algorithm {
        Algorithm::Binary | Algorithm::Linear => {
            let method = match algorithm {
                Algorithm::Binary => SearchMethod::Binary,
                _ => SearchMethod::Linear,
            };
            let sorted = graph.sorted_edges();
            let mut solver = PrefixSolver::new(
                &sorted,
                SolverOptions {
                    incremental: plan.incremental,
                },
            );
            for (i, &(s, t)) in pairs.iter().enumerate() {
                // Deadline granularity is one source query; at benchmark
                // scales a single query is far below the budget.
                if i > 0 && Instant::now() >= deadline {
                    return SolveOutcome::TimedOut;
                }
                solver
                    .solve(s, t, method)
                    .expect("pairs exclude the diagonal");
            }
            SolveOutcome::Completed
        }
        Algorithm::Exhaustive => {
            let limits = SearchLimits {
                max_paths: u64::MAX,
                deadline: Some(deadline),
            };
            for &(s, t) in &pairs {
                match total_effect_exhaustive_with_limits(graph, s, t, plan.exhaustive_prune, limits)
                {
                    Ok(_) => {}
                    Err(OracleError::TimeBudgetExceeded | OracleError::PathBudgetExceeded { .. }) => {
                        return SolveOutcome::TimedOut
                    }
                    Err(OracleError::SameConcept(_)) => {
                        unreachable!("pairs exclude the diagonal")
                    }
                }
            }
            SolveOutcome::Completed
        }
    }
}

/// Runs every cell of the plan and returns the records sorted by
/// `(algorithm, n, density, trial)`.
pub fn run_plan(plan: &BenchPlan) -> Result<Vec<BenchRecord>, BenchError> {
    plan.validate()?;
    let mut records = Vec::new();
    for &n in &plan.active_sizes() {
        for &density in &plan.densities {
            for trial in 0..plan.trials {
                let seed = cell_seed(plan.base_seed, n, density, trial);
                let cell_algorithms: Vec<Algorithm> = plan
                    .algorithms
                    .iter()
                    .copied()
                    .filter(|&a| plan.sizes_for(a).contains(&n))
                    .collect();
                if cell_algorithms.is_empty() {
                    continue;
                }
                let graph = generate(&GenSpec {
                    concepts: n,
                    density,
                    seed,
                    min_magnitude: plan.min_magnitude,
                })?;
                for algorithm in cell_algorithms {
                    let record = |elapsed_s: f64, status: RunStatus| BenchRecord {
                        algorithm,
                        n,
                        density,
                        trial,
                        seed,
                        elapsed_s,
                        status,
                    };
                    if plan.warmup {
                        let start = Instant::now();
                        let outcome =
                            run_algorithm(&graph, algorithm, plan, start + plan.cell_budget);
                        if outcome == SolveOutcome::TimedOut {
                            // The timed run would repeat the identical work,
                            // so don't burn a second budget confirming it.
                            records.push(record(
                                start.elapsed().as_secs_f64(),
                                RunStatus::BudgetExceeded,
                            ));
                            continue;
                        }
                    }
                    let start = Instant::now();
                    let outcome = run_algorithm(&graph, algorithm, plan, start + plan.cell_budget);
                    let elapsed_s = start.elapsed().as_secs_f64();
                    let status = match outcome {
                        SolveOutcome::Completed => RunStatus::Ok,
                        SolveOutcome::TimedOut => RunStatus::BudgetExceeded,
                    };
                    records.push(record(elapsed_s, status));
                }
            }
        }
    }
    records.sort_by(|a, b| {
        (a.algorithm, a.n, a.density.to_bits(), a.trial).cmp(&(
            b.algorithm,
            b.n,
            b.density.to_bits(),
            b.trial,
        ))
    });
    Ok(records)
}

/// Per-cell aggregate over the `ok` records; cut-off runs are counted, not
/// averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub algorithm: Algorithm,
    pub n: usize,
    pub density: f64,
    /// `None` when every record in the cell exceeded the budget.
    pub mean_s: Option<f64>,
    pub median_s: Option<f64>,
    pub min_s: Option<f64>,
    pub max_s: Option<f64>,
    pub exceeded: usize,
}

/// Mean of the per-density cell means at one size: with cell means
/// `m_1..m_D` over `D` densities, the overall mean is `(m_1+...+m_D)/D`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverallMean {
    pub algorithm: Algorithm,
    pub n: usize,
    pub mean_s: f64,
    /// How many densities contributed a mean.
    pub densities_counted: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub cells: Vec<CellStats>,
    pub overall: Vec<OverallMean>,
}

/// Aggregates records into per-cell stats plus the per-(algorithm, size)
/// overall means across densities.
pub fn summarize(records: &[BenchRecord]) -> Result<BenchSummary, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let mut groups: BTreeMap<(Algorithm, usize, u64), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.algorithm, r.n, r.density.to_bits()))
            .or_default()
            .push(r);
    }
    let mut cells = Vec::with_capacity(groups.len());
    for ((algorithm, n, density_bits), group) in groups {
        let mut ok: Vec<f64> = group
            .iter()
            .filter(|r| r.status == RunStatus::Ok)
            .map(|r| r.elapsed_s)
            .collect();
        ok.sort_by(|a, b| a.partial_cmp(b).expect("elapsed times are finite"));
        let exceeded = group.len() - ok.len();
        let stats = if ok.is_empty() {
            (None, None, None, None)
        } else {
            let mean = ok.iter().sum::<f64>() / ok.len() as f64;
            let median = if ok.len() % 2 == 1 {
                ok[ok.len() / 2]
            } else {
                (ok[ok.len() / 2 - 1] + ok[ok.len() / 2]) / 2.0
            };
            (
                Some(mean),
                Some(median),
                Some(ok[0]),
                Some(ok[ok.len() - 1]),
            )
        };
        cells.push(CellStats {
            algorithm,
            n,
            density: f64::from_bits(density_bits),
            mean_s: stats.0,
            median_s: stats.1,
            min_s: stats.2,
            max_s: stats.3,
            exceeded,
        });
    }
    let mut overall_groups: BTreeMap<(Algorithm, usize), (f64, usize)> = BTreeMap::new();
    for cell in &cells {
        if let Some(mean) = cell.mean_s {
            let entry = overall_groups
                .entry((cell.algorithm, cell.n))
                .or_insert((0.0, 0));
            entry.0 += mean;
            entry.1 += 1;
        }
    }
    let overall = overall_groups
        .into_iter()
        .map(|((algorithm, n), (sum, count))| OverallMean {
            algorithm,
            n,
            mean_s: sum / count as f64,
            densities_counted: count,
        })
        .collect();
    Ok(BenchSummary { cells, overall })
}

pub const RECORDS_HEADER: &str = "algorithm,n,density,trial,seed,elapsed_s,status";
pub const SUMMARY_HEADER: &str = "algorithm,n,density,mean_s,median_s,min_s,max_s,exceeded";
pub const OVERALL_HEADER: &str = "algorithm,n,overall_mean_s,densities";

fn opt(value: Option<f64>) -> String {
    value.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn format_records_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.algorithm, r.n, r.density, r.trial, r.seed, r.elapsed_s, r.status
        ));
    }
    out
}

/// Parses a records CSV written by [`format_records_csv`]. Shortest
/// round-trip float printing makes the parse exact, so a summary recomputed
/// from the file equals one computed from the in-memory records.
pub fn parse_records_csv(text: &str) -> Result<Vec<BenchRecord>, ReadError> {
    let syntax = |line: usize, message: String| ReadError::Syntax { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, header)) if header == RECORDS_HEADER => {}
        Some((line, header)) => {
            return Err(syntax(
                line,
                format!("expected header {RECORDS_HEADER:?}, found {header:?}"),
            ))
        }
        None => return Err(syntax(1, "empty records file".into())),
    }
    let mut records = Vec::new();
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 7 {
            return Err(syntax(line, format!("expected 7 fields, found {}", fields.len())));
        }
        let field = |what: &str, err: String| syntax(line, format!("bad {what}: {err}"));
        records.push(BenchRecord {
            algorithm: fields[0]
                .parse()
                .map_err(|e: String| field("algorithm", e))?,
            n: fields[1].parse().map_err(|e| field("n", format!("{e}")))?,
            density: fields[2]
                .parse()
                .map_err(|e| field("density", format!("{e}")))?,
            trial: fields[3]
                .parse()
                .map_err(|e| field("trial", format!("{e}")))?,
            seed: fields[4]
                .parse()
                .map_err(|e| field("seed", format!("{e}")))?,
            elapsed_s: fields[5]
                .parse()
                .map_err(|e| field("elapsed_s", format!("{e}")))?,
            status: fields[6]
                .parse()
                .map_err(|e: String| field("status", e))?,
        });
    }
    Ok(records)
}

pub fn format_summary_csv(cells: &[CellStats]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.algorithm,
            c.n,
            c.density,
            opt(c.mean_s),
            opt(c.median_s),
            opt(c.min_s),
            opt(c.max_s),
            c.exceeded
        ));
    }
    out
}

pub fn format_overall_csv(overall: &[OverallMean]) -> String {
    let mut out = String::from(OVERALL_HEADER);
    out.push('\n');
    for o in overall {
        out.push_str(&format!(
            "{},{},{},{}\n",
            o.algorithm, o.n, o.mean_s, o.densities_counted
        ));
    }
    out
}

/// Per-trial elapsed times at full density and the largest size present,
/// one column per algorithm — the spread of individual runs, for plotting.
/// Cut-off runs print as `NA`.
pub fn format_variability_csv(records: &[BenchRecord]) -> String {
    let dense: Vec<&BenchRecord> = records.iter().filter(|r| r.density == 1.0).collect();
    let Some(n) = dense.iter().map(|r| r.n).max() else {
        return "trial\n".to_string();
    };
    let at_n: Vec<&BenchRecord> = dense.into_iter().filter(|r| r.n == n).collect();
    let algorithms: BTreeSet<Algorithm> = at_n.iter().map(|r| r.algorithm).collect();
    let trials: BTreeSet<usize> = at_n.iter().map(|r| r.trial).collect();
    let mut out = String::from("trial");
    for a in &algorithms {
        out.push_str(&format!(",{a}_s"));
    }
    out.push('\n');
    for &trial in &trials {
        out.push_str(&trial.to_string());
        for &a in &algorithms {
            let cell = at_n
                .iter()
                .find(|r| r.trial == trial && r.algorithm == a)
                .map_or_else(
                    || "NA".to_string(),
                    |r| match r.status {
                        RunStatus::Ok => r.elapsed_s.to_string(),
                        RunStatus::BudgetExceeded => "NA".to_string(),
                    },
                );
            out.push(',');
            out.push_str(&cell);
        }
        out.push('\n');
    }
    out
}

/// Mean elapsed per density for each (algorithm, n) — the growth of cost
/// with density, for plotting. Cells with no completed runs print as `NA`.
pub fn format_density_sweep_csv(cells: &[CellStats]) -> String {
    let mut out = String::from("algorithm,n,density,mean_s");
    out.push('\n');
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.algorithm,
            c.n,
            c.density,
            opt(c.mean_s)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_plan() -> BenchPlan {
        BenchPlan {
            algorithms: vec![Algorithm::Binary, Algorithm::Linear],
            sizes: vec![10],
            exhaustive_sizes: vec![],
            densities: vec![1.0],
            trials: 3,
            warmup: false,
            ..BenchPlan::default()
        }
    }

    fn strip_times(records: &[BenchRecord]) -> Vec<(Algorithm, usize, u64, usize, u64, RunStatus)> {
        records
            .iter()
            .map(|r| (r.algorithm, r.n, r.density.to_bits(), r.trial, r.seed, r.status))
            .collect()
    }

    #[test]
    fn record_count_and_order_match_the_plan() {
        let records = run_plan(&quick_plan()).unwrap();
        assert_eq!(records.len(), 6);
        assert!(records.iter().all(|r| r.status == RunStatus::Ok));
        assert!(records.iter().all(|r| r.elapsed_s >= 0.0));
        let keys: Vec<_> = records
            .iter()
            .map(|r| (r.algorithm, r.n, r.density.to_bits(), r.trial))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for r in &records {
            assert_eq!(r.seed, cell_seed(42, r.n, r.density, r.trial));
        }
    }

    #[test]
    fn rerunning_a_plan_reproduces_everything_but_the_times() {
        let plan = quick_plan();
        let a = run_plan(&plan).unwrap();
        let b = run_plan(&plan).unwrap();
        assert_eq!(strip_times(&a), strip_times(&b));
    }

    #[test]
    fn exhaustive_honours_its_own_size_list() {
        let plan = BenchPlan {
            algorithms: vec![Algorithm::Binary, Algorithm::Exhaustive],
            sizes: vec![10],
            exhaustive_sizes: vec![5],
            densities: vec![1.0],
            trials: 2,
            warmup: false,
            ..BenchPlan::default()
        };
        let records = run_plan(&plan).unwrap();
        let by_algo = |a: Algorithm| -> Vec<usize> {
            records
                .iter()
                .filter(|r| r.algorithm == a)
                .map(|r| r.n)
                .collect()
        };
        assert_eq!(by_algo(Algorithm::Binary), vec![10, 10]);
        assert_eq!(by_algo(Algorithm::Exhaustive), vec![5, 5]);
    }

    #[test]
    fn tiny_budget_is_recorded_not_dropped() {
        let plan = BenchPlan {
            algorithms: vec![Algorithm::Exhaustive],
            sizes: vec![],
            exhaustive_sizes: vec![11],
            densities: vec![1.0],
            trials: 1,
            cell_budget: Duration::from_micros(50),
            warmup: false,
            ..BenchPlan::default()
        };
        let records = run_plan(&plan).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].status, RunStatus::BudgetExceeded);
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let base = BenchPlan::default();
        let bad = [
            BenchPlan {
                algorithms: vec![],
                ..base.clone()
            },
            BenchPlan {
                algorithms: vec![Algorithm::Binary, Algorithm::Binary],
                ..base.clone()
            },
            BenchPlan {
                trials: 0,
                ..base.clone()
            },
            BenchPlan {
                densities: vec![],
                ..base.clone()
            },
            BenchPlan {
                densities: vec![0.0],
                ..base.clone()
            },
            BenchPlan {
                densities: vec![1.5],
                ..base.clone()
            },
            BenchPlan {
                sizes: vec![1],
                ..base.clone()
            },
            BenchPlan {
                cell_budget: Duration::ZERO,
                ..base.clone()
            },
            // 0.01 of 10*9 = 0.9 edges rounds to 1; of 2*1 rounds to 0.
            BenchPlan {
                sizes: vec![2],
                densities: vec![0.1],
                ..base.clone()
            },
            BenchPlan {
                algorithms: vec![Algorithm::Exhaustive],
                exhaustive_sizes: vec![20],
                ..base.clone()
            },
        ];
        for plan in bad {
            assert!(
                matches!(run_plan(&plan), Err(BenchError::InvalidPlan(_))),
                "{plan:?} should be rejected"
            );
        }
        // The same oversized exhaustive grid is accepted when forced.
        let forced = BenchPlan {
            algorithms: vec![Algorithm::Exhaustive],
            exhaustive_sizes: vec![20],
            allow_large_exhaustive: true,
            trials: 1,
            cell_budget: Duration::from_millis(5),
            warmup: false,
            ..base
        };
        let records = run_plan(&forced).unwrap();
        assert!(records
            .iter()
            .all(|r| r.status == RunStatus::BudgetExceeded));
    }

    #[test]
    fn summary_stats_are_correct() {
        let record = |algorithm, density: f64, trial, elapsed_s, status| BenchRecord {
            algorithm,
            n: 10,
            density,
            trial,
            seed: 0,
            elapsed_s,
            status,
        };
        let records = vec![
            record(Algorithm::Binary, 0.5, 0, 1.0, RunStatus::Ok),
            record(Algorithm::Binary, 0.5, 1, 3.0, RunStatus::Ok),
            record(Algorithm::Binary, 0.5, 2, 2.0, RunStatus::Ok),
            record(Algorithm::Binary, 0.5, 3, 100.0, RunStatus::BudgetExceeded),
            record(Algorithm::Binary, 1.0, 0, 3.0, RunStatus::Ok),
            record(Algorithm::Binary, 1.0, 1, 3.0, RunStatus::Ok),
            record(Algorithm::Linear, 1.0, 0, 9.0, RunStatus::BudgetExceeded),
        ];
        let summary = summarize(&records).unwrap();
        assert_eq!(summary.cells.len(), 3);

        let half = &summary.cells[0];
        assert_eq!((half.algorithm, half.n, half.density), (Algorithm::Binary, 10, 0.5));
        assert_eq!(half.mean_s, Some(2.0));
        assert_eq!(half.median_s, Some(2.0));
        assert_eq!(half.min_s, Some(1.0));
        assert_eq!(half.max_s, Some(3.0));
        assert_eq!(half.exceeded, 1);

        let full = &summary.cells[1];
        assert_eq!(full.mean_s, Some(3.0));
        assert_eq!(full.exceeded, 0);

        let dead = &summary.cells[2];
        assert_eq!(dead.algorithm, Algorithm::Linear);
        assert_eq!(dead.mean_s, None);
        assert_eq!(dead.exceeded, 1);

        // Overall mean = mean of the cell means: (2.0 + 3.0) / 2.
        assert_eq!(summary.overall.len(), 1);
        let overall = &summary.overall[0];
        assert_eq!((overall.algorithm, overall.n), (Algorithm::Binary, 10));
        assert_eq!(overall.mean_s, 2.5);
        assert_eq!(overall.densities_counted, 2);
    }

    #[test]
    fn single_cell_overall_mean_is_that_cells_mean() {
        let records = vec![BenchRecord {
            algorithm: Algorithm::Binary,
            n: 5,
            density: 1.0,
            trial: 0,
            seed: 0,
            elapsed_s: 4.0,
            status: RunStatus::Ok,
        }];
        let summary = summarize(&records).unwrap();
        assert_eq!(summary.overall[0].mean_s, 4.0);
    }

    #[test]
    fn empty_records_are_an_error() {
        assert!(matches!(summarize(&[]), Err(BenchError::EmptyInput)));
    }

    #[test]
    fn records_csv_round_trips_and_summary_is_rederivable() {
        let plan = quick_plan();
        let records = run_plan(&plan).unwrap();
        let csv = format_records_csv(&records);
        assert!(csv.starts_with(RECORDS_HEADER));
        let parsed = parse_records_csv(&csv).unwrap();
        assert_eq!(records, parsed);

        let direct = format_summary_csv(&summarize(&records).unwrap().cells);
        let rederived = format_summary_csv(&summarize(&parsed).unwrap().cells);
        assert_eq!(direct, rederived);
    }

    #[test]
    fn records_csv_parse_errors_name_the_line() {
        let err = parse_records_csv("nope\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
        let err =
            parse_records_csv(&format!("{RECORDS_HEADER}\nbinary,10,1,0,7,0.5\n")).unwrap_err();
        assert_eq!(err.line(), Some(2));
        let err = parse_records_csv(&format!("{RECORDS_HEADER}\nwarp,10,1,0,7,0.5,ok\n"))
            .unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(err.to_string().contains("algorithm"));
    }

    #[test]
    fn variability_csv_is_wide_by_algorithm() {
        let record = |algorithm, n, trial, elapsed_s, status| BenchRecord {
            algorithm,
            n,
            density: 1.0,
            trial,
            seed: 0,
            elapsed_s,
            status,
        };
        let records = vec![
            record(Algorithm::Binary, 50, 0, 0.5, RunStatus::Ok),
            record(Algorithm::Binary, 50, 1, 0.6, RunStatus::Ok),
            record(Algorithm::Linear, 50, 0, 1.5, RunStatus::Ok),
            record(Algorithm::Linear, 50, 1, 9.0, RunStatus::BudgetExceeded),
            // Smaller n is ignored; the sheet tracks the largest size.
            record(Algorithm::Binary, 10, 0, 0.1, RunStatus::Ok),
        ];
        let csv = format_variability_csv(&records);
        assert_eq!(csv, "trial,binary_s,linear_s\n0,0.5,1.5\n1,0.6,NA\n");
    }

    #[test]
    fn density_sweep_csv_lists_means_per_density() {
        let cells = vec![
            CellStats {
                algorithm: Algorithm::Exhaustive,
                n: 12,
                density: 0.5,
                mean_s: Some(0.25),
                median_s: Some(0.25),
                min_s: Some(0.2),
                max_s: Some(0.3),
                exceeded: 0,
            },
            CellStats {
                algorithm: Algorithm::Exhaustive,
                n: 12,
                density: 1.0,
                mean_s: None,
                median_s: None,
                min_s: None,
                max_s: None,
                exceeded: 3,
            },
        ];
        let csv = format_density_sweep_csv(&cells);
        assert_eq!(
            csv,
            "algorithm,n,density,mean_s\nexhaustive,12,0.5,0.25\nexhaustive,12,1,NA\n"
        );
    }

    #[test]
    fn seed_hash_is_stable_and_sensitive_to_every_coordinate() {
        let base = cell_seed(42, 10, 1.0, 0);
        assert_eq!(base, cell_seed(42, 10, 1.0, 0));
        assert_ne!(base, cell_seed(43, 10, 1.0, 0));
        assert_ne!(base, cell_seed(42, 11, 1.0, 0));
        assert_ne!(base, cell_seed(42, 10, 0.5, 0));
        assert_ne!(base, cell_seed(42, 10, 1.0, 1));
    }

    #[test]
    fn algorithm_and_status_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        for s in [RunStatus::Ok, RunStatus::BudgetExceeded] {
            assert_eq!(s.name().parse::<RunStatus>().unwrap(), s);
        }
        assert!("warp".parse::<Algorithm>().is_err());
        assert!("fine".parse::<RunStatus>().is_err());
    }
}
