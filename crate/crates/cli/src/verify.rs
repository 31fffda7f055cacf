//! Self-check: random maps, three algorithms, zero tolerance.
//!
//! Generates seeded random maps and solves every ordered pair with the
//! binary-search solver, the linear-scan solver, and the exhaustive
//! enumerator. The three must agree exactly — same value bits, same
//! critical prefix index, same path verdict. Any difference is reported
//! with the generating spec so the case can be replayed in isolation.

use fcm_core::bench::splitmix64;
use fcm_core::graph::ConceptId;
use fcm_core::oracle::total_effect_exhaustive;
use fcm_core::solver::{PrefixSolver, SearchMethod, SolverOptions, TotalEffectResult};
use fcm_core::synthgen::{generate, GenSpec};

const DENSITIES: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub spec: GenSpec,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct VerifyReport {
    pub graphs_checked: usize,
    pub pairs_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Spec for the i-th verification graph: sizes cycle `3..=max_concepts`,
/// densities cycle 0.2 through 1.0, and each graph gets its own derived
/// seed.
pub fn verify_spec(base_seed: u64, max_concepts: usize, index: usize) -> GenSpec {
    let span = max_concepts - 2; // sizes 3..=max_concepts
    GenSpec::new(
        3 + index % span,
        DENSITIES[(index / span) % DENSITIES.len()],
        splitmix64(base_seed ^ index as u64),
    )
}

/// Describes how two solver answers for one pair differ, if they do.
/// Comparison is exact: solvers only copy weights, so there is no tolerance
/// to grant.
pub fn diff_results(
    left_name: &str,
    left: &TotalEffectResult,
    right_name: &str,
    right: &TotalEffectResult,
) -> Option<String> {
    let (s, t) = (left.source, left.target);
    if left.value != right.value {
        return Some(format!(
            "pair {s}->{t}: {left_name} value {} != {right_name} value {}",
            left.value, right.value
        ));
    }
    if left.path_found != right.path_found {
        return Some(format!(
            "pair {s}->{t}: {left_name} path_found {} != {right_name} path_found {}",
            left.path_found, right.path_found
        ));
    }
    if left.critical_index != right.critical_index {
        return Some(format!(
            "pair {s}->{t}: {left_name} critical index {:?} != {right_name} critical index {:?}",
            left.critical_index, right.critical_index
        ));
    }
    None
}

/// Checks `graphs` random maps; stops collecting after `max_mismatches`
/// reports so a systematic fault doesn't flood the output.
pub fn run(base_seed: u64, max_concepts: usize, graphs: usize, max_mismatches: usize) -> VerifyReport {
    let mut report = VerifyReport::default();
    for index in 0..graphs {
        let spec = verify_spec(base_seed, max_concepts, index);
        let graph = generate(&spec).expect("verification specs are valid by construction");
        report.graphs_checked += 1;
        let sorted = graph.sorted_edges();
        let mut solver = PrefixSolver::new(&sorted, SolverOptions::default());
        let n = graph.concept_count();
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let (s, t) = (ConceptId(s), ConceptId(t));
                let binary = solver.solve(s, t, SearchMethod::Binary).unwrap();
                let linear = solver.solve(s, t, SearchMethod::Linear).unwrap();
                let oracle = total_effect_exhaustive(&graph, s, t, false).unwrap();
                let oracle = TotalEffectResult {
                    source: oracle.source,
                    target: oracle.target,
                    value: oracle.value,
                    critical_index: oracle.critical_index,
                    path_found: oracle.path_found,
                };
                report.pairs_checked += 1;
                for detail in [
                    diff_results("binary", &binary, "linear", &linear),
                    diff_results("binary", &binary, "exhaustive", &oracle),
                ]
                .into_iter()
                .flatten()
                {
                    if report.mismatches.len() < max_mismatches {
                        report.mismatches.push(Mismatch { spec, detail });
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(value: f64, critical_index: Option<usize>, path_found: bool) -> TotalEffectResult {
        TotalEffectResult {
            source: ConceptId(0),
            target: ConceptId(1),
            value,
            critical_index,
            path_found,
        }
    }

    #[test]
    fn identical_results_produce_no_diff() {
        let a = result(0.5, Some(3), true);
        assert_eq!(diff_results("x", &a, "y", &a.clone()), None);
    }

    #[test]
    fn each_field_difference_is_reported() {
        // The comparator is itself load-bearing for `verify`; feed it
        // doctored disagreements and make sure none slip through.
        let base = result(0.5, Some(3), true);
        let wrong_value = result(0.25, Some(3), true);
        let wrong_index = result(0.5, Some(4), true);
        let wrong_path = result(0.0, None, false);

        let diff = diff_results("binary", &base, "linear", &wrong_value).unwrap();
        assert!(diff.contains("value"), "{diff}");
        let diff = diff_results("binary", &base, "linear", &wrong_index).unwrap();
        assert!(diff.contains("critical index"), "{diff}");
        // value differs first for wrong_path; check the path field alone
        let path_only = result(0.5, Some(3), false);
        let diff = diff_results("binary", &base, "exhaustive", &path_only).unwrap();
        assert!(diff.contains("path_found"), "{diff}");
        assert!(diff_results("binary", &base, "exhaustive", &wrong_path).is_some());
    }

    #[test]
    fn specs_cycle_sizes_and_densities_deterministically() {
        let a = verify_spec(9, 9, 0);
        let b = verify_spec(9, 9, 0);
        assert_eq!(a, b);
        assert_eq!(a.concepts, 3);
        for index in 0..70 {
            let spec = verify_spec(9, 9, index);
            assert!((3..=9).contains(&spec.concepts));
            assert!(DENSITIES.contains(&spec.density));
        }
        // All sizes and all densities appear within one full cycle.
        let specs: Vec<GenSpec> = (0..35).map(|i| verify_spec(9, 9, i)).collect();
        for n in 3..=9 {
            assert!(specs.iter().any(|s| s.concepts == n));
        }
        for d in DENSITIES {
            assert!(specs.iter().any(|s| s.density == d));
        }
    }

    #[test]
    fn clean_run_reports_no_mismatches() {
        let report = run(123, 6, 10, 16);
        assert_eq!(report.graphs_checked, 10);
        assert!(report.pairs_checked > 0);
        assert!(report.mismatches.is_empty());
    }

    #[test]
    fn zero_graphs_is_an_empty_clean_report() {
        let report = run(1, 9, 0, 16);
        assert_eq!(report.graphs_checked, 0);
        assert_eq!(report.pairs_checked, 0);
        assert!(report.mismatches.is_empty());
    }
}
