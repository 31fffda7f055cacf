//! Exhaustive path enumeration: the reference implementation.
//!
//! Enumerates every simple directed path from source to target by
//! depth-first search with backtracking, scoring each path by its minimum
//! edge weight and keeping the running maximum. Path counts grow factorially
//! with map size — a fully connected 13-concept map already has on the order
//! of 10^8 simple paths between a pair — so enumeration only serves as a
//! correctness oracle and as the slow baseline in benchmark comparisons.
//! Budgets on path count and wall-clock time keep runaway inputs from
//! hanging a process.

use std::time::Instant;

use thiserror::Error;

use crate::graph::{ConceptId, FcmGraph};

/// Default cap on enumerated paths (10^8).
pub const DEFAULT_PATH_BUDGET: u64 = 100_000_000;

/// A single directed path and its indirect effect (the minimum weight along
/// it).
#[derive(Debug, Clone, PartialEq)]
pub struct PathEffect {
    pub path: Vec<ConceptId>,
    pub indirect_effect: f64,
}

/// Resource caps for an enumeration run.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Maximum number of complete paths to enumerate.
    pub max_paths: u64,
    /// Absolute wall-clock cutoff, if any.
    pub deadline: Option<Instant>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_paths: DEFAULT_PATH_BUDGET,
            deadline: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("total effect of concept {0} on itself is not defined")]
    SameConcept(ConceptId),
    #[error("path budget of {budget} paths exhausted before the search completed")]
    PathBudgetExceeded { budget: u64 },
    #[error("time budget exhausted before the search completed")]
    TimeBudgetExceeded,
}

/// Outcome of an exhaustive query, mirroring the solver's result shape plus
/// the number of complete paths visited.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveResult {
    pub source: ConceptId,
    pub target: ConceptId,
    pub value: f64,
    /// 1-based rank, in the descending-weight edge order, of the entry whose
    /// weight equals the total effect — comparable with the prefix solvers'
    /// `critical_index`.
    pub critical_index: Option<usize>,
    pub path_found: bool,
    /// Complete source-to-target paths examined (after any pruning).
    pub paths_examined: u64,
}

struct DfsState<'a> {
    /// Outgoing `(target, weight, rank)` per concept; rank is the 1-based
    /// position in the descending-weight order.
    adjacency: &'a [Vec<(usize, f64, usize)>],
    target: usize,
    prune: bool,
    on_path: Vec<bool>,
    /// Best (value, max rank along path) so far; rank ties toward smaller.
    best: Option<(f64, usize)>,
    paths_examined: u64,
    paths_remaining: u64,
    deadline: Option<Instant>,
    /// Expansion countdown between deadline checks; an `Instant::now()` per
    /// node would dominate the search.
    deadline_check_countdown: u32,
}

const DEADLINE_CHECK_INTERVAL: u32 = 4096;

impl DfsState<'_> {
    fn run(&mut self, node: usize, running_min: f64, running_max_rank: usize) -> Result<(), OracleError> {
        if let Some(deadline) = self.deadline {
            self.deadline_check_countdown -= 1;
            if self.deadline_check_countdown == 0 {
                self.deadline_check_countdown = DEADLINE_CHECK_INTERVAL;
                if Instant::now() >= deadline {
                    return Err(OracleError::TimeBudgetExceeded);
                }
            }
        }
        for &(next, weight, rank) in &self.adjacency[node] {
            if self.on_path[next] {
                continue;
            }
            let min = running_min.min(weight);
            let max_rank = running_max_rank.max(rank);
            if self.prune {
                // A path can never score above its current minimum, so once
                // that falls to the best value already found the whole
                // subtree is dominated and can be cut.
                if let Some((best_value, _)) = self.best {
                    if min <= best_value {
                        continue;
                    }
                }
            }
            if next == self.target {
                if self.paths_remaining == 0 {
                    return Err(OracleError::PathBudgetExceeded {
                        budget: self.paths_examined,
                    });
                }
                self.paths_remaining -= 1;
                self.paths_examined += 1;
                let better = match self.best {
                    None => true,
                    Some((best_value, best_rank)) => {
                        min > best_value || (min == best_value && max_rank < best_rank)
                    }
                };
                if better {
                    self.best = Some((min, max_rank));
                }
                continue;
            }
            self.on_path[next] = true;
            let outcome = self.run(next, min, max_rank);
            self.on_path[next] = false;
            outcome?;
        }
        Ok(())
    }
}

fn ranked_adjacency(graph: &FcmGraph) -> Vec<Vec<(usize, f64, usize)>> {
    let sorted = graph.sorted_edges();
    let n = graph.concept_count();
    let mut rank_of = vec![0usize; n * n];
    for (i, edge) in sorted.entries().iter().enumerate() {
        rank_of[edge.source.index() * n + edge.target.index()] = i + 1;
    }
    let mut adjacency = vec![Vec::new(); n];
    for edge in graph.edges() {
        let (s, t) = (edge.source.index(), edge.target.index());
        adjacency[s].push((t, edge.weight, rank_of[s * n + t]));
    }
    adjacency
}

/// Total causal effect by full enumeration, under explicit resource limits.
///
/// With `prune` set, subtrees whose running minimum cannot beat the best
/// value found so far are cut. Pruning never changes `value` or
/// `path_found`; when several edges share the answering weight it may settle
/// on a different (never smaller-valued) entry for `critical_index`, because
/// the dominated path that would have claimed the earlier rank is skipped.
pub fn total_effect_exhaustive_with_limits(
    graph: &FcmGraph,
    source: ConceptId,
    target: ConceptId,
    prune: bool,
    limits: SearchLimits,
) -> Result<ExhaustiveResult, OracleError> {
    if source == target {
        return Err(OracleError::SameConcept(source));
    }
    let adjacency = ranked_adjacency(graph);
    let mut state = DfsState {
        adjacency: &adjacency,
        target: target.index(),
        prune,
        on_path: vec![false; graph.concept_count()],
        best: None,
        paths_examined: 0,
        paths_remaining: limits.max_paths,
        deadline: limits.deadline,
        deadline_check_countdown: DEADLINE_CHECK_INTERVAL,
    };
    state.on_path[source.index()] = true;
    state.run(source.index(), f64::INFINITY, 0)?;
    Ok(match state.best {
        Some((value, max_rank)) => ExhaustiveResult {
            source,
            target,
            value,
            critical_index: Some(max_rank),
            path_found: true,
            paths_examined: state.paths_examined,
        },
        None => ExhaustiveResult {
            source,
            target,
            value: 0.0,
            critical_index: None,
            path_found: false,
            paths_examined: state.paths_examined,
        },
    })
}

/// Total causal effect by full enumeration under the default path budget.
pub fn total_effect_exhaustive(
    graph: &FcmGraph,
    source: ConceptId,
    target: ConceptId,
    prune: bool,
) -> Result<ExhaustiveResult, OracleError> {
    total_effect_exhaustive_with_limits(graph, source, target, prune, SearchLimits::default())
}

/// Every simple path from `source` to `target` with its indirect effect, in
/// depth-first order (neighbors by ascending concept index).
///
/// Intended for small maps and diagnostics; the result can be factorially
/// large.
pub fn enumerate_path_effects(
    graph: &FcmGraph,
    source: ConceptId,
    target: ConceptId,
    limits: SearchLimits,
) -> Result<Vec<PathEffect>, OracleError> {
    if source == target {
        return Err(OracleError::SameConcept(source));
    }

    fn recurse(
        adjacency: &[Vec<(ConceptId, f64)>],
        target: usize,
        on_path: &mut [bool],
        path: &mut Vec<ConceptId>,
        running_min: f64,
        out: &mut Vec<PathEffect>,
        paths_remaining: &mut u64,
        deadline: Option<Instant>,
    ) -> Result<(), OracleError> {
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                return Err(OracleError::TimeBudgetExceeded);
            }
        }
        let node = path.last().expect("path starts at source").index();
        for &(next, weight) in &adjacency[node] {
            if on_path[next.index()] {
                continue;
            }
            let min = running_min.min(weight);
            path.push(next);
            if next.index() == target {
                if *paths_remaining == 0 {
                    path.pop();
                    return Err(OracleError::PathBudgetExceeded {
                        budget: out.len() as u64,
                    });
                }
                *paths_remaining -= 1;
                out.push(PathEffect {
                    path: path.clone(),
                    indirect_effect: min,
                });
            } else {
                on_path[next.index()] = true;
                let outcome = recurse(
                    adjacency,
                    target,
                    on_path,
                    path,
                    min,
                    out,
                    paths_remaining,
                    deadline,
                );
                on_path[next.index()] = false;
                if outcome.is_err() {
                    path.pop();
                    return outcome;
                }
            }
            path.pop();
        }
        Ok(())
    }

    let adjacency: Vec<Vec<(ConceptId, f64)>> = (0..graph.concept_count())
        .map(|i| graph.out_neighbors(ConceptId(i)).to_vec())
        .collect();
    let mut on_path = vec![false; graph.concept_count()];
    let mut path = vec![source];
    let mut out = Vec::new();
    let mut paths_remaining = limits.max_paths;
    on_path[source.index()] = true;
    recurse(
        &adjacency,
        target.index(),
        &mut on_path,
        &mut path,
        f64::INFINITY,
        &mut out,
        &mut paths_remaining,
        limits.deadline,
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::graph::Edge;

    fn four_concept_graph() -> FcmGraph {
        FcmGraph::from_dense_matrix(&[
            vec![0.0, 0.0, 0.6, 0.0],
            vec![0.68, 0.0, 0.0, -0.7],
            vec![0.15, 0.0, 0.0, 0.0],
            vec![0.0, -0.25, 0.36, 0.0],
        ])
        .unwrap()
    }

    fn complete_graph(n: usize) -> FcmGraph {
        let mut edges = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if s != t {
                    // Distinct weights so every query has a unique answer.
                    edges.push(Edge::new(s, t, (s * n + t) as f64 / (n * n) as f64));
                }
            }
        }
        FcmGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn enumerates_both_paths_of_the_example() {
        let g = four_concept_graph();
        let paths =
            enumerate_path_effects(&g, ConceptId(1), ConceptId(2), SearchLimits::default())
                .unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(
            paths[0].path,
            vec![ConceptId(1), ConceptId(0), ConceptId(2)]
        );
        assert_eq!(paths[0].indirect_effect, 0.6);
        assert_eq!(
            paths[1].path,
            vec![ConceptId(1), ConceptId(3), ConceptId(2)]
        );
        assert_eq!(paths[1].indirect_effect, -0.7);
    }

    #[test]
    fn exhaustive_matches_known_effects() {
        let g = four_concept_graph();
        for prune in [false, true] {
            let r = total_effect_exhaustive(&g, ConceptId(1), ConceptId(2), prune).unwrap();
            assert_eq!(r.value, 0.6);
            assert_eq!(r.critical_index, Some(2));
            let r = total_effect_exhaustive(&g, ConceptId(3), ConceptId(0), prune).unwrap();
            assert_eq!(r.value, 0.15);
            assert_eq!(r.critical_index, Some(4));
            let r = total_effect_exhaustive(&g, ConceptId(0), ConceptId(1), prune).unwrap();
            assert!(!r.path_found);
            assert_eq!(r.value, 0.0);
        }
    }

    #[test]
    fn path_counts_on_complete_graphs() {
        // Between a fixed pair in a complete digraph on n nodes the number
        // of simple paths is sum over k of (n-2)!/(n-2-k)! for k
        // intermediate nodes: 5 paths for n = 4, 16 for n = 5.
        for (n, expected) in [(4, 5), (5, 16)] {
            let g = complete_graph(n);
            let paths =
                enumerate_path_effects(&g, ConceptId(0), ConceptId(n - 1), SearchLimits::default())
                    .unwrap();
            assert_eq!(paths.len(), expected);
            let r = total_effect_exhaustive(&g, ConceptId(0), ConceptId(n - 1), false).unwrap();
            assert_eq!(r.paths_examined, expected as u64);
        }
    }

    #[test]
    fn pruning_preserves_the_value_and_examines_fewer_paths() {
        let g = complete_graph(7);
        for s in 0..7 {
            for t in 0..7 {
                if s == t {
                    continue;
                }
                let full =
                    total_effect_exhaustive(&g, ConceptId(s), ConceptId(t), false).unwrap();
                let pruned =
                    total_effect_exhaustive(&g, ConceptId(s), ConceptId(t), true).unwrap();
                assert_eq!(full.value, pruned.value, "{s}->{t}");
                assert_eq!(full.path_found, pruned.path_found);
                assert!(pruned.paths_examined <= full.paths_examined);
            }
        }
    }

    #[test]
    fn path_budget_is_enforced() {
        let g = complete_graph(6);
        let limits = SearchLimits {
            max_paths: 10,
            deadline: None,
        };
        let err =
            total_effect_exhaustive_with_limits(&g, ConceptId(0), ConceptId(5), false, limits)
                .unwrap_err();
        assert_eq!(err, OracleError::PathBudgetExceeded { budget: 10 });
        let err = enumerate_path_effects(&g, ConceptId(0), ConceptId(5), limits).unwrap_err();
        assert_eq!(err, OracleError::PathBudgetExceeded { budget: 10 });
    }

    #[test]
    fn expired_deadline_is_reported() {
        let g = complete_graph(9);
        let limits = SearchLimits {
            max_paths: u64::MAX,
            deadline: Some(Instant::now() - Duration::from_millis(1)),
        };
        // The interval between deadline checks means tiny searches can
        // finish before the first check; with n = 9 there are enough
        // expansions to guarantee one.
        let err =
            total_effect_exhaustive_with_limits(&g, ConceptId(0), ConceptId(8), false, limits)
                .unwrap_err();
        assert_eq!(err, OracleError::TimeBudgetExceeded);
    }

    #[test]
    fn same_concept_is_an_error() {
        let g = four_concept_graph();
        assert_eq!(
            total_effect_exhaustive(&g, ConceptId(1), ConceptId(1), false).unwrap_err(),
            OracleError::SameConcept(ConceptId(1))
        );
    }
}
