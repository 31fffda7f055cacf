//! Total-causal-effect solvers built on prefix reachability.
//!
//! The total causal effect from concept `s` to concept `t` is the maximum,
//! over all directed paths from `s` to `t`, of the minimum edge weight along
//! the path — the widest-path (maximum-bottleneck) value under the fuzzy
//! min/max algebra.
//!
//! The solvers here never enumerate paths. Sort the edges by descending
//! weight and consider the subgraph made of the first `k` entries: if `t` is
//! reachable from `s` using `k` edges it stays reachable for every larger
//! `k`, so reachability is monotone in the prefix length. The smallest
//! prefix length `k*` at which `t` becomes reachable pins the answer — every
//! path inside that prefix has bottleneck at least `entries[k*-1].weight`,
//! and some path attains it (a smaller bottleneck would mean the path
//! appeared in a shorter prefix). The total effect is therefore the weight
//! of the `k*`-th sorted entry, found either by binary search over `k`
//! (`O(log e)` reachability probes) or by a linear scan (`O(e)` probes in
//! the worst case). Each probe is one breadth-first search, `O(n + k)`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{ConceptId, FcmGraph, SortedEdgeList};

/// How the solver locates the minimal reachable prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// Binary search over the prefix length: `O(log e)` reachability probes.
    Binary,
    /// Scan prefix lengths `1, 2, ...` until the target becomes reachable.
    Linear,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Reuse the probe subgraph between probes by adding/removing only the
    /// edges that differ, instead of rebuilding it from scratch. Same
    /// answers, different constant factor; off by default so measured
    /// timings reflect the plain algorithm.
    pub incremental: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("total effect of concept {0} on itself is not defined")]
    SameConcept(ConceptId),
}

/// Outcome of a single source/target query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalEffectResult {
    pub source: ConceptId,
    pub target: ConceptId,
    /// Widest-path value, or `0.0` when no directed path exists.
    pub value: f64,
    /// 1-based rank of the sorted entry whose weight is the answer; `None`
    /// when no path exists.
    pub critical_index: Option<usize>,
    pub path_found: bool,
}

/// A borrowed prefix of a sorted edge list, viewed as a subgraph.
#[derive(Debug, Clone, Copy)]
pub struct PrefixSubgraphView<'a> {
    sorted: &'a SortedEdgeList,
    prefix_len: usize,
}

impl<'a> PrefixSubgraphView<'a> {
    /// Panics if `prefix_len` exceeds the number of entries.
    pub fn new(sorted: &'a SortedEdgeList, prefix_len: usize) -> Self {
        assert!(
            prefix_len <= sorted.len(),
            "prefix length {prefix_len} exceeds edge count {}",
            sorted.len()
        );
        PrefixSubgraphView { sorted, prefix_len }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }
}

/// Breadth-first reachability of `target` from `source` within a prefix
/// subgraph. A concept trivially reaches itself.
pub fn reachable(view: PrefixSubgraphView<'_>, source: ConceptId, target: ConceptId) -> bool {
    let n = view.sorted.concept_count();
    let mut adjacency = vec![Vec::new(); n];
    for edge in &view.sorted.entries()[..view.prefix_len] {
        adjacency[edge.source.index()].push(edge.target.index());
    }
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    bfs_reaches(
        &adjacency,
        source.index(),
        target.index(),
        &mut visited,
        &mut queue,
    )
}

/// BFS core shared by the one-shot view probe and the reusable workspace.
/// `visited` must be all-false on entry; it is left dirty for the caller to
/// reset.
fn bfs_reaches(
    adjacency: &[Vec<usize>],
    source: usize,
    target: usize,
    visited: &mut [bool],
    queue: &mut VecDeque<usize>,
) -> bool {
    if source == target {
        return true;
    }
    queue.clear();
    visited[source] = true;
    queue.push_back(source);
    while let Some(node) = queue.pop_front() {
        for &next in &adjacency[node] {
            if next == target {
                return true;
            }
            if !visited[next] {
                visited[next] = true;
                queue.push_back(next);
            }
        }
    }
    false
}

/// Scratch buffers reused across reachability probes so a query allocates
/// once, not once per probe.
struct ProbeWorkspace {
    adjacency: Vec<Vec<usize>>,
    visited: Vec<bool>,
    queue: VecDeque<usize>,
    /// Number of sorted entries currently loaded into `adjacency`.
    built: usize,
}

impl ProbeWorkspace {
    fn new(concept_count: usize) -> Self {
        ProbeWorkspace {
            adjacency: vec![Vec::new(); concept_count],
            visited: vec![false; concept_count],
            queue: VecDeque::new(),
            built: 0,
        }
    }

    fn rebuild_prefix(&mut self, sorted: &SortedEdgeList, prefix_len: usize) {
        for list in &mut self.adjacency {
            list.clear();
        }
        for edge in &sorted.entries()[..prefix_len] {
            self.adjacency[edge.source.index()].push(edge.target.index());
        }
        self.built = prefix_len;
    }

    /// Grows or shrinks the loaded prefix edge by edge. Edges are appended
    /// in rank order and removed in reverse rank order, so each adjacency
    /// list behaves as a stack and shrinking is a series of pops.
    fn adjust_prefix(&mut self, sorted: &SortedEdgeList, prefix_len: usize) {
        while self.built < prefix_len {
            let edge = sorted.entry(self.built + 1);
            self.adjacency[edge.source.index()].push(edge.target.index());
            self.built += 1;
        }
        while self.built > prefix_len {
            let edge = sorted.entry(self.built);
            let popped = self.adjacency[edge.source.index()].pop();
            debug_assert_eq!(popped, Some(edge.target.index()));
            self.built -= 1;
        }
    }

    fn probe(
        &mut self,
        sorted: &SortedEdgeList,
        prefix_len: usize,
        source: ConceptId,
        target: ConceptId,
        incremental: bool,
    ) -> bool {
        if incremental {
            self.adjust_prefix(sorted, prefix_len);
        } else {
            self.rebuild_prefix(sorted, prefix_len);
        }
        let hit = bfs_reaches(
            &self.adjacency,
            source.index(),
            target.index(),
            &mut self.visited,
            &mut self.queue,
        );
        self.visited.fill(false);
        hit
    }
}

/// Answers repeated total-effect queries against one sorted edge list,
/// reusing the sort and the probe buffers.
pub struct PrefixSolver<'a> {
    sorted: &'a SortedEdgeList,
    options: SolverOptions,
    workspace: ProbeWorkspace,
}

impl<'a> PrefixSolver<'a> {
    pub fn new(sorted: &'a SortedEdgeList, options: SolverOptions) -> Self {
        let workspace = ProbeWorkspace::new(sorted.concept_count());
        PrefixSolver {
            sorted,
            options,
            workspace,
        }
    }

    /// Total causal effect of `source` on `target`.
    pub fn solve(
        &mut self,
        source: ConceptId,
        target: ConceptId,
        method: SearchMethod,
    ) -> Result<TotalEffectResult, SolverError> {
        if source == target {
            return Err(SolverError::SameConcept(source));
        }
        let e = self.sorted.len();
        let no_path = TotalEffectResult {
            source,
            target,
            value: 0.0,
            critical_index: None,
            path_found: false,
        };
        if e == 0 {
            return Ok(no_path);
        }
        let critical = match method {
            SearchMethod::Binary => self.binary_minimal_prefix(source, target, e),
            SearchMethod::Linear => self.linear_minimal_prefix(source, target, e),
        };
        Ok(match critical {
            Some(k) => TotalEffectResult {
                source,
                target,
                value: self.sorted.entry(k).weight,
                critical_index: Some(k),
                path_found: true,
            },
            None => no_path,
        })
    }

    /// Smallest `k` in `1..=e` whose prefix connects source to target, by
    /// bisection on the monotone reachability predicate.
    fn binary_minimal_prefix(
        &mut self,
        source: ConceptId,
        target: ConceptId,
        e: usize,
    ) -> Option<usize> {
        let incremental = self.options.incremental;
        if !self
            .workspace
            .probe(self.sorted, e, source, target, incremental)
        {
            return None;
        }
        let (mut lo, mut hi) = (1, e);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self
                .workspace
                .probe(self.sorted, mid, source, target, incremental)
            {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }

    /// Smallest reachable `k` by scanning `1, 2, ..., e`.
    fn linear_minimal_prefix(
        &mut self,
        source: ConceptId,
        target: ConceptId,
        e: usize,
    ) -> Option<usize> {
        let incremental = self.options.incremental;
        (1..=e).find(|&k| {
            self.workspace
                .probe(self.sorted, k, source, target, incremental)
        })
    }
}

/// One-shot binary-search query. Use [`PrefixSolver`] to amortize the sort
/// over many queries.
pub fn total_effect_binary(
    graph: &FcmGraph,
    source: ConceptId,
    target: ConceptId,
) -> Result<TotalEffectResult, SolverError> {
    let sorted = graph.sorted_edges();
    PrefixSolver::new(&sorted, SolverOptions::default()).solve(source, target, SearchMethod::Binary)
}

/// One-shot linear-scan query.
pub fn total_effect_linear(
    graph: &FcmGraph,
    source: ConceptId,
    target: ConceptId,
) -> Result<TotalEffectResult, SolverError> {
    let sorted = graph.sorted_edges();
    PrefixSolver::new(&sorted, SolverOptions::default()).solve(source, target, SearchMethod::Linear)
}

/// Effects of every other concept on `target`, ordered by source index.
pub fn total_effects_to_target(
    graph: &FcmGraph,
    target: ConceptId,
    method: SearchMethod,
    options: SolverOptions,
) -> Vec<TotalEffectResult> {
    let sorted = graph.sorted_edges();
    let mut solver = PrefixSolver::new(&sorted, options);
    (0..graph.concept_count())
        .map(ConceptId)
        .filter(|&s| s != target)
        .map(|s| {
            solver
                .solve(s, target, method)
                .expect("source differs from target")
        })
        .collect()
}

/// Dense matrix of effects for every ordered pair; the diagonal is zero.
pub fn total_effects_all_pairs(
    graph: &FcmGraph,
    method: SearchMethod,
    options: SolverOptions,
) -> Vec<Vec<f64>> {
    let n = graph.concept_count();
    let sorted = graph.sorted_edges();
    let mut solver = PrefixSolver::new(&sorted, options);
    (0..n)
        .map(|s| {
            (0..n)
                .map(|t| {
                    if s == t {
                        0.0
                    } else {
                        solver
                            .solve(ConceptId(s), ConceptId(t), method)
                            .expect("source differs from target")
                            .value
                    }
                })
                .collect()
        })
        .collect()
}

/// [`total_effects_to_target`] with sources solved in parallel. Row order is
/// unchanged.
pub fn par_total_effects_to_target(
    graph: &FcmGraph,
    target: ConceptId,
    method: SearchMethod,
    options: SolverOptions,
) -> Vec<TotalEffectResult> {
    use rayon::prelude::*;

    let sorted = graph.sorted_edges();
    let sources: Vec<ConceptId> = (0..graph.concept_count())
        .map(ConceptId)
        .filter(|&s| s != target)
        .collect();
    sources
        .par_iter()
        .map_init(
            || PrefixSolver::new(&sorted, options),
            |solver, &s| {
                solver
                    .solve(s, target, method)
                    .expect("source differs from target")
            },
        )
        .collect()
}

/// [`total_effects_all_pairs`] with source rows solved in parallel.
pub fn par_total_effects_all_pairs(
    graph: &FcmGraph,
    method: SearchMethod,
    options: SolverOptions,
) -> Vec<Vec<f64>> {
    use rayon::prelude::*;

    let n = graph.concept_count();
    let sorted = graph.sorted_edges();
    (0..n)
        .into_par_iter()
        .map_init(
            || PrefixSolver::new(&sorted, options),
            |solver, s| {
                (0..n)
                    .map(|t| {
                        if s == t {
                            0.0
                        } else {
                            solver
                                .solve(ConceptId(s), ConceptId(t), method)
                                .expect("source differs from target")
                                .value
                        }
                    })
                    .collect()
            },
        )
        .collect()
}
