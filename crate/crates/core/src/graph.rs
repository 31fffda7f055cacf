//! Core data model for fuzzy cognitive maps.
//!
//! A map is a set of `n` concepts joined by signed weighted directed edges.
//! Weights live in `[-1, 1]`; a weight of zero means "no edge" and is never
//! stored, and the diagonal (self influence) is always zero. The model keeps
//! two views of the same edge set: a per-concept adjacency list for graph
//! traversal and an on-demand dense matrix for the inference rule and the
//! matrix file format. [`SortedEdgeList`] is the third derived view, shared
//! by every prefix-search solver: all edges ordered by descending weight
//! with a deterministic tie-break.

use std::fmt;

use thiserror::Error;

/// Index of a concept within its owning map. Valid ids are `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(pub usize);

impl ConceptId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for ConceptId {
    fn from(index: usize) -> Self {
        ConceptId(index)
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed causal connection with a non-zero weight in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: ConceptId,
    pub target: ConceptId,
    pub weight: f64,
}

impl Edge {
    pub fn new(source: usize, target: usize, weight: f64) -> Self {
        Edge {
            source: ConceptId(source),
            target: ConceptId(target),
            weight,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NonSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("weight {weight} at ({from}, {to}) is outside [-1, 1]")]
    WeightOutOfRange { from: usize, to: usize, weight: f64 },
    #[error("diagonal entry for concept {index} must be zero")]
    NonzeroDiagonal { index: usize },
    #[error("concept index {index} is out of range for a map with {concept_count} concepts")]
    ConceptOutOfRange { index: usize, concept_count: usize },
    #[error("duplicate edge ({from}, {to})")]
    DuplicateEdge { from: usize, to: usize },
    #[error("edge ({from}, {to}) has zero weight; omit it instead")]
    ZeroWeightEdge { from: usize, to: usize },
    #[error("density is undefined for maps with fewer than two concepts (have {concept_count})")]
    TooFewConcepts { concept_count: usize },
    #[error("expected {expected} concept labels, got {found}")]
    LabelCountMismatch { expected: usize, found: usize },
}

/// An immutable fuzzy cognitive map.
///
/// Construction validates every edge; afterwards the graph never changes, so
/// it is safe to share across threads by reference. Edges are stored in
/// `(source, target)` order, which makes equality, file output, and adjacency
/// iteration deterministic.
#[derive(Debug, Clone)]
pub struct FcmGraph {
    concept_count: usize,
    edges: Vec<Edge>,
    out_adjacency: Vec<Vec<(ConceptId, f64)>>,
    labels: Option<Vec<String>>,
}

impl PartialEq for FcmGraph {
    fn eq(&self, other: &Self) -> bool {
        self.concept_count == other.concept_count
            && self.edges == other.edges
            && self.labels == other.labels
    }
}

impl FcmGraph {
    /// Builds a map from an explicit edge collection.
    ///
    /// Rejects out-of-range indices, self-loops, zero weights, weights
    /// outside `[-1, 1]`, and duplicate `(source, target)` pairs.
    pub fn from_edges(
        concept_count: usize,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for edge in &edges {
            let (s, t) = (edge.source.0, edge.target.0);
            if s >= concept_count {
                return Err(GraphError::ConceptOutOfRange {
                    index: s,
                    concept_count,
                });
            }
            if t >= concept_count {
                return Err(GraphError::ConceptOutOfRange {
                    index: t,
                    concept_count,
                });
            }
            if s == t {
                return Err(GraphError::NonzeroDiagonal { index: s });
            }
            if edge.weight == 0.0 {
                return Err(GraphError::ZeroWeightEdge { from: s, to: t });
            }
            if !(-1.0..=1.0).contains(&edge.weight) {
                return Err(GraphError::WeightOutOfRange {
                    from: s,
                    to: t,
                    weight: edge.weight,
                });
            }
        }
        edges.sort_by_key(|e| (e.source.0, e.target.0));
        for pair in edges.windows(2) {
            if pair[0].source == pair[1].source && pair[0].target == pair[1].target {
                return Err(GraphError::DuplicateEdge {
                    from: pair[0].source.0,
                    to: pair[0].target.0,
                });
            }
        }
        let mut out_adjacency = vec![Vec::new(); concept_count];
        for edge in &edges {
            out_adjacency[edge.source.0].push((edge.target, edge.weight));
        }
        Ok(FcmGraph {
            concept_count,
            edges,
            out_adjacency,
            labels: None,
        })
    }

    /// Builds a map from a dense weight matrix. Every non-zero off-diagonal
    /// entry becomes an edge.
    pub fn from_dense_matrix(matrix: &[Vec<f64>]) -> Result<Self, GraphError> {
        let n = matrix.len();
        for (row, values) in matrix.iter().enumerate() {
            if values.len() != n {
                return Err(GraphError::NonSquare {
                    row,
                    found: values.len(),
                    expected: n,
                });
            }
        }
        let mut edges = Vec::new();
        for (i, row) in matrix.iter().enumerate() {
            for (j, &weight) in row.iter().enumerate() {
                if i == j {
                    if weight != 0.0 {
                        return Err(GraphError::NonzeroDiagonal { index: i });
                    }
                    continue;
                }
                if !(-1.0..=1.0).contains(&weight) {
                    return Err(GraphError::WeightOutOfRange {
                        from: i,
                        to: j,
                        weight,
                    });
                }
                if weight != 0.0 {
                    edges.push(Edge::new(i, j, weight));
                }
            }
        }
        // Row-major collection is already (source, target) sorted and free of
        // duplicates, so this cannot fail.
        FcmGraph::from_edges(n, edges)
    }

    pub fn to_dense_matrix(&self) -> Vec<Vec<f64>> {
        let mut matrix = vec![vec![0.0; self.concept_count]; self.concept_count];
        for edge in &self.edges {
            matrix[edge.source.0][edge.target.0] = edge.weight;
        }
        matrix
    }

    pub fn concept_count(&self) -> usize {
        self.concept_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in `(source, target)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Outgoing `(target, weight)` pairs of a concept, targets ascending.
    pub fn out_neighbors(&self, concept: ConceptId) -> &[(ConceptId, f64)] {
        &self.out_adjacency[concept.0]
    }

    /// Weight of the edge `source -> target`, if present.
    pub fn weight(&self, source: ConceptId, target: ConceptId) -> Option<f64> {
        self.out_adjacency[source.0]
            .binary_search_by_key(&target.0, |(t, _)| t.0)
            .ok()
            .map(|pos| self.out_adjacency[source.0][pos].1)
    }

    /// Attaches human-readable concept names. Purely metadata; no algorithm
    /// reads them.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.concept_count {
            return Err(GraphError::LabelCountMismatch {
                expected: self.concept_count,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Fraction of possible directed edges present: `e / (n * (n - 1))`.
    pub fn density(&self) -> Result<f64, GraphError> {
        if self.concept_count < 2 {
            return Err(GraphError::TooFewConcepts {
                concept_count: self.concept_count,
            });
        }
        Ok(self.edges.len() as f64 / (self.concept_count * (self.concept_count - 1)) as f64)
    }

    /// All edges ordered by descending weight, ties broken by
    /// `(source, target)` ascending.
    pub fn sorted_edges(&self) -> SortedEdgeList {
        let mut entries = self.edges.clone();
        entries.sort_by(|a, b| {
            b.weight
                .partial_cmp(&a.weight)
                .expect("weights are validated finite")
                .then(a.source.0.cmp(&b.source.0))
                .then(a.target.0.cmp(&b.target.0))
        });
        SortedEdgeList {
            concept_count: self.concept_count,
            entries,
        }
    }
}

/// Edges in non-increasing weight order with a deterministic tie-break.
///
/// Rank `r` (1-based) refers to the `r`-th entry; the "prefix of length `k`"
/// is the first `k` entries. Identical graphs always produce identical
/// sequences, which is what makes a solver's reported critical prefix index
/// well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedEdgeList {
    concept_count: usize,
    entries: Vec<Edge>,
}

impl SortedEdgeList {
    pub fn concept_count(&self) -> usize {
        self.concept_count
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Edge] {
        &self.entries
    }

    /// Entry at a 1-based rank. Panics if `rank` is 0 or exceeds the length.
    pub fn entry(&self, rank: usize) -> &Edge {
        &self.entries[rank - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // The four-concept example map used across the crate. Concepts C1..C4
    // from the usual presentation map to indices 0..3.
    fn four_concept_matrix() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.0, 0.6, 0.0],
            vec![0.68, 0.0, 0.0, -0.7],
            vec![0.15, 0.0, 0.0, 0.0],
            vec![0.0, -0.25, 0.36, 0.0],
        ]
    }

    #[test]
    fn dense_matrix_builds_expected_graph() {
        let g = FcmGraph::from_dense_matrix(&four_concept_matrix()).unwrap();
        assert_eq!(g.concept_count(), 4);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.weight(ConceptId(1), ConceptId(0)), Some(0.68));
        assert_eq!(g.weight(ConceptId(0), ConceptId(1)), None);
    }

    #[test]
    fn all_zero_matrix_is_an_empty_graph() {
        let g = FcmGraph::from_dense_matrix(&vec![vec![0.0; 3]; 3]).unwrap();
        assert_eq!(g.concept_count(), 3);
        assert_eq!(g.edge_count(), 0);
        assert!(g.sorted_edges().is_empty());
    }

    #[test]
    fn out_of_range_weight_is_rejected_with_cell() {
        let mut m = four_concept_matrix();
        m[2][3] = 1.5;
        assert_eq!(
            FcmGraph::from_dense_matrix(&m),
            Err(GraphError::WeightOutOfRange {
                from: 2,
                to: 3,
                weight: 1.5
            })
        );
    }

    #[test]
    fn nan_weight_is_rejected() {
        let mut m = four_concept_matrix();
        m[0][1] = f64::NAN;
        assert!(matches!(
            FcmGraph::from_dense_matrix(&m),
            Err(GraphError::WeightOutOfRange { from: 0, to: 1, .. })
        ));
    }

    #[test]
    fn non_square_matrix_is_rejected() {
        let m = vec![vec![0.0, 0.1], vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(
            FcmGraph::from_dense_matrix(&m),
            Err(GraphError::NonSquare {
                row: 0,
                found: 2,
                expected: 3
            })
        );
    }

    #[test]
    fn nonzero_diagonal_is_rejected() {
        let mut m = four_concept_matrix();
        m[1][1] = 0.2;
        assert_eq!(
            FcmGraph::from_dense_matrix(&m),
            Err(GraphError::NonzeroDiagonal { index: 1 })
        );
    }

    #[test]
    fn edge_validation_covers_all_error_classes() {
        let err = |edges: Vec<Edge>| FcmGraph::from_edges(3, edges).unwrap_err();
        assert_eq!(
            err(vec![Edge::new(0, 3, 0.5)]),
            GraphError::ConceptOutOfRange {
                index: 3,
                concept_count: 3
            }
        );
        assert_eq!(
            err(vec![Edge::new(1, 1, 0.5)]),
            GraphError::NonzeroDiagonal { index: 1 }
        );
        assert_eq!(
            err(vec![Edge::new(0, 1, 0.0)]),
            GraphError::ZeroWeightEdge { from: 0, to: 1 }
        );
        assert_eq!(
            err(vec![Edge::new(0, 1, -1.01)]),
            GraphError::WeightOutOfRange {
                from: 0,
                to: 1,
                weight: -1.01
            }
        );
        assert_eq!(
            err(vec![Edge::new(0, 1, 0.5), Edge::new(0, 1, 0.2)]),
            GraphError::DuplicateEdge { from: 0, to: 1 }
        );
    }

    #[test]
    fn sorted_edges_match_descending_weights() {
        let g = FcmGraph::from_dense_matrix(&four_concept_matrix()).unwrap();
        let sorted = g.sorted_edges();
        let weights: Vec<f64> = sorted.entries().iter().map(|e| e.weight).collect();
        assert_eq!(weights, vec![0.68, 0.6, 0.36, 0.15, -0.25, -0.7]);
        assert_eq!(sorted.entry(1).source, ConceptId(1));
        assert_eq!(sorted.entry(1).target, ConceptId(0));
    }

    #[test]
    fn sorted_edges_tie_break_is_source_then_target() {
        let g = FcmGraph::from_edges(
            3,
            vec![Edge::new(0, 2, 0.5), Edge::new(0, 1, 0.5)],
        )
        .unwrap();
        let sorted = g.sorted_edges();
        assert_eq!(sorted.entry(1).target, ConceptId(1));
        assert_eq!(sorted.entry(2).target, ConceptId(2));
    }

    #[test]
    fn density_examples() {
        let g = FcmGraph::from_dense_matrix(&four_concept_matrix()).unwrap();
        assert_eq!(g.density().unwrap(), 0.5);

        let mut full = Vec::new();
        for s in 0..10 {
            for t in 0..10 {
                if s != t {
                    full.push(Edge::new(s, t, 0.5));
                }
            }
        }
        let g = FcmGraph::from_edges(10, full).unwrap();
        assert_eq!(g.density().unwrap(), 1.0);

        let g = FcmGraph::from_edges(10, Vec::new()).unwrap();
        assert_eq!(g.density().unwrap(), 0.0);

        let g = FcmGraph::from_edges(1, Vec::new()).unwrap();
        assert_eq!(
            g.density(),
            Err(GraphError::TooFewConcepts { concept_count: 1 })
        );
    }

    #[test]
    fn dense_round_trip_preserves_graph() {
        let g = FcmGraph::from_dense_matrix(&four_concept_matrix()).unwrap();
        let back = FcmGraph::from_dense_matrix(&g.to_dense_matrix()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn labels_are_length_checked() {
        let g = FcmGraph::from_edges(2, vec![Edge::new(0, 1, 0.3)]).unwrap();
        assert!(g
            .clone()
            .with_labels(vec!["a".into(), "b".into()])
            .is_ok());
        assert_eq!(
            g.with_labels(vec!["a".into()]),
            Err(GraphError::LabelCountMismatch {
                expected: 2,
                found: 1
            })
        );
    }
}
