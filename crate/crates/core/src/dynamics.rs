//! Iterative map inference: activation updates and fixed-point detection.
//!
//! Starting from an initial activation vector `A(0)`, each step feeds every
//! concept the weighted sum of the others' activations and squashes it:
//!
//! ```text
//! A_i(t + 1) = f( sum over j != i of A_j(t) * w_ji )
//! ```
//!
//! Self influence is excluded by construction — the map never stores
//! diagonal edges. Iteration stops when the max-norm difference between
//! consecutive states drops below a tolerance (a fixed point) or when the
//! iteration cap is hit.

use thiserror::Error;

use crate::graph::FcmGraph;

/// Activation state of all concepts at one time step, indexed by concept.
pub type StateVector = Vec<f64>;

/// Squashing function applied to every concept's weighted input sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    /// `1 / (1 + exp(-steepness * x))`, range `(0, 1)`.
    Sigmoid { steepness: f64 },
    /// `tanh(steepness * x)`, range `(-1, 1)`.
    HyperbolicTangent { steepness: f64 },
    /// `1` for positive input, else `0`.
    Bivalent,
    /// Sign of the input: `-1`, `0`, or `1`.
    Trivalent,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid { steepness } => 1.0 / (1.0 + (-steepness * x).exp()),
            Activation::HyperbolicTangent { steepness } => (steepness * x).tanh(),
            Activation::Bivalent => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Trivalent => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed interval the outputs fall in.
    pub fn range(self) -> (f64, f64) {
        match self {
            Activation::Sigmoid { .. } => (0.0, 1.0),
            Activation::HyperbolicTangent { .. } | Activation::Trivalent => (-1.0, 1.0),
            Activation::Bivalent => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("state vector has {found} entries but the map has {expected} concepts")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Whether and when the trajectory settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceStatus {
    /// `states[at]` and `states[at - 1]` differ by less than the tolerance
    /// in max-norm.
    FixedPoint { at: usize },
    /// The iteration cap elapsed first (limit cycles and chaotic runs end up
    /// here too).
    NotConverged,
}

/// A full simulation run: every visited state plus how it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    /// `trajectory[t]` is `A(t)`; the initial state is included, so the
    /// length is `iterations_run + 1`.
    pub trajectory: Vec<StateVector>,
    pub status: ConvergenceStatus,
    pub iterations_run: usize,
}

impl SimulationOutcome {
    pub fn final_state(&self) -> &StateVector {
        self.trajectory.last().expect("trajectory is never empty")
    }
}

/// Largest absolute componentwise difference.
pub fn max_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// One update step via the adjacency lists: for each edge `s -> t`, the
/// source's activation times the weight accumulates into the target's input
/// sum, then every sum is squashed.
pub fn step(
    graph: &FcmGraph,
    state: &StateVector,
    activation: Activation,
) -> Result<StateVector, DynamicsError> {
    let n = graph.concept_count();
    if state.len() != n {
        return Err(DynamicsError::DimensionMismatch {
            expected: n,
            found: state.len(),
        });
    }
    let mut sums = vec![0.0; n];
    for edge in graph.edges() {
        sums[edge.target.index()] += state[edge.source.index()] * edge.weight;
    }
    Ok(sums.into_iter().map(|x| activation.apply(x)).collect())
}

/// One update step via the dense matrix: the state row-vector times the
/// weight matrix, then the squash. Mathematically identical to [`step`];
/// kept as an independent route so tests can cross-check the two.
pub fn step_dense(
    matrix: &[Vec<f64>],
    state: &StateVector,
    activation: Activation,
) -> Result<StateVector, DynamicsError> {
    let n = matrix.len();
    if state.len() != n {
        return Err(DynamicsError::DimensionMismatch {
            expected: n,
            found: state.len(),
        });
    }
    Ok((0..n)
        .map(|t| {
            let sum: f64 = (0..n).map(|s| state[s] * matrix[s][t]).sum();
            activation.apply(sum)
        })
        .collect())
}

/// Iterates [`step`] until a fixed point or the iteration cap.
///
/// Panics if `max_iterations` is zero or `epsilon` is not a positive number;
/// both indicate a configuration bug, not a data problem.
pub fn simulate(
    graph: &FcmGraph,
    initial: &StateVector,
    activation: Activation,
    epsilon: f64,
    max_iterations: usize,
) -> Result<SimulationOutcome, DynamicsError> {
    assert!(max_iterations >= 1, "max_iterations must be at least 1");
    assert!(epsilon > 0.0, "epsilon must be positive");
    let mut trajectory = vec![initial.clone()];
    for t in 1..=max_iterations {
        let next = step(graph, trajectory.last().expect("non-empty"), activation)?;
        let diff = max_norm_diff(&next, &trajectory[t - 1]);
        trajectory.push(next);
        if diff < epsilon {
            return Ok(SimulationOutcome {
                trajectory,
                status: ConvergenceStatus::FixedPoint { at: t },
                iterations_run: t,
            });
        }
    }
    Ok(SimulationOutcome {
        trajectory,
        status: ConvergenceStatus::NotConverged,
        iterations_run: max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, FcmGraph};

    fn four_concept_graph() -> FcmGraph {
        FcmGraph::from_dense_matrix(&[
            vec![0.0, 0.0, 0.6, 0.0],
            vec![0.68, 0.0, 0.0, -0.7],
            vec![0.15, 0.0, 0.0, 0.0],
            vec![0.0, -0.25, 0.36, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn single_step_matches_hand_computation() {
        let g = four_concept_graph();
        let activation = Activation::HyperbolicTangent { steepness: 1.0 };
        let state = vec![1.0, 0.0, 0.0, 0.0];
        let next = step(&g, &state, activation).unwrap();
        // Only concept 0 is active; its sole outgoing edge is 0 -> 2 with
        // weight 0.6, so concept 2 receives tanh(0.6) and the rest tanh(0).
        assert_eq!(next[0], 0.0);
        assert_eq!(next[1], 0.0);
        assert!((next[2] - 0.6_f64.tanh()).abs() < 1e-15);
        assert_eq!(next[3], 0.0);
    }

    #[test]
    fn adjacency_and_dense_routes_agree() {
        let g = four_concept_graph();
        let matrix = g.to_dense_matrix();
        let state = vec![0.3, -0.2, 0.9, 0.5];
        for activation in [
            Activation::Sigmoid { steepness: 1.0 },
            Activation::Sigmoid { steepness: 5.0 },
            Activation::HyperbolicTangent { steepness: 0.7 },
            Activation::Bivalent,
            Activation::Trivalent,
        ] {
            let a = step(&g, &state, activation).unwrap();
            let b = step_dense(&matrix, &state, activation).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn edgeless_map_under_sigmoid_fixes_at_one_half() {
        // Every input sum is 0, so every activation is sigmoid(0) = 0.5
        // after one step, and the second step repeats it exactly.
        let g = FcmGraph::from_edges(5, Vec::new()).unwrap();
        let outcome = simulate(
            &g,
            &vec![0.9, 0.1, 0.4, 0.0, 1.0],
            Activation::Sigmoid { steepness: 1.0 },
            1e-5,
            100,
        )
        .unwrap();
        assert_eq!(outcome.status, ConvergenceStatus::FixedPoint { at: 2 });
        assert_eq!(outcome.final_state(), &vec![0.5; 5]);
        assert_eq!(outcome.trajectory.len(), outcome.iterations_run + 1);
    }

    #[test]
    fn two_cycle_under_trivalent_never_converges() {
        // 0 excites 1 and 1 inhibits 0: trivalent activations flip forever.
        let g = FcmGraph::from_edges(
            2,
            vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, -1.0)],
        )
        .unwrap();
        let outcome = simulate(&g, &vec![1.0, 0.0], Activation::Trivalent, 1e-5, 50).unwrap();
        assert_eq!(outcome.status, ConvergenceStatus::NotConverged);
        assert_eq!(outcome.iterations_run, 50);
        assert_eq!(outcome.trajectory.len(), 51);
    }

    #[test]
    fn activations_stay_in_their_stated_range() {
        for activation in [
            Activation::Sigmoid { steepness: 2.0 },
            Activation::HyperbolicTangent { steepness: 2.0 },
            Activation::Bivalent,
            Activation::Trivalent,
        ] {
            let (lo, hi) = activation.range();
            for x in [-100.0, -1.0, -1e-12, 0.0, 1e-12, 1.0, 100.0] {
                let y = activation.apply(x);
                assert!((lo..=hi).contains(&y), "{activation:?}({x}) = {y}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = four_concept_graph();
        assert_eq!(
            step(&g, &vec![0.0; 3], Activation::Bivalent).unwrap_err(),
            DynamicsError::DimensionMismatch {
                expected: 4,
                found: 3
            }
        );
        assert!(simulate(
            &g,
            &vec![0.0; 5],
            Activation::Bivalent,
            1e-5,
            10
        )
        .is_err());
    }

    #[test]
    fn reported_fixed_point_really_is_one() {
        let g = four_concept_graph();
        let activation = Activation::Sigmoid { steepness: 1.0 };
        let outcome = simulate(&g, &vec![1.0, 0.0, 0.0, 1.0], activation, 1e-5, 100).unwrap();
        if let ConvergenceStatus::FixedPoint { at } = outcome.status {
            let again = step(&g, outcome.final_state(), activation).unwrap();
            assert!(max_norm_diff(&again, outcome.final_state()) < 1e-5);
            assert_eq!(at, outcome.iterations_run);
        } else {
            panic!("sigmoid run on the example map should settle within 100 steps");
        }
    }
}
