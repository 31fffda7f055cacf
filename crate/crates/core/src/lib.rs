//! Fuzzy cognitive map modeling and analysis.
//!
//! A fuzzy cognitive map is a signed weighted digraph whose nodes are
//! concepts and whose edge weights in `[-1, 1]` express how strongly one
//! concept drives another. This crate provides:
//!
//! - [`graph`]: the validated map model and the descending-weight edge
//!   ordering every solver works from.
//! - [`solver`]: total-causal-effect computation by binary or linear search
//!   over sorted-edge prefixes — the fast path.
//! - [`oracle`]: exhaustive path enumeration — the slow reference
//!   implementation the fast path is checked against.
//! - [`dynamics`]: the iterative activation-update rule and fixed-point
//!   detection.
//! - [`synthgen`]: seeded random map generation for tests and benchmarks.
//! - [`bench`]: a harness that times the solvers against each other on
//!   generated maps and aggregates the results.
//! - [`io`]: plain-text file formats (dense matrix CSV, edge list CSV,
//!   state vectors, trajectories).
//!
//! # Example
//!
//! ```
//! use fcm_core::solver::PrefixSolver;
//! use fcm_core::{ConceptId, Edge, FcmGraph, SearchMethod, SolverOptions};
//!
//! let graph = FcmGraph::from_edges(
//!     4,
//!     [
//!         (0, 2, 0.6),
//!         (1, 0, 0.68),
//!         (1, 3, -0.7),
//!         (2, 0, 0.15),
//!         (3, 1, -0.25),
//!         (3, 2, 0.36),
//!     ]
//!     .map(|(s, t, w)| Edge::new(s, t, w)),
//! )?;
//!
//! let sorted = graph.sorted_edges();
//! let mut solver = PrefixSolver::new(&sorted, SolverOptions::default());
//! let effect = solver.solve(ConceptId(1), ConceptId(2), SearchMethod::Binary)?;
//! assert_eq!(effect.value, 0.6);
//! assert_eq!(effect.critical_index, Some(2));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bench;
pub mod dynamics;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod solver;
pub mod synthgen;

pub use graph::{ConceptId, Edge, FcmGraph, GraphError, SortedEdgeList};
pub use solver::{
    total_effect_binary, total_effect_linear, SearchMethod, SolverError, SolverOptions,
    TotalEffectResult,
};
