//! Seeded random map generation.
//!
//! Benchmarks and randomized tests need maps with an exact concept count,
//! an exact edge count, and weights bounded away from zero — and the same
//! seed must produce the same map on every platform and in every build. The
//! generator therefore avoids floating-point-sensitive sampling shortcuts
//! and derives everything from the raw 64-bit output stream of a seeded
//! ChaCha8 generator, as follows:
//!
//! 1. Number the `N = n * (n - 1)` ordered concept pairs `0..N` in row-major
//!    order with the diagonal skipped: pair `p` has source `p / (n - 1)` and
//!    target `r + 1` if `r >= source` else `r`, where `r = p % (n - 1)`.
//! 2. Choose `m = round(density * N)` distinct pairs by a partial
//!    Fisher-Yates shuffle over the virtual array `0..N` (displaced entries
//!    kept in a hash map), drawing each position with Lemire's unbiased
//!    bounded-integer method on `next_u64`.
//! 3. For each chosen pair, in selection order: draw a magnitude uniform in
//!    `[min_magnitude, 1)` using the top 53 bits of one `next_u64`, then one
//!    more `next_u64` whose low bit picks the sign (0 positive, 1 negative).
//!
//! Every consumed value is specified, so a seed is a complete description of
//! the map.

use std::collections::HashMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, FcmGraph, GraphError};

/// Smallest weight magnitude generated when a [`GenSpec`] does not say
/// otherwise.
pub const DEFAULT_MIN_MAGNITUDE: f64 = 1e-3;

/// A complete, reproducible description of one synthetic map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Number of concepts, at least 2.
    pub concepts: usize,
    /// Requested fraction of the `n * (n - 1)` possible edges, in `(0, 1]`.
    /// The realized edge count is `round(density * n * (n - 1))` and must
    /// come out to at least 1.
    pub density: f64,
    pub seed: u64,
    /// Lower bound on `|weight|`, in `(0, 1]`; keeps generated weights away
    /// from the zero that would mean "no edge".
    #[serde(default = "default_min_magnitude")]
    pub min_magnitude: f64,
}

fn default_min_magnitude() -> f64 {
    DEFAULT_MIN_MAGNITUDE
}

impl GenSpec {
    pub fn new(concepts: usize, density: f64, seed: u64) -> Self {
        GenSpec {
            concepts,
            density,
            seed,
            min_magnitude: DEFAULT_MIN_MAGNITUDE,
        }
    }

    /// The exact edge count this spec realizes.
    pub fn edge_count(&self) -> usize {
        let possible = (self.concepts * (self.concepts - 1)) as f64;
        (self.density * possible).round() as usize
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.concepts < 2 {
            return Err(GenError::InvalidSpec(format!(
                "need at least 2 concepts, got {}",
                self.concepts
            )));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(GenError::InvalidSpec(format!(
                "density must be in (0, 1], got {}",
                self.density
            )));
        }
        if !(self.min_magnitude > 0.0 && self.min_magnitude <= 1.0) {
            return Err(GenError::InvalidSpec(format!(
                "min_magnitude must be in (0, 1], got {}",
                self.min_magnitude
            )));
        }
        let possible = self.concepts * (self.concepts - 1);
        let m = self.edge_count();
        if m == 0 {
            return Err(GenError::InvalidSpec(format!(
                "density {} of {} possible edges rounds to zero edges",
                self.density, possible
            )));
        }
        debug_assert!(m <= possible, "density <= 1 bounds the rounded count");
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generation spec: {0}")]
    InvalidSpec(String),
}

/// Unbiased draw from `0..range` (Lemire's multiply-shift rejection method).
fn uniform_below(rng: &mut ChaCha8Rng, range: u64) -> u64 {
    debug_assert!(range > 0);
    let mut product = (rng.next_u64() as u128) * (range as u128);
    let mut low = product as u64;
    if low < range {
        let threshold = range.wrapping_neg() % range;
        while low < threshold {
            product = (rng.next_u64() as u128) * (range as u128);
            low = product as u64;
        }
    }
    (product >> 64) as u64
}

/// Uniform draw from `[0, 1)` with 53 bits of precision.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Generates the map a spec describes. Identical specs yield identical maps.
pub fn generate(spec: &GenSpec) -> Result<FcmGraph, GenError> {
    spec.validate()?;
    let n = spec.concepts;
    let pair_count = (n * (n - 1)) as u64;
    let m = spec.edge_count();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Partial Fisher-Yates over the virtual array [0, pair_count): slot i
    // swaps with a uniform slot in [i, pair_count), and only displaced
    // values are materialized.
    let mut displaced: HashMap<u64, u64> = HashMap::new();
    let mut chosen = Vec::with_capacity(m);
    for i in 0..m as u64 {
        let j = i + uniform_below(&mut rng, pair_count - i);
        let value_at_j = displaced.get(&j).copied().unwrap_or(j);
        let value_at_i = displaced.get(&i).copied().unwrap_or(i);
        displaced.insert(j, value_at_i);
        chosen.push(value_at_j);
    }

    let edges: Vec<Edge> = chosen
        .into_iter()
        .map(|pair| {
            let source = (pair / (n as u64 - 1)) as usize;
            let r = (pair % (n as u64 - 1)) as usize;
            let target = if r >= source { r + 1 } else { r };
            let magnitude = spec.min_magnitude + unit_f64(&mut rng) * (1.0 - spec.min_magnitude);
            let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
            Edge::new(source, target, sign * magnitude)
        })
        .collect();

    FcmGraph::from_edges(n, edges).map_err(|e: GraphError| {
        // Fisher-Yates guarantees distinct in-range pairs and the magnitude
        // construction keeps weights in [min_magnitude, 1), so this is
        // unreachable; surface it as a spec error rather than panicking.
        GenError::InvalidSpec(format!("internal generation fault: {e}"))
    })
}
