//! Shared inputs for the criterion benchmarks.

use mumford_core::{dimension, stable_pairs, Engine, SpectralCurve};

/// Pairs benchmarked one at a time, from cheap to expensive.
pub const TARGETS: [(u32, u32); 5] = [(1, 1), (0, 5), (2, 1), (2, 2), (3, 1)];

/// A fresh engine on the formal curve with enough times for every pair up to `budget`.
pub fn formal_engine(budget: u32) -> Engine {
    let order = stable_pairs(budget)
        .into_iter()
        .map(|(g, n)| dimension(g, n) as u32)
        .max()
        .unwrap_or(1);
    Engine::new(SpectralCurve::formal(order)).expect("formal curve is regular")
}
