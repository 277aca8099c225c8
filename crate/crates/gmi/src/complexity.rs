//! Belief-propagation decoding-cost model: message updates per information
//! bit, P ∝ iterations·d̄v/R·log2(M).

/// Relative decoding cost of `iterations` BP iterations at code rate `r`,
/// average variable-node degree `dv_avg`, and modulation order `m`.
pub fn decoding_complexity(r: f64, dv_avg: f64, iterations: usize, m: usize) -> f64 {
    assert!(r > 0.0 && r <= 1.0, "code rate must lie in (0, 1]");
    assert!(m >= 2);
    iterations as f64 * dv_avg / r * (m as f64).log2()
}

/// Largest iteration count whose cost stays within `budget` at the given
/// code parameters.
pub fn iterations_for_budget(budget: f64, r: f64, dv_avg: f64, m: usize) -> usize {
    assert!(r > 0.0 && r <= 1.0, "code rate must lie in (0, 1]");
    assert!(m >= 2);
    // the nudge absorbs float dust when the division is exact
    (budget * r / (dv_avg * (m as f64).log2()) + 1e-9).floor() as usize
}
