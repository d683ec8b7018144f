//! Fixtures shared by the benchmarks.

use fbl_core::{DomainSpec, GridFunction};

/// Smooth mean-zero field with a few dozen active modes on `[0, 2π)`.
pub fn field(n: usize) -> GridFunction {
    let d = DomainSpec::periodic_2pi(n).expect("power of two");
    GridFunction::from_fn(d, |x| {
        (1..=32).map(|k| ((k * k % 7) as f64 - 3.0) / (k * k) as f64 * (k as f64 * x + 0.3 * k as f64).sin()).sum()
    })
    .expect("finite samples")
    .subtract_mean()
}
