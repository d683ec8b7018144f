use crate::error::{param, Error, Result};
use crate::spectral::{lp_norm, semigroup_apply, EvolutionParams, GridFunction};

use super::blocks::dyadic_block;
use super::partition::DyadicPartition;

/// Fitted exponential decay rate of `t ↦ ‖Δ̇_q e^{-tνΛ^α}u‖_{L^p}`.
///
/// Returns the negated least-squares slope of the log-norm against `t`.
/// Callers compare `rate / (ν·2^{qα})` across `q`.
pub fn semigroup_block_decay(
    u: &GridFunction,
    q: i32,
    params: &EvolutionParams,
    times: &[f64],
    p: f64,
    part: &DyadicPartition,
) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 3 times, got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
        return Err(param("times", "must be nonnegative and strictly increasing"));
    }
    let block = dyadic_block(u, q, part)?;
    let dx = u.domain().dx();
    if lp_norm(block.samples(), dx, p)? <= 1e-13 * lp_norm(u.samples(), dx, p)? {
        return Err(Error::ZeroBlock { q });
    }
    let logs = times
        .iter()
        .map(|&t| {
            let evolved = semigroup_apply(&block, t, params)?;
            let norm = lp_norm(evolved.samples(), dx, p)?;
            if norm > 0.0 {
                Ok(norm.ln())
            } else {
                Err(Error::ZeroBlock { q })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(-least_squares_slope(times, &logs))
}

pub(crate) fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Times `t_j = j·horizon/(ν·2^{qα}·(count−1))` spanning `horizon` e-folds of the shell centre.
pub fn decay_fit_times(q: i32, params: &EvolutionParams, horizon: f64, count: usize) -> Vec<f64> {
    let rate = params.nu.max(f64::MIN_POSITIVE) * 2f64.powf(q as f64 * params.alpha);
    (0..count)
        .map(|j| horizon * j as f64 / (rate * (count - 1) as f64))
        .collect()
}
