use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

use super::modulus::Modulus;
use super::quadrature::integrate;

const MAX_PIECES: usize = 4000;
/// Width, relative to `ξ`, of the near-zero interval handled by Taylor expansion.
const TAYLOR_FRACTION: f64 = 1e-4;

/// The dissipation integral
///
/// ```text
/// J(ξ) = (1/π)∫₀^{ξ/2} [ω(ξ+2η)+ω(ξ−2η)−2ω(ξ)]/η² dη
///      + (1/π)∫_{ξ/2}^∞ [ω(2η+ξ)−ω(2η−ξ)−2ω(ξ)]/η² dη
/// ```
///
/// evaluated to relative accuracy `tol`. The `−2ω(ξ)/η²` part of the second
/// integral is done in closed form and the rest is mapped to `u = ξ/(2η) ∈ (0, 1]`,
/// so no tail truncation is needed. At a kink of `ω` the first integral
/// diverges and the result is `±∞` with the sign of the derivative jump.
pub fn j_integral(xi: f64, m: &Modulus, tol: f64) -> Result<f64> {
    j_integral_truncated(xi, m, tol, f64::INFINITY)
}

/// [`j_integral`] with the second integral cut off at `η = eta_max`.
pub fn j_integral_truncated(xi: f64, m: &Modulus, tol: f64, eta_max: f64) -> Result<f64> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(param("xi", format!("must be positive, got {xi}")));
    }
    if !(1e-12..1.0).contains(&tol) {
        return Err(param("tol", format!("must lie in [1e-12, 1), got {tol}")));
    }
    if !(eta_max > 0.5 * xi) {
        return Err(param("eta_max", format!("must exceed ξ/2, got {eta_max}")));
    }
    let jump = m.derivative_jump(xi);
    if jump != 0.0 {
        return Ok(jump.signum() * f64::INFINITY);
    }
    let w = m.eval(xi);
    let scale = (w / xi).abs().max(f64::MIN_POSITIVE);
    let abs_tol = 1e-3 * tol * scale;

    // First integral: Taylor on [0, δ], quadrature on [δ, ξ/2].
    let kinks = m.kinks();
    let mut delta = TAYLOR_FRACTION * xi;
    for &k in &kinks {
        delta = delta.min(0.25 * (xi - k).abs());
    }
    let taylor = 4.0 * m.second_derivative(xi) * delta;
    let mut breaks = vec![delta, 0.5 * xi];
    for &k in &kinks {
        for eta in [0.5 * (k - xi), 0.5 * (xi - k)] {
            if eta > delta && eta < 0.5 * xi {
                breaks.push(eta);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut near = |eta: f64| (m.eval(xi + 2.0 * eta) + m.eval(xi - 2.0 * eta) - 2.0 * w) / (eta * eta);
    let first = integrate(&mut near, &breaks, tol, abs_tol, MAX_PIECES).value + taylor;

    // Second integral: (2/ξ)∫ [ω(ξ(1+u)/u) − ω(ξ(1−u)/u)] du − 4ω(ξ)/ξ.
    let u_min = if eta_max.is_finite() { 0.5 * xi / eta_max } else { 0.0 };
    let mut ubreaks = vec![u_min, 1.0];
    for &k in &kinks {
        for u in [xi / (k - xi), xi / (k + xi)] {
            if u > u_min && u < 1.0 {
                ubreaks.push(u);
            }
        }
    }
    ubreaks.sort_by(f64::total_cmp);
    let mut far = |u: f64| far_difference(m, xi, u);
    let diff = integrate(&mut far, &ubreaks, tol, 1e-3 * tol * w.abs().max(f64::MIN_POSITIVE), MAX_PIECES).value;
    let second = 2.0 / xi * diff - 4.0 * w / xi;
    Ok((first + second) / PI)
}

/// `ω(ξ(1+u)/u) − ω(ξ(1−u)/u)` without cancellation on the logarithmic branch.
fn far_difference(m: &Modulus, xi: f64, u: f64) -> f64 {
    let lo = xi * (1.0 - u) / u;
    match *m {
        Modulus::Piecewise { xi0, c_xi0 } if lo > xi0 => 2.0 * c_xi0 * u.atanh(),
        Modulus::Linear => 2.0 * xi,
        _ => m.eval(xi * (1.0 + u) / u) - m.eval(lo),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityPoint {
    pub xi: f64,
    pub omega: f64,
    pub omega_prime: f64,
    #[serde(rename = "J")]
    pub j: f64,
    /// `ω(ξ)ω′(ξ) + J(ξ)`.
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    pub points: Vec<NegativityPoint>,
    /// Largest `ωω′ + J`; `None` for an empty grid.
    pub max_sum: Option<f64>,
    /// `true` when every value is negative (vacuously for an empty grid).
    pub passed: bool,
    pub no_data: bool,
    /// Number of grid points with a nonnegative value.
    pub violations: usize,
}

/// Evaluates `ω(ξ)ω′(ξ) + J(ξ)` on a sorted positive grid.
pub fn negativity_scan(m: &Modulus, xi_grid: &[f64], tol: f64) -> Result<NegativityReport> {
    if xi_grid.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(param("xi_grid", "values must be positive and finite"));
    }
    if xi_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("xi_grid", "values must be strictly increasing"));
    }
    let points = xi_grid
        .iter()
        .map(|&xi| {
            let omega = m.eval(xi);
            let omega_prime = m.derivative(xi);
            let j = j_integral(xi, m, tol)?;
            Ok(NegativityPoint {
                xi,
                omega,
                omega_prime,
                j,
                sum: omega * omega_prime + j,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = points.iter().filter(|p| !(p.sum < 0.0)).count();
    Ok(NegativityReport {
        max_sum: points.iter().map(|p| p.sum).reduce(f64::max),
        passed: violations == 0,
        no_data: points.is_empty(),
        violations,
        points,
    })
}

/// `n` points log-spaced over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
            .collect(),
    }
}
