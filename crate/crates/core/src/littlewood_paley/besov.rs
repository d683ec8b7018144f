use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::series::{check_sorted, time_norm, Snapshot};
use crate::spectral::{lp_norm, GridFunction};

use super::blocks::block_unchecked;
use super::partition::DyadicPartition;

/// Regularity `s`, integrability `p` and summation exponent `r` of `Ḃ^s_{p,r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        let spec = Self { s, p, r };
        spec.validate()?;
        Ok(spec)
    }

    /// The scale-critical space `Ḃ^{1/p}_{p,1}`.
    pub fn critical(p: f64) -> Result<Self> {
        Self::new(1.0 / p, p, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(param("s", "must be finite"));
        }
        for (name, v) in [("p", self.p), ("r", self.r)] {
            if v.is_nan() || v < 1.0 {
                return Err(param(name, format!("must lie in [1, ∞], got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_s(&self, s: f64) -> Self {
        Self { s, ..*self }
    }
}

/// Whether `u` may be treated as an element of the homogeneous space.
pub(crate) fn ensure_mean_zero(u: &GridFunction) -> Result<()> {
    let mean = u.mean();
    let scale = u.sup_norm().max(f64::MIN_POSITIVE);
    if mean.abs() > 1e-10 * scale && mean.abs() > 1e-300 {
        return Err(Error::NotMeanZero { mean });
    }
    Ok(())
}

/// `‖Δ̇_q u‖_{L^p}` for every resolvable `q`, in increasing `q`.
pub fn block_norms(u: &GridFunction, p: f64, part: &DyadicPartition) -> Result<Vec<(i32, f64)>> {
    part.domain().ensure_same(u.domain())?;
    let dx = u.domain().dx();
    part.indices()
        .map(|q| Ok((q, lp_norm(block_unchecked(u, q, part).samples(), dx, p)?)))
        .collect()
}

/// `(Σ_q (2^{qs} a_q)^r)^{1/r}`, or the sup for `r = ∞`.
pub(crate) fn weighted_sum(norms: &[(i32, f64)], s: f64, r: f64) -> f64 {
    let terms = norms.iter().map(|&(q, a)| 2f64.powf(q as f64 * s) * a);
    if r.is_infinite() {
        return terms.fold(0.0, f64::max);
    }
    if r == 1.0 {
        return terms.sum();
    }
    let terms: Vec<f64> = terms.collect();
    let peak = terms.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    peak * terms.iter().map(|t| (t / peak).powf(r)).sum::<f64>().powf(1.0 / r)
}

/// Homogeneous Besov norm over the resolvable range `[q_min, q_max]`.
///
/// The input must be mean-zero; constants are not in the homogeneous space.
pub fn besov_norm(u: &GridFunction, spec: &BesovSpec, part: &DyadicPartition) -> Result<f64> {
    spec.validate()?;
    ensure_mean_zero(u)?;
    let norms = block_norms(u, spec.p, part)?;
    Ok(weighted_sum(&norms, spec.s, spec.r))
}

/// Which side of the Minkowski pair a space-time norm is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTimeVariant {
    /// `L^ρ_T Ḃ^s_{p,r}`: time norm of the spatial Besov norm.
    Plain,
    /// `L̃^ρ_T Ḃ^s_{p,r}`: Besov sum of per-block time norms.
    Tilde,
}

/// Space-time Besov norm over stored snapshots, with trapezoidal time integrals.
pub fn spacetime_besov_norm(
    series: &[Snapshot],
    spec: &BesovSpec,
    rho: f64,
    variant: SpaceTimeVariant,
    part: &DyadicPartition,
) -> Result<f64> {
    spec.validate()?;
    if rho.is_nan() || rho < 1.0 {
        return Err(param("rho", format!("must lie in [1, ∞], got {rho}")));
    }
    if series.is_empty() || (series.len() < 2 && rho.is_finite()) {
        return Err(Error::InsufficientData(format!(
            "space-time norm needs at least 2 snapshots, got {}",
            series.len()
        )));
    }
    check_sorted(series)?;
    let times: Vec<f64> = series.iter().map(|s| s.t).collect();
    let per_time: Vec<Vec<(i32, f64)>> = series
        .iter()
        .map(|snap| {
            ensure_mean_zero(&snap.u)?;
            block_norms(&snap.u, spec.p, part)
        })
        .collect::<Result<_>>()?;
    match variant {
        SpaceTimeVariant::Plain => {
            let values: Vec<f64> = per_time
                .iter()
                .map(|norms| weighted_sum(norms, spec.s, spec.r))
                .collect();
            time_norm(&times, &values, rho)
        }
        SpaceTimeVariant::Tilde => {
            let nq = per_time[0].len();
            let block_time_norms: Vec<(i32, f64)> = (0..nq)
                .map(|iq| {
                    let q = per_time[0][iq].0;
                    let values: Vec<f64> = per_time.iter().map(|norms| norms[iq].1).collect();
                    Ok((q, time_norm(&times, &values, rho)?))
                })
                .collect::<Result<_>>()?;
            Ok(weighted_sum(&block_time_norms, spec.s, spec.r))
        }
    }
}
