//! Time series of grid functions and the quadrature used over them.

use crate::error::{param, Error, Result};
use crate::spectral::GridFunction;

/// A solution sample `u(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: GridFunction,
}

impl Snapshot {
    pub fn new(t: f64, u: GridFunction) -> Self {
        Self { t, u }
    }
}

/// Cumulative trapezoidal integral of `values` over `times`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    cumulative_trapezoid(times, values).last().copied().unwrap_or(0.0)
}

/// `L^ρ` norm in time of sampled nonnegative `values` (trapezoidal rule);
/// `ρ = ∞` is the max over samples.
pub fn time_norm(times: &[f64], values: &[f64], rho: f64) -> Result<f64> {
    if rho.is_nan() || rho < 1.0 {
        return Err(param("rho", format!("must lie in [1, ∞], got {rho}")));
    }
    if rho.is_infinite() {
        if values.is_empty() {
            return Err(Error::InsufficientData("no snapshots".into()));
        }
        return Ok(values.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    }
    if times.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "time norm with rho = {rho} needs at least 2 snapshots, got {}",
            times.len()
        )));
    }
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let powered: Vec<f64> = values.iter().map(|v| (v.abs() / peak).powf(rho)).collect();
    Ok(peak * trapezoid(times, &powered).powf(1.0 / rho))
}

pub(crate) fn check_sorted(series: &[Snapshot]) -> Result<()> {
    if series.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(param("series", "snapshot times must be strictly increasing"));
    }
    Ok(())
}

/// Piecewise-linear interpolation in time between stored snapshots.
/// Times outside the stored range are clamped to the end points.
pub fn interpolate(series: &[Snapshot], t: f64) -> Result<GridFunction> {
    let first = series
        .first()
        .ok_or_else(|| Error::InsufficientData("empty series".into()))?;
    let last = series.last().expect("nonempty");
    if t <= first.t {
        return Ok(first.u.clone());
    }
    if t >= last.t {
        return Ok(last.u.clone());
    }
    let i = series.partition_point(|s| s.t <= t);
    let (a, b) = (&series[i - 1], &series[i]);
    let w = (t - a.t) / (b.t - a.t);
    if w == 0.0 {
        return Ok(a.u.clone());
    }
    Ok(a.u.scale(1.0 - w).axpy(w, &b.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DomainSpec;

    #[test]
    fn trapezoid_linear_exact() {
        let t = [0.0, 0.5, 1.5, 2.0];
        let v: Vec<f64> = t.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&t, &v) - (6.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn time_norm_constant() {
        let t = [0.0, 0.3, 1.0, 2.0];
        let v = [2.0; 4];
        assert!((time_norm(&t, &v, 3.0).unwrap() - 2.0 * 2f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(time_norm(&t, &v, f64::INFINITY).unwrap(), 2.0);
        assert!(time_norm(&[0.0], &[1.0], 2.0).is_err());
        assert!(time_norm(&t, &v, 0.5).is_err());
    }

    #[test]
    fn interpolation() {
        let d = DomainSpec::periodic_2pi(8).unwrap();
        let s = vec![
            Snapshot::new(0.0, GridFunction::constant(d, 1.0)),
            Snapshot::new(1.0, GridFunction::constant(d, 3.0)),
        ];
        let mid = interpolate(&s, 0.25).unwrap();
        assert!((mid.samples()[2] - 1.5).abs() < 1e-15);
        assert_eq!(interpolate(&s, 5.0).unwrap().samples()[0], 3.0);
        assert_eq!(interpolate(&s, -1.0).unwrap().samples()[0], 1.0);
    }
}
