use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::littlewood_paley::{
    besov_norm, spacetime_besov_norm, BesovSpec, DyadicPartition, SpaceTimeVariant,
};
use crate::series::{cumulative_trapezoid, trapezoid, Snapshot};
use crate::solver::RunRecord;
use crate::spectral::spatial_derivative;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupSeries {
    pub times: Vec<f64>,
    /// `∫₀^t ‖∂ₓu‖_∞` at each diagnostic time.
    pub cumulative: Vec<f64>,
    pub total: f64,
}

impl BlowupSeries {
    /// Increment over `[T/2, T]` as a fraction of the total.
    pub fn last_half_fraction(&self) -> f64 {
        let t_end = *self.times.last().expect("nonempty");
        let half = self
            .times
            .iter()
            .zip(&self.cumulative)
            .take_while(|(t, _)| **t <= 0.5 * t_end)
            .last()
            .map_or(0.0, |(_, c)| *c);
        if self.total == 0.0 {
            0.0
        } else {
            (self.total - half) / self.total
        }
    }
}

/// Trapezoidal `∫₀^t ‖∂ₓu(τ)‖_∞ dτ` over the per-step diagnostics.
pub fn blowup_integral(record: &RunRecord) -> Result<BlowupSeries> {
    if record.diagnostics.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "blow-up integral needs at least 2 diagnostic rows, got {}",
            record.diagnostics.len()
        )));
    }
    let times: Vec<f64> = record.diagnostics.iter().map(|r| r.t).collect();
    let grads: Vec<f64> = record.diagnostics.iter().map(|r| r.grad_sup).collect();
    let cumulative = cumulative_trapezoid(&times, &grads);
    let total = *cumulative.last().expect("nonempty");
    Ok(BlowupSeries {
        times,
        cumulative,
        total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingProfile {
    pub beta: f64,
    pub times: Vec<f64>,
    /// `t^β ‖u(t)‖_{Ḃ^{1/p+β}_{p,1}}`.
    pub values: Vec<f64>,
    pub sup: f64,
}

/// `t ↦ t^β‖u(t)‖_{Ḃ^{1/p+β}_{p,1}}` over the stored snapshots (mean removed).
pub fn smoothing_profile(
    record: &RunRecord,
    beta: f64,
    spec: &BesovSpec,
    part: &DyadicPartition,
) -> Result<SmoothingProfile> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(param("beta", format!("must be positive, got {beta}")));
    }
    spec.validate()?;
    if (spec.s - 1.0 / spec.p).abs() > 1e-12 {
        return Err(param("spec.s", format!("must equal 1/p = {}, got {}", 1.0 / spec.p, spec.s)));
    }
    let shifted = BesovSpec::new(spec.s + beta, spec.p, 1.0)?;
    let snaps = record.mean_free_snapshots();
    let values = snaps
        .iter()
        .map(|s| Ok(s.t.powf(beta) * besov_norm(&s.u, &shifted, part)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SmoothingProfile {
        beta,
        times: snaps.iter().map(|s| s.t).collect(),
        sup: values.iter().copied().fold(0.0, f64::max),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprioriOptions {
    pub rho: f64,
    pub rho1: f64,
    /// Lebesgue index of the velocity norm inside `Z(T)`.
    pub p1: f64,
}

impl Default for AprioriOptions {
    fn default() -> Self {
        Self {
            rho: f64::INFINITY,
            rho1: 1.0,
            p1: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriReport {
    pub lhs: f64,
    pub rhs_core: f64,
    pub z_t: f64,
    /// `lhs / (e^{Z(T)}·rhs_core)`.
    pub ratio: f64,
    pub warnings: Vec<String>,
}

fn range_warnings(spec: &BesovSpec, opts: &AprioriOptions) -> Vec<String> {
    let mut w = Vec::new();
    if opts.rho1 > opts.rho {
        w.push(format!("rho1 = {} exceeds rho = {}", opts.rho1, opts.rho));
    }
    if spec.p > opts.p1 {
        w.push(format!("p = {} exceeds p1 = {}", spec.p, opts.p1));
    }
    let upper = 1.0 + 1.0 / opts.p1;
    let above = if spec.r == 1.0 { spec.s > upper } else { spec.s >= upper };
    if above {
        w.push(format!("s = {} above the admissible bound 1 + 1/p1 = {upper}", spec.s));
    }
    let p_conj = 1.0 - 1.0 / spec.p;
    let lower = -(1.0 / opts.p1).min(p_conj);
    if spec.s <= lower {
        w.push(format!("s = {} not above the admissible bound {lower}", spec.s));
    }
    w
}

/// Both sides of the transport-diffusion a priori estimate for a solved run.
///
/// `velocity` and `forcing` are the coefficient fields sampled in time; an
/// empty `forcing` stands for `f = 0`.
pub fn apriori_ratio(
    record: &RunRecord,
    velocity: &[Snapshot],
    forcing: &[Snapshot],
    spec: &BesovSpec,
    opts: &AprioriOptions,
    part: &DyadicPartition,
) -> Result<AprioriReport> {
    spec.validate()?;
    for (name, x) in [("rho", opts.rho), ("rho1", opts.rho1), ("p1", opts.p1)] {
        if x.is_nan() || x < 1.0 {
            return Err(param(name, format!("must lie in [1, ∞], got {x}")));
        }
    }
    let warnings = range_warnings(spec, opts);
    let params = record.config.params;
    let nu = params.nu;
    let alpha = params.alpha;
    let snaps = record.mean_free_snapshots();

    let lhs_spec = spec.with_s(spec.s + alpha / opts.rho);
    let lhs = nu.powf(1.0 / opts.rho)
        * spacetime_besov_norm(&snaps, &lhs_spec, opts.rho, SpaceTimeVariant::Tilde, part)?;

    let mut rhs_core = besov_norm(&snaps[0].u, spec, part)?;
    let f_series: Vec<Snapshot> = forcing.iter().map(|s| Snapshot::new(s.t, s.u.subtract_mean())).collect();
    if f_series.iter().any(|s| s.u.sup_norm() > 0.0) {
        let f_spec = spec.with_s(spec.s - alpha + alpha / opts.rho1);
        let f_norm = spacetime_besov_norm(&f_series, &f_spec, opts.rho1, SpaceTimeVariant::Tilde, part)?;
        rhs_core += nu.powf(1.0 / opts.rho1 - 1.0) * f_norm;
    }

    let z_t = if velocity.len() < 2 {
        0.0
    } else {
        let v_spec = BesovSpec::new(1.0 / opts.p1, opts.p1, f64::INFINITY)?;
        let times: Vec<f64> = velocity.iter().map(|s| s.t).collect();
        let norms = velocity
            .iter()
            .map(|s| {
                let dv = spatial_derivative(&s.u);
                Ok(besov_norm(&dv, &v_spec, part)?.max(dv.sup_norm()))
            })
            .collect::<Result<Vec<f64>>>()?;
        trapezoid(&times, &norms)
    };

    let denom = z_t.exp() * rhs_core;
    let ratio = if lhs == 0.0 {
        0.0
    } else if denom == 0.0 {
        f64::INFINITY
    } else {
        lhs / denom
    };
    Ok(AprioriReport {
        lhs,
        rhs_core,
        z_t,
        ratio,
        warnings,
    })
}
