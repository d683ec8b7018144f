//! The approximation scheme `u⁰ = e^{-tνΛ^α}u₀`,
//! `∂ₜu^{n+1} + uⁿ∂ₓu^{n+1} + νΛ^α u^{n+1} = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::littlewood_paley::{build_partition, decay_fit_times, dyadic_block, semigroup_block_decay};
use crate::spectral::{lebesgue_norm, GridFunction};

use super::config::{cfl_timestep, SolverConfig};
use super::record::RunRecord;
use super::td::{march, solve_td, Dissipation, TDProblem, TimeField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub n_iters: usize,
    /// `false` forces the velocity to zero in every linear solve.
    pub coupled: bool,
    /// Lebesgue exponent of the smallness proxy.
    pub proxy_p: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            n_iters: 5,
            coupled: true,
            proxy_p: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    /// `d_n = sup_t ‖u^{n+1} − uⁿ‖_∞`.
    pub differences: Vec<f64>,
    /// `d_{n+1}/d_n`; NaN where `d_n = 0`.
    pub ratios: Vec<f64>,
    /// `Σ_q (1−e^{−κ̂Tν2^{qα}})^{1/2} 2^{q/p} ‖Δ̇_q u₀‖_{L^p}`.
    pub smallness_proxy: f64,
    /// Smallest fitted `rate_q/(ν2^{qα})` over the nonzero blocks of `u₀`.
    pub kappa_hat: Option<f64>,
    pub dt: f64,
    /// Set for `α ≠ 1`, where the scheme is run outside its original setting.
    pub extension: bool,
    pub coupled: bool,
    /// Iterations completed before a numerical blow-up, if any.
    pub aborted_at: Option<usize>,
}

impl PicardReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().filter(|r| r.is_finite()).fold(0.0, f64::max)
    }
}

/// Runs `n_iters` Picard iterations with the velocity coupling on.
pub fn picard_solve(
    u0: &GridFunction,
    config: &SolverConfig,
    n_iters: usize,
) -> Result<(Vec<RunRecord>, PicardReport)> {
    picard_solve_with(
        u0,
        config,
        &PicardOptions {
            n_iters,
            ..PicardOptions::default()
        },
    )
}

/// Every iterate lives on one fixed step grid: `config.dt` if set, otherwise
/// the CFL step of `u₀`. Snapshots are kept at every step and the previous
/// iterate is interpolated linearly in time.
pub fn picard_solve_with(
    u0: &GridFunction,
    config: &SolverConfig,
    opts: &PicardOptions,
) -> Result<(Vec<RunRecord>, PicardReport)> {
    config.validate()?;
    if opts.n_iters == 0 {
        return Err(param("n_iters", "must be at least 1"));
    }
    let dt = config.dt.unwrap_or_else(|| cfl_timestep(u0, config));
    let inner = config.clone().with_dt(dt).with_stride(1);
    let diss = Dissipation::new(&config.domain, &config.params);
    let first = march(u0, &inner, |_, _| Ok(dt), |u, _, h| Ok(u.apply_weights(&diss.factor(h))))?;

    let mut records = vec![first];
    let mut differences = Vec::new();
    let mut aborted_at = None;
    for n in 0..opts.n_iters {
        let prev = records.last().expect("iterate 0");
        let velocity = if opts.coupled {
            TimeField::Series(prev.snapshots.clone())
        } else {
            TimeField::Zero
        };
        let next = solve_td(&TDProblem::new(u0.clone(), velocity, TimeField::Zero), &inner)?;
        if !next.is_complete() {
            aborted_at = Some(n + 1);
            records.push(next);
            break;
        }
        differences.push(sup_distance(prev, &next)?);
        records.push(next);
    }
    let ratios = differences
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::NAN })
        .collect();
    let (smallness_proxy, kappa_hat) = smallness_proxy(u0, config, opts.proxy_p)?;
    let report = PicardReport {
        differences,
        ratios,
        smallness_proxy,
        kappa_hat,
        dt,
        extension: config.params.alpha != 1.0,
        coupled: opts.coupled,
        aborted_at,
    };
    Ok((records, report))
}

/// `sup_t ‖a(t) − b(t)‖_∞` over snapshots on a shared time grid.
pub fn sup_distance(a: &RunRecord, b: &RunRecord) -> Result<f64> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::InsufficientData(format!(
            "records hold {} and {} snapshots",
            a.snapshots.len(),
            b.snapshots.len()
        )));
    }
    Ok(a.snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(x, y)| x.u.sub(&y.u).sup_norm())
        .fold(0.0, f64::max))
}

fn smallness_proxy(u0: &GridFunction, config: &SolverConfig, p: f64) -> Result<(f64, Option<f64>)> {
    let part = build_partition(&config.domain)?;
    let params = config.params;
    let u = u0.subtract_mean();
    let mut norms = Vec::new();
    let mut kappa: Option<f64> = None;
    for q in part.indices() {
        let block = dyadic_block(&u, q, &part)?;
        let norm = lebesgue_norm(&block, p)?;
        if norm <= 1e-14 * u.sup_norm().max(f64::MIN_POSITIVE) {
            continue;
        }
        if params.nu > 0.0 {
            let times = decay_fit_times(q, &params, 2.0, 6);
            let rate = semigroup_block_decay(&u, q, &params, &times, p, &part)?;
            let k = rate / (params.nu * 2f64.powf(q as f64 * params.alpha));
            kappa = Some(kappa.map_or(k, |m| m.min(k)));
        }
        norms.push((q, norm));
    }
    let kappa_val = kappa.unwrap_or(0.0);
    let proxy = norms
        .iter()
        .map(|&(q, norm)| {
            let damp = 1.0 - (-kappa_val * config.t_end * params.nu * 2f64.powf(q as f64 * params.alpha)).exp();
            damp.max(0.0).sqrt() * 2f64.powf(q as f64 / p) * norm
        })
        .sum();
    Ok((proxy, kappa))
}
