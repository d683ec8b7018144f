//! One function per experiment kind. Each writes its artifacts and returns
//! the blow-up time when the underlying solve aborted.

use fbl_core::analysis::{
    apriori_ratio, blowup_integral, c0_select, lambda_select, log_grid, modulus_check, negativity_scan,
    smoothing_profile, AprioriOptions, AprioriReport, Modulus,
};
use fbl_core::littlewood_paley::{
    besov_norm, block_norms, build_partition, commutator_terms, decay_fit_times, paraproduct, remainder,
    semigroup_block_decay,
};
use fbl_core::solver::{
    picard_solve_with, solve_burgers, solve_td, PicardOptions, RunRecord, RunStatus, TDProblem,
    TimeField,
};
use fbl_core::spectral::{lebesgue_norm, product_exact};
use fbl_core::{BesovSpec, DomainSpec, GridFunction, Snapshot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::artifacts::{num, ArtifactWriter};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, CliResult};

pub fn run_kind(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    match cfg.kind {
        ExperimentKind::Solve => solve(cfg, out),
        ExperimentKind::Picard => picard(cfg, out),
        ExperimentKind::LpAnalyze => lp_analyze(cfg, out),
        ExperimentKind::ModulusCheck => modulus(cfg, out),
        ExperimentKind::CommutatorTest => commutator(cfg, out),
        ExperimentKind::AprioriScan => apriori(cfg, out),
        ExperimentKind::NegativityScan => negativity(cfg, out),
    }
}

fn blown_up(record: &RunRecord) -> Option<f64> {
    match record.status {
        RunStatus::Completed => None,
        RunStatus::NumericalBlowUp { t } => Some(t),
    }
}

fn record_summary(record: &RunRecord) -> serde_json::Value {
    let last = record.diagnostics.last().expect("initial row");
    json!({
        "status": record.status,
        "warnings": record.warnings,
        "steps": record.steps(),
        "t_end": last.t,
        "sup_norm_final": last.sup_norm,
        "grad_sup_final": last.grad_sup,
        "l2_norm_final": last.l2_norm,
        "mean_final": last.mean,
        "blowup_integral": last.blowup_cumulative,
    })
}

fn modulus_of(cfg: &ExperimentConfig) -> CliResult<Modulus> {
    Ok(Modulus::piecewise(cfg.analysis.xi0)?)
}

fn solve(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    let u0 = cfg.initial_data()?;
    let record = solve_burgers(&u0, &cfg.solver_config())?;
    out.write_diagnostics(&record.diagnostics)?;
    out.write_snapshots(&record, &cfg.params())?;
    let mut report = record_summary(&record);
    if record.is_complete() && record.diagnostics.len() >= 2 {
        let series = blowup_integral(&record)?;
        report["blowup_last_half_fraction"] = json!(series.last_half_fraction());
        let part = build_partition(&cfg.domain())?;
        let mut profiles = Vec::new();
        for spec in &cfg.analysis.besov {
            let spec = BesovSpec::critical(spec.p)?;
            for &beta in &cfg.analysis.betas {
                let prof = smoothing_profile(&record, beta, &spec, &part)?;
                profiles.push(json!({"beta": beta, "p": spec.p, "sup": prof.sup}));
            }
        }
        report["smoothing"] = json!(profiles);
    }
    out.write_json("report.json", &report)?;
    Ok(blown_up(&record))
}

fn picard(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    let u0 = cfg.initial_data()?;
    let opts = PicardOptions {
        n_iters: cfg.analysis.picard_iters,
        coupled: cfg.analysis.picard_coupled,
        ..PicardOptions::default()
    };
    let solver = cfg.solver_config();
    let (records, report) = picard_solve_with(&u0, &solver, &opts)?;
    let last = records.last().expect("iterate 0");
    out.write_diagnostics(&last.diagnostics)?;
    let mut final_only = last.clone();
    final_only.snapshots = vec![last.snapshots[0].clone(), last.final_snapshot().clone()];
    if final_only.snapshots[0].t == final_only.snapshots[1].t {
        final_only.snapshots.truncate(1);
    }
    out.write_snapshots(&final_only, &cfg.params())?;
    out.write_csv(
        "picard.csv",
        &["n", "d_n", "ratio"],
        report.differences.iter().enumerate().map(|(n, d)| {
            let ratio = if n == 0 { f64::NAN } else { report.ratios[n - 1] };
            vec![n.to_string(), num(*d), num(ratio)]
        }),
    )?;
    let mut direct_distance = None;
    if last.is_complete() {
        let direct = solve_burgers(&u0, &solver.clone().with_dt(report.dt).with_stride(1))?;
        if direct.is_complete() {
            direct_distance = Some(last.final_snapshot().u.sub(&direct.final_snapshot().u).sup_norm());
        }
    }
    let mut summary = record_summary(last);
    summary["picard"] = json!(report);
    summary["picard_ratios"] = json!(report.ratios);
    summary["direct_distance"] = json!(direct_distance);
    out.write_json("report.json", &summary)?;
    Ok(blown_up(last))
}

fn lp_analyze(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    let u = cfg.initial_data()?.subtract_mean();
    let d = cfg.domain();
    let part = build_partition(&d)?;
    let params = cfg.params();
    let a = &cfg.analysis;
    let l2 = block_norms(&u, 2.0, &part)?;
    let scale = lebesgue_norm(&u, 2.0)?;
    let mut rows = Vec::new();
    for &(q, norm) in &l2 {
        let rate = if params.nu > 0.0 && norm > 1e-13 * scale {
            let times = decay_fit_times(q, &params, a.decay_horizon, a.decay_points);
            semigroup_block_decay(&u, q, &params, &times, 2.0, &part).ok()
        } else {
            None
        };
        let normalized = rate.map(|r| r / (params.nu * 2f64.powf(q as f64 * params.alpha)));
        rows.push(vec![
            q.to_string(),
            num(norm),
            rate.map_or("nan".into(), num),
            normalized.map_or("nan".into(), num),
        ]);
    }
    out.write_csv("blocks.csv", &["q", "l2_norm", "decay_rate", "normalized_rate"], rows)?;
    let norms = a
        .besov
        .iter()
        .map(|&b| {
            let spec: BesovSpec = b.into();
            Ok(json!({"spec": b, "norm": besov_norm(&u, &spec, &part)?}))
        })
        .collect::<CliResult<Vec<_>>>()?;
    out.write_json(
        "report.json",
        &json!({"q_min": part.q_min(), "q_max": part.q_max(), "besov": norms}),
    )?;
    Ok(None)
}

/// First stored time at or after 1% of the run length.
pub fn first_positive_time(record: &RunRecord) -> Option<&Snapshot> {
    let t_end = record.config.t_end;
    record.snapshots.iter().find(|s| s.t > 0.0 && s.t >= 0.01 * t_end)
}

#[derive(Debug, Clone, Serialize)]
pub struct PreservationSummary {
    pub t1: f64,
    pub ln_lambda: f64,
    pub log10_lambda: f64,
    pub ln_c0: f64,
    pub all_passed: bool,
    pub min_margin: f64,
    pub max_grad_after_t1: f64,
    pub grad_bound_holds: bool,
    pub checks: Vec<(f64, f64, bool)>,
}

/// Modulus preservation along a solved run, with λ chosen at `T₁`.
pub fn preservation(record: &RunRecord, m: &Modulus) -> CliResult<PreservationSummary> {
    let u0 = &record.snapshots[0].u;
    let sup0 = u0.sup_norm();
    let t1 = first_positive_time(record)
        .ok_or_else(|| CliError::invalid("solver.snapshot_stride", "no stored snapshot after T₁"))?;
    let grad_t1 = record
        .diagnostics
        .iter()
        .find(|r| r.t == t1.t)
        .map(|r| r.grad_sup)
        .expect("diagnostics at every step");
    let lambda = lambda_select(sup0, grad_t1, m)?;
    let c0 = c0_select(sup0, m)?;
    let mut checks = Vec::new();
    for s in record.snapshots.iter().filter(|s| s.t >= t1.t) {
        let rep = modulus_check(&s.u, lambda, m)?;
        checks.push((s.t, rep.margin, rep.passed));
    }
    let max_grad = record
        .diagnostics
        .iter()
        .filter(|r| r.t >= t1.t)
        .map(|r| r.grad_sup)
        .fold(0.0, f64::max);
    Ok(PreservationSummary {
        t1: t1.t,
        ln_lambda: lambda.ln,
        log10_lambda: lambda.log10(),
        ln_c0: c0.ln,
        all_passed: checks.iter().all(|c| c.2),
        min_margin: checks.iter().map(|c| c.1).fold(f64::INFINITY, f64::min),
        grad_bound_holds: max_grad.ln() <= lambda.ln,
        max_grad_after_t1: max_grad,
        checks,
    })
}

fn modulus(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    let u0 = cfg.initial_data()?;
    let record = solve_burgers(&u0, &cfg.solver_config())?;
    out.write_diagnostics(&record.diagnostics)?;
    out.write_snapshots(&record, &cfg.params())?;
    if let Some(t) = blown_up(&record) {
        out.write_json("report.json", &record_summary(&record))?;
        return Ok(Some(t));
    }
    let summary = preservation(&record, &modulus_of(cfg)?)?;
    out.write_csv(
        "modulus.csv",
        &["t", "margin", "passed"],
        summary.checks.iter().map(|(t, m, p)| vec![num(*t), num(*m), p.to_string()]),
    )?;
    let mut report = record_summary(&record);
    report["modulus"] = json!(summary);
    report["modulus_margin"] = json!(summary.min_margin);
    out.write_json("report.json", &report)?;
    Ok(None)
}

/// Mean-zero random trigonometric polynomial with modes `1..=kmax`.
pub fn random_field(d: DomainSpec, kmax: usize, amplitude: f64, rng: &mut impl Rng) -> CliResult<GridFunction> {
    let k0 = 2.0 * std::f64::consts::PI / d.length;
    let coeffs: Vec<(f64, f64)> = (1..=kmax)
        .map(|k| {
            let w = amplitude / k as f64;
            (w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0))
        })
        .collect();
    Ok(GridFunction::from_fn(d, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64 * k0;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum()
    })?)
}

fn member_rng(cfg: &ExperimentConfig, member: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.initial.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(member as u64))
}

/// Bony residual and worst commutator residual for one random pair, relative to `‖u‖_∞‖v‖_∞`.
pub fn commutator_pair(cfg: &ExperimentConfig, pair: usize) -> CliResult<(f64, Vec<(i32, f64)>)> {
    let d = cfg.domain();
    let part = build_partition(&d)?;
    let mut rng = member_rng(cfg, pair);
    let kmax = d.points / 4;
    let u = random_field(d, kmax, cfg.initial.amplitude, &mut rng)?;
    let v = random_field(d, kmax, cfg.initial.amplitude, &mut rng)?;
    let scale = u.sup_norm() * v.sup_norm();
    let bony = paraproduct(&u, &v, &part)?
        .add(&paraproduct(&v, &u, &part)?)
        .add(&remainder(&u, &v, &part)?)
        .sub(&product_exact(&u, &v))
        .sup_norm()
        / scale;
    let per_q = part
        .indices()
        .map(|q| Ok((q, commutator_terms(&v, &u, q, &part)?.residual() / scale)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((bony, per_q))
}

fn commutator(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    let mut rows = Vec::new();
    let (mut worst_bony, mut worst_comm) = (0.0_f64, 0.0_f64);
    for pair in 0..cfg.analysis.pairs {
        let (bony, per_q) = commutator_pair(cfg, pair)?;
        worst_bony = worst_bony.max(bony);
        for (q, r) in per_q {
            worst_comm = worst_comm.max(r);
            rows.push(vec![pair.to_string(), q.to_string(), num(bony), num(r)]);
        }
    }
    out.write_csv("commutator.csv", &["pair", "q", "bony_residual", "commutator_residual"], rows)?;
    out.write_json(
        "report.json",
        &json!({"pairs": cfg.analysis.pairs, "max_bony_residual": worst_bony, "max_commutator_residual": worst_comm}),
    )?;
    Ok(None)
}

pub fn apriori_options(cfg: &ExperimentConfig) -> AprioriOptions {
    AprioriOptions {
        rho: cfg.analysis.rho,
        rho1: cfg.analysis.rho1,
        p1: cfg.analysis.p1,
    }
}

/// One ensemble member: random `u₀` and frozen random `v`, transport-diffusion solve, estimate ratio.
pub fn apriori_member(cfg: &ExperimentConfig, member: usize) -> CliResult<AprioriReport> {
    let d = cfg.domain();
    let part = build_partition(&d)?;
    let mut rng = member_rng(cfg, member);
    let u0 = random_field(d, 8, cfg.initial.amplitude, &mut rng)?;
    let v = random_field(d, 4, 0.5 * cfg.initial.amplitude, &mut rng)?;
    let problem = TDProblem::new(u0, TimeField::Constant(v.clone()), TimeField::Zero);
    let record = solve_td(&problem, &cfg.solver_config())?;
    if let Some(t) = blown_up(&record) {
        return Err(CliError::BlowUp { t });
    }
    let velocity: Vec<Snapshot> = record.times().into_iter().map(|t| Snapshot::new(t, v.clone())).collect();
    let spec: BesovSpec = cfg.analysis.besov[0].into();
    Ok(apriori_ratio(&record, &velocity, &[], &spec, &apriori_options(cfg), &part)?)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn apriori(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    let reports = (0..cfg.analysis.members)
        .map(|m| apriori_member(cfg, m))
        .collect::<CliResult<Vec<_>>>()?;
    out.write_csv(
        "apriori.csv",
        &["member", "lhs", "rhs_core", "z_t", "ratio"],
        reports
            .iter()
            .enumerate()
            .map(|(i, r)| vec![i.to_string(), num(r.lhs), num(r.rhs_core), num(r.z_t), num(r.ratio)]),
    )?;
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let med = median(&ratios);
    let mut warnings: Vec<String> = reports.iter().flat_map(|r| r.warnings.clone()).collect();
    warnings.dedup();
    out.write_json(
        "report.json",
        &json!({
            "members": ratios.len(),
            "apriori_ratio": max,
            "ratio_max": max,
            "ratio_median": med,
            "max_over_median": max / med,
            "warnings": warnings,
        }),
    )?;
    Ok(None)
}

fn negativity(cfg: &ExperimentConfig, out: &mut ArtifactWriter) -> CliResult<Option<f64>> {
    let g = &cfg.analysis.xi_grid;
    let rep = negativity_scan(&modulus_of(cfg)?, &log_grid(g.lo, g.hi, g.count), cfg.analysis.quad_tol)?;
    out.write_csv(
        "negativity.csv",
        &["xi", "omega", "omega_prime", "J", "sum"],
        rep.points
            .iter()
            .map(|p| vec![num(p.xi), num(p.omega), num(p.omega_prime), num(p.j), num(p.sum)]),
    )?;
    out.write_json(
        "report.json",
        &json!({"passed": rep.passed, "no_data": rep.no_data, "violations": rep.violations, "negativity_max": rep.max_sum}),
    )?;
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
