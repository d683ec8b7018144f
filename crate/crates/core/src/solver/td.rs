//! Integrating-factor Runge-Kutta stepping and the transport-diffusion solve
//! `∂ₜu + v∂ₓu + νΛ^α u = f`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::series::{interpolate, Snapshot};
use crate::spectral::{
    dealias, pointwise_product, spatial_derivative, symbol_power, DomainSpec, EvolutionParams,
    GridFunction,
};

use super::config::{cfl_timestep, Integrator, SolverConfig, CFL_VELOCITY_FLOOR};
use super::record::{RunRecord, RunStatus};

/// Per-mode dissipation rates `ν|ξ_k|^α`.
#[derive(Debug, Clone)]
pub(crate) struct Dissipation {
    rates: Vec<f64>,
}

impl Dissipation {
    pub(crate) fn new(domain: &DomainSpec, params: &EvolutionParams) -> Self {
        let rates = (0..domain.points)
            .map(|k| params.nu * symbol_power(domain.frequency(k), params.alpha))
            .collect();
        Self { rates }
    }

    /// `e^{-hνΛ^α}` as a weight table.
    pub(crate) fn factor(&self, h: f64) -> Vec<f64> {
        self.rates.iter().map(|r| (-h * r).exp()).collect()
    }
}

/// One integrating-factor step of `u' = −νΛ^α u + N(u, t)`.
pub(crate) fn if_rk_step(
    u: &GridFunction,
    t: f64,
    h: f64,
    integrator: Integrator,
    diss: &Dissipation,
    nonlinear: &mut dyn FnMut(&GridFunction, f64) -> Result<Option<GridFunction>>,
) -> Result<GridFunction> {
    let full = diss.factor(h);
    let add = |a: GridFunction, s: f64, b: &Option<GridFunction>| match b {
        Some(b) => a.axpy(s, b),
        None => a,
    };
    let propagate = |w: &GridFunction, f: &[f64]| w.apply_weights(f);
    match integrator {
        Integrator::ExponentialRk2 => {
            let k1 = nonlinear(u, t)?;
            let base = add(u.clone(), h, &k1);
            let u1 = propagate(&base, &full);
            let k2 = nonlinear(&u1, t + h)?;
            let half = add(u.clone(), 0.5 * h, &k1);
            Ok(add(propagate(&half, &full), 0.5 * h, &k2))
        }
        Integrator::ExponentialRk4 => {
            let half = diss.factor(0.5 * h);
            let k1 = nonlinear(u, t)?;
            let ua = propagate(&add(u.clone(), 0.5 * h, &k1), &half);
            let k2 = nonlinear(&ua, t + 0.5 * h)?;
            let u_half = propagate(u, &half);
            let ub = add(u_half, 0.5 * h, &k2);
            let k3 = nonlinear(&ub, t + 0.5 * h)?;
            let uc = match &k3 {
                Some(k3) => propagate(u, &full).axpy(h, &propagate(k3, &half)),
                None => propagate(u, &full),
            };
            let k4 = nonlinear(&uc, t + h)?;
            let mut acc = propagate(u, &full);
            if let Some(k1) = &k1 {
                acc = acc.axpy(h / 6.0, &propagate(k1, &full));
            }
            let mid = match (&k2, &k3) {
                (Some(a), Some(b)) => Some(propagate(&a.add(b), &half)),
                (Some(a), None) | (None, Some(a)) => Some(propagate(a, &half)),
                (None, None) => None,
            };
            acc = add(acc, h / 3.0, &mid);
            Ok(add(acc, h / 6.0, &k4))
        }
    }
}

/// `−P(v·∂ₓu)` with the 2/3-rule projection `P`.
pub(crate) fn advection(v: &GridFunction, u: &GridFunction) -> GridFunction {
    dealias(&pointwise_product(v, &spatial_derivative(u))).scale(-1.0)
}

/// A coefficient field given as a function of time.
#[derive(Clone, Default)]
pub enum TimeField {
    #[default]
    Zero,
    Constant(GridFunction),
    /// Linear interpolation between stored snapshots.
    Series(Vec<Snapshot>),
    Function(Arc<dyn Fn(f64) -> GridFunction + Send + Sync>),
}

impl fmt::Debug for TimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeField::Zero => write!(f, "Zero"),
            TimeField::Constant(_) => write!(f, "Constant(..)"),
            TimeField::Series(s) => write!(f, "Series({} snapshots)", s.len()),
            TimeField::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl TimeField {
    /// The field at time `t`; `None` stands for the zero field.
    pub fn at(&self, t: f64) -> Result<Option<GridFunction>> {
        Ok(match self {
            TimeField::Zero => None,
            TimeField::Constant(g) => Some(g.clone()),
            TimeField::Series(s) => Some(interpolate(s, t)?),
            TimeField::Function(f) => Some(f(t)),
        })
    }

    fn check_domain(&self, domain: &DomainSpec) -> Result<()> {
        match self {
            TimeField::Zero | TimeField::Function(_) => Ok(()),
            TimeField::Constant(g) => domain.ensure_same(g.domain()),
            TimeField::Series(s) => s.iter().try_for_each(|snap| domain.ensure_same(snap.u.domain())),
        }
    }
}

/// Initial data, velocity and forcing of a transport-diffusion problem.
#[derive(Debug, Clone)]
pub struct TDProblem {
    pub u0: GridFunction,
    pub velocity: TimeField,
    pub forcing: TimeField,
}

impl TDProblem {
    pub fn new(u0: GridFunction, velocity: TimeField, forcing: TimeField) -> Self {
        Self {
            u0,
            velocity,
            forcing,
        }
    }

    /// Pure dissipation: `v = 0`, `f = 0`.
    pub fn free(u0: GridFunction) -> Self {
        Self::new(u0, TimeField::Zero, TimeField::Zero)
    }
}

/// One step of `∂ₜu + v∂ₓu + νΛ^α u = f` with `v`, `f` frozen over the step.
pub fn step_td(
    u: &GridFunction,
    v: &GridFunction,
    f: &GridFunction,
    params: &EvolutionParams,
    dt: f64,
    integrator: Integrator,
) -> Result<GridFunction> {
    u.domain().ensure_same(v.domain())?;
    u.domain().ensure_same(f.domain())?;
    let diss = Dissipation::new(u.domain(), params);
    let v_zero = v.sup_norm() == 0.0;
    let f_zero = f.sup_norm() == 0.0;
    let mut rhs = |w: &GridFunction, _t: f64| -> Result<Option<GridFunction>> {
        Ok(match (v_zero, f_zero) {
            (true, true) => None,
            (true, false) => Some(f.clone()),
            (false, true) => Some(advection(v, w)),
            (false, false) => Some(advection(v, w).add(f)),
        })
    };
    if_rk_step(u, 0.0, dt, integrator, &diss, &mut rhs)
}

pub(crate) fn all_finite(u: &GridFunction) -> bool {
    u.samples().iter().all(|x| x.is_finite())
}

/// Shared time loop: picks the step, lands on `t_end`, records diagnostics,
/// stops cleanly on non-finite state.
pub(crate) fn march(
    u0: &GridFunction,
    config: &SolverConfig,
    mut choose_dt: impl FnMut(&GridFunction, f64) -> Result<f64>,
    mut advance: impl FnMut(&GridFunction, f64, f64) -> Result<GridFunction>,
) -> Result<RunRecord> {
    config.validate()?;
    config.domain.ensure_same(u0.domain())?;
    let mut record = RunRecord::start(config, u0);
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut step = 0usize;
    let t_end = config.t_end;
    while t < t_end {
        let mut dt = choose_dt(&u, t)?;
        let last = t + dt * (1.0 + 1e-9) >= t_end;
        if last {
            dt = t_end - t;
        }
        let next = advance(&u, t, dt)?;
        let t_next = if last { t_end } else { t + dt };
        if !all_finite(&next) {
            record.status = RunStatus::NumericalBlowUp { t: t_next };
            return Ok(record);
        }
        u = next;
        t = t_next;
        step += 1;
        record.record_step(t, dt, &u);
        if step.is_multiple_of(config.snapshot_stride) || last {
            record.snapshots.push(Snapshot::new(t, u.clone()));
        }
    }
    Ok(record)
}

/// Solves the transport-diffusion problem to `config.t_end`.
///
/// With `config.dt = None` the step follows the CFL rule for the velocity at
/// the start of each step. A fixed step that violates it is kept and a
/// warning is attached to the record.
pub fn solve_td(problem: &TDProblem, config: &SolverConfig) -> Result<RunRecord> {
    config.validate()?;
    problem.velocity.check_domain(&config.domain)?;
    problem.forcing.check_domain(&config.domain)?;
    let diss = Dissipation::new(&config.domain, &config.params);
    let dx = config.domain.dx();
    let mut violations = 0usize;
    let mut worst = 0.0_f64;
    let mut record = march(
        &problem.u0,
        config,
        |_, t| {
            let v = problem.velocity.at(t)?;
            let vmax = v.as_ref().map_or(0.0, |v| v.sup_norm());
            let dt = match config.dt {
                Some(dt) => dt,
                None => match &v {
                    Some(v) => cfl_timestep(v, config),
                    None => config.cfl * dx / CFL_VELOCITY_FLOOR,
                },
            };
            let courant = dt * vmax / dx;
            if courant > config.cfl * (1.0 + 1e-12) {
                violations += 1;
                worst = worst.max(courant);
            }
            Ok(dt.min(config.t_end))
        },
        |u, t, dt| {
            let mut rhs = |w: &GridFunction, s: f64| -> Result<Option<GridFunction>> {
                let adv = problem.velocity.at(s)?.map(|v| advection(&v, w));
                let force = problem.forcing.at(s)?;
                Ok(match (adv, force) {
                    (Some(a), Some(f)) => Some(a.add(&f)),
                    (Some(a), None) => Some(a),
                    (None, Some(f)) => Some(f),
                    (None, None) => None,
                })
            };
            if_rk_step(u, t, dt, config.integrator, &diss, &mut rhs)
        },
    )?;
    if violations > 0 {
        record.warnings.push(format!(
            "CFL exceeded on {violations} steps (max Courant number {worst:.3e} > {})",
            config.cfl
        ));
    }
    Ok(record)
}

/// Translation by `shift` via spectral phase factors (exact for grid functions).
pub fn spectral_translate(u: &GridFunction, shift: f64) -> GridFunction {
    let d = *u.domain();
    let n = d.points;
    let spectrum: Vec<Complex64> = u
        .spectrum()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if k == n / 2 {
                // Real part of the Nyquist mode under translation.
                c * (d.frequency(k) * shift).cos()
            } else {
                c * Complex64::from_polar(1.0, -d.frequency(k) * shift)
            }
        })
        .collect();
    GridFunction::from_spectrum(d, spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::semigroup_apply;
    use std::f64::consts::PI;

    fn dom(n: usize) -> DomainSpec {
        DomainSpec::periodic_2pi(n).unwrap()
    }

    fn smooth(d: DomainSpec) -> GridFunction {
        GridFunction::from_fn(d, |x| (x.sin()).exp() - 1.2660658777520082).unwrap()
    }

    #[test]
    fn free_step_is_semigroup() {
        let d = dom(64);
        let u = smooth(d);
        let z = GridFunction::zeros(d);
        let p = EvolutionParams::new(1.3, 0.8).unwrap();
        for integ in [Integrator::ExponentialRk2, Integrator::ExponentialRk4] {
            let a = step_td(&u, &z, &z, &p, 0.05, integ).unwrap();
            let b = semigroup_apply(&u, 0.05, &p).unwrap();
            assert!(a.sub(&b).sup_norm() < 1e-13);
        }
    }

    /// Error of one constant-speed advection step against exact translation.
    fn advection_error(h: f64, integ: Integrator) -> f64 {
        let d = dom(64);
        let u = GridFunction::from_fn(d, |x| (x.sin()).exp()).unwrap();
        // Band-limit to the dealiased range so only time error remains.
        let u = dealias(&u);
        let c = 0.9;
        let v = GridFunction::constant(d, c);
        let z = GridFunction::zeros(d);
        let p = EvolutionParams::new(1.0, 0.0).unwrap();
        let stepped = step_td(&u, &v, &z, &p, h, integ).unwrap();
        stepped.sub(&spectral_translate(&u, c * h)).sup_norm()
    }

    #[test]
    fn advection_local_error_order() {
        for (integ, order) in [(Integrator::ExponentialRk2, 2), (Integrator::ExponentialRk4, 4)] {
            let e1 = advection_error(0.02, integ);
            let e2 = advection_error(0.01, integ);
            let observed = (e1 / e2).log2();
            assert!(
                (observed - (order as f64 + 1.0)).abs() < 0.3,
                "{integ:?}: observed local order {observed}"
            );
        }
    }

    #[test]
    fn forcing_matches_duhamel() {
        // Per mode: u(h) = e^{-hr}u0 + (1 - e^{-hr})/r · f.
        let d = dom(32);
        let p = EvolutionParams::new(1.0, 1.0).unwrap();
        let u0 = GridFunction::from_fn(d, |x| x.sin()).unwrap();
        let f = GridFunction::from_fn(d, |x| 0.5 * (3.0 * x).cos()).unwrap();
        let z = GridFunction::zeros(d);
        let exact = |h: f64| {
            GridFunction::from_fn(d, |x| {
                (-h).exp() * x.sin() + 0.5 * (1.0 - (-3.0 * h).exp()) / 3.0 * (3.0 * x).cos()
            })
            .unwrap()
        };
        for (integ, order) in [(Integrator::ExponentialRk2, 2.0), (Integrator::ExponentialRk4, 4.0)] {
            let err = |h: f64| step_td(&u0, &z, &f, &p, h, integ).unwrap().sub(&exact(h)).sup_norm();
            let (e1, e2) = (err(0.04), err(0.02));
            assert!(e1 < 1e-3);
            assert!((e1 / e2).log2() > order + 0.7, "{integ:?}");
        }
    }

    #[test]
    fn solve_free_decay() {
        let d = dom(64);
        let u0 = GridFunction::from_fn(d, f64::sin).unwrap();
        let cfg = SolverConfig::new(d, EvolutionParams::critical(), 1.0).with_dt(1e-3).with_stride(100);
        let rec = solve_td(&TDProblem::free(u0.clone()), &cfg).unwrap();
        let last = rec.final_snapshot();
        assert_eq!(last.t, 1.0);
        assert!(last.u.sub(&u0.scale((-1.0_f64).exp())).sup_norm() < 1e-8);
        assert_eq!(rec.snapshots.len(), 11);
        assert_eq!(rec.steps(), 1000);
    }

    #[test]
    fn solve_transport() {
        let d = dom(64);
        let u0 = dealias(&GridFunction::from_fn(d, |x| (x.cos()).exp()).unwrap());
        let c = 0.7;
        let cfg = SolverConfig::new(d, EvolutionParams::new(1.0, 0.0).unwrap(), 2.0)
            .with_cfl(0.1)
            .with_stride(1000);
        let prob = TDProblem::new(u0.clone(), TimeField::Constant(GridFunction::constant(d, c)), TimeField::Zero);
        let rec = solve_td(&prob, &cfg).unwrap();
        let err = rec.final_snapshot().u.sub(&spectral_translate(&u0, c * 2.0)).sup_norm();
        assert!(err < 1e-8, "{err}");
        assert!(rec.warnings.is_empty());
    }

    #[test]
    fn zero_data_stays_zero() {
        let d = dom(32);
        let cfg = SolverConfig::new(d, EvolutionParams::critical(), 0.5).with_dt(0.01);
        let rec = solve_td(&TDProblem::free(GridFunction::zeros(d)), &cfg).unwrap();
        assert!(rec.snapshots.iter().all(|s| s.u.sup_norm() == 0.0));
    }

    #[test]
    fn cfl_violation_is_a_warning() {
        let d = dom(32);
        let cfg = SolverConfig::new(d, EvolutionParams::critical(), 0.5).with_dt(0.5);
        let prob = TDProblem::new(
            GridFunction::from_fn(d, f64::sin).unwrap(),
            TimeField::Constant(GridFunction::constant(d, 10.0)),
            TimeField::Zero,
        );
        let rec = solve_td(&prob, &cfg).unwrap();
        assert_eq!(rec.warnings.len(), 1);
    }

    #[test]
    fn unstable_step_aborts_with_partial_record() {
        let d = dom(32);
        let cfg = SolverConfig::new(d, EvolutionParams::new(1.0, 0.0).unwrap(), 1e4).with_dt(1.0);
        let prob = TDProblem::new(
            GridFunction::from_fn(d, f64::sin).unwrap(),
            TimeField::Constant(GridFunction::constant(d, 50.0)),
            TimeField::Zero,
        );
        let rec = solve_td(&prob, &cfg).unwrap();
        assert!(matches!(rec.status, RunStatus::NumericalBlowUp { .. }));
        assert!(rec.steps() > 0);
        assert!(rec.diagnostics.iter().all(|r| r.sup_norm.is_finite()));
    }

    #[test]
    fn translate_by_period_is_identity() {
        let d = dom(32);
        let u = smooth(d);
        assert!(spectral_translate(&u, 2.0 * PI).sub(&u).sup_norm() < 1e-13);
        let shifted = spectral_translate(&GridFunction::from_fn(d, f64::sin).unwrap(), 0.3);
        let expected = GridFunction::from_fn(d, |x| (x - 0.3).sin()).unwrap();
        assert!(shifted.sub(&expected).sup_norm() < 1e-14);
    }
}
