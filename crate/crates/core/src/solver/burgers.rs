//! The fractal Burgers equation `∂ₜu + u∂ₓu + νΛ^α u = 0`.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{pointwise_product, signed_wavenumber, GridFunction};

use super::config::{cfl_timestep, SolverConfig};
use super::record::RunRecord;
use super::td::{if_rk_step, march, Dissipation};

/// `−P∂ₓ(u²/2)`: the transport term in conservative form with the 2/3-rule
/// projection `P`. The Nyquist mode is dropped with the rest of the top third.
pub fn burgers_nonlinearity(u: &GridFunction) -> GridFunction {
    let d = *u.domain();
    let n = d.points;
    let sq = pointwise_product(u, u);
    let spectrum = sq
        .spectrum()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if 3 * signed_wavenumber(k, n).unsigned_abs() as usize > n {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, -0.5 * d.frequency(k))
            }
        })
        .collect();
    GridFunction::from_spectrum(d, spectrum)
}

/// Solves the Burgers equation to `config.t_end`; `dt = None` takes the CFL
/// step of the current state at every step.
pub fn solve_burgers(u0: &GridFunction, config: &SolverConfig) -> Result<RunRecord> {
    let diss = Dissipation::new(&config.domain, &config.params);
    march(
        u0,
        config,
        |u, _| Ok(cfl_timestep(u, config)),
        |u, t, dt| {
            let mut rhs = |w: &GridFunction, _s: f64| Ok(Some(burgers_nonlinearity(w)));
            if_rk_step(u, t, dt, config.integrator, &diss, &mut rhs)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::config::Integrator;
    use crate::spectral::{spatial_derivative, dealias, DomainSpec, EvolutionParams};

    fn dom(n: usize) -> DomainSpec {
        DomainSpec::periodic_2pi(n).unwrap()
    }

    #[test]
    fn nonlinearity_matches_product_form_on_band_limited_data() {
        let d = dom(64);
        let u = GridFunction::from_fn(d, |x| x.sin() + 0.3 * (4.0 * x).cos()).unwrap();
        let direct = dealias(&pointwise_product(&u, &spatial_derivative(&u))).scale(-1.0);
        assert!(burgers_nonlinearity(&u).sub(&direct).sup_norm() < 1e-13);
    }

    #[test]
    fn trivial_states() {
        let d = dom(64);
        let cfg = SolverConfig::new(d, EvolutionParams::critical(), 0.5);
        let rec = solve_burgers(&GridFunction::zeros(d), &cfg).unwrap();
        assert!(rec.snapshots.iter().all(|s| s.u.sup_norm() == 0.0));
        let c = GridFunction::constant(d, 0.7);
        let rec = solve_burgers(&c, &cfg).unwrap();
        assert!(rec.is_complete());
        assert!(rec.final_snapshot().u.sub(&c).sup_norm() < 1e-14);
    }

    #[test]
    fn conservation_and_monotonicity() {
        let d = dom(256);
        let u0 = GridFunction::from_fn(d, |x| x.sin() + 0.2).unwrap();
        let cfg = SolverConfig::new(d, EvolutionParams::critical(), 1.0);
        let rec = solve_burgers(&u0, &cfg).unwrap();
        for w in rec.diagnostics.windows(2) {
            assert!((w[1].mean - u0.mean()).abs() < 1e-10);
            assert!(w[1].sup_norm <= w[0].sup_norm + 1e-10);
            assert!(w[1].l2_norm <= w[0].l2_norm + 1e-10);
        }
    }

    #[test]
    fn temporal_convergence_rk4() {
        let d = dom(128);
        let u0 = GridFunction::from_fn(d, f64::sin).unwrap();
        let run = |dt: f64| {
            let cfg = SolverConfig::new(d, EvolutionParams::critical(), 0.5)
                .with_dt(dt)
                .with_integrator(Integrator::ExponentialRk4);
            solve_burgers(&u0, &cfg).unwrap().final_snapshot().u.clone()
        };
        let reference = run(1e-3);
        let e1 = run(0.02).sub(&reference).sup_norm();
        let e2 = run(0.01).sub(&reference).sup_norm();
        assert!((e1 / e2).log2() > 3.5, "{e1} {e2}");
    }
}
