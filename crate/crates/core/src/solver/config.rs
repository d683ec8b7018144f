use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::spectral::{DomainSpec, EvolutionParams, GridFunction};

/// Floor on `‖u‖_∞` in the CFL formula.
pub const CFL_VELOCITY_FLOOR: f64 = 1e-12;

/// Explicit Runge-Kutta rule wrapped around the exact dissipation factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Integrating-factor Heun, second order.
    ExponentialRk2,
    /// Integrating-factor classical RK4 (Lawson), fourth order.
    #[default]
    ExponentialRk4,
}

impl Integrator {
    pub fn order(self) -> u32 {
        match self {
            Integrator::ExponentialRk2 => 2,
            Integrator::ExponentialRk4 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub domain: DomainSpec,
    pub params: EvolutionParams,
    pub t_end: f64,
    /// Fixed step; `None` selects the CFL step every step.
    pub dt: Option<f64>,
    pub cfl: f64,
    pub snapshot_stride: usize,
    pub integrator: Integrator,
}

impl SolverConfig {
    pub fn new(domain: DomainSpec, params: EvolutionParams, t_end: f64) -> Self {
        Self {
            domain,
            params,
            t_end,
            dt: None,
            cfl: 0.4,
            snapshot_stride: 1,
            integrator: Integrator::default(),
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn validate(&self) -> Result<()> {
        DomainSpec::new(self.domain.length, self.domain.points)?;
        EvolutionParams::new(self.params.alpha, self.params.nu)?;
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(param("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(param("dt", format!("must be positive, got {dt}")));
            }
        }
        if !(self.cfl.is_finite() && self.cfl > 0.0) {
            return Err(param("cfl", format!("must be positive, got {}", self.cfl)));
        }
        if self.snapshot_stride == 0 {
            return Err(param("snapshot_stride", "must be at least 1"));
        }
        Ok(())
    }
}

/// `min(config.dt, cfl·Δx / max(‖u‖_∞, 1e-12))`.
pub fn cfl_timestep(u: &GridFunction, config: &SolverConfig) -> f64 {
    let bound = config.cfl * config.domain.dx() / u.sup_norm().max(CFL_VELOCITY_FLOOR);
    match config.dt {
        Some(dt) => dt.min(bound),
        None => bound,
    }
}
