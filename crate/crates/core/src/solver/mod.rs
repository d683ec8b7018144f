//! Integrating-factor time stepping for transport-diffusion and Burgers
//! problems, and the Picard scheme built from them.
//!
//! The dissipation `e^{-hνΛ^α}` is applied exactly per mode; the transport
//! and forcing terms are advanced by an explicit Runge-Kutta rule with
//! 2/3-rule dealiased products.

mod burgers;
mod config;
mod picard;
mod record;
mod td;

pub use burgers::{burgers_nonlinearity, solve_burgers};
pub use config::{cfl_timestep, Integrator, SolverConfig, CFL_VELOCITY_FLOOR};
pub use picard::{picard_solve, picard_solve_with, sup_distance, PicardOptions, PicardReport};
pub use record::{DiagnosticRow, RunRecord, RunStatus};
pub use td::{solve_td, spectral_translate, step_td, TDProblem, TimeField};
