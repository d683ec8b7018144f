//! Pseudo-spectral simulation and harmonic analysis for the 1-D fractal
//! Burgers equation `∂ₜu + u∂ₓu + νΛ^α u = f` on a periodic domain.
//!
//! * [`spectral`]: grid functions, exact Fourier multipliers, Lebesgue norms.
//! * [`littlewood_paley`]: dyadic blocks, Besov norms, paraproducts, commutators.
//! * [`solver`]: integrating-factor Runge-Kutta solvers and the Picard scheme.
//! * [`analysis`]: modulus of continuity, blow-up integral, smoothing and
//!   a priori monitors.
//! * [`snapshot`]: the binary snapshot file format.

pub mod analysis;
pub mod error;
pub mod littlewood_paley;
pub mod series;
pub mod snapshot;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use littlewood_paley::{BesovSpec, DyadicPartition};
pub use series::Snapshot;
pub use spectral::{DomainSpec, EvolutionParams, GridFunction};
