//! Homogeneous Littlewood-Paley analysis on the periodic grid.
//!
//! The `k = 0` mode is excluded from every block, cutoff and norm, so all
//! analysis inputs must be mean-zero. The dyadic sum is truncated to the
//! range `[q_min, q_max]` the grid resolves; for grid functions this
//! truncation is exact.

mod besov;
mod blocks;
mod bony;
mod decay;
mod partition;

pub use besov::{block_norms, besov_norm, spacetime_besov_norm, BesovSpec, SpaceTimeVariant};
pub use blocks::{dyadic_block, low_cutoff, BlockDecomposition};
pub use bony::{commutator_terms, paraproduct, remainder, CommutatorTerms};
pub use decay::{decay_fit_times, semigroup_block_decay};
pub use partition::{build_partition, chi, phi, DyadicPartition, CHI_PLATEAU, CHI_SUPPORT, PHI_SUPPORT};

