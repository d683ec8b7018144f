//! Modulus-of-continuity machinery, the blow-up integral, the smoothing
//! profile and the a priori estimate monitor.

mod continuity;
mod modulus;
mod monitors;
mod negativity;
mod quadrature;

pub use continuity::{c0_select, lambda_select, modulus_check, ModulusCheckReport, WitnessPair};
pub use modulus::{modulus_eval, modulus_inverse, LogMagnitude, Modulus, ModulusMode};
pub use monitors::{
    apriori_ratio, blowup_integral, smoothing_profile, AprioriOptions, AprioriReport, BlowupSeries,
    SmoothingProfile,
};
pub use negativity::{j_integral, j_integral_truncated, log_grid, negativity_scan, NegativityPoint, NegativityReport};
