//! Proven-in-use claims from fleet operating experience.
//!
//! [`exposure`] turns a [`FleetLog`] into counted hours and dangerous
//! failures for one component version. [`rate_upper_bound`] gives the
//! one-sided chi-square bound on a constant failure rate, [`sil_for_rate`]
//! maps it to a SIL band, and [`evaluate_claim`] gates the result on the
//! qualitative [`Checklist`].

mod bounds;
mod claim;
mod fleet;
mod sil;

pub use bounds::{chi_square_quantile, rate_upper_bound, required_exposure};
pub use claim::{
    en50129_check, evaluate_claim, evaluate_claim_with_bands, Checklist, ClaimResult,
    DEFAULT_CONFIDENCE,
};
pub use fleet::{
    exposure, Exclusion, Exposure, FailureEvent, FleetLog, ServiceInterval, ServiceRecord,
    HOURS_PER_YEAR,
};
pub use sil::{sil_for_rate, Sil, SilBands};
