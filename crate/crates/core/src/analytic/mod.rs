//! Closed-form rate-distortion curves, asymptotic penalties, and bounds.
//!
//! Submodules:
//! - [`hamming`]: binary source with side-information-weighted Hamming
//!   distortion (informed and uninformed curves, noisy-observation and
//!   weighted-importance presets).
//! - [`gauss`]: unit-variance Gaussian source with scaled quadratic
//!   distortion (uninformed curve and water-pouring informed curve).
//! - [`gap`]: high-resolution rate penalty for encoder-blind coding across
//!   side-information distribution families.
//! - [`bounds`]: Fisher-information and low-resolution rate-loss bounds.
//! - [`slb`]: conditional Shannon lower bound for group-Hamming distortion.

pub mod bounds;
pub mod gap;
pub mod gauss;
pub mod hamming;
pub mod slb;

pub use bounds::{fisher_bound, fisher_information_numeric, lowres_bound, FisherSpec, LowResSpec};
pub use gap::{rate_gap_hr, rate_gap_hr_quadrature};
pub use gauss::{rd_gauss_both, rd_gauss_none, DiscreteQ, GaussBothPoint};
pub use hamming::{
    model_noisy_obs, model_weighted, rd_hamming_both, rd_hamming_none, HammingBothPoint,
    HammingSideModel,
};
pub use slb::slb_group_hamming;
