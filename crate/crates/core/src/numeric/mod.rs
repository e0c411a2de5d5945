//! Numerical rate-distortion solvers for finite alphabets.
//!
//! - [`ba`]: slope-parameterized Blahut-Arimoto in three configurations:
//!   plain (no side information), conditional (side information at both
//!   ends), and super-source (encoder-only side information, coding the
//!   pair (x, q) as one source).
//! - [`wz`]: exhaustive tiny-alphabet search for the decoder-only
//!   configuration (auxiliary channel grid plus optimal reconstruction
//!   maps).
//! - [`gauss_enc`]: numerical upper bound on the encoder-only curve for
//!   the scaled-quadratic Gaussian problem, via the informed codebook plus
//!   its codebook-identification penalty.
//! - [`envelope`]: lower convex envelope of rate-distortion point clouds.

pub mod ba;
pub mod envelope;
pub mod gauss_enc;
pub mod wz;

pub use ba::{
    ba_solve, ba_solve_conditional, ba_solve_enc, codebook_uniformity, BaProblem, BaResult,
};
pub use envelope::convex_lower_envelope;
pub use gauss_enc::gauss_enc_upper_curve;
pub use wz::{wz_bruteforce, wz_bruteforce_curve, WzGrid};
