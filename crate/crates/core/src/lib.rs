//! Source coding with distortion side information.
//!
//! Side information that enters the distortion measure (rather than being
//! correlated with the source) is most valuable at the encoder. This crate
//! provides the pieces needed to compute, bound, and demonstrate that
//! claim at desk scale:
//!
//! - operational codecs: lossless coding of relevant samples by polynomial
//!   interpolation over GF(2^m) ([`erasure`]) and band-limited DFT
//!   interpolation with uniform coefficient quantization ([`dft`]);
//! - closed-form rate-distortion curves and penalties for the
//!   binary-Hamming and scaled-quadratic Gaussian families, the
//!   high-resolution rate gap across side-information distributions, and
//!   Fisher-information / low-resolution rate-loss bounds ([`analytic`]);
//! - numerical solvers: slope-parameterized Blahut-Arimoto in plain,
//!   conditional, and super-source configurations, a tiny-alphabet
//!   brute-force oracle for decoder-only side information, and the
//!   numerically computed encoder-only upper bound for the Gaussian
//!   example ([`numeric`]);
//! - seeded Monte Carlo experiments connecting the codecs to the theory
//!   ([`sim`]).
//!
//! Rates are nats internally unless a function documents otherwise;
//! [`model::RDCurve`] values carry an explicit unit tag.

// `!(x > 0.0)` rejects NaN along with nonpositive values; the positive
// spelling does not. Index loops mirror the multi-index probability sums.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::explicit_counter_loop)]

pub mod analytic;
pub mod dft;
pub mod erasure;
pub mod error;
pub mod gf;
pub mod model;
pub mod numeric;
pub mod quad;
pub mod sim;

pub use error::{Error, Result};
