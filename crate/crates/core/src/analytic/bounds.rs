//! Finite-resolution rate-loss bounds for scaled quadratic distortion.
//!
//! The medium-resolution bound charges the rate loss to the efficiency of
//! estimating the source from an additive test channel: at distortion D the
//! gap is at most `J/2 * min(1, D/q_min)` where J is the (conditional)
//! Fisher information of the source. The low-resolution bound is
//! distortion-independent: relative entropy to a Gaussian plus
//! `ln(1 + sig_max^2/sig_min^2) / 2`.

use crate::error::{Error, Result};
use crate::quad::integrate;

/// Inputs to the medium-resolution bound: Fisher information and the
/// smallest side-information weight.
#[derive(Debug, Clone, Copy)]
pub struct FisherSpec {
    pub j: f64,
    pub q_min: f64,
}

impl FisherSpec {
    pub fn new(j: f64, q_min: f64) -> Result<Self> {
        if !(j > 0.0) || !(q_min > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Fisher bound needs J > 0 and q_min > 0, got J={j}, q_min={q_min}"
            )));
        }
        Ok(FisherSpec { j, q_min })
    }
}

/// Maximum rate gap at distortion D: `J/2 * min(1, D/q_min)` nats.
pub fn fisher_bound(spec: &FisherSpec, d: f64) -> f64 {
    0.5 * spec.j * (d / spec.q_min).min(1.0)
}

/// Fisher information `int p (p'/p)^2` by adaptive quadrature over the
/// supplied domain, relative tolerance 1e-8.
pub fn fisher_information_numeric(
    density: impl Fn(f64) -> f64,
    derivative: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let res = integrate(
        |x| {
            let p = density(x);
            if p <= 0.0 {
                0.0
            } else {
                let dp = derivative(x);
                dp * dp / p
            }
        },
        lo,
        hi,
        1e-8,
        1e-12,
        4000,
    );
    if !res.converged {
        return Err(Error::QuadratureFailure {
            achieved: res.abs_error,
        });
    }
    Ok(res.value)
}

/// Inputs to the low-resolution bound: relative entropy to a Gaussian and
/// the conditional variance extremes.
#[derive(Debug, Clone, Copy)]
pub struct LowResSpec {
    pub kl: f64,
    pub sig_min_sq: f64,
    pub sig_max_sq: f64,
}

impl LowResSpec {
    pub fn new(kl: f64, sig_min_sq: f64, sig_max_sq: f64) -> Result<Self> {
        if !(sig_min_sq > 0.0) || sig_max_sq < sig_min_sq || kl < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "low-resolution bound needs 0 < sig_min^2 <= sig_max^2 and kl >= 0, \
                 got kl={kl}, sig_min^2={sig_min_sq}, sig_max^2={sig_max_sq}"
            )));
        }
        Ok(LowResSpec {
            kl,
            sig_min_sq,
            sig_max_sq,
        })
    }
}

/// Distortion-independent rate-loss bound:
/// `kl + ln(1 + sig_max^2/sig_min^2) / 2` nats.
pub fn lowres_bound(spec: &LowResSpec) -> f64 {
    spec.kl + 0.5 * (1.0 + spec.sig_max_sq / spec.sig_min_sq).ln()
}
