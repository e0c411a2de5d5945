//! Rate-distortion curves for a zero-mean unit-variance Gaussian source
//! with scaled quadratic distortion `d(x, xhat; q) = q (x - xhat)^2` and
//! discrete q independent of the source. Rates are in nats.
//!
//! Without side information the problem collapses to quantizing against
//! `E[q] (x - xhat)^2`, so `R(D) = max(0, ln(E[q]/D) / 2)`. With side
//! information at both ends the optimal bit allocation is reverse water
//! pouring: per-q mean squared error `d_q = min(1, 1/(2 lam q))` with the
//! multiplier meeting `sum_q p_q q d_q = D`, and `R = sum_q p_q ln(1/d_q)/2`.

use crate::error::{Error, Result};
use crate::model::ProbVec;

/// Discrete positive side-information values with probabilities.
#[derive(Debug, Clone)]
pub struct DiscreteQ {
    values: Vec<f64>,
    probs: ProbVec,
}

impl DiscreteQ {
    pub fn new(values: Vec<f64>, probs: ProbVec) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} q values vs {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "q values must be finite and > 0".into(),
            ));
        }
        Ok(DiscreteQ { values, probs })
    }

    /// Parse a "value:prob,value:prob" list.
    pub fn parse(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut probs = Vec::new();
        for part in s.split(',') {
            let (v, p) = part.split_once(':').ok_or_else(|| {
                Error::InvalidParameter(format!("expected value:prob, got {part:?}"))
            })?;
            values.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidParameter(format!("bad q value {v:?}: {e}")))?,
            );
            probs.push(
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidParameter(format!("bad probability {p:?}: {e}")))?,
            );
        }
        DiscreteQ::new(values, ProbVec::new(probs)?)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn probs(&self) -> &ProbVec {
        &self.probs
    }

    pub fn e_q(&self) -> f64 {
        self.probs.expect(|i| self.values[i])
    }
    pub fn e_ln_q(&self) -> f64 {
        self.probs.expect(|i| self.values[i].ln())
    }
    pub fn q_min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }
    pub fn q_max(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &v| a.max(v))
    }
}

/// Uninformed curve: `max(0, ln(E[q]/D) / 2)` nats.
pub fn rd_gauss_none(model: &DiscreteQ, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InfeasibleDistortion {
            d,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok((0.5 * (model.e_q() / d).ln()).max(0.0))
}

/// Informed curve point: rate, the per-q mean squared errors, and the
/// threshold distortion below which every component is active.
#[derive(Debug, Clone)]
pub struct GaussBothPoint {
    pub rate_nats: f64,
    pub per_q_distortion: Vec<f64>,
    /// Largest D at which no component is clamped at the source variance;
    /// equals the smallest q value for a unit-variance source.
    pub d_star: f64,
}

/// Informed curve by reverse water pouring over the discrete q components.
pub fn rd_gauss_both(model: &DiscreteQ, d: f64) -> Result<GaussBothPoint> {
    let hi = model.e_q();
    if !(d > 0.0) || d > hi * (1.0 + 1e-12) {
        return Err(Error::InfeasibleDistortion { d, lo: 0.0, hi });
    }
    let d = d.min(hi);
    let per_q = |lam: f64| -> Vec<f64> {
        model
            .values
            .iter()
            .map(|&q| (1.0 / (2.0 * lam * q)).min(1.0))
            .collect()
    };
    let dist = |lam: f64| -> f64 {
        let dq = per_q(lam);
        model.probs.expect(|i| model.values[i] * dq[i])
    };
    // dist(lam) = E[q] for lam <= 1/(2 q_max) and decreases to 0.
    let mut lo = 1.0 / (2.0 * model.q_max());
    let mut hi_lam = lo.max(1.0);
    while dist(hi_lam) > d {
        hi_lam *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi_lam);
        if dist(mid) > d {
            lo = mid;
        } else {
            hi_lam = mid;
        }
    }
    let dq = per_q(0.5 * (lo + hi_lam));
    let rate = model.probs.expect(|i| 0.5 * (1.0 / dq[i]).ln());
    Ok(GaussBothPoint {
        rate_nats: rate,
        per_q_distortion: dq,
        d_star: model.q_min(),
    })
}
