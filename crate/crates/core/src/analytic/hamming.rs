//! Rate-distortion curves for a symmetric binary source with distortion
//! `d(x, xhat; q) = alpha_q + beta_q * Hamming(x, xhat)`.
//!
//! With the side information at both ends (or, equivalently for this
//! family, encoder only) the curve is
//!
//! ```text
//! R(D) = 1 - sum_i p(i) Hb(p_i),   p_i = 2^(-lam b_i) / (1 + 2^(-lam b_i))
//! ```
//!
//! with `lam >= 0` chosen so that `sum_i p(i) [a_i + b_i p_i] = D`. Without
//! side information the effective distortion is `E[alpha] + E[beta] *
//! Hamming`, giving `R(D) = 1 - Hb((D - E[alpha]) / E[beta])`. Rates are in
//! bits.

use crate::error::{Error, Result};
use crate::model::{binary_entropy_bits, ProbVec};

/// Weighted-Hamming side information model: per-q offsets `alpha`, weights
/// `beta`, and the q distribution.
#[derive(Debug, Clone)]
pub struct HammingSideModel {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    pq: ProbVec,
}

impl HammingSideModel {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, pq: ProbVec) -> Result<Self> {
        if alphas.len() != pq.len() || betas.len() != pq.len() {
            return Err(Error::DimensionMismatch(format!(
                "alphas ({}), betas ({}), pq ({}) must agree",
                alphas.len(),
                betas.len(),
                pq.len()
            )));
        }
        if alphas
            .iter()
            .chain(betas.iter())
            .any(|&v| v < 0.0 || !v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "alpha and beta weights must be finite and >= 0".into(),
            ));
        }
        if !betas
            .iter()
            .zip(pq.as_slice())
            .any(|(&b, &p)| b > 0.0 && p > 0.0)
        {
            return Err(Error::InvalidParameter(
                "at least one beta weight must be positive (rate is identically 0 otherwise)"
                    .into(),
            ));
        }
        Ok(HammingSideModel { alphas, betas, pq })
    }

    pub fn n(&self) -> usize {
        self.pq.len()
    }
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
    pub fn pq(&self) -> &ProbVec {
        &self.pq
    }

    pub fn e_alpha(&self) -> f64 {
        self.pq.expect(|i| self.alphas[i])
    }
    pub fn e_beta(&self) -> f64 {
        self.pq.expect(|i| self.betas[i])
    }

    /// Smallest achievable distortion, E[alpha].
    pub fn d_min(&self) -> f64 {
        self.e_alpha()
    }

    /// Distortion at zero rate, E[alpha] + E[beta]/2.
    pub fn d_max(&self) -> f64 {
        self.e_alpha() + 0.5 * self.e_beta()
    }

    /// Per-q crossover probabilities at multiplier `lam` (base-2 exponent).
    /// A component with beta = 0 sits at 1/2 for every lam.
    fn crossovers(&self, lam: f64) -> Vec<f64> {
        self.betas
            .iter()
            .map(|&b| {
                if b == 0.0 {
                    0.5
                } else {
                    let t = (2.0f64).powf(-lam * b);
                    t / (1.0 + t)
                }
            })
            .collect()
    }

    fn distortion_at(&self, lam: f64) -> f64 {
        let cross = self.crossovers(lam);
        self.pq
            .expect(|i| self.alphas[i] + self.betas[i] * cross[i])
    }

    fn rate_at(&self, cross: &[f64]) -> f64 {
        1.0 - self.pq.expect(|i| binary_entropy_bits(cross[i]))
    }
}

/// Uninformed curve (equal to the decoder-only curve for this family), in
/// bits. Zero for D at or beyond the zero-rate distortion.
pub fn rd_hamming_none(model: &HammingSideModel, d: f64) -> Result<f64> {
    let lo = model.d_min();
    if d < lo {
        return Err(Error::InfeasibleDistortion {
            d,
            lo,
            hi: f64::INFINITY,
        });
    }
    if d >= model.d_max() {
        return Ok(0.0);
    }
    let arg = (d - model.e_alpha()) / model.e_beta();
    Ok((1.0 - binary_entropy_bits(arg)).max(0.0))
}

/// Informed curve point: rate, the multiplier that meets the distortion
/// constraint, and the per-q crossover probabilities.
#[derive(Debug, Clone)]
pub struct HammingBothPoint {
    pub rate_bits: f64,
    pub lambda: f64,
    pub crossovers: Vec<f64>,
}

/// Informed curve (side information at both ends; also the encoder-only
/// curve for this family), in bits.
///
/// The multiplier is found by bisection: distortion is continuous and
/// strictly decreasing in `lam` wherever some beta is positive. At
/// `d == d_min` the limit `lam -> inf` is returned explicitly (components
/// with beta > 0 go lossless, beta = 0 components stay free).
pub fn rd_hamming_both(model: &HammingSideModel, d: f64) -> Result<HammingBothPoint> {
    let (lo, hi) = (model.d_min(), model.d_max());
    if d < lo || d > hi {
        return Err(Error::InfeasibleDistortion { d, lo, hi });
    }
    if d == lo {
        let crossovers: Vec<f64> = model
            .betas
            .iter()
            .map(|&b| if b == 0.0 { 0.5 } else { 0.0 })
            .collect();
        return Ok(HammingBothPoint {
            rate_bits: model.rate_at(&crossovers),
            lambda: f64::INFINITY,
            crossovers,
        });
    }
    let mut lam_lo = 0.0f64;
    let mut lam_hi = 1.0f64;
    while model.distortion_at(lam_hi) > d {
        lam_hi *= 2.0;
        if lam_hi > 1e12 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lam_lo + lam_hi);
        if model.distortion_at(mid) > d {
            lam_lo = mid;
        } else {
            lam_hi = mid;
        }
    }
    let lambda = 0.5 * (lam_lo + lam_hi);
    let crossovers = model.crossovers(lambda);
    Ok(HammingBothPoint {
        rate_bits: model.rate_at(&crossovers),
        lambda,
        crossovers,
    })
}

/// Noisy-observation preset: the source is observed through a binary
/// symmetric channel whose crossover probability `(q-1) / (2(N-1))` is the
/// side information, q uniform on {1..N}. Yields `alpha_q = (q-1)/(2(N-1))`
/// and `beta_q = 1 - (q-1)/(N-1)`.
pub fn model_noisy_obs(n: usize) -> Result<HammingSideModel> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "noisy-observation preset needs N >= 2, got {n}"
        )));
    }
    let denom = (n - 1) as f64;
    let alphas: Vec<f64> = (1..=n).map(|q| (q - 1) as f64 / (2.0 * denom)).collect();
    let betas: Vec<f64> = (1..=n).map(|q| 1.0 - (q - 1) as f64 / denom).collect();
    HammingSideModel::new(alphas, betas, ProbVec::uniform(n))
}

/// Weighted-importance preset: `alpha = 0`, `beta_k = exp(gamma k / N)` for
/// k in {0..N-1}, q uniform. gamma = 0 makes the side information useless.
pub fn model_weighted(n: usize, gamma: f64) -> Result<HammingSideModel> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "weighted preset needs N >= 1".into(),
        ));
    }
    let betas: Vec<f64> = (0..n)
        .map(|k| (gamma * k as f64 / n as f64).exp())
        .collect();
    HammingSideModel::new(vec![0.0; n], betas, ProbVec::uniform(n))
}
