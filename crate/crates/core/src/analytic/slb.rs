//! Conditional Shannon lower bound for a source on the cyclic group Z_m
//! with distortion `rho(z; q) = q * 1[z != 0]` and discrete q.
//!
//! The bound is `R(D) >= log m - H(z*|q)` where `z*` maximizes the
//! conditional entropy subject to `E[rho(z; q)] <= D`. For each q the
//! maximizer spreads a miss probability `p_q` uniformly over the m - 1
//! nonzero elements, giving `H = Hb(p_q) + p_q log(m-1)`; the per-q miss
//! probabilities share a common multiplier, found here by bisection. For
//! uniform sources the bound is achieved, which is what makes encoder-only
//! side information optimal for this family.

use crate::analytic::gauss::DiscreteQ;
use crate::error::{Error, Result};
use crate::model::{binary_entropy_bits, LN_2};

/// Lower bound on the informed rate (bits) at distortion `d` for a source
/// uniform on Z_m. Requires `0 < d < E[q] (m-1)/m` (beyond that the bound
/// degenerates to 0).
pub fn slb_group_hamming(m: usize, q: &DiscreteQ, d: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "group order {m} must be >= 2"
        )));
    }
    let log_m = (m as f64).log2();
    let p_uniform = (m - 1) as f64 / m as f64;
    let d_max = q.e_q() * p_uniform;
    if !(d > 0.0) || d >= d_max {
        return Err(Error::InfeasibleDistortion {
            d,
            lo: 0.0,
            hi: d_max,
        });
    }
    // Entropy-maximizing miss probability per q at multiplier lam (nats):
    // p = (m-1) / (m-1 + exp(lam q)), capped at the uniform value.
    let miss = |lam: f64| -> Vec<f64> {
        q.values()
            .iter()
            .map(|&qv| {
                let p = (m - 1) as f64 / ((m - 1) as f64 + (lam * qv).exp());
                p.min(p_uniform)
            })
            .collect()
    };
    let dist = |lam: f64| -> f64 {
        let p = miss(lam);
        q.probs().expect(|i| q.values()[i] * p[i])
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while dist(hi) > d {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist(mid) > d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = miss(0.5 * (lo + hi));
    let h_cond = q
        .probs()
        .expect(|i| binary_entropy_bits(p[i]) + p[i] * ((m - 1) as f64).log2());
    Ok((log_m - h_cond).max(0.0))
}

/// Convenience: the same bound in nats.
pub fn slb_group_hamming_nats(m: usize, q: &DiscreteQ, d: f64) -> Result<f64> {
    Ok(slb_group_hamming(m, q, d)? * LN_2)
}
