//! Slope-parameterized Blahut-Arimoto.
//!
//! Each run fixes a multiplier `s >= 0` (nats per unit distortion) and
//! alternates the two closed-form updates
//!
//! ```text
//! t(xhat|x) ∝ r(xhat) exp(-s d(x, xhat)),    r(xhat) = sum_x p(x) t(xhat|x)
//! ```
//!
//! until the output marginal stops moving. The converged pair is a point on
//! the rate-distortion curve where the supporting line has slope -s.
//! Distortion-targeted queries are the caller's bisection over the slope;
//! each run here is unconstrained and monotone (the alternating functional
//! never increases, asserted in debug builds).

use crate::error::{Error, Result};
use crate::model::{DistortionTensor, ProbVec};

/// Sup-norm change of the output marginal below which iteration stops.
pub const BA_TOL: f64 = 1e-12;
/// Iteration cap; results beyond it carry `converged = false`.
pub const BA_MAX_ITERS: usize = 100_000;

/// A plain rate-distortion problem at a fixed slope.
#[derive(Debug, Clone)]
pub struct BaProblem {
    pub px: ProbVec,
    /// Distortion matrix indexed [x][xhat], finite and nonnegative.
    pub d: Vec<Vec<f64>>,
    /// Slope multiplier, nats per unit distortion, >= 0.
    pub slope: f64,
}

/// Encoder-side extras for super-source runs.
#[derive(Debug, Clone)]
pub struct EncInfo {
    /// Codebook identification cost I(xhat; q) in nats.
    pub i_xhat_q_nats: f64,
    /// Conditional mutual information I(x; xhat | q) in nats.
    pub i_cond_nats: f64,
    /// Per-q output marginals p(xhat | q).
    pub per_q_marginals: Vec<Vec<f64>>,
}

/// Converged (or capped) solver state.
#[derive(Debug, Clone)]
pub struct BaResult {
    pub rate_nats: f64,
    pub distortion: f64,
    pub output_marginal: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Present for encoder-side (super-source) runs.
    pub enc: Option<EncInfo>,
}

fn validate_matrix(d: &[Vec<f64>], nx: usize, what: &str) -> Result<usize> {
    if d.len() != nx {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {} rows for |X| = {nx}",
            d.len()
        )));
    }
    let ny = d[0].len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != ny {
            return Err(Error::DimensionMismatch(format!(
                "{what}: row {i} has {} columns, expected {ny}",
                row.len()
            )));
        }
        if row.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{what}: distortions must be finite and >= 0 (row {i})"
            )));
        }
    }
    Ok(ny)
}

/// Core alternating-minimization loop. Returns (test channel, marginal,
/// iterations, converged).
fn ba_iterate(px: &[f64], d: &[Vec<f64>], slope: f64) -> (Vec<Vec<f64>>, Vec<f64>, usize, bool) {
    let nx = px.len();
    let ny = d[0].len();
    // exp(-s d) is reused every iteration; rows are rescaled by their max
    // exponent when formed, so underflow cannot zero out a whole row.
    let weights: Vec<Vec<f64>> = d
        .iter()
        .map(|row| row.iter().map(|&v| (-slope * v).exp()).collect())
        .collect();
    let mut marginal = vec![1.0 / ny as f64; ny];
    let mut channel = vec![vec![0.0; ny]; nx];
    let mut iterations = 0;
    let mut converged = false;
    let mut prev_objective = f64::INFINITY;
    while iterations < BA_MAX_ITERS {
        iterations += 1;
        // t(xhat|x) ∝ r(xhat) w(x, xhat)
        let mut objective = 0.0;
        for x in 0..nx {
            let mut z = 0.0;
            for y in 0..ny {
                let v = marginal[y] * weights[x][y];
                channel[x][y] = v;
                z += v;
            }
            for y in 0..ny {
                channel[x][y] /= z;
            }
            objective -= px[x] * z.ln();
        }
        // The alternating functional is non-increasing across iterations.
        debug_assert!(
            objective <= prev_objective + 1e-12 * objective.abs().max(1.0),
            "Blahut functional increased: {prev_objective} -> {objective}"
        );
        prev_objective = objective;
        // r(xhat) = sum_x p(x) t(xhat|x)
        let mut next = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                next[y] += px[x] * channel[x][y];
            }
        }
        let delta = next
            .iter()
            .zip(&marginal)
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
        marginal = next;
        if delta < BA_TOL {
            converged = true;
            break;
        }
    }
    // Final channel consistent with the final marginal.
    for x in 0..nx {
        let mut z = 0.0;
        for y in 0..ny {
            let v = marginal[y] * weights[x][y];
            channel[x][y] = v;
            z += v;
        }
        for y in 0..ny {
            channel[x][y] /= z;
        }
    }
    (channel, marginal, iterations, converged)
}

fn rate_distortion_of(px: &[f64], d: &[Vec<f64>], channel: &[Vec<f64>]) -> (f64, f64, Vec<f64>) {
    let nx = px.len();
    let ny = d[0].len();
    let mut marginal = vec![0.0; ny];
    for x in 0..nx {
        for y in 0..ny {
            marginal[y] += px[x] * channel[x][y];
        }
    }
    let mut rate = 0.0;
    let mut dist = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let t = channel[x][y];
            if t > 0.0 && marginal[y] > 0.0 {
                rate += px[x] * t * (t / marginal[y]).ln();
            }
            dist += px[x] * t * d[x][y];
        }
    }
    (rate.max(0.0), dist, marginal)
}

/// Classical rate-distortion at a fixed slope.
///
/// `slope == 0` is the zero-rate point, returned in closed form: the best
/// constant reconstruction (every marginal is a fixed point of the
/// iteration there, so iterating would silently return the initializer).
pub fn ba_solve(prob: &BaProblem) -> Result<BaResult> {
    let nx = prob.px.len();
    let ny = validate_matrix(&prob.d, nx, "ba_solve")?;
    if !(prob.slope >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "slope {} must be >= 0",
            prob.slope
        )));
    }
    let px = prob.px.as_slice();
    if prob.slope == 0.0 {
        let (best, dist) = (0..ny)
            .map(|y| {
                let e: f64 = (0..nx).map(|x| px[x] * prob.d[x][y]).sum();
                (y, e)
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let mut marginal = vec![0.0; ny];
        marginal[best] = 1.0;
        return Ok(BaResult {
            rate_nats: 0.0,
            distortion: dist,
            output_marginal: marginal,
            iterations: 0,
            converged: true,
            enc: None,
        });
    }
    let (channel, _, iterations, converged) = ba_iterate(px, &prob.d, prob.slope);
    let (rate, dist, marginal) = rate_distortion_of(px, &prob.d, &channel);
    Ok(BaResult {
        rate_nats: rate,
        distortion: dist,
        output_marginal: marginal,
        iterations,
        converged,
        enc: None,
    })
}

/// Conditional rate-distortion (side information at both ends) at a fixed
/// slope: per-q solves at the common slope, averaged by p(q). Requires q
/// independent of x, which holds by construction for the (px, pq) pair.
pub fn ba_solve_conditional(
    px: &ProbVec,
    pq: &ProbVec,
    d: &DistortionTensor,
    slope: f64,
) -> Result<BaResult> {
    check_tensor(px, pq, d)?;
    let mut rate = 0.0;
    let mut dist = 0.0;
    let mut iterations = 0;
    let mut converged = true;
    let mut marginal = vec![0.0; d.nxhat()];
    for q in 0..pq.len() {
        let sub = BaProblem {
            px: px.clone(),
            d: d.slice_q(q),
            slope,
        };
        let r = ba_solve(&sub)?;
        rate += pq[q] * r.rate_nats;
        dist += pq[q] * r.distortion;
        iterations = iterations.max(r.iterations);
        converged &= r.converged;
        for y in 0..marginal.len() {
            marginal[y] += pq[q] * r.output_marginal[y];
        }
    }
    Ok(BaResult {
        rate_nats: rate,
        distortion: dist,
        output_marginal: marginal,
        iterations,
        converged,
        enc: None,
    })
}

/// Encoder-only rate-distortion at a fixed slope, via the classical solver
/// on the super source (x, q) with law px ⊗ pq and distortion
/// `d((x,q), xhat) = d(x, xhat; q)`. The result carries I(xhat; q), the
/// conditional information I(x; xhat | q), and the per-q codebook
/// marginals computed from the converged channel.
pub fn ba_solve_enc(
    px: &ProbVec,
    pq: &ProbVec,
    d: &DistortionTensor,
    slope: f64,
) -> Result<BaResult> {
    check_tensor(px, pq, d)?;
    let (nx, nq, ny) = (px.len(), pq.len(), d.nxhat());
    let mut psuper = Vec::with_capacity(nx * nq);
    let mut dsuper = Vec::with_capacity(nx * nq);
    for x in 0..nx {
        for q in 0..nq {
            psuper.push(px[x] * pq[q]);
            dsuper.push((0..ny).map(|y| d.get(x, y, q)).collect::<Vec<f64>>());
        }
    }
    if !(slope >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "slope {slope} must be >= 0"
        )));
    }
    let (channel, marginal, iterations, converged) = if slope == 0.0 {
        // Zero-rate: same closed form as ba_solve, constant reconstruction.
        let (best, _) = (0..ny)
            .map(|y| {
                let e: f64 = psuper
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| p * dsuper[i][y])
                    .sum();
                (y, e)
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let mut t = vec![vec![0.0; ny]; nx * nq];
        for row in &mut t {
            row[best] = 1.0;
        }
        let mut m = vec![0.0; ny];
        m[best] = 1.0;
        (t, m, 0, true)
    } else {
        let (t, m, it, ok) = ba_iterate(&psuper, &dsuper, slope);
        (t, m, it, ok)
    };
    let (rate, dist, marginal_out) = rate_distortion_of(&psuper, &dsuper, &channel);
    let _ = marginal;
    // Per-q codebook marginals: p(xhat|q) = sum_x p(x) t(xhat | x, q).
    let mut per_q = vec![vec![0.0; ny]; nq];
    for x in 0..nx {
        for q in 0..nq {
            let row = &channel[x * nq + q];
            for y in 0..ny {
                per_q[q][y] += px[x] * row[y];
            }
        }
    }
    let mut i_xq = 0.0;
    for q in 0..nq {
        for y in 0..ny {
            if per_q[q][y] > 0.0 && marginal_out[y] > 0.0 {
                i_xq += pq[q] * per_q[q][y] * (per_q[q][y] / marginal_out[y]).ln();
            }
        }
    }
    // I(x; xhat | q) computed against the per-q marginals.
    let mut i_cond = 0.0;
    for x in 0..nx {
        for q in 0..nq {
            let row = &channel[x * nq + q];
            for y in 0..ny {
                if row[y] > 0.0 && per_q[q][y] > 0.0 {
                    i_cond += px[x] * pq[q] * row[y] * (row[y] / per_q[q][y]).ln();
                }
            }
        }
    }
    Ok(BaResult {
        rate_nats: rate,
        distortion: dist,
        output_marginal: marginal_out,
        iterations,
        converged,
        enc: Some(EncInfo {
            i_xhat_q_nats: i_xq.max(0.0),
            i_cond_nats: i_cond.max(0.0),
            per_q_marginals: per_q,
        }),
    })
}

fn check_tensor(px: &ProbVec, pq: &ProbVec, d: &DistortionTensor) -> Result<()> {
    if d.nx() != px.len() {
        return Err(Error::DimensionMismatch(format!(
            "tensor |X| = {} vs source alphabet {}",
            d.nx(),
            px.len()
        )));
    }
    if d.nq() != pq.len() {
        return Err(Error::DimensionMismatch(format!(
            "tensor |Q| = {} vs side-information alphabet {}",
            d.nq(),
            pq.len()
        )));
    }
    Ok(())
}

/// Largest total-variation distance among the per-q codebook marginals of
/// an encoder-side result. Near zero exactly when a single codebook serves
/// every q.
pub fn codebook_uniformity(result: &BaResult) -> Result<f64> {
    let enc = result.enc.as_ref().ok_or_else(|| {
        Error::InvalidParameter("codebook_uniformity needs an encoder-side result".into())
    })?;
    let m = &enc.per_q_marginals;
    let mut worst = 0.0f64;
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            let tv = 0.5
                * m[a]
                    .iter()
                    .zip(&m[b])
                    .map(|(&x, &y)| (x - y).abs())
                    .sum::<f64>();
            worst = worst.max(tv);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{binary_entropy_bits, LN_2};

    fn hamming(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|x| (0..n).map(|y| if x == y { 0.0 } else { 1.0 }).collect())
            .collect()
    }

    #[test]
    fn binary_source_matches_closed_form() {
        // Slope for the binary-Hamming curve at crossover p: ln((1-p)/p).
        let p: f64 = 0.1;
        let prob = BaProblem {
            px: ProbVec::uniform(2),
            d: hamming(2),
            slope: ((1.0 - p) / p).ln(),
        };
        let r = ba_solve(&prob).unwrap();
        assert!(r.converged);
        assert!((r.distortion - p).abs() < 1e-9);
        let expect = (1.0 - binary_entropy_bits(p)) * LN_2;
        assert!((r.rate_nats - expect).abs() < 1e-9);
    }

    #[test]
    fn zero_slope_is_best_constant_reconstruction() {
        let prob = BaProblem {
            px: ProbVec::new(vec![0.8, 0.2]).unwrap(),
            d: vec![vec![0.0, 3.0], vec![1.0, 0.0]],
            slope: 0.0,
        };
        let r = ba_solve(&prob).unwrap();
        assert_eq!(r.rate_nats, 0.0);
        // E[d | xhat = 0] = 0.2, E[d | xhat = 1] = 2.4
        assert!((r.distortion - 0.2).abs() < 1e-15);
        assert_eq!(r.output_marginal, vec![1.0, 0.0]);
    }

    #[test]
    fn quaternary_low_distortion_approaches_two_bits() {
        let prob = BaProblem {
            px: ProbVec::uniform(4),
            d: hamming(4),
            slope: 14.0,
        };
        let r = ba_solve(&prob).unwrap();
        assert!(r.converged);
        assert!(r.distortion < 1e-4);
        assert!((r.rate_nats / LN_2 - 2.0).abs() < 1e-2);
    }

    #[test]
    fn conditional_with_single_q_degenerates_to_plain() {
        let d =
            DistortionTensor::from_fn(2, 2, 1, |x, y, _| if x == y { 0.0 } else { 1.0 }).unwrap();
        let px = ProbVec::new(vec![0.4, 0.6]).unwrap();
        let pq = ProbVec::new(vec![1.0]).unwrap();
        let cond = ba_solve_conditional(&px, &pq, &d, 1.3).unwrap();
        let plain = ba_solve(&BaProblem {
            px,
            d: hamming(2),
            slope: 1.3,
        })
        .unwrap();
        assert!((cond.rate_nats - plain.rate_nats).abs() < 1e-12);
        assert!((cond.distortion - plain.distortion).abs() < 1e-12);
    }

    #[test]
    fn enc_with_single_q_matches_plain() {
        let d =
            DistortionTensor::from_fn(3, 3, 1, |x, y, _| if x == y { 0.0 } else { 1.0 }).unwrap();
        let px = ProbVec::new(vec![0.5, 0.3, 0.2]).unwrap();
        let pq = ProbVec::new(vec![1.0]).unwrap();
        let enc = ba_solve_enc(&px, &pq, &d, 0.9).unwrap();
        let plain = ba_solve(&BaProblem {
            px,
            d: hamming(3),
            slope: 0.9,
        })
        .unwrap();
        assert!((enc.rate_nats - plain.rate_nats).abs() < 1e-12);
        assert!((enc.distortion - plain.distortion).abs() < 1e-12);
        assert!(codebook_uniformity(&enc).unwrap().abs() < 1e-15);
    }

    #[test]
    fn enc_rate_decomposes() {
        // I(x,q; xhat) = I(x; xhat | q) + I(xhat; q) at the converged point.
        let d = DistortionTensor::from_fn(2, 2, 2, |x, y, q| {
            (q + 1) as f64 * if x == y { 0.0 } else { 1.0 }
        })
        .unwrap();
        let px = ProbVec::uniform(2);
        let pq = ProbVec::new(vec![0.5, 0.5]).unwrap();
        let r = ba_solve_enc(&px, &pq, &d, 1.1).unwrap();
        let enc = r.enc.as_ref().unwrap();
        assert!(
            (r.rate_nats - (enc.i_cond_nats + enc.i_xhat_q_nats)).abs() < 1e-9,
            "decomposition violated: {} vs {} + {}",
            r.rate_nats,
            enc.i_cond_nats,
            enc.i_xhat_q_nats
        );
    }

    #[test]
    fn conditional_equals_plain_when_betas_equal() {
        // Side information that scales distortion identically for every q
        // carries no distortion asymmetry: conditional curve = plain curve.
        let d =
            DistortionTensor::from_fn(2, 2, 2, |x, y, _| if x == y { 0.0 } else { 2.0 }).unwrap();
        let px = ProbVec::uniform(2);
        let pq = ProbVec::new(vec![0.3, 0.7]).unwrap();
        let cond = ba_solve_conditional(&px, &pq, &d, 1.7).unwrap();
        let plain = ba_solve(&BaProblem {
            px: ProbVec::uniform(2),
            d: vec![vec![0.0, 2.0], vec![2.0, 0.0]],
            slope: 1.7,
        })
        .unwrap();
        assert!((cond.rate_nats - plain.rate_nats).abs() < 1e-10);
        assert!((cond.distortion - plain.distortion).abs() < 1e-10);
    }

    #[test]
    fn q_dependent_codebooks_for_nonuniform_source() {
        // When q flips which symbol is expensive and the source is skewed,
        // no single codebook is optimal for every q: the per-q output
        // marginals separate and the encoder-only configuration pays for
        // identifying the codebook.
        let px = ProbVec::new(vec![0.85, 0.15]).unwrap();
        let pq = ProbVec::new(vec![0.5, 0.5]).unwrap();
        let costly = [10.0, 0.1];
        let d = DistortionTensor::from_fn(2, 2, 2, |x, y, q| {
            if x == y {
                0.0
            } else if x == q {
                costly[0]
            } else {
                costly[1]
            }
        })
        .unwrap();
        let r = ba_solve_enc(&px, &pq, &d, 1.0).unwrap();
        assert!(r.converged);
        let tv = codebook_uniformity(&r).unwrap();
        assert!(tv > 0.05, "expected separated codebooks, TV = {tv}");
        assert!(r.enc.as_ref().unwrap().i_xhat_q_nats > 1e-3);
    }

    #[test]
    fn negative_slope_rejected() {
        let prob = BaProblem {
            px: ProbVec::uniform(2),
            d: hamming(2),
            slope: -1.0,
        };
        assert!(ba_solve(&prob).is_err());
    }
}
