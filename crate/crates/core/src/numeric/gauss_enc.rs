//! Numerical upper bound on the encoder-only rate for the scaled-quadratic
//! Gaussian problem.
//!
//! An encoder that knows q can reuse the informed (water-pouring) test
//! channel at the cost of identifying the codebook to the decoder, i.e.
//! `R <= R_both(D) + I(xhat; q)`. The per-q codebook components are
//! zero-mean Gaussians with variance `1 - d_q`; a component clamped at
//! `d_q = 1` is a point mass at the origin. The mutual information of the
//! mixture is computed by quadrature over +-8 component standard
//! deviations, with point-mass components handled exactly through the
//! discrete/continuous decomposition. The encoder can also simply ignore q,
//! so the uninformed curve's points are achievable as well; the reported
//! bound is the lower convex envelope of both families (rate-distortion
//! functions are convex, so any chord is achievable by time sharing).

use crate::analytic::gauss::{rd_gauss_both, rd_gauss_none, DiscreteQ};
use crate::error::{Error, Result};
use crate::model::{RDCurve, RateUnits};
use crate::numeric::envelope::{convex_lower_envelope, eval_envelope};
use crate::quad::integrate;

/// Quadrature half-width per mixture component, in component standard
/// deviations.
const DOMAIN_SIGMAS: f64 = 8.0;

/// I(xhat; q) in nats for the water-pouring codebook at per-q distortions
/// `d_q` (component variance `1 - d_q`; `d_q = 1` is an atom at 0).
fn mixture_information(model: &DiscreteQ, per_q_distortion: &[f64]) -> Result<f64> {
    let probs = model.probs();
    let n = per_q_distortion.len();
    let is_atom: Vec<bool> = per_q_distortion.iter().map(|&d| d >= 1.0).collect();
    let atom_mass: f64 = (0..n).filter(|&i| is_atom[i]).map(|i| probs[i]).sum();
    let mut info = 0.0;
    // Atoms at the origin are distinguishable from every continuous
    // component, so each contributes exactly ln(1 / atom mass).
    if atom_mass > 0.0 {
        info += atom_mass * (1.0 / atom_mass).ln();
    }
    let cont: Vec<(f64, f64)> = (0..n)
        .filter(|&i| !is_atom[i])
        .map(|i| (probs[i], 1.0 - per_q_distortion[i]))
        .collect();
    if cont.is_empty() {
        return Ok(info);
    }
    let continuous_density = |x: f64| -> f64 {
        cont.iter()
            .map(|&(p, var)| {
                p * (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
            })
            .sum()
    };
    for &(p, var) in &cont {
        // KL(N(0, var) || continuous part) =
        //   -h(N(0, var)) - int phi ln f_c
        let sigma = var.sqrt();
        let phi =
            move |x: f64| (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        let res = integrate(
            |x| phi(x) * continuous_density(x).ln(),
            -DOMAIN_SIGMAS * sigma,
            DOMAIN_SIGMAS * sigma,
            1e-8,
            1e-13,
            4000,
        );
        if !res.converged {
            return Err(Error::QuadratureFailure {
                achieved: res.abs_error,
            });
        }
        let entropy = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).ln();
        info += p * (-entropy - res.value);
    }
    Ok(info.max(0.0))
}

/// Upper bound on the encoder-only curve, evaluated at the caller's
/// distortion grid (nats).
///
/// The achievable cloud combines three families before enveloping:
/// `n_slopes` log-spaced water-pouring points, the water-pouring and
/// uninformed channels evaluated at each grid distortion, and the exact
/// zero-rate endpoint (E[q], 0).
pub fn gauss_enc_upper_curve(
    model: &DiscreteQ,
    d_grid: &[f64],
    n_slopes: usize,
) -> Result<RDCurve> {
    if d_grid.is_empty() {
        return Err(Error::InvalidParameter("empty distortion grid".into()));
    }
    let e_q = model.e_q();
    let d_min = d_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(d_min > 0.0) || d_grid.iter().any(|&d| d > e_q + 1e-12) {
        return Err(Error::InfeasibleDistortion {
            d: d_min.min(0.0),
            lo: 0.0,
            hi: e_q,
        });
    }
    let mut cloud: Vec<(f64, f64)> = Vec::new();

    // Water-pouring sweep: lam from the all-clamped regime down to well
    // past the smallest grid distortion (active regime has D = 1/(2 lam)).
    let lam_lo = 0.4999 / model.q_max();
    let lam_hi = 5.0 / d_min;
    let n_slopes = n_slopes.max(2);
    for i in 0..n_slopes {
        let t = i as f64 / (n_slopes - 1) as f64;
        let lam = lam_lo * (lam_hi / lam_lo).powf(t);
        let dq: Vec<f64> = model
            .values()
            .iter()
            .map(|&q| (1.0 / (2.0 * lam * q)).min(1.0))
            .collect();
        let d = model.probs().expect(|j| model.values()[j] * dq[j]);
        let r_both = model.probs().expect(|j| 0.5 * (1.0 / dq[j]).ln());
        let info = mixture_information(model, &dq)?;
        cloud.push((d, r_both + info));
    }
    // Both channel families at the exact grid distortions.
    for &d in d_grid {
        let wp = rd_gauss_both(model, d)?;
        let info = mixture_information(model, &wp.per_q_distortion)?;
        cloud.push((d, wp.rate_nats + info));
        cloud.push((d, rd_gauss_none(model, d)?));
    }
    // Dense uninformed fill so chords between grid points stay tight.
    for i in 0..200 {
        let t = i as f64 / 199.0;
        let d = d_min * (e_q / d_min).powf(t);
        cloud.push((d, rd_gauss_none(model, d)?));
    }
    cloud.push((e_q, 0.0));

    let hull = convex_lower_envelope(&cloud)?;
    let mut d_sorted: Vec<f64> = d_grid.to_vec();
    d_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let points: Vec<(f64, f64)> = d_sorted
        .into_iter()
        .map(|d| (d, eval_envelope(&hull, d)))
        .collect();
    RDCurve::new(points, RateUnits::Nats)
}
