//! Band-limited interpolation coding of a complex Gaussian source where
//! only `k` of `n` samples are relevant.
//!
//! The relevant samples are treated as samples of a periodic sequence whose
//! first `k` DFT coefficients are the only nonzero ones. Solving the k x k
//! linear system recovers those coefficients; the decoder synthesizes all
//! `n` time-domain samples from the (quantized) coefficients. With the
//! symmetric 1/sqrt(n) normalization the k = n case is exactly the unitary
//! DFT.
//!
//! Whether the restricted k x k map is an isometry for general masks is
//! measured, not assumed: every system carries its condition number, and
//! [`relevant_error_identity`] reports the sample-domain/coefficient-domain
//! error ratio.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::erasure::RelevanceMask;
use crate::error::{Error, Result};

/// Condition number above which a system is treated as numerically singular.
pub const KAPPA_LIMIT: f64 = 1e12;

/// exp(j 2 pi r / n); `r` is reduced mod `n` by the caller.
#[inline]
fn unit_phase(r: usize, n: usize) -> Complex64 {
    let theta = 2.0 * std::f64::consts::PI * (r as f64) / (n as f64);
    Complex64::new(theta.cos(), theta.sin())
}

/// Entry of the synthesis map at time index `i`, frequency `f`:
/// exp(j 2 pi f i / n) / sqrt(n). Shared by [`InterpSystem`] and
/// [`synthesize`] so the restricted rows of the synthesis map match the
/// system matrix bit for bit.
#[inline]
fn basis_entry(f: usize, i: usize, n: usize) -> Complex64 {
    unit_phase((f * i) % n, n) / (n as f64).sqrt()
}

// ---------------------------------------------------------------------------
// InterpSystem
// ---------------------------------------------------------------------------

/// The k x k linear system relating relevant samples to the first k DFT
/// coefficients: `A[i][f] = exp(j 2 pi f s_i / n) / sqrt(n)` for relevant
/// positions `s_0 < ... < s_{k-1}`.
#[derive(Debug, Clone)]
pub struct InterpSystem {
    n: usize,
    positions: Vec<usize>,
    a: DMatrix<Complex64>,
    kappa: f64,
}

impl InterpSystem {
    pub fn new(n: usize, mask: &RelevanceMask) -> Result<Self> {
        if mask.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "mask length {} != n = {n}",
                mask.n()
            )));
        }
        let positions = mask.positions();
        let k = positions.len();
        let a = DMatrix::from_fn(k, k, |i, f| basis_entry(f, positions[i], n));
        Self::with_matrix(n, positions, a)
    }

    /// Hook for alternate transforms (Hadamard, permuted bases): any k x k
    /// restriction matrix over the same positions. [`synthesize`] stays
    /// DFT-specific; callers supplying their own basis synthesize through
    /// [`InterpSystem::apply`] or their own expansion.
    pub fn with_matrix(n: usize, positions: Vec<usize>, a: DMatrix<Complex64>) -> Result<Self> {
        let k = positions.len();
        if a.nrows() != k || a.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for k = {k} positions",
                a.nrows(),
                a.ncols()
            )));
        }
        // 2-norm condition number from the singular values.
        let sv = a.clone().singular_values();
        let smax = sv.iter().fold(0.0f64, |m, &s| m.max(s));
        let smin = sv.iter().fold(f64::INFINITY, |m, &s| m.min(s));
        let kappa = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        Ok(InterpSystem {
            n,
            positions,
            a,
            kappa,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// 2-norm condition number of the system matrix, computed at
    /// construction. Never consumed silently: callers decide what to do
    /// with ill-conditioned systems.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// A * v — the restriction of the synthesis map to relevant positions.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let k = self.k();
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        for i in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for f in 0..k {
                acc += self.a[(i, f)] * v[f];
            }
            out[i] = acc;
        }
        out
    }
}

/// Solve `A X = x_relevant` for the k DFT coefficients.
///
/// Fails with the condition number if the system is numerically singular
/// (kappa above [`KAPPA_LIMIT`]).
pub fn interpolate_coeffs(x_relevant: &[Complex64], sys: &InterpSystem) -> Result<Vec<Complex64>> {
    let k = sys.k();
    if x_relevant.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} relevant samples for a k = {k} system",
            x_relevant.len()
        )));
    }
    if !(sys.kappa() <= KAPPA_LIMIT) {
        return Err(Error::SingularSystem { kappa: sys.kappa() });
    }
    let b = nalgebra::DVector::from_column_slice(x_relevant);
    let lu = sys.a.clone().lu();
    let mut x = lu
        .solve(&b)
        .ok_or(Error::SingularSystem { kappa: sys.kappa() })?;
    // The contract is a residual below 1e-9 ||b||, enforced rather than
    // assumed: one step of iterative refinement (reusing the
    // factorization) covers b aligned with small singular directions.
    let norm_b = b.norm();
    let mut residual = &b - &sys.a * &x;
    if residual.norm() > 1e-9 * norm_b {
        if let Some(correction) = lu.solve(&residual) {
            x += correction;
            residual = &b - &sys.a * &x;
        }
        if residual.norm() > 1e-9 * norm_b {
            return Err(Error::SingularSystem { kappa: sys.kappa() });
        }
    }
    Ok(x.iter().cloned().collect())
}

/// Synthesize all n time-domain samples from the first k DFT coefficients:
/// `xhat[i] = sum_f X[f] exp(j 2 pi f i / n) / sqrt(n)`.
pub fn synthesize(coeffs: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            coeffs
                .iter()
                .enumerate()
                .map(|(f, &c)| c * basis_entry(f, i, n))
                .sum()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Coefficient quantization
// ---------------------------------------------------------------------------

/// Midtread uniform scalar quantizer applied independently to the real and
/// imaginary parts; zero is a reconstruction point.
#[derive(Debug, Clone, Copy)]
pub struct CoeffQuantizer {
    step: f64,
}

/// Quantized coefficients plus the integer indices they were rounded to.
/// Rate accounting (empirical index entropy) is the harness's job.
#[derive(Debug, Clone)]
pub struct QuantizedCoeffs {
    pub values: Vec<Complex64>,
    pub indices: Vec<(i64, i64)>,
}

impl CoeffQuantizer {
    pub fn new(step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quantizer step {step} must be > 0"
            )));
        }
        Ok(CoeffQuantizer { step })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn quantize(&self, coeffs: &[Complex64]) -> QuantizedCoeffs {
        let mut values = Vec::with_capacity(coeffs.len());
        let mut indices = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let ire = (c.re / self.step).round();
            let iim = (c.im / self.step).round();
            values.push(Complex64::new(ire * self.step, iim * self.step));
            indices.push((ire as i64, iim as i64));
        }
        QuantizedCoeffs { values, indices }
    }
}

// ---------------------------------------------------------------------------
// Error accounting
// ---------------------------------------------------------------------------

/// Per-coefficient errors in both domains for a quantized system.
#[derive(Debug, Clone, Copy)]
pub struct ErrorIdentity {
    /// ||A (X - Xhat)||^2 / k — the mean squared error on the relevant
    /// samples of the synthesized block (exact algebraic identity).
    pub sample_domain_err: f64,
    /// ||X - Xhat||^2 / k.
    pub coeff_domain_err: f64,
    /// sample / coeff; equals 1 exactly when A is an isometry. Reported as
    /// 1 when both errors vanish.
    pub ratio: f64,
}

/// Compare the coefficient-domain error with the error it induces on the
/// relevant samples. Equality of the two (ratio 1) holds iff the restricted
/// transform is an isometry, which is guaranteed only for k = n.
pub fn relevant_error_identity(
    coeffs: &[Complex64],
    quantized: &[Complex64],
    sys: &InterpSystem,
) -> ErrorIdentity {
    let k = sys.k() as f64;
    let delta: Vec<Complex64> = coeffs.iter().zip(quantized).map(|(a, b)| a - b).collect();
    let coeff: f64 = delta.iter().map(|d| d.norm_sqr()).sum::<f64>() / k;
    let mapped = sys.apply(&delta);
    let sample: f64 = mapped.iter().map(|d| d.norm_sqr()).sum::<f64>() / k;
    let ratio = if coeff == 0.0 { 1.0 } else { sample / coeff };
    ErrorIdentity {
        sample_domain_err: sample,
        coeff_domain_err: coeff,
        ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn randn(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller is fine for tests.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn cgauss(rng: &mut ChaCha8Rng) -> Complex64 {
        // unit-variance complex Gaussian: each component N(0, 1/2)
        Complex64::new(
            randn(rng) * std::f64::consts::FRAC_1_SQRT_2,
            randn(rng) * std::f64::consts::FRAC_1_SQRT_2,
        )
    }

    #[test]
    fn full_support_is_unitary() {
        let n = 16;
        let sys = InterpSystem::new(n, &RelevanceMask::all_ones(n)).unwrap();
        assert!((sys.kappa() - 1.0).abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let v: Vec<Complex64> = (0..n).map(|_| cgauss(&mut rng)).collect();
            let av = sys.apply(&v);
            let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let nav: f64 = av.iter().map(|z| z.norm_sqr()).sum();
            assert!((nv - nav).abs() <= 1e-12 * nv.max(1.0));
        }
    }

    #[test]
    fn constant_signal_is_dc_only() {
        let n = 12;
        let mask = RelevanceMask::from_positions(n, &[0, 2, 3, 7, 9, 11]).unwrap();
        let sys = InterpSystem::new(n, &mask).unwrap();
        let c = Complex64::new(0.7, -0.2);
        let x = vec![c; sys.k()];
        let coeffs = interpolate_coeffs(&x, &sys).unwrap();
        assert!((coeffs[0] - c * (n as f64).sqrt()).norm() < 1e-9);
        for f in 1..sys.k() {
            assert!(coeffs[f].norm() < 1e-9);
        }
        let xhat = synthesize(&coeffs, n);
        for i in 0..n {
            assert!((xhat[i] - c).norm() < 1e-9);
        }
    }

    #[test]
    fn solve_then_synthesize_reproduces_relevant_samples() {
        let n = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let mut pos: Vec<usize> = (0..n).collect();
            for i in 0..8 {
                let j = rng.gen_range(i..n);
                pos.swap(i, j);
            }
            let mask = RelevanceMask::from_positions(n, &pos[..8]).unwrap();
            let sys = InterpSystem::new(n, &mask).unwrap();
            let x: Vec<Complex64> = (0..n).map(|_| cgauss(&mut rng)).collect();
            let xs: Vec<Complex64> = sys.positions().iter().map(|&i| x[i]).collect();
            let coeffs = match interpolate_coeffs(&xs, &sys) {
                Ok(c) => c,
                Err(Error::SingularSystem { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let xhat = synthesize(&coeffs, n);
            let maxx = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            for &i in sys.positions() {
                assert!((xhat[i] - x[i]).norm() <= 1e-9 * maxx);
            }
        }
    }

    #[test]
    fn full_dft_roundtrip_is_inverse() {
        let n = 8;
        let sys = InterpSystem::new(n, &RelevanceMask::all_ones(n)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Complex64> = (0..n).map(|_| cgauss(&mut rng)).collect();
        let coeffs = interpolate_coeffs(&x, &sys).unwrap();
        let xhat = synthesize(&coeffs, n);
        for i in 0..n {
            assert!((xhat[i] - x[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn quantizer_fixed_point_and_small_step() {
        let q = CoeffQuantizer::new(0.25).unwrap();
        let on_lattice = vec![Complex64::new(0.5, -0.75)];
        let out = q.quantize(&on_lattice);
        assert_eq!(out.values[0], on_lattice[0]);
        assert_eq!(out.indices[0], (2, -3));

        let q = CoeffQuantizer::new(1e-6).unwrap();
        let x = vec![Complex64::new(0.123456, -0.9)];
        let out = q.quantize(&x);
        assert!((out.values[0] - x[0]).norm() < 1e-6);
    }

    #[test]
    fn quantizer_mse_matches_high_rate_oracle() {
        // Unit-variance Gaussian per real component, step 0.5: the complex
        // per-coefficient MSE is 2 * step^2 / 12 up to exponentially small
        // corrections.
        let step = 0.5;
        let q = CoeffQuantizer::new(step).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..trials {
            let c = Complex64::new(randn(&mut rng), randn(&mut rng));
            let e = (q.quantize(&[c]).values[0] - c).norm_sqr();
            sum += e;
            sumsq += e * e;
        }
        let mean = sum / trials as f64;
        let var = (sumsq / trials as f64 - mean * mean).max(0.0);
        let stderr = (var / trials as f64).sqrt();
        let oracle = step * step / 6.0;
        assert!(
            (mean - oracle).abs() < 5.0 * stderr,
            "mse {mean} vs oracle {oracle} (stderr {stderr})"
        );
    }

    #[test]
    fn coefficient_variance_preserved_at_full_support() {
        let n = 16;
        let sys = InterpSystem::new(n, &RelevanceMask::all_ones(n)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let trials = 6_250; // 6250 * 16 = 1e5 coefficient samples
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..trials {
            let x: Vec<Complex64> = (0..n).map(|_| cgauss(&mut rng)).collect();
            let coeffs = interpolate_coeffs(&x, &sys).unwrap();
            for c in coeffs {
                let v = c.norm_sqr();
                sum += v;
                sumsq += v * v;
            }
        }
        let count = (trials * n) as f64;
        let mean = sum / count;
        let stderr = ((sumsq / count - mean * mean).max(0.0) / count).sqrt();
        assert!(
            (mean - 1.0).abs() < 5.0 * stderr,
            "coefficient variance {mean} (stderr {stderr})"
        );
    }

    #[test]
    fn error_identity_trivial_and_unitary_cases() {
        let n = 8;
        let sys = InterpSystem::new(n, &RelevanceMask::all_ones(n)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<Complex64> = (0..n).map(|_| cgauss(&mut rng)).collect();
        let id = relevant_error_identity(&x, &x, &sys);
        assert_eq!(id.sample_domain_err, 0.0);
        assert_eq!(id.coeff_domain_err, 0.0);
        assert_eq!(id.ratio, 1.0);

        let q = CoeffQuantizer::new(0.25).unwrap();
        let xq = q.quantize(&x).values;
        let id = relevant_error_identity(&x, &xq, &sys);
        assert!((id.ratio - 1.0).abs() < 1e-9, "ratio {}", id.ratio);
    }

    #[test]
    fn identity_matches_synthesized_difference() {
        // The sample-domain error computed through A equals the difference
        // of synthesized blocks at the relevant positions, up to floating
        // point rearrangement.
        let n = 16;
        let mask = RelevanceMask::from_positions(n, &[0, 1, 4, 5, 9, 10, 12, 15]).unwrap();
        let sys = InterpSystem::new(n, &mask).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<Complex64> = (0..sys.k()).map(|_| cgauss(&mut rng)).collect();
        let coeffs = interpolate_coeffs(&x, &sys).unwrap();
        let quant = CoeffQuantizer::new(0.25).unwrap().quantize(&coeffs).values;
        let id = relevant_error_identity(&coeffs, &quant, &sys);

        let full = synthesize(&coeffs, n);
        let full_q = synthesize(&quant, n);
        let direct: f64 = sys
            .positions()
            .iter()
            .map(|&i| (full[i] - full_q[i]).norm_sqr())
            .sum::<f64>()
            / sys.k() as f64;
        assert!(
            (direct - id.sample_domain_err).abs() <= 1e-12 * direct.max(1e-30),
            "direct {direct} vs identity {}",
            id.sample_domain_err
        );
    }

    proptest::proptest! {
        /// Midtread rounding keeps every real component within step/2.
        #[test]
        fn quantizer_error_bounded_by_half_step(
            re in -1e6f64..1e6,
            im in -1e6f64..1e6,
            step in 1e-6f64..10.0,
        ) {
            let q = CoeffQuantizer::new(step).unwrap();
            let out = q.quantize(&[Complex64::new(re, im)]);
            let err = out.values[0] - Complex64::new(re, im);
            proptest::prop_assert!(err.re.abs() <= step / 2.0 * (1.0 + 1e-12));
            proptest::prop_assert!(err.im.abs() <= step / 2.0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn alternate_matrix_hook_matches_builtin_basis() {
        let n = 12;
        let mask = RelevanceMask::from_positions(n, &[0, 3, 5, 8, 9, 11]).unwrap();
        let builtin = InterpSystem::new(n, &mask).unwrap();
        let a = nalgebra::DMatrix::from_fn(6, 6, |i, f| basis_entry(f, mask.positions()[i], n));
        let hooked = InterpSystem::with_matrix(n, mask.positions(), a).unwrap();
        assert_eq!(builtin.kappa(), hooked.kappa());
        let v: Vec<Complex64> = (0..6).map(|i| Complex64::new(i as f64, -1.0)).collect();
        assert_eq!(builtin.apply(&v), hooked.apply(&v));
        // dimension guard
        let bad = nalgebra::DMatrix::zeros(4, 4);
        assert!(InterpSystem::with_matrix(n, mask.positions(), bad).is_err());
    }

    #[test]
    fn singular_system_reports_kappa() {
        // Adjacent positions on a long block give a badly conditioned
        // Vandermonde; with a tight threshold the failure must carry kappa.
        let n = 64;
        let mask = RelevanceMask::from_positions(n, &(0..32).collect::<Vec<_>>()).unwrap();
        let sys = InterpSystem::new(n, &mask).unwrap();
        assert!(sys.kappa() > 1.0);
        if sys.kappa() > KAPPA_LIMIT {
            let xs = vec![Complex64::new(1.0, 0.0); sys.k()];
            match interpolate_coeffs(&xs, &sys) {
                Err(Error::SingularSystem { kappa }) => assert!(kappa > KAPPA_LIMIT),
                other => panic!("expected singular system, got {other:?}"),
            }
        }
    }
}
