//! Shared domain types: probability vectors, joint side-information models,
//! distortion tensors, and rate-distortion curves.
//!
//! A side-information model factors the joint law of the source `x`, signal
//! side information `w`, and distortion side information `q` as
//!
//! ```text
//! p(x, q, w) = p(x) * p(w|x) * p(q|w)
//! ```
//!
//! so the Markov chains `q - w - x` hold by construction. The distortion
//! tensor stores `d(x, xhat; q)` as a dense nonnegative table.

use serde::Deserialize;

use crate::error::{Error, Result};

/// Validation tolerance for probabilities (sums, stochastic rows).
pub const PROB_TOL: f64 = 1e-12;
/// Tolerance for derived quantities (curve convexity, mutual informations).
pub const DERIVED_TOL: f64 = 1e-9;

pub const LN_2: f64 = std::f64::consts::LN_2;

/// Rate unit carried by curves and CLI output. Internal computations are in
/// nats; conversion to bits happens at output boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateUnits {
    Bits,
    Nats,
}

impl RateUnits {
    /// Convert a rate in nats into this unit.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            RateUnits::Nats => nats,
            RateUnits::Bits => nats / LN_2,
        }
    }
}

// ---------------------------------------------------------------------------
// ProbVec
// ---------------------------------------------------------------------------

/// A finite probability distribution: nonnegative weights summing to 1
/// within `PROB_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVec(Vec<f64>);

impl ProbVec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::validate_row(&weights, 0)?;
        Ok(ProbVec(weights))
    }

    /// Uniform distribution on `n` symbols.
    pub fn uniform(n: usize) -> Self {
        ProbVec(vec![1.0 / n as f64; n])
    }

    fn validate_row(row: &[f64], index: usize) -> Result<()> {
        if row.is_empty() {
            return Err(Error::DimensionMismatch("empty probability vector".into()));
        }
        if row.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::NonStochastic {
                row: index,
                residual: f64::NAN,
            });
        }
        let sum: f64 = row.iter().sum();
        let residual = (sum - 1.0).abs();
        if residual > PROB_TOL {
            return Err(Error::NonStochastic {
                row: index,
                residual,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Expectation of `f` under this distribution.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.0.iter().enumerate().map(|(i, &p)| p * f(i)).sum()
    }
}

impl std::ops::Index<usize> for ProbVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Validate a row-stochastic table: every row a `ProbVec` of width `cols`.
fn validate_stochastic(table: &[Vec<f64>], cols: usize, what: &str) -> Result<()> {
    for (i, row) in table.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "{what}: row {i} has {} columns, expected {cols}",
                row.len()
            )));
        }
        ProbVec::validate_row(row, i)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// SideInfoModel
// ---------------------------------------------------------------------------

/// Finite-alphabet joint model of source, signal side information, and
/// distortion side information, stored in factored form.
///
/// Indexing: `p_w_given_x[x][w]`, `p_q_given_w[w][q]`.
#[derive(Debug, Clone)]
pub struct SideInfoModel {
    px: ProbVec,
    p_w_given_x: Vec<Vec<f64>>,
    p_q_given_w: Vec<Vec<f64>>,
}

impl SideInfoModel {
    pub fn nx(&self) -> usize {
        self.px.len()
    }
    pub fn nw(&self) -> usize {
        self.p_w_given_x[0].len()
    }
    pub fn nq(&self) -> usize {
        self.p_q_given_w[0].len()
    }

    pub fn px(&self) -> &ProbVec {
        &self.px
    }

    /// Marginal distribution of `w`.
    pub fn pw(&self) -> Vec<f64> {
        let mut pw = vec![0.0; self.nw()];
        for x in 0..self.nx() {
            for w in 0..self.nw() {
                pw[w] += self.px[x] * self.p_w_given_x[x][w];
            }
        }
        pw
    }

    /// Marginal distribution of `q`.
    pub fn pq(&self) -> Vec<f64> {
        let pw = self.pw();
        let mut pq = vec![0.0; self.nq()];
        for w in 0..self.nw() {
            for q in 0..self.nq() {
                pq[q] += pw[w] * self.p_q_given_w[w][q];
            }
        }
        pq
    }

    /// Joint p(x, q) obtained by summing out `w`.
    pub fn joint_xq(&self) -> Vec<Vec<f64>> {
        let mut joint = vec![vec![0.0; self.nq()]; self.nx()];
        for x in 0..self.nx() {
            for w in 0..self.nw() {
                for q in 0..self.nq() {
                    joint[x][q] += self.px[x] * self.p_w_given_x[x][w] * self.p_q_given_w[w][q];
                }
            }
        }
        joint
    }

    /// Full joint p(x, q, w) per the factorization.
    pub fn joint_xqw(&self) -> Vec<Vec<Vec<f64>>> {
        let (nx, nq, nw) = (self.nx(), self.nq(), self.nw());
        let mut joint = vec![vec![vec![0.0; nw]; nq]; nx];
        for x in 0..nx {
            for w in 0..nw {
                for q in 0..nq {
                    joint[x][q][w] = self.px[x] * self.p_w_given_x[x][w] * self.p_q_given_w[w][q];
                }
            }
        }
        joint
    }

    /// True when q and x are marginally independent within `tol`.
    pub fn q_x_independent(&self, tol: f64) -> bool {
        let joint = self.joint_xq();
        let pq = self.pq();
        for x in 0..self.nx() {
            for q in 0..self.nq() {
                if (joint[x][q] - self.px[x] * pq[q]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Validate factors and assemble a [`SideInfoModel`].
///
/// `p_w_given_x` is indexed `[x][w]` and `p_q_given_w` is indexed `[w][q]`;
/// every row must be stochastic within `PROB_TOL`.
pub fn build_model(
    px: ProbVec,
    p_w_given_x: Vec<Vec<f64>>,
    p_q_given_w: Vec<Vec<f64>>,
) -> Result<SideInfoModel> {
    if p_w_given_x.len() != px.len() {
        return Err(Error::DimensionMismatch(format!(
            "p_w_given_x has {} rows, expected |X| = {}",
            p_w_given_x.len(),
            px.len()
        )));
    }
    let nw = p_w_given_x[0].len();
    validate_stochastic(&p_w_given_x, nw, "p_w_given_x")?;
    if p_q_given_w.len() != nw {
        return Err(Error::DimensionMismatch(format!(
            "p_q_given_w has {} rows, expected |W| = {nw}",
            p_q_given_w.len()
        )));
    }
    let nq = p_q_given_w[0].len();
    validate_stochastic(&p_q_given_w, nq, "p_q_given_w")?;
    Ok(SideInfoModel {
        px,
        p_w_given_x,
        p_q_given_w,
    })
}

// ---------------------------------------------------------------------------
// DistortionTensor
// ---------------------------------------------------------------------------

/// Dense distortion table `d(x, xhat; q)`, all entries finite and >= 0.
#[derive(Debug, Clone)]
pub struct DistortionTensor {
    d: Vec<f64>,
    nx: usize,
    nxhat: usize,
    nq: usize,
}

impl DistortionTensor {
    pub fn new(d: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let nx = d.len();
        if nx == 0 {
            return Err(Error::DimensionMismatch("empty distortion tensor".into()));
        }
        let nxhat = d[0].len();
        let nq = if nxhat > 0 { d[0][0].len() } else { 0 };
        if nxhat == 0 || nq == 0 {
            return Err(Error::DimensionMismatch("empty distortion tensor".into()));
        }
        let mut flat = Vec::with_capacity(nx * nxhat * nq);
        for (x, plane) in d.iter().enumerate() {
            if plane.len() != nxhat {
                return Err(Error::DimensionMismatch(format!(
                    "distortion tensor: x={x} has {} xhat rows, expected {nxhat}",
                    plane.len()
                )));
            }
            for (xh, row) in plane.iter().enumerate() {
                if row.len() != nq {
                    return Err(Error::DimensionMismatch(format!(
                        "distortion tensor: (x={x}, xhat={xh}) has {} q entries, expected {nq}",
                        row.len()
                    )));
                }
                for &v in row {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "distortion entry {v} at (x={x}, xhat={xh}) must be finite and >= 0"
                        )));
                    }
                    flat.push(v);
                }
            }
        }
        Ok(DistortionTensor {
            d: flat,
            nx,
            nxhat,
            nq,
        })
    }

    /// Build from a closure over `(x, xhat, q)` indices.
    pub fn from_fn(
        nx: usize,
        nxhat: usize,
        nq: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let table = (0..nx)
            .map(|x| {
                (0..nxhat)
                    .map(|xh| (0..nq).map(|q| f(x, xh, q)).collect())
                    .collect()
            })
            .collect();
        Self::new(table)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn nxhat(&self) -> usize {
        self.nxhat
    }
    pub fn nq(&self) -> usize {
        self.nq
    }

    #[inline]
    pub fn get(&self, x: usize, xhat: usize, q: usize) -> f64 {
        self.d[(x * self.nxhat + xhat) * self.nq + q]
    }

    /// The X x Xhat matrix for a fixed q.
    pub fn slice_q(&self, q: usize) -> Vec<Vec<f64>> {
        (0..self.nx)
            .map(|x| (0..self.nxhat).map(|xh| self.get(x, xh, q)).collect())
            .collect()
    }

    /// q-averaged distortion matrix (valid as an effective measure when q is
    /// independent of x).
    pub fn averaged(&self, pq: &[f64]) -> Vec<Vec<f64>> {
        (0..self.nx)
            .map(|x| {
                (0..self.nxhat)
                    .map(|xh| (0..self.nq).map(|q| pq[q] * self.get(x, xh, q)).sum())
                    .collect()
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Decomposition analysis
// ---------------------------------------------------------------------------

/// Structural facts about a model/tensor pair that gate the equivalence
/// theorems: marginal independence of q and x, erasure form (the q=0 slice
/// is identically zero), and scaled form `d0(q) * d1(x, xhat)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub q_x_independent: bool,
    pub erasure_form: bool,
    pub scaled_form: bool,
}

/// Pure analysis of the model and distortion tensor; never fails.
pub fn check_decomposition(model: &SideInfoModel, d: &DistortionTensor) -> DecompositionReport {
    DecompositionReport {
        q_x_independent: model.q_x_independent(PROB_TOL.max(1e-12)),
        erasure_form: is_erasure_form(d),
        scaled_form: is_scaled_form(d),
    }
}

/// Erasure form: binary q with the q=0 slice identically zero.
fn is_erasure_form(d: &DistortionTensor) -> bool {
    if d.nq() != 2 {
        return false;
    }
    (0..d.nx()).all(|x| (0..d.nxhat()).all(|xh| d.get(x, xh, 0) == 0.0))
}

/// Rank-1 factorability of the matrix M[q][(x, xhat)] with relative
/// tolerance 1e-12. Nonnegativity of the factors is automatic because all
/// tensor entries are nonnegative.
fn is_scaled_form(d: &DistortionTensor) -> bool {
    let ncols = d.nx() * d.nxhat();
    let row = |q: usize| -> Vec<f64> {
        let mut r = Vec::with_capacity(ncols);
        for x in 0..d.nx() {
            for xh in 0..d.nxhat() {
                r.push(d.get(x, xh, q));
            }
        }
        r
    };
    // Reference row: largest infinity norm.
    let rows: Vec<Vec<f64>> = (0..d.nq()).map(row).collect();
    let norms: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().fold(0.0f64, |a, &v| a.max(v)))
        .collect();
    let (qref, &nref) = match norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
    {
        Some(m) => m,
        None => return true,
    };
    if nref == 0.0 {
        return true; // identically zero tensor is trivially scaled
    }
    let rref = &rows[qref];
    for r in &rows {
        // Proportionality constant from the largest entry of the reference row.
        let jmax = (0..ncols)
            .max_by(|&a, &b| rref[a].partial_cmp(&rref[b]).unwrap())
            .unwrap();
        let c = r[jmax] / rref[jmax];
        for j in 0..ncols {
            if (r[j] - c * rref[j]).abs() > 1e-12 * nref.max(norms[qref] * c.abs()) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// QDistribution
// ---------------------------------------------------------------------------

/// Distribution family for continuous (or atomic) distortion side
/// information q > 0, used by the high-resolution rate-gap formulas.
#[derive(Debug, Clone, PartialEq)]
pub enum QDistribution {
    /// Degenerate q = c with probability 1.
    Constant(f64),
    /// Density tau * exp(-q tau).
    Exponential { tau: f64 },
    /// Uniform on [0, 1].
    Uniform01,
    /// ln q ~ Normal(m, q_sq).
    LogNormal { m: f64, q_sq: f64 },
    /// Density a b^a / q^(a+1) on q >= b, a > 1.
    Pareto { a: f64, b: f64 },
    /// Density b (bq)^(a-1) exp(-bq) / Gamma(a).
    Gamma { a: f64, b: f64 },
    /// (1 - eps) at q = eps, eps at q = 1/eps, with 0 < eps < 1/2.
    Pathological { eps: f64 },
    /// Density (2/pi) / (1 + q^2) on q >= 0. Has no mean.
    PositiveCauchy,
    /// Finite support: positive values with probabilities.
    Discrete { values: Vec<f64>, probs: ProbVec },
}

impl QDistribution {
    /// Check the family parameter constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            QDistribution::Constant(c) if !(*c > 0.0) => bad(format!("constant q {c} must be > 0")),
            QDistribution::Exponential { tau } if !(*tau > 0.0) => {
                bad(format!("exponential tau {tau} must be > 0"))
            }
            QDistribution::LogNormal { q_sq, .. } if !(*q_sq > 0.0) => {
                bad(format!("lognormal Q^2 {q_sq} must be > 0"))
            }
            QDistribution::Pareto { a, b } if !(*a > 1.0 && *b > 0.0) => {
                bad(format!("pareto requires a > 1 and b > 0, got a={a}, b={b}"))
            }
            QDistribution::Gamma { a, b } if !(*a > 0.0 && *b > 0.0) => {
                bad(format!("gamma requires a > 0 and b > 0, got a={a}, b={b}"))
            }
            QDistribution::Pathological { eps } if !(*eps > 0.0 && *eps < 0.5) => {
                bad(format!("pathological requires 0 < eps < 1/2, got {eps}"))
            }
            QDistribution::Discrete { values, probs } => {
                if values.len() != probs.len() {
                    return Err(Error::DimensionMismatch(
                        "discrete q: values and probs differ in length".into(),
                    ));
                }
                if values.iter().any(|&v| !(v > 0.0)) {
                    return bad("discrete q values must be > 0".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

// ---------------------------------------------------------------------------
// RDCurve
// ---------------------------------------------------------------------------

/// A rate-distortion curve: points sorted by distortion, rate non-increasing
/// and convex within `DERIVED_TOL`.
#[derive(Debug, Clone)]
pub struct RDCurve {
    pub points: Vec<(f64, f64)>,
    pub units: RateUnits,
}

impl RDCurve {
    /// Validate ordering, monotonicity, and convexity; returns the curve.
    pub fn new(points: Vec<(f64, f64)>, units: RateUnits) -> Result<Self> {
        let curve = RDCurve { points, units };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        let pts = &self.points;
        let scale = pts.iter().fold(1.0f64, |a, &(_, r)| a.max(r.abs()));
        for i in 1..pts.len() {
            if pts[i].0 < pts[i - 1].0 {
                return Err(Error::InvalidParameter(format!(
                    "curve distortions not sorted at index {i}"
                )));
            }
            if pts[i].1 > pts[i - 1].1 + DERIVED_TOL * scale {
                return Err(Error::InvalidParameter(format!(
                    "curve rate increases at index {i}: {} -> {}",
                    pts[i - 1].1,
                    pts[i].1
                )));
            }
        }
        // Each interior point must lie on (or below) the chord of its
        // neighbours, i.e. the curve is its own lower convex envelope.
        for i in 1..pts.len().saturating_sub(1) {
            let (d0, r0) = pts[i - 1];
            let (d1, r1) = pts[i];
            let (d2, r2) = pts[i + 1];
            if d2 > d0 {
                let chord = r0 + (r2 - r0) * (d1 - d0) / (d2 - d0);
                if r1 > chord + DERIVED_TOL * scale {
                    return Err(Error::InvalidParameter(format!(
                        "curve not convex at index {i}: rate {r1} above chord {chord}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Piecewise-linear evaluation at distortion `d` (clamped to the ends).
    pub fn eval(&self, d: f64) -> f64 {
        let pts = &self.points;
        if pts.is_empty() {
            return f64::NAN;
        }
        if d <= pts[0].0 {
            return pts[0].1;
        }
        if d >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let idx = pts.partition_point(|&(x, _)| x < d);
        let (d0, r0) = pts[idx - 1];
        let (d1, r1) = pts[idx];
        if d1 == d0 {
            return r0.min(r1);
        }
        r0 + (r1 - r0) * (d - d0) / (d1 - d0)
    }

    /// Convert the curve in place to the requested unit.
    pub fn to_units(mut self, units: RateUnits) -> Self {
        if self.units != units {
            let factor = match (self.units, units) {
                (RateUnits::Nats, RateUnits::Bits) => 1.0 / LN_2,
                (RateUnits::Bits, RateUnits::Nats) => LN_2,
                _ => 1.0,
            };
            for p in &mut self.points {
                p.1 *= factor;
            }
            self.units = units;
        }
        self
    }
}

// ---------------------------------------------------------------------------
// JSON model files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct ModelFile {
    px: Vec<f64>,
    p_w_given_x: Vec<Vec<f64>>,
    p_q_given_w: Vec<Vec<f64>>,
    d: Vec<Vec<Vec<f64>>>,
}

/// Parse a JSON model file into a validated model and distortion tensor.
///
/// Keys: `px` (array over x), `p_w_given_x` (rows indexed by x, columns by
/// w), `p_q_given_w` (rows indexed by w, columns by q), `d` (nested arrays
/// indexed `[x][xhat][q]`).
pub fn load_model_json(text: &str) -> Result<(SideInfoModel, DistortionTensor)> {
    let file: ModelFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParameter(format!("model JSON: {e}")))?;
    let px = ProbVec::new(file.px)?;
    let model = build_model(px, file.p_w_given_x, file.p_q_given_w)?;
    let d = DistortionTensor::new(file.d)?;
    if d.nx() != model.nx() {
        return Err(Error::DimensionMismatch(format!(
            "distortion tensor |X| = {} but model |X| = {}",
            d.nx(),
            model.nx()
        )));
    }
    if d.nq() != model.nq() {
        return Err(Error::DimensionMismatch(format!(
            "distortion tensor |Q| = {} but model |Q| = {}",
            d.nq(),
            model.nq()
        )));
    }
    Ok((model, d))
}

// ---------------------------------------------------------------------------
// Small information-theory helpers shared across modules
// ---------------------------------------------------------------------------

/// Binary entropy in bits; 0 at the endpoints.
pub fn binary_entropy_bits(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn copy_model() -> SideInfoModel {
        // w is a deterministic copy of x; q independent uniform.
        build_model(
            ProbVec::new(vec![0.5, 0.5]).unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        )
        .unwrap()
    }

    #[test]
    fn joint_is_product_when_q_uniform_independent() {
        let m = copy_model();
        let joint = m.joint_xq();
        for x in 0..2 {
            for q in 0..2 {
                assert!((joint[x][q] - 0.25).abs() < PROB_TOL);
            }
        }
        assert!(m.q_x_independent(PROB_TOL));
    }

    #[test]
    fn degenerate_w_gives_uniform_joint() {
        let m = build_model(
            ProbVec::new(vec![0.5, 0.5]).unwrap(),
            vec![vec![1.0], vec![1.0]],
            vec![vec![0.5, 0.5]],
        )
        .unwrap();
        let joint = m.joint_xq();
        for x in 0..2 {
            for q in 0..2 {
                assert!((joint[x][q] - 0.25).abs() < PROB_TOL);
            }
        }
        assert!(m.q_x_independent(PROB_TOL));
    }

    #[test]
    fn random_model_joint_sums_to_one_and_satisfies_markov() {
        // |X|=3, |W|=2, |Q|=2 with hand-picked stochastic tables; verify by
        // exhaustive enumeration of the factorization.
        let px = ProbVec::new(vec![0.2, 0.5, 0.3]).unwrap();
        let pwx = vec![vec![0.7, 0.3], vec![0.4, 0.6], vec![0.1, 0.9]];
        let pqw = vec![vec![0.25, 0.75], vec![0.8, 0.2]];
        let m = build_model(px.clone(), pwx.clone(), pqw.clone()).unwrap();
        let joint = m.joint_xqw();
        let mut total = 0.0;
        for x in 0..3 {
            for q in 0..2 {
                for w in 0..2 {
                    let expect = px[x] * pwx[x][w] * pqw[w][q];
                    assert!((joint[x][q][w] - expect).abs() < PROB_TOL);
                    total += joint[x][q][w];
                }
            }
        }
        assert!((total - 1.0).abs() < PROB_TOL);
        // q independent of x given w: p(q | w, x) = p(q | w) holds by
        // construction; check p(x,q,w) * p(w) = p(x,w) * p(q,w).
        let pw = m.pw();
        for x in 0..3 {
            for q in 0..2 {
                for w in 0..2 {
                    let pxw: f64 = px[x] * pwx[x][w];
                    let pqw_joint: f64 = pw[w] * pqw[w][q];
                    assert!((joint[x][q][w] * pw[w] - pxw * pqw_joint).abs() < PROB_TOL);
                }
            }
        }
    }

    #[test]
    fn build_model_rejects_bad_rows() {
        let px = ProbVec::new(vec![0.5, 0.5]).unwrap();
        let err = build_model(
            px.clone(),
            vec![vec![0.9, 0.2], vec![0.5, 0.5]],
            vec![vec![1.0], vec![1.0]],
        )
        .unwrap_err();
        match err {
            Error::NonStochastic { row, residual } => {
                assert_eq!(row, 0);
                assert!((residual - 0.1).abs() < 1e-9);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(build_model(px, vec![vec![1.0]], vec![vec![1.0]],).is_err());
    }

    #[test]
    fn probvec_rejects_negative_and_unnormalized() {
        assert!(ProbVec::new(vec![0.5, -0.5, 1.0]).is_err());
        assert!(ProbVec::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVec::new(vec![0.5, 0.5 + 5e-13]).is_ok());
    }

    #[test]
    fn decomposition_degenerate_w_forces_independence() {
        let m = build_model(
            ProbVec::new(vec![0.3, 0.7]).unwrap(),
            vec![vec![1.0], vec![1.0]],
            vec![vec![0.6, 0.4]],
        )
        .unwrap();
        let d = DistortionTensor::from_fn(2, 2, 2, |x, xh, q| {
            (q + 1) as f64 * if x == xh { 0.0 } else { 1.0 }
        })
        .unwrap();
        let rep = check_decomposition(&m, &d);
        assert!(rep.q_x_independent);
        // d = q' * Hamming with q' in {1, 2} is scaled form
        assert!(rep.scaled_form);
        assert!(!rep.erasure_form);
    }

    #[test]
    fn additive_offset_breaks_scaled_form() {
        // d of the noisy-observation kind: alpha = (0, 1/2), beta = (1, 0):
        // d(x, xhat; q) = alpha_q + beta_q * Hamming. The 2 x 4 matrix
        // M[q][(x,xhat)] has rows (0,1,1,0) and (.5,.5,.5,.5): rank 2.
        let alphas = [0.0, 0.5];
        let betas = [1.0, 0.0];
        let d = DistortionTensor::from_fn(2, 2, 2, |x, xh, q| {
            alphas[q] + betas[q] * if x == xh { 0.0 } else { 1.0 }
        })
        .unwrap();
        let m = build_model(
            ProbVec::new(vec![0.5, 0.5]).unwrap(),
            vec![vec![1.0], vec![1.0]],
            vec![vec![0.5, 0.5]],
        )
        .unwrap();
        let rep = check_decomposition(&m, &d);
        assert!(!rep.scaled_form);
    }

    #[test]
    fn erasure_form_detected() {
        let d = DistortionTensor::from_fn(2, 2, 2, |x, xh, q| {
            q as f64 * if x == xh { 0.0 } else { 1.0 }
        })
        .unwrap();
        let m = copy_model();
        assert!(check_decomposition(&m, &d).erasure_form);
    }

    #[test]
    fn rd_curve_invariants() {
        let c = RDCurve::new(vec![(0.0, 1.0), (0.25, 0.5), (0.5, 0.0)], RateUnits::Bits).unwrap();
        assert!((c.eval(0.125) - 0.75).abs() < 1e-12);
        // increasing rate rejected
        assert!(RDCurve::new(vec![(0.0, 0.5), (0.1, 0.9)], RateUnits::Bits).is_err());
        // non-convex bump rejected
        assert!(RDCurve::new(vec![(0.0, 1.0), (0.5, 0.9), (1.0, 0.0)], RateUnits::Bits).is_err());
    }

    #[test]
    fn model_json_roundtrip() {
        let text = r#"{
            "px": [0.5, 0.5],
            "p_w_given_x": [[1.0], [1.0]],
            "p_q_given_w": [[0.5, 0.5]],
            "d": [[[0.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]]]
        }"#;
        let (m, d) = load_model_json(text).unwrap();
        assert_eq!(m.nx(), 2);
        assert_eq!(m.nq(), 2);
        assert_eq!(d.get(0, 1, 1), 1.0);
        assert!(check_decomposition(&m, &d).erasure_form);
    }

    proptest::proptest! {
        /// Any model assembled from stochastic factors has a normalized
        /// joint and satisfies the q - w - x Markov chain exactly:
        /// p(x,q,w) p(w) = p(x,w) p(q,w).
        #[test]
        fn built_models_satisfy_markov_chain(
            raw_px in proptest::collection::vec(0.01f64..1.0, 2..=4),
            raw_wx in proptest::collection::vec(0.01f64..1.0, 12),
            raw_qw in proptest::collection::vec(0.01f64..1.0, 9),
        ) {
            let nx = raw_px.len();
            let nw = 3usize;
            let nq = 3usize;
            let norm = |v: &[f64]| -> Vec<f64> {
                let s: f64 = v.iter().sum();
                v.iter().map(|x| x / s).collect()
            };
            let px = ProbVec::new(norm(&raw_px)).unwrap();
            let pwx: Vec<Vec<f64>> = (0..nx).map(|x| norm(&raw_wx[x * nw..(x + 1) * nw])).collect();
            let pqw: Vec<Vec<f64>> = (0..nw).map(|w| norm(&raw_qw[w * nq..(w + 1) * nq])).collect();
            let m = build_model(px.clone(), pwx.clone(), pqw.clone()).unwrap();
            let joint = m.joint_xqw();
            let total: f64 = joint.iter().flatten().flatten().sum();
            proptest::prop_assert!((total - 1.0).abs() < 1e-12);
            let pw = m.pw();
            for x in 0..nx {
                for q in 0..nq {
                    for w in 0..nw {
                        let pxw = px[x] * pwx[x][w];
                        let pqw_joint = pw[w] * pqw[w][q];
                        proptest::prop_assert!(
                            (joint[x][q][w] * pw[w] - pxw * pqw_joint).abs() < 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn qdistribution_parameter_constraints() {
        assert!(QDistribution::Pareto { a: 1.0, b: 1.0 }.validate().is_err());
        assert!(QDistribution::Pareto { a: 2.0, b: 1.0 }.validate().is_ok());
        assert!(QDistribution::Pathological { eps: 0.6 }.validate().is_err());
        assert!(QDistribution::Discrete {
            values: vec![1.0, -2.0],
            probs: ProbVec::new(vec![0.5, 0.5]).unwrap(),
        }
        .validate()
        .is_err());
    }
}
