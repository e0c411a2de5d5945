//! Lossless coding of the relevant samples of a block by polynomial
//! interpolation over GF(2^m).
//!
//! A block of `n` field symbols with `k` relevant positions is encoded by
//! fitting the unique polynomial of degree <= k-1 through the relevant
//! `(position, value)` pairs; the `k` coefficients are the payload
//! (`k * m` bits). The receiver evaluates the polynomial at all `n`
//! positions, which reproduces every relevant sample exactly and
//! interpolates the rest. This is Reed-Solomon erasure decoding viewed as
//! curve fitting, with irrelevant samples playing the role of erasures.

use crate::error::{Error, Result};
use crate::gf::GfContext;

// ---------------------------------------------------------------------------
// Relevance masks
// ---------------------------------------------------------------------------

/// Length-n binary mask with `k` ones marking the relevant samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceMask {
    bits: Vec<bool>,
    k: usize,
}

impl RelevanceMask {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        let k = bits.iter().filter(|&&b| b).count();
        if k == 0 {
            return Err(Error::InvalidParameter(
                "relevance mask needs at least one relevant sample".into(),
            ));
        }
        Ok(RelevanceMask { bits, k })
    }

    /// Mask with ones exactly at `positions` (must be < n).
    pub fn from_positions(n: usize, positions: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &p in positions {
            if p >= n {
                return Err(Error::InvalidParameter(format!(
                    "mask position {p} out of range 0..{n}"
                )));
            }
            bits[p] = true;
        }
        Self::new(bits)
    }

    pub fn all_ones(n: usize) -> Self {
        RelevanceMask {
            bits: vec![true; n],
            k: n,
        }
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_relevant(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn positions(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.bits[i]).collect()
    }
}

// ---------------------------------------------------------------------------
// Polynomial interpolation and evaluation
// ---------------------------------------------------------------------------

/// Coefficients (ascending degree) of the unique polynomial of degree
/// <= k-1 through the given points, by Lagrange interpolation in GF(2^m).
pub fn poly_interpolate(points: &[(u16, u16)], gf: &GfContext) -> Result<Vec<u16>> {
    let k = points.len();
    if k == 0 {
        return Err(Error::InvalidParameter("no interpolation points".into()));
    }
    if k > gf.order() {
        return Err(Error::FieldTooSmall {
            n: k,
            order: gf.order(),
        });
    }
    for i in 0..k {
        for j in i + 1..k {
            if points[i].0 == points[j].0 {
                return Err(Error::DuplicatePositions);
            }
        }
    }

    // master(z) = prod_i (z + x_i); coefficients ascending, degree k.
    let mut master = vec![0u16; k + 1];
    master[0] = 1;
    let mut deg = 0;
    for &(x, _) in points {
        // multiply by (z + x): shift up and add x * current
        for d in (0..=deg).rev() {
            let c = master[d];
            master[d + 1] ^= c;
            master[d] = gf.mul(c, x);
        }
        deg += 1;
    }

    let mut coeffs = vec![0u16; k];
    let mut basis = vec![0u16; k];
    for &(xi, yi) in points {
        // basis(z) = master(z) / (z + xi) by synthetic division.
        // master = (z + xi) * basis, so basis[d] = master[d+1] + xi*basis[d+1].
        basis[k - 1] = master[k];
        for d in (0..k - 1).rev() {
            basis[d] = gf.add(master[d + 1], gf.mul(xi, basis[d + 1]));
        }
        // denominator = basis(xi) = prod_{j != i} (xi + xj)
        let denom = poly_evaluate_one(&basis, xi, gf);
        let scale = gf.div(yi, denom)?;
        for d in 0..k {
            coeffs[d] ^= gf.mul(scale, basis[d]);
        }
    }
    Ok(coeffs)
}

/// Horner evaluation of a polynomial (coefficients ascending) at one point.
pub fn poly_evaluate_one(coeffs: &[u16], x: u16, gf: &GfContext) -> u16 {
    let mut acc = 0u16;
    for &c in coeffs.iter().rev() {
        acc = gf.add(gf.mul(acc, x), c);
    }
    acc
}

/// Horner evaluation at each of the given positions.
pub fn poly_evaluate(coeffs: &[u16], positions: &[u16], gf: &GfContext) -> Vec<u16> {
    positions
        .iter()
        .map(|&x| poly_evaluate_one(coeffs, x, gf))
        .collect()
}

// ---------------------------------------------------------------------------
// Payloads and the codec proper
// ---------------------------------------------------------------------------

/// Encoded block: header plus `k` polynomial coefficients (`k * m` bits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePayload {
    pub n: usize,
    pub k: usize,
    pub m: u32,
    /// Polynomial coefficients, ascending degree.
    pub coeffs: Vec<u16>,
}

impl ErasurePayload {
    /// Payload size in bits, excluding the fixed header: exactly `k * m`.
    pub fn bits(&self) -> usize {
        self.k * self.m as usize
    }

    /// Wire format: 4 header octets (n, k, m, reserved=0) followed by
    /// ceil(k*m/8) octets of coefficients packed MSB-first, ascending degree.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.n as u8, self.k as u8, self.m as u8, 0u8];
        let mut acc: u32 = 0;
        let mut nbits: u32 = 0;
        for &c in &self.coeffs {
            acc = (acc << self.m) | u32::from(c);
            nbits += self.m;
            while nbits >= 8 {
                out.push((acc >> (nbits - 8)) as u8);
                nbits -= 8;
                acc &= (1 << nbits) - 1;
            }
        }
        if nbits > 0 {
            out.push((acc << (8 - nbits)) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::HeaderMismatch("payload shorter than header".into()));
        }
        let (n, k, m) = (bytes[0] as usize, bytes[1] as usize, bytes[2] as u32);
        if bytes[3] != 0 {
            return Err(Error::HeaderMismatch("reserved header octet not 0".into()));
        }
        let need = 4 + (k * m as usize).div_ceil(8);
        if bytes.len() != need {
            return Err(Error::HeaderMismatch(format!(
                "payload length {} does not match header ({need} expected)",
                bytes.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(k);
        let mut acc: u32 = 0;
        let mut nbits: u32 = 0;
        let mut iter = bytes[4..].iter();
        for _ in 0..k {
            while nbits < m {
                acc = (acc << 8) | u32::from(*iter.next().unwrap());
                nbits += 8;
            }
            coeffs.push((acc >> (nbits - m)) as u16);
            nbits -= m;
            acc &= (1 << nbits) - 1;
        }
        Ok(ErasurePayload { n, k, m, coeffs })
    }
}

/// Encode the relevant samples of `x` (positions taken as field elements
/// 0..n-1) into a payload of exactly `k * m` bits.
pub fn encode_relevant(x: &[u16], mask: &RelevanceMask, gf: &GfContext) -> Result<ErasurePayload> {
    let n = x.len();
    if mask.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "mask length {} != block length {n}",
            mask.n()
        )));
    }
    // n = 256 would also overflow the single-octet wire header.
    if n > gf.order() || n > 255 {
        return Err(Error::FieldTooSmall {
            n,
            order: gf.order().min(256),
        });
    }
    let points: Vec<(u16, u16)> = mask
        .positions()
        .into_iter()
        .map(|i| (i as u16, x[i]))
        .collect();
    let coeffs = poly_interpolate(&points, gf)?;
    Ok(ErasurePayload {
        n,
        k: mask.k(),
        m: gf.m(),
        coeffs,
    })
}

/// Evaluate the payload polynomial at positions 0..n-1. Samples that were
/// relevant at the encoder are reproduced exactly.
pub fn reconstruct(payload: &ErasurePayload, gf: &GfContext) -> Result<Vec<u16>> {
    if payload.m != gf.m() {
        return Err(Error::HeaderMismatch(format!(
            "payload field degree {} != context degree {}",
            payload.m,
            gf.m()
        )));
    }
    if payload.n > gf.order() {
        return Err(Error::FieldTooSmall {
            n: payload.n,
            order: gf.order(),
        });
    }
    let positions: Vec<u16> = (0..payload.n as u16).collect();
    Ok(poly_evaluate(&payload.coeffs, &positions, gf))
}
