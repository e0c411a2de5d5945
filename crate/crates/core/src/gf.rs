//! Arithmetic in GF(2^m) for m in {3, 4, 8} via exp/log tables.

use crate::error::{Error, Result};

/// Default primitive polynomials (including the x^m term).
/// m=3: x^3+x+1, m=4: x^4+x+1, m=8: x^8+x^4+x^3+x^2+1.
const PRIMITIVE: [(u32, u32); 3] = [(3, 0b1011), (4, 0b1_0011), (8, 0x11D)];

/// Field context: extension degree, primitive polynomial, lookup tables.
#[derive(Debug, Clone)]
pub struct GfContext {
    m: u32,
    order: usize,
    exp: Vec<u16>, // exp[i] = alpha^i, doubled length to skip a mod
    log: Vec<u16>, // log[x] = i with alpha^i = x, x != 0
}

impl GfContext {
    /// Build the field GF(2^m); only m in {3, 4, 8} is supported.
    pub fn new(m: u32) -> Result<Self> {
        let poly = PRIMITIVE
            .iter()
            .find(|&&(deg, _)| deg == m)
            .map(|&(_, p)| p)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("unsupported field degree m={m}; use 3, 4, or 8"))
            })?;
        let order = 1usize << m;
        let mut exp = vec![0u16; 2 * (order - 1)];
        let mut log = vec![0u16; order];
        let mut v: u32 = 1;
        for i in 0..order - 1 {
            exp[i] = v as u16;
            log[v as usize] = i as u16;
            v <<= 1;
            if v & (1 << m) != 0 {
                v ^= poly;
            }
        }
        for i in 0..order - 1 {
            exp[order - 1 + i] = exp[i];
        }
        Ok(GfContext { m, order, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of field elements, 2^m.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    #[inline]
    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::InvalidParameter("inverse of 0 in GF(2^m)".into()));
        }
        let l = self.log[a as usize] as usize;
        Ok(self.exp[(self.order - 1 - l) % (self.order - 1)])
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> Result<u16> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_law_exhaustive() {
        for m in [3u32, 4, 8] {
            let gf = GfContext::new(m).unwrap();
            for a in 1..gf.order() as u16 {
                assert_eq!(gf.mul(a, gf.inv(a).unwrap()), 1, "m={m} a={a}");
            }
        }
    }

    #[test]
    fn axioms_exhaustive_gf8() {
        let gf = GfContext::new(3).unwrap();
        let n = gf.order() as u16;
        for a in 0..n {
            for b in 0..n {
                assert_eq!(gf.mul(a, b), gf.mul(b, a));
                for c in 0..n {
                    assert_eq!(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)));
                    assert_eq!(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_randomized_gf256() {
        use rand::{Rng, SeedableRng};
        let gf = GfContext::new(8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20_000 {
            let a = rng.gen_range(0..256) as u16;
            let b = rng.gen_range(0..256) as u16;
            let c = rng.gen_range(0..256) as u16;
            assert_eq!(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)));
            assert_eq!(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)));
        }
    }

    #[test]
    fn unsupported_degree_rejected() {
        assert!(GfContext::new(5).is_err());
    }
}
