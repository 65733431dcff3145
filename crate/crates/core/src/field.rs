//! Arithmetic in the prime field F_q and the additive character psi.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The prime field F_q for an odd prime q below 256.
#[derive(Debug, Clone)]
pub struct Fq {
    q: u32,
    generator: u32,
    psi: Vec<Complex64>,
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl Fq {
    pub fn new(q: u32) -> Result<Self> {
        if q == 2 || !is_prime(q) {
            return Err(Error::Domain(format!("q = {q} is not an odd prime")));
        }
        if q > 251 {
            return Err(Error::Domain(format!("q = {q} exceeds the supported range")));
        }
        let generator = (2..q)
            .find(|&g| (1..q - 1).all(|k| pow_mod(g, k, q) != 1))
            .unwrap_or(1);
        let psi = (0..q)
            .map(|x| Complex64::from_polar(1.0, 2.0 * PI * x as f64 / q as f64))
            .collect();
        Ok(Fq { q, generator, psi })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Reduce an arbitrary integer into [0, q).
    pub fn elem(&self, x: i64) -> u32 {
        x.rem_euclid(self.q as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.q - b) % self.q
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.q
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.q - a) % self.q
    }

    pub fn pow(&self, a: u32, k: u32) -> u32 {
        pow_mod(a, k, self.q)
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.q), "zero has no inverse");
        pow_mod(a, self.q - 2, self.q)
    }

    pub fn half(&self) -> u32 {
        self.inv(2)
    }

    pub fn quarter(&self) -> u32 {
        self.inv(4)
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn units(&self) -> impl Iterator<Item = u32> {
        1..self.q
    }

    /// psi(x) = exp(2 pi i x / q).
    pub fn psi(&self, x: u32) -> Complex64 {
        self.psi[(x % self.q) as usize]
    }
}

pub(crate) fn pow_mod(a: u32, mut k: u32, q: u32) -> u32 {
    let mut base = (a % q) as u64;
    let mut acc = 1u64;
    let q = q as u64;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        k >>= 1;
    }
    acc as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_moduli() {
        assert!(Fq::new(2).is_err());
        assert!(Fq::new(9).is_err());
        assert!(Fq::new(1).is_err());
        assert!(Fq::new(7).is_ok());
    }

    #[test]
    fn special_inverses() {
        let f = Fq::new(5).unwrap();
        assert_eq!(f.half(), 3);
        assert_eq!(f.quarter(), 4);
        assert_eq!(f.elem(-2), 3);
        let f = Fq::new(3).unwrap();
        assert_eq!(f.half(), 2);
        assert_eq!(f.quarter(), 1);
    }

    #[test]
    fn generator_has_full_order() {
        for q in [3, 5, 7, 11, 13] {
            let f = Fq::new(q).unwrap();
            let g = f.generator();
            let mut seen: Vec<u32> = (0..q - 1).map(|k| f.pow(g, k)).collect();
            seen.sort();
            assert_eq!(seen, (1..q).collect::<Vec<_>>());
        }
    }

    #[test]
    fn psi_is_additive() {
        let f = Fq::new(7).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                let lhs = f.psi(f.add(a, b));
                let rhs = f.psi(a) * f.psi(b);
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }
}
