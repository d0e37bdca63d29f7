//! Arithmetic in GF(2^m) for m ≤ 16, with elements stored as bit vectors
//! of polynomial coefficients.

use crate::error::{FrameError, Result};

pub const MAX_DEGREE: u32 = 16;

/// Lexicographically least irreducible polynomial of each degree 1..=16,
/// as a bitmask including the leading term. Index 0 is unused.
pub const DEFAULT_POLYNOMIALS: [u32; 17] = [
    0, 0x2, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b,
    0x4021, 0x8003, 0x1002b,
];

fn degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

/// Remainder of carry-less polynomial division.
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

/// Smallest nontrivial factor of `poly` over GF(2), if any.
pub fn find_factor(poly: u64) -> Option<u64> {
    let d = degree(poly);
    // Every reducible polynomial has a factor of degree ≤ d/2.
    (2u64..1 << (d / 2 + 1)).find(|&q| degree(q) <= d / 2 && poly_rem(poly, q) == 0)
}

/// The field GF(2^m) defined by a fixed irreducible modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2m {
    m: u32,
    poly: u32,
}

impl Gf2m {
    /// Field with the built-in modulus for degree `m`.
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE {
            return Err(FrameError::invalid(
                "m",
                format!("field exponent must be in 1..={MAX_DEGREE}, got {m}"),
            ));
        }
        Ok(Gf2m {
            m,
            poly: DEFAULT_POLYNOMIALS[m as usize],
        })
    }

    /// Field with an explicit modulus; `poly` must be irreducible of degree `m`.
    pub fn with_polynomial(m: u32, poly: u32) -> Result<Self> {
        Gf2m::new(m)?;
        if poly == 0 || degree(poly as u64) != m {
            return Err(FrameError::invalid(
                "irreducible_poly",
                format!("{poly:#x} does not have degree {m}"),
            ));
        }
        if let Some(factor) = find_factor(poly as u64) {
            return Err(FrameError::ReduciblePolynomial {
                poly: poly as u64,
                factor,
            });
        }
        Ok(Gf2m { m, poly })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn polynomial(&self) -> u32 {
        self.poly
    }

    pub fn order(&self) -> u32 {
        1 << self.m
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    /// Shift-and-add multiplication reduced modulo the field polynomial.
    #[inline]
    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let top = 1u32 << self.m;
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc
    }

    #[inline]
    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e != 0 {
            if e & 1 != 0 {
                acc = self.mul(acc, a);
            }
            a = self.square(a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `a^(2^m − 2)`. `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, (1u64 << self.m) - 2))
        }
    }

    /// `a^(2^i)`, by `i` repeated squarings.
    pub fn frobenius(&self, mut a: u32, i: u32) -> u32 {
        for _ in 0..i {
            a = self.square(a);
        }
        a
    }

    /// `Tr(a) = Σ_{i<m} a^(2^i)`, which always lands in {0, 1}.
    pub fn trace(&self, a: u32) -> u32 {
        let mut z = a;
        let mut sum = 0;
        for _ in 0..self.m {
            sum ^= z;
            z = self.square(z);
        }
        debug_assert!(sum <= 1, "trace left GF(2): {sum:#x}");
        sum
    }

    /// `x^(2^i + 1)`: one Frobenius chain plus one multiply.
    pub fn gold_power(&self, x: u32, i: u32) -> u32 {
        self.mul(self.frobenius(x, i), x)
    }
}
