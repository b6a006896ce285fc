use std::fmt;
use std::str::FromStr;

use super::clmul::clmul_u128;
use super::Poly64;

/// Monic polynomial of degree exactly 64: `t^64` plus the stored low
/// 64 coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus(u64);

/// Shipped fingerprint polynomial; irreducible over GF(2).
pub const DEFAULT_MODULUS: Modulus = Modulus(0xb218_c1b5_bf5e_6751);

impl Modulus {
    pub const fn from_low_bits(low: u64) -> Self {
        Modulus(low)
    }

    pub const fn low(self) -> u64 {
        self.0
    }

    /// All 65 coefficient bits.
    pub const fn to_u128(self) -> u128 {
        (1u128 << 64) | self.0 as u128
    }

    /// The polynomial as a 9-byte big-endian bit string (leading byte `0x01`).
    pub fn encoding(self) -> [u8; 9] {
        let mut out = [0u8; 9];
        out[0] = 1;
        out[1..].copy_from_slice(&self.0.to_be_bytes());
        out
    }

    pub fn is_irreducible(self) -> bool {
        is_irreducible(self.to_u128())
    }
}

impl Default for Modulus {
    fn default() -> Self {
        DEFAULT_MODULUS
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus(t^64 + {:#018x})", self.0)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#018x}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a degree-64 polynomial in hex (give the low 64 coefficients, or all 65 with a leading 1)")]
pub struct ParseModulusError(String);

impl FromStr for Modulus {
    type Err = ParseModulusError;

    /// Accepts the low 64 coefficients (up to 16 hex digits) or the full
    /// 65-bit polynomial (17 digits starting with `1`), with optional `0x`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseModulusError(s.to_string());
        let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
        if digits.is_empty() || digits.len() > 17 {
            return Err(err());
        }
        let v = u128::from_str_radix(digits, 16).map_err(|_| err())?;
        match v >> 64 {
            0 => Ok(Modulus(v as u64)),
            1 => Ok(Modulus(v as u64)),
            _ => Err(err()),
        }
    }
}

/// Remainder of `data` (most significant bit first) modulo `p`, one bit at
/// a time by shift and XOR.
pub fn poly_mod_longdiv(data: &[u8], p: Modulus) -> Poly64 {
    let mut r = 0u64;
    for &byte in data {
        for i in (0..8).rev() {
            let top = r >> 63;
            r = (r << 1) | ((byte >> i) & 1) as u64;
            if top == 1 {
                r ^= p.0;
            }
        }
    }
    Poly64(r)
}

/// Divides `t^exponent` by `p`: returns the low 128 quotient bits and the
/// remainder.
pub(crate) fn divide_power_of_t(exponent: u32, p: Modulus) -> (u128, u64) {
    let mut q = 0u128;
    let mut r = 0u64;
    for i in 0..=exponent {
        let bit = (i == 0) as u64;
        let top = r >> 63;
        r = (r << 1) | bit;
        q = (q << 1) | top as u128;
        if top == 1 {
            r ^= p.0;
        }
    }
    (q, r)
}

fn degree(x: u128) -> i32 {
    127 - x.leading_zeros() as i32
}

fn reduce(mut a: u128, p: u128) -> u128 {
    let dp = degree(p);
    while a != 0 && degree(a) >= dp {
        a ^= p << (degree(a) - dp);
    }
    a
}

fn mul_mod(a: u128, b: u128, p: u128) -> u128 {
    reduce(clmul_u128(a as u64, b as u64), p)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = reduce(a, b);
        a = b;
        b = r;
    }
    a
}

/// `t^(2^k) mod p`.
fn frobenius(k: u32, p: u128) -> u128 {
    let mut x = reduce(0b10, p);
    for _ in 0..k {
        x = mul_mod(x, x, p);
    }
    x
}

/// Rabin's irreducibility test for `p` given as its full coefficient bits
/// (bit `i` is the coefficient of `t^i`). Degrees 1 through 64 are supported.
///
/// `p` of degree `d` is irreducible iff `t^(2^d) = t (mod p)` and
/// `gcd(t^(2^(d/r)) - t, p) = 1` for every prime `r` dividing `d`.
pub fn is_irreducible(p: u128) -> bool {
    let d = degree(p);
    assert!(d <= 64, "is_irreducible supports degrees up to 64, got {d}");
    if d < 1 {
        return false;
    }
    let d = d as u32;
    let t = reduce(0b10, p);
    if frobenius(d, p) != t {
        return false;
    }
    prime_factors(d)
        .into_iter()
        .all(|r| gcd(p, frobenius(d / r, p) ^ t) == 1)
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
