//! Polynomial arithmetic over GF(2) and 64-bit Rabin fingerprints.
//!
//! A byte string is read as a polynomial with the most significant bit of the
//! first byte as the highest coefficient. Its fingerprint is the remainder
//! modulo a fixed irreducible polynomial of degree 64, computed by folding
//! 128-bit blocks with carry-less multiplies and finishing with one Barrett
//! reduction.

mod clmul;
mod fingerprint;
mod poly;

pub use clmul::{clmul, hardware_clmul_available, ClmulBackend};
pub use fingerprint::{
    collision_bound, precompute_context, Fingerprint, FingerprintContext, FingerprintError,
    DEFAULT_FOLD_OFFSETS,
};
pub use poly::{is_irreducible, poly_mod_longdiv, Modulus, DEFAULT_MODULUS};

/// Polynomial of degree < 64; bit `i` is the coefficient of `t^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly64(pub u64);

/// Polynomial of degree < 128 split into 64-bit halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Poly128 {
    pub hi: u64,
    pub lo: u64,
}

impl Poly128 {
    pub const fn new(hi: u64, lo: u64) -> Self {
        Poly128 { hi, lo }
    }
}

impl From<u128> for Poly128 {
    fn from(v: u128) -> Self {
        Poly128 { hi: (v >> 64) as u64, lo: v as u64 }
    }
}

impl From<Poly128> for u128 {
    fn from(p: Poly128) -> u128 {
        ((p.hi as u128) << 64) | p.lo as u128
    }
}

impl std::ops::BitXor for Poly64 {
    type Output = Poly64;
    fn bitxor(self, rhs: Poly64) -> Poly64 {
        Poly64(self.0 ^ rhs.0)
    }
}

impl std::ops::BitXor for Poly128 {
    type Output = Poly128;
    fn bitxor(self, rhs: Poly128) -> Poly128 {
        Poly128 { hi: self.hi ^ rhs.hi, lo: self.lo ^ rhs.lo }
    }
}
