use std::fmt::Write as _;

use super::clmul::clmul_u128;
use super::poly::{divide_power_of_t, Modulus, ParseModulusError};
use super::{Poly128, Poly64};

/// Fold offsets used by [`FingerprintContext::fingerprint`]: a 128-bit
/// accumulator `H*t^64 + L` is shifted past the next block as
/// `H*(t^192 mod P) + L*(t^128 mod P)`.
pub const DEFAULT_FOLD_OFFSETS: [u32; 2] = [128, 192];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FingerprintError {
    #[error("polynomial {0} is reducible over GF(2)")]
    Reducible(Modulus),
    #[error("fold offset {0} is required for block folding")]
    MissingFoldOffset(u32),
    #[error("context record line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("context record disagrees with recomputed value of {0}")]
    RecordMismatch(String),
    #[error(transparent)]
    Modulus(#[from] ParseModulusError),
}

/// 64-bit Rabin fingerprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fingerprint(pub u64);

/// Everything precomputed from the fingerprint polynomial `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintContext {
    p: Modulus,
    /// Low 64 bits of `floor(t^128 / P)`; the `t^64` term is implicit.
    m_const: Poly64,
    fold: Vec<(u32, Poly64)>,
    fold128: u64,
    fold192: u64,
    mask: u64,
}

/// Checks `p` and derives the Barrett constant and `t^T mod p` for each
/// requested offset. 128 and 192 are always included.
pub fn precompute_context(
    p: Modulus,
    fold_offsets: &[u32],
) -> Result<FingerprintContext, FingerprintError> {
    if !p.is_irreducible() {
        return Err(FingerprintError::Reducible(p));
    }
    let (quotient, _) = divide_power_of_t(128, p);
    debug_assert_eq!(quotient >> 64, 1);
    let mut offsets: Vec<u32> = fold_offsets.iter().copied().chain(DEFAULT_FOLD_OFFSETS).collect();
    offsets.sort_unstable();
    offsets.dedup();
    let fold: Vec<(u32, Poly64)> =
        offsets.iter().map(|&t| (t, Poly64(divide_power_of_t(t, p).1))).collect();
    let lookup = |t: u32| fold.iter().find(|&&(o, _)| o == t).map(|&(_, c)| c.0);
    Ok(FingerprintContext {
        p,
        m_const: Poly64(quotient as u64),
        fold128: lookup(128).ok_or(FingerprintError::MissingFoldOffset(128))?,
        fold192: lookup(192).ok_or(FingerprintError::MissingFoldOffset(192))?,
        fold,
        mask: u64::MAX,
    })
}

impl FingerprintContext {
    pub fn new(p: Modulus) -> Result<Self, FingerprintError> {
        precompute_context(p, &DEFAULT_FOLD_OFFSETS)
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn m_const(&self) -> Poly64 {
        self.m_const
    }

    /// `(T, t^T mod P)` pairs, ascending in `T`.
    pub fn fold_constants(&self) -> &[(u32, Poly64)] {
        &self.fold
    }

    pub fn fold_constant(&self, offset: u32) -> Option<Poly64> {
        self.fold.iter().find(|&&(t, _)| t == offset).map(|&(_, c)| c)
    }

    /// Significant fingerprint bits (64 unless narrowed).
    pub fn fingerprint_bits(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Testing hook: a copy whose fingerprints keep only the low `bits`
    /// bits, so distinct inputs collide often. Not a Rabin fingerprint
    /// anymore for `bits < 64`.
    pub fn narrowed(&self, bits: u32) -> Self {
        let mask = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
        FingerprintContext { mask, ..self.clone() }
    }

    /// `A mod P` for a 128-bit `A`:
    ///
    /// ```text
    /// T1pre = floor(A / t^64)
    /// T1    = T1pre * M
    /// T2pre = floor(T1 / t^64)
    /// T2    = T2pre * P
    /// A mod P = A + T2   (low 64 bits)
    /// ```
    ///
    /// `M` and `P` both have an implicit `t^64` term, so each product is a
    /// carry-less multiply by the stored low half plus a 64-bit shift.
    #[inline]
    pub fn barrett_reduce(&self, a: Poly128) -> Poly64 {
        let t1pre = a.hi;
        let t1 = clmul_u128(t1pre, self.m_const.0) ^ ((t1pre as u128) << 64);
        let t2pre = (t1 >> 64) as u64;
        let t2 = clmul_u128(t2pre, self.p.low()) ^ ((t2pre as u128) << 64);
        let r = u128::from(a) ^ t2;
        debug_assert_eq!(r >> 64, 0);
        Poly64(r as u64)
    }

    /// Fingerprint of `data` read most significant bit first.
    ///
    /// The input is split into 128-bit blocks from the end; the first block
    /// is zero-padded at its high end. Each later block is absorbed by
    /// folding the accumulator forward 128 bits, and the final 128-bit
    /// accumulator is Barrett-reduced.
    pub fn fingerprint(&self, data: &[u8]) -> Fingerprint {
        let head = match data.len() % 16 {
            0 if !data.is_empty() => 16,
            n => n,
        };
        let (first, rest) = data.split_at(head);
        let mut acc = first.iter().fold(0u128, |acc, &b| (acc << 8) | b as u128);
        for block in rest.chunks_exact(16) {
            let next = u128::from_be_bytes(block.try_into().expect("16-byte block"));
            let hi = (acc >> 64) as u64;
            let lo = acc as u64;
            acc = clmul_u128(hi, self.fold192) ^ clmul_u128(lo, self.fold128) ^ next;
        }
        Fingerprint(self.barrett_reduce(Poly128::from(acc)).0 & self.mask)
    }

    /// Hex text form: `poly`, `m`, then one `fold <T>` line per constant.
    pub fn to_hex_record(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "poly {:#018x}", self.p.low());
        let _ = writeln!(s, "m {:#018x}", self.m_const.0);
        for &(t, c) in &self.fold {
            let _ = writeln!(s, "fold {t} {:#018x}", c.0);
        }
        s
    }

    /// Reads a record written by [`Self::to_hex_record`] and checks every
    /// stored constant against a fresh precomputation.
    pub fn from_hex_record(text: &str) -> Result<Self, FingerprintError> {
        let mut poly = None;
        let mut m = None;
        let mut folds = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            let bad = |message: &str| FingerprintError::Record { line, message: message.to_string() };
            let hex = |tok: &str| {
                u64::from_str_radix(tok.trim_start_matches("0x"), 16).map_err(|_| bad("bad hex value"))
            };
            match toks.as_slice() {
                [] => {}
                ["poly", v] => poly = Some(v.parse::<Modulus>()?),
                ["m", v] => m = Some(hex(v)?),
                ["fold", t, v] => {
                    let t = t.parse::<u32>().map_err(|_| bad("bad fold offset"))?;
                    folds.push((t, hex(v)?));
                }
                _ => return Err(bad("unrecognised line")),
            }
        }
        let poly = poly.ok_or(FingerprintError::Record { line: 0, message: "missing poly line".into() })?;
        let offsets: Vec<u32> = folds.iter().map(|&(t, _)| t).collect();
        let ctx = precompute_context(poly, &offsets)?;
        if let Some(m) = m {
            if m != ctx.m_const.0 {
                return Err(FingerprintError::RecordMismatch("m".into()));
            }
        }
        for (t, v) in folds {
            if ctx.fold_constant(t) != Some(Poly64(v)) {
                return Err(FingerprintError::RecordMismatch(format!("fold {t}")));
            }
        }
        Ok(ctx)
    }
}

impl Default for FingerprintContext {
    fn default() -> Self {
        FingerprintContext::new(Modulus::default()).expect("default modulus is irreducible")
    }
}

/// Upper bound `n^2 * m / 2^k` on the probability that `n` distinct
/// `m`-bit strings contain a colliding pair of `k`-bit fingerprints. May
/// exceed 1.
pub fn collision_bound(n_strings: u64, m_bits: u64, k_bits: u32) -> f64 {
    let n = n_strings as f64;
    n * n * m_bits as f64 / 2f64.powi(k_bits as i32)
}
