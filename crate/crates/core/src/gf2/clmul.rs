use std::sync::OnceLock;

use super::{Poly128, Poly64};

/// Which carry-less multiplier to use. Both produce identical products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClmulBackend {
    Software,
    /// `PCLMULQDQ` on x86-64; unavailable elsewhere.
    Hardware,
}

impl ClmulBackend {
    /// The hardware backend if the running CPU supports it.
    pub fn detect() -> Self {
        if hardware_clmul_available() {
            ClmulBackend::Hardware
        } else {
            ClmulBackend::Software
        }
    }

    /// Multiplies with this backend, or `None` if it cannot run here.
    pub fn multiply(self, a: Poly64, b: Poly64) -> Option<Poly128> {
        match self {
            ClmulBackend::Software => Some(Poly128::from(clmul_soft(a.0, b.0))),
            ClmulBackend::Hardware => {
                if hardware_clmul_available() {
                    Some(Poly128::from(clmul_hw(a.0, b.0)))
                } else {
                    None
                }
            }
        }
    }
}

pub fn hardware_clmul_available() -> bool {
    static HW: OnceLock<bool> = OnceLock::new();
    *HW.get_or_init(|| {
        #[cfg(target_arch = "x86_64")]
        {
            std::arch::is_x86_feature_detected!("pclmulqdq")
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            false
        }
    })
}

/// Product in GF(2)\[t\] of two polynomials of degree < 64.
#[inline]
pub fn clmul(a: Poly64, b: Poly64) -> Poly128 {
    Poly128::from(clmul_u128(a.0, b.0))
}

#[inline]
pub(crate) fn clmul_u128(a: u64, b: u64) -> u128 {
    if hardware_clmul_available() {
        clmul_hw(a, b)
    } else {
        clmul_soft(a, b)
    }
}

#[inline]
pub(crate) fn clmul_soft(a: u64, mut b: u64) -> u128 {
    let a = a as u128;
    let mut r = 0u128;
    while b != 0 {
        r ^= a << b.trailing_zeros();
        b &= b - 1;
    }
    r
}

#[cfg(target_arch = "x86_64")]
#[inline]
fn clmul_hw(a: u64, b: u64) -> u128 {
    // SAFETY: only reached after `hardware_clmul_available` returned true.
    unsafe { pclmul(a, b) }
}

#[cfg(not(target_arch = "x86_64"))]
#[inline]
fn clmul_hw(a: u64, b: u64) -> u128 {
    clmul_soft(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn pclmul(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::{__m128i, _mm_clmulepi64_si128, _mm_set_epi64x, _mm_storeu_si128};
    let va = _mm_set_epi64x(0, a as i64);
    let vb = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128::<0x00>(va, vb);
    let mut out = [0u64; 2];
    _mm_storeu_si128(out.as_mut_ptr() as *mut __m128i, r);
    ((out[1] as u128) << 64) | out[0] as u128
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_products() {
        assert_eq!(clmul(Poly64(0xdead_beef), Poly64(1)), Poly128::new(0, 0xdead_beef));
        assert_eq!(clmul(Poly64(0b10), Poly64(0b10)), Poly128::new(0, 0b100));
        assert_eq!(clmul(Poly64(0b11), Poly64(0b11)), Poly128::new(0, 0b101));
        assert_eq!(clmul(Poly64(1 << 63), Poly64(1 << 63)), Poly128::new(1 << 62, 0));
        assert_eq!(clmul(Poly64(u64::MAX), Poly64(0)), Poly128::default());
    }

    #[test]
    fn software_and_hardware_agree() {
        use rand::{Rng, SeedableRng};
        if !hardware_clmul_available() {
            eprintln!("no hardware carry-less multiply on this CPU; comparing software only");
            return;
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let (a, b) = (Poly64(rng.gen()), Poly64(rng.gen()));
            assert_eq!(
                ClmulBackend::Software.multiply(a, b),
                ClmulBackend::Hardware.multiply(a, b),
                "{a:?} * {b:?}"
            );
        }
    }

    proptest! {
        #[test]
        fn commutative_and_bilinear(a: u64, b: u64, c: u64) {
            let (a, b, c) = (Poly64(a), Poly64(b), Poly64(c));
            prop_assert_eq!(clmul(a, b), clmul(b, a));
            prop_assert_eq!(clmul(a, b ^ c), clmul(a, b) ^ clmul(a, c));
            prop_assert_eq!(Poly128::from(clmul_soft(a.0, b.0)), clmul(a, b));
        }
    }
}
