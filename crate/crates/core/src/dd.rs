//! Double-double arithmetic, just enough for phase reduction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact integer up to 2^106.
    pub fn from_u128(n: u128) -> Self {
        if n < (1u128 << 53) {
            return Dd::from_f64(n as u64 as f64);
        }
        if n < (1u128 << 64) {
            let n = n as u64;
            let hi = (n >> 32) as f64 * 4294967296.0;
            let lo = (n & 0xffff_ffff) as f64;
            let (h, l) = quick_two_sum(hi, lo);
            return Dd { hi: h, lo: l };
        }
        let hi = n as f64;
        // `hi` may round up past n, so take the signed remainder.
        let rem = n as i128 - hi as u128 as i128;
        let (h, l) = quick_two_sum(hi, rem as f64);
        Dd { hi: h, lo: l }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() || hi == 0.0 {
            return Dd::from_f64(hi);
        }
        let rest = r - rational_from_f64(hi);
        let lo = rest.to_f64().unwrap_or(0.0);
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn recip(self) -> Self {
        Dd::from_f64(1.0).div(self)
    }

    pub fn div(self, b: Dd) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::from_f64(q3)
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (h, l) = quick_two_sum(p, e + self.lo * b);
        Dd { hi: h, lo: l }
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(self) -> Self {
        let f = self.hi.floor();
        let mut r = self - Dd::from_f64(f);
        // hi may be integral while lo is negative
        if r.hi < 0.0 || (r.hi == 0.0 && r.lo < 0.0) {
            r = r + Dd::from_f64(1.0);
        }
        if r.hi > 1.0 || (r.hi == 1.0 && r.lo >= 0.0) {
            r = r - Dd::from_f64(1.0);
        }
        r
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn centered_frac(self) -> Self {
        let r = self.frac();
        if r.hi > 0.5 || (r.hi == 0.5 && r.lo >= 0.0) {
            r - Dd::from_f64(1.0)
        } else {
            r
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (h, l) = quick_two_sum(s, e + f);
        Dd { hi: h, lo: l }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (h, l) = quick_two_sum(p, e);
        Dd { hi: h, lo: l }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, b: f64) -> Dd {
        self.mul_f64(b)
    }
}

pub fn rational_from_f64(x: f64) -> BigRational {
    if x == 0.0 {
        return BigRational::zero();
    }
    let (mant, exp, sign) = num_traits::float::FloatCore::integer_decode(x);
    let m = BigInt::from(mant) * BigInt::from(sign);
    if exp >= 0 {
        BigRational::from_integer(m << exp as usize)
    } else {
        BigRational::new(m, BigInt::from(1) << (-exp) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_handles_negative_low_word() {
        let x = Dd::new(3.0, -1e-20);
        let f = x.frac();
        let gap = Dd::from_f64(1.0) - f;
        assert!(gap.hi > 0.0 && gap.hi < 1e-19);
    }

    #[test]
    fn big_integers_are_exact() {
        let n: u128 = (1u128 << 80) + 12345;
        let d = Dd::from_u128(n);
        assert_eq!(d.hi as u128 as i128 + d.lo as i128, n as i128);
    }

    #[test]
    fn rational_roundtrip_carries_low_word() {
        let third = BigRational::new(1.into(), 3.into());
        let d = Dd::from_rational(&third);
        let back = d * 3.0;
        assert!((back.hi - 1.0).abs() < 1e-30 || (back.to_f64() - 1.0).abs() < 1e-30);
        assert!(((back - Dd::from_f64(1.0)).to_f64()).abs() < 1e-30);
    }
}
