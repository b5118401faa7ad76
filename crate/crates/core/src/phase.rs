//! Quadratic phases `k² · u` reduced modulo 1 without losing the fractional part.
//!
//! A rate `u` (turns per unit `k²`) is held as an exact rational `num/den`
//! plus a double-double offset. The rational part is reduced with integer
//! arithmetic, so rational parameters stay exact at any `k`.

use crate::dd::Dd;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rate {
    num: u64,
    den: u64,
    off: Dd,
}

impl Rate {
    /// Exact rational rate `p/q` (any sign).
    pub fn rational(p: i64, q: u64) -> Self {
        assert!(q > 0, "zero denominator");
        let g = (p.unsigned_abs()).gcd(&q).max(1);
        let (p, q) = (p / g as i64, q / g);
        let num = (p as i128).rem_euclid(q as i128) as u64;
        Rate { num, den: q, off: Dd::ZERO }
    }

    pub fn from_dd(x: Dd) -> Self {
        Rate { num: 0, den: 1, off: x.frac() }
    }

    pub fn from_f64(x: f64) -> Self {
        Rate::from_dd(Dd::from_f64(x))
    }

    /// Exact when the reduced denominator fits in 63 bits, otherwise rounded to double-double.
    pub fn from_big(r: &BigRational) -> Self {
        let den = r.denom();
        if den.bits() <= 62 {
            let d = den.to_u64().unwrap();
            let n = r.numer().mod_floor(&BigInt::from(d)).to_u64().unwrap();
            return Rate { num: n, den: d, off: Dd::ZERO };
        }
        let ip = r.numer().div_floor(r.denom());
        let frac = r - BigRational::from_integer(ip);
        debug_assert!(!frac.is_negative());
        Rate::from_dd(Dd::from_rational(&frac))
    }

    pub fn with_offset(mut self, d: Dd) -> Self {
        self.off = (self.off + d).centered_frac();
        self
    }

    pub fn is_exact(&self) -> bool {
        self.off == Dd::ZERO
    }

    /// Rational part as (numerator in [0, den), den).
    pub fn rational_part(&self) -> (u64, u64) {
        (self.num, self.den)
    }

    pub fn offset(&self) -> Dd {
        self.off
    }

    pub fn neg(self) -> Self {
        Rate {
            num: (self.den - self.num) % self.den,
            den: self.den,
            off: -self.off,
        }
    }

    /// Integer multiple `m · u`.
    pub fn scale(self, m: i64) -> Self {
        let num = ((self.num as i128 * m as i128).rem_euclid(self.den as i128)) as u64;
        Rate { num, den: self.den, off: (self.off * (m as f64)).centered_frac() }
    }

    /// `frac(n · u)` as a centered value in `[-1/2, 1/2)`.
    pub fn turns(&self, n: u128) -> Dd {
        let mut acc = Dd::ZERO;
        if self.num != 0 {
            let a = ((n % self.den as u128) * self.num as u128) % self.den as u128;
            // 64-bit fixed point fraction, truncation error below 2^-64
            let f = (a << 64) / self.den as u128;
            let hi = (f >> 11) as f64 * f64::powi(2.0, -53);
            let lo = (f & 0x7ff) as f64 * f64::powi(2.0, -64);
            acc = Dd::new(hi, 0.0) + Dd::from_f64(lo);
        }
        if self.off != Dd::ZERO {
            acc = acc + (Dd::from_u128(n) * self.off).frac();
        }
        acc.centered_frac()
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64 + self.off.to_f64()
    }
}

/// Unit complex `e^{2πi·turns}`.
#[inline]
pub fn cis_turns(t: Dd) -> (f64, f64) {
    let a = std::f64::consts::TAU * t.hi + std::f64::consts::TAU * t.lo;
    let (s, c) = a.sin_cos();
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_reduction_at_huge_multiples() {
        let u = Rate::rational(1, 3);
        // (3m+1)^2 ≡ 1 mod 3
        let k: u128 = 3 * 123_456_789 + 1;
        let t = u.turns(k * k);
        assert!((t.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn offset_reduction_keeps_precision() {
        // u = 1e-12: k^2 u for k = 1e7 is exactly 100 turns -> 0
        let u = Rate::from_dd(Dd::from_f64(1.0) .div(Dd::from_f64(1e12)));
        let k: u128 = 10_000_000;
        assert!(u.turns(k * k).to_f64().abs() < 1e-14);
    }

    #[test]
    fn negation_and_scaling() {
        let u = Rate::rational(2, 7);
        assert_eq!(u.neg().rational_part(), (5, 7));
        assert_eq!(u.scale(4).rational_part(), (1, 7));
        assert_eq!(Rate::rational(-3, 6).rational_part(), (1, 2));
    }
}
