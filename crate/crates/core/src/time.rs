//! Curve parameters: exact rationals, decimal literals and named constants.
//!
//! A point is stored either in the curve parameter `t` or in the rescaled
//! `x = 2πt`. Rational points `t_{p,q}` are naturally exact in `x`.

use crate::constants::{decimal_digits, inv_two_pi_dd, parse_decimal, pi_dd, pi_rational, NamedConstant};
use crate::dd::{rational_from_f64, Dd};
use crate::error::{Error, Result};
use crate::phase::Rate;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    /// curve parameter t
    T,
    /// rescaled parameter x = 2πt
    X,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TimeKind {
    Rational { p: BigInt, q: BigInt },
    Decimal { digits: usize },
    Named(NamedConstant),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimePoint {
    pub kind: TimeKind,
    pub var: Variable,
    value: BigRational,
}

impl TimePoint {
    pub fn rational(p: i64, q: i64, var: Variable) -> Result<Self> {
        if q <= 0 {
            return Err(Error::Argument(format!("denominator {} must be positive", q)));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::Argument(format!("{}/{} is not reduced", p, q)));
        }
        Ok(TimePoint {
            kind: TimeKind::Rational { p: p.into(), q: q.into() },
            var,
            value: BigRational::new(p.into(), q.into()),
        })
    }

    /// `t_{p,q} = (p/q)/(2π)`, i.e. `x = p/q`.
    pub fn t_pq(p: i64, q: i64) -> Result<Self> {
        TimePoint::rational(p, q, Variable::X)
    }

    pub fn decimal(literal: &str, var: Variable) -> Result<Self> {
        let value = parse_decimal(literal)
            .ok_or_else(|| Error::Argument(format!("not a decimal literal: {}", literal)))?;
        Ok(TimePoint { kind: TimeKind::Decimal { digits: decimal_digits(literal) }, var, value })
    }

    /// Exact binary value of a double; recorded as a 1074-digit-capable decimal.
    pub fn from_f64(v: f64, var: Variable) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::Argument("non-finite parameter".into()));
        }
        // every double is a terminating decimal with at most 1074 fractional digits
        Ok(TimePoint { kind: TimeKind::Decimal { digits: 1074 }, var, value: rational_from_f64(v) })
    }

    /// A value known to `digits` decimal places.
    pub fn with_precision(value: BigRational, digits: usize, var: Variable) -> Self {
        TimePoint { kind: TimeKind::Decimal { digits }, var, value }
    }

    pub fn t(v: f64) -> Result<Self> {
        TimePoint::from_f64(v, Variable::T)
    }

    pub fn x(v: f64) -> Result<Self> {
        TimePoint::from_f64(v, Variable::X)
    }

    pub fn named(c: NamedConstant, var: Variable) -> Self {
        TimePoint { kind: TimeKind::Named(c), var, value: c.value() }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    /// Stored digits for decimal kinds.
    pub fn digits(&self) -> Option<usize> {
        match self.kind {
            TimeKind::Decimal { digits } => Some(digits),
            TimeKind::Named(c) => Some(decimal_digits(c.literal())),
            TimeKind::Rational { .. } => None,
        }
    }

    /// `(p, q)` when the point is an exact rational in `x`, i.e. some `t_{p,q}`.
    pub fn as_t_pq(&self) -> Option<(i64, i64)> {
        if self.var != Variable::X {
            return if self.value.is_zero() { Some((0, 1)) } else { None };
        }
        let p = self.value.numer().to_i64()?;
        let q = self.value.denom().to_i64()?;
        if q > (1 << 40) {
            return None;
        }
        Some((p, q))
    }

    /// The rescaled parameter `x` as an exact rational when possible.
    pub fn x_exact(&self) -> Option<BigRational> {
        match self.var {
            Variable::X => Some(self.value.clone()),
            Variable::T if self.value.is_zero() => Some(BigRational::zero()),
            Variable::T => None,
        }
    }

    /// `x` with at least ~1e-30 relative precision.
    pub fn x_param(&self) -> XParam {
        match self.x_exact() {
            Some(x) => XParam::from_big(&x),
            None => {
                let two_pi = pi_rational() * BigRational::from_integer(2.into());
                XParam::from_dd(Dd::from_rational(&(&self.value * two_pi)))
            }
        }
    }

    pub fn x_f64(&self) -> f64 {
        self.x_param().to_f64()
    }

    pub fn t_f64(&self) -> f64 {
        self.x_param().t_dd().to_f64()
    }

    /// Representative with `x ∈ [0, 1)` and the number of whole periods removed.
    pub fn reduce_period(&self) -> (TimePoint, i64) {
        match self.x_exact() {
            Some(x) => {
                let n = x.numer().div_floor(x.denom());
                let r = &x - BigRational::from_integer(n.clone());
                let mut out = self.clone();
                out.var = Variable::X;
                out.value = r;
                if let TimeKind::Rational { .. } = out.kind {
                    out.kind = TimeKind::Rational { p: out.value.numer().clone(), q: out.value.denom().clone() };
                }
                (out, n.to_i64().unwrap_or(0))
            }
            None => {
                let two_pi = pi_rational() * BigRational::from_integer(2.into());
                let x = &self.value * &two_pi;
                let n = x.numer().div_floor(x.denom());
                let t = &self.value - BigRational::from_integer(n.clone()) / two_pi;
                let mut out = self.clone();
                out.value = t;
                (out, n.to_i64().unwrap_or(0))
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }
}

/// A real argument `base + offset`: an exact rational plus a double-double
/// correction. Used for `x = 2πt` and for the arguments of `φ_D` and `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct XParam {
    pub base: BigRational,
    pub offset: Dd,
}

impl XParam {
    pub fn from_big(x: &BigRational) -> Self {
        XParam { base: x.clone(), offset: Dd::ZERO }
    }

    pub fn rational(p: i64, q: u64) -> Self {
        XParam::from_big(&BigRational::new(p.into(), q.into()))
    }

    pub fn from_dd(x: Dd) -> Self {
        XParam { base: BigRational::zero(), offset: x }
    }

    pub fn from_f64(x: f64) -> Self {
        XParam::from_big(&rational_from_f64(x))
    }

    /// Shift by `h` in the curve parameter `t`, i.e. by `2πh` in `x`.
    pub fn shifted_t(&self, h: f64) -> Self {
        XParam { base: self.base.clone(), offset: self.offset + pi_dd() * (2.0 * h) }
    }

    pub fn shifted(&self, dx: Dd) -> Self {
        XParam { base: self.base.clone(), offset: self.offset + dx }
    }

    /// `(n/d) · self`
    pub fn scaled(&self, n: i64, d: i64) -> Self {
        XParam {
            base: &self.base * BigRational::new(n.into(), d.into()),
            offset: (self.offset * (n as f64)).div(Dd::from_f64(d as f64)),
        }
    }

    /// Fractional part as a phase rate.
    pub fn rate(&self) -> Rate {
        Rate::from_big(&self.base).with_offset(self.offset)
    }

    pub fn value(&self) -> Dd {
        Dd::from_rational(&self.base) + self.offset
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    /// `x / (2π)`
    pub fn t_dd(&self) -> Dd {
        self.value() * inv_two_pi_dd()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.offset == Dd::ZERO
    }
}

impl From<&TimePoint> for XParam {
    fn from(t: &TimePoint) -> Self {
        t.x_param()
    }
}
