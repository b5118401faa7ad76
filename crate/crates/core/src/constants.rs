//! Checked-in decimal literals for π and the named irrational test points.

use crate::dd::Dd;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::str::FromStr;
use std::sync::OnceLock;

const TABLE: &str = include_str!("../data/constants.txt");

/// Irrational parameters with a stored 200-digit literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedConstant {
    PiMinus3,
    Sqrt2Minus1,
    GoldenMinus1,
}

impl NamedConstant {
    pub const ALL: [NamedConstant; 3] = [
        NamedConstant::PiMinus3,
        NamedConstant::Sqrt2Minus1,
        NamedConstant::GoldenMinus1,
    ];

    pub fn key(self) -> &'static str {
        match self {
            NamedConstant::PiMinus3 => "pi-3",
            NamedConstant::Sqrt2Minus1 => "sqrt2-1",
            NamedConstant::GoldenMinus1 => "golden-1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        NamedConstant::ALL.into_iter().find(|c| c.key() == s)
    }

    pub fn literal(self) -> &'static str {
        lookup(self.key())
    }

    pub fn value(self) -> BigRational {
        parse_decimal(self.literal()).expect("table literal")
    }
}

fn lookup(key: &str) -> &'static str {
    TABLE
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_once(' '))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.trim())
        .expect("constant present in table")
}

/// Exact value of a plain decimal literal such as `-0.125` or `3.14159`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", ip, fp);
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let den = num_traits::pow(BigInt::from(10), fp.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Count of significant fractional digits in a decimal literal.
pub fn decimal_digits(s: &str) -> usize {
    s.split_once('.').map(|(_, f)| f.len()).unwrap_or(0)
}

pub fn pi_rational() -> &'static BigRational {
    static PI: OnceLock<BigRational> = OnceLock::new();
    PI.get_or_init(|| parse_decimal(lookup("pi")).expect("pi literal"))
}

pub fn pi_dd() -> Dd {
    static PI: OnceLock<Dd> = OnceLock::new();
    *PI.get_or_init(|| Dd::from_rational(pi_rational()))
}

/// 1/(2π) in double-double.
pub fn inv_two_pi_dd() -> Dd {
    static V: OnceLock<Dd> = OnceLock::new();
    *V.get_or_init(|| {
        let two_pi = pi_rational() * BigRational::from_integer(2.into());
        Dd::from_rational(&two_pi.recip())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn literals_match_float_constants() {
        assert_eq!(pi_dd().hi, std::f64::consts::PI);
        let g = NamedConstant::GoldenMinus1.value().to_f64().unwrap();
        assert!((g - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-16);
        let s = NamedConstant::Sqrt2Minus1.value().to_f64().unwrap();
        assert!((s - (2f64.sqrt() - 1.0)).abs() < 3e-16);
        assert_eq!(decimal_digits(NamedConstant::PiMinus3.literal()), 200);
    }

    #[test]
    fn golden_literal_satisfies_its_quadratic() {
        // g^2 + g - 1 = 0 to ~200 digits
        let g = NamedConstant::GoldenMinus1.value();
        let r = &g * &g + &g - BigRational::from_integer(1.into());
        let bound = BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 198));
        assert!(num_traits::Signed::abs(&r) < bound);
    }

    #[test]
    fn decimal_parser() {
        assert_eq!(parse_decimal("-0.25").unwrap(), BigRational::new((-1).into(), 4.into()));
        assert_eq!(parse_decimal("3").unwrap(), BigRational::from_integer(3.into()));
        assert!(parse_decimal("1e5").is_none());
        assert!(parse_decimal(".").is_none());
    }
}
