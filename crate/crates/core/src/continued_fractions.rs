//! Continued fractions, convergents and their error coefficients `K_n = q_n² |ρ − p_n/q_n|`.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::time::{TimeKind, TimePoint};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub a0: BigInt,
    pub partial_quotients: Vec<BigInt>,
    /// the expansion ended because the input is rational
    pub complete: bool,
}

/// Sign of `ρ − p/q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Approach {
    /// `p/q < ρ`
    Left,
    /// `p/q > ρ`
    Right,
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub k: f64,
    pub side: Approach,
    pub q_odd: bool,
}

impl Convergent {
    pub fn to_f64(&self) -> f64 {
        Dd::from_rational(&BigRational::new(self.p.clone(), self.q.clone())).to_f64()
    }

    pub fn pq_i64(&self) -> Option<(i64, i64)> {
        Some((self.p.to_i64()?, self.q.to_i64()?))
    }
}

fn step(x: &BigRational) -> (BigInt, Option<BigRational>) {
    let a = x.numer().div_floor(x.denom());
    let r = x - BigRational::from_integer(a.clone());
    if r.is_zero() {
        (a, None)
    } else {
        (a, Some(r.recip()))
    }
}

/// First `n_terms` partial quotients of the number stored in `x`.
///
/// Decimal inputs with `d` digits are expanded together with their `±10^{-d}`
/// neighbours; a quotient is emitted only when all three agree.
pub fn cf_expand(x: &TimePoint, n_terms: usize) -> Result<CfExpansion> {
    let v = x.value().clone();
    if v.is_negative() || v > BigRational::one() {
        return Err(Error::Argument("continued fractions need a value in [0, 1]".into()));
    }
    let ulp = match (&x.kind, x.digits()) {
        (TimeKind::Rational { .. }, _) | (_, None) => None,
        (_, Some(d)) => Some(BigRational::new(BigInt::one(), BigInt::from(10u32).pow(d as u32))),
    };
    match ulp {
        None => Ok(expand_exact(&v, n_terms)),
        Some(u) => expand_certified(&v, &u, n_terms),
    }
}

fn expand_exact(v: &BigRational, n_terms: usize) -> CfExpansion {
    let (a0, mut rest) = step(v);
    let mut out = Vec::new();
    while out.len() < n_terms {
        let Some(r) = rest else { break };
        let (a, next) = step(&r);
        out.push(a);
        rest = next;
    }
    CfExpansion { a0, partial_quotients: out, complete: rest.is_none() }
}

fn expand_certified(v: &BigRational, ulp: &BigRational, n_terms: usize) -> Result<CfExpansion> {
    let mut xs = [v - ulp, v.clone(), v + ulp];
    let mut quot = Vec::new();
    let mut a0 = None;
    while quot.len() < n_terms {
        let steps: Vec<_> = xs.iter().map(step).collect();
        let a = &steps[1].0;
        if steps.iter().any(|(b, _)| b != a) {
            return Err(Error::PrecisionExhausted(format!(
                "only {} partial quotients are certified by the input digits",
                quot.len()
            )));
        }
        if a0.is_none() {
            a0 = Some(a.clone());
        } else {
            quot.push(a.clone());
        }
        match steps.iter().map(|(_, r)| r.clone()).collect::<Option<Vec<_>>>() {
            Some(r) => xs = [r[0].clone(), r[1].clone(), r[2].clone()],
            None => {
                if steps[1].1.is_none() && steps.iter().all(|(_, r)| r.is_none()) {
                    return Ok(CfExpansion { a0: a0.unwrap(), partial_quotients: quot, complete: true });
                }
                return Err(Error::PrecisionExhausted("expansion terminates inside the input uncertainty".into()));
            }
        }
    }
    Ok(CfExpansion { a0: a0.unwrap_or_default(), partial_quotients: quot, complete: false })
}

/// The longest certified expansion with at most `n_max` quotients.
pub fn cf_expand_prefix(x: &TimePoint, n_max: usize) -> Result<CfExpansion> {
    match cf_expand(x, n_max) {
        Err(Error::PrecisionExhausted(_)) => {
            let (mut lo, mut hi) = (0, n_max);
            // cf_expand(x, lo) succeeds, cf_expand(x, hi) does not
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if cf_expand(x, mid).is_ok() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cf_expand(x, lo)
        }
        r => r,
    }
}

/// Convergents `p_n/q_n` with `K_n` and approach side, `n = 0..`.
pub fn convergents(cf: &CfExpansion, x: &TimePoint) -> Vec<Convergent> {
    let rho = x.value();
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (cf.a0.clone(), BigInt::one());
    let mut out = vec![make(rho, &p1, &q1)];
    for a in &cf.partial_quotients {
        let p2 = a * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        out.push(make(rho, &p2, &q2));
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    out
}

fn make(rho: &BigRational, p: &BigInt, q: &BigInt) -> Convergent {
    let diff = rho - BigRational::new(p.clone(), q.clone());
    let side = if diff.is_zero() {
        Approach::Exact
    } else if diff.is_positive() {
        Approach::Left
    } else {
        Approach::Right
    };
    let k = Dd::from_rational(&(diff.abs() * BigRational::from_integer(q * q))).to_f64();
    Convergent { p: p.clone(), q: q.clone(), k, side, q_odd: q.is_odd() }
}

pub fn odd_denominator_subsequence(convs: &[Convergent]) -> Vec<Convergent> {
    convs.iter().filter(|c| c.q_odd).cloned().collect()
}

pub fn side_filtered(convs: &[Convergent], side: Approach) -> Vec<Convergent> {
    convs.iter().filter(|c| c.side == side).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::NamedConstant;
    use crate::time::Variable;
    use proptest::prelude::*;

    fn named(c: NamedConstant) -> TimePoint {
        TimePoint::named(c, Variable::X)
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|a| a.to_i64().unwrap()).collect()
    }

    // plain Euclid on machine integers
    fn euclid(mut p: i64, mut q: i64) -> Vec<i64> {
        let mut out = vec![];
        while q != 0 {
            out.push(p.div_euclid(q));
            let r = p.rem_euclid(q);
            p = q;
            q = r;
        }
        out
    }

    #[test]
    fn three_sevenths() {
        let cf = cf_expand(&TimePoint::t_pq(3, 7).unwrap(), 10).unwrap();
        assert_eq!(cf.a0, BigInt::zero());
        assert_eq!(ints(&cf.partial_quotients), vec![2, 3]);
        assert!(cf.complete);
    }

    #[test]
    fn pi_minus_three() {
        let x = named(NamedConstant::PiMinus3);
        let cf = cf_expand(&x, 8).unwrap();
        assert_eq!(ints(&cf.partial_quotients), vec![7, 15, 1, 292, 1, 1, 1, 2]);
        let cv = convergents(&cf, &x);
        let pq: Vec<_> = cv.iter().map(|c| c.pq_i64().unwrap()).collect();
        assert!(pq[..4].contains(&(1, 7)) && pq[..4].contains(&(16, 113)));
        // 49·(22/7 − π)
        assert!((cv[1].k - 0.061_959_974_100_131_3).abs() < 1e-12, "{}", cv[1].k);
        assert_eq!(cv[1].side, Approach::Right);
        assert_eq!(cv[2].pq_i64(), Some((15, 106)));
        assert_eq!(side_filtered(&cv, Approach::Left)[1].pq_i64(), Some((15, 106)));
    }

    #[test]
    fn golden_all_ones() {
        let x = named(NamedConstant::GoldenMinus1);
        let cf = cf_expand(&x, 60).unwrap();
        assert!(cf.partial_quotients.iter().all(|a| a.is_one()));
        let cv = convergents(&cf, &x);
        let (mut f0, mut f1) = (0i64, 1i64);
        for c in cv.iter().take(40) {
            assert_eq!(c.pq_i64(), Some((f0, f1)));
            (f0, f1) = (f1, f0 + f1);
        }
        assert!((cv[15].k - 1.0 / 5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn precision_is_certified() {
        let x = TimePoint::decimal("0.1415926535", Variable::X).unwrap();
        assert!(matches!(cf_expand(&x, 40), Err(Error::PrecisionExhausted(_))));
        let got = cf_expand(&x, 3).unwrap();
        assert_eq!(ints(&got.partial_quotients), vec![7, 15, 1]);
        // 200 digits certify roughly 190 quotients of π−3, not 400
        assert!(cf_expand(&named(NamedConstant::PiMinus3), 400).is_err());
        assert!(cf_expand(&named(NamedConstant::Sqrt2Minus1), 150).unwrap().partial_quotients.iter().all(|a| *a == BigInt::from(2)));
    }

    #[test]
    fn out_of_range() {
        assert!(cf_expand(&TimePoint::t_pq(3, 2).unwrap(), 3).is_err());
        assert!(cf_expand(&TimePoint::t_pq(-1, 2).unwrap(), 3).is_err());
    }

    #[test]
    fn parity_filter() {
        let x = named(NamedConstant::GoldenMinus1);
        let cv = convergents(&cf_expand(&x, 5).unwrap(), &x);
        let qs: Vec<i64> = cv.iter().map(|c| c.q.to_i64().unwrap()).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8]);
        let odd: Vec<i64> = odd_denominator_subsequence(&cv).iter().map(|c| c.q.to_i64().unwrap()).collect();
        assert_eq!(odd, vec![1, 1, 3, 5]);
        assert!(odd_denominator_subsequence(&[]).is_empty());
    }

    #[test]
    fn three_consecutive_contain_odd_q() {
        // consecutive q are coprime, so two evens never neighbour; enumerate small patterns
        for q0 in 1i64..30 {
            for q1 in 1i64..30 {
                if num_integer::gcd(q0, q1) != 1 {
                    continue;
                }
                for a in 1..6 {
                    let q2 = a * q1 + q0;
                    assert!(q0 % 2 == 1 || q1 % 2 == 1 || q2 % 2 == 1);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rational_matches_euclid(p in 0i64..10_000, q in 1i64..10_000) {
            prop_assume!(p <= q && num_integer::gcd(p, q) == 1);
            let cf = cf_expand(&TimePoint::t_pq(p, q).unwrap(), 100).unwrap();
            let e = euclid(p, q);
            prop_assert_eq!(cf.a0.to_i64().unwrap(), e[0]);
            prop_assert_eq!(ints(&cf.partial_quotients), e[1..].to_vec());
        }

        #[test]
        fn convergent_invariants(d in proptest::collection::vec(0u8..10, 60)) {
            let lit: String = std::iter::once("0.".to_string()).chain(d.iter().map(|c| c.to_string())).collect::<String>() + "7";
            let x = TimePoint::decimal(&lit, Variable::X).unwrap();
            let cf = match cf_expand(&x, 20) { Ok(c) => c, Err(_) => cf_expand(&x, 5).unwrap_or(CfExpansion { a0: BigInt::zero(), partial_quotients: vec![], complete: false }) };
            let cv = convergents(&cf, &x);
            for w in cv.windows(3) {
                prop_assert!(w[0].q_odd || w[1].q_odd || w[2].q_odd);
            }
            for (i, c) in cv.iter().enumerate() {
                prop_assert!(c.p.gcd(&c.q).is_one());
                if c.side != Approach::Exact {
                    prop_assert!(c.k > 0.0 && c.k < 1.0);
                }
                if i + 2 < cv.len() {
                    let a = &cf.partial_quotients[i + 1];
                    prop_assert_eq!(&cv[i + 2].q, &(a * &cv[i + 1].q + &c.q));
                    prop_assert_eq!(&cv[i + 2].p, &(a * &cv[i + 1].p + &c.p));
                }
                if i > 0 && c.side != Approach::Exact && cv[i - 1].side != Approach::Exact {
                    prop_assert_ne!(c.side, cv[i - 1].side);
                }
            }
        }
    }
}
