//! Direct evaluation of `R`, `φ_D`, `φ`, `Y` and `Z` with certified tails.
//!
//! Every series here has terms bounded by `C/k²`, so truncating after `N`
//! terms leaves at most `C/N`. Phases are reduced exactly (see [`crate::phase`]).

use crate::constants::pi_dd;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::kernel::weighted_sum;
use crate::phase::Rate;
use crate::time::{TimePoint, XParam};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    /// absolute error target
    pub tol: f64,
    pub max_terms: u64,
    /// working precision of the phase reduction, in decimal digits
    pub precision_digits: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { tol: 1e-8, max_terms: 4_000_000_000, precision_digits: 30 }
    }
}

impl EvalConfig {
    pub fn new(tol: f64, max_terms: u64, precision_digits: u32) -> Result<Self> {
        let c = EvalConfig { tol, max_terms, precision_digits };
        c.validate()?;
        Ok(c)
    }

    pub fn with_tol(tol: f64) -> Self {
        EvalConfig { tol, ..EvalConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Argument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_terms < 1 {
            return Err(Error::Argument("max_terms must be at least 1".into()));
        }
        if self.precision_digits < 16 {
            return Err(Error::Argument("precision_digits must be at least 16".into()));
        }
        // double-double phases carry about 31 digits
        if self.precision_digits > 31 {
            return Err(Error::Argument(format!(
                "precision_digits {} exceeds the 31 digits of the phase arithmetic",
                self.precision_digits
            )));
        }
        Ok(())
    }
}

/// Value with its certified absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub err_bound: f64,
    pub terms: u64,
}

// accumulated rounding of the lane recurrences, relative to Σ 1/k²
const ROUNDING: f64 = 1e-12;

/// Smallest `N` with `tail_const / N ≤ tol`.
fn terms_for(tail_const: f64, tol: f64, max_terms: u64) -> Result<u64> {
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tol must be positive, got {}", tol)));
    }
    let x = tail_const / tol;
    // absorb the rounding of tol itself so that tol = C exactly gives N = 1
    let n = (x * (1.0 - 4.0 * f64::EPSILON)).ceil().max(1.0);
    if !n.is_finite() || n > max_terms as f64 {
        return Err(Error::Capacity { needed: if n.is_finite() { n as u64 } else { u64::MAX }, cap: max_terms });
    }
    Ok(n as u64)
}

/// `N = ⌈1/(π² tol)⌉`, the length that certifies `φ` to `tol`.
pub fn truncation_length(tol: f64, cfg: &EvalConfig) -> Result<u64> {
    terms_for(1.0 / (PI * PI), tol, cfg.max_terms)
}

/// `Σ_{k=1}^{n} e^{2πi u k²}/k²`.
pub fn quadratic_sum(u: &Rate, n: u64) -> Complex64 {
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    weighted_sum(u, 1, 1, n)
}

/// `φ` at `x = 2πt` from exactly `n` positive frequencies (no tail).
pub fn phi_partial(x: &XParam, n: u64) -> Complex64 {
    let s = quadratic_sum(&x.rate().neg(), n);
    let t = x.t_dd().to_f64();
    // it + 1/12 - (1/2π²) Σ_{k≤n} e^{-2πi k² x}/k², with 1/12 = (1/2π²)·π²/6
    Complex64::new(1.0 / 12.0, t) - s / (2.0 * PI * PI)
}

pub fn eval_phi_x(x: &XParam, cfg: &EvalConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let n = truncation_length(cfg.tol, cfg)?;
    let value = phi_partial(x, n);
    // |Σ_{k>n} e^{..}/(2π²k²)| < 1/(2π²n)
    Ok(Evaluation { value, err_bound: 1.0 / (2.0 * PI * PI * n as f64) + ROUNDING, terms: n })
}

/// `φ(t) = Σ_k (e^{-4π²ik²t} - 1)/(-4π²k²)`, the `k = 0` term taken as `i·t`.
pub fn eval_phi(t: &TimePoint, cfg: &EvalConfig) -> Result<Complex64> {
    Ok(eval_phi_x(&t.x_param(), cfg)?.value)
}

/// `φ_D(y) = Σ_{n≥1} e^{iπn²y}/(iπn²)` for a real argument `y`.
pub fn eval_phi_d_arg(y: &XParam, cfg: &EvalConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let n = terms_for(1.0 / PI, cfg.tol, cfg.max_terms)?;
    let s = quadratic_sum(&y.scaled(1, 2).rate(), n);
    Ok(Evaluation { value: s * Complex64::new(0.0, -1.0 / PI), err_bound: 1.0 / (PI * n as f64) + ROUNDING, terms: n })
}

/// `φ_D` at the real number held by `x` (its `x`-value, whatever the variable).
pub fn eval_phi_d(x: &TimePoint, cfg: &EvalConfig) -> Result<Complex64> {
    let y = match x.x_exact() {
        Some(v) if x.var == crate::time::Variable::X => XParam::from_big(&v),
        _ => XParam::from_big(x.value()),
    };
    Ok(eval_phi_d_arg(&y, cfg)?.value)
}

/// `R(y) = Σ sin(n²y)/n²`.
pub fn eval_r(y: f64, cfg: &EvalConfig) -> Result<f64> {
    let arg = Dd::from_f64(y) * crate::constants::inv_two_pi_dd();
    Ok(eval_r_turns(&XParam::from_dd(arg), cfg)?.value.re)
}

/// `R(π z)` with `z` exact or double-double; phases `n² z/2` turns.
pub fn eval_r_pi(z: &XParam, cfg: &EvalConfig) -> Result<f64> {
    Ok(eval_r_turns(&z.scaled(1, 2), cfg)?.value.re)
}

fn eval_r_turns(u: &XParam, cfg: &EvalConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let n = terms_for(1.0, cfg.tol, cfg.max_terms)?;
    let s = quadratic_sum(&u.rate(), n);
    Ok(Evaluation { value: Complex64::new(s.im, 0.0), err_bound: 1.0 / n as f64 + ROUNDING, terms: n })
}

/// Turns per `k²` for the phase `k²/(d·h)`: `1/(2π d h)`.
fn inverse_rate(d: f64, h: f64) -> Rate {
    let denom = pi_dd() * (2.0 * d * h);
    Rate::from_dd(denom.recip())
}

/// `Y(h) = Σ_{k≥1} e^{ik²/(4h)}/k²`.
pub fn eval_y(h: f64, cfg: &EvalConfig) -> Result<Complex64> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::Domain("Y is undefined at h = 0".into()));
    }
    y_from_rate(&inverse_rate(4.0, h), cfg)
}

/// `Σ_{k≥1} e^{2πi u k²}/k²` to `cfg.tol`; `Y` with its phase given in turns.
pub fn y_from_rate(u: &Rate, cfg: &EvalConfig) -> Result<Complex64> {
    cfg.validate()?;
    let n = terms_for(1.0, cfg.tol, cfg.max_terms)?;
    Ok(quadratic_sum(u, n))
}

/// `Σ_{k odd} e^{2πi u k²}/k²` to `cfg.tol`.
pub fn odd_sum_from_rate(u: &Rate, cfg: &EvalConfig) -> Result<Complex64> {
    cfg.validate()?;
    let m = terms_for(0.5, cfg.tol, cfg.max_terms)?;
    Ok(weighted_sum(u, 1, 2, m))
}

/// `Z(h) = Σ_{k odd} e^{-ik²/(16h)}/k²`.
pub fn eval_z(h: f64, cfg: &EvalConfig) -> Result<Complex64> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::Domain("Z is undefined at h = 0".into()));
    }
    // Σ_{odd k > 2m} 1/k² ≤ 1/(2m) ≤ tol
    odd_sum_from_rate(&inverse_rate(16.0, h).neg(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Variable;

    #[test]
    fn truncation_lengths() {
        let cfg = EvalConfig::default();
        assert_eq!(truncation_length(1.0 / (PI * PI), &cfg).unwrap(), 1);
        assert_eq!(truncation_length(1e-6, &cfg).unwrap(), 101_322);
        assert!(truncation_length(0.0, &cfg).is_err());
        let tiny = EvalConfig { max_terms: 10, ..cfg };
        assert!(matches!(truncation_length(1e-6, &tiny), Err(Error::Capacity { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(EvalConfig::new(0.0, 10, 20).is_err());
        assert!(EvalConfig::new(1e-3, 0, 20).is_err());
        assert!(EvalConfig::new(1e-3, 10, 8).is_err());
        assert!(EvalConfig::new(1e-3, 10, 16).is_ok());
    }

    #[test]
    fn phi_at_origin_and_period() {
        let cfg = EvalConfig::with_tol(1e-7);
        let z = eval_phi(&TimePoint::t(0.0).unwrap(), &cfg).unwrap();
        assert!(z.norm() < 1e-7);
        let p = eval_phi(&TimePoint::t_pq(1, 1).unwrap(), &cfg).unwrap();
        assert!((p - Complex64::new(0.0, 1.0 / (2.0 * PI))).norm() < 1e-7);
    }

    #[test]
    fn phi_d_and_r_special_values() {
        let cfg = EvalConfig::with_tol(1e-6);
        let d0 = eval_phi_d(&TimePoint::x(0.0).unwrap(), &cfg).unwrap();
        assert!((d0 - Complex64::new(0.0, -PI / 6.0)).norm() < 1e-6);
        let d2 = eval_phi_d(&TimePoint::x(2.0).unwrap(), &cfg).unwrap();
        assert!((d2 - d0).norm() < 2e-6);
        let a = eval_phi_d(&TimePoint::x(0.3).unwrap(), &cfg).unwrap();
        let b = eval_phi_d(&TimePoint::x(-0.3).unwrap(), &cfg).unwrap();
        // term-wise e^{-iθ}/(iπn²) = -conj(e^{iθ}/(iπn²))
        assert!((b + a.conj()).norm() < 2e-6);
        assert!((b - a.conj()).norm() > 0.1);
        assert_eq!(eval_r(0.0, &cfg).unwrap(), 0.0);
        let r = eval_r(PI / 2.0, &cfg).unwrap();
        assert!((r - PI * PI / 8.0).abs() < 1e-6);
        let z = XParam::from_big(TimePoint::x(0.4).unwrap().value());
        let lhs = eval_r_pi(&z, &cfg).unwrap();
        let rhs = PI * eval_phi_d_arg(&z, &cfg).unwrap().value.re;
        assert!((lhs - rhs).abs() < (1.0 + PI) * 1e-6);
        let _ = Variable::X;
    }

    #[test]
    fn y_and_z_special_values() {
        let cfg = EvalConfig::with_tol(1e-7);
        for m in [1.0, 3.0, 17.0] {
            let h = 1.0 / (8.0 * PI * m);
            assert!((eval_y(h, &cfg).unwrap() - PI * PI / 6.0).norm() < 1e-6);
            let h = 1.0 / (4.0 * PI * (2.0 * m + 1.0));
            assert!((eval_y(h, &cfg).unwrap() + PI * PI / 12.0).norm() < 1e-6);
            let h = 1.0 / (32.0 * PI * m);
            assert!((eval_z(h, &cfg).unwrap() - PI * PI / 8.0).norm() < 1e-6);
        }
        assert!((eval_z(1.0 / (16.0 * PI), &cfg).unwrap() + PI * PI / 8.0).norm() < 1e-6);
        assert!(eval_y(0.0, &cfg).is_err());
        assert!(eval_z(0.0, &cfg).is_err());
    }
}
