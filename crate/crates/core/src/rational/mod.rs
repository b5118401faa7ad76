//! Rational points `t_{p,q} = (p/q)/(2π)`: classification, local expansions,
//! Gauss sums and fitted eighth roots.

pub mod gauss;
pub mod local;

pub use gauss::gauss_sum;
pub use local::LocalIncrement;

use crate::angles::{circular_median, wrap};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::phase::Rate;
use crate::series::{odd_sum_from_rate, y_from_rate, EvalConfig};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Klass {
    Corner,
    Spiral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }

    fn index(self) -> usize {
        match self {
            Side::Right => 0,
            Side::Left => 1,
        }
    }
}

/// `e^{ikπ/4}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EighthRoot(pub u8);

impl EighthRoot {
    pub fn value(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0 as f64 * FRAC_PI_4)
    }

    pub fn angle(self) -> f64 {
        wrap(self.0 as f64 * FRAC_PI_4)
    }

    /// Nearest root to an angle, with the distance to it.
    pub fn snap(angle: f64) -> (EighthRoot, f64) {
        let k = (angle / FRAC_PI_4).round();
        let resid = (angle - k * FRAC_PI_4).abs();
        (EighthRoot(k.rem_euclid(8.0) as u8), resid)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalPoint {
    pub p: i64,
    pub q: u64,
    pub klass: Klass,
    pub q_tilde: u64,
    /// fitted eighth root `e_{p,q}` (corner points)
    pub e_fit: Option<EighthRoot>,
    /// secant-fit residual of `e_fit`, radians
    pub e_residual: Option<f64>,
    /// eighth root multiplying the spiral expansion, `[right, left]`
    pub spiral_factor: [Option<EighthRoot>; 2],
    /// `|c_±|/q̃` estimates, `[right, left]`
    pub c_ratio_est: [Option<f64>; 2],
}

/// Default `|c_±|/q̃` when nothing better is known.
pub const DEFAULT_C_RATIO: f64 = 2.5;

pub fn classify(p: i64, q: i64) -> Result<RationalPoint> {
    if q <= 0 {
        return Err(Error::Argument(format!("denominator {} must be positive", q)));
    }
    if num_integer::gcd(p, q) != 1 {
        return Err(Error::Argument(format!("{}/{} is not reduced", p, q)));
    }
    let klass = if q % 4 == 2 { Klass::Spiral } else { Klass::Corner };
    let q_tilde = if q % 2 == 1 { q } else { q / 2 } as u64;
    Ok(RationalPoint {
        p,
        q: q as u64,
        klass,
        q_tilde,
        e_fit: None,
        e_residual: None,
        spiral_factor: [None, None],
        c_ratio_est: [None, None],
    })
}

impl RationalPoint {
    pub fn validity_radius(&self) -> f64 {
        1.0 / (16.0 * PI * (self.q_tilde * self.q_tilde) as f64)
    }

    pub fn c_ratio(&self, side: Side) -> f64 {
        self.c_ratio_est[side.index()].unwrap_or(DEFAULT_C_RATIO)
    }

    /// Signed `c_±` for the side of `h`.
    pub fn c_for(&self, h: f64) -> f64 {
        let side = if h < 0.0 { Side::Left } else { Side::Right };
        side.sign() * self.c_ratio(side) * self.q_tilde as f64
    }

    pub fn local(&self) -> Result<LocalIncrement> {
        LocalIncrement::new(self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticTerm {
    pub value: Complex64,
    /// exponent of `h` in the residual bound
    pub order: f64,
    pub validity_radius: f64,
}

/// `q̃² h / (1 + 4π c q̃ h)`.
pub fn b_map(h: f64, c: f64, q_tilde: u64) -> Result<f64> {
    let qt = q_tilde as f64;
    let den = 1.0 + 4.0 * PI * c * qt * h;
    if den.abs() < 1e-300 || !den.is_finite() {
        return Err(Error::Domain(format!("b(h) has a pole at h = {}", h)));
    }
    Ok(qt * qt * h / den)
}

/// `h^{1/2}` with the branch `√(−1) = −i`.
pub fn branch_sqrt(h: f64) -> Complex64 {
    if h >= 0.0 {
        Complex64::new(h.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -(-h).sqrt())
    }
}

/// `h^{3/2} = h · h^{1/2}` on the same branch.
pub fn branch_pow32(h: f64) -> Complex64 {
    branch_sqrt(h) * h
}

/// Turns per `k²` of `e^{ik²/(4b(h))}`: `1/(8π q̃² h) + c/(2q̃)`, built without forming `b`.
fn y_rate(h: f64, c: f64, qt: u64, scale: f64) -> Rate {
    let qt = qt as f64;
    let inv = (crate::constants::pi_dd() * Dd::from_f64(h) * (8.0 * qt * qt / scale)).recip();
    Rate::from_dd(inv + Dd::from_f64(c * scale / (2.0 * qt)).div(Dd::from_f64(1.0)))
}

fn check_h(pt: &RationalPoint, h: f64) -> Result<()> {
    if h == 0.0 || !h.is_finite() || h.abs() >= pt.validity_radius() {
        return Err(Error::Validity(format!(
            "need 0 < |h| < {:.3e}, got {:e}",
            pt.validity_radius(),
            h
        )));
    }
    Ok(())
}

fn y_tol(cfg: &EvalConfig, weight: f64) -> EvalConfig {
    // the Y series enters multiplied by `weight`
    EvalConfig { tol: (cfg.tol / weight.max(1e-300)).clamp(1e-10, 1e-2), ..*cfg }
}

/// Second-order term `−4e(1−i)/√(2π) · Y(b(h)) q̃^{3/2} h^{3/2}` without `e`.
fn corner_second(pt: &RationalPoint, h: f64, c: f64, cfg: &EvalConfig) -> Result<Complex64> {
    let qt = pt.q_tilde as f64;
    let coef = Complex64::new(-4.0, 4.0) / (2.0 * PI).sqrt() * qt.powf(1.5) * branch_pow32(h);
    let y = y_from_rate(&y_rate(h, c, pt.q_tilde, 1.0), &y_tol(cfg, coef.norm()))?;
    Ok(coef * y)
}

fn corner_first(pt: &RationalPoint, h: f64) -> Complex64 {
    let qt = pt.q_tilde as f64;
    Complex64::new(1.0, 1.0) / (2.0 * PI).sqrt() * branch_sqrt(h) / qt.sqrt()
}

/// Two-term corner expansion of `φ(t_{p,q}+h) − φ(t_{p,q})`.
pub fn corner_asymptotic(pt: &RationalPoint, h: f64, cfg: &EvalConfig) -> Result<AsymptoticTerm> {
    if pt.klass != Klass::Corner {
        return Err(Error::Class(format!("{}/{} is a spiral point", pt.p, pt.q)));
    }
    check_h(pt, h)?;
    let e = pt.e_fit.ok_or_else(|| Error::Argument("e_{p,q} not fitted".into()))?.value();
    let value = e * (corner_first(pt, h) + corner_second(pt, h, pt.c_for(h), cfg)?);
    Ok(AsymptoticTerm { value, order: 2.5, validity_radius: pt.validity_radius() })
}

/// Leading corner term alone.
pub fn corner_leading(pt: &RationalPoint, h: f64) -> Result<Complex64> {
    check_h(pt, h)?;
    let e = pt.e_fit.ok_or_else(|| Error::Argument("e_{p,q} not fitted".into()))?.value();
    Ok(e * corner_first(pt, h))
}

/// `−16(1−i)/√(2π) · Ẑ(b(h)) q̃^{3/2} h^{3/2}` with `Ẑ(b) = Σ_{k odd} e^{+ik²/(16b)}/k²`.
fn spiral_term(pt: &RationalPoint, h: f64, c: f64, cfg: &EvalConfig) -> Result<Complex64> {
    let qt = pt.q_tilde as f64;
    let coef = Complex64::new(-16.0, 16.0) / (2.0 * PI).sqrt() * qt.powf(1.5) * branch_pow32(h);
    // 1/(16 b) = 1/(16 q̃² h) + πc/(4q̃); in turns: 1/(32π q̃² h) + c/(8q̃)
    let z = odd_sum_from_rate(&y_rate(h, c, pt.q_tilde, 0.25), &y_tol(cfg, coef.norm()))?;
    Ok(coef * z)
}

/// Leading spiral expansion of `φ(t_{p,q}+h) − φ(t_{p,q})`.
///
/// The odd-`k` sum carries the phase `+k²/(16 b(h))`; with the opposite sign
/// the expansion does not match the increments (see tests).
pub fn spiral_asymptotic(pt: &RationalPoint, h: f64, cfg: &EvalConfig) -> Result<AsymptoticTerm> {
    if pt.klass != Klass::Spiral {
        return Err(Error::Class(format!("{}/{} is a corner point", pt.p, pt.q)));
    }
    check_h(pt, h)?;
    let side = if h < 0.0 { Side::Left } else { Side::Right };
    let e = pt.spiral_factor[side.index()].ok_or_else(|| Error::Argument("spiral factor not fitted".into()))?.value();
    let value = e * spiral_term(pt, h, pt.c_for(h), cfg)?;
    Ok(AsymptoticTerm { value, order: 2.5, validity_radius: pt.validity_radius() })
}

/// Increment with absolute accuracy `tol`.
pub fn increment(inc: &LocalIncrement, h: f64, tol: f64, cfg: &EvalConfig) -> Result<Complex64> {
    Ok(inc.eval(h, tol, cfg.max_terms)?.value)
}

// size of the h^{3/2} terms
fn second_scale(pt: &RationalPoint, h: f64) -> f64 {
    (pt.q_tilde as f64 * h.abs()).powf(1.5)
}

fn fit_schedule(pt: &RationalPoint) -> Vec<f64> {
    let qt2 = (pt.q_tilde * pt.q_tilde) as f64;
    (0..=8).map(|j| 10f64.powf(-4.0 - 0.5 * j as f64) / qt2).collect()
}

/// Fit `e_{p,q}` from secant directions on `h = q̃^{-2}·10^{-4…-8}` (right side).
pub fn fit_eighth_root(pt: &RationalPoint, cfg: &EvalConfig) -> Result<RationalPoint> {
    if pt.klass != Klass::Corner {
        return Err(Error::Class(format!("{}/{} is a spiral point", pt.p, pt.q)));
    }
    let inc = pt.local()?;
    let mut angles = Vec::new();
    for h in fit_schedule(pt) {
        let d = increment(&inc, h, 1e-7 * (h / pt.q as f64).sqrt(), cfg)?;
        angles.push(wrap(d.arg() - FRAC_PI_4));
    }
    let med = circular_median(&angles).ok_or_else(|| Error::NoConvergence("no directions".into()))?;
    let (root, _) = EighthRoot::snap(med);
    let mut devs: Vec<f64> = angles.iter().map(|a| wrap(a - root.angle()).abs()).collect();
    devs.sort_by(|a, b| a.total_cmp(b));
    let resid = devs[devs.len() / 2];
    if resid > 0.2 {
        return Err(Error::NoConvergence(format!("eighth-root fit residual {:.3} rad", resid)));
    }
    let mut out = pt.clone();
    out.e_fit = Some(root);
    out.e_residual = Some(resid);
    Ok(out)
}

// The expansions see `c` only through the phase `e^{iπck²/q̃}` (`c/8q̃` turns for the odd
// spiral sum), and the Poisson form of the increment puts that phase on a grid of half-integers.
// Candidates therefore run over `c ∈ [q̃, 4q̃]` in steps of 1/2.
fn minimize_c(q_tilde: u64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let qt = q_tilde as f64;
    let mut best = (f64::INFINITY, qt);
    for j in 0..=(6 * q_tilde) {
        let c = qt + 0.5 * j as f64;
        let v = f(c)?;
        if v < best.0 * (1.0 - 1e-9) {
            best = (v, c);
        }
    }
    Ok(best.1)
}

fn c_fit_schedule(pt: &RationalPoint, side: Side) -> Vec<f64> {
    let r = pt.validity_radius();
    (0..6).map(|j| side.sign() * r * 0.5 * 10f64.powf(-0.5 * j as f64)).collect()
}

/// Least-squares estimate of `|c_±|/q̃` from the second-order corner term.
pub fn fit_c_ratio(pt: &RationalPoint, side: Side, cfg: &EvalConfig) -> Result<RationalPoint> {
    if pt.klass != Klass::Corner {
        return Err(Error::Class(format!("{}/{} is a spiral point", pt.p, pt.q)));
    }
    let e = pt.e_fit.ok_or_else(|| Error::Argument("e_{p,q} not fitted".into()))?.value();
    let inc = pt.local()?;
    let hs = c_fit_schedule(pt, side);
    let mut targets = Vec::new();
    for &h in &hs {
        let d = increment(&inc, h, 1e-6 * second_scale(pt, h), cfg)?;
        targets.push(d - e * corner_first(pt, h));
    }
    let c = minimize_c(pt.q_tilde, |c| {
        let mut s = 0.0;
        for (h, t) in hs.iter().zip(&targets) {
            let sec = e * corner_second(pt, *h, side.sign() * c, &EvalConfig { tol: 1e-4 * second_scale(pt, *h), ..*cfg })?;
            s += ((t - sec).norm() / h.abs().powf(1.5)).powi(2);
        }
        Ok(s)
    })?;
    let mut out = pt.clone();
    out.c_ratio_est[side.index()] = Some(c / pt.q_tilde as f64);
    Ok(out)
}

/// Joint fit of the spiral factor and `|c_±|/q̃` for one side.
/// The two sides generally carry different eighth roots.
pub fn fit_spiral(pt: &RationalPoint, side: Side, cfg: &EvalConfig) -> Result<RationalPoint> {
    if pt.klass != Klass::Spiral {
        return Err(Error::Class(format!("{}/{} is a corner point", pt.p, pt.q)));
    }
    let inc = pt.local()?;
    let hs = c_fit_schedule(pt, side);
    let mut targets = Vec::new();
    for &h in &hs {
        targets.push(increment(&inc, h, 1e-6 * second_scale(pt, h), cfg)?);
    }
    let ratios = |c: f64, tol: f64| -> Result<Vec<Complex64>> {
        hs.iter()
            .zip(&targets)
            .map(|(h, t)| {
                let z = spiral_term(pt, *h, side.sign() * c, &EvalConfig { tol: tol * second_scale(pt, *h), ..*cfg })?;
                Ok(t / z)
            })
            .collect()
    };
    let c = minimize_c(pt.q_tilde, |c| {
        let r = ratios(c, 1e-4)?;
        let mean = r.iter().sum::<Complex64>() / r.len() as f64;
        Ok(r.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() + (mean.norm() - 1.0).powi(2))
    })?;
    let r = ratios(c, 1e-6)?;
    let mean = r.iter().sum::<Complex64>() / r.len() as f64;
    let (root, resid) = EighthRoot::snap(mean.arg());
    if resid > 0.2 || (mean.norm() - 1.0).abs() > 0.2 {
        return Err(Error::NoConvergence(format!("spiral factor fit off by {:.3} rad", resid)));
    }
    let mut out = pt.clone();
    out.spiral_factor[side.index()] = Some(root);
    out.c_ratio_est[side.index()] = Some(c / pt.q_tilde as f64);
    Ok(out)
}

/// Symmetric difference quotient `D_h R(πx)` at `x = p/q`.
///
/// Uses `R(πy) = −2π² Im φ(−y/(4π)) − πy/2`, so the quotient equals
/// `−1/2 − (π²/h) Im[Δ(−δ) − Δ(δ)]` with `δ = h/(4π²)` at the rational base `−x/2`.
pub fn gerver_quotient(p: i64, q: i64, h: f64, cfg: &EvalConfig) -> Result<f64> {
    if q <= 0 || h <= 0.0 {
        return Err(Error::Argument("need q > 0 and h > 0".into()));
    }
    let (bp, bq) = (-p, 2 * q);
    let g = num_integer::gcd(bp, bq);
    let inc = LocalIncrement::new(bp / g, (bq / g) as u64)?;
    let delta = h / (4.0 * PI * PI);
    // target absolute accuracy 1e-6·√h on the quotient
    let tol = 1e-6 * h.sqrt() * h / (PI * PI) / 4.0;
    let plus = inc.eval(delta, tol, cfg.max_terms)?.value;
    let minus = inc.eval(-delta, tol, cfg.max_terms)?.value;
    Ok(-0.5 - PI * PI / h * (minus - plus).im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let a = classify(1, 2).unwrap();
        assert_eq!((a.klass, a.q_tilde), (Klass::Spiral, 1));
        assert_eq!(classify(1, 8).unwrap().klass, Klass::Corner);
        let c = classify(1, 6).unwrap();
        assert_eq!((c.klass, c.q_tilde), (Klass::Spiral, 3));
        assert!(classify(2, 4).is_err());
        assert!(classify(1, 0).is_err());
    }

    #[test]
    fn b_map_values() {
        assert_eq!(b_map(0.0, 2.0, 1).unwrap(), 0.0);
        let b = b_map(0.01, 2.0, 1).unwrap();
        assert!((b - 0.01 / (1.0 + 0.08 * PI)).abs() < 1e-15);
        assert!((b - 0.007_991_5).abs() < 1e-7);
        let pole = -1.0 / (4.0 * PI * 2.0);
        assert!(b_map(pole, 2.0, 1).is_err());
    }

    #[test]
    fn branch_convention() {
        assert_eq!(branch_sqrt(-4.0), Complex64::new(0.0, -2.0));
        assert_eq!(branch_pow32(-4.0), Complex64::new(0.0, 8.0));
    }

    #[test]
    fn origin_root_is_one() {
        let cfg = EvalConfig::default();
        let pt = fit_eighth_root(&classify(0, 1).unwrap(), &cfg).unwrap();
        assert_eq!(pt.e_fit, Some(EighthRoot(0)));
        assert!(matches!(fit_eighth_root(&classify(1, 2).unwrap(), &cfg), Err(Error::Class(_))));
    }

    #[test]
    fn eighth_root_matches_gauss_sum_cross_check() {
        // for odd q the Poisson form gives e = G(−p, 0, q)/√q
        let cfg = EvalConfig::default();
        for (p, q) in [(1i64, 3i64), (2, 5), (1, 7), (4, 9)] {
            let pt = fit_eighth_root(&classify(p, q).unwrap(), &cfg).unwrap();
            let g = gauss_sum(-p, 0, q as u64) / (q as f64).sqrt();
            assert!((pt.e_fit.unwrap().value() - g).norm() < 1e-9, "{}/{}", p, q);
        }
    }

    #[test]
    fn asymptotic_preconditions() {
        let cfg = EvalConfig::default();
        let pt = fit_eighth_root(&classify(1, 3).unwrap(), &cfg).unwrap();
        assert!(matches!(corner_asymptotic(&pt, 0.0, &cfg), Err(Error::Validity(_))));
        assert!(matches!(corner_asymptotic(&pt, 1.0, &cfg), Err(Error::Validity(_))));
        let sp = classify(1, 2).unwrap();
        assert!(matches!(corner_asymptotic(&sp, 1e-4, &cfg), Err(Error::Class(_))));
        assert!(matches!(spiral_asymptotic(&pt, 1e-4, &cfg), Err(Error::Class(_))));
    }

    fn slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        sxy / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
    }

    #[test]
    fn corner_residual_orders() {
        let cfg = EvalConfig::default();
        let mut pt = fit_eighth_root(&classify(2, 5).unwrap(), &cfg).unwrap();
        for side in [Side::Right, Side::Left] {
            pt = fit_c_ratio(&pt, side, &cfg).unwrap();
        }
        let inc = pt.local().unwrap();
        let q35 = 5f64.powf(3.5);
        for sign in [1.0, -1.0] {
            let (mut xs, mut two, mut one) = (vec![], vec![], vec![]);
            for j in 0..7 {
                let h = sign * 10f64.powf(-4.0 - 0.5 * j as f64);
                let tol = 1e-3 * q35 * h.abs().powf(2.5);
                let d = increment(&inc, h, tol, &cfg).unwrap();
                let a = corner_asymptotic(&pt, h, &EvalConfig { tol, ..cfg }).unwrap();
                xs.push(h.abs().ln());
                two.push((d - a.value).norm().ln());
                one.push((d - corner_leading(&pt, h).unwrap()).norm().ln());
            }
            assert!((slope(&xs, &two) - 2.5).abs() < 0.1, "{}", slope(&xs, &two));
            assert!((slope(&xs, &one) - 1.5).abs() < 0.1, "{}", slope(&xs, &one));
        }
    }

    #[test]
    fn spiral_expansion_at_half() {
        let cfg = EvalConfig::default();
        let mut pt = classify(1, 2).unwrap();
        for side in [Side::Right, Side::Left] {
            pt = fit_spiral(&pt, side, &cfg).unwrap();
        }
        let inc = pt.local().unwrap();
        for h in [1e-5f64, -1e-5, 3e-7, -3e-7] {
            let tol = 0.1 * h.abs().powf(2.5);
            let d = increment(&inc, h, tol, &cfg).unwrap();
            let a = spiral_asymptotic(&pt, h, &EvalConfig { tol, ..cfg }).unwrap();
            assert!((d - a.value).norm() < 500.0 * h.abs().powf(2.5), "{} {}", h, (d - a.value).norm());
        }
    }

    #[test]
    fn gerver_points() {
        let cfg = EvalConfig::default();
        for (p, q) in [(1, 3), (3, 5)] {
            let d = gerver_quotient(p, q, 1e-6, &cfg).unwrap();
            assert!((d + 0.5).abs() < 0.05, "{}/{}: {}", p, q, d);
        }
    }

    #[test]
    fn gerver_quotient_against_direct_series() {
        use crate::series::eval_r;
        let cfg = EvalConfig::default();
        let h = 1e-3;
        let x = PI / 3.0;
        let cfg8 = EvalConfig { tol: 1e-9, ..cfg };
        let direct = (eval_r(x + h, &cfg8).unwrap() - eval_r(x - h, &cfg8).unwrap()) / (2.0 * h);
        let d = gerver_quotient(1, 3, h, &cfg).unwrap();
        assert!((d - direct).abs() < 1e-5, "{} {}", d, direct);
    }
}
