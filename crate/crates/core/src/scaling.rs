//! Rescaled local behaviour near convergents: `β_c`, `H_c`, corner grids and
//! the second rescaling `G`.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig, Quadrature};
use crate::rational::LocalIncrement;
use crate::series::{eval_phi, eval_y, EvalConfig};
use crate::special::{cis, osc_tail};
use crate::time::{TimePoint, Variable};
use num_complex::Complex64;
use num_traits::Float;
use std::f64::consts::PI;

/// `β_c(s) = s/(1 + 4πcs)`.
pub fn beta_map<T: Float>(s: T, c: T) -> T {
    let four_pi = T::from(4.0 * PI).unwrap();
    s / (T::one() + four_pi * c * s)
}

fn check_c(c: f64) -> Result<()> {
    if !(1.0..=4.0).contains(&c) {
        return Err(Error::Argument(format!("c = {} outside [1, 4]", c)));
    }
    Ok(())
}

/// `φ(t)` for `0 ≤ t ≤ 1/(4π)` through the local expansion at the origin.
pub fn phi_near_origin(t: f64, tol: f64, cfg: &EvalConfig) -> Result<Complex64> {
    let inc = LocalIncrement::new(0, 1)?;
    Ok(inc.eval(t, tol, cfg.max_terms)?.value)
}

// ∫_0^β (1−4πcr)^{-5/2} and ∫_0^β r (1−4πcr)^{-5/2} with x = 4πcs, v = 1/(1+x)
fn smooth_moments(x: f64, c: f64) -> (f64, f64) {
    let a = (1.5 * x.ln_1p()).exp_m1();
    let b = (0.5 * x.ln_1p()).exp_m1();
    let m0 = a / (6.0 * PI * c);
    let m1 = ((2.0 / 3.0) * a - 2.0 * b) / (16.0 * PI * PI * c * c);
    (m0, m1)
}

/// `Σ_k` part of `∫_0^β φ(r)(1−4πcr)^{-5/2} dr`, integrated term by term.
fn oscillatory_moment(s: f64, c: f64, tol: f64) -> Result<Complex64> {
    let x = 4.0 * PI * c * s;
    let v = 1.0 / (1.0 + x);
    let beta = beta_map(s, c);
    let w = v.powf(-2.5);
    let n = (w / (12.0 * PI.powi(4) * tol)).cbrt().ceil().max(1.0);
    if n > 1e8 {
        return Err(Error::Capacity { needed: n as u64, cap: 100_000_000 });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..=n as u64).rev() {
        let kf = k as f64;
        let lambda = PI * kf * kf / c;
        let zv = lambda * v;
        // e^{-iλ}[G(λv) − G(λ)]
        let t = if zv >= 36.0 {
            cis(-4.0 * PI * PI * kf * kf * beta) * osc_tail(2, zv, Complex64::new(1.0, 0.0))
                - osc_tail(2, lambda, Complex64::new(1.0, 0.0))
        } else {
            cis(-lambda) * (osc_tail(2, zv, cis(zv)) - osc_tail(2, lambda, cis(lambda)))
        };
        acc += t * lambda.powf(1.5) / (kf * kf);
    }
    Ok(acc * (-1.0 / (2.0 * PI * PI * 4.0 * PI * c)))
}

fn h_prefactor() -> Complex64 {
    Complex64::new(1.0, -1.0) * (PI / 2.0).sqrt()
}

/// Closed form of `H_c(s)`: `√π(1−i)/√2 [φ(β)/(1−4πcβ)^{3/2} − 6πc ∫_0^β φ(r)/(1−4πcr)^{5/2} dr]`.
///
/// The integral is done term by term: the polynomial part of `φ` in closed form
/// and every Fourier mode through the oscillatory tails `G_{5/2}`.
pub fn h_closed(s: f64, c: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_c(c)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Argument(format!("h_closed needs s > 0, got {}", s)));
    }
    let x = 4.0 * PI * c * s;
    let beta = beta_map(s, c);
    let v32 = (1.5 * x.ln_1p()).exp();
    let budget = cfg.tol / (2.0 * h_prefactor().norm());
    let phi = phi_near_origin(beta, budget / v32, cfg)?;
    let (m0, m1) = smooth_moments(x, c);
    let integral = Complex64::new(m0 / 12.0, m1) + oscillatory_moment(s, c, budget / (6.0 * PI * c))?;
    Ok(h_prefactor() * (phi * v32 - integral * (6.0 * PI * c)))
}

/// The same closed form with the integral done by adaptive quadrature on `φ`.
pub fn h_closed_quadrature(s: f64, c: f64, cfg: &EvalConfig, quad: &QuadConfig) -> Result<(Complex64, Quadrature)> {
    check_c(c)?;
    let x = 4.0 * PI * c * s;
    let beta = beta_map(s, c);
    let v32 = (1.5 * x.ln_1p()).exp();
    let phi = phi_near_origin(beta, cfg.tol, cfg)?;
    let inc = LocalIncrement::new(0, 1)?;
    let q = integrate(
        |r| {
            let p = if r > 0.0 { inc.eval(r, cfg.tol, cfg.max_terms).map(|e| e.value).unwrap_or(Complex64::new(f64::NAN, 0.0)) } else { Complex64::new(0.0, 0.0) };
            p * (1.0 - 4.0 * PI * c * r).powf(-2.5)
        },
        0.0,
        beta,
        quad,
    )?;
    if !q.value.re.is_finite() {
        return Err(Error::Numeric("integrand evaluation failed".into()));
    }
    Ok((h_prefactor() * (phi * v32 - q.value * (6.0 * PI * c)), q))
}

/// Two-term form `√s + 4i Y(β_c(s)) s^{3/2}`.
pub fn h_series(s: f64, c: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_c(c)?;
    if !(s > 0.0 && s <= 0.1) {
        return Err(Error::Argument(format!("h_series needs s ∈ (0, 0.1], got {}", s)));
    }
    let s32 = s.powf(1.5);
    let ycfg = EvalConfig { tol: (cfg.tol / (4.0 * s32)).min(0.1), ..*cfg };
    let y = eval_y(beta_map(s, c), &ycfg)?;
    Ok(Complex64::new(s.sqrt(), 0.0) + Complex64::i() * y * (4.0 * s32))
}

/// `s_{μ} = 1/(2π(4μ − 2c))` for real index `μ`.
pub fn grid_point(c: f64, mu: f64) -> Result<f64> {
    let d = 4.0 * mu - 2.0 * c;
    if !(d > 0.0) {
        return Err(Error::Domain(format!("4m − 2c = {} is not positive", d)));
    }
    Ok(1.0 / (2.0 * PI * d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerGrid {
    pub s_m: f64,
    pub s_tilde_m: f64,
    pub s_cm: f64,
}

/// Points where `1/(4β_c) = 2πm` and `(2m+1)π`.
pub fn corner_grid(c: f64, m: u64) -> Result<CornerGrid> {
    let s_m = grid_point(c, m as f64)?;
    let d = 2.0 * m as f64 + 1.0 - c;
    if !(d > 0.0) {
        return Err(Error::Domain(format!("2m + 1 − c = {} is not positive", d)));
    }
    Ok(CornerGrid { s_m, s_tilde_m: 1.0 / (4.0 * PI * d), s_cm: s_m })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowLocation {
    pub m: u64,
    pub alpha: f64,
}

/// The `m` with `s_{m+1} < K/(2π) ≤ s_m`, and `α` with `K/(2π) = s_{m+α}`.
pub fn locate_window(k: f64, c: f64) -> Result<WindowLocation> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Argument(format!("K = {} outside (0, 1)", k)));
    }
    let s = k / (2.0 * PI);
    let idx = (1.0 / (2.0 * PI * s) + 2.0 * c) / 4.0;
    let mut m = idx.floor();
    // keep the half-open convention against rounding at grid points
    if m >= 1.0 && 4.0 * m - 2.0 * c > 0.0 && grid_point(c, m)? < s {
        m -= 1.0;
    } else if grid_point(c, m + 1.0).map_or(false, |g| g >= s) {
        m += 1.0;
    }
    if m < 1.0 || 4.0 * m - 2.0 * c <= 0.0 {
        return Err(Error::Range(format!("K/(2π) = {} lies above s_1", s)));
    }
    let alpha = (idx - m).clamp(0.0, 1.0 - f64::EPSILON);
    Ok(WindowLocation { m: m as u64, alpha })
}

/// `G_μ(s) = s_{m+μ}^{-3/2} [H_c(s) − H_c(s_{m+μ})]` for `s ∈ (s_{m+1}, s_m]`; `cfg.tol` bounds the error of `G`.
pub fn g_rescaled(s: f64, mu: f64, c: f64, m: u64, cfg: &EvalConfig) -> Result<Complex64> {
    if !(1.0..=2.0).contains(&mu) {
        return Err(Error::Argument(format!("μ = {} outside [1, 2]", mu)));
    }
    let (hi, lo) = (grid_point(c, m as f64)?, grid_point(c, m as f64 + 1.0)?);
    if !(s > lo && s <= hi) {
        return Err(Error::Range(format!("s = {} outside (s_{}, s_{}]", s, m + 1, m)));
    }
    let sm = grid_point(c, m as f64 + mu)?;
    let scale = sm.powf(1.5);
    let hcfg = EvalConfig { tol: 0.5 * cfg.tol * scale, ..*cfg };
    let a = h_closed(s, c, &hcfg)?;
    let b = if s == sm { a } else { h_closed(sm, c, &hcfg)? };
    Ok((a - b) / scale)
}

/// Limit of `G_μ(s_{m+α})` as `m → ∞`, with the constant in front left to the caller:
/// `i(φ((2−μ)/2π) − φ((2−α)/2π))`.
pub fn g_limit_shape(mu: f64, alpha: f64, cfg: &EvalConfig) -> Result<Complex64> {
    let f = |y: f64| -> Result<Complex64> { eval_phi(&TimePoint::from_f64(2.0 - y, Variable::X)?, cfg) };
    Ok(Complex64::i() * (f(mu)? - f(alpha)?))
}

/// Left-hand sides of the nine bounds on `β_c` vs `β_a`.
#[derive(Clone, Copy, Debug)]
pub struct BetaBounds {
    pub s: f64,
    pub c: f64,
    pub a: f64,
    /// `[β_c, β_a]`
    pub betas: [f64; 2],
    /// `[(1−4πcβ_c)^{-1}, (1−4πaβ_a)^{-1}]`
    pub inverse_factors: [f64; 2],
    /// `|β_c − β_a|`, `|φ(β_c) − φ(β_a)|`, `|β_c² − β_a²|`, `|β_c³ − β_a³|`,
    /// `|cβ_c − aβ_a|` and its square and cube analogues
    pub differences: [f64; 7],
}

pub fn beta_bounds(s: f64, c: f64, a: f64, cfg: &EvalConfig) -> Result<BetaBounds> {
    check_c(c)?;
    check_c(a)?;
    let (bc, ba) = (beta_map(s, c), beta_map(s, a));
    let phi_diff = if bc == ba {
        0.0
    } else {
        (phi_near_origin(bc, cfg.tol, cfg)? - phi_near_origin(ba, cfg.tol, cfg)?).norm()
    };
    let (xc, xa) = (c * bc, a * ba);
    Ok(BetaBounds {
        s,
        c,
        a,
        betas: [bc, ba],
        inverse_factors: [1.0 / (1.0 - 4.0 * PI * xc), 1.0 / (1.0 - 4.0 * PI * xa)],
        differences: [
            (bc - ba).abs(),
            phi_diff,
            (bc * bc - ba * ba).abs(),
            (bc.powi(3) - ba.powi(3)).abs(),
            (xc - xa).abs(),
            (xc * xc - xa * xa).abs(),
            (xc.powi(3) - xa.powi(3)).abs(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_examples() {
        let g = corner_grid(2.0, 4).unwrap();
        assert!((g.s_m - 1.0 / (24.0 * PI)).abs() < 1e-16);
        assert!((g.s_m - 0.013_263).abs() < 1e-6);
        assert_eq!(g.s_cm, g.s_m);
        assert!(corner_grid(4.0, 1).is_err());
        for c in [1.0, 1.7, 2.5, 3.3, 4.0] {
            for m in 3..10_000u64 {
                let g = corner_grid(c, m).unwrap();
                let next = corner_grid(c, m + 1).unwrap();
                assert!(g.s_tilde_m < g.s_m && g.s_tilde_m > next.s_m, "{} {}", c, m);
            }
            let m = 1_000_000u64;
            assert!((8.0 * PI * m as f64 * corner_grid(c, m).unwrap().s_cm - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn window_examples() {
        let w = locate_window(0.0628, 2.0).unwrap();
        assert_eq!(w.m, 4);
        assert!((grid_point(2.0, w.m as f64 + w.alpha).unwrap() - 0.0628 / (2.0 * PI)).abs() < 1e-15);
        let k = 2.0 * PI * grid_point(2.5, 7.0).unwrap();
        let w = locate_window(k, 2.5).unwrap();
        assert_eq!(w.m, 7);
        assert!(w.alpha < 1e-12);
        assert!(matches!(locate_window(0.9, 1.0), Err(Error::Range(_))));
        assert!(matches!(locate_window(0.9, 2.0), Err(Error::Range(_))));
    }

    #[test]
    fn h_closed_small_s_law() {
        let cfg = EvalConfig::with_tol(1e-12);
        let mut worst: f64 = 0.0;
        for j in 0..7 {
            let s = 10f64.powf(-6.0 + 0.5 * j as f64);
            let h = h_closed(s, 2.5, &cfg).unwrap();
            worst = worst.max((h - s.sqrt()).norm() / s.powf(1.5));
        }
        // |4iY| ≤ 4π²/6 plus higher order
        assert!(worst < 7.0, "{}", worst);
    }

    #[test]
    fn h_closed_matches_quadrature() {
        let cfg = EvalConfig::with_tol(1e-8);
        for (s, c) in [(0.003, 1.5), (0.02, 3.0)] {
            let h = h_closed(s, c, &cfg).unwrap();
            let (q, _) = h_closed_quadrature(s, c, &cfg, &QuadConfig { tol: 1e-7, ..Default::default() }).unwrap();
            assert!((h - q).norm() < 2e-6, "{} {} {} {}", s, c, h, q);
        }
    }

    #[test]
    fn series_vs_closed_order() {
        let (mut xs, mut ys) = (vec![], vec![]);
        for j in 0..7 {
            let s = 10f64.powf(-5.0 + 0.5 * j as f64);
            let cfg = EvalConfig::with_tol(1e-2 * s.powf(2.5));
            let d = (h_series(s, 2.0, &cfg).unwrap() - h_closed(s, 2.0, &cfg).unwrap()).norm();
            xs.push(s.ln());
            ys.push(d.ln());
        }
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope - 2.5).abs() < 0.3, "{}", slope);
    }

    #[test]
    fn quadrants_on_grids() {
        let cfg = EvalConfig::with_tol(1e-9);
        let c = 2.0;
        for m in [50u64, 200] {
            let g = corner_grid(c, m).unwrap();
            let h = h_closed(g.s_m, c, &cfg).unwrap();
            assert!((h - g.s_m.sqrt()).im > 0.0);
            let h = h_closed(g.s_tilde_m, c, &cfg).unwrap();
            assert!(h.re > 0.0 && h.im < 0.0, "{}", h);
        }
    }

    #[test]
    fn g_window_checks() {
        let cfg = EvalConfig::with_tol(1e-4);
        let (c, m) = (2.0, 20);
        let lo = grid_point(c, m as f64 + 1.0).unwrap();
        let hi = grid_point(c, m as f64).unwrap();
        assert!(matches!(g_rescaled(lo, 1.5, c, m, &cfg), Err(Error::Range(_))));
        assert!(matches!(g_rescaled(hi, 2.5, c, m, &cfg), Err(Error::Argument(_))));
        let g = g_rescaled(hi, 1.5, c, m, &cfg).unwrap();
        assert!(g.norm().is_finite());
    }

    proptest! {
        #[test]
        fn beta_range_and_lipschitz(s in 0.0f64..10.0, c in 1.0f64..4.0, a in 1.0f64..4.0) {
            let (bc, ba) = (beta_map(s, c), beta_map(s, a));
            prop_assert!((0.0..=1.0 / (4.0 * PI)).contains(&bc));
            prop_assert!((bc - ba).abs() <= (a - c).abs() / (4.0 * PI) + 1e-15);
        }
    }
}
