//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use crate::error::{Error, Result};
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    pub tol: f64,
    /// panels the interval is split into before any adaptivity
    pub min_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-10, min_panels: 1 << 10, max_panels: 1 << 20 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: Complex64,
    pub err_estimate: f64,
    pub panels: usize,
}

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// `∫_a^b f`, refining the panels with the largest Kronrod–Gauss gap until the
/// summed estimate drops below `cfg.tol`.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) || !(b >= a) {
        return Err(Error::Argument("quadrature needs finite a ≤ b".into()));
    }
    if a == b {
        return Ok(Quadrature { value: Complex64::new(0.0, 0.0), err_estimate: 0.0, panels: 0 });
    }
    let n0 = cfg.min_panels.max(1);
    let w = (b - a) / n0 as f64;
    let mut panels: Vec<(f64, f64, Complex64, f64)> = (0..n0)
        .map(|i| {
            let (lo, hi) = (a + w * i as f64, if i + 1 == n0 { b } else { a + w * (i + 1) as f64 });
            let (v, e) = gk15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    loop {
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= cfg.tol {
            let value = panels.iter().map(|p| p.2).sum();
            return Ok(Quadrature { value, err_estimate: err, panels: panels.len() });
        }
        if panels.len() >= cfg.max_panels {
            return Err(Error::NoConvergence(format!("quadrature error {:.2e} after {} panels", err, panels.len())));
        }
        // bisect every panel above the mean share
        let share = cfg.tol / panels.len() as f64;
        let mut next = Vec::with_capacity(panels.len() * 2);
        for p in panels {
            if p.3 > share {
                let m = 0.5 * (p.0 + p.1);
                let (v1, e1) = gk15(&f, p.0, m);
                let (v2, e2) = gk15(&f, m, p.1);
                next.push((p.0, m, v1, e1));
                next.push((m, p.1, v2, e2));
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
}
