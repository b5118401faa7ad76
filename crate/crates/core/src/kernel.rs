//! Weighted quadratic exponential sums `Σ e^{2πi u k²} / k²`.
//!
//! Eight interleaved lanes advance by complex-multiply recurrences and are
//! resynchronised from exact phases every `RESYNC` steps, which keeps the
//! accumulated rotation error near 1e-13 per term.

use crate::phase::{cis_turns, Rate};
use num_complex::Complex64;
use wide::f64x4;

const LANES: usize = 8;
const RESYNC: u64 = 1024;

/// `Σ_{i < count} e^{2πi u k_i²} / k_i²` with `k_i = first + i·stride`, `first ≥ 1`.
pub fn weighted_sum(u: &Rate, first: u64, stride: u64, count: u64) -> Complex64 {
    assert!(first >= 1 && stride >= 1);
    let step = stride * LANES as u64;
    let blocks = count / LANES as u64;
    let mut acc = Lanes::zero();
    // rotation that advances every lane's increment by one step
    let (er, ei) = cis_turns(u.turns(2 * step as u128 * step as u128));
    let (er, ei) = (f64x4::splat(er), f64x4::splat(ei));
    let sf = f64x4::splat(step as f64);

    let mut b = 0u64;
    while b < blocks {
        let chunk = RESYNC.min(blocks - b);
        let base = first + b * step;
        let mut z = Lanes::zero();
        let mut d = Lanes::zero();
        let mut kf = [[0.0f64; 4]; 2];
        for l in 0..LANES {
            let k = (base + l as u64 * stride) as u128;
            let (c, s) = cis_turns(u.turns(k * k));
            z.set(l, c, s);
            let (c, s) = cis_turns(u.turns(2 * step as u128 * k + step as u128 * step as u128));
            d.set(l, c, s);
            kf[l / 4][l % 4] = k as f64;
        }
        let mut kf = [f64x4::from(kf[0]), f64x4::from(kf[1])];
        let one = f64x4::splat(1.0);
        for _ in 0..chunk {
            // one division serves both vectors: 1/x0 = x1/(x0 x1)
            let x0 = kf[0] * kf[0];
            let x1 = kf[1] * kf[1];
            let inv = one / (x0 * x1);
            let w = [x1 * inv, x0 * inv];
            for v in 0..2 {
                acc.re[v] = w[v].mul_add(z.re[v], acc.re[v]);
                acc.im[v] = w[v].mul_add(z.im[v], acc.im[v]);
                let nr = z.re[v] * d.re[v] - z.im[v] * d.im[v];
                let ni = z.re[v] * d.im[v] + z.im[v] * d.re[v];
                z.re[v] = nr;
                z.im[v] = ni;
                let mr = d.re[v] * er - d.im[v] * ei;
                let mi = d.re[v] * ei + d.im[v] * er;
                d.re[v] = mr;
                d.im[v] = mi;
                kf[v] += sf;
            }
        }
        b += chunk;
    }
    let mut re = acc.re[0].reduce_add() + acc.re[1].reduce_add();
    let mut im = acc.im[0].reduce_add() + acc.im[1].reduce_add();
    for i in blocks * LANES as u64..count {
        let k = (first + i * stride) as u128;
        let (c, s) = cis_turns(u.turns(k * k));
        let w = 1.0 / (k as f64 * k as f64);
        re += w * c;
        im += w * s;
    }
    Complex64::new(re, im)
}

struct Lanes {
    re: [f64x4; 2],
    im: [f64x4; 2],
}

impl Lanes {
    fn zero() -> Self {
        Lanes { re: [f64x4::ZERO; 2], im: [f64x4::ZERO; 2] }
    }

    fn set(&mut self, l: usize, re: f64, im: f64) {
        let mut a = self.re[l / 4].to_array();
        a[l % 4] = re;
        self.re[l / 4] = f64x4::from(a);
        let mut a = self.im[l / 4].to_array();
        a[l % 4] = im;
        self.im[l / 4] = f64x4::from(a);
    }
}

/// Reference implementation: every phase reduced exactly. Slow; used by tests.
pub fn weighted_sum_exact(u: &Rate, first: u64, stride: u64, count: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..count {
        let k = (first + i * stride) as u128;
        let (c, s) = cis_turns(u.turns(k * k));
        acc += Complex64::new(c, s) / (k as f64 * k as f64);
    }
    acc
}
