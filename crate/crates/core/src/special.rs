//! Oscillatory tails `G_ν(z) = ∫_z^∞ e^{iy} y^{-ν} dy` for half-integer `ν`.
//!
//! `G_{1/2}` comes from the Fresnel integrals; higher orders follow from the
//! integration-by-parts recurrence `G_ν = i e^{iz} z^{-ν} - iν G_{ν+1}`.
//! For large `z` the asymptotic series of the same recurrence is used.

use num_complex::Complex64;
use std::f64::consts::PI;

const EPS: f64 = 1e-17;
const ASYMPTOTIC_FROM: f64 = 36.0;

/// `(1+i)/2 - (C(T) + i S(T))` with `T = √(2z/π)`, where `eiz = e^{iz}`.
fn fresnel_complement(z: f64, eiz: Complex64) -> Complex64 {
    let t = (2.0 * z / PI).sqrt();
    let half = Complex64::new(0.5, 0.5);
    if t <= 1.5 {
        // power series for C and S
        let fact = PI / 2.0 * t * t;
        let (mut sum, mut sums, mut sumc) = (0.0, 0.0, t);
        let mut sign = 1.0;
        let mut term = t;
        let mut odd = true;
        let mut n = 3.0;
        for k in 1..200 {
            term *= fact / k as f64;
            sum += sign * term / n;
            let test = sum.abs() * EPS;
            if odd {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if term < test {
                break;
            }
            odd = !odd;
            n += 2.0;
        }
        return half - Complex64::new(sumc, sums);
    }
    // continued fraction (modified Lentz) for the complementary function
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, -PI * t * t);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..400 {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < EPS {
            break;
        }
    }
    h *= Complex64::new(t, -t);
    half * eiz * h
}

/// `∫_z^∞ e^{iy} y^{-ν} dy` for `ν = n + 1/2`, `z > 0`, given `eiz = e^{iz}`.
///
/// Passing the exponential separately lets callers with huge `z` supply a
/// phase reduced in extended precision.
pub fn osc_tail(half_order: u32, z: f64, eiz: Complex64) -> Complex64 {
    let nu0 = 0.5;
    let nu = nu0 + half_order as f64;
    assert!(z > 0.0, "osc_tail needs z > 0");
    if z >= ASYMPTOTIC_FROM {
        return asymptotic(nu, z, eiz);
    }
    let mut g = (2.0 * PI).sqrt() * fresnel_complement(z, eiz);
    let mut v = nu0;
    while v < nu - 0.25 {
        let a = Complex64::i() * eiz * z.powf(-v);
        g = -Complex64::i() * (a - g) / v;
        v += 1.0;
    }
    g
}

/// `G_ν(z) - i e^{iz} z^{-ν}`: the tail with its leading asymptotic term removed.
pub fn osc_tail_remainder(half_order: u32, z: f64, eiz: Complex64) -> Complex64 {
    let nu = 0.5 + half_order as f64;
    if z >= ASYMPTOTIC_FROM {
        return asymptotic_from(nu, z, eiz, 1);
    }
    osc_tail(half_order, z, eiz) - Complex64::i() * eiz * z.powf(-nu)
}

fn asymptotic(nu: f64, z: f64, eiz: Complex64) -> Complex64 {
    asymptotic_from(nu, z, eiz, 0)
}

// G_ν = i e^{iz} z^{-ν} Σ_j (ν)_j (-i/z)^j, summed from j = first
fn asymptotic_from(nu: f64, z: f64, eiz: Complex64, first: usize) -> Complex64 {
    let lead = Complex64::i() * eiz * z.powf(-nu);
    let step = Complex64::new(0.0, -1.0 / z);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    for j in 0..200 {
        let mag = term.norm();
        if mag > prev || mag < 1e-18 {
            break;
        }
        if j >= first {
            sum += term;
        }
        prev = mag;
        term = term * step * (nu + j as f64);
    }
    lead * sum
}

/// `e^{iz}` for moderate `z`.
pub fn cis(z: f64) -> Complex64 {
    let (s, c) = z.sin_cos();
    Complex64::new(c, s)
}
