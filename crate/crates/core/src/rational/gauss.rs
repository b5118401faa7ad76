//! Quadratic Gauss sums with exact residue arithmetic.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `Σ_{k=0}^{q-1} e^{2πi(p k² + m k)/q}` by direct summation.
pub fn gauss_sum(p: i64, m: i64, q: u64) -> Complex64 {
    assert!(q >= 1, "q must be positive");
    let qi = q as i128;
    let (p, m) = ((p as i128).rem_euclid(qi), (m as i128).rem_euclid(qi));
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..qi {
        let r = (p * k % qi * k + m * k) % qi;
        acc += cis_fraction(r as u64, q);
    }
    acc
}

/// `e^{2πi r/q}` for an exact residue.
pub fn cis_fraction(r: u64, q: u64) -> Complex64 {
    // fold to [0, q/2] so the angle stays small and sin/cos stay accurate
    let (r2, neg) = if 2 * r > q { (q - r, true) } else { (r, false) };
    let a = TAU * (r2 as f64 / q as f64);
    let (s, c) = a.sin_cos();
    Complex64::new(c, if neg { -s } else { s })
}

/// Modular inverse of `a` mod `q` (gcd must be 1).
pub fn mod_inverse(a: i64, q: i64) -> Option<i64> {
    let (mut r0, mut r1) = (a.rem_euclid(q) as i128, q as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(q as i128) as i64)
}

/// All `S_m = G(a, m, q)` for `m ∈ [0, q)`.
///
/// Odd `q`: completing the square gives `S_m = e^{-2πi m² (4a)^{-1}/q} S_0`.
/// Even `q` falls back to direct summation, `O(q²)`.
pub fn gauss_table(a: i64, q: u64) -> Vec<Complex64> {
    if q % 2 == 1 {
        let s0 = gauss_sum(a, 0, q);
        if q == 1 {
            return vec![s0];
        }
        let inv4a = mod_inverse(4 * a.rem_euclid(q as i64), q as i64).expect("a coprime to odd q");
        let qi = q as i128;
        (0..q)
            .map(|m| {
                let e = (m as i128 * m as i128 % qi * inv4a as i128 % qi) as u64;
                s0 * cis_fraction((q - e) % q, q)
            })
            .collect()
    } else {
        (0..q).map(|m| gauss_sum(a, m as i64, q)).collect()
    }
}
