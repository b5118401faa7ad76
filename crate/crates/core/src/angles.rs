//! Angles on the circle.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Representative in `(-π, π]`.
pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Unsigned angle between two nonzero complex numbers, in `[0, π]`.
pub fn between(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg().abs()
}

/// Median of angles after unwrapping around the first one.
pub fn circular_median(angles: &[f64]) -> Option<f64> {
    let first = *angles.first()?;
    let mut un: Vec<f64> = angles.iter().map(|a| first + wrap(a - first)).collect();
    un.sort_by(|a, b| a.total_cmp(b));
    let n = un.len();
    let m = if n % 2 == 1 { un[n / 2] } else { 0.5 * (un[n / 2 - 1] + un[n / 2]) };
    Some(wrap(m))
}

/// Largest gap between consecutive directions on the circle; `2π` when empty.
pub fn max_gap(angles: &[f64]) -> f64 {
    if angles.is_empty() {
        return TAU;
    }
    let mut a: Vec<f64> = angles.iter().map(|x| x.rem_euclid(TAU)).collect();
    a.sort_by(|x, y| x.total_cmp(y));
    let mut gap = a[0] + TAU - a[a.len() - 1];
    for w in a.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap
}

/// Largest pairwise angle within a set of directions.
pub fn dispersion(dirs: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            d = d.max(between(dirs[i], dirs[j]));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_and_gaps() {
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(max_gap(&[]), TAU);
        assert!((max_gap(&[0.0]) - TAU).abs() < 1e-15);
        assert!((max_gap(&[0.0, PI]) - PI).abs() < 1e-15);
        let m = circular_median(&[PI - 0.1, -PI + 0.1, PI - 0.05]).unwrap();
        assert!((wrap(m - (PI - 0.05))).abs() < 1e-12);
    }
}
