//! Sampled images of `φ` and box-counting dimension estimates.

use crate::error::{Error, Result};
use crate::series::{eval_phi_x, truncation_length, EvalConfig};
use crate::time::XParam;
use num_complex::{Complex, Complex64};
use num_traits::Float;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Largest transform the sampler will plan.
pub const MAX_FFT_LEN: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline<T> {
    pub params: Vec<T>,
    pub points: Vec<Complex<T>>,
}

impl<T: Float> Polyline<T> {
    pub fn new(params: Vec<T>, points: Vec<Complex<T>>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::Argument("params and points differ in length".into()));
        }
        if params.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Argument("params must increase strictly".into()));
        }
        Ok(Polyline { params, points })
    }

    /// Polyline through `points` parametrised by index.
    pub fn from_points(points: Vec<Complex<T>>) -> Self {
        let params = (0..points.len()).map(|i| T::from(i).unwrap()).collect();
        Polyline { params, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest distance between consecutive points.
    pub fn max_step(&self) -> T {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).fold(T::zero(), T::max)
    }

    pub fn translate(&self, by: Complex<T>) -> Self {
        Polyline { params: self.params.clone(), points: self.points.iter().map(|p| *p + by).collect() }
    }
}

/// `φ` on the grid `x = j/L`, `j0 ≤ j ≤ j1`, from one length-`L` transform.
///
/// `Σ_k e^{-2πik²j/L}/k²` only depends on `k² mod L`, so the weights are binned
/// by residue first.
pub fn sample_x_grid(j0: i64, j1: i64, l: u64, cfg: &EvalConfig) -> Result<Polyline<f64>> {
    cfg.validate()?;
    if j1 < j0 || l == 0 {
        return Err(Error::Argument("empty grid".into()));
    }
    if l > MAX_FFT_LEN {
        return Err(Error::Capacity { needed: l, cap: MAX_FFT_LEN });
    }
    let n = truncation_length(cfg.tol, cfg)?;
    let mut bins = vec![0.0f64; l as usize];
    // r = k² mod L, d = 2k+1 mod L
    let (mut r, mut d) = (1 % l, 3 % l);
    for k in 1..=n {
        let kf = k as f64;
        bins[r as usize] += 1.0 / (kf * kf);
        r += d;
        if r >= l {
            r -= l;
        }
        d += 2;
        while d >= l {
            d -= l;
        }
    }
    let mut buf: Vec<Complex64> = bins.into_iter().map(|b| Complex64::new(b, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(l as usize).process(&mut buf);
    let lf = l as f64;
    let two_pi2 = 2.0 * PI * PI;
    let (params, points) = (j0..=j1)
        .map(|j| {
            let t = j as f64 / (2.0 * PI * lf);
            let s = buf[j.rem_euclid(l as i64) as usize];
            (t, Complex64::new(1.0 / 12.0, t) - s / two_pi2)
        })
        .unzip();
    Ok(Polyline { params, points })
}

fn phi_at_t(t: f64, cfg: &EvalConfig) -> Result<Complex64> {
    Ok(eval_phi_x(&XParam::from_f64(0.0).shifted_t(t), cfg)?.value)
}

/// `n` equally spaced parameters on `[a, b]` with `φ` to `cfg.tol`.
pub fn sample_curve(a: f64, b: f64, n: usize, cfg: &EvalConfig) -> Result<Polyline<f64>> {
    if !(a < b) || n < 2 {
        return Err(Error::Argument("need a < b and n ≥ 2".into()));
    }
    let (xa, xb) = (2.0 * PI * a, 2.0 * PI * b);
    let l = (n - 1) as f64 / (xb - xa);
    let j0 = xa * l.round();
    let aligned = (l - l.round()).abs() < 1e-6 && (j0 - j0.round()).abs() < 1e-6 * l.max(1.0).sqrt() && l.round() >= 1.0;
    if aligned && (l.round() as u64) <= MAX_FFT_LEN && n as f64 >= 0.01 * l {
        let j0 = j0.round() as i64;
        let mut poly = sample_x_grid(j0, j0 + n as i64 - 1, l.round() as u64, cfg)?;
        // keep the requested endpoints exactly
        poly.params[0] = a;
        *poly.params.last_mut().unwrap() = b;
        return Ok(poly);
    }
    let params: Vec<f64> = (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect();
    let points = params.par_iter().map(|&t| phi_at_t(t, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(Polyline { params, points })
}

/// Insert midpoints until consecutive points are closer than `max_gap`.
pub fn refine_to_resolution(poly: &Polyline<f64>, max_gap: f64, cfg: &EvalConfig) -> Result<Polyline<f64>> {
    let mut cur = poly.clone();
    for _ in 0..60 {
        let bad: Vec<usize> = (0..cur.len().saturating_sub(1))
            .filter(|&i| (cur.points[i + 1] - cur.points[i]).norm() >= max_gap)
            .collect();
        if bad.is_empty() {
            return Ok(cur);
        }
        let mids = bad
            .par_iter()
            .map(|&i| {
                let t = 0.5 * (cur.params[i] + cur.params[i + 1]);
                if !(t > cur.params[i] && t < cur.params[i + 1]) {
                    return Err(Error::Resolution("parameter spacing exhausted".into()));
                }
                Ok((t, phi_at_t(t, cfg)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut params = Vec::with_capacity(cur.len() + mids.len());
        let mut points = Vec::with_capacity(cur.len() + mids.len());
        let mut it = bad.iter().zip(mids).peekable();
        for i in 0..cur.len() {
            params.push(cur.params[i]);
            points.push(cur.points[i]);
            if let Some((_, (t, p))) = it.next_if(|(&b, _)| b == i) {
                params.push(t);
                points.push(p);
            }
        }
        cur = Polyline { params, points };
    }
    Err(Error::Resolution(format!("gaps above {:e} remain after refinement", max_gap)))
}

/// Occupied cells of the `eps`-grid anchored at the origin.
pub fn box_count<T: Float>(poly: &Polyline<T>, eps: T) -> u64 {
    let mut keys: Vec<(i64, i64)> = poly
        .points
        .iter()
        .map(|p| ((p.re / eps).floor().to_i64().unwrap_or(i64::MAX), (p.im / eps).floor().to_i64().unwrap_or(i64::MAX)))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len() as u64
}

/// `8` levels per decade, endpoints included.
pub fn default_levels(eps_lo: f64, eps_hi: f64) -> usize {
    ((eps_hi / eps_lo).log10() * 8.0).round() as usize + 1
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub stderr: f64,
    pub eps: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Least-squares slope of `log N(ε)` against `log(1/ε)` on a geometric ladder.
pub fn dimension_estimate<T: Float + Send + Sync>(
    poly: &Polyline<T>,
    eps_lo: f64,
    eps_hi: f64,
    levels: usize,
) -> Result<DimensionEstimate> {
    if !(eps_lo > 0.0 && eps_lo < eps_hi) || levels < 3 {
        return Err(Error::Argument("need 0 < eps_lo < eps_hi and at least 3 levels".into()));
    }
    let step = poly.max_step().to_f64().unwrap_or(f64::INFINITY);
    if !(step < eps_lo / 4.0) {
        return Err(Error::Resolution(format!("max step {:e} is not below eps_lo/4 = {:e}", step, eps_lo / 4.0)));
    }
    let eps: Vec<f64> =
        (0..levels).map(|i| eps_lo * (eps_hi / eps_lo).powf(i as f64 / (levels - 1) as f64)).collect();
    let counts: Vec<u64> = eps.par_iter().map(|&e| box_count(poly, T::from(e).unwrap())).collect();
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, stderr) = linear_fit(&xs, &ys);
    Ok(DimensionEstimate { slope, stderr, eps, counts })
}

/// Slope and its standard error for `y ≈ a + b x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let se = if xs.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (b, se)
}

/// Straight segment from `a` to `b` with `n` points.
pub fn segment<T: Float>(a: Complex<T>, b: Complex<T>, n: usize) -> Polyline<T> {
    let d = T::from(n.max(2) - 1).unwrap();
    Polyline::from_points((0..n.max(2)).map(|i| a + (b - a) * (T::from(i).unwrap() / d)).collect())
}

/// Koch curve on `[0, 1]` at the given depth, each edge subdivided into `sub` pieces.
pub fn koch<T: Float>(depth: u32, sub: usize) -> Polyline<T> {
    let mut pts = vec![Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())];
    let three = T::from(3.0).unwrap();
    let rot = Complex::from_polar(T::one(), T::from(PI / 3.0).unwrap());
    for _ in 0..depth {
        let mut next = Vec::with_capacity(pts.len() * 4);
        for w in pts.windows(2) {
            let d = (w[1] - w[0]) / three;
            let p1 = w[0] + d;
            next.extend([w[0], p1, p1 + d * rot, w[0] + d * T::from(2.0).unwrap()]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    let sub = sub.max(1);
    let mut out = Vec::with_capacity(pts.len() * sub);
    for w in pts.windows(2) {
        for i in 0..sub {
            out.push(w[0] + (w[1] - w[0]) * (T::from(i).unwrap() / T::from(sub).unwrap()));
        }
    }
    out.push(*pts.last().unwrap());
    Polyline::from_points(out)
}

/// Serpentine path through the `rows × rows` grid of `[0, 1)²`.
pub fn filled_square<T: Float>(rows: usize) -> Polyline<T> {
    let d = T::from(rows.max(1)).unwrap();
    let mut out = Vec::with_capacity(rows * rows);
    for r in 0..rows {
        for c in 0..rows {
            let c = if r % 2 == 0 { c } else { rows - 1 - c };
            out.push(Complex::new(T::from(c).unwrap() / d, T::from(r).unwrap() / d));
        }
    }
    Polyline::from_points(out)
}
