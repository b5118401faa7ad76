//! Secant directions, cones and the no-tangent certificates.

use crate::angles::{between, dispersion, max_gap, wrap};
use crate::constants::pi_rational;
use crate::continued_fractions::{convergents, cf_expand_prefix, odd_denominator_subsequence, side_filtered, Approach, Convergent};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::rational::{classify, fit_eighth_root, EighthRoot, Klass, LocalIncrement, Side};
use crate::scaling::{grid_point, locate_window};
use crate::series::{eval_phi_x, EvalConfig};
use crate::time::{TimePoint, Variable, XParam};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive, Zero};
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// Closed single or double cone with vertex, axis and half-aperture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone<T> {
    pub vertex: Complex<T>,
    pub direction: Complex<T>,
    pub half_aperture: T,
    pub double: bool,
}

impl<T: Float> Cone<T> {
    pub fn new(vertex: Complex<T>, direction: Complex<T>, half_aperture: T, double: bool) -> Result<Self> {
        let n = direction.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Argument("cone direction must be nonzero".into()));
        }
        let pi = T::from(PI).unwrap();
        if !(half_aperture > T::zero() && half_aperture < pi) {
            return Err(Error::Argument("half-aperture must lie in (0, π)".into()));
        }
        Ok(Cone { vertex, direction: direction / n, half_aperture, double })
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        let d = z - self.vertex;
        if d.norm() == T::zero() {
            return true;
        }
        // closed boundary, up to rounding in the angle
        let slack = T::from(1e-12).unwrap();
        let a = (d * self.direction.conj()).arg().abs();
        let pi = T::from(PI).unwrap();
        a <= self.half_aperture + slack || (self.double && pi - a <= self.half_aperture + slack)
    }
}

pub fn cone_member<T: Float>(cone: &Cone<T>, z: Complex<T>) -> bool {
    cone.contains(z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleKind {
    /// `start · ratio^n`
    Geometric { start: f64, ratio: f64 },
    /// `1/(period·n + t0)`
    Reciprocal { period: f64, t0: f64 },
    /// `1/(period·(n + v_n))` with `v_n` the base-2 van der Corput sequence, so the
    /// phase within a period fills `[0, 1)` and shorter schedules are prefixes of longer ones
    Sweep { period: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffsetSchedule {
    pub kind: ScheduleKind,
    pub count: usize,
    pub side: Side,
}

impl OffsetSchedule {
    pub fn geometric(start: f64, ratio: f64, count: usize, side: Side) -> Result<Self> {
        if !(start > 0.0 && ratio > 0.0 && ratio < 1.0) || count == 0 {
            return Err(Error::Argument("need start > 0, ratio ∈ (0,1), count ≥ 1".into()));
        }
        Ok(OffsetSchedule { kind: ScheduleKind::Geometric { start, ratio }, count, side })
    }

    /// Offsets one spiral period `32πq̃²` apart in `1/h`, spread over the period.
    pub fn spiral_sweep(q_tilde: u64, count: usize, side: Side) -> Result<Self> {
        if count == 0 || q_tilde == 0 {
            return Err(Error::Argument("need count ≥ 1 and q̃ ≥ 1".into()));
        }
        let period = 32.0 * PI * (q_tilde * q_tilde) as f64;
        Ok(OffsetSchedule { kind: ScheduleKind::Sweep { period }, count, side })
    }

    pub fn reciprocal(period: f64, t0: f64, count: usize, side: Side) -> Result<Self> {
        if !(period > 0.0 && period + t0 > 0.0) || count == 0 {
            return Err(Error::Argument("need period > 0 and positive offsets".into()));
        }
        Ok(OffsetSchedule { kind: ScheduleKind::Reciprocal { period, t0 }, count, side })
    }

    /// Strictly decreasing positive offsets.
    pub fn offsets(&self) -> Vec<f64> {
        (1..=self.count)
            .map(|i| match self.kind {
                ScheduleKind::Geometric { start, ratio } => start * ratio.powi(i as i32 - 1),
                ScheduleKind::Reciprocal { period, t0 } => 1.0 / (period * i as f64 + t0),
                ScheduleKind::Sweep { period } => 1.0 / (period * (i as f64 + van_der_corput(i as u64))),
            })
            .collect()
    }
}

fn van_der_corput(mut n: u64) -> f64 {
    let (mut v, mut b) = (0.0, 0.5);
    while n > 0 {
        if n & 1 == 1 {
            v += b;
        }
        b *= 0.5;
        n >>= 1;
    }
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub offsets: Vec<f64>,
    /// unit directions, in schedule order, zero increments dropped
    pub directions: Vec<Complex64>,
    pub limit_candidate: Option<Complex64>,
    /// largest pairwise angle over the second half of the directions
    pub dispersion: f64,
    pub max_gap: f64,
    pub skipped: usize,
}

/// Tail dispersion below which a limit direction is reported.
pub const LIMIT_DISPERSION: f64 = 1e-2;

fn report(offsets: Vec<f64>, dirs: Vec<Option<Complex64>>) -> Result<ProbeReport> {
    let skipped = dirs.iter().filter(|d| d.is_none()).count();
    let directions: Vec<Complex64> = dirs.into_iter().flatten().collect();
    if directions.is_empty() {
        return Err(Error::Degenerate("every offset gave a zero increment".into()));
    }
    let tail = &directions[directions.len() / 2..];
    let disp = dispersion(tail);
    let limit_candidate = if tail.len() >= 2 && disp < LIMIT_DISPERSION {
        let m: Complex64 = tail.iter().sum();
        Some(m / m.norm())
    } else {
        None
    };
    let angles: Vec<f64> = directions.iter().map(|d| d.arg()).collect();
    Ok(ProbeReport { offsets, max_gap: max_gap(&angles), directions, limit_candidate, dispersion: disp, skipped })
}

/// Probe any curve given its increment `h ↦ f(x+h) − f(x)`; increments of modulus
/// at most `zero_tol` are skipped.
pub fn probe_increments(
    increment: impl Fn(f64) -> Result<Complex64> + Sync,
    sched: &OffsetSchedule,
    zero_tol: f64,
) -> Result<ProbeReport> {
    let offsets = sched.offsets();
    let sign = sched.side.sign();
    let dirs = offsets
        .par_iter()
        .map(|&r| {
            let d = increment(sign * r)?;
            Ok(if d.norm() <= zero_tol { None } else { Some(d / d.norm()) })
        })
        .collect::<Result<Vec<_>>>()?;
    report(offsets, dirs)
}

/// Increments of `φ` around a fixed parameter.
#[derive(Clone, Debug)]
pub enum Increments {
    /// exact rational point: Poisson local evaluator
    Local(LocalIncrement),
    Direct { x: XParam, value: Complex64 },
}

impl Increments {
    pub fn new(t: &TimePoint, cfg: &EvalConfig) -> Result<Self> {
        if let Some((p, q)) = t.as_t_pq() {
            if let Ok(inc) = LocalIncrement::new(p, q as u64) {
                return Ok(Increments::Local(inc));
            }
        }
        let x = t.x_param();
        let value = eval_phi_x(&x, cfg)?.value;
        Ok(Increments::Direct { x, value })
    }

    /// `φ(t+h) − φ(t)`, or `None` when it cannot be told apart from zero.
    pub fn at(&self, h: f64, cfg: &EvalConfig) -> Result<Option<Complex64>> {
        match self {
            Increments::Local(inc) => {
                let mut tol = cfg.tol;
                for _ in 0..4 {
                    let v = inc.eval(h, tol, cfg.max_terms)?.value;
                    if v.norm() > 1e3 * tol {
                        return Ok(Some(v));
                    }
                    tol *= 1e-4;
                }
                Ok(None)
            }
            Increments::Direct { x, value } => {
                let tol = 0.5 * cfg.tol;
                let v = eval_phi_x(&x.shifted_t(h), &EvalConfig { tol, ..*cfg })?.value - value;
                Ok(if v.norm() <= 10.0 * cfg.tol { None } else { Some(v) })
            }
        }
    }
}

/// Unit `φ(t±r) − φ(t)`; `None` for a zero increment.
pub fn secant_direction(t: &TimePoint, r: f64, side: Side, cfg: &EvalConfig) -> Result<Option<Complex64>> {
    if !(r > 0.0) {
        return Err(Error::Argument("offset must be positive".into()));
    }
    let inc = Increments::new(t, cfg)?;
    Ok(inc.at(side.sign() * r, cfg)?.map(|d| d / d.norm()))
}

fn probe_with(inc: &Increments, sched: &OffsetSchedule, cfg: &EvalConfig) -> Result<ProbeReport> {
    let offsets = sched.offsets();
    let sign = sched.side.sign();
    let dirs = offsets
        .par_iter()
        .map(|&r| Ok(inc.at(sign * r, cfg)?.map(|d| d / d.norm())))
        .collect::<Result<Vec<_>>>()?;
    report(offsets, dirs)
}

pub fn probe_limit(t: &TimePoint, sched: &OffsetSchedule, cfg: &EvalConfig) -> Result<ProbeReport> {
    probe_with(&Increments::new(t, cfg)?, sched, cfg)
}

pub fn angular_coverage(t: &TimePoint, sched: &OffsetSchedule, cfg: &EvalConfig) -> Result<ProbeReport> {
    if sched.count < 100 {
        return Err(Error::Argument("angular coverage needs at least 100 offsets".into()));
    }
    probe_limit(t, sched, cfg)
}

/// Union of two reports; the merged report carries no limit candidate.
pub fn merge_reports(a: &ProbeReport, b: &ProbeReport) -> ProbeReport {
    let directions: Vec<Complex64> = a.directions.iter().chain(&b.directions).copied().collect();
    let angles: Vec<f64> = directions.iter().map(|d| d.arg()).collect();
    ProbeReport {
        offsets: a.offsets.iter().chain(&b.offsets).copied().collect(),
        max_gap: max_gap(&angles),
        directions,
        limit_candidate: None,
        dispersion: a.dispersion.max(b.dispersion),
        skipped: a.skipped + b.skipped,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CornerMismatch,
    SpiralSweep,
    IrrationalArc,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::CornerMismatch => "CornerMismatch",
            Verdict::SpiralSweep => "SpiralSweep",
            Verdict::IrrationalArc => "IrrationalArc",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

/// Directions taken at one convergent.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergentProbe {
    pub p: BigInt,
    pub q: BigInt,
    pub k: f64,
    pub window: Option<(u64, f64)>,
    pub q_values: Vec<f64>,
    pub directions: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub reason: String,
    pub right: Option<ProbeReport>,
    pub left: Option<ProbeReport>,
    /// angle between the side limits
    pub angle_diff: Option<f64>,
    pub e_fit: Option<EighthRoot>,
    pub convergents: Vec<ConvergentProbe>,
    /// smallest arc holding the directions at the deepest convergent
    pub arc: Option<f64>,
    pub distinct_directions: Option<usize>,
}

impl Certificate {
    fn new(verdict: Verdict, reason: impl Into<String>) -> Self {
        Certificate {
            verdict,
            reason: reason.into(),
            right: None,
            left: None,
            angle_diff: None,
            e_fit: None,
            convergents: vec![],
            arc: None,
            distinct_directions: None,
        }
    }
}

/// Tolerance separating a genuine tangent (side limits `π` apart) from a corner.
pub const OPPOSITE_TOL: f64 = 0.1;
/// Largest gap a spiral sweep may leave.
pub const SWEEP_GAP: f64 = 0.5;
/// Smallest arc and direction count for an irrational certificate.
pub const ARC_MIN: f64 = 0.3;
pub const DISTINCT_MIN: usize = 10;
/// Largest denominator used for irrational probes.
pub const MAX_PROBE_Q: u64 = 1 << 20;

/// Side schedules used for corner points: `q̃^{-2}·10^{-4}` halving 40 times.
pub fn corner_schedule(q_tilde: u64, side: Side) -> OffsetSchedule {
    OffsetSchedule::geometric(1e-4 / (q_tilde * q_tilde) as f64, 0.5, 40, side).unwrap()
}

pub fn no_tangent_certificate(t: &TimePoint, cfg: &EvalConfig) -> Result<Certificate> {
    let (t, _) = t.reduce_period();
    match t.as_t_pq() {
        Some((p, q)) => rational_certificate(p, q, &t, cfg),
        None if t.x_exact().is_some() && matches!(t.kind, crate::time::TimeKind::Rational { .. }) => {
            Ok(Certificate::new(Verdict::Inconclusive, "denominator too large for the local evaluator"))
        }
        None => irrational_certificate(&t, cfg),
    }
}

fn rational_certificate(p: i64, q: i64, t: &TimePoint, cfg: &EvalConfig) -> Result<Certificate> {
    let pt = classify(p, q)?;
    let inc = match Increments::new(t, cfg)? {
        Increments::Direct { .. } => return Ok(Certificate::new(Verdict::Inconclusive, "no local evaluator for this denominator")),
        i => i,
    };
    match pt.klass {
        Klass::Corner => {
            let right = probe_with(&inc, &corner_schedule(pt.q_tilde, Side::Right), cfg)?;
            let left = probe_with(&inc, &corner_schedule(pt.q_tilde, Side::Left), cfg)?;
            let e = fit_eighth_root(&pt, cfg).ok().and_then(|f| f.e_fit);
            let mut c = Certificate::new(Verdict::Inconclusive, "side limits did not settle");
            c.e_fit = e;
            if let (Some(r), Some(l)) = (right.limit_candidate, left.limit_candidate) {
                let diff = between(r, l);
                c.angle_diff = Some(diff);
                if (diff - PI).abs() > OPPOSITE_TOL {
                    c.verdict = Verdict::CornerMismatch;
                    c.reason = format!("side limits {:.4} rad apart, not opposite", diff);
                } else {
                    c.reason = "side limits are opposite".into();
                }
            }
            c.right = Some(right);
            c.left = Some(left);
            Ok(c)
        }
        Klass::Spiral => {
            let right = probe_with(&inc, &OffsetSchedule::spiral_sweep(pt.q_tilde, 500, Side::Right)?, cfg)?;
            let left = probe_with(&inc, &OffsetSchedule::spiral_sweep(pt.q_tilde, 500, Side::Left)?, cfg)?;
            let ok = right.max_gap < SWEEP_GAP && left.max_gap < SWEEP_GAP;
            let mut c = Certificate::new(
                if ok { Verdict::SpiralSweep } else { Verdict::Inconclusive },
                format!("max gaps {:.3} (right) and {:.3} (left)", right.max_gap, left.max_gap),
            );
            c.right = Some(right);
            c.left = Some(left);
            Ok(c)
        }
    }
}

/// `ρ = x` as a decimal-precision point, whichever variable `t` was given in.
fn rho_point(t: &TimePoint) -> TimePoint {
    match t.var {
        Variable::X => t.clone(),
        Variable::T => {
            let two_pi = pi_rational() * BigRational::from_integer(2.into());
            let digits = t.digits().unwrap_or(1074).min(195);
            TimePoint::with_precision(t.value() * two_pi, digits, Variable::X)
        }
    }
}

fn irrational_certificate(t: &TimePoint, cfg: &EvalConfig) -> Result<Certificate> {
    let rho = rho_point(t);
    let cf = cf_expand_prefix(&rho, 80)?;
    let convs: Vec<Convergent> = odd_denominator_subsequence(&convergents(&cf, &rho))
        .into_iter()
        .filter(|c| c.q > BigInt::from(1) && c.q <= BigInt::from(MAX_PROBE_Q) && c.side != Approach::Exact)
        .collect();
    let (l, r) = (side_filtered(&convs, Approach::Left), side_filtered(&convs, Approach::Right));
    let chosen = if l.len() >= r.len() { l } else { r };
    if chosen.len() < 2 {
        return Ok(Certificate::new(Verdict::Inconclusive, "fewer than two usable convergents"));
    }
    let last: Vec<Convergent> = chosen[chosen.len().saturating_sub(3)..].to_vec();
    let rho_value = rho.value().clone();
    let probes = last.iter().map(|c| convergent_probe(c, &rho_value, cfg)).collect::<Result<Vec<_>>>()?;
    // the deepest convergent alone must carry the evidence
    let all = &probes[probes.len() - 1].directions;
    let angles: Vec<f64> = all.iter().map(|d| d.arg()).collect();
    let arc = TAU - max_gap(&angles);
    let distinct = distinct_count(&angles, 1e-3);
    let ok = arc >= ARC_MIN && distinct >= DISTINCT_MIN;
    let mut c = Certificate::new(
        if ok { Verdict::IrrationalArc } else { Verdict::Inconclusive },
        format!("{} directions, {} distinct, arc {:.3} rad", all.len(), distinct, arc),
    );
    c.arc = Some(arc);
    c.distinct_directions = Some(distinct);
    c.convergents = probes;
    Ok(c)
}

fn distinct_count(angles: &[f64], sep: f64) -> usize {
    let mut a: Vec<f64> = angles.iter().map(|x| x.rem_euclid(TAU)).collect();
    a.sort_by(|x, y| x.total_cmp(y));
    let mut n = 0;
    let mut last = f64::NEG_INFINITY;
    for x in &a {
        if x - last > sep {
            n += 1;
            last = *x;
        }
    }
    if n > 1 && a[0] + TAU - a[a.len() - 1] <= sep {
        n -= 1;
    }
    n
}

/// Ratio `c/q` assumed for the window location of irrational probes.
pub const WINDOW_C: f64 = 2.5;

/// Secants from `φ(t_ρ)` to `φ(t_{p,q} ± Q/(2πq²))` for a grid of `Q`.
fn convergent_probe(c: &Convergent, rho: &BigRational, cfg: &EvalConfig) -> Result<ConvergentProbe> {
    let (p, q) = c.pq_i64().ok_or_else(|| Error::Argument("convergent too large".into()))?;
    let inc = LocalIncrement::new(p, q as u64)?;
    let diff = rho - BigRational::new(c.p.clone(), c.q.clone());
    let sign = if diff > BigRational::zero() { 1.0 } else { -1.0 };
    let h_rho = Dd::from_rational(&diff).to_f64() / (2.0 * PI);
    let qf = q as f64;
    let scale = 1.0 / (2.0 * PI * qf * qf);
    let mut qs: Vec<f64> = (-12..=12).filter(|j| *j != 0).map(|j| c.k * 2f64.powf(j as f64 / 2.0)).collect();
    let window = locate_window(c.k, WINDOW_C).ok();
    if let Some(w) = window {
        for i in 1..20 {
            let mu = w.m as f64 + 0.1 * i as f64;
            if let Ok(s) = grid_point(WINDOW_C, mu) {
                qs.push(2.0 * PI * s);
            }
        }
    }
    qs.retain(|x| (x - c.k).abs() > 1e-3 * c.k);
    // secants resolved to 1e-4 of their own size
    let size = |h: f64| (h.abs() / qf).sqrt() * 1e-4;
    let base = inc.eval(h_rho, size(h_rho).min(cfg.tol), cfg.max_terms)?.value;
    let dirs = qs
        .par_iter()
        .map(|&qv| {
            let h = sign * qv * scale;
            let tol = size(h).min(size(h_rho)).min(cfg.tol) * (qv - c.k).abs().min(1.0);
            let d = inc.eval(h, tol, cfg.max_terms)?.value - base;
            Ok(d / d.norm())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergentProbe {
        p: c.p.clone(),
        q: c.q.clone(),
        k: c.k,
        window: window.map(|w| (w.m, w.alpha)),
        q_values: qs,
        directions: dirs,
    })
}

/// Diameter of a finite point set (convex hull, then all hull pairs).
pub fn diameter<T: Float>(points: &[Complex<T>]) -> T {
    let hull = convex_hull(points);
    let mut d = T::zero();
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            d = d.max((hull[i] - hull[j]).norm());
        }
    }
    d
}

fn convex_hull<T: Float>(points: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut pts: Vec<Complex<T>> = points.to_vec();
    pts.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Complex<T>, a: Complex<T>, b: Complex<T>| (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
    let mut lower: Vec<Complex<T>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex<T>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Diameter of `f` sampled at `n` uniform parameters of `[a, b]`.
pub fn segment_content_with(f: impl Fn(f64) -> Result<Complex64> + Sync, a: f64, b: f64, n: usize) -> Result<f64> {
    if !(a < b) || n < 2 {
        return Err(Error::Argument("need a < b and n ≥ 2".into()));
    }
    let pts = (0..n)
        .into_par_iter()
        .map(|i| f(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(diameter(&pts))
}

/// Sampled diameter of `φ([a, b])`, doubling the sample until it moves by less than `1e-4`.
pub fn segment_content(a: f64, b: f64, n_samples: usize, cfg: &EvalConfig) -> Result<f64> {
    if !(a < b) || n_samples < 2 {
        return Err(Error::Argument("need a < b and n ≥ 2".into()));
    }
    let mut n = n_samples;
    let mut prev = diameter(&crate::geometry::sample_curve(a, b, n, cfg)?.points);
    for _ in 0..12 {
        n = 2 * n - 1;
        let d = diameter(&crate::geometry::sample_curve(a, b, n, cfg)?.points);
        if (d - prev).abs() < 1e-4 {
            return Ok(d);
        }
        prev = d;
    }
    Err(Error::NoConvergence("sampled diameter did not stabilise".into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallContent {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    /// parameters where the arc through `t` leaves the ball
    pub exits: (f64, f64),
}

/// Content of `φ(ℝ) ∩ B(φ(t), r)` bracketed by `[r, 2r]`, with the diameter of
/// the arc through `t` up to its first exits as the estimate. Values are taken
/// to `max(cfg.tol, 1e-3·r)`.
pub fn ball_content_bounds(t: &TimePoint, r: f64, cfg: &EvalConfig) -> Result<BallContent> {
    if !(r > 0.0) {
        return Err(Error::Argument("radius must be positive".into()));
    }
    let cfg = &EvalConfig { tol: cfg.tol.max(1e-3 * r), ..*cfg };
    let x0 = t.x_param();
    let c0 = eval_phi_x(&x0, cfg)?.value;
    let at = |h: f64| -> Result<Complex64> { Ok(eval_phi_x(&x0.shifted_t(h), cfg)?.value - c0) };
    let mut exits = [0.0f64; 2];
    let mut boundary = [Complex64::zero(); 2];
    for (i, sign) in [1.0f64, -1.0].into_iter().enumerate() {
        // march outward on a doubling scale, scanning each shell on a grid
        let mut inside = 0.0;
        let mut found = None;
        let mut h = (r * r).min(1e-3);
        while h <= 1.0 / (2.0 * PI) {
            let steps = 64;
            for j in 1..=steps {
                let u = inside + (h - inside) * j as f64 / steps as f64;
                if at(sign * u)?.norm() >= r {
                    found = Some((inside + (h - inside) * (j - 1) as f64 / steps as f64, u));
                    break;
                }
            }
            if found.is_some() {
                break;
            }
            inside = h;
            h *= 2.0;
        }
        let (mut a, mut b) = match found {
            Some(v) => v,
            None => return Err(Error::Inconclusive("no escape from the ball within one period".into())),
        };
        for _ in 0..50 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if at(sign * m)?.norm() >= r {
                b = m;
            } else {
                a = m;
            }
        }
        exits[i] = sign * b;
        // the exit point, placed on the sphere
        let p = at(sign * b)?;
        boundary[i] = p * (r / p.norm());
    }
    // the arc between the exits, sampled finely
    let n = 1024;
    let (lo_t, hi_t) = (exits[1], exits[0]);
    let mut pts: Vec<Complex64> = (1..n)
        .into_par_iter()
        .map(|j| at(lo_t + (hi_t - lo_t) * j as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    pts.retain(|p| p.norm() <= r);
    pts.extend(boundary);
    pts.push(Complex64::zero());
    Ok(BallContent { lo: r, hi: 2.0 * r, estimate: diameter(&pts), exits: (exits[1], exits[0]) })
}

/// Angle of `d` measured from `e(1±i)/√2`.
pub fn deviation_from(d: Complex64, target: Complex64) -> f64 {
    wrap(d.arg() - target.arg()).abs()
}

pub fn direction_to_f64(d: &BigInt) -> f64 {
    d.to_f64().unwrap_or(f64::NAN)
}
