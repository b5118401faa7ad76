//! Increments `φ(t_{p,q} + h) − φ(t_{p,q})` by Poisson summation over residue classes.
//!
//! With `S_m = G(−p, m, q)` and `A_m = m²/(4q²)`,
//!
//! `Δ(h) = e^{iπ/4}/(2√π q) · Σ_m S_m ∫_0^h s^{-1/2} e^{iA_m/s} ds`.
//!
//! The `m = 0` integral is `2√h`. For `m ≠ 0` it is `√A_m G_{3/2}(A_m/h)`; its
//! leading part `4iq²h^{3/2} e^{iA_m/h}/m²` is summed with the Weyl-sum kernel
//! and the remainder, `O(h^{5/2}/m⁴)`, term by term. Both tails are bounded
//! with `|S_m| ≤ max|S|`.

use super::gauss::gauss_table;
use crate::constants::pi_dd;
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::kernel::weighted_sum;
use crate::phase::{cis_turns, Rate};
use crate::series::Evaluation;
use crate::special::osc_tail_remainder;
use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_EVEN_Q: u64 = 1 << 13;
const MAX_ODD_Q: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub struct LocalIncrement {
    p: i64,
    q: u64,
    /// `S_m` for `m ∈ [0, q)`
    sums: Vec<Complex64>,
    max_sum: f64,
}

impl LocalIncrement {
    pub fn new(p: i64, q: u64) -> Result<Self> {
        if q == 0 || num_integer::gcd(p, q as i64) != 1 {
            return Err(Error::Argument(format!("{}/{} is not a reduced fraction", p, q)));
        }
        if q % 2 == 0 && q > MAX_EVEN_Q {
            return Err(Error::Capacity { needed: q * q, cap: MAX_EVEN_Q * MAX_EVEN_Q });
        }
        if q > MAX_ODD_Q {
            return Err(Error::Capacity { needed: q, cap: MAX_ODD_Q });
        }
        let sums = gauss_table(-p, q);
        let max_sum = sums.iter().map(|s| s.norm()).fold(0.0, f64::max);
        Ok(LocalIncrement { p, q, sums, max_sum })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `S_m` for any integer `m`.
    pub fn sum(&self, m: i64) -> Complex64 {
        self.sums[m.rem_euclid(self.q as i64) as usize]
    }

    /// Increment at offset `h` (curve parameter), absolute error ≤ `tol`.
    pub fn eval(&self, h: f64, tol: f64, max_terms: u64) -> Result<Evaluation> {
        if !h.is_finite() || !(tol > 0.0) {
            return Err(Error::Argument("increment needs finite h and positive tol".into()));
        }
        if h == 0.0 {
            return Ok(Evaluation { value: Complex64::new(0.0, 0.0), err_bound: 0.0, terms: 0 });
        }
        if h > 0.0 {
            return self.eval_positive(h, tol, max_terms, |m| self.sum(m));
        }
        // φ(t−|h|) − φ(t) = conj of the increment at −p, whose sums are conj(S_{−m})
        let r = self.eval_positive(-h, tol, max_terms, |m| self.sum(-m).conj())?;
        Ok(Evaluation { value: r.value.conj(), ..r })
    }

    fn eval_positive(&self, h: f64, tol: f64, max_terms: u64, s: impl Fn(i64) -> Complex64) -> Result<Evaluation> {
        let q = self.q as f64;
        let pref = Complex64::from_polar(1.0 / (2.0 * PI.sqrt() * q), PI / 4.0);
        let smax = self.max_sum.max(1e-300);

        // leading oscillatory part: tail ≤ |pref| · 2 smax · 4q²h^{3/2} / M
        let lead_scale = pref.norm() * 2.0 * smax * 4.0 * q * q * h.powf(1.5);
        let m_lead = (lead_scale / (0.5 * tol)).ceil().max(1.0);
        // remainder: |√A (G_{3/2} − lead)| ≤ 3 h^{5/2}/A² = 48 q⁴ h^{5/2}/m⁴
        let rem_scale = pref.norm() * 2.0 * smax * 48.0 * q.powi(4) * h.powf(2.5) / 3.0;
        let m_rem = (rem_scale / (0.25 * tol)).cbrt().ceil().max(1.0);
        if m_lead > max_terms as f64 || m_rem > max_terms as f64 {
            return Err(Error::Capacity { needed: m_lead.max(m_rem).min(u64::MAX as f64) as u64, cap: max_terms });
        }
        let (m_lead, m_rem) = (m_lead as u64, m_rem as u64);

        // turns per m²: A_m/h / 2π = 1/(8π q² h), built exactly from h
        let rate = Rate::from_dd((pi_dd() * Dd::from_f64(h) * (8.0 * q * q)).recip());

        let mut acc = s(0) * (2.0 * h.sqrt());

        let mut lead = Complex64::new(0.0, 0.0);
        if self.q as f64 * 16.0 < m_lead as f64 {
            for r in 1..=self.q {
                if r > m_lead {
                    break;
                }
                let count = (m_lead - r) / self.q + 1;
                let w = s(r as i64) + s(-(r as i64));
                lead += w * weighted_sum(&rate, r, self.q, count);
            }
        } else {
            for m in 1..=m_lead {
                let (c, si) = cis_turns(rate.turns(m as u128 * m as u128));
                let w = s(m as i64) + s(-(m as i64));
                lead += w * Complex64::new(c, si) / (m as f64 * m as f64);
            }
        }
        acc += lead * Complex64::new(0.0, 4.0 * q * q * h.powf(1.5));

        let mut rem = Complex64::new(0.0, 0.0);
        for m in (1..=m_rem).rev() {
            let mf = m as f64;
            let a = mf * mf / (4.0 * q * q);
            let z = a / h;
            let (c, si) = cis_turns(rate.turns(m as u128 * m as u128));
            let g = osc_tail_remainder(1, z, Complex64::new(c, si));
            rem += (s(m as i64) + s(-(m as i64))) * (a.sqrt() * g);
        }
        acc += rem;

        let value = pref * acc;
        let bound = lead_scale / m_lead as f64 + rem_scale / (m_rem as f64).powi(3) + 1e-15 * value.norm();
        Ok(Evaluation { value, err_bound: bound, terms: m_lead + m_rem })
    }
}
