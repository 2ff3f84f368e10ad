//! Three-term recurrences of the classical Laguerre and Jacobi weights.
//!
//! Used both as the θ = 1 reference family and to build Gauss rules.

use crate::dd::Dd;
use crate::error::{MbError, Result};
use crate::poly::MonicPoly;
use crate::specfun::ln_gamma_dd;
use crate::weights::WeightSpec;

/// Monic recurrence `p_{k+1}(x) = (x - alpha_k) p_k(x) - beta_k p_{k-1}(x)`, with
/// `beta_0` the total mass of the weight.
#[derive(Clone, Debug)]
pub struct Recurrence {
    pub alpha: Vec<Dd>,
    pub beta: Vec<Dd>,
}

/// Coefficients `0..n` for `x^a e^{-x}` on `(0, ∞)`.
pub fn laguerre_recurrence(n: usize, a: f64) -> Result<Recurrence> {
    if !(a > -1.0) {
        return Err(MbError::Domain(format!("laguerre recurrence needs a > -1 (got {a})")));
    }
    let ta = Dd::from(a);
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for k in 0..n {
        let kf = Dd::from(k as f64);
        alpha.push(kf * 2.0 + ta + 1.0);
        beta.push(if k == 0 { ln_gamma_dd(ta + 1.0).exp() } else { kf * (kf + ta) });
    }
    Ok(Recurrence { alpha, beta })
}

/// Coefficients `0..n` for `x^a (1-x)^b` on `(0, 1)`, from the symmetric-interval
/// Jacobi recurrence under `t = 2x - 1`.
pub fn jacobi01_recurrence(n: usize, a: f64, b: f64) -> Result<Recurrence> {
    if !(a > -1.0) || !(b > -1.0) {
        return Err(MbError::Domain(format!("jacobi recurrence needs a, b > -1 (got a = {a}, b = {b})")));
    }
    // On (-1, 1) the weight is (1-t)^b (1+t)^a.
    let (ta, tb) = (Dd::from(a), Dd::from(b));
    let s = ta + tb;
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for k in 0..n {
        let kf = Dd::from(k as f64);
        let big_a = if k == 0 {
            (ta - tb) / (s + 2.0)
        } else {
            let d = kf * 2.0 + s;
            (ta * ta - tb * tb) / (d * (d + 2.0))
        };
        alpha.push((big_a + 1.0) * 0.5);
        let big_b = match k {
            0 => (ln_gamma_dd(ta + 1.0) + ln_gamma_dd(tb + 1.0) - ln_gamma_dd(s + 2.0)).exp() * 4.0,
            1 => (ta + 1.0) * (tb + 1.0) * 4.0 / ((s + 2.0).sqr() * (s + 3.0)),
            _ => {
                let d = kf * 2.0 + s;
                kf * 4.0 * (kf + ta) * (kf + tb) * (kf + s) / (d.sqr() * (d + 1.0) * (d - 1.0))
            }
        };
        beta.push(big_b * 0.25);
    }
    Ok(Recurrence { alpha, beta })
}

/// Monic classical orthogonal polynomial of degree `k` for a Laguerre or Jacobi weight.
pub fn reference_classical(w: &WeightSpec, k: usize) -> Result<MonicPoly> {
    let rec = match *w {
        WeightSpec::Laguerre { a } => laguerre_recurrence(k, a)?,
        WeightSpec::Jacobi { a, b } => jacobi01_recurrence(k, a, b)?,
        _ => {
            return Err(MbError::Domain(format!(
                "reference_classical supports laguerre and jacobi weights only, got {w}"
            )))
        }
    };
    let mut prev: Vec<Dd> = Vec::new();
    let mut cur = vec![Dd::ONE];
    for j in 0..k {
        let mut next = vec![Dd::ZERO; j + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= rec.alpha[j] * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= rec.beta[j] * c;
        }
        prev = cur;
        cur = next;
    }
    MonicPoly::from_coeffs(cur)
}

/// Monic `p_n(x)` and `p_n'(x)` from a recurrence, rescaled jointly when large
/// (the ratio is what Newton's method needs).
pub(crate) fn eval_with_derivative(rec: &Recurrence, n: usize, x: Dd) -> (Dd, Dd) {
    let mut p0 = Dd::ZERO;
    let mut p1 = Dd::ONE;
    let mut d0 = Dd::ZERO;
    let mut d1 = Dd::ZERO;
    for k in 0..n {
        let t = x - rec.alpha[k];
        let bk = if k == 0 { Dd::ZERO } else { rec.beta[k] };
        let p2 = t * p1 - bk * p0;
        let d2 = p1 + t * d1 - bk * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        let m = p1.abs().hi().max(d1.abs().hi());
        if m > 1e200 {
            let e = -(m.log2() as i32);
            p0 = p0.mul_pow2(e);
            p1 = p1.mul_pow2(e);
            d0 = d0.mul_pow2(e);
            d1 = d1.mul_pow2(e);
        }
    }
    (p1, d1)
}

/// Christoffel weight `1 / Σ_{k<n} p̃_k(x)^2` with orthonormal `p̃_k`, evaluated with
/// running rescaling; returns a value that underflows gracefully to zero.
pub(crate) fn christoffel_weight(rec: &Recurrence, n: usize, x: Dd) -> Dd {
    // p̃_0 = 1/sqrt(beta_0); sqrt(beta_{k+1}) p̃_{k+1} = (x - alpha_k) p̃_k - sqrt(beta_k) p̃_{k-1}.
    let mut log_scale = Dd::ZERO;
    let mut prev = Dd::ZERO;
    let mut cur = rec.beta[0].sqrt().recip();
    let mut sum = cur.sqr();
    for k in 0..n.saturating_sub(1) {
        let sb_next = rec.beta[k + 1].sqrt();
        let sb = if k == 0 { Dd::ZERO } else { rec.beta[k].sqrt() };
        let next = ((x - rec.alpha[k]) * cur - sb * prev) / sb_next;
        prev = cur;
        cur = next;
        sum += cur.sqr();
        let m = sum.hi();
        if m > 1e200 {
            let e = -(m.log2() as i32) / 2;
            prev = prev.mul_pow2(e);
            cur = cur.mul_pow2(e);
            sum = sum.mul_pow2(2 * e);
            log_scale += Dd::LN2 * Dd::from(-2.0 * e as f64);
        }
    }
    (sum.ln() + log_scale).neg_exp()
}

trait NegExp {
    fn neg_exp(self) -> Dd;
}

impl NegExp for Dd {
    fn neg_exp(self) -> Dd {
        if self.hi() > 745.0 {
            Dd::ZERO
        } else {
            (-self).exp()
        }
    }
}
