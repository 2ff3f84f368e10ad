//! Correlation kernel `K_N(x, y) = Σ_{k<N} p_k(x) q_k(y^θ) / h_k`, its
//! determinantal correlations, and quadrature checks of biorthogonality.
//!
//! Correlations include the weight: the reported one-point density is
//! `w(x) K(x, x)`. The bare kernel is exposed separately. On the full line the
//! pairing is `sgn(y)^k q_k(|y|^θ)`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::biortho::{p_any, q_any, NormSequence};
use crate::dd::{Dd, Real};
use crate::error::{MbError, Result};
use crate::linalg::det_lu;
use crate::poly::MonicPoly;
use crate::quadrature::{make_quadrature, PowerIntegrator, PowerTerm, QuadratureRule, MAX_NODES};
use crate::weights::{weight_eval, EnsembleSpec, WeightSpec};

/// Largest Gram size accepted by [`verify_biortho`].
pub const GRAM_MAX_K: usize = 10;

/// Node count at which adaptive integration starts.
pub const ADAPTIVE_START: usize = 64;

/// Everything needed to evaluate `K_N` for one ensemble.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub spec: EnsembleSpec,
    pub polys_p: Vec<MonicPoly>,
    pub polys_q: Vec<MonicPoly>,
    pub norms: NormSequence,
    inv_h: Vec<Dd>,
}

/// Assembles `p_k`, `q_k` and `h_k` for `k < N`.
pub fn build_kernel(spec: &EnsembleSpec) -> Result<KernelSpec> {
    spec.validate()?;
    let (w, th) = (&spec.weight, spec.theta);
    let polys_p = (0..spec.n).map(|k| p_any(w, k, th)).collect::<Result<Vec<_>>>()?;
    let polys_q = (0..spec.n).map(|k| q_any(w, k, th)).collect::<Result<Vec<_>>>()?;
    let norms = NormSequence::new(w, th, spec.n)?;
    let inv_h = norms.values.iter().map(|h| Dd::from(-h.logmag).exp()).collect();
    Ok(KernelSpec { spec: *spec, polys_p, polys_q, norms, inv_h })
}

impl KernelSpec {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.spec.weight
    }

    fn full_line(&self) -> bool {
        self.spec.weight.is_full_line()
    }

    /// `(|y|^θ, sgn y)`; the sign is `+1` for half-line weights.
    fn q_argument(&self, y: Dd) -> (Dd, bool) {
        let neg = y.hi() < 0.0;
        let ay = y.abs();
        let t = if ay.hi() == 0.0 { Dd::ZERO } else { ay.powf(Dd::from(self.spec.theta)) };
        (t, neg && self.full_line())
    }

    /// `σ(y)^k q_k(|y|^θ) / h_k` for every `k < N`.
    fn q_column(&self, y: Dd) -> Vec<Dd> {
        let (t, neg) = self.q_argument(y);
        self.polys_q
            .iter()
            .enumerate()
            .map(|(k, q)| {
                let v = q.eval_dd(t) * self.inv_h[k];
                if neg && k % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }

    /// Bare kernel in double-double.
    pub fn eval_dd(&self, x: Dd, y: Dd) -> Dd {
        let qc = self.q_column(y);
        let mut s = Dd::ZERO;
        for (p, q) in self.polys_p.iter().zip(qc) {
            s += p.eval_dd(x) * q;
        }
        s
    }
}

/// Bare kernel `K_N(x, y)`.
pub fn kernel_eval(k: &KernelSpec, x: f64, y: f64) -> f64 {
    k.eval_dd(Dd::from(x), Dd::from(y)).to_f64()
}

/// Weighted kernel `sqrt(w(x) w(y)) K_N(x, y)`; its determinants are the correlations.
pub fn kernel_eval_weighted(k: &KernelSpec, x: f64, y: f64) -> f64 {
    let s = (weight_eval(k.weight(), x) * weight_eval(k.weight(), y)).sqrt();
    if s == 0.0 {
        0.0
    } else {
        s * kernel_eval(k, x, y)
    }
}

fn check_points(k: &KernelSpec, points: &[f64]) -> Result<()> {
    if points.len() > k.n() {
        return Err(MbError::Domain(format!("correlation of order {} exceeds N = {}", points.len(), k.n())));
    }
    Ok(())
}

/// `det[K_N(x_i, x_j)]` without weight factors.
pub fn correlation_bare(k: &KernelSpec, points: &[f64]) -> Result<f64> {
    check_points(k, points)?;
    let m: Vec<Vec<Dd>> =
        points.iter().map(|&x| points.iter().map(|&y| k.eval_dd(Dd::from(x), Dd::from(y))).collect()).collect();
    Ok(det_lu(m).det.to_f64())
}

/// `n`-point correlation `∏ w(x_i) det[K_N(x_i, x_j)]`.
pub fn correlation(k: &KernelSpec, points: &[f64]) -> Result<f64> {
    let bare = correlation_bare(k, points)?;
    Ok(points.iter().fold(bare, |acc, &x| acc * weight_eval(k.weight(), x)))
}

/// Terms of `p(x) · sgn(x)^{sign_power} q(|x|^θ) · x^{extra}` scaled by `scale`.
fn product_terms(
    p: &MonicPoly,
    q: &MonicPoly,
    theta: f64,
    sign_power: usize,
    extra: usize,
    scale: Dd,
    out: &mut Vec<PowerTerm>,
) {
    for (i, &c) in p.coeffs().iter().enumerate() {
        if c.hi() == 0.0 {
            continue;
        }
        for (j, &d) in q.coeffs().iter().enumerate() {
            if d.hi() == 0.0 {
                continue;
            }
            out.push(PowerTerm {
                exponent: (i + extra) as f64 + theta * j as f64,
                odd: (i + extra + sign_power) % 2 == 1,
                coeff: c * d * scale,
            });
        }
    }
}

/// Raw Gram matrix `G_{jl} = ∫ w p_j σ^l q_l(|x|^θ)` with `n`-node rules.
pub fn gram_matrix(w: &WeightSpec, theta: f64, kmax: usize, n: usize) -> Result<Vec<Vec<Dd>>> {
    let ps = (0..kmax).map(|k| p_any(w, k, theta)).collect::<Result<Vec<_>>>()?;
    let qs = (0..kmax).map(|k| q_any(w, k, theta)).collect::<Result<Vec<_>>>()?;
    let mut integ = PowerIntegrator::new(w, n)?;
    let mut g = vec![vec![Dd::ZERO; kmax]; kmax];
    for (j, p) in ps.iter().enumerate() {
        for (l, q) in qs.iter().enumerate() {
            let mut terms = Vec::new();
            product_terms(p, q, theta, l, 0, Dd::ONE, &mut terms);
            g[j][l] = integ.integrate(&terms)?;
        }
    }
    Ok(g)
}

/// Outcome of [`verify_biortho`].
#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    /// `max_{j,l} |G_{jl} - h_j δ_{jl}| / h_j`.
    pub max_error: f64,
    /// Node count of the accepted rule.
    pub nodes: usize,
    /// Change between the last two node counts, normalised like `max_error`.
    pub last_change: f64,
    /// `G_{jl} / h_j`.
    pub normalized: Vec<Vec<f64>>,
}

/// Checks `∫ w p_j σ^l q_l(|x|^θ) = h_j δ_{jl}` for `j, l < kmax` by quadrature,
/// doubling the node count from 64 until two successive Gram matrices differ by
/// less than `tol / 10`.
pub fn verify_biortho(w: &WeightSpec, theta: f64, kmax: usize, tol: f64) -> Result<GramReport> {
    if kmax == 0 || kmax > GRAM_MAX_K {
        return Err(MbError::Domain(format!("kmax must be in 1..={GRAM_MAX_K} (got {kmax})")));
    }
    EnsembleSpec::new(*w, kmax, theta)?;
    let norms = NormSequence::new(w, theta, kmax)?;
    let h: Vec<Dd> = norms.values.iter().map(|v| Dd::from(v.logmag).exp()).collect();
    let normalise = |g: &[Vec<Dd>]| -> Vec<Vec<Dd>> {
        g.iter().enumerate().map(|(j, row)| row.iter().map(|&v| v / h[j]).collect()).collect()
    };
    let mut n = ADAPTIVE_START;
    let mut prev = normalise(&gram_matrix(w, theta, kmax, n)?);
    let mut change = f64::INFINITY;
    while n * 2 <= MAX_NODES {
        n *= 2;
        let cur = normalise(&gram_matrix(w, theta, kmax, n)?);
        change = max_abs_diff(&cur, &prev);
        prev = cur;
        if change < tol / 10.0 {
            let mut max_error = 0.0f64;
            for (j, row) in prev.iter().enumerate() {
                for (l, &v) in row.iter().enumerate() {
                    let target = if j == l { Dd::ONE } else { Dd::ZERO };
                    max_error = max_error.max((v - target).abs().to_f64());
                }
            }
            let normalized = prev.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
            return Ok(GramReport { max_error, nodes: n, last_change: change, normalized });
        }
    }
    Err(MbError::Convergence(format!(
        "Gram matrix for {w}, theta = {theta}, kmax = {kmax} still changes by {change:.3e} at {n} nodes \
         (needed < {:.3e})",
        tol / 10.0
    )))
}

fn max_abs_diff(a: &[Vec<Dd>], b: &[Vec<Dd>]) -> f64 {
    a.iter().zip(b).flat_map(|(r, s)| r.iter().zip(s).map(|(&x, &y)| (x - y).abs().to_f64())).fold(0.0, f64::max)
}

/// Repeats `f(n)` with doubling `n` until the relative change is below `rel_tol`.
fn adaptive(mut f: impl FnMut(usize) -> Result<Dd>, rel_tol: f64) -> Result<f64> {
    let mut n = ADAPTIVE_START;
    let mut prev = f(n)?;
    while n * 2 <= MAX_NODES {
        n *= 2;
        let cur = f(n)?;
        let scale = cur.abs().to_f64().max(f64::MIN_POSITIVE);
        if ((cur - prev).abs().to_f64() / scale) < rel_tol {
            return Ok(cur.to_f64());
        }
        prev = cur;
    }
    Err(MbError::Convergence(format!("kernel integral did not settle below {rel_tol:e} by {MAX_NODES} nodes")))
}

/// Relative change accepted by the adaptive kernel integrals.
const KERNEL_RTOL: f64 = 1e-14;

/// `∫ w(x) x^m K_N(x, x) dx`; `m = 0` is the trace (equal to `N`).
pub fn kernel_diagonal_moment(k: &KernelSpec, m: usize) -> Result<f64> {
    let th = k.spec.theta;
    let mut terms = Vec::new();
    for (j, (p, q)) in k.polys_p.iter().zip(&k.polys_q).enumerate() {
        product_terms(p, q, th, j, m, k.inv_h[j], &mut terms);
    }
    let w = *k.weight();
    adaptive(|n| PowerIntegrator::new(&w, n)?.integrate(&terms), KERNEL_RTOL)
}

/// `∫ w(x) K_N(x, x) dx`.
pub fn kernel_trace(k: &KernelSpec) -> Result<f64> {
    kernel_diagonal_moment(k, 0)
}

/// `∫ w(y) K_N(x, y) K_N(y, z) dy`, which reproduces `K_N(x, z)`.
pub fn kernel_projection(k: &KernelSpec, x: f64, z: f64) -> Result<f64> {
    let th = k.spec.theta;
    let a: Vec<Dd> = k.polys_p.iter().enumerate().map(|(i, p)| p.eval_dd(Dd::from(x)) * k.inv_h[i]).collect();
    let b = k.q_column(Dd::from(z));
    let mut terms = Vec::new();
    for (kk, q) in k.polys_q.iter().enumerate() {
        for (l, p) in k.polys_p.iter().enumerate() {
            // y-dependence: σ(y)^kk q_kk(|y|^θ) p_l(y).
            product_terms(p, q, th, kk, 0, a[kk] * b[l], &mut terms);
        }
    }
    let w = *k.weight();
    adaptive(|n| PowerIntegrator::new(&w, n)?.integrate(&terms), KERNEL_RTOL)
}

/// `Σ_i weights_i K_N(x_i, x_i)` for a caller-supplied rule (black-box trace).
pub fn trace_with_rule(k: &KernelSpec, rule: &QuadratureRule) -> f64 {
    rule.integrate(|x| k.eval_dd(x, x)).to_f64()
}

/// Black-box trace with the weight's own Gauss rule; exact for integer `θ`.
pub fn kernel_trace_gauss(k: &KernelSpec, n: usize) -> Result<f64> {
    let degree = ((k.n() - 1) as f64 * (1.0 + k.spec.theta)).ceil() as usize;
    Ok(trace_with_rule(k, &make_quadrature(k.weight(), n, degree)?))
}

/// CSV grid `x,y,K_bare,K_weighted` with the ensemble as a comment header.
pub fn kernel_grid_csv(k: &KernelSpec, xs: &[f64], ys: &[f64]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", k.spec.to_json());
    s.push_str("x,y,K_bare,K_weighted\n");
    for &x in xs {
        for &y in ys {
            let _ = writeln!(s, "{x:e},{y:e},{:e},{:e}", kernel_eval(k, x, y), kernel_eval_weighted(k, x, y));
        }
    }
    s
}
