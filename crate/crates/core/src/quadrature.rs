//! Gauss rules for the classical weights and exact integration of sums of
//! real powers against them.
//!
//! Nodes come from the Golub–Welsch eigenproblem in `f64` and are then polished
//! by Newton's method in double-double; weights use the Christoffel sum.

use std::collections::HashMap;

use crate::classical::{
    christoffel_weight, eval_with_derivative, jacobi01_recurrence, laguerre_recurrence, Recurrence,
};
use crate::dd::{Dd, Real};
use crate::error::{MbError, Result};
use crate::weights::{even_reduced, Support, WeightSpec};

/// Largest rule size accepted by [`make_quadrature`].
pub const MAX_NODES: usize = 4096;

/// A Gauss-type rule `∫ w g ≈ Σ weights_i g(nodes_i)`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<Dd>,
    pub weights: Vec<Dd>,
    pub support: Support,
    /// Highest polynomial degree integrated exactly.
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Dd) -> Dd) -> Dd {
        let mut s = Dd::ZERO;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if w.hi() != 0.0 {
                s += w * f(x);
            }
        }
        s
    }

    pub fn nodes_f64(&self) -> Vec<f64> {
        self.nodes.iter().map(|x| x.to_f64()).collect()
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|x| x.to_f64()).collect()
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[i]` (coupling `i`, `i+1`), by implicit QL with Wilkinson shifts.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let s = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * s {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(MbError::Convergence(format!("tridiagonal QL did not converge for eigenvalue {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Gauss nodes and weights of the weight described by a monic recurrence.
pub fn gauss_from_recurrence(rec: &Recurrence, n: usize) -> Result<(Vec<Dd>, Vec<Dd>)> {
    if n == 0 || n > MAX_NODES || rec.alpha.len() < n {
        return Err(MbError::Domain(format!("rule size must be in 1..={MAX_NODES} (got {n})")));
    }
    let mut d: Vec<f64> = rec.alpha[..n].iter().map(|a| a.to_f64()).collect();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { rec.beta[i + 1].to_f64().sqrt() } else { 0.0 }).collect();
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &d {
        let mut x = Dd::from(x0);
        for _ in 0..8 {
            let (p, dp) = eval_with_derivative(rec, n, x);
            if dp.hi() == 0.0 {
                break;
            }
            let dx = p / dp;
            x -= dx;
            if dx.abs().hi() <= 1e-31 * x.abs().hi() {
                break;
            }
        }
        nodes.push(x);
        weights.push(christoffel_weight(rec, n, x));
    }
    Ok((nodes, weights))
}

/// Gauss–Jacobi rule for `x^a (1-x)^b` on `(0, 1)`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    let rec = jacobi01_recurrence(n, a, b)?;
    let (nodes, weights) = gauss_from_recurrence(&rec, n)?;
    Ok(QuadratureRule { nodes, weights, support: Support::UnitInterval, exact_degree: 2 * n - 1 })
}

/// Gauss–Laguerre rule for `x^a e^{-x}` on `(0, ∞)`.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<QuadratureRule> {
    let rec = laguerre_recurrence(n, a)?;
    let (nodes, weights) = gauss_from_recurrence(&rec, n)?;
    Ok(QuadratureRule { nodes, weights, support: Support::HalfLine, exact_degree: 2 * n - 1 })
}

/// Gauss rule for any supported weight with `n` nodes.
///
/// Endpoint exponents always sit in the Gauss weight. The Jacobi-prime weight is
/// mapped by `x = u/(1-u)` onto a Gauss–Jacobi rule whose `(1-u)` exponent
/// `beta - alpha - 2 - degree` absorbs polynomial growth up to `degree`; other
/// families ignore `degree`. Full-line weights get the symmetric rule built from
/// the even-reduced weight in `y = x²`.
pub fn make_quadrature(w: &WeightSpec, n: usize, degree: usize) -> Result<QuadratureRule> {
    w.validate()?;
    if n == 0 || n > MAX_NODES {
        return Err(MbError::Domain(format!("rule size must be in 1..={MAX_NODES} (got {n})")));
    }
    match *w {
        WeightSpec::Laguerre { a } => gauss_laguerre(n, a),
        WeightSpec::Jacobi { a, b } => gauss_jacobi(n, a, b),
        WeightSpec::JacobiPrime { alpha, beta } => {
            let tail = beta - alpha - 2.0 - degree as f64;
            if !(tail > -1.0) {
                return Err(MbError::Domain(format!(
                    "jacobi_prime rule: polynomial degree {degree} is not integrable \
                     (beta - alpha - 1 - degree = {} must be positive)",
                    tail + 1.0
                )));
            }
            let g = gauss_jacobi(n, alpha, tail)?;
            let d = degree as i32;
            let (nodes, weights) = g
                .nodes
                .iter()
                .zip(&g.weights)
                .map(|(&u, &wt)| {
                    let v = Dd::ONE - u;
                    (u / v, wt * v.powi(d))
                })
                .unzip();
            Ok(QuadratureRule { nodes, weights, support: Support::HalfLine, exact_degree: degree.min(2 * n - 1) })
        }
        WeightSpec::GenGaussian { .. } | WeightSpec::GenSymJacobi { .. } | WeightSpec::GenCauchy { .. } => {
            let half = make_quadrature(&even_reduced(w)?, n, degree / 2)?;
            let m = half.len();
            let mut nodes = vec![Dd::ZERO; 2 * m];
            let mut weights = vec![Dd::ZERO; 2 * m];
            for i in 0..m {
                let x = half.nodes[i].sqrt();
                let wt = half.weights[i] * 0.5;
                nodes[m - 1 - i] = -x;
                weights[m - 1 - i] = wt;
                nodes[m + i] = x;
                weights[m + i] = wt;
            }
            Ok(QuadratureRule { nodes, weights, support: w.support(), exact_degree: 2 * half.exact_degree + 1 })
        }
    }
}

/// One monomial `coeff · sgn(x)^{odd} |x|^{exponent}` of an integrand.
#[derive(Clone, Copy, Debug)]
pub struct PowerTerm {
    pub exponent: f64,
    pub odd: bool,
    pub coeff: Dd,
}

/// Tolerance for recognising two fractional exponents as equal.
const FRAC_KEY_SCALE: f64 = 1e12;

fn split_exponent(e: f64) -> (usize, f64, i64) {
    let mut i = e.floor();
    let mut f = e - i;
    if f > 1.0 - 1.0 / FRAC_KEY_SCALE {
        i += 1.0;
        f = 0.0;
    }
    if f < 1.0 / FRAC_KEY_SCALE {
        f = 0.0;
    }
    (i as usize, f, (f * FRAC_KEY_SCALE).round() as i64)
}

fn shift_weight(w: &WeightSpec, phi: f64) -> WeightSpec {
    match *w {
        WeightSpec::Laguerre { a } => WeightSpec::Laguerre { a: a + phi },
        WeightSpec::Jacobi { a, b } => WeightSpec::Jacobi { a: a + phi, b },
        WeightSpec::JacobiPrime { alpha, beta } => WeightSpec::JacobiPrime { alpha: alpha + phi, beta },
        _ => unreachable!(),
    }
}

/// Integrates sums of real powers against a weight with `n`-node Gauss rules.
///
/// Terms are grouped by the fractional part `φ` of their exponent; each group is a
/// polynomial integrated exactly by the rule for `w(x) x^φ`, so the result is
/// exact once `n` exceeds half the polynomial degree. Rules are cached.
pub struct PowerIntegrator {
    weight: WeightSpec,
    base: WeightSpec,
    full_line: bool,
    n: usize,
    cache: HashMap<(i64, usize), QuadratureRule>,
}

impl PowerIntegrator {
    pub fn new(w: &WeightSpec, n: usize) -> Result<PowerIntegrator> {
        w.validate()?;
        let full_line = w.is_full_line();
        let base = if full_line { even_reduced(w)? } else { *w };
        Ok(PowerIntegrator { weight: *w, base, full_line, n, cache: HashMap::new() })
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    /// `∫ w(x) Σ_t coeff_t sgn(x)^{odd_t} |x|^{exponent_t} dx`.
    ///
    /// On the full line odd terms vanish and even ones become `y^{exponent/2}`
    /// against the even-reduced weight.
    pub fn integrate(&mut self, terms: &[PowerTerm]) -> Result<Dd> {
        let mut groups: HashMap<i64, (f64, Vec<Dd>)> = HashMap::new();
        for t in terms {
            if self.full_line && t.odd {
                continue;
            }
            let e = if self.full_line { t.exponent / 2.0 } else { t.exponent };
            let (ip, phi, key) = split_exponent(e);
            let g = groups.entry(key).or_insert_with(|| (phi, Vec::new()));
            if g.1.len() <= ip {
                g.1.resize(ip + 1, Dd::ZERO);
            }
            g.1[ip] += t.coeff;
        }
        let mut keys: Vec<i64> = groups.keys().copied().collect();
        keys.sort_unstable();
        let mut total = Dd::ZERO;
        for key in keys {
            let (phi, poly) = &groups[&key];
            let degree = poly.len() - 1;
            let cache_degree = if matches!(self.base, WeightSpec::JacobiPrime { .. }) { degree } else { 0 };
            let rule = match self.cache.entry((key, cache_degree)) {
                std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(make_quadrature(&shift_weight(&self.base, *phi), self.n, degree)?)
                }
            };
            if rule.exact_degree < degree {
                log::debug!("power group of degree {degree} exceeds rule exactness {}", rule.exact_degree);
            }
            total += rule.integrate(|x| {
                let mut acc = Dd::ZERO;
                for &c in poly.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            });
        }
        Ok(total)
    }
}
