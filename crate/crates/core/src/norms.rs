//! Selberg-type integrals, Muttalib–Borodin normalisations and moment-determinant oracles.

use serde::{Deserialize, Serialize};

use crate::dd::{Dd, Real};
use crate::error::{MbError, Result};
use crate::linalg::det_lu;
use crate::specfun::{gen_pochhammer, GenPochhammerArgs, LogAcc, SignedLogReal};
use crate::symfun::{schur_at_ones, Partition};
use crate::weights::{
    even_reduced, ln_moment_in, moment_step_ratio, parity_reduce, parity_sizes, EnsembleSpec, WeightSpec,
};

/// Exponents `γ_1 > ... > γ_N` of a polynomial ensemble `Δ(x) det[x_j^{γ_i}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentVector {
    pub gammas: Vec<f64>,
}

impl ExponentVector {
    /// Checks pairwise distinctness (gap > 1e-9).
    pub fn new(gammas: Vec<f64>) -> Result<ExponentVector> {
        for i in 0..gammas.len() {
            if !gammas[i].is_finite() {
                return Err(MbError::domain(format!("non-finite exponent γ_{}", i + 1)));
            }
            for j in i + 1..gammas.len() {
                if (gammas[i] - gammas[j]).abs() <= 1e-9 {
                    return Err(MbError::domain(format!(
                        "exponents must be pairwise distinct: γ_{} = γ_{} = {}",
                        i + 1,
                        j + 1,
                        gammas[i]
                    )));
                }
            }
        }
        Ok(ExponentVector { gammas })
    }

    /// `γ_j = θ(j-1) + a`, the specialisation producing a Muttalib–Borodin ensemble.
    pub fn mb_grid(k: usize, theta: f64, a: f64) -> ExponentVector {
        ExponentVector { gammas: (0..k).map(|j| theta * j as f64 + a).collect() }
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    fn vandermonde_log(&self) -> LogAcc<Dd> {
        let mut acc = LogAcc::<Dd>::new();
        for i in 0..self.gammas.len() {
            for j in i + 1..self.gammas.len() {
                acc.mul_value(Dd::from(self.gammas[i]) - Dd::from(self.gammas[j]));
            }
        }
        acc
    }
}

fn positive(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        Err(MbError::Domain(format!("{what} must be positive (got {x})")))
    } else {
        Ok(())
    }
}

/// Selberg integral `S_N(a1, a2, τ) = ∏_{j<N} Γ(a1+jτ)Γ(a2+jτ)Γ(1+(j+1)τ) / (Γ(a1+a2+(N+j-1)τ)Γ(1+τ))`.
pub fn selberg(n: usize, a1: f64, a2: f64, tau: f64) -> Result<SignedLogReal> {
    selberg_in::<Dd>(n, a1, a2, tau)
}

/// [`selberg`] accumulated at precision `T`.
pub fn selberg_in<T: Real>(n: usize, a1: f64, a2: f64, tau: f64) -> Result<SignedLogReal> {
    positive(a1, "selberg a1")?;
    positive(a2, "selberg a2")?;
    if !(tau >= 0.0) {
        return Err(MbError::Domain(format!("selberg tau must be >= 0 (got {tau})")));
    }
    let (ta1, ta2, tt) = (T::from_f64(a1), T::from_f64(a2), T::from_f64(tau));
    let one = T::one();
    let mut acc = LogAcc::<T>::new();
    for j in 0..n {
        let jt = T::from_i64(j as i64) * tt;
        acc.mul_gamma(ta1 + jt)?;
        acc.mul_gamma(ta2 + jt)?;
        acc.mul_gamma(one + T::from_i64(j as i64 + 1) * tt)?;
        acc.div_gamma(ta1 + ta2 + T::from_i64(n as i64 + j as i64 - 1) * tt)?;
        acc.div_gamma(one + tt)?;
    }
    Ok(acc.finish())
}

/// Laguerre–Selberg integral `W_N(a1, τ) = ∏_{j<N} Γ(1+(j+1)τ)Γ(a1+jτ)/Γ(1+τ)`.
pub fn laguerre_selberg(n: usize, a1: f64, tau: f64) -> Result<SignedLogReal> {
    laguerre_selberg_in::<Dd>(n, a1, tau)
}

/// [`laguerre_selberg`] accumulated at precision `T`.
pub fn laguerre_selberg_in<T: Real>(n: usize, a1: f64, tau: f64) -> Result<SignedLogReal> {
    positive(a1, "laguerre_selberg a1")?;
    if !(tau >= 0.0) {
        return Err(MbError::Domain(format!("laguerre_selberg tau must be >= 0 (got {tau})")));
    }
    let (ta1, tt) = (T::from_f64(a1), T::from_f64(tau));
    let one = T::one();
    let mut acc = LogAcc::<T>::new();
    for j in 0..n {
        acc.mul_gamma(one + T::from_i64(j as i64 + 1) * tt)?;
        acc.mul_gamma(ta1 + T::from_i64(j as i64) * tt)?;
        acc.div_gamma(one + tt)?;
    }
    Ok(acc.finish())
}

/// Weight family for the Schur-weighted normalisations `𝒩_λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum NormFamily {
    /// `x^{α1-1}(1-x)^{α2-1}` on `(0,1)`.
    Jacobi { a1: f64, a2: f64 },
    /// `x^{α1-1}e^{-x}` on `(0,∞)`.
    Laguerre { a1: f64 },
    /// `x^a (1+x)^{-(a+b+2N)}` on `(0,∞)`.
    JacobiPrime { a: f64, b: f64 },
}

fn ordered_part_product(parts: &[u32]) -> Dd {
    let n = parts.len();
    let mut p = Dd::ONE;
    for i in 0..n {
        for j in i + 1..n {
            p *= Dd::from(parts[i] as f64 - parts[j] as f64 + (j - i) as f64);
        }
    }
    p
}

/// The displayed product formulas for `𝒩_λ`; the `N`-fold integral of the
/// corresponding unnormalised density equals `N!` times this value.
///
/// The Laguerre product pairs `Γ(α1+k-1+λ_{N-k+1})`, as in the Jacobi case.
pub fn norm_lambda_displayed(family: &NormFamily, lambda: &Partition, n: usize) -> Result<SignedLogReal> {
    let parts = lambda.padded(n)?;
    let mut acc = LogAcc::<Dd>::new();
    match *family {
        NormFamily::Jacobi { a1, a2 } => {
            positive(a1, "norm_lambda alpha1")?;
            positive(a2, "norm_lambda alpha2")?;
            for k in 1..=n {
                let l = parts[n - k] as f64;
                let kf = k as f64;
                acc.mul_gamma(Dd::from(a1 + kf - 1.0) + l)?;
                acc.mul_gamma(Dd::from(a2 + kf - 1.0))?;
                acc.div_gamma(Dd::from(a1 + a2 + n as f64 + kf - 2.0) + l)?;
            }
        }
        NormFamily::Laguerre { a1 } => {
            positive(a1, "norm_lambda alpha1")?;
            for k in 1..=n {
                acc.mul_gamma(Dd::from(a1 + k as f64 - 1.0) + parts[n - k] as f64)?;
            }
        }
        NormFamily::JacobiPrime { a, b } => {
            if n > 0 && parts[0] as f64 >= b + 1.0 {
                return Err(MbError::Domain(format!(
                    "jacobi_prime norm_lambda needs lambda_1 < b + 1 (lambda_1 = {}, b = {b})",
                    parts[0]
                )));
            }
            for k in 1..=n {
                let l = parts[k - 1] as f64;
                let kf = k as f64;
                acc.mul_gamma(Dd::from(a + n as f64 + 1.0 - kf) + l)?;
                acc.mul_gamma(Dd::from(b + kf) - l)?;
                acc.div_gamma(Dd::from(a + b + n as f64 + kf))?;
            }
        }
    }
    acc.mul_value(ordered_part_product(&parts));
    Ok(acc.finish())
}

/// Normalisation `∫ ∏w(x_l) Δ(x) det[x_j^{N-i+λ_i}] d^N x` of the Schur-weighted density,
/// i.e. `N!` times [`norm_lambda_displayed`].
pub fn norm_lambda(family: &NormFamily, lambda: &Partition, n: usize) -> Result<SignedLogReal> {
    let d = norm_lambda_displayed(family, lambda, n)?;
    Ok(d.scale_by_log(crate::specfun::ln_factorial(n)))
}

/// Selberg form `S_N(α1,α2,1)·(α1+N-1)_λ/(α1+α2+2N-2)_λ` of the Jacobi normalisation,
/// which omits the factor `s_λ((1)^N)`.
pub fn norm_lambda_selberg_form(a1: f64, a2: f64, lambda: &Partition, n: usize) -> Result<SignedLogReal> {
    let parts = lambda.padded(n)?;
    let lam = Partition::new(parts)?;
    let s = selberg(n, a1, a2, 1.0)?;
    let up = gen_pochhammer(&GenPochhammerArgs { a: a1 + n as f64 - 1.0, gamma_step: 1.0, lambda: lam.clone() })?;
    let down = gen_pochhammer(&GenPochhammerArgs { a: a1 + a2 + 2.0 * n as f64 - 2.0, gamma_step: 1.0, lambda: lam })?;
    Ok(s * up / down)
}

/// Selberg form multiplied by `s_λ((1)^N)`; equals [`norm_lambda`].
pub fn norm_lambda_via_selberg(a1: f64, a2: f64, lambda: &Partition, n: usize) -> Result<SignedLogReal> {
    Ok(norm_lambda_selberg_form(a1, a2, lambda, n)? * schur_at_ones(lambda, n)?)
}

/// Weight family for the constants `C_N^γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum CFamily {
    /// `(1-x)^{α2-1}` on `(0,1)`.
    Jacobi { alpha2: f64 },
    /// `e^{-x}` on `(0,∞)`.
    Laguerre,
    /// `(1+x)^{-(d+2N)}` on `(0,∞)`.
    JacobiPrime { d: f64 },
}

/// `C_N^γ`: the displayed gamma products (Jacobi, Laguerre, Jacobi prime).
pub fn c_gamma(family: &CFamily, gammas: &ExponentVector, n: usize) -> Result<SignedLogReal> {
    if gammas.len() != n {
        return Err(MbError::Domain(format!("c_gamma needs {n} exponents, got {}", gammas.len())));
    }
    let mut acc = LogAcc::<Dd>::new();
    for (idx, &g) in gammas.gammas.iter().enumerate() {
        let l = (idx + 1) as f64;
        match *family {
            CFamily::Jacobi { alpha2 } => {
                if g <= -1.0 {
                    return Err(MbError::Domain(format!("c_gamma needs γ > -1 (γ_{} = {g})", idx + 1)));
                }
                acc.mul_gamma(Dd::from(g) + 1.0)?;
                acc.mul_gamma(Dd::from(l - 1.0 + alpha2))?;
                acc.div_gamma(Dd::from(g) + (n as f64 + alpha2))?;
            }
            CFamily::Laguerre => {
                if g <= -1.0 {
                    return Err(MbError::Domain(format!("c_gamma needs γ > -1 (γ_{} = {g})", idx + 1)));
                }
                acc.mul_gamma(Dd::from(g) + 1.0)?;
            }
            CFamily::JacobiPrime { d } => {
                if d + n as f64 - g <= 0.0 {
                    return Err(MbError::Domain(format!(
                        "c_gamma jacobi_prime needs d + N - γ_k > 0 (γ_{} = {g}, d = {d}, N = {n})",
                        idx + 1
                    )));
                }
                acc.mul_gamma(Dd::from(g) + 1.0)?;
                acc.mul_gamma(Dd::from(d + n as f64) - g)?;
                acc.div_gamma(Dd::from(d + n as f64 + l))?;
            }
        }
    }
    Ok(acc.finish())
}

/// `N! C_N^γ ∏_{i<j}(γ_i-γ_j)`: the integral of `∏w Δ(x) det[x_j^{γ_i}]`.
pub fn c_gamma_integral(family: &CFamily, gammas: &ExponentVector, n: usize) -> Result<SignedLogReal> {
    let c = c_gamma(family, gammas, n)?;
    let v = gammas.vandermonde_log().finish();
    Ok((c * v).scale_by_log(crate::specfun::ln_factorial(n)))
}

/// Normalisation `Z_N` of a half-line Muttalib–Borodin ensemble (closed form).
pub fn z_mb(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    z_mb_in::<Dd>(spec)
}

/// [`z_mb`] at precision `T`.
pub fn z_mb_in<T: Real>(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    spec.validate()?;
    if spec.weight.is_full_line() {
        return Err(MbError::Domain(format!("z_mb needs a half-line weight, got {}", spec.weight)));
    }
    z_half_unchecked::<T>(&spec.weight, spec.n, spec.theta)
}

fn z_half_unchecked<T: Real>(w: &WeightSpec, n: usize, theta: f64) -> Result<SignedLogReal> {
    z_half_acc::<T>(w, n, theta).map(LogAcc::finish)
}

/// Closed-form half-line `Z_n` as an unrounded log accumulator.
pub(crate) fn z_half_acc<T: Real>(w: &WeightSpec, n: usize, theta: f64) -> Result<LogAcc<T>> {
    let th = T::from_f64(theta);
    let one = T::one();
    let mut acc = LogAcc::<T>::new();
    if n == 0 {
        return Ok(acc);
    }
    acc.add_log(th.ln() * T::from_i64((n * (n - 1) / 2) as i64));
    let nf = T::from_i64(n as i64);
    for l in 1..=n {
        let lf = T::from_i64(l as i64);
        let tl = th * T::from_i64(l as i64 - 1);
        match *w {
            WeightSpec::Laguerre { a } => {
                acc.mul_gamma(tl + T::from_f64(a) + one)?;
                acc.mul_gamma(lf + one)?;
            }
            WeightSpec::Jacobi { a, b } => {
                let (ta, tb) = (T::from_f64(a), T::from_f64(b));
                acc.mul_gamma(tl + ta + one)?;
                acc.mul_gamma(lf + tb)?;
                acc.mul_gamma(lf + one)?;
                acc.div_gamma(tl + nf + ta + tb + one)?;
            }
            WeightSpec::JacobiPrime { alpha, beta } => {
                let (ta, tb) = (T::from_f64(alpha), T::from_f64(beta));
                let arg = tb - ta - nf - tl;
                if arg.to_f64() <= 0.0 {
                    return Err(MbError::Domain(format!(
                        "jacobi_prime normalisation: Γ argument beta - alpha - N - theta*(k-1) = {} <= 0 at k = {l}",
                        arg.to_f64()
                    )));
                }
                acc.mul_gamma(tl + ta + one)?;
                acc.mul_gamma(arg)?;
                acc.mul_gamma(lf + one)?;
                acc.div_gamma(tb - nf + lf)?;
            }
            _ => unreachable!(),
        }
    }
    Ok(acc)
}

/// `Z_N` for an even full-line weight via parity factorisation:
/// `N!/(N1! N2!) Z_{N1}[even-reduced] Z_{N2}[odd-reduced]`.
pub fn z_mb_fullline(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    z_mb_fullline_in::<Dd>(spec)
}

/// [`z_mb_fullline`] at precision `T`.
pub fn z_mb_fullline_in<T: Real>(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    spec.validate()?;
    let (even, odd) = parity_reduce(&spec.weight, spec.theta)?;
    let (n1, n2) = parity_sizes(spec.n);
    let ze = z_half_unchecked::<T>(&even, n1, spec.theta)?;
    let zo = z_half_unchecked::<T>(&odd, n2, spec.theta)?;
    let lf = crate::specfun::ln_factorial;
    Ok((ze * zo).scale_by_log(lf(spec.n) - lf(n1) - lf(n2)))
}

/// `Z_N` for either kind of weight.
pub fn z_any(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    if spec.weight.is_full_line() {
        z_mb_fullline(spec)
    } else {
        z_mb(spec)
    }
}

/// One column of a moment matrix: base exponent plus the integer step of each row
/// above it (`None` marks a structural zero).
#[derive(Clone, Debug)]
pub(crate) struct LadderColumn<T> {
    pub base: T,
    pub steps: Vec<Option<usize>>,
}

/// Determinant of `[m(base_j + steps_ij)]` for a half-line weight, factoring `m(base_j)`
/// out of each column and filling the rest from exact moment step ratios.
pub(crate) fn ladder_det<T: Real>(w: &WeightSpec, cols: &[LadderColumn<T>]) -> Result<(LogAcc<T>, f64)> {
    let n = cols.len();
    let mut acc = LogAcc::<T>::new();
    let mut mat = vec![vec![T::zero(); n]; n];
    for (j, col) in cols.iter().enumerate() {
        if col.steps.len() != n {
            return Err(MbError::Consistency("moment ladder column has the wrong length".into()));
        }
        let max_step = col.steps.iter().flatten().copied().max();
        let Some(max_step) = max_step else {
            return Ok((LogAcc { sign: 0, log: T::zero() }, f64::INFINITY));
        };
        acc.add_log(ln_moment_in(w, col.base)?);
        if max_step > 0 {
            ln_moment_in(w, col.base + T::from_i64(max_step as i64))?;
        }
        let mut ladder = Vec::with_capacity(max_step + 1);
        let mut v = T::one();
        ladder.push(v);
        for t in 0..max_step {
            v *= moment_step_ratio(w, col.base + T::from_i64(t as i64));
            ladder.push(v);
        }
        for (i, s) in col.steps.iter().enumerate() {
            if let Some(s) = s {
                mat[i][j] = ladder[*s];
            }
        }
    }
    let lu = det_lu(mat);
    acc.mul_value(lu.det);
    Ok((acc, lu.pivot_ratio))
}

/// Brute-force `Z_N = N! det[m(j-1+θ(k-1))]` from closed-form half-line moments.
pub fn z_oracle_moments(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    z_oracle_moments_in::<Dd>(spec)
}

/// [`z_oracle_moments`] at precision `T`.
pub fn z_oracle_moments_in<T: Real>(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    spec.weight.validate()?;
    if spec.weight.is_full_line() {
        return Err(MbError::Domain(format!("z_oracle_moments needs a half-line weight, got {}", spec.weight)));
    }
    let th = T::from_f64(spec.theta);
    let cols: Vec<LadderColumn<T>> = (0..spec.n)
        .map(|k| LadderColumn { base: th * T::from_i64(k as i64), steps: (0..spec.n).map(Some).collect() })
        .collect();
    let (mut acc, _) = ladder_det(&spec.weight, &cols)?;
    acc.add_log(T::from_f64(crate::specfun::ln_factorial(spec.n)));
    Ok(acc.finish())
}

/// Brute-force `Z_N = N! det[∫ w |x|^{j-1+θ(k-1)} (sgn x)^{j+k} dx]` for an even weight.
pub fn z_oracle_fullline(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    z_oracle_fullline_in::<Dd>(spec)
}

/// [`z_oracle_fullline`] at precision `T`.
pub fn z_oracle_fullline_in<T: Real>(spec: &EnsembleSpec) -> Result<SignedLogReal> {
    spec.weight.validate()?;
    let ue = even_reduced(&spec.weight)?;
    let th = T::from_f64(spec.theta);
    let n = spec.n;
    let cols: Vec<LadderColumn<T>> = (1..=n)
        .map(|k| {
            let j0 = if k % 2 == 1 { 1 } else { 2 };
            let base = (T::from_i64(j0 as i64 - 1) + th * T::from_i64(k as i64 - 1)) / T::from_f64(2.0);
            let steps = (1..=n).map(|j| if (j + k) % 2 == 0 { Some((j - j0) / 2) } else { None }).collect();
            LadderColumn { base, steps }
        })
        .collect();
    let (mut acc, _) = ladder_det(&ue, &cols)?;
    acc.add_log(T::from_f64(crate::specfun::ln_factorial(n)));
    Ok(acc.finish())
}
