//! Classical weights, ensemble specifications, closed-form moments and parity reduction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dd::{Dd, Real};
use crate::error::{MbError, Result};
use crate::specfun::{LogAcc, SignedLogReal};

/// One of the six classical weights.
///
/// Half-line: `x^a e^{-x}` on `(0,∞)`, `x^a (1-x)^b` on `(0,1)`, `x^α (1+x)^{-β}` on `(0,∞)`.
/// Full line (even): `|x|^{2c} e^{-x²}`, `|x|^{2c} (1-x²)^α` on `(-1,1)`, `|x|^{2c} (1+x²)^{-α}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum WeightSpec {
    Laguerre { a: f64 },
    Jacobi { a: f64, b: f64 },
    JacobiPrime { alpha: f64, beta: f64 },
    GenGaussian { c: f64 },
    GenSymJacobi { c: f64, alpha: f64 },
    GenCauchy { c: f64, alpha: f64 },
}

/// Support of a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    UnitInterval,
    HalfLine,
    RealLine,
    SymmetricUnit,
}

impl Support {
    /// True when `x` lies in the open support.
    pub fn contains(self, x: f64) -> bool {
        match self {
            Support::UnitInterval => x > 0.0 && x < 1.0,
            Support::HalfLine => x > 0.0 && x.is_finite(),
            Support::RealLine => x.is_finite(),
            Support::SymmetricUnit => x > -1.0 && x < 1.0,
        }
    }
}

impl WeightSpec {
    /// Checks the single-variable integrability conditions.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(MbError::Domain(m));
        let finite = match *self {
            WeightSpec::Laguerre { a } | WeightSpec::GenGaussian { c: a } => a.is_finite(),
            WeightSpec::Jacobi { a, b } => a.is_finite() && b.is_finite(),
            WeightSpec::JacobiPrime { alpha, beta } => alpha.is_finite() && beta.is_finite(),
            WeightSpec::GenSymJacobi { c, alpha } | WeightSpec::GenCauchy { c, alpha } => {
                c.is_finite() && alpha.is_finite()
            }
        };
        if !finite {
            return bad(format!("non-finite weight parameter in {self}"));
        }
        match *self {
            WeightSpec::Laguerre { a } if a <= -1.0 => bad(format!("laguerre needs a > -1 (a = {a})")),
            WeightSpec::Jacobi { a, b } if a <= -1.0 || b <= -1.0 => {
                bad(format!("jacobi needs a > -1 and b > -1 (a = {a}, b = {b})"))
            }
            WeightSpec::JacobiPrime { alpha, beta } if alpha <= -1.0 || beta <= alpha + 1.0 => {
                bad(format!("jacobi_prime needs alpha > -1 and beta > alpha + 1 (alpha = {alpha}, beta = {beta})"))
            }
            WeightSpec::GenGaussian { c } if c <= -0.5 => bad(format!("gen_gaussian needs c > -1/2 (c = {c})")),
            WeightSpec::GenSymJacobi { c, alpha } if c <= -0.5 || alpha <= -1.0 => {
                bad(format!("gen_sym_jacobi needs c > -1/2 and alpha > -1 (c = {c}, alpha = {alpha})"))
            }
            WeightSpec::GenCauchy { c, alpha } if c <= -0.5 || alpha <= c + 0.5 => {
                bad(format!("gen_cauchy needs c > -1/2 and alpha > c + 1/2 (c = {c}, alpha = {alpha})"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_full_line(&self) -> bool {
        matches!(self, WeightSpec::GenGaussian { .. } | WeightSpec::GenSymJacobi { .. } | WeightSpec::GenCauchy { .. })
    }

    pub fn support(&self) -> Support {
        match self {
            WeightSpec::Laguerre { .. } | WeightSpec::JacobiPrime { .. } => Support::HalfLine,
            WeightSpec::Jacobi { .. } => Support::UnitInterval,
            WeightSpec::GenGaussian { .. } | WeightSpec::GenCauchy { .. } => Support::RealLine,
            WeightSpec::GenSymJacobi { .. } => Support::SymmetricUnit,
        }
    }

    /// Family name as used in JSON and on the command line.
    pub fn family_name(&self) -> &'static str {
        match self {
            WeightSpec::Laguerre { .. } => "laguerre",
            WeightSpec::Jacobi { .. } => "jacobi",
            WeightSpec::JacobiPrime { .. } => "jacobi_prime",
            WeightSpec::GenGaussian { .. } => "gen_gaussian",
            WeightSpec::GenSymJacobi { .. } => "gen_sym_jacobi",
            WeightSpec::GenCauchy { .. } => "gen_cauchy",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("weight serialisation")
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WeightSpec::Laguerre { a } => write!(f, "laguerre(a={a})"),
            WeightSpec::Jacobi { a, b } => write!(f, "jacobi(a={a}, b={b})"),
            WeightSpec::JacobiPrime { alpha, beta } => write!(f, "jacobi_prime(alpha={alpha}, beta={beta})"),
            WeightSpec::GenGaussian { c } => write!(f, "gen_gaussian(c={c})"),
            WeightSpec::GenSymJacobi { c, alpha } => write!(f, "gen_sym_jacobi(c={c}, alpha={alpha})"),
            WeightSpec::GenCauchy { c, alpha } => write!(f, "gen_cauchy(c={c}, alpha={alpha})"),
        }
    }
}

/// A Muttalib–Borodin ensemble: weight, number of particles and coupling exponent θ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub weight: WeightSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub theta: f64,
}

/// Sizes `(⌊(N+1)/2⌋, ⌊N/2⌋)` of the even and odd parity-reduced ensembles.
pub fn parity_sizes(n: usize) -> (usize, usize) {
    (n.div_ceil(2), n / 2)
}

fn jacobi_prime_size_check(alpha: f64, beta: f64, n: usize, theta: f64, what: &str) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    let bound = alpha + n as f64 + theta * (n as f64 - 1.0);
    if beta <= bound {
        return Err(MbError::Domain(format!(
            "{what}: jacobi_prime constraint beta > alpha + N + theta*(N-1) violated \
             (beta = {beta}, alpha = {alpha}, N = {n}, theta = {theta}, bound = {bound}; \
             Γ argument beta - alpha - N - theta*(N-1) = {} <= 0)",
            beta - bound
        )));
    }
    Ok(())
}

impl EnsembleSpec {
    pub fn new(weight: WeightSpec, n: usize, theta: f64) -> Result<EnsembleSpec> {
        let s = EnsembleSpec { weight, n, theta };
        s.validate()?;
        Ok(s)
    }

    /// Checks the weight, `N >= 1`, `θ > 0` and the size-dependent finiteness constraints.
    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        if self.n == 0 {
            return Err(MbError::domain("ensemble size N must be at least 1"));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(MbError::domain(format!("theta must be positive and finite (theta = {})", self.theta)));
        }
        match self.weight {
            WeightSpec::JacobiPrime { alpha, beta } => {
                jacobi_prime_size_check(alpha, beta, self.n, self.theta, "ensemble")
            }
            WeightSpec::GenCauchy { .. } => {
                let (even, odd) = parity_reduce(&self.weight, self.theta)?;
                let (n1, n2) = parity_sizes(self.n);
                for (w, m, tag) in [(even, n1, "even-reduced ensemble"), (odd, n2, "odd-reduced ensemble")] {
                    if let WeightSpec::JacobiPrime { alpha, beta } = w {
                        jacobi_prime_size_check(alpha, beta, m, self.theta, tag)?;
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("ensemble serialisation")
    }
}

/// A sampled value of a weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightPoint {
    pub x: f64,
    pub density: f64,
}

/// `w(x)`: zero outside the support, by continuity at finite endpoints and
/// `+∞` at an endpoint where the weight diverges.
pub fn weight_eval(w: &WeightSpec, x: f64) -> f64 {
    if x.is_nan() {
        return 0.0;
    }
    match *w {
        WeightSpec::Laguerre { a } => {
            if x < 0.0 || !x.is_finite() {
                0.0
            } else {
                x.powf(a) * (-x).exp()
            }
        }
        WeightSpec::Jacobi { a, b } => {
            if !(0.0..=1.0).contains(&x) {
                0.0
            } else {
                x.powf(a) * (1.0 - x).powf(b)
            }
        }
        WeightSpec::JacobiPrime { alpha, beta } => {
            if x < 0.0 || !x.is_finite() {
                0.0
            } else {
                x.powf(alpha) * (1.0 + x).powf(-beta)
            }
        }
        WeightSpec::GenGaussian { c } => {
            if !x.is_finite() {
                0.0
            } else {
                x.abs().powf(2.0 * c) * (-x * x).exp()
            }
        }
        WeightSpec::GenSymJacobi { c, alpha } => {
            if !(-1.0..=1.0).contains(&x) {
                0.0
            } else {
                x.abs().powf(2.0 * c) * (1.0 - x * x).powf(alpha)
            }
        }
        WeightSpec::GenCauchy { c, alpha } => {
            if !x.is_finite() {
                0.0
            } else {
                x.abs().powf(2.0 * c) * (1.0 + x * x).powf(-alpha)
            }
        }
    }
}

/// `(x, w(x))` as a [`WeightPoint`].
pub fn weight_point(w: &WeightSpec, x: f64) -> WeightPoint {
    WeightPoint { x, density: weight_eval(w, x) }
}

/// `ln w(x)` inside the open support, `-∞` outside.
pub fn log_weight(w: &WeightSpec, x: f64) -> f64 {
    if !w.support().contains(x) {
        return f64::NEG_INFINITY;
    }
    match *w {
        WeightSpec::Laguerre { a } => a * x.ln() - x,
        WeightSpec::Jacobi { a, b } => a * x.ln() + b * (-x).ln_1p(),
        WeightSpec::JacobiPrime { alpha, beta } => alpha * x.ln() - beta * x.ln_1p(),
        WeightSpec::GenGaussian { c } => 2.0 * c * x.abs().ln() - x * x,
        WeightSpec::GenSymJacobi { c, alpha } => 2.0 * c * x.abs().ln() + alpha * (-x * x).ln_1p(),
        WeightSpec::GenCauchy { c, alpha } => 2.0 * c * x.abs().ln() - alpha * (x * x).ln_1p(),
    }
}

fn half_line_only(w: &WeightSpec, op: &str) -> Result<()> {
    if w.is_full_line() {
        Err(MbError::Domain(format!("{op} needs a half-line weight, got {w}")))
    } else {
        Ok(())
    }
}

/// `ln ∫ w(x) x^p dx` at precision `T` for a half-line weight.
pub fn ln_moment_in<T: Real>(w: &WeightSpec, p: T) -> Result<T> {
    half_line_only(w, "moment")?;
    let pf = p.to_f64();
    let one = T::one();
    let mut acc = LogAcc::<T>::new();
    match *w {
        WeightSpec::Laguerre { a } => {
            if a + pf <= -1.0 {
                return Err(MbError::Domain(format!("laguerre moment needs a + p > -1 (a = {a}, p = {pf})")));
            }
            acc.mul_gamma(T::from_f64(a) + p + one)?;
        }
        WeightSpec::Jacobi { a, b } => {
            if a + pf <= -1.0 {
                return Err(MbError::Domain(format!("jacobi moment needs a + p > -1 (a = {a}, p = {pf})")));
            }
            let ta = T::from_f64(a);
            let tb = T::from_f64(b);
            acc.mul_gamma(ta + p + one)?;
            acc.mul_gamma(tb + one)?;
            acc.div_gamma(ta + tb + p + T::from_f64(2.0))?;
        }
        WeightSpec::JacobiPrime { alpha, beta } => {
            if alpha + pf <= -1.0 || beta - alpha - pf - 1.0 <= 0.0 {
                return Err(MbError::Domain(format!(
                    "jacobi_prime moment needs alpha + p > -1 and beta - alpha - p - 1 > 0 \
                     (alpha = {alpha}, beta = {beta}, p = {pf})"
                )));
            }
            let ta = T::from_f64(alpha);
            let tb = T::from_f64(beta);
            acc.mul_gamma(ta + p + one)?;
            acc.mul_gamma(tb - ta - p - one)?;
            acc.div_gamma(tb)?;
        }
        _ => unreachable!(),
    }
    Ok(acc.log)
}

/// `∫ w(x) x^p dx` for a half-line weight, in closed form.
pub fn moment(w: &WeightSpec, p: f64) -> Result<SignedLogReal> {
    w.validate()?;
    let l = ln_moment_in::<Dd>(w, Dd::from(p))?;
    Ok(SignedLogReal::new(1, l.to_f64()))
}

/// The exact step ratio `m(p+1)/m(p)` of consecutive moments.
pub fn moment_step_ratio<T: Real>(w: &WeightSpec, p: T) -> T {
    let one = T::one();
    match *w {
        WeightSpec::Laguerre { a } => T::from_f64(a) + p + one,
        WeightSpec::Jacobi { a, b } => {
            (T::from_f64(a) + p + one) / (T::from_f64(a) + T::from_f64(b) + p + T::from_f64(2.0))
        }
        WeightSpec::JacobiPrime { alpha, beta } => {
            (T::from_f64(alpha) + p + one) / (T::from_f64(beta) - T::from_f64(alpha) - p - T::from_f64(2.0))
        }
        _ => panic!("moment_step_ratio is defined for half-line weights only"),
    }
}

/// Splits an even full-line weight into the half-line weights `x^{-1/2} w(x^{1/2})`
/// (even part) and `x^{θ/2} w(x^{1/2})` (odd part).
pub fn parity_reduce(w: &WeightSpec, theta: f64) -> Result<(WeightSpec, WeightSpec)> {
    let h = theta / 2.0;
    match *w {
        WeightSpec::GenGaussian { c } => Ok((WeightSpec::Laguerre { a: c - 0.5 }, WeightSpec::Laguerre { a: c + h })),
        WeightSpec::GenSymJacobi { c, alpha } => {
            Ok((WeightSpec::Jacobi { a: c - 0.5, b: alpha }, WeightSpec::Jacobi { a: c + h, b: alpha }))
        }
        WeightSpec::GenCauchy { c, alpha } => Ok((
            WeightSpec::JacobiPrime { alpha: c - 0.5, beta: alpha },
            WeightSpec::JacobiPrime { alpha: c + h, beta: alpha },
        )),
        _ => Err(MbError::Domain(format!("parity_reduce needs a full-line weight, got {w}"))),
    }
}

/// The even-reduced half-line weight `x^{-1/2} w(x^{1/2})` (independent of θ).
pub fn even_reduced(w: &WeightSpec) -> Result<WeightSpec> {
    parity_reduce(w, 1.0).map(|p| p.0)
}

/// `ln ∫_ℝ w(x)|x|^P dx` with `P = j-1+θ(k-1)` at precision `T`, or `None` when `j+k` is odd.
pub fn ln_fullline_moment_in<T: Real>(w: &WeightSpec, j: usize, k: usize, theta: T) -> Result<Option<T>> {
    if !w.is_full_line() {
        return Err(MbError::Domain(format!("fullline_moment needs a full-line weight, got {w}")));
    }
    if j == 0 || k == 0 {
        return Err(MbError::domain("fullline_moment indices start at 1"));
    }
    if (j + k) % 2 == 1 {
        return Ok(None);
    }
    let p = T::from_i64(j as i64 - 1) + theta * T::from_i64(k as i64 - 1);
    let half = p / T::from_f64(2.0);
    ln_moment_in(&even_reduced(w)?, half).map(Some)
}

/// `∫_ℝ w(x)|x|^{j-1+θ(k-1)} (sgn x)^{j+k} dx`; exactly zero when `j+k` is odd.
///
/// Equals the even-reduced moment at exponent `(j-1+θ(k-1))/2`: the `1/2` from
/// `x² = y` cancels against the two half-lines.
pub fn fullline_moment(w: &WeightSpec, j: usize, k: usize, theta: f64) -> Result<SignedLogReal> {
    w.validate()?;
    match ln_fullline_moment_in::<Dd>(w, j, k, Dd::from(theta))? {
        None => Ok(SignedLogReal::ZERO),
        Some(l) => Ok(SignedLogReal::new(1, l.to_f64())),
    }
}
