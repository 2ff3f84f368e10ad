//! Log-domain gamma arithmetic, signed log reals and generalized Pochhammer symbols.
//!
//! `log_gamma` (double precision) uses the Taylor series of `ln Γ(2+z)` whose
//! coefficients are `(-1)^k (ζ(k) - 1)/k` on `[0.5, 2.5]`, the functional equation
//! to reach that interval, and the Stirling series with Bernoulli numbers up to
//! `B_20` for `x >= 12`. The extended version shifts the argument to `x >= 30`
//! and sums the Stirling series up to `B_30` in double-double arithmetic.

use std::fmt;
use std::ops::{Div, Mul, Neg};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dd::{Dd, Real};
use crate::error::{MbError, Result};
use crate::symfun::Partition;

/// Distance to a non-positive integer below which an argument counts as a pole.
pub const POLE_TOL: f64 = 1e-9;

/// A real number stored as a sign and the natural log of its magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedLogReal {
    pub sign: i8,
    pub logmag: f64,
}

impl SignedLogReal {
    pub const ZERO: SignedLogReal = SignedLogReal { sign: 0, logmag: f64::NEG_INFINITY };
    pub const ONE: SignedLogReal = SignedLogReal { sign: 1, logmag: 0.0 };

    /// Builds a value; a zero sign forces the canonical zero.
    pub fn new(sign: i8, logmag: f64) -> SignedLogReal {
        if sign == 0 {
            SignedLogReal::ZERO
        } else {
            SignedLogReal { sign: sign.signum(), logmag }
        }
    }

    pub fn from_real(v: f64) -> SignedLogReal {
        if v == 0.0 {
            SignedLogReal::ZERO
        } else {
            SignedLogReal { sign: if v > 0.0 { 1 } else { -1 }, logmag: v.abs().ln() }
        }
    }

    /// From a generic scalar, keeping the log magnitude at that precision until the final rounding.
    pub fn from_scalar<T: Real>(v: T) -> SignedLogReal {
        let f = v.to_f64();
        if f == 0.0 {
            return SignedLogReal::ZERO;
        }
        let sign = if f > 0.0 { 1 } else { -1 };
        SignedLogReal { sign, logmag: v.abs().ln().to_f64() }
    }

    pub fn to_real(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.logmag.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn recip(self) -> SignedLogReal {
        SignedLogReal { sign: self.sign, logmag: -self.logmag }
    }

    /// Signed log-sum-exp.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: SignedLogReal) -> SignedLogReal {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.logmag >= other.logmag { (self, other) } else { (other, self) };
        let r = (small.logmag - big.logmag).exp();
        let m = if big.sign == small.sign { 1.0 + r } else { 1.0 - r };
        if m == 0.0 {
            return SignedLogReal::ZERO;
        }
        SignedLogReal { sign: big.sign, logmag: big.logmag + m.ln() }
    }

    pub fn scale_by_log(self, log: f64) -> SignedLogReal {
        SignedLogReal::new(self.sign, self.logmag + log)
    }

    /// Relative difference `|a/b - 1|`, infinite when signs differ.
    pub fn rel_diff(self, other: SignedLogReal) -> f64 {
        if self.sign == 0 && other.sign == 0 {
            return 0.0;
        }
        if self.sign != other.sign {
            return f64::INFINITY;
        }
        (self.logmag - other.logmag).exp_m1().abs()
    }
}

impl Mul for SignedLogReal {
    type Output = SignedLogReal;
    fn mul(self, b: SignedLogReal) -> SignedLogReal {
        SignedLogReal::new(self.sign * b.sign, self.logmag + b.logmag)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for SignedLogReal {
    type Output = SignedLogReal;
    fn div(self, b: SignedLogReal) -> SignedLogReal {
        self * b.recip()
    }
}

impl Neg for SignedLogReal {
    type Output = SignedLogReal;
    fn neg(self) -> SignedLogReal {
        SignedLogReal::new(-self.sign, self.logmag)
    }
}

impl fmt::Display for SignedLogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({:.17e})", if s > 0 { "+" } else { "-" }, self.logmag),
        }
    }
}

/// `sin(π x)` with exact argument reduction.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (std::f64::consts::PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// True when `x` is within [`POLE_TOL`] of a non-positive integer.
pub fn is_pole(x: f64) -> bool {
    x <= POLE_TOL && (x - x.round()).abs() < POLE_TOL
}

fn zeta_minus_one() -> &'static [f64; 64] {
    static TABLE: OnceLock<[f64; 64]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 64];
        // Direct sum below 64 plus the Euler-Maclaurin tail; the first omitted
        // correction is below 1e-18 for every k >= 2.
        let n = 64.0f64;
        for (k, slot) in t.iter_mut().enumerate().skip(2) {
            let kf = k as f64;
            let mut s = 0.0;
            for m in (2..64).rev() {
                s += (m as f64).powf(-kf);
            }
            let tail = n.powf(1.0 - kf) / (kf - 1.0) + 0.5 * n.powf(-kf) + kf / 12.0 * n.powf(-kf - 1.0)
                - kf * (kf + 1.0) * (kf + 2.0) / 720.0 * n.powf(-kf - 3.0)
                + kf * (kf + 1.0) * (kf + 2.0) * (kf + 3.0) * (kf + 4.0) / 30240.0 * n.powf(-kf - 5.0);
            *slot = s + tail;
        }
        t
    })
}

/// `ln Γ(2+z)` for `|z| <= 1/2`.
fn ln_gamma_2_plus(z: f64) -> f64 {
    const EULER: f64 = 0.5772156649015329;
    let zm = zeta_minus_one();
    let mut sum = 0.0;
    let mut pow = z;
    let mut terms = Vec::with_capacity(64);
    for (k, c) in zm.iter().enumerate().skip(2) {
        pow *= z;
        let t = if k % 2 == 0 { *c } else { -*c } * pow / k as f64;
        terms.push(t);
        if t.abs() < 1e-18 * (z.abs() + 1e-300) {
            break;
        }
    }
    for t in terms.iter().rev() {
        sum += t;
    }
    z * (1.0 - EULER) + sum
}

const BERNOULLI_F64: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Natural log of Γ(x) for real `x > 0`, in double precision.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(MbError::domain(format!("log_gamma requires a finite x > 0, got {x}")));
    }
    Ok(log_gamma_pos(x))
}

fn log_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return log_gamma_pos(x + 1.0) - x.ln();
    }
    if x <= 1.5 {
        let z = x - 1.0;
        return ln_gamma_2_plus(z) - z.ln_1p();
    }
    if x <= 2.5 {
        return ln_gamma_2_plus(x - 2.0);
    }
    if x < 12.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        return ln_gamma_2_plus(y - 2.0) + prod.ln();
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for (i, b) in BERNOULLI_F64.iter().enumerate() {
        let k = (2 * i + 2) as f64;
        series += b / (k * (k - 1.0)) * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.918_938_533_204_672_8 + series
}

const BERNOULLI_RATIONAL: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

/// `ln Γ(x)` in double-double precision for `x > 0` (NaN otherwise).
pub fn ln_gamma_dd(x: Dd) -> Dd {
    if !(x.hi() > 0.0) || !x.is_finite() {
        return Dd::from(f64::NAN);
    }
    let mut y = x;
    let mut prod = Dd::ONE;
    let mut shifted = false;
    while y.hi() < 30.0 {
        prod *= y;
        y += Dd::ONE;
        shifted = true;
    }
    let inv = y.recip();
    let inv2 = inv.sqr();
    let mut p = inv;
    let mut series = Dd::ZERO;
    for (i, &(num, den)) in BERNOULLI_RATIONAL.iter().enumerate() {
        let k = (2 * i + 2) as f64;
        series += Dd::from(num) / Dd::from(den * k * (k - 1.0)) * p;
        p *= inv2;
    }
    let st = (y - 0.5) * y.ln() - y + Dd::HALF_LN_2PI + series;
    if shifted {
        st - prod.ln()
    } else {
        st
    }
}

/// `ln |Γ(x)|` and the sign of `Γ(x)` at precision `T`, using reflection for `x < 0`.
pub fn ln_gamma_signed_in<T: Real>(x: T) -> Result<(i8, T)> {
    let xf = x.to_f64();
    if !xf.is_finite() {
        return Err(MbError::domain(format!("non-finite gamma argument {xf}")));
    }
    if is_pole(xf) {
        return Err(MbError::Pole(format!("Γ has a pole at {xf}")));
    }
    if xf > 0.0 {
        return Ok((1, x.ln_gamma()));
    }
    let s = x.sin_pi();
    let sign = if s.to_f64() > 0.0 { 1 } else { -1 };
    let lg = T::pi().ln() - s.abs().ln() - (T::one() - x).ln_gamma();
    Ok((sign, lg))
}

/// `∏Γ(num_i)/∏Γ(den_j)` at precision `T` as (sign, log magnitude).
///
/// A numerator pole is an error; a denominator pole yields the exact zero.
pub fn gamma_ratio_in<T: Real>(numerators: &[T], denominators: &[T]) -> Result<(i8, T)> {
    for d in denominators {
        if is_pole(d.to_f64()) {
            for n in numerators {
                if is_pole(n.to_f64()) {
                    return Err(MbError::Pole(format!("Γ pole in numerator at {}", n.to_f64())));
                }
            }
            return Ok((0, T::zero()));
        }
    }
    let mut sign = 1i8;
    let mut acc = T::zero();
    for &n in numerators {
        let (s, l) = ln_gamma_signed_in(n)?;
        sign *= s;
        acc += l;
    }
    for &d in denominators {
        let (s, l) = ln_gamma_signed_in(d)?;
        sign *= s;
        acc -= l;
    }
    Ok((sign, acc))
}

/// `∏Γ(num_i)/∏Γ(den_j)` as a [`SignedLogReal`], accumulated in double-double.
pub fn gamma_ratio(numerators: &[f64], denominators: &[f64]) -> Result<SignedLogReal> {
    gamma_ratio_with::<Dd>(numerators, denominators)
}

/// [`gamma_ratio`] with the accumulation precision chosen by the caller.
pub fn gamma_ratio_with<T: Real>(numerators: &[f64], denominators: &[f64]) -> Result<SignedLogReal> {
    let n: Vec<T> = numerators.iter().map(|&v| T::from_f64(v)).collect();
    let d: Vec<T> = denominators.iter().map(|&v| T::from_f64(v)).collect();
    let (s, l) = gamma_ratio_in(&n, &d)?;
    Ok(SignedLogReal::new(s, l.to_f64()))
}

/// Sign-aware accumulator for products and quotients of gamma values.
#[derive(Clone, Copy, Debug)]
pub struct LogAcc<T> {
    pub sign: i8,
    pub log: T,
}

impl<T: Real> Default for LogAcc<T> {
    fn default() -> Self {
        LogAcc { sign: 1, log: T::zero() }
    }
}

impl<T: Real> LogAcc<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiplies by `Γ(x)`.
    pub fn mul_gamma(&mut self, x: T) -> Result<()> {
        let (s, l) = ln_gamma_signed_in(x)?;
        self.sign *= s;
        self.log += l;
        Ok(())
    }

    /// Divides by `Γ(x)`; a pole in the denominator makes the product zero.
    pub fn div_gamma(&mut self, x: T) -> Result<()> {
        if is_pole(x.to_f64()) {
            self.sign = 0;
            return Ok(());
        }
        let (s, l) = ln_gamma_signed_in(x)?;
        self.sign *= s;
        self.log -= l;
        Ok(())
    }

    /// Multiplies by a plain value.
    pub fn mul_value(&mut self, v: T) {
        let f = v.to_f64();
        if f == 0.0 {
            self.sign = 0;
            return;
        }
        if f < 0.0 {
            self.sign = -self.sign;
        }
        self.log += v.abs().ln();
    }

    /// Divides by a plain non-zero value.
    pub fn div_value(&mut self, v: T) {
        if v.to_f64() < 0.0 {
            self.sign = -self.sign;
        }
        self.log -= v.abs().ln();
    }

    pub fn add_log(&mut self, l: T) {
        self.log += l;
    }

    pub fn finish(self) -> SignedLogReal {
        SignedLogReal::new(self.sign, self.log.to_f64())
    }

    /// The value itself at precision `T` (may overflow for huge products).
    pub fn value(self) -> T {
        if self.sign == 0 {
            return T::zero();
        }
        let m = self.log.exp();
        if self.sign < 0 {
            -m
        } else {
            m
        }
    }
}

/// Arguments of the generalized Pochhammer symbol `(a)^{(1/γ)}_λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenPochhammerArgs {
    pub a: f64,
    pub gamma_step: f64,
    pub lambda: Partition,
}

/// `∏_k Γ(a-(k-1)γ+λ_k)/Γ(a-(k-1)γ)`.
pub fn gen_pochhammer(args: &GenPochhammerArgs) -> Result<SignedLogReal> {
    let mut sign = 1i8;
    let mut acc = Dd::ZERO;
    for (k, &part) in args.lambda.parts().iter().enumerate() {
        if part == 0 {
            continue;
        }
        let base = args.a - k as f64 * args.gamma_step;
        let top = base + part as f64;
        if is_pole(base) || is_pole(top) {
            return Err(MbError::Pole(format!(
                "generalized Pochhammer: Γ pole at row {} (arguments {base}, {top})",
                k + 1
            )));
        }
        let (s, l) = gamma_ratio_in(&[Dd::from(top)], &[Dd::from(base)])?;
        sign *= s;
        acc += l;
    }
    Ok(SignedLogReal::new(sign, acc.to_f64()))
}

/// Rising factorial `x (x+1) ... (x+n-1)`.
pub fn rising<T: Real>(x: T, n: usize) -> T {
    let mut p = T::one();
    let mut y = x;
    for _ in 0..n {
        p *= y;
        y += T::one();
    }
    p
}

/// `n!` at precision `T` (exact for `n <= 22` in `f64`, `n <= 33` in double-double).
pub fn factorial<T: Real>(n: usize) -> T {
    rising(T::one(), n)
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma_dd(Dd::from((n + 1) as f64)).to_f64()
    }
}

/// Binomial coefficient as an exact integer (`n <= 66`).
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Binomial coefficient at precision `T`.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    let b = binomial_u128(n, k);
    let hi = (b >> 53) as f64 * 2f64.powi(53);
    let lo = (b & ((1u128 << 53) - 1)) as f64;
    T::from_f64(hi) + T::from_f64(lo)
}
