//! Double-double arithmetic and the [`Real`] abstraction shared by `f64` and [`Dd`].
//!
//! A [`Dd`] stores an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 32 significant decimal digits. The error-free transformations follow
//! the classical two-sum / fused-multiply-add two-product construction.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Double-double real number `hi + lo`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
    pub const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };
    /// `ln(2π)/2`.
    pub const HALF_LN_2PI: Dd = Dd { hi: 0.9189385332046728, lo: -3.8782941580672414e-17 };
    /// Euler–Mascheroni constant.
    pub const EULER: Dd = Dd { hi: 0.5772156649015329, lo: -4.942915152430645e-18 };

    /// Builds a value from two components, renormalising them.
    pub fn from_parts(hi: f64, lo: f64) -> Dd {
        let (h, l) = two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    /// Leading component.
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Trailing component.
    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Exact product of two doubles.
    pub fn mul_exact(a: f64, b: f64) -> Dd {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    /// Multiplies by `2^e` (exact unless the result leaves the normal range).
    pub fn mul_pow2(self, e: i32) -> Dd {
        let mut v = self;
        let mut e = e;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            let f = 2f64.powi(step);
            v = Dd { hi: v.hi * f, lo: v.lo * f };
            e -= step;
        }
        v
    }

    pub fn floor(self) -> Dd {
        let hi = self.hi.floor();
        if hi == self.hi {
            let lo = self.lo.floor();
            let (h, l) = quick_two_sum(hi, lo);
            Dd { hi: h, lo: l }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    /// Nearest integer, halves rounded away from zero.
    pub fn round(self) -> Dd {
        let r = (self.abs() + Dd::from(0.5)).floor();
        if self.hi < 0.0 {
            -r
        } else {
            r
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::from(f64::NAN);
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - Dd::mul_exact(ax, ax)).hi * (x * 0.5);
        Dd::from_parts(ax, corr)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.78 {
            return Dd::from(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 {
            return Dd::ONE + self;
        }
        let m = (self.hi / Dd::LN2.hi + 0.5).floor();
        let r = (self - Dd::LN2 * m).mul_pow2(-10);
        let mut term = r;
        let mut sum = r;
        let mut i = 2.0;
        loop {
            term = term * r / i;
            sum += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
            i += 1.0;
        }
        for _ in 0..10 {
            sum = sum.mul_pow2(1) + sum.sqr();
        }
        (sum + Dd::ONE).mul_pow2(m as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if !self.hi.is_finite() {
            return self;
        }
        let x = Dd::from(self.hi.ln());
        x + self * (-x).exp() - Dd::ONE
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = self;
        let mut k = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            k >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// `self^y` for `self > 0`.
    pub fn powf(self, y: Dd) -> Dd {
        if self.hi == 0.0 {
            return if y.hi > 0.0 { Dd::ZERO } else { Dd::from(f64::INFINITY) };
        }
        (y * self.ln()).exp()
    }

    /// `sin(π x)` with exact argument reduction.
    pub fn sin_pi(self) -> Dd {
        let n = self.round();
        let r = self - n;
        if r.hi == 0.0 {
            return Dd::ZERO;
        }
        let y = Dd::PI * r;
        let y2 = y.sqr();
        let mut term = y;
        let mut sum = y;
        let mut k = 1.0;
        loop {
            term = -term * y2 / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
            k += 1.0;
        }
        let odd = (n.hi.rem_euclid(2.0) + n.lo.rem_euclid(2.0)).rem_euclid(2.0) == 1.0;
        if odd {
            -sum
        } else {
            sum
        }
    }

    /// Scientific-notation decimal string with `digits` significant digits.
    pub fn to_sci_string(self, digits: usize) -> String {
        if !self.hi.is_finite() {
            return format!("{}", self.hi);
        }
        if self.hi == 0.0 {
            return "0.0".to_string();
        }
        let digits = digits.max(2);
        let neg = self.hi < 0.0;
        let mut r = self.abs();
        let mut e = r.hi.log10().floor() as i32;
        r = if e >= 0 { r / Dd::from(10.0).powi(e) } else { r * Dd::from(10.0).powi(-e) };
        while r.hi >= 10.0 {
            r = r / 10.0;
            e += 1;
        }
        while r.hi < 1.0 {
            r = r * 10.0;
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let mut d = r.hi.floor();
            if (r - d).hi < 0.0 {
                d -= 1.0;
            }
            let d = d.clamp(0.0, 9.0);
            ds.push(d as u8);
            r = (r - d) * 10.0;
        }
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::with_capacity(digits + 8);
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        s.push('.');
        for &d in &ds[1..digits] {
            s.push((b'0' + d) as char);
        }
        s.push('e');
        s.push_str(&e.to_string());
        s
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }
}

impl From<i64> for Dd {
    fn from(n: i64) -> Dd {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Dd::from_parts(hi, lo)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

// Long division needs products of the divisor.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd::from(q1);
        }
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::from(q3)
    }
}

macro_rules! f64_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for Dd {
            type Output = Dd;
            fn $m(self, b: f64) -> Dd { $tr::$m(self, Dd::from(b)) }
        }
    )*};
}
f64_ops!(Add add, Sub sub, Mul mul, Div div);

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Dd {
            fn $m(&mut self, b: Dd) { *self = *self $op b; }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({})", self.to_sci_string(32))
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(32))
    }
}

/// Error returned when a decimal string cannot be parsed as [`Dd`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDdError(pub String);

impl fmt::Display for ParseDdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal: {}", self.0)
    }
}

impl std::error::Error for ParseDdError {}

impl FromStr for Dd {
    type Err = ParseDdError;
    fn from_str(s: &str) -> Result<Dd, ParseDdError> {
        let t = s.trim();
        let err = || ParseDdError(s.to_string());
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (body, 0),
        };
        if mant.is_empty() {
            return t.parse::<f64>().map(Dd::from).map_err(|_| err());
        }
        let mut acc = Dd::ZERO;
        let mut scale = exp;
        let mut seen_dot = false;
        let mut any = false;
        for c in mant.chars() {
            match c {
                '.' if !seen_dot => seen_dot = true,
                '0'..='9' => {
                    any = true;
                    acc = acc * 10.0 + Dd::from((c as u8 - b'0') as f64);
                    if seen_dot {
                        scale -= 1;
                    }
                }
                _ => return t.parse::<f64>().map(Dd::from).map_err(|_| err()),
            }
        }
        if !any {
            return Err(err());
        }
        let ten = Dd::from(10.0);
        let v = if scale >= 0 { acc * ten.powi(scale) } else { acc / ten.powi(-scale) };
        Ok(if neg { -v } else { v })
    }
}

/// Scalar type used by the generic numerical kernels.
///
/// Implemented for `f64` ("double") and [`Dd`] ("extended").
pub trait Real:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + PartialEq
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Short name used in diagnostics.
    const NAME: &'static str;
    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(self) -> f64;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, y: Self) -> Self;
    fn mul_pow2(self, e: i32) -> Self;
    fn pi() -> Self;
    fn sin_pi(self) -> Self;
    /// `ln Γ(x)` for `x > 0` (NaN otherwise).
    fn ln_gamma(self) -> Self;
    /// Unit roundoff of the representation.
    fn epsilon() -> f64;
    fn is_finite(self) -> bool;
    /// Decimal rendering carrying every significant digit of the type.
    fn to_decimal(self) -> String;
    fn parse_decimal(s: &str) -> Option<Self>;
    fn to_dd(self) -> Dd;
    fn from_dd(x: Dd) -> Self;
}

impl Real for f64 {
    const NAME: &'static str = "double";
    fn from_f64(x: f64) -> f64 {
        x
    }
    fn from_i64(n: i64) -> f64 {
        n as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    fn powi(self, n: i32) -> f64 {
        f64::powi(self, n)
    }
    fn powf(self, y: f64) -> f64 {
        f64::powf(self, y)
    }
    fn mul_pow2(self, e: i32) -> f64 {
        Dd::from(self).mul_pow2(e).hi
    }
    fn pi() -> f64 {
        std::f64::consts::PI
    }
    fn sin_pi(self) -> f64 {
        crate::specfun::sin_pi(self)
    }
    fn ln_gamma(self) -> f64 {
        crate::specfun::log_gamma(self).unwrap_or(f64::NAN)
    }
    fn epsilon() -> f64 {
        f64::EPSILON / 2.0
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn to_decimal(self) -> String {
        format!("{:.17e}", self)
    }
    fn parse_decimal(s: &str) -> Option<f64> {
        s.trim().parse().ok()
    }
    fn to_dd(self) -> Dd {
        Dd::from(self)
    }
    fn from_dd(x: Dd) -> f64 {
        x.hi + x.lo
    }
}

impl Real for Dd {
    const NAME: &'static str = "extended";
    fn from_f64(x: f64) -> Dd {
        Dd::from(x)
    }
    fn from_i64(n: i64) -> Dd {
        Dd::from(n)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn abs(self) -> Dd {
        Dd::abs(self)
    }
    fn sqrt(self) -> Dd {
        Dd::sqrt(self)
    }
    fn exp(self) -> Dd {
        Dd::exp(self)
    }
    fn ln(self) -> Dd {
        Dd::ln(self)
    }
    fn powi(self, n: i32) -> Dd {
        Dd::powi(self, n)
    }
    fn powf(self, y: Dd) -> Dd {
        Dd::powf(self, y)
    }
    fn mul_pow2(self, e: i32) -> Dd {
        Dd::mul_pow2(self, e)
    }
    fn pi() -> Dd {
        Dd::PI
    }
    fn sin_pi(self) -> Dd {
        Dd::sin_pi(self)
    }
    fn ln_gamma(self) -> Dd {
        crate::specfun::ln_gamma_dd(self)
    }
    fn epsilon() -> f64 {
        2f64.powi(-104)
    }
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
    fn to_decimal(self) -> String {
        self.to_sci_string(32)
    }
    fn parse_decimal(s: &str) -> Option<Dd> {
        s.parse().ok()
    }
    fn to_dd(self) -> Dd {
        self
    }
    fn from_dd(x: Dd) -> Dd {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Dd, b: Dd) -> f64 {
        ((a - b) / b).hi.abs()
    }

    #[test]
    fn third_has_low_word() {
        let t = Dd::ONE / Dd::from(3.0);
        assert!(t.lo() != 0.0);
        assert!(rel(t * 3.0, Dd::ONE) < 1e-31);
    }

    #[test]
    fn sqrt_two_squares_back() {
        let s = Dd::from(2.0).sqrt();
        assert!(rel(s * s, Dd::from(2.0)) < 1e-31);
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[-30.5, -1.0, -1e-5, 0.3, 1.0, 2.5, 40.0, 300.0] {
            let v = Dd::from(x);
            let back = v.exp().ln();
            assert!((back - v).hi.abs() < 1e-30 * x.abs().max(1.0), "{x}");
        }
    }

    #[test]
    fn exp_one_matches_e() {
        let e: Dd = "2.7182818284590452353602874713526625".parse().unwrap();
        assert!(rel(Dd::ONE.exp(), e) < 1e-31);
    }

    #[test]
    fn ln2_constant_consistent() {
        assert!(rel(Dd::from(2.0).ln(), Dd::LN2) < 1e-31);
    }

    #[test]
    fn sin_pi_values() {
        let half = Dd::from(0.5).sin_pi();
        assert!((half - Dd::ONE).hi.abs() < 1e-31);
        let s = Dd::from(1.0 / 6.0).sin_pi();
        // sin(π/6 + δ) with δ from the binary rounding of 1/6.
        assert!((s.hi - 0.5).abs() < 1e-15);
        assert_eq!(Dd::from(3.0).sin_pi(), Dd::ZERO);
        assert!(Dd::from(1.5).sin_pi().hi < 0.0);
    }

    #[test]
    fn decimal_round_trip() {
        let x = Dd::PI / Dd::from(7.0);
        let s = x.to_sci_string(32);
        let y: Dd = s.parse().unwrap();
        assert!(rel(x, y) < 1e-30, "{s}");
        assert_eq!(Dd::from(-0.125).to_sci_string(5), "-1.2500e-1");
        assert_eq!(Dd::from(9.99999).to_sci_string(3), "1.00e1");
    }

    #[test]
    fn powi_and_powf() {
        let x = Dd::from(1.1);
        assert!(rel(x.powi(10), x.powf(Dd::from(10.0))) < 1e-30);
        assert!(rel(x.powi(-3) * x.powi(3), Dd::ONE) < 1e-31);
    }
}
