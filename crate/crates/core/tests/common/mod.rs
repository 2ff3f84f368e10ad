#![allow(dead_code)]

use mb_core::weights::{parity_reduce, parity_sizes, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

/// Random half-line weight valid for an ensemble of size `n` with coupling `theta`.
pub fn random_half_line(r: &mut ChaCha8Rng, family: usize, n: usize, theta: f64) -> WeightSpec {
    match family {
        0 => WeightSpec::Laguerre { a: r.random_range(-0.9..3.0) },
        1 => WeightSpec::Jacobi { a: r.random_range(-0.9..3.0), b: r.random_range(-0.9..3.0) },
        _ => {
            let alpha = r.random_range(-0.9..3.0);
            let beta = alpha + n as f64 + theta * (n as f64 - 1.0) + r.random_range(0.5..5.0);
            WeightSpec::JacobiPrime { alpha, beta }
        }
    }
}

/// Random full-line weight valid for an ensemble of size `n` with coupling `theta`.
pub fn random_full_line(r: &mut ChaCha8Rng, family: usize, n: usize, theta: f64) -> WeightSpec {
    let c = r.random_range(-0.4..2.0);
    match family {
        0 => WeightSpec::GenGaussian { c },
        1 => WeightSpec::GenSymJacobi { c, alpha: r.random_range(-0.9..3.0) },
        _ => {
            let (n1, n2) = parity_sizes(n);
            let need_e = c - 0.5 + n1 as f64 + theta * (n1 as f64 - 1.0);
            let need_o = if n2 > 0 { c + theta / 2.0 + n2 as f64 + theta * (n2 as f64 - 1.0) } else { f64::MIN };
            let need = need_e.max(need_o).max(c + 0.5);
            let w = WeightSpec::GenCauchy { c, alpha: need + r.random_range(0.5..5.0) };
            let _ = parity_reduce(&w, theta).unwrap();
            w
        }
    }
}

/// Tensor Gauss–Legendre integration of `f` over `[lo, hi]^2`, split into `pieces` panels per axis.
pub fn gauss_legendre_2d(f: impl Fn(f64, f64) -> f64, lo: f64, hi: f64, pieces: usize) -> f64 {
    let (x, w) = gauss_legendre_20();
    let h = (hi - lo) / pieces as f64;
    let mut total = 0.0;
    for pi in 0..pieces {
        for pj in 0..pieces {
            let ax = lo + pi as f64 * h;
            let ay = lo + pj as f64 * h;
            for i in 0..x.len() {
                for j in 0..x.len() {
                    let u = ax + h * (x[i] + 1.0) / 2.0;
                    let v = ay + h * (x[j] + 1.0) / 2.0;
                    total += w[i] * w[j] * f(u, v) * h * h / 4.0;
                }
            }
        }
    }
    total
}

/// 20-point Gauss–Legendre nodes and weights on [-1, 1] (Newton on the Legendre recurrence).
pub fn gauss_legendre_20() -> (Vec<f64>, Vec<f64>) {
    let n = 20;
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs.push(x);
        ws.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (xs, ws)
}

/// Double-exponential (tanh-sinh) integral over `(0, 1)`; `f` receives `(x, 1 - x)`
/// so both endpoints are resolved without cancellation.
pub fn de_unit(f: impl Fn(f64, f64) -> f64) -> f64 {
    de_refine(|t| {
        let s = std::f64::consts::PI * t.sinh();
        let x = 1.0 / (1.0 + (-s).exp());
        let y = 1.0 / (1.0 + s.exp());
        let jac = x * y * std::f64::consts::PI * t.cosh();
        (f(x, y) * jac, x > 0.0 && y > 0.0)
    })
}

/// Double-exponential (exp-sinh) integral over `(0, ∞)`.
pub fn de_half(f: impl Fn(f64) -> f64) -> f64 {
    de_refine(|t| {
        let x = (std::f64::consts::FRAC_PI_2 * t.sinh()).exp();
        let jac = x * std::f64::consts::FRAC_PI_2 * t.cosh();
        (f(x) * jac, x > 0.0 && x.is_finite())
    })
}

/// Trapezoid sums on `t ∈ [-7, 7]` with halving steps until two agree to 1e-14.
fn de_refine(g: impl Fn(f64) -> (f64, bool)) -> f64 {
    let sum = |h: f64| -> f64 {
        let m = (7.0 / h) as i64;
        let mut s = 0.0;
        for i in -m..=m {
            let (v, ok) = g(i as f64 * h);
            if ok && v.is_finite() {
                s += v;
            }
        }
        s * h
    };
    let mut h = 0.5;
    let mut prev = sum(h);
    loop {
        h /= 2.0;
        let cur = sum(h);
        if (cur - prev).abs() <= 1e-14 * cur.abs() || h < 1.0 / 512.0 {
            return cur;
        }
        prev = cur;
    }
}
