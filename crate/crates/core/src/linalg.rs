//! Dense determinants by LU decomposition with partial pivoting.

use crate::dd::Real;

/// Pivot ratio above which a determinant is reported as ill-conditioned.
pub const PIVOT_RATIO_WARN: f64 = 1e12;

/// Result of an LU determinant evaluation.
#[derive(Clone, Copy, Debug)]
pub struct LuDet<T> {
    pub det: T,
    /// `max |pivot| / min |pivot|` (infinite for a singular matrix).
    pub pivot_ratio: f64,
}

/// Determinant of a square row-major matrix; consumes the storage.
pub fn det_lu<T: Real>(mut a: Vec<Vec<T>>) -> LuDet<T> {
    let n = a.len();
    if n == 0 {
        return LuDet { det: T::one(), pivot_ratio: 1.0 };
    }
    let mut det = T::one();
    let mut pmax = 0.0f64;
    let mut pmin = f64::INFINITY;
    for c in 0..n {
        let mut best = c;
        let mut best_abs = a[c][c].abs().to_f64();
        for (r, row) in a.iter().enumerate().skip(c + 1) {
            let v = row[c].abs().to_f64();
            if v > best_abs {
                best = r;
                best_abs = v;
            }
        }
        if best_abs == 0.0 {
            return LuDet { det: T::zero(), pivot_ratio: f64::INFINITY };
        }
        if best != c {
            a.swap(best, c);
            det = -det;
        }
        let piv = a[c][c];
        pmax = pmax.max(best_abs);
        pmin = pmin.min(best_abs);
        det *= piv;
        let (top, bottom) = a.split_at_mut(c + 1);
        let prow = &top[c];
        for row in bottom.iter_mut() {
            let f = row[c] / piv;
            if f.to_f64() == 0.0 {
                continue;
            }
            for k in c + 1..n {
                let t = f * prow[k];
                row[k] -= t;
            }
        }
    }
    let ratio = pmax / pmin;
    if ratio > PIVOT_RATIO_WARN {
        log::warn!("LU determinant of size {n}: pivot ratio {ratio:.3e} exceeds {PIVOT_RATIO_WARN:e}");
    }
    LuDet { det, pivot_ratio: ratio }
}
