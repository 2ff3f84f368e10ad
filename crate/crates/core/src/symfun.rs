//! Partitions, Vandermonde products, elementary symmetric functions and Schur polynomials.

use serde::{Deserialize, Serialize};

use crate::dd::{Dd, Real};
use crate::error::{MbError, Result};
use crate::linalg::det_lu;
use crate::specfun::SignedLogReal;

/// Minimum pairwise gap accepted by the bialternant formula.
pub const MIN_POINT_GAP: f64 = 1e-8;

/// Integer partition with non-increasing parts (trailing zeros allowed).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Partition> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(MbError::domain(format!("partition parts must be non-increasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    /// The empty partition padded with `n` zeros.
    pub fn zeros(n: usize) -> Partition {
        Partition { parts: vec![0; n] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of non-zero parts.
    pub fn length(&self) -> usize {
        self.parts.iter().filter(|&&p| p > 0).count()
    }

    /// `|λ|`.
    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Parts padded (or truncated at zeros) to exactly `n` entries.
    pub fn padded(&self, n: usize) -> Result<Vec<u32>> {
        if self.length() > n {
            return Err(MbError::domain(format!("partition {:?} has more than {n} parts", self.parts)));
        }
        let mut v: Vec<u32> = self.parts.iter().copied().take(n).collect();
        v.resize(n, 0);
        Ok(v)
    }

    /// All partitions of `m` with at most `n` parts, padded to length `n`.
    pub fn all_of_weight(m: u32, n: usize) -> Vec<Partition> {
        fn rec(rem: u32, max: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if left == 0 {
                if rem == 0 {
                    out.push(Partition { parts: cur.clone() });
                }
                return;
            }
            for p in (0..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(m, m, n, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = MbError;
    fn try_from(v: Vec<u32>) -> Result<Partition> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

/// Evaluation points `x_1, ..., x_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointVector(pub Vec<f64>);

impl PointVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn min_gap(&self) -> f64 {
        let mut g = f64::INFINITY;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                g = g.min((self.0[i] - self.0[j]).abs());
            }
        }
        g
    }
}

/// `∏_{i<j} (x_i - x_j)`.
pub fn vandermonde(x: &PointVector) -> f64 {
    let mut p = 1.0;
    for i in 0..x.0.len() {
        for j in i + 1..x.0.len() {
            p *= x.0[i] - x.0[j];
        }
    }
    p
}

/// `e_ν(x_1, ..., x_N)` by the one-variable-at-a-time recurrence.
pub fn elementary_symmetric(nu: usize, x: &PointVector) -> Result<f64> {
    elementary_symmetric_in::<f64>(nu, &x.0)
}

/// [`elementary_symmetric`] at precision `T`.
pub fn elementary_symmetric_in<T: Real>(nu: usize, x: &[T]) -> Result<T> {
    let n = x.len();
    if nu > n {
        return Err(MbError::domain(format!("elementary symmetric index {nu} exceeds N = {n}")));
    }
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (m, &xi) in x.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            let t = xi * e[j - 1];
            e[j] += t;
        }
    }
    Ok(e[nu])
}

/// Schur polynomial by the bialternant `det[x_j^{N-i+λ_i}] / det[x_j^{N-i}]`.
pub fn schur_eval(lambda: &Partition, x: &PointVector) -> Result<f64> {
    let n = x.len();
    let parts = lambda.padded(n)?;
    if n == 0 {
        return Ok(1.0);
    }
    let gap = x.min_gap();
    if gap <= MIN_POINT_GAP {
        return Err(MbError::domain(format!(
            "schur_eval needs pairwise distinct points (min gap {gap:e} <= {MIN_POINT_GAP:e}); \
             for the all-ones specialisation use schur_at_ones"
        )));
    }
    let xs: Vec<Dd> = x.0.iter().map(|&v| Dd::from(v)).collect();
    let build = |shift: &dyn Fn(usize) -> u32| -> Vec<Vec<Dd>> {
        (0..n)
            .map(|i| {
                let e = (n - 1 - i) as i32 + shift(i) as i32;
                xs.iter().map(|&xj| xj.powi(e)).collect()
            })
            .collect()
    };
    let num = det_lu(build(&|i| parts[i])).det;
    let den = det_lu(build(&|_| 0)).det;
    Ok((num / den).to_f64())
}

/// `s_λ(1, ..., 1)` with `N` ones: `∏_{i<j} (λ_i - λ_j + j - i)/(j - i)`.
pub fn schur_at_ones(lambda: &Partition, n: usize) -> Result<SignedLogReal> {
    let parts = lambda.padded(n)?;
    let mut acc = Dd::ZERO;
    for i in 0..n {
        for j in i + 1..n {
            let num = parts[i] as f64 - parts[j] as f64 + (j - i) as f64;
            acc += Dd::from(num / (j - i) as f64).ln();
        }
    }
    Ok(SignedLogReal::new(1, acc.to_f64()))
}

/// The partition `μ^{(j)}` with parts `(θ-1)(k-l)+θ` for `l <= j` and `(θ-1)(k-l)` for `l > j`.
pub fn mu_partition(theta: f64, k: usize, j: usize) -> Result<Partition> {
    if !(theta > 0.0) || theta.fract() != 0.0 {
        return Err(MbError::domain(format!("mu_partition needs a positive integer θ, got {theta}")));
    }
    if j > k {
        return Err(MbError::domain(format!("mu_partition needs j <= k (j = {j}, k = {k})")));
    }
    let t = theta as u32;
    let parts = (1..=k)
        .map(|l| {
            let base = (t - 1) * (k - l) as u32;
            if l <= j {
                base + t
            } else {
                base
            }
        })
        .collect();
    Partition::new(parts)
}
