//! Monic polynomials with double-double coefficients.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dd::{Dd, Real};
use crate::error::{MbError, Result};
use crate::weights::WeightSpec;

/// Tolerance on the leading coefficient before it is snapped to exactly one.
pub const MONIC_TOL: f64 = 1e-10;

/// Which member of a biorthogonal pair a polynomial is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    P,
    Q,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::P => "p",
            Side::Q => "q",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = MbError;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "p" => Ok(Side::P),
            "q" => Ok(Side::Q),
            _ => Err(MbError::Domain(format!("side must be p or q, got {s:?}"))),
        }
    }
}

/// Monic polynomial, coefficients stored constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPoly {
    coeffs: Vec<Dd>,
}

impl MonicPoly {
    /// The constant polynomial 1.
    pub fn one() -> MonicPoly {
        MonicPoly { coeffs: vec![Dd::ONE] }
    }

    /// Checks `|lead - 1| < MONIC_TOL`, then sets the leading coefficient to exactly 1.
    pub fn from_coeffs(mut coeffs: Vec<Dd>) -> Result<MonicPoly> {
        let Some(lead) = coeffs.last_mut() else {
            return Err(MbError::Consistency("polynomial with no coefficients".into()));
        };
        let dev = (lead.to_f64() - 1.0).abs();
        if !(dev < MONIC_TOL) {
            return Err(MbError::Consistency(format!(
                "leading coefficient {} is not 1 within {MONIC_TOL:e}",
                lead.to_f64()
            )));
        }
        *lead = Dd::ONE;
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(MbError::Consistency(format!("coefficient {i} is not finite")));
        }
        Ok(MonicPoly { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Dd] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Horner evaluation in double-double.
    pub fn eval_dd(&self, x: Dd) -> Dd {
        let mut acc = Dd::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_dd(Dd::from(x)).to_f64()
    }

    /// `r(x²)`, or `x r(x²)` when `odd`.
    pub fn substitute_square(&self, odd: bool) -> MonicPoly {
        let shift = usize::from(odd);
        let mut c = vec![Dd::ZERO; 2 * self.degree() + 1 + shift];
        for (i, &v) in self.coeffs.iter().enumerate() {
            c[2 * i + shift] = v;
        }
        MonicPoly { coeffs: c }
    }

    /// Largest coefficientwise relative difference to `reference` (absolute where the
    /// reference coefficient is zero); infinite when degrees differ.
    pub fn max_rel_diff(&self, reference: &MonicPoly) -> f64 {
        if self.degree() != reference.degree() {
            return f64::INFINITY;
        }
        self.coeffs
            .iter()
            .zip(&reference.coeffs)
            .map(|(&a, &b)| {
                let d = (a - b).abs().to_f64();
                let m = b.abs().to_f64();
                if m == 0.0 {
                    d
                } else {
                    d / m
                }
            })
            .fold(0.0, f64::max)
    }

    /// Machine-readable record; coefficients are decimal strings, constant first.
    pub fn to_json(&self, weight: &WeightSpec, theta: f64, k: usize, side: Side) -> serde_json::Value {
        json!({
            "weight": weight.to_json(),
            "theta": theta.to_decimal(),
            "k": k,
            "side": side.as_str(),
            "coeffs": self.coeffs.iter().map(|c| c.to_decimal()).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monic_check() {
        assert!(MonicPoly::from_coeffs(vec![Dd::ONE, Dd::from(1.0 + 1e-12)]).is_ok());
        assert!(MonicPoly::from_coeffs(vec![Dd::ONE, Dd::from(1.1)]).is_err());
        let p = MonicPoly::from_coeffs(vec![Dd::from(2.0), Dd::from(-3.0), Dd::ONE]).unwrap();
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.substitute_square(true).coeffs_f64(), vec![0.0, 2.0, 0.0, -3.0, 0.0, 1.0]);
    }
}
