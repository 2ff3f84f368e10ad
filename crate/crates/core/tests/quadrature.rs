mod common;

use common::rel;
use mb_core::dd::Real;
use mb_core::quadrature::{gauss_jacobi, make_quadrature, PowerIntegrator, PowerTerm, MAX_NODES};
use mb_core::weights::{even_reduced, fullline_moment, moment, WeightSpec};
use mb_core::{Dd, MbError};

#[test]
fn gauss_legendre_two_points() {
    let g = gauss_jacobi(2, 0.0, 0.0).unwrap();
    let d = 1.0 / (2.0 * 3f64.sqrt());
    let mut x = g.nodes_f64();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((x[0] - (0.5 - d)).abs() < 1e-16 && (x[1] - (0.5 + d)).abs() < 1e-16);
    for w in g.weights_f64() {
        assert!((w - 0.5).abs() < 1e-16);
    }
}

#[test]
fn degree_exactness_half_line() {
    for n in [3usize, 8, 20] {
        let p = (2 * n - 1) as i32;
        for w in [
            WeightSpec::Laguerre { a: 0.3 },
            WeightSpec::Jacobi { a: -0.4, b: 1.7 },
            WeightSpec::JacobiPrime { alpha: 0.2, beta: 2.0 * n as f64 + 3.0 },
        ] {
            let rule = make_quadrature(&w, n, p as usize).unwrap();
            let q = rule.integrate(|x| x.powi(p)).to_f64();
            let m = moment(&w, p as f64).unwrap().to_real();
            assert!(rel(q, m) < 1e-13, "{w} n={n}: {q} vs {m}");
        }
    }
}

#[test]
fn degree_exactness_full_line() {
    for w in [
        WeightSpec::GenGaussian { c: 0.3 },
        WeightSpec::GenSymJacobi { c: 0.1, alpha: 0.5 },
        WeightSpec::GenCauchy { c: 0.2, alpha: 30.0 },
    ] {
        let n = 6;
        for p in [0usize, 3, 10] {
            let rule = make_quadrature(&w, n, 10).unwrap();
            let q = rule.integrate(|x| x.powi(p as i32)).to_f64();
            let m = fullline_moment(&w, p + 1, 1, 1.0).unwrap().to_real();
            assert!((q - m).abs() < 1e-13 * m.abs().max(1.0), "{w} p={p}: {q} vs {m}");
        }
    }
}

#[test]
fn jacobi_half_half_mass() {
    let w = WeightSpec::Jacobi { a: 0.5, b: 0.5 };
    let rule = make_quadrature(&w, 12, 0).unwrap();
    let q = rule.integrate(|_| Dd::ONE).to_f64();
    assert!(rel(q, moment(&w, 0.0).unwrap().to_real()) < 1e-13);
}

#[test]
fn nodes_inside_support_and_weights_positive() {
    for w in [
        WeightSpec::Laguerre { a: -0.7 },
        WeightSpec::Jacobi { a: 2.0, b: -0.9 },
        WeightSpec::JacobiPrime { alpha: 0.0, beta: 40.0 },
        WeightSpec::GenSymJacobi { c: 0.0, alpha: 0.0 },
    ] {
        // 100 nodes keep the smallest Laguerre weight inside the f64 range.
        let rule = make_quadrature(&w, 100, 4).unwrap();
        let sup = w.support();
        for (x, wt) in rule.nodes_f64().into_iter().zip(rule.weights_f64()) {
            assert!(sup.contains(x), "{w}: node {x}");
            assert!(wt > 0.0, "{w}: weight {wt}");
        }
    }
}

#[test]
fn rule_errors() {
    let w = WeightSpec::Laguerre { a: 0.0 };
    assert!(matches!(make_quadrature(&w, MAX_NODES + 1, 0), Err(MbError::Domain(_))));
    assert!(make_quadrature(&WeightSpec::Laguerre { a: -1.5 }, 4, 0).is_err());
    assert!(make_quadrature(&WeightSpec::JacobiPrime { alpha: 0.0, beta: 4.0 }, 4, 5).is_err());
}

#[test]
fn power_integrator_irrational_exponents() {
    let e = std::f64::consts::SQRT_2;
    for w in [
        WeightSpec::Laguerre { a: 0.4 },
        WeightSpec::Jacobi { a: 0.4, b: 1.1 },
        WeightSpec::JacobiPrime { alpha: 0.4, beta: 12.0 },
    ] {
        let mut pi = PowerIntegrator::new(&w, 32).unwrap();
        let terms = [
            PowerTerm { exponent: e, odd: false, coeff: Dd::from(2.0) },
            PowerTerm { exponent: 1.0 + 2.0 * e, odd: false, coeff: Dd::from(-0.5) },
            PowerTerm { exponent: 3.0, odd: false, coeff: Dd::ONE },
        ];
        let got = pi.integrate(&terms).unwrap().to_f64();
        let want = 2.0 * moment(&w, e).unwrap().to_real() - 0.5 * moment(&w, 1.0 + 2.0 * e).unwrap().to_real()
            + moment(&w, 3.0).unwrap().to_real();
        assert!(rel(got, want) < 1e-13, "{w}: {got} vs {want}");
    }
    // Full line: odd terms integrate to zero.
    let w = WeightSpec::GenGaussian { c: 0.25 };
    let mut pi = PowerIntegrator::new(&w, 32).unwrap();
    let odd = pi.integrate(&[PowerTerm { exponent: e, odd: true, coeff: Dd::ONE }]).unwrap();
    assert_eq!(odd.to_f64(), 0.0);
    let even = pi.integrate(&[PowerTerm { exponent: e, odd: false, coeff: Dd::ONE }]).unwrap().to_f64();
    let want = moment(&even_reduced(&w).unwrap(), e / 2.0).unwrap().to_real();
    assert!(rel(even, want) < 1e-13);
}
