mod common;

use common::{random_full_line, random_half_line, rel, rng};
use mb_core::biortho::*;
use mb_core::norms::{z_any, ExponentVector};
use mb_core::weights::{EnsembleSpec, WeightSpec};
use mb_core::{MonicPoly, Side};
use rand::Rng;

fn coeffs(p: &MonicPoly) -> Vec<f64> {
    p.coeffs_f64()
}

#[test]
fn q_examples() {
    assert_eq!(coeffs(&q_poly(&WeightSpec::Laguerre { a: 0.3 }, 0, 1.7).unwrap()), vec![1.0]);
    let q = q_poly(&WeightSpec::Laguerre { a: 0.3 }, 1, 1.7).unwrap();
    let g = mb_core::specfun::gamma_ratio(&[0.3 + 1.7 + 1.0], &[1.3]).unwrap().to_real();
    assert!(rel(q.coeffs_f64()[0], -g) < 1e-14);
    assert_eq!(coeffs(&q_poly(&WeightSpec::Laguerre { a: 0.0 }, 2, 1.0).unwrap()), vec![2.0, -4.0, 1.0]);
}

#[test]
fn p_examples() {
    for &th in &[0.5, 1.0, 2.7] {
        let p = p_poly(&WeightSpec::Laguerre { a: 0.4 }, 1, th).unwrap();
        assert!(rel(p.coeffs_f64()[0], -1.4) < 1e-15);
    }
    let p = p_poly(&WeightSpec::Jacobi { a: 0.0, b: 0.0 }, 2, 1.0).unwrap();
    let r = reference_classical(&WeightSpec::Jacobi { a: 0.0, b: 0.0 }, 2).unwrap();
    assert!(p.max_rel_diff(&r) < 1e-15);
    assert!(rel(p.coeffs_f64()[0], 1.0 / 6.0) < 1e-15);
    let p = p_poly(&WeightSpec::JacobiPrime { alpha: 0.0, beta: 20.0 }, 1, 1.3).unwrap();
    assert!(rel(p.coeffs_f64()[0], -1.0 / 18.0) < 1e-15);
}

#[test]
fn p_gamma_examples() {
    let g = ExponentVector::new(vec![0.7]).unwrap();
    let p = p_poly_gamma(&GammaFamily::Laguerre, &g, 1).unwrap();
    assert!(rel(p.coeffs_f64()[0], -1.7) < 1e-15);
    let e = ExponentVector::new(vec![]).unwrap();
    assert_eq!(coeffs(&p_poly_gamma(&GammaFamily::Jacobi { alpha2: 2.0 }, &e, 0).unwrap()), vec![1.0]);
    let (a, th) = (0.3, 1.6);
    let g = ExponentVector::new(vec![a, th + a]).unwrap();
    let p = p_poly_gamma(&GammaFamily::Laguerre, &g, 2).unwrap();
    let o = oracle_char_poly(Side::P, &WeightSpec::Laguerre { a }, 2, th).unwrap();
    assert!(p.max_rel_diff(&o) < 1e-12);
}

#[test]
fn p_displayed_matches_gamma_specialisation() {
    let mut r = rng(21);
    for fam in 0..3 {
        for k in 0..=8 {
            for &th in &[0.5, 1.0, 1.5, 2.0, 3.0] {
                let w = random_half_line(&mut r, fam, k + 1, th);
                let p = p_poly(&w, k, th).unwrap();
                let (family, a) = match w {
                    WeightSpec::Laguerre { a } => (GammaFamily::Laguerre, a),
                    WeightSpec::Jacobi { a, b } => (GammaFamily::Jacobi { alpha2: b + 1.0 }, a),
                    WeightSpec::JacobiPrime { alpha, beta } => (GammaFamily::JacobiPrime { beta }, alpha),
                    _ => unreachable!(),
                };
                let g = p_poly_gamma(&family, &ExponentVector::mb_grid(k, th, a), k).unwrap();
                assert!(p.max_rel_diff(&g) < 1e-12, "{w} k={k} θ={th}: {}", p.max_rel_diff(&g));
            }
        }
    }
}

#[test]
fn heine_equivalence() {
    let mut r = rng(22);
    for fam in 0..3 {
        for k in 0..=5 {
            for &th in &[0.5, 1.0, 2.0] {
                let w = random_half_line(&mut r, fam, k + 1, th);
                for side in [Side::P, Side::Q] {
                    let c = match side {
                        Side::P => p_poly(&w, k, th).unwrap(),
                        Side::Q => q_poly(&w, k, th).unwrap(),
                    };
                    let o = oracle_char_poly(side, &w, k, th).unwrap();
                    assert!(c.max_rel_diff(&o) < 1e-9, "{side:?} {w} k={k} θ={th}: {}", c.max_rel_diff(&o));
                }
            }
        }
    }
}

#[test]
fn oracle_spec_examples() {
    let q = oracle_char_poly(Side::Q, &WeightSpec::Laguerre { a: 0.0 }, 2, 1.0).unwrap();
    assert!(q.max_rel_diff(&q_poly(&WeightSpec::Laguerre { a: 0.0 }, 2, 1.0).unwrap()) < 1e-25);
    let w = WeightSpec::Jacobi { a: 1.0, b: 1.0 };
    let o = oracle_char_poly(Side::P, &w, 3, 2.0).unwrap();
    assert!(o.max_rel_diff(&p_poly(&w, 3, 2.0).unwrap()) < 1e-9);
    assert!(oracle_char_poly(Side::P, &w, 7, 2.0).is_err());
}

#[test]
fn theta_one_collapse() {
    for w in [WeightSpec::Laguerre { a: 0.0 }, WeightSpec::Laguerre { a: 1.7 }, WeightSpec::Jacobi { a: -0.4, b: 2.2 }]
    {
        for k in 0..=10 {
            let r = reference_classical(&w, k).unwrap();
            let p = p_poly(&w, k, 1.0).unwrap();
            let q = q_poly(&w, k, 1.0).unwrap();
            assert!(p.max_rel_diff(&r) < 1e-10, "p {w} k={k}: {}", p.max_rel_diff(&r));
            assert!(q.max_rel_diff(&r) < 1e-10, "q {w} k={k}: {}", q.max_rel_diff(&r));
        }
    }
}

#[test]
fn theta_inversion_well_defined() {
    for &th in &[1.0 / 3.0, 3.0] {
        for k in 0..=8 {
            let p = p_poly(&WeightSpec::Laguerre { a: 0.6 }, k, th).unwrap();
            assert!(p.coeffs_f64().iter().all(|c| c.is_finite()));
            assert_eq!(*p.coeffs_f64().last().unwrap(), 1.0);
        }
    }
}

#[test]
fn z_product_identity() {
    let mut r = rng(23);
    for fam in 0..3 {
        for n in 1..=8 {
            for &th in &[0.5, 1.0, 2.0] {
                let hw = random_half_line(&mut r, fam, n, th);
                let fw = random_full_line(&mut r, fam, n, th);
                for w in [hw, fw] {
                    let s = EnsembleSpec::new(w, n, th).unwrap();
                    let prod = NormSequence::new(&w, th, n).unwrap().z_product();
                    let d = prod.rel_diff(z_any(&s).unwrap());
                    assert!(d < 1e-11, "{w} N={n} θ={th}: {d:e}");
                }
            }
        }
    }
}

#[test]
fn h_examples() {
    let w = WeightSpec::Laguerre { a: 0.9 };
    for k in 0..6 {
        let h = h_k(&w, 1.4, k).unwrap();
        assert!(h.rel_diff(hk_printed(&w, 1.4, k).unwrap()) < 1e-13);
    }
    let (a, b) = (0.3, 1.2);
    let h = h_k(&WeightSpec::Jacobi { a, b }, 2.0, 1).unwrap().to_real();
    let g = mb_core::specfun::gamma_ratio(&[a + 3.0, b + 2.0], &[a + b + 5.0]).unwrap().to_real();
    assert!(rel(h, 2.0 * g / (a + b + 2.0)) < 1e-14);
}

#[test]
fn erratum_factor() {
    let mut r = rng(24);
    for k in 0..=10 {
        for &th in &[0.5, 1.0, 2.0] {
            let j = random_half_line(&mut r, 1, k + 1, th);
            let c = erratum_check(&j, th, k).unwrap();
            assert!(c.reproduces_expected && !c.printed_agrees, "{c:?}");
            for fam in [0, 2] {
                let w = random_half_line(&mut r, fam, k + 1, th);
                let c = erratum_check(&w, th, k).unwrap();
                assert!(c.printed_agrees && c.reproduces_expected, "{c:?}");
            }
        }
    }
}

#[test]
fn parity_lift_examples() {
    let g = WeightSpec::GenGaussian { c: 0.0 };
    assert_eq!(coeffs(&parity_lift(Side::Q, &g, 0, 1.0).unwrap()), vec![1.0]);
    assert_eq!(coeffs(&parity_lift(Side::Q, &WeightSpec::GenGaussian { c: 0.7 }, 1, 1.3).unwrap()), vec![0.0, 1.0]);
    let q = parity_lift(Side::Q, &g, 2, 1.0).unwrap();
    assert_eq!(coeffs(&q), vec![-0.5, 0.0, 1.0]);
}

#[test]
fn f_nu_examples_and_identities() {
    let g = ExponentVector::new(vec![2.5, 0.5, -0.3]).unwrap();
    assert!(rel(f_nu_laguerre(0, &g).unwrap(), 3.5 * 1.5 * 0.7) < 1e-15);
    let one = ExponentVector::new(vec![4.2]).unwrap();
    assert!(rel(f_nu_laguerre(1, &one).unwrap(), 1.0) < 1e-15);
    assert!(rel(f_nu_laguerre_brute(1, &one).unwrap(), 1.0) < 1e-15);
    assert!(f_nu_laguerre(4, &g).is_err());
    let mut r = rng(25);
    for n in 1..=7 {
        for _ in 0..5 {
            let gs: Vec<f64> = (0..n).map(|_| r.random_range(-0.9..6.0)).collect();
            let gv = ExponentVector::new(gs.clone()).unwrap();
            for nu in 0..=n {
                let a = f_nu_laguerre(nu, &gv).unwrap();
                let b = f_nu_laguerre_brute(nu, &gv).unwrap();
                assert!(rel(a, b) < 1e-11, "N={n} ν={nu}: {a} {b}");
            }
            if (2..=6).contains(&n) {
                let mut g1 = gs.clone();
                g1[0] = -1.0;
                let lhs = ExponentVector::new(g1).unwrap();
                let rhs = ExponentVector::new(gs[1..].iter().map(|g| g + 1.0).collect()).unwrap();
                // F counts (N-ν)-subsets, so dropping γ_1 = -1 lowers ν by one.
                assert_eq!(f_nu_laguerre(0, &lhs).unwrap(), 0.0);
                for nu in 1..=n {
                    let a = f_nu_laguerre(nu, &lhs).unwrap();
                    let b = f_nu_laguerre(nu - 1, &rhs).unwrap();
                    let c = f_nu_laguerre_brute(nu, &lhs).unwrap();
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "N={n} ν={nu}: {a} {b}");
                    assert!((c - b).abs() <= 1e-12 * b.abs().max(1.0), "N={n} ν={nu}: {c} {b}");
                }
            }
        }
    }
}

#[test]
fn json_record() {
    let w = WeightSpec::Laguerre { a: 0.0 };
    let q = q_poly(&w, 2, 1.0).unwrap();
    let j = q.to_json(&w, 1.0, 2, Side::Q);
    assert_eq!(j["side"], "q");
    assert_eq!(j["coeffs"].as_array().unwrap().len(), 3);
    let c0: f64 = j["coeffs"][0].as_str().unwrap().parse().unwrap();
    assert_eq!(c0, 2.0);
}
