mod common;

use mb_core::kernel::{build_kernel, kernel_diagonal_moment};
use mb_core::sampler::{linear_statistic, log_target, run_chain, samples_csv, Statistic};
use mb_core::weights::{log_weight, EnsembleSpec, WeightSpec};
use mb_core::MbError;

fn spec(w: WeightSpec, n: usize, theta: f64) -> EnsembleSpec {
    EnsembleSpec::new(w, n, theta).unwrap()
}

#[test]
fn log_target_examples() {
    let w = WeightSpec::Laguerre { a: 0.5 };
    let s1 = spec(w, 1, 2.0);
    assert_eq!(log_target(&s1, &[1.3]), log_weight(&w, 1.3));
    let s3 = spec(w, 3, 1.7);
    assert_eq!(log_target(&s3, &[0.4, 1.1, 0.4]), f64::NEG_INFINITY);
    let s2 = spec(w, 2, 1.0);
    let (x, y) = (0.3_f64, 2.1_f64);
    let expect = 2.0 * (y - x).ln() + log_weight(&w, x) + log_weight(&w, y);
    assert!((log_target(&s2, &[x, y]) - expect).abs() < 1e-14);
    assert_eq!(log_target(&s2, &[-0.1, 1.0]), f64::NEG_INFINITY);
}

#[test]
fn same_seed_same_stream() {
    let s = spec(WeightSpec::Jacobi { a: 0.5, b: 1.0 }, 3, 1.5);
    let a = run_chain(&s, 2000, 42, None).unwrap();
    let b = run_chain(&s, 2000, 42, None).unwrap();
    assert_eq!(a.samples, b.samples);
    let c = run_chain(&s, 2000, 43, None).unwrap();
    assert_ne!(a.samples, c.samples);
    assert_eq!(a.samples.len(), 1600);
}

#[test]
fn tuned_acceptance_is_moderate() {
    for w in [
        WeightSpec::Laguerre { a: 1.0 },
        WeightSpec::Jacobi { a: 0.5, b: 1.5 },
        WeightSpec::GenGaussian { c: 0.3 },
        WeightSpec::GenSymJacobi { c: 0.2, alpha: 0.8 },
    ] {
        let r = run_chain(&spec(w, 4, 2.0), 20_000, 7, None).unwrap();
        assert!((0.2..0.6).contains(&r.acceptance_rate), "{w}: {}", r.acceptance_rate);
    }
}

#[test]
fn exponential_mean_for_one_particle() {
    for &th in &[0.5, 2.0] {
        let r = run_chain(&spec(WeightSpec::Laguerre { a: 0.0 }, 1, th), 100_000, 9, None).unwrap();
        let e = linear_statistic(&r.samples, Statistic::SumX).unwrap();
        assert!((e.mean - 1.0).abs() < 3.0 * e.stderr, "{} ± {}", e.mean, e.stderr);
    }
}

#[test]
fn two_particle_first_moment_matches_kernel() {
    let s = spec(WeightSpec::Laguerre { a: 1.0 }, 2, 2.0);
    let predicted = kernel_diagonal_moment(&build_kernel(&s).unwrap(), 1).unwrap();
    let r = run_chain(&s, 200_000, 2024, None).unwrap();
    let e = linear_statistic(&r.samples, Statistic::SumX).unwrap();
    assert!((e.mean - predicted).abs() < 3.0 * e.stderr, "{} ± {} vs {predicted}", e.mean, e.stderr);
}

#[test]
fn histogram_matches_weight() {
    // N = 1, Laguerre(0): 64 equal-probability bins; thinning by 20 leaves
    // nearly independent draws.
    let r = run_chain(&spec(WeightSpec::Laguerre { a: 0.0 }, 1, 1.0), 100_000, 77, None).unwrap();
    let draws: Vec<f64> = r.samples.iter().step_by(20).map(|s| s[0]).collect();
    let bins = 64usize;
    let mut counts = vec![0usize; bins];
    for &x in &draws {
        let u = 1.0 - (-x).exp();
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = draws.len() as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99% quantile of chi-square with 63 degrees of freedom.
    assert!(chi2 < 92.01, "chi2 = {chi2}");
}

#[test]
fn full_line_sign_symmetry() {
    for w in [WeightSpec::GenGaussian { c: 0.5 }, WeightSpec::GenCauchy { c: 0.2, alpha: 12.0 }] {
        let r = run_chain(&spec(w, 3, 1.5), 60_000, 5, None).unwrap();
        let e = linear_statistic(&r.samples, Statistic::SumSign).unwrap();
        assert!(e.mean.abs() < 3.0 * e.stderr, "{w}: {} ± {}", e.mean, e.stderr);
        let below = linear_statistic(&r.samples, Statistic::CountBelow(0.0)).unwrap();
        assert!((below.mean - 1.5).abs() < 3.0 * below.stderr, "{w}: {} ± {}", below.mean, below.stderr);
    }
}

#[test]
fn batch_means_edge_cases() {
    let constant = vec![vec![0.5, 1.5]; 64];
    let e = linear_statistic(&constant, Statistic::SumX).unwrap();
    assert_eq!(e.mean, 2.0);
    assert_eq!(e.stderr, 0.0);
    assert_eq!(linear_statistic(&constant, Statistic::SumX2).unwrap().mean, 2.5);
    assert_eq!(linear_statistic(&constant, Statistic::CountBelow(1.0)).unwrap().mean, 1.0);
    assert!(matches!(linear_statistic(&constant[..15], Statistic::SumX), Err(MbError::Domain(_))));
}

#[test]
fn rejects_empty_runs() {
    let s = spec(WeightSpec::Laguerre { a: 0.0 }, 2, 1.0);
    assert!(run_chain(&s, 0, 1, None).is_err());
    assert!(run_chain(&s, 10, 1, Some(10)).is_err());
}

#[test]
fn csv_dump_layout() {
    let s = spec(WeightSpec::Laguerre { a: 0.0 }, 2, 1.0);
    let r = run_chain(&s, 100, 3, None).unwrap();
    let csv = samples_csv(&r);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# spec: {"));
    assert_eq!(lines[1], "# seed: 3");
    assert_eq!(lines[3], "step,x_1,x_2");
    assert_eq!(lines.len(), 4 + 80);
    assert!(lines[4].starts_with("20,"));
}
