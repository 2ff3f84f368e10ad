//! Fixed parameter sets shared by the benchmarks in `benches/`.

use mb_core::{EnsembleSpec, WeightSpec};

/// One representative weight per family, valid for ensembles up to size `n` at coupling `theta`.
pub fn weights(n: usize, theta: f64) -> [WeightSpec; 6] {
    let nf = n as f64;
    [
        WeightSpec::Laguerre { a: 0.7 },
        WeightSpec::Jacobi { a: 0.5, b: 1.5 },
        WeightSpec::JacobiPrime { alpha: 0.3, beta: 0.3 + nf + theta * (nf - 1.0) + 2.5 },
        WeightSpec::GenGaussian { c: 0.4 },
        WeightSpec::GenSymJacobi { c: 0.2, alpha: 0.8 },
        WeightSpec::GenCauchy { c: 0.3, alpha: 3.3 + nf * (1.0 + theta) },
    ]
}

/// Ensemble of size `n` for each entry of [`weights`].
pub fn ensembles(n: usize, theta: f64) -> Vec<EnsembleSpec> {
    weights(n, theta).into_iter().map(|w| EnsembleSpec::new(w, n, theta).expect("valid fixture")).collect()
}

/// Short label such as `jacobi_prime/N=6`.
pub fn label(spec: &EnsembleSpec) -> String {
    format!("{}/N={}", spec.weight.family_name(), spec.n)
}
