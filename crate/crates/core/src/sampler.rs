//! Single-site Metropolis sampler of the unnormalised joint density, used as a
//! statistical oracle for kernel predictions.
//!
//! Proposals are Gaussian in a coordinate that maps the support onto the real
//! line (`ln x`, `logit x`, `atanh x` or the identity); the Jacobian enters the
//! acceptance ratio, so the chain targets the density in `x`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{MbError, Result};
use crate::weights::{log_weight, EnsembleSpec, Support};

/// Fraction of steps spent in burn-in when none is given.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.2;

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 16;

/// Sweeps between step-size adjustments during burn-in.
const TUNE_WINDOW: usize = 50;

const TARGET_LOW: f64 = 0.3;
const TARGET_HIGH: f64 = 0.5;

/// `sgn(x)|x|^θ` on the full line, `x^θ` otherwise.
fn theta_map(x: f64, theta: f64, full_line: bool) -> f64 {
    if full_line {
        x.signum() * x.abs().powf(theta)
    } else {
        x.powf(theta)
    }
}

/// Logarithm of the unnormalised joint density; `-∞` for coincident points or
/// points outside the open support.
pub fn log_target(spec: &EnsembleSpec, positions: &[f64]) -> f64 {
    let w = &spec.weight;
    let full = w.is_full_line();
    let sup = w.support();
    let mut s = 0.0;
    for &x in positions {
        if !sup.contains(x) {
            return f64::NEG_INFINITY;
        }
        s += log_weight(w, x);
    }
    let t: Vec<f64> = positions.iter().map(|&x| theta_map(x, spec.theta, full)).collect();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            s += (positions[j] - positions[i]).abs().ln() + (t[j] - t[i]).abs().ln();
        }
    }
    if s.is_nan() {
        f64::NEG_INFINITY
    } else {
        s
    }
}

/// Terms of the log density that involve site `i` placed at `x`.
fn site_log_density(spec: &EnsembleSpec, pos: &[f64], i: usize, x: f64) -> f64 {
    let w = &spec.weight;
    if !w.support().contains(x) {
        return f64::NEG_INFINITY;
    }
    let full = w.is_full_line();
    let tx = theta_map(x, spec.theta, full);
    let mut s = log_weight(w, x);
    for (j, &y) in pos.iter().enumerate() {
        if j != i {
            s += (x - y).abs().ln() + (tx - theta_map(y, spec.theta, full)).abs().ln();
        }
    }
    if s.is_nan() {
        f64::NEG_INFINITY
    } else {
        s
    }
}

/// Unconstrained coordinate `z(x)`.
fn to_free(sup: Support, x: f64) -> f64 {
    match sup {
        Support::HalfLine => x.ln(),
        Support::UnitInterval => (x / (1.0 - x)).ln(),
        Support::SymmetricUnit => x.atanh(),
        Support::RealLine => x,
    }
}

fn from_free(sup: Support, z: f64) -> f64 {
    match sup {
        Support::HalfLine => z.exp(),
        Support::UnitInterval => 1.0 / (1.0 + (-z).exp()),
        Support::SymmetricUnit => z.tanh(),
        Support::RealLine => z,
    }
}

/// `ln |dx/dz|`.
fn log_jacobian(sup: Support, x: f64) -> f64 {
    match sup {
        Support::HalfLine => x.ln(),
        Support::UnitInterval => x.ln() + (1.0 - x).ln(),
        Support::SymmetricUnit => (1.0 - x * x).ln(),
        Support::RealLine => 0.0,
    }
}

fn initial_positions(spec: &EnsembleSpec) -> Vec<f64> {
    let n = spec.n;
    (0..n)
        .map(|i| {
            let u = (i as f64 + 1.0) / (n as f64 + 1.0);
            match spec.weight.support() {
                Support::HalfLine => 2.0 * u * n as f64,
                Support::UnitInterval => u,
                // Shifted off the origin, where the weight may vanish.
                Support::SymmetricUnit => 2.0 * u - 1.0 + 0.25 / (n as f64 + 1.0),
                Support::RealLine => (2.0 * (2.0 * u - 1.0) + 0.25 / (n as f64 + 1.0)) * (n as f64).sqrt(),
            }
        })
        .collect()
}

/// Mutable state of one chain.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub positions: Vec<f64>,
    pub log_density: f64,
    pub step_scale: f64,
    rng: ChaCha8Rng,
}

impl ChainState {
    pub fn new(spec: &EnsembleSpec, seed: u64) -> Result<ChainState> {
        spec.validate()?;
        let positions = initial_positions(spec);
        let log_density = log_target(spec, &positions);
        Ok(ChainState { positions, log_density, step_scale: 0.5, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    /// One sweep of single-site updates; returns the number accepted.
    pub fn sweep(&mut self, spec: &EnsembleSpec) -> usize {
        let sup = spec.weight.support();
        let mut accepted = 0;
        for i in 0..self.positions.len() {
            let x = self.positions[i];
            let xi: f64 = self.rng.sample(StandardNormal);
            let y = from_free(sup, to_free(sup, x) + self.step_scale * xi);
            let u: f64 = self.rng.random();
            let new = site_log_density(spec, &self.positions, i, y);
            if !new.is_finite() || y == x {
                continue;
            }
            let old = site_log_density(spec, &self.positions, i, x);
            let log_ratio = new - old + log_jacobian(sup, y) - log_jacobian(sup, x);
            if u.ln() < log_ratio {
                self.positions[i] = y;
                self.log_density += new - old;
                accepted += 1;
            }
        }
        accepted
    }

    /// Recomputes the log density from scratch.
    pub fn recompute(&mut self, spec: &EnsembleSpec) -> f64 {
        self.log_density = log_target(spec, &self.positions);
        self.log_density
    }
}

/// Post-burn-in samples of one chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainResult {
    pub spec: EnsembleSpec,
    pub seed: u64,
    pub burn_in: usize,
    /// One configuration per sweep after burn-in.
    pub samples: Vec<Vec<f64>>,
    /// Fraction of accepted single-site moves after burn-in.
    pub acceptance_rate: f64,
    pub step_scale: f64,
}

/// Runs `steps` sweeps (each a single-site update of every coordinate). The
/// first `burn_in` sweeps (default 20%) tune the step size toward acceptance
/// 0.3 to 0.5 and are discarded.
pub fn run_chain(spec: &EnsembleSpec, steps: usize, seed: u64, burn_in: Option<usize>) -> Result<ChainResult> {
    if steps == 0 {
        return Err(MbError::domain("run_chain needs steps >= 1"));
    }
    let burn = burn_in.unwrap_or((steps as f64 * DEFAULT_BURN_IN_FRACTION) as usize);
    if burn >= steps {
        return Err(MbError::Domain(format!("burn-in {burn} leaves no samples out of {steps} steps")));
    }
    let mut st = ChainState::new(spec, seed)?;
    if !st.log_density.is_finite() {
        return Err(MbError::Consistency("initial configuration has zero density".into()));
    }
    let n = spec.n;
    let (mut win_acc, mut win_sweeps) = (0usize, 0usize);
    for _ in 0..burn {
        win_acc += st.sweep(spec);
        win_sweeps += 1;
        if win_sweeps == TUNE_WINDOW {
            let rate = win_acc as f64 / (TUNE_WINDOW * n) as f64;
            if rate < TARGET_LOW {
                st.step_scale *= if rate == 0.0 { 0.3 } else { 0.8 };
            } else if rate > TARGET_HIGH {
                st.step_scale *= 1.25;
            }
            win_acc = 0;
            win_sweeps = 0;
        }
    }
    let mut samples = Vec::with_capacity(steps - burn);
    let mut acc = 0usize;
    for _ in burn..steps {
        acc += st.sweep(spec);
        samples.push(st.positions.clone());
    }
    let acceptance_rate = acc as f64 / ((steps - burn) * n) as f64;
    if acc == 0 {
        return Err(MbError::Tuning(format!("no proposal accepted after burn-in (step scale {:.3e})", st.step_scale)));
    }
    log::debug!("chain {seed}: acceptance {acceptance_rate:.3}, step scale {:.3e}", st.step_scale);
    Ok(ChainResult { spec: *spec, seed, burn_in: burn, samples, acceptance_rate, step_scale: st.step_scale })
}

/// Per-configuration statistic whose mean is estimated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Statistic {
    SumX,
    SumX2,
    CountBelow(f64),
    /// `Σ sgn x_i`, whose mean vanishes for even full-line weights.
    SumSign,
}

impl Statistic {
    pub fn eval(self, xs: &[f64]) -> f64 {
        match self {
            Statistic::SumX => xs.iter().sum(),
            Statistic::SumX2 => xs.iter().map(|x| x * x).sum(),
            Statistic::CountBelow(t) => xs.iter().filter(|&&x| x < t).count() as f64,
            Statistic::SumSign => xs.iter().map(|x| x.signum()).sum(),
        }
    }
}

/// Sample mean and batch-means standard error over [`BATCHES`] batches.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Mean of `stat` over the samples with a batch-means standard error. A
/// remainder that does not fill the last batch is dropped from the front.
pub fn linear_statistic(samples: &[Vec<f64>], stat: Statistic) -> Result<Estimate> {
    if samples.len() < BATCHES {
        return Err(MbError::Domain(format!("need at least {BATCHES} samples, got {}", samples.len())));
    }
    let size = samples.len() / BATCHES;
    let skip = samples.len() - size * BATCHES;
    let means: Vec<f64> =
        samples[skip..].chunks(size).map(|c| c.iter().map(|s| stat.eval(s)).sum::<f64>() / size as f64).collect();
    let mean = means.iter().sum::<f64>() / BATCHES as f64;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (BATCHES - 1) as f64;
    Ok(Estimate { mean, stderr: (var / BATCHES as f64).sqrt() })
}

/// CSV dump `step,x_1..x_N` with the ensemble and seed as comment header; steps
/// count from the end of burn-in.
pub fn samples_csv(result: &ChainResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# spec: {}", result.spec.to_json());
    let _ = writeln!(s, "# seed: {}", result.seed);
    let _ = writeln!(s, "# burn_in: {}", result.burn_in);
    s.push_str("step");
    for i in 1..=result.spec.n {
        let _ = write!(s, ",x_{i}");
    }
    s.push('\n');
    for (k, row) in result.samples.iter().enumerate() {
        let _ = write!(s, "{}", result.burn_in + k);
        for x in row {
            let _ = write!(s, ",{x:e}");
        }
        s.push('\n');
    }
    s
}
