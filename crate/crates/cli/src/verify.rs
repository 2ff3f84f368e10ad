//! `mb verify`: every closed form against its brute-force oracle on fixed
//! parameter sets, reported as a table of worst errors against tolerances.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::time::Instant;

use clap::{Args, ValueEnum};
use mb_core::biortho::{
    erratum_check, f_nu_laguerre, f_nu_laguerre_brute, h_k, oracle_char_poly, p_poly, q_poly, NormSequence,
    ORACLE_MAX_K,
};
use mb_core::classical::reference_classical;
use mb_core::kernel::{build_kernel, kernel_eval, kernel_projection, kernel_trace, verify_biortho, GRAM_MAX_K};
use mb_core::norms::{z_any, z_mb, z_mb_fullline, z_oracle_fullline, z_oracle_moments, ExponentVector};
use mb_core::weights::{EnsembleSpec, Support, WeightSpec};
use mb_core::{MbError, Side, SignedLogReal};
use serde_json::{json, Value};

use crate::output::{envelope, num, signed};
use crate::{usage, CliResult, EXIT_VERIFY};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Suite {
    All,
    /// Half-line normalisations against moment determinants.
    Z,
    /// Full-line normalisations against the full-line determinant.
    Parity,
    /// Norms against Z ratios and the printed closed forms.
    Hk,
    /// Biorthogonality by quadrature.
    Gram,
    /// Polynomials against the averaged characteristic polynomial.
    Heine,
    /// theta = 1 against the classical orthogonal polynomials.
    Collapse,
    /// F_nu closed form and recurrence.
    Fnu,
    /// Kernel trace and reproducing property.
    Kernel,
}

#[derive(Args, Debug)]
pub(crate) struct VerifyArgs {
    /// Suites to run (comma list).
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    suite: Vec<Suite>,
    /// Largest ensemble size (and polynomial degree) exercised, 1..=10.
    #[arg(long = "n-max", default_value_t = 5)]
    n_max: usize,
    /// Tolerance override NAME=VALUE for a named check (repeatable).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

/// Check names with their default tolerances.
const CHECKS: [(&str, f64); 14] = [
    ("z_oracle", 1e-10),
    ("parity", 1e-10),
    ("norm_product", 1e-11),
    ("hk_z_ratio", 1e-11),
    ("hk_printed", 1e-11),
    ("hk_erratum_factor", 1e-9),
    ("gram", 1e-8),
    ("heine_p", 1e-9),
    ("heine_q", 1e-9),
    ("theta1_collapse", 1e-10),
    ("f_nu_subsets", 1e-11),
    ("f_nu_recurrence", 1e-12),
    ("kernel_trace", 1e-8),
    ("kernel_projection", 1e-6),
];

const THETAS: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 2.5];

/// Worst error of one named check.
struct Check {
    name: &'static str,
    tolerance: f64,
    max_error: f64,
    worst_case: String,
    cases: usize,
    failures: usize,
    errors: Vec<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Check {
        Check { name, tolerance, max_error: 0.0, worst_case: String::new(), cases: 0, failures: 0, errors: Vec::new() }
    }

    fn record(&mut self, v: f64, at: impl FnOnce() -> String) {
        self.cases += 1;
        if !(v <= self.tolerance) {
            self.failures += 1;
        }
        if !self.max_error.is_nan() && !(v <= self.max_error) {
            self.max_error = v;
            self.worst_case = at();
        }
    }

    fn record_result(&mut self, r: Result<f64, MbError>, at: impl Fn() -> String) {
        match r {
            Ok(v) => self.record(v, at),
            Err(e) => {
                self.cases += 1;
                self.failures += 1;
                self.max_error = f64::NAN;
                self.worst_case = at();
                if self.errors.len() < 5 {
                    self.errors.push(format!("{}: {e}", at()));
                }
            }
        }
    }

    fn pass(&self) -> bool {
        self.failures == 0
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "max_error": num(self.max_error),
            "tolerance": num(self.tolerance),
            "cases": self.cases,
            "failures": self.failures,
            "worst_case": self.worst_case,
            "errors": self.errors,
            "pass": self.pass(),
        })
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Half-line weights valid for ensembles up to size `m` at coupling `th`.
fn half_line(m: usize, th: f64) -> [WeightSpec; 5] {
    let mf = m as f64;
    [
        WeightSpec::Laguerre { a: 0.7 },
        WeightSpec::Laguerre { a: -0.45 },
        WeightSpec::Jacobi { a: 0.5, b: 1.5 },
        WeightSpec::Jacobi { a: -0.3, b: 0.25 },
        WeightSpec::JacobiPrime { alpha: 0.3, beta: 0.3 + mf + th * (mf - 1.0) + 2.5 },
    ]
}

/// Full-line weights valid for ensembles up to size `m` at coupling `th`.
fn full_line(m: usize, th: f64) -> [WeightSpec; 5] {
    let c = 0.3;
    [
        WeightSpec::GenGaussian { c: 0.4 },
        WeightSpec::GenGaussian { c: -0.2 },
        WeightSpec::GenSymJacobi { c: 0.2, alpha: 0.8 },
        WeightSpec::GenSymJacobi { c: -0.3, alpha: 1.4 },
        WeightSpec::GenCauchy { c, alpha: c + 3.0 + m as f64 * (1.0 + th) },
    ]
}

fn spec(w: WeightSpec, n: usize, th: f64) -> Result<EnsembleSpec, MbError> {
    EnsembleSpec::new(w, n, th)
}

struct Runner {
    n_max: usize,
    tolerances: Vec<(&'static str, f64)>,
    checks: Vec<Check>,
    errata: Vec<Value>,
}

impl Runner {
    fn check(&self, name: &'static str) -> Check {
        let tol = self.tolerances.iter().find(|(n, _)| *n == name).map(|&(_, t)| t).expect("known check name");
        Check::new(name, tol)
    }

    fn z(&mut self) {
        let mut c = self.check("z_oracle");
        for &th in &THETAS {
            for w in half_line(self.n_max, th) {
                for n in 1..=self.n_max {
                    let r = spec(w, n, th).and_then(|s| Ok(z_mb(&s)?.rel_diff(z_oracle_moments(&s)?)));
                    c.record_result(r, || format!("{w} N={n} theta={th}"));
                }
            }
        }
        self.checks.push(c);
    }

    fn parity(&mut self) {
        let mut c = self.check("parity");
        for &th in &THETAS {
            for w in full_line(self.n_max, th) {
                for n in 1..=self.n_max {
                    let r = spec(w, n, th).and_then(|s| Ok(z_mb_fullline(&s)?.rel_diff(z_oracle_fullline(&s)?)));
                    c.record_result(r, || format!("{w} N={n} theta={th}"));
                }
            }
        }
        self.checks.push(c);
    }

    fn hk(&mut self) {
        let mut prod = self.check("norm_product");
        let mut ratio = self.check("hk_z_ratio");
        let mut printed = self.check("hk_printed");
        let mut factor = self.check("hk_erratum_factor");
        let m = self.n_max + 1;
        for &th in &[0.5, 1.0, 2.0] {
            let weights: Vec<WeightSpec> = half_line(m, th).into_iter().chain(full_line(m, th)).collect();
            for w in weights {
                let mut zs = Vec::new();
                for n in 1..=m {
                    let z = spec(w, n, th).and_then(|s| z_any(&s));
                    let r = z.clone().and_then(|z| Ok(NormSequence::new(&w, th, n)?.z_product().rel_diff(z)));
                    prod.record_result(r, || format!("{w} N={n} theta={th}"));
                    zs.push(z);
                }
                for k in 0..m {
                    let r = (|| {
                        let h = h_k(&w, th, k)?;
                        let prev = if k == 0 { SignedLogReal::ONE } else { zs[k - 1].clone()? };
                        let expect = zs[k].clone()? / prev / SignedLogReal::from_real((k + 1) as f64);
                        Ok(h.rel_diff(expect))
                    })();
                    ratio.record_result(r, || format!("{w} k={k} theta={th}"));
                }
                if w.is_full_line() {
                    continue;
                }
                for k in 0..m {
                    let at = || format!("{w} k={k} theta={th}");
                    let ec = match erratum_check(&w, th, k) {
                        Ok(ec) => ec,
                        Err(e) => {
                            let tgt = if matches!(w, WeightSpec::Jacobi { .. }) { &mut factor } else { &mut printed };
                            tgt.record_result(Err(e), at);
                            continue;
                        }
                    };
                    let jacobi = matches!(w, WeightSpec::Jacobi { .. });
                    let status = if jacobi {
                        // The discrepancy must persist: a printed value agreeing with the ratio is a failure too.
                        let err =
                            if ec.printed_agrees { f64::INFINITY } else { rel(ec.observed_factor, ec.expected_factor) };
                        factor.record(err, at);
                        if ec.reproduces_expected && !ec.printed_agrees {
                            "expected_discrepancy"
                        } else {
                            "unexpected"
                        }
                    } else {
                        printed.record(ec.printed.rel_diff(ec.z_ratio), at);
                        if ec.printed_agrees {
                            "agrees"
                        } else {
                            "unexpected"
                        }
                    };
                    if jacobi || status == "unexpected" {
                        self.errata.push(json!({
                            "family": ec.family,
                            "weight": crate::output::stringify(w.to_json()),
                            "theta": num(th),
                            "k": k,
                            "printed": signed(ec.printed),
                            "z_ratio": signed(ec.z_ratio),
                            "observed_factor": num(ec.observed_factor),
                            "expected_factor": num(ec.expected_factor),
                            "status": status,
                        }));
                    }
                }
            }
        }
        self.checks.extend([prod, ratio, printed, factor]);
    }

    fn gram(&mut self) {
        let mut c = self.check("gram");
        let kmax = self.n_max.min(GRAM_MAX_K);
        let tol = c.tolerance;
        let mut cases: Vec<(WeightSpec, f64)> = Vec::new();
        for &th in &[0.5, 1.0, 1.5, 2.0] {
            cases.extend(half_line(kmax, th).into_iter().map(|w| (w, th)));
        }
        for &th in &[1.0, 2.0] {
            cases.extend(full_line(kmax, th).into_iter().map(|w| (w, th)));
        }
        for (w, th) in cases {
            c.record_result(verify_biortho(&w, th, kmax, tol).map(|r| r.max_error), || format!("{w} theta={th}"));
        }
        self.checks.push(c);
    }

    fn heine(&mut self) {
        let mut cp = self.check("heine_p");
        let mut cq = self.check("heine_q");
        let kmax = self.n_max.min(ORACLE_MAX_K);
        for &th in &THETAS {
            for w in half_line(kmax + 1, th) {
                for k in 0..=kmax {
                    for side in [Side::P, Side::Q] {
                        let r = (|| {
                            let c = match side {
                                Side::P => p_poly(&w, k, th)?,
                                Side::Q => q_poly(&w, k, th)?,
                            };
                            Ok(c.max_rel_diff(&oracle_char_poly(side, &w, k, th)?))
                        })();
                        let tgt = if side == Side::P { &mut cp } else { &mut cq };
                        tgt.record_result(r, || format!("{w} k={k} theta={th}"));
                    }
                }
            }
        }
        self.checks.extend([cp, cq]);
    }

    fn collapse(&mut self) {
        let mut c = self.check("theta1_collapse");
        let weights = [
            WeightSpec::Laguerre { a: 0.0 },
            WeightSpec::Laguerre { a: 0.7 },
            WeightSpec::Laguerre { a: -0.45 },
            WeightSpec::Jacobi { a: 0.0, b: 0.0 },
            WeightSpec::Jacobi { a: 0.5, b: 1.5 },
            WeightSpec::Jacobi { a: -0.3, b: 0.25 },
        ];
        for w in weights {
            for k in 0..=2 * self.n_max {
                let r = (|| {
                    let rf = reference_classical(&w, k)?;
                    Ok(p_poly(&w, k, 1.0)?.max_rel_diff(&rf).max(q_poly(&w, k, 1.0)?.max_rel_diff(&rf)))
                })();
                c.record_result(r, || format!("{w} k={k}"));
            }
        }
        self.checks.push(c);
    }

    fn fnu(&mut self) {
        let mut brute = self.check("f_nu_subsets");
        let mut rec = self.check("f_nu_recurrence");
        for n in 1..=self.n_max {
            for shift in [0.0, 0.55, 2.3] {
                let gs: Vec<f64> =
                    (1..=n).map(|i| shift - 0.63 + 1.13 * i as f64 + 0.21 * (1.7 * i as f64).sin()).collect();
                let Ok(gv) = ExponentVector::new(gs.clone()) else { continue };
                for nu in 0..=n {
                    let r = (|| Ok(rel(f_nu_laguerre(nu, &gv)?, f_nu_laguerre_brute(nu, &gv)?)))();
                    brute.record_result(r, || format!("N={n} nu={nu} gamma={gs:?}"));
                }
                if n < 2 {
                    continue;
                }
                let mut g1 = gs.clone();
                g1[0] = -1.0;
                let (Ok(lhs), Ok(rhs)) =
                    (ExponentVector::new(g1), ExponentVector::new(gs[1..].iter().map(|g| g + 1.0).collect()))
                else {
                    continue;
                };
                rec.record_result(f_nu_laguerre(0, &lhs).map(f64::abs), || format!("N={n} nu=0"));
                for nu in 1..=n {
                    let r = (|| {
                        let a = f_nu_laguerre(nu, &lhs)?;
                        let b = f_nu_laguerre(nu - 1, &rhs)?;
                        Ok((a - b).abs() / b.abs().max(1.0))
                    })();
                    rec.record_result(r, || format!("N={n} nu={nu}"));
                }
            }
        }
        self.checks.extend([brute, rec]);
    }

    fn kernel(&mut self) {
        let mut trace = self.check("kernel_trace");
        let mut proj = self.check("kernel_projection");
        let ts = [0.13, 0.41, 0.77];
        for &th in &[0.5, 1.0, 2.0] {
            let weights: Vec<WeightSpec> =
                half_line(self.n_max, th).into_iter().chain(full_line(self.n_max, th)).collect();
            for w in weights {
                let map = |t: f64| match w.support() {
                    Support::UnitInterval => t,
                    Support::HalfLine => 4.0 * t,
                    Support::SymmetricUnit => 2.0 * t - 1.0,
                    Support::RealLine => 4.0 * t - 2.0,
                };
                for n in 1..=self.n_max {
                    let at = || format!("{w} N={n} theta={th}");
                    let k = match spec(w, n, th).and_then(|s| build_kernel(&s)) {
                        Ok(k) => k,
                        Err(e) => {
                            trace.record_result(Err(e), at);
                            continue;
                        }
                    };
                    trace.record_result(kernel_trace(&k).map(|t| rel(t, n as f64)), at);
                    for &tx in &ts {
                        for &tz in &ts {
                            let (x, z) = (map(tx), map(tz));
                            let rhs = kernel_eval(&k, x, z);
                            // Relative to the diagonal scale where K(x, z) itself is near zero.
                            let scale = rhs.abs().max(1e-3 * kernel_eval(&k, x, x).abs());
                            let r = kernel_projection(&k, x, z).map(|lhs| (lhs - rhs).abs() / scale);
                            proj.record_result(r, || format!("{w} N={n} theta={th} ({x}, {z})"));
                        }
                    }
                }
            }
        }
        self.checks.extend([trace, proj]);
    }
}

fn parse_tolerances(overrides: &[String]) -> CliResult<Vec<(&'static str, f64)>> {
    let mut tols: Vec<(&'static str, f64)> = CHECKS.to_vec();
    for o in overrides {
        let (name, value) = o.split_once('=').ok_or_else(|| usage(format!("--tol expects NAME=VALUE (got '{o}')")))?;
        let slot = tols.iter_mut().find(|(n, _)| *n == name.trim()).ok_or_else(|| {
            let names: Vec<&str> = CHECKS.iter().map(|(n, _)| *n).collect();
            usage(format!("--tol: unknown check '{name}' (known: {})", names.join(", ")))
        })?;
        let v: f64 = value.trim().parse().map_err(|_| usage(format!("--tol {name}: cannot parse '{value}'")))?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(usage(format!("--tol {name}: tolerance must be positive and finite")));
        }
        slot.1 = v;
    }
    Ok(tols)
}

pub(crate) fn run(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<Option<i32>> {
    if a.n_max == 0 || a.n_max > GRAM_MAX_K {
        return Err(usage(format!("--n-max must be in 1..={GRAM_MAX_K} (got {})", a.n_max)));
    }
    let tolerances = parse_tolerances(&a.tol)?;
    let all = a.suite.contains(&Suite::All);
    let wants = |s: Suite| all || a.suite.contains(&s);
    let mut r = Runner { n_max: a.n_max, tolerances, checks: Vec::new(), errata: Vec::new() };
    let start = Instant::now();
    type SuiteFn = fn(&mut Runner);
    let suites: [(Suite, SuiteFn); 8] = [
        (Suite::Z, Runner::z),
        (Suite::Parity, Runner::parity),
        (Suite::Hk, Runner::hk),
        (Suite::Gram, Runner::gram),
        (Suite::Heine, Runner::heine),
        (Suite::Collapse, Runner::collapse),
        (Suite::Fnu, Runner::fnu),
        (Suite::Kernel, Runner::kernel),
    ];
    for (s, f) in suites {
        if wants(s) {
            log::info!("running suite {s:?}");
            f(&mut r);
        }
    }
    let pass = r.checks.iter().all(Check::pass);

    writeln!(err, "{:<20} {:>10} {:>10} {:>6}  result", "check", "max_error", "tolerance", "cases")?;
    for c in &r.checks {
        let tag = if c.pass() { "PASS" } else { "FAIL" };
        writeln!(err, "{:<20} {:>10.2e} {:>10.0e} {:>6}  {tag}", c.name, c.max_error, c.tolerance, c.cases)?;
        if !c.pass() {
            writeln!(err, "    worst at {}", c.worst_case)?;
            for e in &c.errors {
                writeln!(err, "    {e}")?;
            }
        }
    }
    let unexpected = r.errata.iter().filter(|e| e["status"] != "expected_discrepancy").count();
    if !r.errata.is_empty() {
        writeln!(err, "erratum checks: {} recorded, {unexpected} unexpected", r.errata.len())?;
    }

    let mut m = envelope("verify", "extended");
    m.insert("n_max".into(), a.n_max.into());
    m.insert("pass".into(), pass.into());
    m.insert("elapsed_seconds".into(), num(start.elapsed().as_secs_f64()));
    m.insert("checks".into(), Value::Array(r.checks.iter().map(Check::to_json).collect()));
    m.insert("erratum_checks".into(), Value::Array(r.errata));
    crate::emit(out, m)?;
    Ok(if pass { None } else { Some(EXIT_VERIFY) })
}
