//! The `mb` command line: normalisations, norms, biorthogonal polynomials,
//! correlation kernels, Metropolis samples and verification suites.
//!
//! Data goes to stdout as JSON (schema `mb/1`) or CSV; diagnostics go to stderr.
//! Exit codes: 0 success, 1 numerical failure (no convergence, ill-conditioning,
//! failed tuning), 2 invalid parameters or usage, 3 failed verification.

mod output;
mod verify;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mb_core::biortho::{erratum_check, h_k_in, oracle_char_poly, p_poly_in, parity_lift, q_poly_in, ORACLE_MAX_K};
use mb_core::kernel::{
    build_kernel, correlation, correlation_bare, kernel_diagonal_moment, kernel_eval, kernel_eval_weighted,
    kernel_grid_csv,
};
use mb_core::norms::{
    laguerre_selberg_in, selberg_in, z_mb_fullline_in, z_mb_in, z_oracle_fullline_in, z_oracle_moments_in,
};
use mb_core::sampler::{linear_statistic, run_chain, samples_csv, Statistic};
use mb_core::{Dd, EnsembleSpec, MbError, MonicPoly, Side, SignedLogReal, WeightSpec};
use serde_json::{json, Map, Value};

pub use output::SCHEMA;
use output::{envelope, num, numify, nums, signed, stringify};

/// Exit code for invalid parameters and usage errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for numerical failures other than invalid input.
pub const EXIT_NUMERIC: i32 = 1;
/// Exit code for a verification suite with at least one failing check.
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Mb(#[from] MbError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "mb", version, about = "Muttalib-Borodin ensembles with classical weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Selberg integral S_N(a1, a2, tau); the Laguerre form when --a2 is omitted.
    Selberg(SelbergArgs),
    /// Normalisation Z_N of an ensemble.
    Norm(NormArgs),
    /// Norms h_k of the biorthogonal pairs, with checks of the printed closed forms.
    Hk(HkArgs),
    /// Coefficients of p_k or q_k, constant term first.
    Poly(PolyArgs),
    /// Correlation kernel on a grid, or an n-point correlation.
    Kernel(KernelArgs),
    /// Run verification suites against the brute-force oracles.
    Verify(verify::VerifyArgs),
    /// Metropolis samples of the joint density.
    Sample(SampleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Laguerre,
    Jacobi,
    #[value(alias = "jacobi_prime")]
    JacobiPrime,
    #[value(alias = "gen_gaussian")]
    GenGaussian,
    #[value(alias = "gen_sym_jacobi")]
    GenSymJacobi,
    #[value(alias = "gen_cauchy")]
    GenCauchy,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Laguerre => "laguerre",
            Family::Jacobi => "jacobi",
            Family::JacobiPrime => "jacobi-prime",
            Family::GenGaussian => "gen-gaussian",
            Family::GenSymJacobi => "gen-sym-jacobi",
            Family::GenCauchy => "gen-cauchy",
        }
    }

    /// Parameter flags of the family, in constructor order.
    fn params(self) -> &'static [&'static str] {
        match self {
            Family::Laguerre => &["a"],
            Family::Jacobi => &["a", "b"],
            Family::JacobiPrime => &["alpha", "beta"],
            Family::GenGaussian => &["c"],
            Family::GenSymJacobi | Family::GenCauchy => &["c", "alpha"],
        }
    }
}

#[derive(Args, Debug)]
struct WeightArgs {
    /// Weight family.
    #[arg(long, value_enum)]
    weight: Option<Family>,
    /// Exponent a (laguerre, jacobi).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Exponent b (jacobi).
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Exponent alpha (jacobi-prime, gen-sym-jacobi, gen-cauchy).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Exponent beta (jacobi-prime).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Exponent c of |x|^{2c} (full-line families).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Weight as JSON, e.g. '{"family":"laguerre","params":{"a":0.5}}'.
    #[arg(long = "weight-json", conflicts_with = "weight")]
    weight_json: Option<String>,
}

impl WeightArgs {
    fn given(&self) -> [(&'static str, Option<f64>); 5] {
        [("a", self.a), ("b", self.b), ("alpha", self.alpha), ("beta", self.beta), ("c", self.c)]
    }

    fn build(&self) -> CliResult<WeightSpec> {
        let w = if let Some(js) = &self.weight_json {
            if let Some((name, _)) = self.given().into_iter().find(|(_, v)| v.is_some()) {
                return Err(usage(format!("--{name} cannot be combined with --weight-json")));
            }
            serde_json::from_value::<WeightSpec>(numify(serde_json::from_str(js)?))?
        } else {
            let fam = self.weight.ok_or_else(|| usage("--weight (or --weight-json) is required"))?;
            let allowed = fam.params();
            for (name, v) in self.given() {
                if v.is_some() && !allowed.contains(&name) {
                    return Err(usage(format!("--{name} does not apply to the {} weight", fam.name())));
                }
            }
            let get = |name: &str| -> CliResult<f64> {
                let v = self.given().into_iter().find(|(n, _)| *n == name).and_then(|(_, v)| v);
                v.ok_or_else(|| usage(format!("--{name} is required for the {} weight", fam.name())))
            };
            match fam {
                Family::Laguerre => WeightSpec::Laguerre { a: get("a")? },
                Family::Jacobi => WeightSpec::Jacobi { a: get("a")?, b: get("b")? },
                Family::JacobiPrime => WeightSpec::JacobiPrime { alpha: get("alpha")?, beta: get("beta")? },
                Family::GenGaussian => WeightSpec::GenGaussian { c: get("c")? },
                Family::GenSymJacobi => WeightSpec::GenSymJacobi { c: get("c")?, alpha: get("alpha")? },
                Family::GenCauchy => WeightSpec::GenCauchy { c: get("c")?, alpha: get("alpha")? },
            }
        };
        w.validate()?;
        Ok(w)
    }
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    #[command(flatten)]
    weight: WeightArgs,
    /// Number of particles N.
    #[arg(long)]
    n: Option<usize>,
    /// Coupling exponent theta.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Whole ensemble as JSON, e.g. '{"weight":{...},"N":3,"theta":"2"}'.
    #[arg(long, conflicts_with_all = ["weight", "weight_json", "n", "theta"])]
    spec: Option<String>,
}

impl EnsembleArgs {
    fn build(&self) -> CliResult<EnsembleSpec> {
        if let Some(js) = &self.spec {
            if let Some((name, _)) = self.weight.given().into_iter().find(|(_, v)| v.is_some()) {
                return Err(usage(format!("--{name} cannot be combined with --spec")));
            }
            let s: EnsembleSpec = serde_json::from_value(numify(serde_json::from_str(js)?))?;
            s.validate()?;
            return Ok(s);
        }
        let w = self.weight.build()?;
        let n = self.n.ok_or_else(|| usage("--n is required"))?;
        let theta = self.theta.ok_or_else(|| usage("--theta is required"))?;
        Ok(EnsembleSpec::new(w, n, theta)?)
    }
}

#[derive(Args, Debug)]
struct SelbergArgs {
    /// Number of variables N.
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    a1: f64,
    /// Omit for the Laguerre-Selberg integral.
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: f64,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Also evaluate the moment-determinant oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct HkArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    /// A single index k.
    #[arg(long, conflicts_with = "k_max", required_unless_present = "k_max")]
    k: Option<usize>,
    /// All indices 0..=K.
    #[arg(long = "k-max")]
    k_max: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    P,
    Q,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::P => Side::P,
            SideArg::Q => Side::Q,
        }
    }
}

#[derive(Args, Debug)]
struct PolyArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, value_enum)]
    side: SideArg,
    #[arg(long, allow_hyphen_values = true)]
    theta: f64,
    /// Degree k.
    #[arg(long)]
    k: usize,
    /// Also evaluate the averaged characteristic polynomial oracle (half-line, k <= 6).
    #[arg(long)]
    oracle: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Grid of x values: comma list or lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Grid of y values (defaults to the x grid).
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Points of an n-point correlation (comma list), instead of a grid.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["x", "y"])]
    points: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    output: Format,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Total sweeps, burn-in included.
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Burn-in sweeps (default: a fifth of --steps).
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
    /// Also estimate E[#{x_i < T}].
    #[arg(long = "count-below", allow_hyphen_values = true)]
    count_below: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    output: Format,
}

/// Accumulation width of the closed forms, from `MB_PRECISION`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Precision {
    Double,
    Extended,
}

impl Precision {
    fn from_env() -> CliResult<Precision> {
        match std::env::var("MB_PRECISION") {
            Err(std::env::VarError::NotPresent) => Ok(Precision::Extended),
            Ok(v) => match v.trim().to_ascii_lowercase().as_str() {
                "double" => Ok(Precision::Double),
                "extended" | "" => Ok(Precision::Extended),
                _ => Err(usage(format!("MB_PRECISION must be 'double' or 'extended' (got '{v}')"))),
            },
            Err(_) => Err(usage("MB_PRECISION is not valid unicode")),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }
}

/// Calls a generic `fn::<T: Real>` at the selected width.
macro_rules! at {
    ($p:expr, $f:ident ( $($arg:expr),* $(,)? )) => {
        match $p {
            Precision::Double => $f::<f64>($($arg),*),
            Precision::Extended => $f::<Dd>($($arg),*),
        }
    };
}

/// Runs the command line `argv` (program name first) against the process streams.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line `argv`, writing data to `out` and diagnostics to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = Precision::from_env().and_then(|p| execute(cli.command, p, out, err));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                CliError::Usage(_) | CliError::Json(_) => EXIT_USAGE,
                CliError::Mb(MbError::Domain(_) | MbError::Pole(_)) => EXIT_USAGE,
                CliError::Mb(_) | CliError::Io(_) => EXIT_NUMERIC,
            }
        }
    }
}

fn emit(out: &mut dyn Write, v: Map<String, Value>) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, &Value::Object(v))?;
    writeln!(out)?;
    Ok(())
}

fn insert_signed(m: &mut Map<String, Value>, s: SignedLogReal) {
    if let Value::Object(o) = signed(s) {
        m.extend(o);
    }
}

fn execute(cmd: Command, p: Precision, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Selberg(a) => selberg_cmd(a, p, out),
        Command::Norm(a) => norm_cmd(a, p, out),
        Command::Hk(a) => hk_cmd(a, p, out, err),
        Command::Poly(a) => poly_cmd(a, p, out),
        Command::Kernel(a) => kernel_cmd(a, out),
        Command::Verify(a) => verify::run(a, out, err),
        Command::Sample(a) => sample_cmd(a, out, err),
    }
    .map(|c| c.unwrap_or(0))
}

fn selberg_cmd(a: SelbergArgs, p: Precision, out: &mut dyn Write) -> CliResult<Option<i32>> {
    let mut m = envelope("selberg", p.name());
    let v = match a.a2 {
        Some(a2) => {
            m.insert("integral".into(), "selberg".into());
            m.insert("a2".into(), num(a2));
            at!(p, selberg_in(a.n, a.a1, a2, a.tau))?
        }
        None => {
            m.insert("integral".into(), "laguerre_selberg".into());
            at!(p, laguerre_selberg_in(a.n, a.a1, a.tau))?
        }
    };
    m.insert("N".into(), a.n.into());
    m.insert("a1".into(), num(a.a1));
    m.insert("tau".into(), num(a.tau));
    insert_signed(&mut m, v);
    emit(out, m)?;
    Ok(None)
}

fn norm_cmd(a: NormArgs, p: Precision, out: &mut dyn Write) -> CliResult<Option<i32>> {
    let spec = a.ensemble.build()?;
    let full = spec.weight.is_full_line();
    let z = if full { at!(p, z_mb_fullline_in(&spec))? } else { at!(p, z_mb_in(&spec))? };
    let mut m = envelope("norm", p.name());
    m.insert("spec".into(), stringify(spec.to_json()));
    insert_signed(&mut m, z);
    if a.oracle {
        let o = if full { at!(p, z_oracle_fullline_in(&spec))? } else { at!(p, z_oracle_moments_in(&spec))? };
        let mut om = Map::new();
        insert_signed(&mut om, o);
        om.insert("rel_diff".into(), num(z.rel_diff(o)));
        m.insert("oracle".into(), Value::Object(om));
    }
    emit(out, m)?;
    Ok(None)
}

fn hk_cmd(a: HkArgs, p: Precision, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<Option<i32>> {
    let w = a.weight.build()?;
    let ks: Vec<usize> = match (a.k, a.k_max) {
        (Some(k), _) => vec![k],
        (None, Some(km)) => (0..=km).collect(),
        (None, None) => return Err(usage("--k or --k-max is required")),
    };
    let mut norms = Vec::new();
    for &k in &ks {
        let h = at!(p, h_k_in(&w, a.theta, k))?;
        let mut e = Map::new();
        e.insert("k".into(), k.into());
        insert_signed(&mut e, h);
        norms.push(Value::Object(e));
    }
    let mut checks = Vec::new();
    if !w.is_full_line() {
        for &k in &ks {
            let c = erratum_check(&w, a.theta, k)?;
            let status = match (matches!(w, WeightSpec::Jacobi { .. }), c.reproduces_expected, c.printed_agrees) {
                (true, true, false) => "expected_discrepancy",
                (false, _, true) => "agrees",
                _ => "unexpected",
            };
            if status == "unexpected" {
                writeln!(
                    err,
                    "warning: printed h_{k} for {w}: observed factor {:e}, expected {:e}",
                    c.observed_factor, c.expected_factor
                )?;
            }
            checks.push(json!({
                "family": c.family,
                "k": k,
                "printed": signed(c.printed),
                "z_ratio": signed(c.z_ratio),
                "observed_factor": num(c.observed_factor),
                "expected_factor": num(c.expected_factor),
                "status": status,
            }));
        }
    }
    let mut m = envelope("hk", p.name());
    m.insert("weight".into(), stringify(w.to_json()));
    m.insert("theta".into(), num(a.theta));
    m.insert("norms".into(), Value::Array(norms));
    m.insert("erratum_checks".into(), Value::Array(checks));
    emit(out, m)?;
    Ok(None)
}

fn poly_cmd(a: PolyArgs, p: Precision, out: &mut dyn Write) -> CliResult<Option<i32>> {
    let w = a.weight.build()?;
    let side: Side = a.side.into();
    let poly: MonicPoly = if w.is_full_line() {
        parity_lift(side, &w, a.k, a.theta)?
    } else {
        match side {
            Side::P => at!(p, p_poly_in(&w, a.k, a.theta))?,
            Side::Q => at!(p, q_poly_in(&w, a.k, a.theta))?,
        }
    };
    let mut m = envelope("poly", p.name());
    if let Value::Object(o) = poly.to_json(&w, a.theta, a.k, side) {
        m.extend(o.into_iter().map(|(k, v)| (k, stringify(v))));
    }
    if a.oracle {
        if w.is_full_line() {
            return Err(usage("--oracle supports half-line weights only"));
        }
        if a.k > ORACLE_MAX_K {
            return Err(usage(format!("--oracle supports k <= {ORACLE_MAX_K}")));
        }
        let o = oracle_char_poly(side, &w, a.k, a.theta)?;
        m.insert(
            "oracle".into(),
            json!({ "coeffs": nums(&o.coeffs_f64()), "max_rel_diff": num(poly.max_rel_diff(&o)) }),
        );
    }
    emit(out, m)?;
    Ok(None)
}

/// Comma-separated values, or `lo:hi:count` for an evenly spaced grid.
fn parse_list(flag: &str, s: &str) -> CliResult<Vec<f64>> {
    let bad = |what: &str| usage(format!("--{flag}: cannot parse '{what}' as a number"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad(parts[0]))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad(parts[1]))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad(parts[2]))?;
        if count == 0 {
            return Err(usage(format!("--{flag}: grid count must be at least 1")));
        }
        if count == 1 {
            return Ok(vec![lo]);
        }
        let h = (hi - lo) / (count - 1) as f64;
        return Ok((0..count).map(|i| if i + 1 == count { hi } else { lo + h * i as f64 }).collect());
    }
    if parts.len() != 1 {
        return Err(usage(format!("--{flag}: expected a comma list or lo:hi:count")));
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad(t))).collect()
}

const KERNEL_CONVENTION: &str =
    "bare = sum_k p_k(x) sgn(y)^k q_k(|y|^theta) / h_k; weighted = sqrt(w(x) w(y)) * bare; correlations are det[weighted]";

fn kernel_cmd(a: KernelArgs, out: &mut dyn Write) -> CliResult<Option<i32>> {
    let spec = a.ensemble.build()?;
    let k = build_kernel(&spec)?;
    let mut m = envelope("kernel", "extended");
    m.insert("spec".into(), stringify(spec.to_json()));
    m.insert("convention".into(), KERNEL_CONVENTION.into());
    if let Some(pts) = &a.points {
        if a.output == Format::Csv {
            return Err(usage("--points produces JSON only"));
        }
        let pts = parse_list("points", pts)?;
        let weighted = correlation(&k, &pts)?;
        let bare = correlation_bare(&k, &pts)?;
        m.insert("correlation".into(), json!({ "points": nums(&pts), "weighted": num(weighted), "bare": num(bare) }));
        emit(out, m)?;
        return Ok(None);
    }
    let xs = parse_list("x", a.x.as_deref().ok_or_else(|| usage("--x (or --points) is required"))?)?;
    let ys = match &a.y {
        Some(y) => parse_list("y", y)?,
        None => xs.clone(),
    };
    if a.output == Format::Csv {
        out.write_all(kernel_grid_csv(&k, &xs, &ys).as_bytes())?;
        return Ok(None);
    }
    let mut grid = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            grid.push(json!({
                "x": num(x),
                "y": num(y),
                "bare": num(kernel_eval(&k, x, y)),
                "weighted": num(kernel_eval_weighted(&k, x, y)),
            }));
        }
    }
    m.insert("grid".into(), Value::Array(grid));
    emit(out, m)?;
    Ok(None)
}

fn estimate_json(samples: &[Vec<f64>], stat: Statistic) -> CliResult<Value> {
    let e = linear_statistic(samples, stat)?;
    Ok(json!({ "mean": num(e.mean), "stderr": num(e.stderr) }))
}

fn sample_cmd(a: SampleArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<Option<i32>> {
    let spec = a.ensemble.build()?;
    let chain = run_chain(&spec, a.steps, a.seed, a.burn_in)?;
    if a.output == Format::Csv {
        out.write_all(samples_csv(&chain).as_bytes())?;
        return Ok(None);
    }
    let mut stats = Map::new();
    stats.insert("sum_x".into(), estimate_json(&chain.samples, Statistic::SumX)?);
    stats.insert("sum_x2".into(), estimate_json(&chain.samples, Statistic::SumX2)?);
    if let Some(t) = a.count_below {
        let mut v = estimate_json(&chain.samples, Statistic::CountBelow(t))?;
        v["t"] = num(t);
        stats.insert("count_below".into(), v);
    }
    // Kernel predictions E[sum x^m] = int w x^m K(x, x); omitted when unavailable.
    let mut pred = Map::new();
    match build_kernel(&spec) {
        Ok(k) => {
            for (name, m) in [("sum_x", 1), ("sum_x2", 2)] {
                match kernel_diagonal_moment(&k, m) {
                    Ok(v) => {
                        pred.insert(name.into(), num(v));
                    }
                    Err(e) => writeln!(err, "warning: no kernel prediction for {name}: {e}")?,
                }
            }
        }
        Err(e) => writeln!(err, "warning: no kernel predictions: {e}")?,
    }
    let mut m = envelope("sample", "double");
    m.insert("spec".into(), stringify(spec.to_json()));
    m.insert("seed".into(), chain.seed.into());
    m.insert("steps".into(), a.steps.into());
    m.insert("burn_in".into(), chain.burn_in.into());
    m.insert("acceptance_rate".into(), num(chain.acceptance_rate));
    m.insert("step_scale".into(), num(chain.step_scale));
    m.insert("statistics".into(), Value::Object(stats));
    m.insert("kernel_prediction".into(), Value::Object(pred));
    emit(out, m)?;
    Ok(None)
}
