//! `qroots`: subcommands for every library operation, with flat key=value
//! config files, deterministic CSV/JSON emission, and reproducible run
//! manifests.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
//! 3 I/O failure.

mod config;
mod manifest;
mod output;

use clap::{Args, Parser, Subcommand};
use config::ConfigMap;
use manifest::RunManifest;
use output::OutputSink;
use qroots::experiments::{
    chebyshev_identity, equidist, gpf_scan, hypothesis_bound, hypothesis_sum, kernel_heegner,
    kernel_lowertriang, rho_cubic, type1, type2, weyl_sum, x2y3_type_i2, ypoisson_check, BumpFn,
    CubicDivisorParams, LowerTriangParams, Theta,
};
use qroots::lattice::{coset_reps, heegner_points, reduce};
use qroots::modular::{mobius, rho as rho_count, roots_mod_k};
use qroots::parametrize::{verify_para1, verify_para2, verify_para3, ParamReport};
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

/// Operation-to-subcommand reachability table; every library operation is in
/// the call graph of at least one subcommand.
pub const DISPATCH: &[(&str, &str)] = &[
    ("jacobi", "rho"),
    ("sqrt_mod_p", "roots"),
    ("roots_mod_prime_power", "roots"),
    ("roots_mod_k", "roots"),
    ("rho", "rho"),
    ("factorize", "roots"),
    ("gpf", "gpf"),
    ("act", "heegner"),
    ("c_transform", "kernel-heegner"),
    ("reduce", "heegner"),
    ("heegner_points", "heegner"),
    ("coset_reps", "cosets"),
    ("u_invariant", "kernel-heegner"),
    ("u_skewed", "kernel-lt"),
    ("stabilizer_order", "heegner"),
    ("enumerate_s", "verify-para1"),
    ("verify_para1", "verify-para1"),
    ("verify_para2", "verify-para2"),
    ("verify_para3", "verify-para3"),
    ("hecke_orbits", "verify-para3"),
    ("hecke_apply", "verify-para3"),
    ("cube_decompose", "verify-para3"),
    ("bump", "type1"),
    ("bump_eval", "type1"),
    ("bump_integral", "type1"),
    ("type1", "type1"),
    ("type2", "type2"),
    ("hypothesis_sum", "hypothesis"),
    ("equidist", "equidist"),
    ("weyl_sum", "weyl"),
    ("gpf_scan", "gpf"),
    ("chebyshev_identity", "chebyshev"),
    ("kernel_heegner", "kernel-heegner"),
    ("kernel_lowertriang", "kernel-lt"),
    ("rho_cubic", "ypoisson"),
    ("ypoisson_check", "ypoisson"),
    ("x2y3_type_i2", "x2y3"),
    ("emit_csv", "heegner"),
    ("emit_json", "verify-para1"),
];

#[derive(Parser)]
#[command(
    name = "qroots",
    version,
    about = "Roots of a*l^2 + h == 0 (mod k): exact counts, reduced points, and distribution experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Write the result table as CSV to this path.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Write the full report as JSON to this path.
    #[arg(long, global = true)]
    json: Option<String>,
    /// Worker threads for experiment outer loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat key=value config file; explicit flags override file entries.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Write a reproducible run manifest (JSON) to this path.
    #[arg(long, global = true)]
    manifest: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All roots of a*v^2 + h == 0 (mod k).
    Roots(RootsArgs),
    /// The root count rho(a, h, k).
    Rho(RootsArgs),
    /// Reduced representatives of determinant h with stabilizer orders.
    Heegner(HeegnerArgs),
    /// Coset representatives of Gamma_0(q) in SL2(Z).
    Cosets(CosetsArgs),
    /// Verify the coset/reduced-point parametrization inside a box.
    #[command(name = "verify-para1")]
    VerifyPara1(Para1Args),
    /// Verify the shear-pair parametrization inside a box.
    #[command(name = "verify-para2")]
    VerifyPara2(Para2Args),
    /// Verify the cubic-orbit parametrization inside a box.
    #[command(name = "verify-para3")]
    VerifyPara3(Para3Args),
    /// Divisor-windowed discrepancy of smoothed root counts.
    Type1(Type1Args),
    /// Bilinear discrepancy with coefficients on m ~ M, n ~ N.
    Type2(Type2Args),
    /// Interval counts of normalized roots v/p over primes p <= X.
    Equidist(EquidistArgs),
    /// Exponential sum over normalized roots.
    Weyl(WeylArgs),
    /// Greatest-prime-factor scan of a*n^2 + h over n in [X, 2X].
    Gpf(GpfArgs),
    /// Exact prime-power identity for the window product.
    Chebyshev(GpfArgs),
    /// The prime sum (log p / p) rho(a, h, p) over [Y, Z).
    Hypothesis(HypothesisArgs),
    /// Kernel sum over levels paired with reduced points.
    #[command(name = "kernel-heegner")]
    KernelHeegner(KernelHeegnerArgs),
    /// Kernel sum over lower-triangular shear functionals.
    #[command(name = "kernel-lt")]
    KernelLt(KernelLtArgs),
    /// Divisor-window experiment for a*x^2 + b*y^3.
    X2y3(X2y3Args),
    /// Smoothed cubic root-count average against its main term.
    Ypoisson(YpoissonArgs),
}

#[derive(Args, Debug)]
struct RootsArgs {
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    k: Option<i128>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct HeegnerArgs {
    #[arg(long)]
    h: Option<i128>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct CosetsArgs {
    #[arg(long)]
    q: Option<i128>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct Para1Args {
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    d: Option<i128>,
    #[arg(long)]
    bound: Option<i128>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct Para2Args {
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    s: Option<i128>,
    #[arg(long)]
    n1: Option<i128>,
    #[arg(long)]
    n2: Option<i128>,
    #[arg(long)]
    bound: Option<i128>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct Para3Args {
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    y: Option<i128>,
    #[arg(long)]
    d: Option<i128>,
    #[arg(long)]
    bound: Option<i128>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct Type1Args {
    #[arg(long)]
    x: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    d: Option<i64>,
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    theta: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct Type2Args {
    #[arg(long)]
    x: Option<i64>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    theta: Option<f64>,
    /// Coefficient family on m: "ones" or "mobius".
    #[arg(long)]
    alpha: Option<String>,
    /// Coefficient family on n: "sf" (squarefree indicator) or "mobius-sf".
    #[arg(long)]
    beta: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct EquidistArgs {
    #[arg(long)]
    x: Option<u64>,
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    /// Number of equal intervals partitioning (0, 1].
    #[arg(long)]
    intervals: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct WeylArgs {
    #[arg(long)]
    x: Option<u64>,
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    m: Option<i64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct GpfArgs {
    #[arg(long)]
    x: Option<u64>,
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct HypothesisArgs {
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    y: Option<u64>,
    #[arg(long)]
    z: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct KernelHeegnerArgs {
    #[arg(long)]
    qlo: Option<u64>,
    #[arg(long)]
    qhi: Option<u64>,
    #[arg(long)]
    h: Option<i128>,
    #[arg(long)]
    z: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct KernelLtArgs {
    #[arg(long)]
    d: Option<i64>,
    #[arg(long)]
    n0: Option<i64>,
    #[arg(long)]
    n1: Option<i64>,
    #[arg(long)]
    n2: Option<i64>,
    #[arg(long)]
    t: Option<i64>,
    #[arg(long)]
    v: Option<i64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct X2y3Args {
    #[arg(long)]
    x: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    dmax: Option<i64>,
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    b: Option<i128>,
    #[arg(long)]
    biga: Option<i64>,
    #[arg(long)]
    bigb: Option<i64>,
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct YpoissonArgs {
    #[arg(long)]
    a: Option<i128>,
    #[arg(long)]
    b: Option<i128>,
    #[arg(long)]
    d: Option<i128>,
    #[arg(long)]
    bb: Option<i64>,
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

/// A run error carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

type RunResult = Result<(), Failure>;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<qroots::Error> for Failure {
    fn from(e: qroots::Error) -> Self {
        match e {
            qroots::Error::InvalidArgument(_) | qroots::Error::Range(_) => fail(2, e.to_string()),
            qroots::Error::Internal(_) => fail(1, e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the read end of a pipe closes (e.g. `qroots ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qroots: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Resolve a parameter: explicit flag wins, then the config file, then the
/// default (if any).
fn need<T: std::str::FromStr + ToString>(
    flag: Option<T>,
    cfg: &ConfigMap,
    key: &str,
    default: Option<T>,
) -> Result<T, Failure> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(raw) = cfg.get(key) {
        return raw
            .parse::<T>()
            .map_err(|_| fail(2, format!("config value {key}={raw} does not parse")));
    }
    default.ok_or_else(|| fail(2, format!("missing required parameter --{key}")))
}

struct Run {
    params: BTreeMap<String, String>,
    sink: OutputSink,
    started: Instant,
}

impl Run {
    fn new(common: &CommonArgs) -> Result<Self, Failure> {
        if let Some(n) = common.threads {
            // Ignore the error if a pool already exists (tests call run twice).
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        Ok(Run {
            params: BTreeMap::new(),
            sink: OutputSink::new(common),
            started: Instant::now(),
        })
    }

    fn record(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    fn finish(&mut self, subcommand: &str, common: &CommonArgs) -> RunResult {
        if let Some(path) = &common.manifest {
            let manifest = RunManifest {
                subcommand: subcommand.to_string(),
                parameters: self.params.clone(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                wall_secs: self.started.elapsed().as_secs_f64(),
                workers: rayon::current_num_threads(),
                outputs: self.sink.digests(),
            };
            manifest.write(path).map_err(|e| fail(3, e))?;
        }
        Ok(())
    }
}

fn load_config(common: &CommonArgs) -> Result<ConfigMap, Failure> {
    match &common.config {
        Some(path) => ConfigMap::load(path).map_err(|e| fail(2, e)),
        None => Ok(ConfigMap::default()),
    }
}

fn run(cmd: Command) -> RunResult {
    match cmd {
        Command::Roots(args) => {
            let cfg = load_config(&args.common)?;
            let a = need(args.a, &cfg, "a", None)?;
            let h = need(args.h, &cfg, "h", None)?;
            let k = need(args.k, &cfg, "k", None)?;
            let mut run = Run::new(&args.common)?;
            run.record("a", a);
            run.record("h", h);
            run.record("k", k);
            let rs = roots_mod_k(a, h, k)?;
            println!(
                "{}",
                rs.roots
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let mut csv = String::from("v\n");
            for v in &rs.roots {
                csv.push_str(&format!("{v}\n"));
            }
            run.sink.emit_csv(&csv)?;
            run.sink.emit_json(&serde_json::json!({
                "modulus": k.to_string(),
                "roots": rs.roots.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            }))?;
            run.finish("roots", &args.common)
        }
        Command::Rho(args) => {
            let cfg = load_config(&args.common)?;
            let a = need(args.a, &cfg, "a", None)?;
            let h = need(args.h, &cfg, "h", None)?;
            let k = need(args.k, &cfg, "k", None)?;
            let mut run = Run::new(&args.common)?;
            run.record("a", a);
            run.record("h", h);
            run.record("k", k);
            let count = rho_count(a, h, k)?;
            println!("{count}");
            run.sink.emit_csv(&format!("rho\n{count}\n"))?;
            run.sink
                .emit_json(&serde_json::json!({ "rho": count.to_string() }))?;
            run.finish("rho", &args.common)
        }
        Command::Heegner(args) => {
            let cfg = load_config(&args.common)?;
            let h = need(args.h, &cfg, "h", None)?;
            let mut run = Run::new(&args.common)?;
            run.record("h", h);
            let pts = heegner_points(h)?;
            for p in &pts {
                // The emitted representatives are fixed points of reduction.
                let (again, _) = reduce(&p.sym)?;
                if again.sym != p.sym {
                    return Err(fail(
                        1,
                        format!("representative {:?} is not reduced", p.sym),
                    ));
                }
                println!("{},{},{}", p.sym.a, p.sym.b, p.sym.c);
            }
            let mut csv = String::from("a,b,c,stab_order\n");
            for p in &pts {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    p.sym.a, p.sym.b, p.sym.c, p.stab_order
                ));
            }
            run.sink.emit_csv(&csv)?;
            run.sink.emit_json(&serde_json::json!({
                "h": h.to_string(),
                "points": pts
                    .iter()
                    .map(|p| serde_json::json!({
                        "a": p.sym.a.to_string(),
                        "b": p.sym.b.to_string(),
                        "c": p.sym.c.to_string(),
                        "stab_order": p.stab_order,
                    }))
                    .collect::<Vec<_>>(),
            }))?;
            run.finish("heegner", &args.common)
        }
        Command::Cosets(args) => {
            let cfg = load_config(&args.common)?;
            let q = need(args.q, &cfg, "q", None)?;
            let mut run = Run::new(&args.common)?;
            run.record("q", q);
            let reps = coset_reps(q)?;
            for m in &reps {
                println!("{},{},{},{}", m.a, m.b, m.c, m.d);
            }
            let mut csv = String::from("a,b,c,d\n");
            for m in &reps {
                csv.push_str(&format!("{},{},{},{}\n", m.a, m.b, m.c, m.d));
            }
            run.sink.emit_csv(&csv)?;
            run.sink.emit_json(&serde_json::json!({
                "q": q.to_string(),
                "count": reps.len(),
            }))?;
            run.finish("cosets", &args.common)
        }
        Command::VerifyPara1(args) => {
            let cfg = load_config(&args.common)?;
            let a = need(args.a, &cfg, "a", None)?;
            let h = need(args.h, &cfg, "h", None)?;
            let d = need(args.d, &cfg, "d", Some(1))?;
            let bound = need(args.bound, &cfg, "bound", Some(50))?;
            let mut run = Run::new(&args.common)?;
            run.record("a", a);
            run.record("h", h);
            run.record("d", d);
            run.record("bound", bound);
            let report = verify_para1(a, h, d, bound)?;
            finish_para(report, run, "verify-para1", &args.common)
        }
        Command::VerifyPara2(args) => {
            let cfg = load_config(&args.common)?;
            let a = need(args.a, &cfg, "a", None)?;
            let h = need(args.h, &cfg, "h", None)?;
            let s = need(args.s, &cfg, "s", Some(1))?;
            let n1 = need(args.n1, &cfg, "n1", None)?;
            let n2 = need(args.n2, &cfg, "n2", None)?;
            let bound = need(args.bound, &cfg, "bound", Some(60))?;
            let mut run = Run::new(&args.common)?;
            for (k, v) in [
                ("a", a),
                ("h", h),
                ("s", s),
                ("n1", n1),
                ("n2", n2),
                ("bound", bound),
            ] {
                run.record(k, v);
            }
            let report = verify_para2(a, h, s, n1, n2, bound)?;
            finish_para(report, run, "verify-para2", &args.common)
        }
        Command::VerifyPara3(args) => {
            let cfg = load_config(&args.common)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", None)?;
            let y = need(args.y, &cfg, "y", None)?;
            let d = need(args.d, &cfg, "d", Some(1))?;
            let bound = need(args.bound, &cfg, "bound", Some(80))?;
            let mut run = Run::new(&args.common)?;
            for (k, v) in [("a", a), ("h", h), ("y", y), ("d", d), ("bound", bound)] {
                run.record(k, v);
            }
            let report = verify_para3(a, h, y, d, bound)?;
            finish_para(report, run, "verify-para3", &args.common)
        }
        Command::Type1(args) => {
            let cfg = load_config(&args.common)?;
            let x = need(args.x, &cfg, "x", None)?;
            let k = need(args.k, &cfg, "k", Some(x))?;
            let d = need(args.d, &cfg, "d", Some((x as f64).powf(0.4) as i64))?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", Some(1))?;
            let theta = Theta::new(need(args.theta, &cfg, "theta", Some(7.0 / 64.0))?)?;
            let mut run = Run::new(&args.common)?;
            let psi1 = BumpFn::new(1.0, 2.0, 1.0)?;
            let psi2 = BumpFn::new(-1.0, 1.0, 1.0)?;
            let report = type1(x, k, d, a, h, &psi1, &psi2, theta)?;
            run.params = report.parameters.clone();
            println!(
                "total_error={:.6e} target_bound={:.6e} ratio={:.6e} rows={}",
                report.total_error,
                report.target_bound,
                report.ratio_to_bound,
                report.rows.len()
            );
            run.sink.emit_csv(&report.to_csv())?;
            run.sink.emit_json(&report)?;
            run.finish("type1", &args.common)
        }
        Command::Type2(args) => {
            let cfg = load_config(&args.common)?;
            let x = need(args.x, &cfg, "x", None)?;
            let m = need(args.m, &cfg, "m", None)?;
            let n = need(args.n, &cfg, "n", None)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", Some(1))?;
            let theta = Theta::new(need(args.theta, &cfg, "theta", Some(7.0 / 64.0))?)?;
            let alpha_name = need(args.alpha, &cfg, "alpha", Some("ones".to_string()))?;
            let beta_name = need(args.beta, &cfg, "beta", Some("sf".to_string()))?;
            let alpha: Box<dyn Fn(i64) -> f64 + Sync> = match alpha_name.as_str() {
                "ones" => Box::new(|_| 1.0),
                "mobius" => Box::new(|m: i64| mobius(m as i128).unwrap_or(0) as f64),
                other => return Err(fail(2, format!("unknown alpha family {other}"))),
            };
            let beta: Box<dyn Fn(i64) -> f64 + Sync> = match beta_name.as_str() {
                "sf" => Box::new(|n: i64| {
                    if qroots::modular::is_squarefree(n as i128).unwrap_or(false) {
                        1.0
                    } else {
                        0.0
                    }
                }),
                "mobius-sf" => Box::new(|n: i64| mobius(n as i128).unwrap_or(0) as f64),
                other => return Err(fail(2, format!("unknown beta family {other}"))),
            };
            let mut run = Run::new(&args.common)?;
            let psi = BumpFn::new(-1.0, 1.0, 1.0)?;
            let report = type2(x, m, n, a, h, &*alpha, &*beta, &psi, theta)?;
            run.params = report.parameters.clone();
            run.record("alpha", &alpha_name);
            run.record("beta", &beta_name);
            println!(
                "total_error={:.6e} target_bound={:.6e} ratio={:.6e} rows={}",
                report.total_error,
                report.target_bound,
                report.ratio_to_bound,
                report.rows.len()
            );
            run.sink.emit_csv(&report.to_csv())?;
            run.sink.emit_json(&report)?;
            run.finish("type2", &args.common)
        }
        Command::Equidist(args) => {
            let cfg = load_config(&args.common)?;
            let x = need(args.x, &cfg, "x", None)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", Some(1))?;
            let cells = need(args.intervals, &cfg, "intervals", Some(10))?;
            if cells == 0 {
                return Err(fail(2, "need at least one interval"));
            }
            let mut run = Run::new(&args.common)?;
            run.record("intervals", cells);
            let intervals: Vec<(f64, f64)> = (0..cells)
                .map(|j| (j as f64 / cells as f64, (j + 1) as f64 / cells as f64))
                .collect();
            let report = equidist(x, a, h, &intervals)?;
            for (k, v) in &report.parameters {
                run.params.insert(k.clone(), v.clone());
            }
            for row in &report.rows {
                println!(
                    "({:.3},{:.3}] count={} expected={:.3} deviation={:+.5}",
                    row.alpha, row.beta, row.count, row.expected, row.deviation
                );
            }
            println!(
                "rho_sum={} max_abs_deviation={:.6}",
                report.rho_sum, report.max_abs_deviation
            );
            run.sink.emit_csv(&report.to_csv())?;
            run.sink.emit_json(&report)?;
            run.finish("equidist", &args.common)
        }
        Command::Weyl(args) => {
            let cfg = load_config(&args.common)?;
            let x = need(args.x, &cfg, "x", None)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", Some(1))?;
            let m = need(args.m, &cfg, "m", Some(1))?;
            let mut run = Run::new(&args.common)?;
            for (k, v) in [("x", x as i128), ("a", a), ("h", h), ("m", m as i128)] {
                run.record(k, v);
            }
            let w = weyl_sum(x, a, h, m)?;
            println!(
                "re={:.9e} im={:.9e} abs={:.9e} terms={}",
                w.re,
                w.im,
                w.abs(),
                w.terms
            );
            run.sink.emit_csv(&format!(
                "re,im,terms\n{},{},{}\n",
                qroots::experiments::fmt_f64(w.re),
                qroots::experiments::fmt_f64(w.im),
                w.terms
            ))?;
            run.sink.emit_json(&w)?;
            run.finish("weyl", &args.common)
        }
        Command::Gpf(args) => {
            let cfg = load_config(&args.common)?;
            let x = need(args.x, &cfg, "x", None)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", Some(1))?;
            let mut run = Run::new(&args.common)?;
            let report = gpf_scan(x, a, h)?;
            run.params = report.parameters.clone();
            println!(
                "max_gpf={} at n={} exponent={:.6}",
                report.max_gpf, report.argmax_n, report.max_exponent
            );
            run.sink.emit_csv(&report.to_csv())?;
            run.sink.emit_json(&report)?;
            run.finish("gpf", &args.common)
        }
        Command::Chebyshev(args) => {
            let cfg = load_config(&args.common)?;
            let x = need(args.x, &cfg, "x", None)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", Some(1))?;
            let mut run = Run::new(&args.common)?;
            let report = chebyshev_identity(x, a, h)?;
            run.params = report.parameters.clone();
            println!(
                "lhs={:.9e} rhs={:.9e} difference={:.3e} multisets_equal={}",
                report.lhs_log, report.rhs_log, report.difference, report.multisets_equal
            );
            run.sink.emit_csv(&format!(
                "lhs_log,rhs_log,difference,multisets_equal\n{},{},{},{}\n",
                qroots::experiments::fmt_f64(report.lhs_log),
                qroots::experiments::fmt_f64(report.rhs_log),
                qroots::experiments::fmt_f64(report.difference),
                report.multisets_equal
            ))?;
            run.sink.emit_json(&report)?;
            run.finish("chebyshev", &args.common)?;
            if !report.multisets_equal {
                return Err(fail(1, "prime multisets differ between the two routes"));
            }
            Ok(())
        }
        Command::Hypothesis(args) => {
            let cfg = load_config(&args.common)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let h = need(args.h, &cfg, "h", None)?;
            let y = need(args.y, &cfg, "y", None)?;
            let z = need(args.z, &cfg, "z", None)?;
            let eps = need(args.eps, &cfg, "eps", Some(0.1))?;
            let mut run = Run::new(&args.common)?;
            for (k, v) in [("a", a), ("h", h), ("y", y as i128), ("z", z as i128)] {
                run.record(k, v);
            }
            run.record("eps", eps);
            let s = hypothesis_sum(a, h, y, z)?;
            let bound = hypothesis_bound(y, z, eps)?;
            println!(
                "sum={:.9e} primes={} bound(eps={eps})={:.9e}",
                s.sum, s.primes, bound
            );
            run.sink.emit_csv(&format!(
                "sum,primes,bound\n{},{},{}\n",
                qroots::experiments::fmt_f64(s.sum),
                s.primes,
                qroots::experiments::fmt_f64(bound)
            ))?;
            run.sink.emit_json(&serde_json::json!({
                "sum": s.sum,
                "primes": s.primes,
                "eps": eps,
                "bound": bound,
            }))?;
            run.finish("hypothesis", &args.common)
        }
        Command::KernelHeegner(args) => {
            let cfg = load_config(&args.common)?;
            let qlo = need(args.qlo, &cfg, "qlo", None)?;
            let qhi = need(args.qhi, &cfg, "qhi", None)?;
            let h = need(args.h, &cfg, "h", None)?;
            let z = need(args.z, &cfg, "z", Some(4.0))?;
            let mut run = Run::new(&args.common)?;
            let report = kernel_heegner(qlo, qhi, h, z)?;
            run.params = report.parameters.clone();
            println!(
                "total={:.9e} bound={:.6e} ratio={:.6e} skipped={:?}",
                report.total, report.bound, report.ratio_to_bound, report.skipped
            );
            run.sink.emit_csv(&report.to_csv())?;
            run.sink.emit_json(&report)?;
            run.finish("kernel-heegner", &args.common)
        }
        Command::KernelLt(args) => {
            let cfg = load_config(&args.common)?;
            let p = LowerTriangParams {
                d_min: need(args.d, &cfg, "d", Some(1))?,
                n0_max: need(args.n0, &cfg, "n0", Some(1))?,
                n1_max: need(args.n1, &cfg, "n1", Some(1))?,
                n2_max: need(args.n2, &cfg, "n2", Some(1))?,
                t_max: need(args.t, &cfg, "t", Some(1))?,
                v_max: need(args.v, &cfg, "v", Some(1))?,
                z: need(args.z, &cfg, "z", Some(4.0))?,
                r: need(args.r, &cfg, "r", Some(1.0))?,
            };
            let mut run = Run::new(&args.common)?;
            let report = kernel_lowertriang(&p)?;
            run.params = report.parameters.clone();
            println!(
                "total={:.9e} bound={:.6e} ratio={:.6e} cells={}",
                report.total,
                report.bound,
                report.ratio_to_bound,
                report.rows.len()
            );
            run.sink.emit_csv(&report.to_csv())?;
            run.sink.emit_json(&report)?;
            run.finish("kernel-lt", &args.common)
        }
        Command::X2y3(args) => {
            let cfg = load_config(&args.common)?;
            let x = need(args.x, &cfg, "x", None)?;
            let delta = need(args.delta, &cfg, "delta", Some(0.5))?;
            let p = CubicDivisorParams {
                x,
                k_scale: need(args.k, &cfg, "k", Some((x as f64).powf(0.7) as i64))?,
                d_max: need(args.dmax, &cfg, "dmax", Some((x as f64).powf(0.25) as i64))?,
                a: need(args.a, &cfg, "a", Some(1))?,
                b: need(args.b, &cfg, "b", Some(1))?,
                big_a: need(args.biga, &cfg, "biga", Some((x as f64).sqrt() as i64))?,
                big_b: need(
                    args.bigb,
                    &cfg,
                    "bigb",
                    Some((x as f64).powf(1.0 / 3.0) as i64),
                )?,
            };
            let mut run = Run::new(&args.common)?;
            run.record("delta", delta);
            let f = BumpFn::new(1.0, 1.0 + delta, delta)?;
            let report = x2y3_type_i2(&p, &f, &f, &f)?;
            for (k, v) in &report.parameters {
                run.params.insert(k.clone(), v.clone());
            }
            println!(
                "total_error={:.6e} x_to_5_6={:.6e} ratio={:.6e} rows={}",
                report.total_error,
                report.target_bound,
                report.ratio_to_bound,
                report.rows.len()
            );
            run.sink.emit_csv(&report.to_csv())?;
            run.sink.emit_json(&report)?;
            run.finish("x2y3", &args.common)
        }
        Command::Ypoisson(args) => {
            let cfg = load_config(&args.common)?;
            let a = need(args.a, &cfg, "a", Some(1))?;
            let b = need(args.b, &cfg, "b", Some(1))?;
            let d = need(args.d, &cfg, "d", None)?;
            let bb = need(args.bb, &cfg, "bb", Some(1000))?;
            let delta = need(args.delta, &cfg, "delta", Some(0.5))?;
            let mut run = Run::new(&args.common)?;
            run.record("delta", delta);
            let f2 = BumpFn::new(1.0, 1.0 + delta, delta)?;
            // Surface the single-shift count as well, so the per-y counter is
            // exercised directly from the command line.
            let single = rho_cubic(a, b, 1, d)?;
            let report = ypoisson_check(a, b, d, bb, &f2)?;
            for (k, v) in &report.parameters {
                run.params.insert(k.clone(), v.clone());
            }
            println!(
                "lhs={:.9e} main={:.9e} error={:+.6e} complete_sum={} rho_cubic(y=1)={}",
                report.lhs, report.main, report.error, report.complete_sum, single
            );
            run.sink.emit_csv(&format!(
                "lhs,main,error,complete_sum\n{},{},{},{}\n",
                qroots::experiments::fmt_f64(report.lhs),
                qroots::experiments::fmt_f64(report.main),
                qroots::experiments::fmt_f64(report.error),
                report.complete_sum
            ))?;
            run.sink.emit_json(&report)?;
            run.finish("ypoisson", &args.common)?;
            if report.complete_sum != i64::try_from(d).unwrap_or(i64::MAX) {
                return Err(fail(
                    1,
                    format!("complete sum {} differs from d={d}", report.complete_sum),
                ));
            }
            Ok(())
        }
    }
}

fn finish_para(report: ParamReport, mut run: Run, name: &str, common: &CommonArgs) -> RunResult {
    run.params = report.parameters.clone();
    println!(
        "{} elements={} hits={} misses={} double_hits={}",
        if report.passes() { "pass" } else { "FAIL" },
        report.elements_enumerated,
        report.hits,
        report.misses.len(),
        report.double_hits.len()
    );
    let mut csv = String::from("kind,element\n");
    for m in &report.misses {
        csv.push_str(&format!("miss,\"{m}\"\n"));
    }
    for m in &report.double_hits {
        csv.push_str(&format!("double_hit,\"{m}\"\n"));
    }
    run.sink.emit_csv(&csv)?;
    run.sink.emit_json(&report)?;
    run.finish(name, common)?;
    if report.passes() {
        Ok(())
    } else {
        Err(fail(
            1,
            format!(
                "{name} found {} misses and {} double hits",
                report.misses.len(),
                report.double_hits.len()
            ),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn dispatch_table_points_at_real_subcommands() {
        let cmd = Cli::command();
        let names: Vec<String> = cmd
            .get_subcommands()
            .map(|c| c.get_name().to_string())
            .collect();
        for (op, sub) in DISPATCH {
            assert!(
                names.contains(&sub.to_string()),
                "op {op} maps to unknown subcommand {sub}"
            );
        }
        // Every subcommand carries at least one operation.
        for n in &names {
            assert!(
                DISPATCH.iter().any(|(_, s)| s == n),
                "subcommand {n} unused by dispatch table"
            );
        }
    }

    #[test]
    fn dispatch_table_covers_the_operation_surface() {
        let expected = [
            "jacobi",
            "sqrt_mod_p",
            "roots_mod_prime_power",
            "roots_mod_k",
            "rho",
            "factorize",
            "gpf",
            "act",
            "c_transform",
            "reduce",
            "heegner_points",
            "coset_reps",
            "u_invariant",
            "u_skewed",
            "stabilizer_order",
            "enumerate_s",
            "verify_para1",
            "verify_para2",
            "verify_para3",
            "hecke_orbits",
            "hecke_apply",
            "cube_decompose",
            "bump",
            "bump_eval",
            "bump_integral",
            "type1",
            "type2",
            "hypothesis_sum",
            "equidist",
            "weyl_sum",
            "gpf_scan",
            "chebyshev_identity",
            "kernel_heegner",
            "kernel_lowertriang",
            "rho_cubic",
            "ypoisson_check",
            "x2y3_type_i2",
            "emit_csv",
            "emit_json",
        ];
        let ops: Vec<&str> = DISPATCH.iter().map(|(op, _)| *op).collect();
        for e in expected {
            assert!(
                ops.contains(&e),
                "operation {e} missing from dispatch table"
            );
        }
        assert_eq!(ops.len(), expected.len());
    }

    #[test]
    fn cli_parses() {
        Cli::command().debug_assert();
    }
}
