//! `rndf`: evaluate, classify, probe and plot the curve from the command line.
//!
//! Exit codes: 0 ok, 2 usage, 3 I/O, 4 inconclusive, 5 numeric failure.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{plot_csv, plot_json, plot_svg, write_atomic};
use rndf_core::constants::NamedConstant;
use rndf_core::continued_fractions::{cf_expand, convergents, Approach};
use rndf_core::geometry::{default_levels, dimension_estimate, refine_to_resolution, sample_curve};
use rndf_core::probe::{no_tangent_certificate, Certificate, ProbeReport, Verdict};
use rndf_core::rational::{classify, fit_eighth_root, Klass};
use rndf_core::series::{eval_phi_x, EvalConfig};
use rndf_core::time::{TimePoint, Variable};
use rndf_core::Error;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "rndf", version, about = "Complex Riemann function lab")]
struct Cli {
    /// absolute error target for series evaluations
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// digits carried by phase reductions (16..=31)
    #[arg(long, global = true, default_value_t = 30)]
    precision_digits: u32,
    /// worker threads; RNDF_THREADS takes precedence
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// φ at one point
    Eval(PointArgs),
    /// sample φ on an interval of t
    Plot(PlotArgs),
    /// corner or spiral class of t_{p,q}
    Classify {
        /// reduced fraction p/q
        fraction: String,
        /// also fit the eighth root e_{p,q} (corner points)
        #[arg(long)]
        fit: bool,
    },
    /// no-tangent certificate
    Probe(ProbeArgs),
    /// continued fraction and convergents of a number in [0, 1]
    Cf {
        /// pi-3, sqrt2-1, golden-1, a decimal or p/q
        value: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// box-counting dimension of φ([0, 1/(2π)])
    Dim(DimArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    /// curve parameter t
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x", required_unless_present = "x")]
    t: Option<String>,
    /// rescaled parameter x = 2πt
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Svg,
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    from: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0 / (2.0 * std::f64::consts::PI))]
    to: f64,
    #[arg(long, default_value_t = 20_001)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Format::Svg)]
    format: Format,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// rational point t_{p,q}, given as p/q
    #[arg(long, conflicts_with_all = ["t", "x", "constant"])]
    rational: Option<String>,
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["x", "constant"])]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "constant")]
    x: Option<String>,
    /// named constant used as x
    #[arg(long)]
    constant: Option<String>,
    /// include every secant direction in the report
    #[arg(long)]
    directions: bool,
}

#[derive(Args, Debug)]
struct DimArgs {
    #[arg(long, default_value_t = 200_001)]
    n: usize,
    #[arg(long, default_value_t = 1e-3)]
    eps_lo: f64,
    #[arg(long, default_value_t = 1e-1)]
    eps_hi: f64,
    /// regression levels; 8 per decade by default
    #[arg(long)]
    levels: Option<usize>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Argument(_) | Error::Domain(_) | Error::Class(_) | Error::Range(_) | Error::Validity(_) => 2,
            Error::Inconclusive(_) | Error::PrecisionExhausted(_) | Error::Degenerate(_) => 4,
            Error::Capacity { .. } | Error::NoConvergence(_) | Error::Numeric(_) | Error::Resolution(_) => 5,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

/// `p/q`, a named constant or a decimal literal.
fn parse_point(s: &str, var: Variable) -> Result<TimePoint, Failure> {
    if let Some(c) = NamedConstant::parse(s) {
        return Ok(TimePoint::named(c, var));
    }
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = parse_fraction(p, q)?;
        return Ok(TimePoint::rational(p, q, var)?);
    }
    Ok(TimePoint::decimal(s, var)?)
}

fn parse_fraction(p: &str, q: &str) -> Result<(i64, i64), Failure> {
    let p = p.trim().parse::<i64>().map_err(|_| usage(format!("bad numerator {:?}", p)))?;
    let q = q.trim().parse::<i64>().map_err(|_| usage(format!("bad denominator {:?}", q)))?;
    Ok((p, q))
}

fn fraction(s: &str) -> Result<(i64, i64), Failure> {
    let (p, q) = s.split_once('/').ok_or_else(|| usage(format!("expected p/q, got {:?}", s)))?;
    parse_fraction(p, q)
}

fn point_of(t: &Option<String>, x: &Option<String>) -> Result<TimePoint, Failure> {
    match (t, x) {
        (Some(t), None) => parse_point(t, Variable::T),
        (None, Some(x)) => parse_point(x, Variable::X),
        _ => Err(usage("give exactly one of --t and --x")),
    }
}

fn c64(z: rndf_core::Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn report_json(r: &ProbeReport, with_dirs: bool) -> Value {
    let mut v = json!({
        "limit": r.limit_candidate.map(c64),
        "dispersion": r.dispersion,
        "max_gap": r.max_gap,
        "count": r.directions.len(),
        "skipped": r.skipped,
    });
    if with_dirs {
        v["directions"] = r.directions.iter().map(|d| d.arg()).collect::<Vec<_>>().into();
    }
    v
}

fn certificate_json(c: &Certificate, with_dirs: bool) -> Value {
    json!({
        "verdict": c.verdict.name(),
        "reason": c.reason,
        "angle_diff": c.angle_diff,
        "e_fit": c.e_fit.map(|e| e.0),
        "right": c.right.as_ref().map(|r| report_json(r, with_dirs)),
        "left": c.left.as_ref().map(|r| report_json(r, with_dirs)),
        "arc": c.arc,
        "distinct_directions": c.distinct_directions,
        "convergents": c.convergents.iter().map(|p| json!({
            "p": p.p.to_string(),
            "q": p.q.to_string(),
            "k": p.k,
            "window": p.window.map(|(m, a)| json!({"m": m, "alpha": a})),
            "directions": if with_dirs { Some(p.directions.iter().map(|d| d.arg()).collect::<Vec<_>>()) } else { None },
        })).collect::<Vec<_>>(),
    })
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(|e| Failure { code: 3, msg: format!("{}: {}", p.display(), e) }),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{}", text).and_then(|_| out.flush()).map_err(|e| Failure { code: 3, msg: format!("stdout: {}", e) })
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = EvalConfig::new(cli.tol, EvalConfig::default().max_terms, cli.precision_digits)?;
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json");
    match &cli.cmd {
        Cmd::Eval(a) => {
            let t = point_of(&a.t, &a.x)?;
            let e = eval_phi_x(&t.x_param(), &cfg)?;
            emit(&pretty(&json!({ "re": e.value.re, "im": e.value.im, "err_bound": e.err_bound, "terms": e.terms })), &cli.out)?;
            Ok(0)
        }
        Cmd::Plot(a) => {
            if !(a.from < a.to) || a.n < 2 {
                return Err(usage("need --from < --to and --n ≥ 2"));
            }
            let out = cli.out.as_ref().ok_or_else(|| usage("plot needs --out"))?;
            let poly = sample_curve(a.from, a.to, a.n, &cfg)?;
            let text = match a.format {
                Format::Svg => plot_svg(&poly),
                Format::Csv => plot_csv(&poly),
                Format::Json => plot_json(&poly),
            };
            write_atomic(out, text.as_bytes()).map_err(|e| Failure { code: 3, msg: format!("{}: {}", out.display(), e) })?;
            Ok(0)
        }
        Cmd::Classify { fraction: f, fit } => {
            let (p, q) = fraction(f)?;
            let mut pt = classify(p, q)?;
            if *fit && pt.klass == Klass::Corner {
                pt = fit_eighth_root(&pt, &cfg)?;
            }
            let klass = match pt.klass {
                Klass::Corner => "corner",
                Klass::Spiral => "spiral",
            };
            let v = json!({
                "p": pt.p,
                "q": pt.q,
                "verdict": klass,
                "klass": klass,
                "q_tilde": pt.q_tilde,
                "e_fit": pt.e_fit.map(|e| e.0),
                "e_residual": pt.e_residual,
            });
            emit(&pretty(&v), &cli.out)?;
            Ok(0)
        }
        Cmd::Probe(a) => {
            let t = match (&a.rational, &a.constant) {
                (Some(r), _) => {
                    let (p, q) = fraction(r)?;
                    TimePoint::t_pq(p, q)?
                }
                (None, Some(c)) => {
                    let c = NamedConstant::parse(c).ok_or_else(|| usage(format!("unknown constant {:?}", c)))?;
                    TimePoint::named(c, Variable::X)
                }
                (None, None) => point_of(&a.t, &a.x)?,
            };
            let cert = no_tangent_certificate(&t, &cfg)?;
            emit(&pretty(&certificate_json(&cert, a.directions)), &cli.out)?;
            Ok(if cert.verdict == Verdict::Inconclusive { 4 } else { 0 })
        }
        Cmd::Cf { value, n } => {
            let x = parse_point(value, Variable::X)?;
            let cf = cf_expand(&x, *n)?;
            let convs = convergents(&cf, &x);
            let side = |s: Approach| match s {
                Approach::Left => "left",
                Approach::Right => "right",
                Approach::Exact => "exact",
            };
            let v = json!({
                "verdict": if cf.complete { "exact" } else { "ok" },
                "a0": cf.a0.to_string(),
                "partial_quotients": cf.partial_quotients.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "convergents": convs.iter().map(|c| json!({
                    "p": c.p.to_string(),
                    "q": c.q.to_string(),
                    "k": c.k,
                    "side": side(c.side),
                    "q_odd": c.q_odd,
                })).collect::<Vec<_>>(),
            });
            emit(&pretty(&v), &cli.out)?;
            Ok(0)
        }
        Cmd::Dim(a) => {
            let poly = sample_curve(0.0, 1.0 / (2.0 * std::f64::consts::PI), a.n, &cfg)?;
            let poly = refine_to_resolution(&poly, a.eps_lo / 4.0, &cfg)?;
            let levels = a.levels.unwrap_or_else(|| default_levels(a.eps_lo, a.eps_hi));
            let d = dimension_estimate(&poly, a.eps_lo, a.eps_hi, levels)?;
            let v = json!({
                "verdict": "ok",
                "slope": d.slope,
                "stderr": d.stderr,
                "points": poly.len(),
                "eps": d.eps,
                "counts": d.counts,
            });
            emit(&pretty(&v), &cli.out)?;
            Ok(0)
        }
    }
}

fn init_threads(flag: Option<usize>) -> Result<(), Failure> {
    let env = match std::env::var("RNDF_THREADS") {
        Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| usage(format!("RNDF_THREADS={:?} is not a count", s)))?),
        Err(_) => None,
    };
    if let Some(n) = env.or(flag) {
        if n == 0 {
            return Err(usage("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure { code: 5, msg: e.to_string() })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = init_threads(cli.threads).and_then(|_| run(cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("rndf: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
