use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde::Serialize;
use serde_json::Value;

use stokes_cluster::cluster::exchange_graph;
use stokes_cluster::foliation::{classify_with, wkb_from_structure, TraceParams};
use stokes_cluster::main_map::{best_chart, map_report_with, sibuya_map_hbar};
use stokes_cluster::schema::{ChartJson, MapReportJson, PolynomialJson, StructureJson, TupleJson};
use stokes_cluster::stokes::{asymptotic_values_with, StokesParams};
use stokes_cluster::svg::foliation_svg;
use stokes_cluster::verify::{self, Bound, SuiteReport};
use stokes_cluster::{Error, HbarParam64, Polynomial64};

const MAX_N: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "stokes-cluster", version, about = "Stokes data and cluster coordinates of polynomial quadratic differentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace separatrices, classify the foliation and emit JSON (and SVG with --svg).
    Trajectories(Opts),
    /// Asymptotic values of y'' = P y as homogeneous points.
    Stokes(Opts),
    /// Full report for F_hbar(p): tuple, WKB triangulation, chart, wall proximity.
    Chart(Opts),
    /// CSV of chart coordinates over a log-spaced grid of hbar values.
    Sweep(Opts),
    /// Run one or all verification suites.
    Verify(Opts),
    /// Flip graph of triangulations of the (n+3)-gon in DOT.
    ExchangeGraph(Opts),
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Number of free coefficients; the polynomial has degree n + 1.
    #[arg(long)]
    n: Option<usize>,
    /// Coefficients a_0..a_{n-1} as a JSON array of [re, im] pairs.
    #[arg(long)]
    coeffs: Option<String>,
    /// Polynomial or chart report as a JSON file path or inline JSON.
    #[arg(long)]
    input: Option<String>,
    /// Planck constant as "re,im" (a bare real is accepted).
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    /// Seed radius for the subdominant solutions, or escape radius for tracing.
    #[arg(long)]
    radius: Option<f64>,
    /// Local error tolerance of the integrators.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file for JSON, CSV or DOT; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    samples: Option<usize>,
    /// Number of grid points of a sweep.
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Decades spanned by a sweep, downward from --hbar.
    #[arg(long, default_value_t = 2.0)]
    decades: f64,
}

enum Failure {
    Input(String),
    Numerical(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(format!("{}: {e}", e.name()))
        } else {
            Failure::Numerical(e)
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Input(msg.into()))
}

fn parse_complex(s: &str) -> Outcome<Complex<f64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite());
    match parts.as_slice() {
        [re] => num(re).map(|r| Complex::new(r, 0.0)),
        [re, im] => num(re).zip(num(im)).map(|(r, i)| Complex::new(r, i)),
        _ => None,
    }
    .map_or_else(|| input(format!("cannot parse complex number {s:?}; expected \"re,im\"")), Ok)
}

fn parse_json(text: &str, what: &str) -> Outcome<Value> {
    serde_json::from_str(text).or_else(|e| input(format!("malformed JSON in {what}: {e}")))
}

/// The JSON document named by `--input`: a readable file, otherwise inline text.
fn read_input(source: &str) -> Outcome<Value> {
    let path = Path::new(source);
    if !source.trim_start().starts_with(['{', '[']) && path.is_file() {
        let text = fs::read_to_string(path).or_else(|e| input(format!("cannot read {source}: {e}")))?;
        return parse_json(&text, source);
    }
    parse_json(source, "--input")
}

struct Resolved {
    polynomial: Polynomial64,
    hbar: Option<Complex<f64>>,
}

fn check_n(n: usize) -> Outcome<()> {
    if n > MAX_N {
        return input(format!("n = {n} is outside the supported range 0..={MAX_N}"));
    }
    Ok(())
}

fn resolve(opts: &Opts) -> Outcome<Resolved> {
    let (json, hbar) = if let Some(source) = &opts.input {
        let value = read_input(source)?;
        if value.get("polynomial").is_some() {
            let report: MapReportJson =
                serde_json::from_value(value).or_else(|e| input(format!("not a chart report: {e}")))?;
            (report.polynomial, Some(Complex::new(report.hbar[0], report.hbar[1])))
        } else {
            let p: PolynomialJson =
                serde_json::from_value(value).or_else(|e| input(format!("not a polynomial {{\"n\", \"a\"}}: {e}")))?;
            (p, None)
        }
    } else if let Some(text) = &opts.coeffs {
        let a: Vec<[f64; 2]> = serde_json::from_value(parse_json(text, "--coeffs")?)
            .or_else(|e| input(format!("--coeffs must be an array of [re, im] pairs: {e}")))?;
        let n = opts.n.unwrap_or(a.len());
        (PolynomialJson { n, a }, None)
    } else {
        let n = opts.n.unwrap_or(0);
        check_n(n)?;
        let p = Polynomial64::roots_of_unity(n);
        (PolynomialJson::from(&p), None)
    };
    check_n(json.n)?;
    if let Some(n) = opts.n {
        if n != json.n {
            return input(format!("--n {n} disagrees with the polynomial, which has n = {}", json.n));
        }
    }
    Ok(Resolved {
        polynomial: json.to_polynomial()?,
        hbar,
    })
}

fn hbar_of(opts: &Opts, resolved: &Resolved) -> Outcome<HbarParam64> {
    let h = match &opts.hbar {
        Some(s) => parse_complex(s)?,
        None => resolved.hbar.unwrap_or(Complex::new(1.0, 0.0)),
    };
    Ok(HbarParam64::new(h)?)
}

fn stokes_params(opts: &Opts) -> Outcome<StokesParams<f64>> {
    let mut params = StokesParams::default();
    if let Some(r) = opts.radius {
        if !(r > 0.0 && r.is_finite()) {
            return input("--radius must be positive");
        }
        params.radius = Some(r);
    }
    if let Some(t) = opts.tol {
        if !(t > 0.0 && t.is_finite()) {
            return input("--tol must be positive");
        }
        params.tol = t;
    }
    Ok(params)
}

fn emit(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => fs::write(p, text).or_else(|e| input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn trajectories(opts: &Opts) -> Outcome<()> {
    let p = resolve(opts)?.polynomial;
    let mut params = TraceParams::for_polynomial(&p);
    if let Some(r) = opts.radius {
        if !(r > 0.0 && r.is_finite()) {
            return input("--radius must be positive");
        }
        params.escape_radius = r;
    }
    if let Some(t) = opts.tol {
        if !(t > 0.0 && t.is_finite()) {
            return input("--tol must be positive");
        }
        params.rtol = t;
    }
    let structure = classify_with(&p, &params)?;
    let wkb = if structure.saddle_free {
        Some(wkb_from_structure(&p, &structure)?)
    } else {
        None
    };
    if let Some(path) = &opts.svg {
        emit(Some(path), &foliation_svg(&p, &structure, wkb.as_ref()))?;
    }
    emit(opts.out.as_deref(), &json(&StructureJson::new(&p, &structure, wkb.as_ref())))
}

fn stokes(opts: &Opts) -> Outcome<()> {
    let resolved = resolve(opts)?;
    let params = stokes_params(opts)?;
    let p = match (&opts.hbar, resolved.hbar) {
        (None, None) => resolved.polynomial,
        _ => {
            let h = hbar_of(opts, &resolved)?;
            resolved.polynomial.scale_action(h.scaling(resolved.polynomial.n()))?
        }
    };
    let tuple = asymptotic_values_with(&p, &params)?;
    emit(opts.out.as_deref(), &json(&TupleJson::from(&tuple)))
}

fn chart(opts: &Opts) -> Outcome<()> {
    let resolved = resolve(opts)?;
    let h = hbar_of(opts, &resolved)?;
    let report = map_report_with(&resolved.polynomial, &h, &stokes_params(opts)?)?;
    emit(opts.out.as_deref(), &json(&MapReportJson::from(&report)))
}

fn sweep(opts: &Opts) -> Outcome<()> {
    let resolved = resolve(opts)?;
    let top = hbar_of(opts, &resolved)?.value();
    let params = stokes_params(opts)?;
    if opts.points < 2 || !(opts.decades > 0.0 && opts.decades.is_finite()) {
        return input("a sweep needs --points >= 2 and a positive --decades");
    }
    let p = &resolved.polynomial;
    let mut csv = String::from("index,hbar_re,hbar_im,arc_i,arc_j,x_re,x_im,log_abs_x,error\n");
    for k in 0..opts.points {
        let factor = 10f64.powf(-opts.decades * k as f64 / (opts.points - 1) as f64);
        let h = HbarParam64::new(top * factor)?;
        let mut errors = Vec::new();
        let config = sibuya_map_hbar(p, &h).map_err(|e| errors.push(e.name().to_string())).ok();
        let (_, chart) = best_chart(p, &h, config, &params, &mut errors);
        let hv = h.value();
        match chart {
            Some(c) => {
                let dto = ChartJson::from(&c);
                let (hr, hi) = (num(hv.re), num(hv.im));
                for ([i, j], [re, im]) in dto.arcs.iter().zip(&dto.x) {
                    let log = num(Complex::new(*re, *im).norm().ln());
                    let _ = writeln!(csv, "{k},{hr},{hi},{i},{j},{},{},{log},", num(*re), num(*im));
                }
                if dto.arcs.is_empty() {
                    let _ = writeln!(csv, "{k},{hr},{hi},,,,,,");
                }
            }
            None => {
                let name = errors.join(";");
                let _ = writeln!(csv, "{k},{},{},,,,,,{name}", num(hv.re), num(hv.im));
            }
        }
    }
    emit(opts.out.as_deref(), &csv)
}

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e6)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn format_report(r: &SuiteReport) -> String {
    let mut line = format!("{}: {} ({} samples)", r.suite, if r.passed { "PASS" } else { "FAIL" }, r.samples);
    for m in &r.metrics {
        let op = match m.kind {
            Bound::Below => "<",
            Bound::Above => ">",
            Bound::AtLeast => ">=",
        };
        let _ = write!(line, " {}={:.3e} ({op} {:e})", m.name, m.value, m.bound);
    }
    for f in &r.failures {
        let _ = write!(line, "\n  {f}");
    }
    if r.failure_count > r.failures.len() {
        let _ = write!(line, "\n  ... {} more", r.failure_count - r.failures.len());
    }
    line
}

fn run_verify(opts: &Opts) -> Outcome<()> {
    let names: Vec<&str> = if opts.suite == "all" {
        verify::SUITES.to_vec()
    } else {
        vec![opts.suite.as_str()]
    };
    let mut reports = Vec::new();
    for name in names {
        match verify::run_suite(name, opts.samples, opts.seed) {
            Some(r) => reports.push(r),
            None => {
                return input(format!("unknown suite {name:?}; expected all or one of {}", verify::SUITES.join(", ")))
            }
        }
    }
    for r in &reports {
        println!("{}", format_report(r));
    }
    if let Some(path) = &opts.out {
        emit(Some(path), &json(&reports))?;
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn exchange(opts: &Opts) -> Outcome<()> {
    let n = opts.n.unwrap_or(2);
    check_n(n)?;
    let dot = exchange_graph(n + 3)?.to_dot();
    emit(opts.dot.as_deref().or(opts.out.as_deref()), &dot)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Trajectories(o) => trajectories(o),
        Command::Stokes(o) => stokes(o),
        Command::Chart(o) => chart(o),
        Command::Sweep(o) => sweep(o),
        Command::Verify(o) => run_verify(o),
        Command::ExchangeGraph(o) => exchange(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(3)
        }
        Err(Failure::Verification) => {
            eprintln!("error: verification failed");
            ExitCode::from(4)
        }
    }
}
