//! Property suites over seeded random samples.
//!
//! Every suite returns a [`SuiteReport`] with one [`Metric`] per measured
//! quantity and the failures it met. Bounds are fixed here; the sample
//! counts and the seed come from the caller.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::coords::{chart_coords, is_generic, mutate_coords, reconstruct, Configuration, PROJ_TOL};
use crate::cluster::exchange::exchange_graph;
use crate::cluster::quiver::{mutate_quiver, quiver_of};
use crate::cluster::triangulation::{all_triangulations, catalan, is_boundary_segment, Arc, Triangulation};
use crate::error::Error;
use crate::foliation::{classify, wkb_from_structure, TrajectoryStructure};
use crate::main_map::{chamber_search, flip_coherence_of, jacobian_in, sibuya_map, EPSILON_FLOOR, LOG_BOUND, RICHARDSON_DRIFT};
use crate::polynomial::Polynomial;
use crate::projective::Mobius;
use crate::sampling::{random_chart, random_configuration, random_polynomial, random_saddle_free, random_triangulation};
use crate::stokes::{asymptotic_values, asymptotic_values_direct, normalize_tuple};

pub const TWO_METHOD_TOL: f64 = 1e-6;
pub const SIBUYA_MARGIN: f64 = 1e-7;
pub const FLIP_TOL: f64 = 1e-8;
pub const EQUIVARIANCE_TOL: f64 = 1e-7;
pub const SINGULAR_FLOOR: f64 = 1e-8;
pub const WALL_WINDOW: f64 = 1e-3;
pub const CHART_ROUND_TRIP_TOL: f64 = 1e-10;
pub const CONFIG_ROUND_TRIP_TOL: f64 = 1e-9;
pub const DEFECT_TOL: f64 = 1e-6;

/// Failures kept verbatim in a report; the rest are only counted.
const MAX_LISTED: usize = 20;

/// How a metric is compared with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value < bound`.
    Below,
    /// `value > bound`.
    Above,
    /// `value >= bound`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub kind: Bound,
    pub passed: bool,
}

impl Metric {
    fn new(name: &str, value: f64, kind: Bound, bound: f64) -> Self {
        let passed = match kind {
            Bound::Below => value < bound,
            Bound::Above => value > bound,
            Bound::AtLeast => value >= bound,
        };
        Self {
            name: name.to_string(),
            value,
            bound,
            kind,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub samples: usize,
    pub metrics: Vec<Metric>,
    pub failure_count: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Default)]
struct Collector {
    samples: usize,
    failures: Vec<String>,
    failure_count: usize,
}

impl Collector {
    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(msg);
        }
    }

    fn finish(self, suite: &str, metrics: Vec<Metric>) -> SuiteReport {
        let passed = self.failure_count == 0 && metrics.iter().all(|m| m.passed);
        SuiteReport {
            suite: suite.to_string(),
            samples: self.samples,
            metrics,
            failure_count: self.failure_count,
            failures: self.failures,
            passed,
        }
    }
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 10] = [
    "two-method",
    "flip-coherence",
    "chamber",
    "equivariance",
    "jacobian",
    "wall",
    "combinatorics",
    "round-trip",
    "trajectories",
    "pentagon",
];

/// Runs a suite by name with `samples` draws per degree (or grid points for
/// `wall`); `None` uses the suite's default.
pub fn run_suite(name: &str, samples: Option<usize>, seed: u64) -> Option<SuiteReport> {
    let report = match name {
        "two-method" | "genericity" => two_method(samples.unwrap_or(50), seed),
        "flip-coherence" => flip_coherence(samples.unwrap_or(200), seed),
        "pentagon" => pentagon_period(samples.unwrap_or(5), seed),
        "chamber" => chamber(samples.unwrap_or(10), seed),
        "equivariance" => equivariance(samples.unwrap_or(20), seed),
        "jacobian" => jacobian(samples.unwrap_or(20), seed),
        "wall" => wall(samples.unwrap_or(2000)),
        "combinatorics" => combinatorics(),
        "round-trip" => round_trip(samples.unwrap_or(100), seed),
        "trajectories" => trajectories(samples.unwrap_or(10), seed, 2000),
        _ => return None,
    };
    Some(report)
}

/// Wronskian against direct integration after normalization, and the
/// Sibuya margins of the normalized Wronskian tuple, for `n = 0..=3`.
pub fn two_method(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::default();
    let mut worst = 0.0f64;
    let mut margin = f64::INFINITY;
    for n in 0..=3 {
        for _ in 0..samples {
            let p = random_polynomial(&mut rng, n);
            c.samples += 1;
            let a = asymptotic_values(&p).and_then(|t| normalize_tuple(&t));
            let b = asymptotic_values_direct(&p).and_then(|t| normalize_tuple(&t));
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    worst = worst.max(a.max_distance(&b));
                    margin = margin.min(a.configuration().sibuya_margin());
                }
                (Err(e), _) | (_, Err(e)) => c.fail(format!("n={n} {:?}: {}: {e}", p.coefficients(), e.name())),
            }
        }
    }
    c.finish(
        "two-method",
        vec![
            Metric::new("max_spherical_distance", worst, Bound::Below, TWO_METHOD_TOL),
            Metric::new("min_sibuya_margin", margin, Bound::Above, SIBUYA_MARGIN),
        ],
    )
}

/// Both paths around a flip, on random `(p, T, k)` with `n ∈ {1, 2, 3}`.
/// Triangulations for which `F(p)` is not generic are redrawn.
pub fn flip_coherence(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::default();
    let mut worst = 0.0f64;
    for i in 0..samples {
        let n = 1 + i % 3;
        let p = random_polynomial(&mut rng, n);
        let config = match sibuya_map(&p) {
            Ok(cfg) => cfg,
            Err(e) => {
                c.fail(format!("n={n}: {}: {e}", e.name()));
                continue;
            }
        };
        let mut done = false;
        for _ in 0..100 {
            let t = random_triangulation(&mut rng, n + 3).expect("supported size");
            let k = rng.gen_range(0..t.len());
            if !is_generic(&config, &t, PROJ_TOL) || !is_generic(&config, &t.flip_at(k), PROJ_TOL) {
                continue;
            }
            match flip_coherence_of(&config, &t, k) {
                Ok(e) => worst = worst.max(e),
                Err(Error::TransitionPole) => continue,
                Err(e) => c.fail(format!("n={n}: {}: {e}", e.name())),
            }
            c.samples += 1;
            done = true;
            break;
        }
        if !done {
            c.fail(format!("n={n}: no generic (T, k) found"));
        }
    }
    c.finish(
        "flip-coherence",
        vec![Metric::new("max_relative_discrepancy", worst, Bound::Below, FLIP_TOL)],
    )
}

/// Five flips around the pentagon, always at the older arc, return the
/// starting chart.
pub fn pentagon_period(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::default();
    let mut worst = 0.0f64;
    let start = Triangulation::fan(5, 0).expect("pentagon fan");
    for _ in 0..samples {
        let p = random_polynomial(&mut rng, 2);
        c.samples += 1;
        let result = sibuya_map(&p).and_then(|cfg| {
            let initial = chart_coords(&cfg, &start)?;
            let mut chart = initial.clone();
            let mut newest: Option<Arc> = None;
            for _ in 0..5 {
                let k = (0..chart.x.len())
                    .find(|&k| Some(chart.triangulation.arcs()[k]) != newest)
                    .expect("two arcs");
                chart = mutate_coords(&chart, k)?;
                newest = Some(chart.triangulation.arcs()[k]);
            }
            if chart.triangulation != initial.triangulation {
                return Err(Error::PreconditionViolation("five flips did not close up".into()));
            }
            Ok(chart.max_relative_error(&initial))
        });
        match result {
            Ok(e) => worst = worst.max(e),
            Err(e) => c.fail(format!("{}: {e}", e.name())),
        }
    }
    c.finish(
        "pentagon",
        vec![Metric::new("max_relative_discrepancy", worst, Bound::Below, FLIP_TOL)],
    )
}

/// The polynomials examined by the small-`ħ` search: `z² − 1`, `z³ − z`, then
/// `samples` random saddle-free polynomials for each `n ∈ {1, 2, 3}`.
pub fn chamber_samples(samples: usize, seed: u64) -> Vec<(String, Polynomial<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let real = |n: usize, a: &[f64]| {
        Polynomial::from_coefficients(n, a.iter().map(|&x| Complex::new(x, 0.0)).collect()).expect("simple roots")
    };
    let mut out = vec![
        ("z^2-1".to_string(), real(1, &[-1.0])),
        ("z^3-z".to_string(), real(2, &[0.0, -1.0])),
    ];
    for n in 1..=3 {
        for i in 0..samples {
            match random_saddle_free(&mut rng, n) {
                Ok((p, _, _)) => out.push((format!("n={n}#{i}"), p)),
                Err(_) => out.push((format!("n={n}#{i}"), random_polynomial(&mut rng, n))),
            }
        }
    }
    out
}

pub fn chamber(samples: usize, seed: u64) -> SuiteReport {
    let mut c = Collector::default();
    let mut min_eps = f64::INFINITY;
    let mut max_log = 0.0f64;
    for (label, p) in chamber_samples(samples, seed) {
        c.samples += 1;
        match chamber_search(&p) {
            Ok(r) => {
                min_eps = min_eps.min(r.epsilon);
                max_log = max_log.max(r.max_abs_log);
            }
            Err(e) => c.fail(format!("{label}: {}: {e}", e.name())),
        }
    }
    c.finish(
        "chamber",
        vec![
            Metric::new("min_epsilon", min_eps, Bound::AtLeast, EPSILON_FLOOR),
            Metric::new("max_abs_log_x", max_log, Bound::Below, LOG_BOUND),
        ],
    )
}

/// `normalize(F(rotate(p)))` against `normalize(shift(F(p)))` for `n = 0..=3`.
pub fn equivariance(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::default();
    let mut worst = 0.0f64;
    for n in 0..=3 {
        for _ in 0..samples {
            let p = random_polynomial(&mut rng, n);
            c.samples += 1;
            let rotated = asymptotic_values(&p.rotate_framing()).and_then(|t| normalize_tuple(&t));
            let shifted = asymptotic_values(&p).and_then(|t| normalize_tuple(&t.shift()));
            match (rotated, shifted) {
                (Ok(a), Ok(b)) => worst = worst.max(a.max_distance(&b)),
                (Err(e), _) | (_, Err(e)) => c.fail(format!("n={n}: {}: {e}", e.name())),
            }
        }
    }
    c.finish(
        "equivariance",
        vec![Metric::new("max_spherical_distance", worst, Bound::Below, EQUIVARIANCE_TOL)],
    )
}

/// Finite-difference Jacobian in the WKB chart at saddle-free points, `n ∈ {1, 2, 3}`.
pub fn jacobian(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::default();
    let mut smallest = f64::INFINITY;
    let mut drift = 0.0f64;
    for n in 1..=3 {
        for _ in 0..samples {
            c.samples += 1;
            let result = random_saddle_free(&mut rng, n).and_then(|(p, _, t)| jacobian_in(&p, &t));
            match result {
                Ok(j) => {
                    smallest = smallest.min(j.smallest_singular_value());
                    drift = drift.max(j.drift);
                }
                Err(e) => c.fail(format!("n={n}: {}: {e}", e.name())),
            }
        }
    }
    c.finish(
        "jacobian",
        vec![
            Metric::new("min_singular_value", smallest, Bound::Above, SINGULAR_FLOOR),
            Metric::new("max_richardson_drift", drift, Bound::Below, RICHARDSON_DRIFT),
        ],
    )
}

/// `z² − e^{iθ}` on the grid `θ_k = 2πk/grid`.
pub fn wall_family(grid: usize) -> Vec<(f64, Polynomial<f64>)> {
    (0..grid)
        .map(|k| {
            let theta = TAU * k as f64 / grid as f64;
            let c = Complex::from_polar(1.0, theta);
            (theta, Polynomial::from_coefficients(1, vec![-c]).expect("roots ±√c are simple"))
        })
        .collect()
}

fn wall_distance(theta: f64) -> f64 {
    (theta - FRAC_PI_2).abs().min((theta - 3.0 * FRAC_PI_2).abs())
}

/// Saddle-free status of `z² − e^{iθ}` may only fail within `10⁻³` of
/// `θ = ±π/2`, and grid points on the wall must report a saddle.
pub fn wall(grid: usize) -> SuiteReport {
    let mut c = Collector::default();
    let mut farthest = 0.0f64;
    for (theta, p) in wall_family(grid) {
        c.samples += 1;
        let saddle_free = match classify(&p) {
            Ok(s) => s.saddle_free,
            Err(_) => false,
        };
        let distance = wall_distance(theta);
        if !saddle_free {
            farthest = farthest.max(distance);
        }
        if distance < 1e-12 && saddle_free {
            c.fail(format!("theta={theta}: on the wall but classified saddle-free"));
        }
    }
    c.finish(
        "wall",
        vec![Metric::new("max_wall_distance_of_saddle", farthest, Bound::Below, WALL_WINDOW)],
    )
}

/// Catalan counts, regularity and connectivity of the exchange graph, and
/// quiver mutation against flips, all exact.
pub fn combinatorics() -> SuiteReport {
    let mut c = Collector::default();
    for m in 4..=8 {
        c.samples += 1;
        let graph = match exchange_graph(m) {
            Ok(g) => g,
            Err(e) => {
                c.fail(format!("m={m}: {e}"));
                continue;
            }
        };
        let expected = catalan(m - 2) as usize;
        if graph.vertices.len() != expected {
            c.fail(format!("m={m}: {} triangulations, expected {expected}", graph.vertices.len()));
        }
        if !graph.is_regular(m - 3) {
            c.fail(format!("m={m}: exchange graph is not {}-regular", m - 3));
        }
        if !graph.is_connected() {
            c.fail(format!("m={m}: exchange graph is disconnected"));
        }
    }
    for m in 3..=7 {
        for t in all_triangulations(m).expect("supported size") {
            let q = quiver_of(&t);
            for k in 0..t.len() {
                c.samples += 1;
                if mutate_quiver(&q, k) != quiver_of(&t.flip_at(k)) {
                    c.fail(format!("m={m}: mutation at {} disagrees with the flip", t.arcs()[k]));
                }
            }
        }
    }
    let mismatches = c.failure_count as f64;
    c.finish("combinatorics", vec![Metric::new("mismatches", mismatches, Bound::Below, 0.5)])
}

/// `chart ∘ reconstruct` on random charts and `reconstruct ∘ chart` on random
/// configurations normalized like the reconstruction, for `n = 0..=4`.
pub fn round_trip(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::default();
    let mut chart_err = 0.0f64;
    let mut config_err = 0.0f64;
    for n in 0..=4 {
        let m = n + 3;
        for _ in 0..samples {
            c.samples += 1;
            let chart = random_chart(&mut rng, m).expect("supported size");
            match chart_coords(&reconstruct(&chart), &chart.triangulation) {
                Ok(back) => chart_err = chart_err.max(back.max_relative_error(&chart)),
                Err(e) => c.fail(format!("m={m}: {}: {e}", e.name())),
            }

            let t = random_triangulation(&mut rng, m).expect("supported size");
            let raw = random_configuration(&mut rng, m);
            match normalize_like_reconstruct(&raw, &t) {
                Some(config) if is_generic(&config, &t, 1e-6) => match chart_coords(&config, &t) {
                    Ok(x) => config_err = config_err.max(reconstruct(&x).max_distance(&config)),
                    Err(e) => c.fail(format!("m={m}: {}: {e}", e.name())),
                },
                _ => {}
            }
        }
    }
    c.finish(
        "round-trip",
        vec![
            Metric::new("chart_relative_error", chart_err, Bound::Below, CHART_ROUND_TRIP_TOL),
            Metric::new("configuration_distance", config_err, Bound::Below, CONFIG_ROUND_TRIP_TOL),
        ],
    )
}

/// The configuration moved so that points `0, 1` and the third vertex of the
/// triangle on the segment `{0, 1}` sit at `0, 1, ∞`.
fn normalize_like_reconstruct(c: &Configuration<f64>, t: &Triangulation) -> Option<Configuration<f64>> {
    let tri = t.triangles().into_iter().find(|tri| tri.contains(&0) && tri.contains(&1))?;
    let apex = tri.into_iter().find(|&v| v > 1)?;
    let g = Mobius::to_standard_triple(&c.points[0], &c.points[1], &c.points[apex], 1e-6)?;
    let mut out = c.transform(&g);
    out.points[0] = crate::projective::ProjPoint::zero();
    out.points[1] = crate::projective::ProjPoint::one();
    out.points[apex] = crate::projective::ProjPoint::infinity();
    Some(out)
}

/// Structural check of a WKB triangulation written against the definition:
/// `n` pairwise non-crossing interior chords whose triangles cover every
/// boundary segment once and every arc twice.
pub fn validate_triangulation(t: &Triangulation, n: usize) -> Result<(), String> {
    let m = t.m();
    if t.len() != n || m != n + 3 {
        return Err(format!("{} arcs on a {m}-gon, expected {n}", t.len()));
    }
    let arcs = t.arcs();
    for (i, x) in arcs.iter().enumerate() {
        if is_boundary_segment(m, x.a, x.b) || x.a == x.b {
            return Err(format!("{x} is not an interior chord"));
        }
        if let Some(y) = arcs[i + 1..].iter().find(|y| x.crosses(y)) {
            return Err(format!("{x} crosses {y}"));
        }
    }
    let triangles = t.triangles();
    if triangles.len() != n + 1 {
        return Err(format!("{} triangles, expected {}", triangles.len(), n + 1));
    }
    let mut uses = std::collections::BTreeMap::<Arc, usize>::new();
    for tri in &triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
            *uses.entry(Arc::new(a, b)).or_default() += 1;
        }
    }
    for k in 0..m {
        let seg = Arc::new(k, (k + 1) % m);
        if uses.get(&seg) != Some(&1) {
            return Err(format!("boundary segment {seg} is covered {:?} times", uses.get(&seg)));
        }
    }
    for a in arcs {
        if uses.get(a) != Some(&2) {
            return Err(format!("arc {a} is covered {:?} times", uses.get(a)));
        }
    }
    Ok(())
}

fn check_structure(label: &str, p: &Polynomial<f64>, s: &TrajectoryStructure<f64>, c: &mut Collector, worst: &mut f64) {
    for tr in s.trajectories() {
        c.samples += 1;
        let ratio = tr.horizontality_defect / tr.w_length.max(f64::MIN_POSITIVE);
        *worst = worst.max(ratio);
    }
    if s.saddle_free {
        match wkb_from_structure(p, s) {
            Ok(t) => {
                if let Err(msg) = validate_triangulation(&t, p.n()) {
                    c.fail(format!("{label}: {msg}"));
                }
            }
            Err(e) => c.fail(format!("{label}: {}: {e}", e.name())),
        }
    }
}

/// Horizontality of every separatrix and validity of every WKB triangulation
/// over the samples of the `chamber` and `wall` suites.
pub fn trajectories(samples: usize, seed: u64, grid: usize) -> SuiteReport {
    let mut c = Collector::default();
    let mut worst = 0.0f64;
    let wall_samples = wall_family(grid).into_iter().map(|(theta, p)| (format!("theta={theta}"), p));
    for (label, p) in chamber_samples(samples, seed).into_iter().chain(wall_samples) {
        match classify(&p) {
            Ok(s) => check_structure(&label, &p, &s, &mut c, &mut worst),
            Err(Error::AmbiguousStructure(_)) if wall_distance_of(&p) < WALL_WINDOW => {}
            Err(e) => c.fail(format!("{label}: {}: {e}", e.name())),
        }
    }
    c.finish(
        "trajectories",
        vec![Metric::new("max_relative_defect", worst, Bound::Below, DEFECT_TOL)],
    )
}

fn wall_distance_of(p: &Polynomial<f64>) -> f64 {
    let c = -p.coefficients()[0];
    if p.n() != 1 || (c.norm() - 1.0).abs() > 1e-12 {
        return f64::INFINITY;
    }
    wall_distance(c.arg().rem_euclid(TAU))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validator_rejects_bad_triangulations() {
        let t = Triangulation::fan(6, 0).unwrap();
        assert!(validate_triangulation(&t, 3).is_ok());
        assert!(validate_triangulation(&t, 2).is_err());
    }

    #[test]
    fn small_suites_pass() {
        for report in [two_method(2, 1), flip_coherence(6, 1), pentagon_period(1, 1), round_trip(3, 1)] {
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", None, 0).is_none());
    }
}
