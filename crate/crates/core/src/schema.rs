//! JSON documents for every artifact.
//!
//! Complex numbers are `[re, im]`, points of `ℂP¹` are homogeneous
//! `[u_re, u_im, v_re, v_im]`, arcs are `[i, j]` with `i < j`. Non-finite
//! reals serialize as `null`.

use serde::{Deserialize, Serialize};

use crate::cluster::coords::ClusterChart;
use crate::cluster::triangulation::Triangulation;
use crate::error::{Error, Result};
use crate::foliation::{Terminus, Trajectory, TrajectoryStructure};
use crate::main_map::{HbarParam, MapReport};
use crate::polynomial::{Period, Polynomial, RootSet};
use crate::projective::ProjPoint;
use crate::scalar::{from_pair, to_pair, Real};
use crate::stokes::AsymptoticTuple;

pub type Pair = [f64; 2];

fn pairs<T: Real>(zs: &[num_complex::Complex<T>]) -> Vec<Pair> {
    zs.iter().map(|&z| to_pair(z)).collect()
}

/// `{"n": 2, "a": [[a0_re, a0_im], [a1_re, a1_im]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub n: usize,
    pub a: Vec<Pair>,
}

impl PolynomialJson {
    pub fn to_polynomial<T: Real>(&self) -> Result<Polynomial<T>> {
        if self.a.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::PreconditionViolation("coefficients must be finite".into()));
        }
        Polynomial::from_coefficients(self.n, self.a.iter().map(|&p| from_pair(p)).collect())
    }
}

impl<T: Real> From<&Polynomial<T>> for PolynomialJson {
    fn from(p: &Polynomial<T>) -> Self {
        Self {
            n: p.n(),
            a: pairs(p.coefficients()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsJson {
    pub roots: Vec<Pair>,
    pub sep: Option<f64>,
}

impl<T: Real> From<&RootSet<T>> for RootsJson {
    fn from(r: &RootSet<T>) -> Self {
        let sep = r.sep.to_f64_lossy();
        Self {
            roots: pairs(&r.roots),
            sep: sep.is_finite().then_some(sep),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodJson {
    pub from: usize,
    pub to: usize,
    pub value: Pair,
    pub path: Vec<Pair>,
}

impl<T: Real> From<&Period<T>> for PeriodJson {
    fn from(p: &Period<T>) -> Self {
        Self {
            from: p.from_zero,
            to: p.to_zero,
            value: to_pair(p.value),
            path: pairs(&p.path),
        }
    }
}

/// Sorted arc list of a triangulation together with the polygon size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub m: usize,
    pub arcs: Vec<[usize; 2]>,
}

impl From<&Triangulation> for TriangulationJson {
    fn from(t: &Triangulation) -> Self {
        Self {
            m: t.m(),
            arcs: t.sorted_arcs().iter().map(|a| [a.a, a.b]).collect(),
        }
    }
}

impl TriangulationJson {
    pub fn to_triangulation(&self) -> Result<Triangulation> {
        let pairs: Vec<(usize, usize)> = self.arcs.iter().map(|&[i, j]| (i, j)).collect();
        Triangulation::from_pairs(self.m, &pairs)
    }
}

/// `{"m": 5, "arcs": [[i, j], ...], "X": [[re, im], ...]}` with `X` aligned to the sorted arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartJson {
    pub m: usize,
    pub arcs: Vec<[usize; 2]>,
    #[serde(rename = "X")]
    pub x: Vec<Pair>,
}

impl<T: Real> From<&ClusterChart<T>> for ChartJson {
    fn from(c: &ClusterChart<T>) -> Self {
        let t = &c.triangulation;
        let sorted = t.sorted_arcs();
        Self {
            m: t.m(),
            arcs: sorted.iter().map(|a| [a.a, a.b]).collect(),
            x: sorted
                .iter()
                .map(|&a| to_pair(c.get(a).expect("arc of the chart")))
                .collect(),
        }
    }
}

impl ChartJson {
    pub fn to_chart<T: Real>(&self) -> Result<ClusterChart<T>> {
        let t = TriangulationJson {
            m: self.m,
            arcs: self.arcs.clone(),
        }
        .to_triangulation()?;
        if self.x.len() != self.arcs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.arcs.len(),
                got: self.x.len(),
            });
        }
        let x = t
            .arcs()
            .iter()
            .map(|arc| {
                let i = self.arcs.iter().position(|&[a, b]| a == arc.a && b == arc.b).expect("same arc set");
                from_pair(self.x[i])
            })
            .collect();
        ClusterChart::new(t, x)
    }
}

pub fn point_json<T: Real>(p: &ProjPoint<T>) -> [f64; 4] {
    let [ur, ui] = to_pair(p.u);
    let [vr, vi] = to_pair(p.v);
    [ur, ui, vr, vi]
}

/// `{"w": [[u_re, u_im, v_re, v_im], ...], "method": "wronskian", "normalized": false}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleJson {
    pub w: Vec<[f64; 4]>,
    pub method: String,
    pub normalized: bool,
}

impl<T: Real> From<&AsymptoticTuple<T>> for TupleJson {
    fn from(t: &AsymptoticTuple<T>) -> Self {
        Self {
            w: t.w.iter().map(point_json).collect(),
            method: t.method.as_str().to_string(),
            normalized: t.normalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum TerminusJson {
    StokesDirection(usize),
    Zero(usize),
    Truncated,
}

impl From<Terminus> for TerminusJson {
    fn from(t: Terminus) -> Self {
        match t {
            Terminus::StokesDirection(k) => Self::StokesDirection(k),
            Terminus::Zero(i) => Self::Zero(i),
            Terminus::Truncated => Self::Truncated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub origin: Option<usize>,
    pub terminus: TerminusJson,
    pub w_length: f64,
    pub horizontality_defect: f64,
    pub points: Vec<Pair>,
}

impl<T: Real> From<&Trajectory<T>> for TrajectoryJson {
    fn from(t: &Trajectory<T>) -> Self {
        Self {
            origin: t.origin,
            terminus: t.terminus.into(),
            w_length: t.w_length.to_f64_lossy(),
            horizontality_defect: t.horizontality_defect.to_f64_lossy(),
            points: pairs(&t.points),
        }
    }
}

/// Separatrices grouped by zero, saddle connections, and the WKB triangulation when saddle-free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureJson {
    pub polynomial: PolynomialJson,
    pub roots: RootsJson,
    pub separatrices: Vec<Vec<TrajectoryJson>>,
    pub launch_angles: Vec<[f64; 3]>,
    pub saddles: Vec<[usize; 2]>,
    pub saddle_free: bool,
    pub zero_fan: Vec<Option<[usize; 3]>>,
    pub wkb_triangulation: Option<TriangulationJson>,
}

impl StructureJson {
    pub fn new<T: Real>(p: &Polynomial<T>, s: &TrajectoryStructure<T>, wkb: Option<&Triangulation>) -> Self {
        Self {
            polynomial: p.into(),
            roots: p.roots().into(),
            separatrices: s.separatrices.iter().map(|tr| tr.iter().map(Into::into).collect()).collect(),
            launch_angles: s.launch_angles.iter().map(|a| a.map(|x| x.to_f64_lossy())).collect(),
            saddles: s.saddles.iter().map(|sd| [sd.from, sd.to]).collect(),
            saddle_free: s.saddle_free,
            zero_fan: s.zero_fan.clone(),
            wkb_triangulation: wkb.map(Into::into),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapReportJson {
    pub polynomial: PolynomialJson,
    pub hbar: Pair,
    pub tuple: Option<TupleJson>,
    pub wkb_triangulation: Option<TriangulationJson>,
    pub chart: Option<ChartJson>,
    pub wall_proximity: Option<f64>,
    pub jacobian_condition: Option<f64>,
    pub errors: Vec<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl<T: Real> From<&MapReport<T>> for MapReportJson {
    fn from(r: &MapReport<T>) -> Self {
        Self {
            polynomial: (&r.polynomial).into(),
            hbar: to_pair(r.hbar.value()),
            tuple: r.tuple.as_ref().map(Into::into),
            wkb_triangulation: r.wkb_triangulation.as_ref().map(Into::into),
            chart: r.chart.as_ref().map(Into::into),
            wall_proximity: finite(r.wall_proximity.to_f64_lossy()),
            jacobian_condition: r.jacobian_condition.and_then(finite),
            errors: r.errors.clone(),
        }
    }
}

impl MapReportJson {
    /// The inputs `(p, ħ)` the report was made from.
    pub fn inputs<T: Real>(&self) -> Result<(Polynomial<T>, HbarParam<T>)> {
        Ok((self.polynomial.to_polynomial()?, HbarParam::new(from_pair(self.hbar))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::coords::chart_coords;
    use crate::main_map::sibuya_map;

    #[test]
    fn polynomial_round_trip() {
        let json = PolynomialJson {
            n: 2,
            a: vec![[0.5, -0.25], [0.0, 1.0]],
        };
        let p: Polynomial<f64> = json.to_polynomial().unwrap();
        assert_eq!(PolynomialJson::from(&p), json);
    }

    #[test]
    fn chart_keeps_arc_alignment() {
        let p: Polynomial<f64> = PolynomialJson {
            n: 3,
            a: vec![[0.2, 0.1], [-0.4, 0.3], [0.1, -0.6]],
        }
        .to_polynomial()
        .unwrap();
        let t = Triangulation::from_pairs(6, &[(3, 5), (0, 2), (0, 3)]).unwrap();
        let chart = chart_coords(&sibuya_map(&p).unwrap(), &t).unwrap();
        let json = ChartJson::from(&chart);
        assert_eq!(json.arcs, vec![[0, 2], [0, 3], [3, 5]]);
        let back: ClusterChart<f64> = json.to_chart().unwrap();
        for arc in t.arcs() {
            assert_eq!(back.get(*arc), chart.get(*arc));
        }
    }

    #[test]
    fn infinity_is_homogeneous() {
        assert_eq!(point_json(&ProjPoint::<f64>::infinity()), [1.0, 0.0, 0.0, 0.0]);
    }
}
