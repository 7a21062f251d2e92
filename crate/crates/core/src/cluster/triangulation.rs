//! Ideal triangulations of a disk with `m` marked points on its boundary.
//!
//! Marked points are labelled `0, …, m−1` counterclockwise. An arc is a chord
//! `{a, b}` with `a < b` that is neither degenerate nor a boundary segment.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest and largest polygon sizes supported by exhaustive enumeration.
pub const MIN_MARKED: usize = 3;
pub const MAX_MARKED: usize = 12;

/// A chord between two marked points, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub a: usize,
    pub b: usize,
}

impl Arc {
    pub fn new(i: usize, j: usize) -> Self {
        Self {
            a: i.min(j),
            b: i.max(j),
        }
    }

    pub fn has_endpoint(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// Whether two chords cross in the interior of the disk.
    pub fn crosses(&self, other: &Arc) -> bool {
        let (a, b, c, d) = (self.a, self.b, other.a, other.b);
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.a, self.b)
    }
}

/// The marked disk `(𝔻, 𝕄)` with `m` boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedDisk {
    pub m: usize,
}

impl MarkedDisk {
    pub fn new(m: usize) -> Result<Self> {
        if m < MIN_MARKED {
            return Err(Error::PreconditionViolation(format!(
                "a marked disk needs at least {MIN_MARKED} points, got {m}"
            )));
        }
        Ok(Self { m })
    }

    pub fn is_boundary_segment(&self, i: usize, j: usize) -> bool {
        is_boundary_segment(self.m, i, j)
    }

    /// The `m` boundary segments `{k, k+1}`.
    pub fn boundary_segments(&self) -> Vec<Arc> {
        (0..self.m).map(|k| Arc::new(k, (k + 1) % self.m)).collect()
    }
}

pub fn is_boundary_segment(m: usize, i: usize, j: usize) -> bool {
    let d = (i + m - j) % m;
    d == 1 || d == m - 1
}

/// A maximal set of pairwise non-crossing arcs.
///
/// Arcs keep the order in which they were supplied; the position of an arc is
/// its vertex index in the quiver and its slot in a cluster chart, and a flip
/// replaces the arc in place.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Triangulation {
    m: usize,
    arcs: Vec<Arc>,
}

impl PartialEq for Triangulation {
    /// Equality as arc sets, ignoring arc order.
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.arc_set() == other.arc_set()
    }
}

impl Eq for Triangulation {}

impl Triangulation {
    pub fn new(m: usize, arcs: Vec<Arc>) -> Result<Self> {
        if m < MIN_MARKED {
            return Err(Error::InvalidTriangulation(format!("need m >= 3, got {m}")));
        }
        for arc in &arcs {
            if arc.b >= m {
                return Err(Error::InvalidTriangulation(format!("arc {arc} has a label >= {m}")));
            }
            if arc.a == arc.b || is_boundary_segment(m, arc.a, arc.b) {
                return Err(Error::InvalidTriangulation(format!(
                    "{arc} is degenerate or a boundary segment"
                )));
            }
        }
        let distinct: BTreeSet<Arc> = arcs.iter().copied().collect();
        if distinct.len() != arcs.len() {
            return Err(Error::InvalidTriangulation("repeated arc".into()));
        }
        for (i, x) in arcs.iter().enumerate() {
            for y in &arcs[i + 1..] {
                if x.crosses(y) {
                    return Err(Error::InvalidTriangulation(format!("arcs {x} and {y} cross")));
                }
            }
        }
        if arcs.len() != m - 3 {
            return Err(Error::InvalidTriangulation(format!(
                "expected {} arcs, got {}",
                m - 3,
                arcs.len()
            )));
        }
        Ok(Self { m, arcs })
    }

    /// Builds a triangulation from label pairs.
    pub fn from_pairs(m: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(m, pairs.iter().map(|&(i, j)| Arc::new(i, j)).collect())
    }

    /// All arcs from `apex` to the non-adjacent vertices, in increasing ccw order.
    pub fn fan(m: usize, apex: usize) -> Result<Self> {
        let arcs = (2..m.saturating_sub(1)).map(|d| Arc::new(apex, (apex + d) % m)).collect();
        Self::new(m, arcs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arc_set(&self) -> BTreeSet<Arc> {
        self.arcs.iter().copied().collect()
    }

    /// Arcs in sorted order, the canonical serialization.
    pub fn sorted_arcs(&self) -> Vec<Arc> {
        self.arc_set().into_iter().collect()
    }

    pub fn index_of(&self, arc: Arc) -> Option<usize> {
        self.arcs.iter().position(|x| *x == arc)
    }

    pub fn contains(&self, arc: Arc) -> bool {
        self.index_of(arc).is_some()
    }

    /// Whether `{i, j}` is an arc or a boundary segment.
    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        i != j && (is_boundary_segment(self.m, i, j) || self.contains(Arc::new(i, j)))
    }

    /// The `m − 2` triangles as increasing label triples, sorted.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(self.m - 2);
        for a in 0..self.m {
            for b in a + 1..self.m {
                if !self.is_edge(a, b) {
                    continue;
                }
                for c in b + 1..self.m {
                    if self.is_edge(b, c) && self.is_edge(a, c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    /// The quadrilateral around arc `k` as `[p1, p2, p3, p4]` in ccw order,
    /// where `{p1, p3}` is the arc with `p1` its smaller label.
    pub fn quadrilateral(&self, k: usize) -> [usize; 4] {
        let Arc { a, b } = self.arcs[k];
        let mut inside = None;
        let mut outside = None;
        for v in 0..self.m {
            if v == a || v == b || !self.is_edge(a, v) || !self.is_edge(b, v) {
                continue;
            }
            if a < v && v < b {
                inside = Some(v);
            } else {
                outside = Some(v);
            }
        }
        [
            a,
            inside.expect("arc has a triangle on its inner side"),
            b,
            outside.expect("arc has a triangle on its outer side"),
        ]
    }

    /// Replaces arc `arc` by the other diagonal of its quadrilateral.
    pub fn flip(&self, arc: Arc) -> Result<Self> {
        let k = self.index_of(arc).ok_or(Error::ArcNotInTriangulation(arc.a, arc.b))?;
        Ok(self.flip_at(k))
    }

    /// Flip of the arc at position `k`; the new arc takes position `k`.
    pub fn flip_at(&self, k: usize) -> Self {
        let [_, p2, _, p4] = self.quadrilateral(k);
        let mut arcs = self.arcs.clone();
        arcs[k] = Arc::new(p2, p4);
        Self { m: self.m, arcs }
    }

    /// Relabels every marked point `v ↦ v + s mod m`.
    pub fn shift_labels(&self, s: usize) -> Self {
        let arcs = self
            .arcs
            .iter()
            .map(|x| Arc::new((x.a + s) % self.m, (x.b + s) % self.m))
            .collect();
        Self { m: self.m, arcs }
    }
}

/// The Catalan number `C_k`.
pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

pub(crate) fn check_size(m: usize) -> Result<()> {
    if (MIN_MARKED..=MAX_MARKED).contains(&m) {
        Ok(())
    } else {
        Err(Error::SizeLimit {
            m,
            min: MIN_MARKED,
            max: MAX_MARKED,
        })
    }
}

/// Every triangulation of the `m`-gon, each with sorted arcs, in lexicographic order.
///
/// Uses the recursion on the apex of the triangle over the segment `{0, m−1}`.
pub fn all_triangulations(m: usize) -> Result<Vec<Triangulation>> {
    check_size(m)?;
    let vertices: Vec<usize> = (0..m).collect();
    let mut out: Vec<Triangulation> = triangulate_chain(&vertices)
        .into_iter()
        .map(|mut arcs| {
            arcs.sort();
            Triangulation { m, arcs }
        })
        .collect();
    out.sort_by(|x, y| x.arcs.cmp(&y.arcs));
    Ok(out)
}

/// Arc sets triangulating the convex polygon on `chain` (first and last joined).
fn triangulate_chain(chain: &[usize]) -> Vec<Vec<Arc>> {
    if chain.len() < 3 {
        return vec![Vec::new()];
    }
    let first = chain[0];
    let last = chain[chain.len() - 1];
    let mut out = Vec::new();
    for apex in 1..chain.len() - 1 {
        let left = triangulate_chain(&chain[..=apex]);
        let right = triangulate_chain(&chain[apex..]);
        for l in &left {
            for r in &right {
                let mut arcs = Vec::with_capacity(l.len() + r.len() + 2);
                arcs.extend_from_slice(l);
                arcs.extend_from_slice(r);
                if apex > 1 {
                    arcs.push(Arc::new(first, chain[apex]));
                }
                if apex < chain.len() - 2 {
                    arcs.push(Arc::new(chain[apex], last));
                }
                out.push(arcs);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_numbers() {
        let expected = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(catalan(k), *e);
        }
    }

    #[test]
    fn counts_match_catalan() {
        for m in 3..=10 {
            let all = all_triangulations(m).unwrap();
            assert_eq!(all.len() as u64, catalan(m - 2), "m = {m}");
            for t in &all {
                Triangulation::new(m, t.arcs().to_vec()).unwrap();
            }
        }
    }

    #[test]
    fn size_limits() {
        assert_eq!(all_triangulations(2).unwrap_err().name(), "SizeLimit");
        assert_eq!(all_triangulations(13).unwrap_err().name(), "SizeLimit");
        assert_eq!(all_triangulations(3).unwrap(), vec![Triangulation::new(3, vec![]).unwrap()]);
    }

    #[test]
    fn square_flip_is_involution() {
        let t = Triangulation::from_pairs(4, &[(0, 2)]).unwrap();
        let f = t.flip(Arc::new(0, 2)).unwrap();
        assert_eq!(f.arcs(), &[Arc::new(1, 3)]);
        assert_eq!(f.flip(Arc::new(1, 3)).unwrap(), t);
        assert_eq!(t.flip(Arc::new(1, 3)).unwrap_err(), Error::ArcNotInTriangulation(1, 3));
    }

    #[test]
    fn pentagon_relation() {
        let start = Triangulation::from_pairs(5, &[(0, 2), (0, 3)]).unwrap();
        let mut t = start.clone();
        let mut seen = vec![t.clone()];
        for step in 0..5 {
            t = t.flip_at(step % 2);
            seen.push(t.clone());
        }
        assert_eq!(t, start);
        let distinct: BTreeSet<Vec<Arc>> = seen[..5].iter().map(|x| x.sorted_arcs()).collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn rejects_invalid_sets() {
        assert!(Triangulation::from_pairs(4, &[(0, 1)]).is_err());
        assert!(Triangulation::from_pairs(5, &[(0, 2), (1, 3)]).is_err());
        assert!(Triangulation::from_pairs(5, &[(0, 2)]).is_err());
        assert!(Triangulation::from_pairs(4, &[(0, 4)]).is_err());
    }

    #[test]
    fn triangles_and_quadrilaterals() {
        let t = Triangulation::from_pairs(6, &[(0, 2), (2, 4), (0, 4)]).unwrap();
        assert_eq!(t.triangles(), vec![[0, 1, 2], [0, 2, 4], [0, 4, 5], [2, 3, 4]]);
        assert_eq!(t.quadrilateral(0), [0, 1, 2, 4]);
        assert_eq!(t.quadrilateral(2), [0, 2, 4, 5]);
    }

    #[test]
    fn fan_shape() {
        let t = Triangulation::fan(6, 0).unwrap();
        assert_eq!(t.arcs(), &[Arc::new(0, 2), Arc::new(0, 3), Arc::new(0, 4)]);
        assert!(Triangulation::fan(3, 1).unwrap().is_empty());
    }
}
