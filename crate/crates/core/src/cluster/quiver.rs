//! Quivers with potential attached to triangulations, and matrix mutation.

use serde::{Deserialize, Serialize};

use super::triangulation::{Arc, Triangulation};

/// A 2-acyclic quiver stored as its skew-symmetric exchange matrix:
/// `eps[i][j] = (#arrows i → j) − (#arrows j → i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub eps: Vec<Vec<i32>>,
}

impl Quiver {
    pub fn zero(size: usize) -> Self {
        Self {
            eps: vec![vec![0; size]; size],
        }
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.eps[i][j] == -self.eps[j][i]))
    }

    /// Arrows `(i, j, multiplicity)` with positive multiplicity.
    pub fn arrows(&self) -> Vec<(usize, usize, i32)> {
        let mut out = Vec::new();
        for (i, row) in self.eps.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e > 0 {
                    out.push((i, j, e));
                }
            }
        }
        out
    }
}

/// The three edges of the triangle `[a, b, c]` (`a < b < c`, hence ccw) in ccw order.
fn ccw_edges(t: &[usize; 3]) -> [Arc; 3] {
    [Arc::new(t[0], t[1]), Arc::new(t[1], t[2]), Arc::new(t[2], t[0])]
}

/// The quiver `Q(T)`: one vertex per arc (in arc order) and, inside every
/// triangle, an arrow from each arc-edge to the arc-edge following it in
/// counterclockwise order. Consecutive edges of a triangle meet at a vertex,
/// and the turn from one to the next about that vertex is clockwise.
pub fn quiver_of(t: &Triangulation) -> Quiver {
    let mut q = Quiver::zero(t.len());
    for tri in t.triangles() {
        let edges = ccw_edges(&tri);
        for e in 0..3 {
            let from = t.index_of(edges[e]);
            let to = t.index_of(edges[(e + 1) % 3]);
            if let (Some(i), Some(j)) = (from, to) {
                q.eps[i][j] += 1;
                q.eps[j][i] -= 1;
            }
        }
    }
    q
}

/// The canonical potential `W(T)` as a list of 3-cycles of arc indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialCycles {
    pub cycles: Vec<[usize; 3]>,
}

/// One oriented 3-cycle per internal triangle, i.e. per triangle all of whose
/// edges are arcs.
pub fn potential_of(t: &Triangulation) -> PotentialCycles {
    let cycles = t
        .triangles()
        .iter()
        .filter_map(|tri| {
            let e = ccw_edges(tri);
            Some([t.index_of(e[0])?, t.index_of(e[1])?, t.index_of(e[2])?])
        })
        .collect();
    PotentialCycles { cycles }
}

/// Quiver mutation at vertex `k` in matrix form.
pub fn mutate_quiver(q: &Quiver, k: usize) -> Quiver {
    let n = q.len();
    let e = &q.eps;
    let mut out = Quiver::zero(n);
    for i in 0..n {
        for j in 0..n {
            out.eps[i][j] = if i == k || j == k {
                -e[i][j]
            } else {
                e[i][j] + e[i][k].signum() * 0.max(e[i][k] * e[k][j])
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_quiver(n: usize) -> Quiver {
        let mut q = Quiver::zero(n);
        for i in 0..n - 1 {
            q.eps[i][i + 1] = 1;
            q.eps[i + 1][i] = -1;
        }
        q
    }

    #[test]
    fn square_has_one_isolated_vertex() {
        let t = Triangulation::from_pairs(4, &[(0, 2)]).unwrap();
        assert_eq!(quiver_of(&t).eps, vec![vec![0]]);
    }

    #[test]
    fn fan_gives_linear_quiver() {
        for m in 4..=9 {
            let t = Triangulation::fan(m, 0).unwrap();
            let q = quiver_of(&t);
            assert!(q.is_skew_symmetric());
            // arcs {0,2}, {0,3}, ...: {0,i+1} -> {0,i}
            for i in 0..q.len() {
                for j in 0..q.len() {
                    let expected = if j + 1 == i {
                        1
                    } else if i + 1 == j {
                        -1
                    } else {
                        0
                    };
                    assert_eq!(q.eps[i][j], expected, "m={m} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn pentagon_zigzag() {
        let t = Triangulation::from_pairs(5, &[(0, 2), (2, 4)]).unwrap();
        let q = quiver_of(&t);
        assert_eq!(q.eps[0][1].abs(), 1);
        assert!(q.is_skew_symmetric());
    }

    #[test]
    fn a2_mutation_reverses() {
        let q = path_quiver(2);
        let m = mutate_quiver(&q, 1);
        assert_eq!(m.arrows(), vec![(1, 0, 1)]);
    }

    #[test]
    fn a3_mutation_at_middle() {
        let q = path_quiver(3);
        let m = mutate_quiver(&q, 1);
        let mut arrows = m.arrows();
        arrows.sort();
        assert_eq!(arrows, vec![(0, 2, 1), (1, 0, 1), (2, 1, 1)]);
        assert_eq!(mutate_quiver(&m, 1), q);
    }

    #[test]
    fn potentials() {
        for t in super::super::triangulation::all_triangulations(5).unwrap() {
            assert!(potential_of(&t).cycles.is_empty());
        }
        let snowflake = Triangulation::from_pairs(6, &[(0, 2), (2, 4), (0, 4)]).unwrap();
        let w = potential_of(&snowflake);
        assert_eq!(w.cycles.len(), 1);
        let q = quiver_of(&snowflake);
        let [a, b, c] = w.cycles[0];
        assert_eq!((q.eps[a][b], q.eps[b][c], q.eps[c][a]), (1, 1, 1));
        assert!(potential_of(&Triangulation::fan(8, 3).unwrap()).cycles.is_empty());
    }

    #[test]
    fn mutation_commutes_with_flip() {
        for m in 3..=7 {
            for t in super::super::triangulation::all_triangulations(m).unwrap() {
                let q = quiver_of(&t);
                for k in 0..t.len() {
                    assert_eq!(mutate_quiver(&q, k), quiver_of(&t.flip_at(k)));
                    assert_eq!(mutate_quiver(&mutate_quiver(&q, k), k), q);
                }
            }
        }
    }
}
