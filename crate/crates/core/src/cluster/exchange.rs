//! The exchange graph of the `m`-gon: triangulations joined by flips.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use super::triangulation::{all_triangulations, Arc, Triangulation};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct ExchangeGraph {
    pub m: usize,
    pub vertices: Vec<Triangulation>,
    /// Undirected edges `(i, j)` with `i < j`, labelled by the flipped arc of vertex `i`.
    pub edges: Vec<(usize, usize, Arc)>,
}

/// Builds the flip graph on all triangulations of the `m`-gon.
pub fn exchange_graph(m: usize) -> Result<ExchangeGraph> {
    let vertices = all_triangulations(m)?;
    let index: BTreeMap<Vec<Arc>, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, t)| (t.sorted_arcs(), i))
        .collect();
    let mut edges = Vec::new();
    for (i, t) in vertices.iter().enumerate() {
        for k in 0..t.len() {
            let j = index[&t.flip_at(k).sorted_arcs()];
            if i < j {
                edges.push((i, j, t.arcs()[k]));
            }
        }
    }
    Ok(ExchangeGraph { m, vertices, edges })
}

impl ExchangeGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &(i, j, _) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn is_regular(&self, degree: usize) -> bool {
        self.degrees().iter().all(|&d| d == degree)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Graphviz DOT text; vertices are labelled by their arc lists.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "graph exchange_{} {{", self.m).unwrap();
        writeln!(out, "  node [shape=box, fontname=\"monospace\"];").unwrap();
        for (i, t) in self.vertices.iter().enumerate() {
            let label: Vec<String> = t.sorted_arcs().iter().map(|a| format!("{}{}", a.a, a.b)).collect();
            writeln!(out, "  t{i} [label=\"{}\"];", label.join(" ")).unwrap();
        }
        for &(i, j, arc) in &self.edges {
            writeln!(out, "  t{i} -- t{j} [label=\"{}{}\"];", arc.a, arc.b).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs() {
        let g4 = exchange_graph(4).unwrap();
        assert_eq!((g4.vertices.len(), g4.edges.len()), (2, 1));
        let g5 = exchange_graph(5).unwrap();
        assert_eq!((g5.vertices.len(), g5.edges.len()), (5, 5));
        assert!(g5.is_regular(2) && g5.is_connected());
        let g6 = exchange_graph(6).unwrap();
        assert_eq!(g6.vertices.len(), 14);
        assert!(g6.is_regular(3) && g6.is_connected());
        assert_eq!(exchange_graph(3).unwrap().edges.len(), 0);
    }

    #[test]
    fn dot_output_lists_every_edge() {
        let dot = exchange_graph(5).unwrap().to_dot();
        assert!(dot.starts_with("graph exchange_5 {"));
        assert_eq!(dot.matches(" -- ").count(), 5);
    }
}
