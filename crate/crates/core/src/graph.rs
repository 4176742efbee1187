//! Simple undirected graphs.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph. Edges are stored as `(min, max)` in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Rejects loops, repeated edges and out-of-range endpoints.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph { vertex_count, edges: Vec::new() };
        let mut seen = std::collections::HashSet::new();
        for (a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge {a}-{b} out of range for {vertex_count} vertices")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at vertex {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("repeated edge {}-{}", e.0, e.1)));
            }
            g.edges.push(e);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// `(neighbour, edge index)` lists, ordered by edge index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        adj
    }

    /// Map from normalized endpoint pair to edge index.
    pub fn edge_index(&self) -> HashMap<(usize, usize), usize> {
        self.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect()
    }

    pub fn is_bipartite(&self) -> bool {
        let adj = self.adjacency();
        let mut colour = vec![None; self.vertex_count];
        for start in 0..self.vertex_count {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let c = colour[v].expect("coloured before queued");
                for &(w, _) in &adj[v] {
                    match colour[w] {
                        None => {
                            colour[w] = Some(!c);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == c => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    pub fn is_triangle_free(&self) -> bool {
        self.triangles().next().is_none()
    }

    /// Triangles as sorted vertex triples, each reported once.
    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let adj = self.adjacency();
        let index = self.edge_index();
        self.edges.iter().flat_map(move |&(a, b)| {
            adj[a]
                .iter()
                .filter(|&&(c, _)| c > b && index.contains_key(&(b, c)))
                .map(|&(c, _)| [a, b, c])
                .collect::<Vec<_>>()
        })
    }

    /// Connected once isolated vertices are ignored.
    pub fn edges_connected(&self) -> bool {
        let Some(&(start, _)) = self.edges.first() else {
            return true;
        };
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !std::mem::replace(&mut seen[w], true) {
                    stack.push(w);
                }
            }
        }
        self.edges.iter().all(|&(a, _)| seen[a])
    }
}

/// A graph with a vertex 3-colouring in which every edge joins two parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteGraph {
    graph: Graph,
    parts: Vec<usize>,
}

impl TripartiteGraph {
    /// `parts[v]` is the part (0, 1 or 2) of vertex `v`.
    pub fn new(graph: Graph, parts: Vec<usize>) -> Result<Self> {
        if parts.len() != graph.vertex_count() {
            return Err(Error::InvalidGraph(format!(
                "{} part labels for {} vertices",
                parts.len(),
                graph.vertex_count()
            )));
        }
        if let Some(v) = parts.iter().position(|&p| p > 2) {
            return Err(Error::InvalidGraph(format!("vertex {v} has part {} (expected 0, 1 or 2)", parts[v])));
        }
        if let Some(&(a, b)) = graph.edges().iter().find(|&&(a, b)| parts[a] == parts[b]) {
            return Err(Error::InvalidGraph(format!("edge {a}-{b} lies inside part {}", parts[a])));
        }
        Ok(TripartiteGraph { graph, parts })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The two parts an edge joins, smaller first.
    pub fn edge_parts(&self, edge: usize) -> (usize, usize) {
        let (a, b) = self.graph.edges()[edge];
        let (p, q) = (self.parts[a], self.parts[b]);
        (p.min(q), p.max(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn simple_graph_validation() {
        assert!(Graph::new(2, [(0, 0)]).is_err());
        assert!(Graph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
        assert_eq!(Graph::new(3, [(2, 0)]).unwrap().edges(), &[(0, 2)]);
    }

    #[test]
    fn structure_checks() {
        assert!(!k3().is_bipartite());
        assert!(!k3().is_triangle_free());
        assert_eq!(k3().triangles().collect::<Vec<_>>(), vec![[0, 1, 2]]);
        let c4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(c4.is_bipartite() && c4.is_triangle_free());
        let c5 = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(!c5.is_bipartite() && c5.is_triangle_free());
        assert!(c5.edges_connected());
        let split = Graph::new(5, [(0, 1), (2, 3)]).unwrap();
        assert!(!split.edges_connected());
        assert!(Graph::new(4, [(0, 1), (1, 2)]).unwrap().edges_connected());
    }

    #[test]
    fn tripartite_validation() {
        assert!(TripartiteGraph::new(k3(), vec![0, 1, 2]).is_ok());
        assert!(TripartiteGraph::new(k3(), vec![0, 1, 1]).is_err());
        assert!(TripartiteGraph::new(k3(), vec![0, 1]).is_err());
        assert!(TripartiteGraph::new(k3(), vec![0, 1, 3]).is_err());
        assert_eq!(TripartiteGraph::new(k3(), vec![2, 0, 1]).unwrap().edge_parts(0), (0, 2));
    }
}
