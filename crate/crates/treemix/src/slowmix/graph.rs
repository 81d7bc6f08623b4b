//! Host graphs and their edge subdivision.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HostGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl HostGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(invalid("graph", format!("edge ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid("graph", format!("loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(invalid("graph", format!("multi-edge ({u},{v})")));
            }
        }
        Ok(HostGraph { n, edges })
    }

    /// Whitespace edge list with a leading `n m` header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("graph file: `{t}` is not a vertex id")))
        });
        let mut next = |what: &str| {
            nums.next()
                .unwrap_or_else(|| Err(Error::Parse(format!("graph file: missing {what}"))))
        };
        let n = next("n")?;
        let m = next("m")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            edges.push((next("edge endpoint")?, next("edge endpoint")?));
        }
        if nums.next().is_some() {
            return Err(Error::Parse(format!("graph file: more than the {m} declared edges")));
        }
        HostGraph::new(n, edges)
    }

    pub fn single_edge() -> Self {
        HostGraph { n: 2, edges: vec![(0, 1)] }
    }

    pub fn path(m: usize) -> Self {
        HostGraph {
            n: m + 1,
            edges: (0..m).map(|i| (i, i + 1)).collect(),
        }
    }

    pub fn cycle(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(invalid("m", "a cycle needs at least 3 edges"));
        }
        Ok(HostGraph {
            n: m,
            edges: (0..m).map(|i| (i, (i + 1) % m)).collect(),
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Replace edge `j = {u,v}` by `u - r_j - v` with `r_j = n + j`; edge
    /// `j` becomes edges `2j = {u, r_j}` and `2j+1 = {r_j, v}`.
    pub fn subdivide(&self) -> HostGraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .flat_map(|(j, &(u, v))| [(u, self.n + j), (self.n + j, v)])
            .collect();
        HostGraph {
            n: self.n + self.edges.len(),
            edges,
        }
    }

    /// Edge sets of the connected components of the graph, as edge-index
    /// labels (one label per edge).
    pub fn edge_classes(&self) -> Vec<usize> {
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(self.n.max(1));
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        let label = uf.into_labeling();
        self.edges.iter().map(|&(u, _)| label[u]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdivision_counts() {
        let g = HostGraph::single_edge().subdivide();
        assert_eq!(g, HostGraph { n: 3, edges: vec![(0, 2), (2, 1)] });
        let tri = HostGraph::cycle(3).unwrap().subdivide();
        assert_eq!((tri.n, tri.edges.len()), (6, 6));
        assert!((0..6).all(|v| tri.degree(v) == 2));
        let text = "7 10\n0 1 0 2 0 3 1 2 1 3 2 3 3 4 4 5 5 6 6 0";
        let g = HostGraph::parse(text).unwrap();
        let s = g.subdivide();
        assert_eq!(s.n, g.n + g.edges.len());
        assert_eq!(s.edges.len(), 2 * g.edges.len());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(HostGraph::parse("2 2\n0 1\n1 0").is_err());
        assert!(HostGraph::parse("2 1\n0 0").is_err());
        assert!(HostGraph::parse("2 2\n0 1").is_err());
        assert!(HostGraph::parse("2 1\n0 1 1").is_err());
        assert!(HostGraph::parse("3 x").is_err());
    }
}
