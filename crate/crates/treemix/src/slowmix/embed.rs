//! Embedding a subdivided host graph into the boundary of a binary tree
//! through a random-cluster wiring.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::model::boundary::RcBoundary;
use crate::model::rc::RcGraph;
use crate::slowmix::graph::HostGraph;
use crate::tree::Tree;

/// The three vertices used from one subtree `B_i`: `a`, `b` are its two
/// left-most leaves and `c` their parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gadget {
    pub root: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Gadget {
    /// Tree edge indices of `{c,a}` and `{c,b}`.
    pub fn edges(&self) -> [usize; 2] {
        [self.a - 1, self.b - 1]
    }
}

/// Binary tree `T_h` (leaves are the boundary slots of `Tree::new(2, h-1)`)
/// with the wiring induced by a host graph.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub h: usize,
    pub ell: usize,
    pub tree: Tree,
    pub graph: HostGraph,
    /// All `2^{h-ell}` gadgets, left to right; gadget `j` carries edge `j`
    /// of the host graph when `j < graph.edges.len()`.
    pub gadgets: Vec<Gadget>,
    pub wiring: RcBoundary,
}

pub fn embed_boundary(g: &HostGraph, h: usize, ell: usize) -> Result<Embedding> {
    if ell == 0 || ell > h {
        return Err(invalid("ell", format!("need 1 <= ell <= h, got ell = {ell}, h = {h}")));
    }
    let tree = Tree::new(2, h - 1)?;
    let first = (1usize << (h - ell)) - 1;
    let gadgets: Vec<Gadget> = (0..1usize << (h - ell))
        .map(|i| {
            let root = first + i;
            let a = (0..ell).fold(root, |v, _| 2 * v + 1);
            Gadget { root, a, b: a + 1, c: (a - 1) / 2 }
        })
        .collect();
    if g.edges.len() > gadgets.len() {
        return Err(invalid(
            "graph",
            format!("{} edges do not fit in {} gadgets (h = {h}, ell = {ell})", g.edges.len(), gadgets.len()),
        ));
    }
    let mut classes = vec![Vec::new(); g.n];
    for (j, &(u, v)) in g.edges.iter().enumerate() {
        classes[u].push(gadgets[j].a);
        classes[v].push(gadgets[j].b);
    }
    classes.retain(|c| !c.is_empty());
    Ok(Embedding {
        h,
        ell,
        tree,
        graph: g.clone(),
        gadgets,
        wiring: RcBoundary::partition(classes)?,
    })
}

impl Embedding {
    pub fn used(&self) -> &[Gadget] {
        &self.gadgets[..self.graph.edges.len()]
    }

    pub fn rc_graph(&self) -> Result<RcGraph> {
        RcGraph::tree(&self.tree, self.wiring.clone())
    }

    /// Flags over tree edges: edges of the used gadgets, `E(W_h)`.
    pub fn gadget_flags(&self) -> Vec<bool> {
        let mut f = vec![false; self.tree.num_edges()];
        for g in self.used() {
            for e in g.edges() {
                f[e] = true;
            }
        }
        f
    }

    /// Configuration of the subdivided graph read off the gadget edges.
    pub fn to_hat(&self, open: impl Fn(usize) -> bool) -> u64 {
        let mut out = 0u64;
        for (j, g) in self.used().iter().enumerate() {
            let [ea, eb] = g.edges();
            out |= (open(ea) as u64) << (2 * j) | (open(eb) as u64) << (2 * j + 1);
        }
        out
    }

    /// Gadget class labels: gadgets are in one class when their leaves are
    /// wired together, transitively.
    pub fn gadget_classes(&self) -> Vec<usize> {
        self.graph.edge_classes()
    }

    /// Rebuild the subdivided graph from the wiring alone. Host vertices are
    /// numbered by first appearance over gadgets (`a` before `b`); middle
    /// vertex `j` follows them.
    pub fn decode(&self) -> HostGraph {
        let class_of = |leaf: usize| self.wiring.classes.iter().position(|c| c.contains(&leaf));
        let mut order: Vec<usize> = Vec::new();
        let mut id = |k: Option<usize>| {
            let k = k.expect("used leaf is wired");
            match order.iter().position(|&x| x == k) {
                Some(i) => i,
                None => {
                    order.push(k);
                    order.len() - 1
                }
            }
        };
        let pairs: Vec<(usize, usize)> = self
            .used()
            .iter()
            .map(|g| (id(class_of(g.a)), id(class_of(g.b))))
            .collect();
        HostGraph {
            n: order.len(),
            edges: pairs,
        }
        .subdivide()
    }

    pub fn report(&self) -> EmbedReport {
        let relabeled = relabel(&self.graph);
        EmbedReport {
            h: self.h,
            ell: self.ell,
            leaves: self.tree.nb,
            capacity: self.gadgets.len(),
            used: self.used().to_vec(),
            classes: self.wiring.classes.clone(),
            free_leaves: self.tree.nb - self.wiring.classes.iter().map(Vec::len).sum::<usize>(),
            internal: self.tree.n,
            edges: self.tree.num_edges(),
            roundtrip: self.decode() == relabeled.subdivide(),
        }
    }
}

/// Host graph with vertices renumbered by first appearance in the edge list
/// and isolated vertices dropped.
fn relabel(g: &HostGraph) -> HostGraph {
    let mut order = Vec::new();
    let mut id = |v: usize| match order.iter().position(|&x| x == v) {
        Some(i) => i,
        None => {
            order.push(v);
            order.len() - 1
        }
    };
    let edges = g.edges.iter().map(|&(u, v)| (id(u), id(v))).collect();
    HostGraph {
        n: order.len(),
        edges,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbedReport {
    pub h: usize,
    pub ell: usize,
    pub leaves: usize,
    pub capacity: usize,
    pub used: Vec<Gadget>,
    pub classes: Vec<Vec<usize>>,
    pub free_leaves: usize,
    pub internal: usize,
    pub edges: usize,
    pub roundtrip: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_uses_one_gadget() {
        let e = embed_boundary(&HostGraph::single_edge(), 2, 1).unwrap();
        let r = e.report();
        assert_eq!(r.used, vec![Gadget { root: 1, a: 3, b: 4, c: 1 }]);
        assert_eq!(r.classes, vec![vec![3], vec![4]]);
        assert_eq!(r.free_leaves, 2);
        assert!(r.roundtrip);
    }

    #[test]
    fn path_shares_an_endpoint() {
        let e = embed_boundary(&HostGraph::path(2), 3, 1).unwrap();
        let sizes: Vec<usize> = e.wiring.classes.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2, 1]);
        assert!(e.report().roundtrip);
        let c = embed_boundary(&HostGraph::cycle(8).unwrap(), 5, 2).unwrap();
        assert!(c.wiring.classes.iter().all(|k| k.len() == 2));
        assert!(c.report().roundtrip);
        let mids: Vec<usize> = c.used().iter().map(|g| g.c).collect();
        let mut dedup = mids.clone();
        dedup.dedup();
        assert_eq!(mids, dedup);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(embed_boundary(&HostGraph::path(3), 3, 2).is_err());
        assert!(embed_boundary(&HostGraph::path(2), 3, 2).is_ok());
        assert!(embed_boundary(&HostGraph::single_edge(), 3, 0).is_err());
    }
}
