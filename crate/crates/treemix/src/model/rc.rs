//! Random-cluster measures on a graph with boundary wirings.

use crate::error::{check_cap, invalid, Result, WEIGHT_CAP};
use crate::model::boundary::RcBoundary;
use crate::model::components::{components, ComponentReport};
use crate::model::spin::MeasureTable;
use crate::tree::Tree;

/// A graph with a wiring partition of its boundary vertices. Edge
/// configurations are bitmasks in edge order.
#[derive(Clone, Debug)]
pub struct RcGraph {
    pub nv: usize,
    pub edges: Vec<(usize, usize)>,
    pub wiring: RcBoundary,
    pub is_boundary: Vec<bool>,
}

impl RcGraph {
    pub fn new(
        nv: usize,
        edges: Vec<(usize, usize)>,
        wiring: RcBoundary,
        is_boundary: Vec<bool>,
    ) -> Result<Self> {
        if edges.iter().any(|&(a, b)| a >= nv || b >= nv || a == b) {
            return Err(invalid("edges", "endpoint out of range or loop"));
        }
        if wiring.classes.iter().flatten().any(|&v| v >= nv) {
            return Err(invalid("wiring", "vertex out of range"));
        }
        Ok(RcGraph {
            nv,
            edges,
            wiring,
            is_boundary,
        })
    }

    /// `T ∪ ∂T` with wirings on the boundary slots.
    pub fn tree(tree: &Tree, wiring: RcBoundary) -> Result<Self> {
        let is_boundary = (0..tree.nodes()).map(|v| tree.is_boundary(v)).collect();
        RcGraph::new(tree.nodes(), tree.edges().collect(), wiring, is_boundary)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_states(&self) -> Result<usize> {
        let ne = self.num_edges();
        let needed = if ne >= 127 { u128::MAX } else { 1u128 << ne };
        check_cap("edge configurations", needed, WEIGHT_CAP)?;
        Ok(needed as usize)
    }

    pub fn report(&self, mask: u64, block: Option<&[bool]>) -> ComponentReport {
        components(
            self.nv,
            &self.edges,
            |e| mask >> e & 1 == 1,
            &self.wiring.classes,
            &self.is_boundary,
            block,
        )
    }

    /// Components for an edge set given as flags.
    pub fn report_flags(&self, open: &[bool], block: Option<&[bool]>) -> ComponentReport {
        components(self.nv, &self.edges, |e| open[e], &self.wiring.classes, &self.is_boundary, block)
    }

    /// Endpoints of `e` joined by open edges other than `e`.
    pub fn joined_without_flags(&self, open: &[bool], e: usize) -> bool {
        let r = components(
            self.nv,
            &self.edges,
            |f| f != e && open[f],
            &self.wiring.classes,
            &self.is_boundary,
            None,
        );
        let (a, b) = self.edges[e];
        r.label[a] == r.label[b]
    }

    /// All boundary vertices in a single wiring class.
    pub fn is_wired(&self) -> bool {
        let bd: Vec<usize> = (0..self.nv).filter(|&v| self.is_boundary[v]).collect();
        bd.len() <= 1 || self.wiring.classes.iter().any(|c| bd.iter().all(|v| c.contains(v)))
    }

    pub fn c_xi(&self, mask: u64) -> usize {
        self.report(mask, None).c_xi
    }

    /// Endpoints of `e` joined in `A \ {e}` (wirings included).
    pub fn joined_without(&self, mask: u64, e: usize) -> bool {
        let r = self.report(mask & !(1u64 << e), None);
        let (a, b) = self.edges[e];
        r.label[a] == r.label[b]
    }

    pub fn is_cut(&self, mask: u64, e: usize) -> bool {
        !self.joined_without(mask, e)
    }

    pub fn log_weight(&self, mask: u64, p: f64, q: f64) -> f64 {
        let k = mask.count_ones() as f64;
        let rest = self.num_edges() as f64 - k;
        let mut lw = self.c_xi(mask) as f64 * q.ln();
        if k > 0.0 {
            lw += k * p.ln();
        }
        if rest > 0.0 {
            lw += rest * (1.0 - p).ln();
        }
        lw
    }

    /// `pi(A) ∝ p^|A| (1-p)^|E\A| q^{c^xi(A)}` over all edge subsets.
    pub fn rc_measure(&self, p: f64, q: f64) -> Result<MeasureTable> {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid("p", format!("need 0 <= p < 1, got {p}")));
        }
        let ns = self.num_states()?;
        let logw = (0..ns).map(|a| self.log_weight(a as u64, p, q)).collect();
        Ok(MeasureTable::from_log_weights((0..ns).collect(), logw))
    }
}

/// Product Bernoulli(`r`) measure over `ne` edges.
pub fn product_measure(ne: usize, r: f64) -> Vec<f64> {
    (0..1usize << ne)
        .map(|a| {
            let k = a.count_ones() as i32;
            r.powi(k) * (1.0 - r).powi(ne as i32 - k)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::cut_edge_prob;

    #[test]
    fn wired_h0() {
        let t = Tree::new(2, 0).unwrap();
        let g = RcGraph::tree(&t, RcBoundary::wired(&t)).unwrap();
        let m = g.rc_measure(0.5, 2.0).unwrap();
        assert!((m.probs[3] - 0.2).abs() < 1e-15);
        assert!((m.probs[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn free_is_product() {
        let t = Tree::new(2, 2).unwrap();
        let g = RcGraph::tree(&t, RcBoundary::free()).unwrap();
        for (p, q) in [(0.5, 2.0), (0.3, 3.0), (0.7, 1.0)] {
            let m = g.rc_measure(p, q).unwrap();
            let prod = product_measure(g.num_edges(), cut_edge_prob(p, q));
            let tv: f64 = m.probs.iter().zip(&prod).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
            assert!(tv < 1e-12, "tv={tv}");
        }
    }

    #[test]
    fn cut_edges() {
        let t = Tree::new(2, 0).unwrap();
        let g = RcGraph::tree(&t, RcBoundary::wired(&t)).unwrap();
        assert!(g.is_cut(0, 0));
        assert!(!g.is_cut(0b10, 0));
        let f = RcGraph::tree(&t, RcBoundary::free()).unwrap();
        assert!(f.is_cut(0b11, 0));
    }
}
