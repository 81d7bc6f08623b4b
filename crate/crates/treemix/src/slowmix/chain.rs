//! Random-cluster heat-bath block chains as structured operators, and the
//! modified heat-bath (MHB) dynamics on an embedding.

use crate::error::{check_cap, invalid, Result, DENSE_CAP};
use crate::exact::matrix::{Kernel, TransitionMatrix};
use crate::model::rc::RcGraph;
use crate::rng::{domain, pick, Streams};
use crate::slowmix::embed::Embedding;

/// `P = sum_b w_b P_b`, where `P_b` resamples the edges in mask `b` from
/// `pi` conditioned on the rest. Applying it costs `O(states)` per block.
#[derive(Clone, Debug)]
pub struct RcBlockChain {
    pub pi: Vec<f64>,
    pub blocks: Vec<(u64, f64)>,
    /// Per block, the `pi`-mass of each off-block class (indexed by key).
    class_mass: Vec<Vec<f64>>,
}

impl RcBlockChain {
    pub fn new(pi: Vec<f64>, blocks: Vec<(u64, f64)>) -> Result<Self> {
        let total: f64 = blocks.iter().map(|b| b.1).sum();
        if blocks.is_empty() || (total - 1.0).abs() > 1e-12 {
            return Err(invalid("blocks", format!("block weights sum to {total}, not 1")));
        }
        let class_mass = blocks
            .iter()
            .map(|&(mask, _)| {
                let mut m = vec![0.0; pi.len()];
                for (s, &x) in pi.iter().enumerate() {
                    m[s & !mask as usize] += x;
                }
                m
            })
            .collect();
        Ok(RcBlockChain { pi, blocks, class_mass })
    }

    pub fn to_dense(&self) -> Result<TransitionMatrix> {
        let n = self.pi.len();
        check_cap("dense block chain", n as u128, DENSE_CAP)?;
        let mut out = TransitionMatrix::zeros(n, self.pi.clone())?;
        let mut e = vec![0.0; n];
        let mut row = vec![0.0; n];
        for i in 0..n {
            e[i] = 1.0;
            self.push(&e, &mut row);
            e[i] = 0.0;
            for j in 0..n {
                out.p[(i, j)] = row[j];
            }
        }
        Ok(out)
    }

    /// Edge measure `Q(S, S^c) = sum_{x in S, y notin S} pi(x) P(x, y)`.
    pub fn flow(&self, set: &[bool]) -> f64 {
        let mu: Vec<f64> = self.pi.iter().zip(set).map(|(p, &s)| if s { *p } else { 0.0 }).collect();
        let mut out = vec![0.0; mu.len()];
        self.push(&mu, &mut out);
        out.iter().zip(set).filter(|x| !x.1).map(|x| x.0).sum()
    }
}

impl Kernel for RcBlockChain {
    fn dim(&self) -> usize {
        self.pi.len()
    }

    fn push(&self, mu: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        let mut g = vec![0.0; mu.len()];
        for (&(mask, w), cm) in self.blocks.iter().zip(&self.class_mass) {
            let keep = !mask as usize;
            g.iter_mut().for_each(|x| *x = 0.0);
            for (s, &x) in mu.iter().enumerate() {
                g[s & keep] += x;
            }
            for (s, o) in out.iter_mut().enumerate() {
                let k = s & keep;
                if cm[k] > 0.0 {
                    *o += w * self.pi[s] / cm[k] * g[k];
                }
            }
        }
    }
}

/// `p` on the host graph that matches `p_hat` on its subdivision.
pub fn transfer_p(p_hat: f64, q: f64) -> f64 {
    let a = p_hat * p_hat;
    a / (a + 2.0 * p_hat * (1.0 - p_hat) + (1.0 - p_hat).powi(2) * q)
}

fn free_graph(n: usize, edges: Vec<(usize, usize)>) -> Result<RcGraph> {
    RcGraph::new(n, edges, crate::model::boundary::RcBoundary::free(), vec![false; n])
}

/// Random-cluster graph of a host graph (no boundary).
pub fn host_rc(g: &crate::slowmix::HostGraph) -> Result<RcGraph> {
    free_graph(g.n, g.edges.clone())
}

/// Two-edge block chain on the subdivision: pick a middle vertex, resample
/// its two edges.
pub fn two_edge_chain(g: &crate::slowmix::HostGraph, p_hat: f64, q: f64) -> Result<RcBlockChain> {
    let m = g.edges.len();
    if m == 0 {
        return Err(invalid("graph", "no edges"));
    }
    let pi = host_rc(&g.subdivide())?.rc_measure(p_hat, q)?.probs;
    let blocks = (0..m).map(|j| (3u64 << (2 * j), 1.0 / m as f64)).collect();
    RcBlockChain::new(pi, blocks)
}

/// Exact MHB kernel: pick `v` in the internal vertices; a used `c_i`
/// resamples its two gadget edges, anything else resamples the bulk.
pub fn mhb_chain(emb: &Embedding, p_hat: f64, q: f64) -> Result<RcBlockChain> {
    let g = emb.rc_graph()?;
    let pi = g.rc_measure(p_hat, q)?.probs;
    let ni = emb.tree.n as f64;
    let mut blocks = Vec::new();
    let mut gadget = 0u64;
    for gd in emb.used() {
        let [ea, eb] = gd.edges();
        let mask = 1u64 << ea | 1u64 << eb;
        gadget |= mask;
        blocks.push((mask, 1.0 / ni));
    }
    let all = (1u64 << g.num_edges()) - 1;
    let rest = emb.tree.n - emb.used().len();
    if rest > 0 {
        blocks.push((all & !gadget, rest as f64 / ni));
    }
    RcBlockChain::new(pi, blocks)
}

/// Largest bulk the MHB sampler will enumerate.
pub const BULK_CAP: u128 = 1 << 16;

/// One MHB step on tree edge flags.
pub fn mhb_step(state: &mut [bool], emb: &Embedding, p: f64, q: f64, s: &Streams, step: u64) -> Result<()> {
    let g = emb.rc_graph()?;
    let v = s.below(step, domain::CHOICE, 0, emb.tree.n);
    let block: Vec<usize> = match emb.used().iter().find(|gd| gd.c == v) {
        Some(gd) => gd.edges().to_vec(),
        None => {
            let gf = emb.gadget_flags();
            (0..gf.len()).filter(|&e| !gf[e]).collect()
        }
    };
    check_cap("MHB bulk resampling", 1u128 << block.len().min(127), BULK_CAP)?;
    let mut logw = Vec::with_capacity(1 << block.len());
    for c in 0..1usize << block.len() {
        for (k, &e) in block.iter().enumerate() {
            state[e] = c >> k & 1 == 1;
        }
        let open = c.count_ones() as f64;
        let lw = g.report_flags(state, None).c_xi as f64 * q.ln()
            + if open > 0.0 { open * p.ln() } else { 0.0 }
            + if (block.len() as f64) > open { (block.len() as f64 - open) * (1.0 - p).ln() } else { 0.0 };
        logw.push(lw);
    }
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let c = pick(&mut s.stream(step, domain::AUX), &w);
    for (k, &e) in block.iter().enumerate() {
        state[e] = c >> k & 1 == 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::kernels::rc_edge_hb_kernel;
    use crate::slowmix::{embed_boundary, HostGraph};

    #[test]
    fn single_edge_blocks_match_edge_heat_bath() {
        let g = host_rc(&HostGraph::path(3)).unwrap();
        let pi = g.rc_measure(0.4, 2.5).unwrap().probs;
        let chain = RcBlockChain::new(pi, (0..3).map(|e| (1u64 << e, 1.0 / 3.0)).collect()).unwrap();
        let a = chain.to_dense().unwrap();
        let b = rc_edge_hb_kernel(&g, 0.4, 2.5).unwrap().to_dense().unwrap();
        assert!(a.max_diff(&b.p) < 1e-14);
    }

    #[test]
    fn mhb_is_stationary_and_reversible() {
        let e = embed_boundary(&HostGraph::single_edge(), 2, 1).unwrap();
        let m = mhb_chain(&e, 0.5, 2.0).unwrap().to_dense().unwrap();
        assert!(m.row_sum_error() < 1e-12);
        assert!(m.stationarity_error() < 1e-11);
        assert!(m.detailed_balance_error() < 1e-12);
    }

    #[test]
    fn no_gadgets_is_full_refresh() {
        let e = embed_boundary(&HostGraph { n: 1, edges: vec![] }, 2, 1).unwrap();
        let m = mhb_chain(&e, 0.3, 2.0).unwrap().to_dense().unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                assert!((m.p[(i, j)] - m.pi[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn transfer_formula() {
        assert!((transfer_p(0.5, 2.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn sampler_matches_kernel() {
        let e = embed_boundary(&HostGraph::single_edge(), 2, 1).unwrap();
        let k = mhb_chain(&e, 0.5, 2.0).unwrap().to_dense().unwrap();
        let start = 0b101101usize;
        let n = 100_000;
        let mut counts = vec![0usize; k.n()];
        let s = Streams::new(17);
        for t in 0..n {
            let mut st: Vec<bool> = (0..6).map(|e| start >> e & 1 == 1).collect();
            mhb_step(&mut st, &e, 0.5, 2.0, &s, t as u64).unwrap();
            counts[st.iter().enumerate().map(|(e, &b)| (b as usize) << e).sum::<usize>()] += 1;
        }
        for j in 0..k.n() {
            let p = k.p[(start, j)];
            let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-9);
            let z = (counts[j] as f64 / n as f64 - p).abs() / se;
            assert!(z < 4.5, "state {j}: z = {z}");
        }
    }
}
