//! Conductance of the bad sets built from a host-graph bottleneck.

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{check_cap, invalid, Error, Result, DENSE_CAP};
use crate::exact::conductance::min_conductance;
use crate::exact::spectral::{lanczos, spectrum};
use crate::slowmix::chain::{mhb_chain, two_edge_chain, RcBlockChain};
use crate::slowmix::embed::Embedding;

#[derive(Clone, Debug, Serialize)]
pub struct ConductanceReport {
    pub h: usize,
    pub ell: usize,
    pub p_hat: f64,
    pub q: f64,
    pub m: usize,
    pub big_m: usize,
    pub r: f64,
    /// `S*` as configurations of the subdivided graph (bit `2j`, `2j+1` for
    /// host edge `j`).
    pub s_star: Vec<u64>,
    pub s_star_source: &'static str,
    pub pi_hat_s_star: f64,
    pub phi_hat_s_star: f64,
    pub pi_gadgets_in_s_star: f64,
    pub pi_a: f64,
    pub pi_ac: f64,
    pub mass_error: f64,
    pub flow: f64,
    pub phi_a: f64,
    pub phi_ac: f64,
    /// `q^{-M} pi_hat(S*)`, the mass lower bound without its `1 - e^{-O(M)}`.
    pub mass_bound: f64,
    pub gap_mhb: f64,
    pub gap_method: &'static str,
    pub gap_residual: f64,
    /// `gap <= Phi(A) + Phi(A^c)` (the indicator test function).
    pub cheeger_consistent: bool,
}

/// Number of gadget classes joined to another class through the bulk.
pub fn distorted_classes(emb: &Embedding, open: impl Fn(usize) -> bool, classes: &[usize]) -> usize {
    let t = &emb.tree;
    let gf = emb.gadget_flags();
    let mut uf = UnionFind::<usize>::new(t.nodes());
    for e in (0..t.num_edges()).filter(|&e| !gf[e] && open(e)) {
        let (a, b) = t.edge(e);
        uf.union(a, b);
    }
    let used = emb.used();
    let mut hit = vec![false; classes.len()];
    for x in 0..used.len() {
        for y in 0..used.len() {
            if classes[x] != classes[y] && uf.equiv(used[x].c, used[y].c) {
                hit[x] = true;
            }
        }
    }
    let mut ks: Vec<usize> = (0..used.len()).filter(|&x| hit[x]).map(|x| classes[x]).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.len()
}

/// Builds `A_M` and reports its conductance under MHB. With `s_star = None`
/// the minimum-conductance set of the two-edge chain is used (at most 16
/// subdivided states).
pub fn bad_set_conductance(
    emb: &Embedding,
    p_hat: f64,
    q: f64,
    big_m: usize,
    s_star: Option<Vec<u64>>,
) -> Result<ConductanceReport> {
    let m = emb.graph.edges.len();
    let hat = two_edge_chain(&emb.graph, p_hat, q)?;
    let (s_star, source) = match s_star {
        Some(s) => (s, "given"),
        None => {
            let d = hat.to_dense()?;
            let (_, set) = min_conductance(&d)?;
            ((0..d.n() as u64).filter(|&b| set[b as usize]).collect(), "min-conductance search")
        }
    };
    if s_star.is_empty() {
        return Err(Error::EmptySet("S* must be non-empty"));
    }
    if let Some(b) = s_star.iter().find(|&&b| b as usize >= hat.pi.len()) {
        return Err(invalid("s_star", format!("{b} is not a configuration of the subdivided graph")));
    }
    let mut in_s = vec![false; hat.pi.len()];
    s_star.iter().for_each(|&b| in_s[b as usize] = true);
    let pi_hat_s: f64 = s_star.iter().map(|&b| hat.pi[b as usize]).sum();
    let phi_hat = hat.flow(&in_s) / pi_hat_s;

    let chain: RcBlockChain = mhb_chain(emb, p_hat, q)?;
    let classes = emb.gadget_classes();
    let ns = chain.pi.len();
    let mut in_gadget = vec![false; ns];
    let set: Vec<bool> = (0..ns)
        .map(|w| {
            let g = in_s[emb.to_hat(|e| w >> e & 1 == 1) as usize];
            in_gadget[w] = g;
            g && distorted_classes(emb, |e| w >> e & 1 == 1, &classes) <= big_m
        })
        .collect();
    let mass = |f: &dyn Fn(usize) -> bool| (0..ns).filter(|&w| f(w)).map(|w| chain.pi[w]).sum::<f64>();
    let pi_a = mass(&|w| set[w]);
    let pi_ac = mass(&|w| !set[w]);
    if pi_a <= 0.0 || pi_ac <= 0.0 {
        return Err(Error::EmptySet("A_M or its complement has zero mass"));
    }
    let flow = chain.flow(&set);
    let (gap_mhb, gap_method, gap_residual) = if check_cap("", ns as u128, DENSE_CAP).is_ok() {
        (spectrum(&chain.to_dense()?)?.gap, "dense", 0.0)
    } else {
        let l = lanczos(&chain, &chain.pi, 300, 7)?;
        (1.0 - l.lambda2, "lanczos", l.residual)
    };
    let (phi_a, phi_ac) = (flow / pi_a, flow / pi_ac);
    Ok(ConductanceReport {
        h: emb.h,
        ell: emb.ell,
        p_hat,
        q,
        m,
        big_m,
        r: p_hat.powi(emb.ell as i32 - 1),
        s_star,
        s_star_source: source,
        pi_hat_s_star: pi_hat_s,
        phi_hat_s_star: phi_hat,
        pi_gadgets_in_s_star: mass(&|w| in_gadget[w]),
        pi_a,
        pi_ac,
        mass_error: (pi_a + pi_ac - 1.0).abs(),
        flow,
        phi_a,
        phi_ac,
        mass_bound: q.powi(-(big_m as i32)) * pi_hat_s,
        gap_mhb,
        gap_method,
        gap_residual,
        cheeger_consistent: gap_mhb <= phi_a + phi_ac + 1e-9 + gap_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slowmix::{embed_boundary, HostGraph};

    #[test]
    fn vacuous_m_keeps_gadget_mass() {
        let e = embed_boundary(&HostGraph::path(2), 2, 1).unwrap();
        let r = bad_set_conductance(&e, 0.5, 2.0, 2, None).unwrap();
        assert!((r.pi_a - r.pi_gadgets_in_s_star).abs() < 1e-15);
        assert!(r.mass_error < 1e-12);
        assert!(r.cheeger_consistent, "{r:?}");
        assert!(bad_set_conductance(&e, 0.5, 2.0, 2, Some(vec![])).is_err());
    }

    #[test]
    fn h3_single_edge_uses_lanczos() {
        let e = embed_boundary(&HostGraph::single_edge(), 3, 1).unwrap();
        let r = bad_set_conductance(&e, 0.5, 2.0, 0, None).unwrap();
        assert_eq!(r.gap_method, "lanczos");
        assert!(r.gap_residual < 1e-8, "{r:?}");
        assert!(r.cheeger_consistent, "{r:?}");
    }
}
