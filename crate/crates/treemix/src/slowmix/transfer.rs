//! Gap transfer between edge heat-bath on a graph and the two-edge block
//! chain on its subdivision.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::kernels::rc_edge_hb_kernel;
use crate::exact::spectral::spectrum;
use crate::model::params::cut_edge_prob;
use crate::slowmix::chain::{host_rc, transfer_p, two_edge_chain};
use crate::slowmix::graph::HostGraph;

#[derive(Clone, Debug, Serialize)]
pub struct GapTransferReport {
    pub p_hat: f64,
    pub q: f64,
    pub p: f64,
    pub states: usize,
    pub states_hat: usize,
    pub gap: f64,
    pub gap_hat: f64,
    pub gap_error: f64,
    /// `max_A |pi(A) - sum_{B projects to A} pi_hat(B)|`.
    pub projection_error: f64,
    /// Largest deviation of the two-edge "both open" probability from `p`
    /// (endpoints joined elsewhere) or from the cut-edge value (otherwise).
    pub transition_error: f64,
    pub passed: bool,
}

pub fn gap_transfer_check(g: &HostGraph, p_hat: f64, q: f64) -> Result<GapTransferReport> {
    if !(0.0..1.0).contains(&p_hat) || p_hat == 0.0 {
        return Err(invalid("p_hat", format!("need 0 < p_hat < 1, got {p_hat}")));
    }
    let m = g.edges.len();
    let p = transfer_p(p_hat, q);
    let rc = host_rc(g)?;
    let small = rc_edge_hb_kernel(&rc, p, q)?.to_dense()?;
    let hat = two_edge_chain(g, p_hat, q)?;
    let big = hat.to_dense()?;
    let gap = spectrum(&small)?.gap;
    let gap_hat = spectrum(&big)?.gap;

    let mut proj = vec![0.0; small.n()];
    for (b, &x) in hat.pi.iter().enumerate() {
        let a: usize = (0..m).filter(|j| b >> (2 * j) & 3 == 3).map(|j| 1 << j).sum();
        proj[a] += x;
    }
    let projection_error = proj.iter().zip(&small.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let hat_rc = host_rc(&g.subdivide())?;
    let cut = cut_edge_prob(p, q);
    let mut transition_error: f64 = 0.0;
    for b in 0..hat.pi.len() as u64 {
        for (j, &(u, v)) in g.edges.iter().enumerate() {
            if b >> (2 * j) & 3 != 0 {
                continue;
            }
            let both = hat.pi[(b | 3 << (2 * j)) as usize];
            let total: f64 = (0..4u64).map(|c| hat.pi[(b | c << (2 * j)) as usize]).sum();
            let label = hat_rc.report(b, None).label;
            let want = if label[u] == label[v] { p } else { cut };
            transition_error = transition_error.max((both / total - want).abs());
        }
    }
    let gap_error = (gap - gap_hat).abs();
    Ok(GapTransferReport {
        p_hat,
        q,
        p,
        states: small.n(),
        states_hat: big.n(),
        gap,
        gap_hat,
        gap_error,
        projection_error,
        transition_error,
        passed: gap_error <= 1e-10 && projection_error <= 1e-12 && transition_error <= 1e-12,
    })
}
