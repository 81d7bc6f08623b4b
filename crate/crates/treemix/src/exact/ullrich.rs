//! The factorization `SW = T R T*` and its block version through `Q_k`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_cap, Result, DENSE_CAP};
use crate::exact::kernels::{sw_block_matrix, sw_matrix};
use crate::model::SpinModel;

/// Matrices over the spin space `Omega` and the joint space of pairs
/// `(A, sigma)`, joint index `code * 2^|E| + mask`.
pub struct UllrichFactors {
    pub t: DMatrix<f64>,
    pub t_star: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub q: Vec<DMatrix<f64>>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UllrichReport {
    pub states: usize,
    pub joint_states: usize,
    pub blocks: usize,
    /// `max |SW - T R T*|`.
    pub sw_error: f64,
    /// `max |SW_D - (1/m) sum_k T Q_k T*|`.
    pub block_error: f64,
    /// `max_k max |Q_k^2 - Q_k|`.
    pub idempotent_error: f64,
    /// `max_k max |R - Q_k R Q_k|`.
    pub sandwich_error: f64,
    /// `max |mu(s) T(s,x) - nu(x) T*(x,s)|`.
    pub adjoint_error: f64,
}

pub fn ullrich_factors(m: &SpinModel, blocks: &[Vec<usize>]) -> Result<UllrichFactors> {
    let ne = m.tree.num_edges();
    let ns = m.num_states()?;
    let nj = ns << ne;
    check_cap("joint spin-edge matrix", nj as u128, DENSE_CAP)?;
    let q = m.q() as f64;
    let p = m.potts.p();
    let mono: Vec<u64> = (0..ns)
        .map(|s| m.mono_edges(&m.decode(s)).iter().map(|&e| 1u64 << e).sum())
        .collect();
    let mut t = DMatrix::zeros(ns, nj);
    let mut t_star = DMatrix::zeros(nj, ns);
    for s in 0..ns {
        let k = mono[s].count_ones() as i32;
        for a in 0..1u64 << ne {
            let x = s << ne | a as usize;
            t_star[(x, s)] = 1.0;
            if a & !mono[s] == 0 {
                let open = a.count_ones() as i32;
                t[(s, x)] = p.powi(open) * (1.0 - p).powi(k - open);
            }
        }
    }
    let masks: Vec<Vec<bool>> = blocks
        .iter()
        .map(|b| (0..m.n()).map(|v| b.contains(&v)).collect())
        .collect();
    let mut r = DMatrix::zeros(nj, nj);
    let mut qk = vec![DMatrix::zeros(nj, nj); blocks.len()];
    for a in 0..1u64 << ne {
        let c = m.clusters(|e| a >> e & 1 == 1, None).recolored().len();
        let ck: Vec<usize> = masks
            .iter()
            .map(|b| m.clusters(|e| a >> e & 1 == 1, Some(b)).recolored().len())
            .collect();
        let members: Vec<usize> = (0..ns).filter(|&s| a & !mono[s] == 0).collect();
        for &s in &members {
            let sig = m.decode(s);
            for &u in &members {
                let x = s << ne | a as usize;
                let y = u << ne | a as usize;
                r[(x, y)] = q.powi(-(c as i32));
                let other = m.decode(u);
                for (k, b) in masks.iter().enumerate() {
                    if (0..m.n()).all(|v| b[v] || sig[v] == other[v]) {
                        qk[k][(x, y)] = q.powi(-(ck[k] as i32));
                    }
                }
            }
        }
    }
    let mu = m.gibbs()?.probs;
    let nu = m.edwards_sokal()?.probs;
    Ok(UllrichFactors {
        t,
        t_star,
        r,
        q: qk,
        mu,
        nu,
    })
}

pub fn ullrich_check(m: &SpinModel, blocks: &[Vec<usize>]) -> Result<UllrichReport> {
    let f = ullrich_factors(m, blocks)?;
    let sw = sw_matrix(m)?;
    let swd = sw_block_matrix(m, blocks)?;
    let trt = &f.t * &f.r * &f.t_star;
    let mut avg = DMatrix::zeros(sw.n(), sw.n());
    let mut idem: f64 = 0.0;
    let mut sand: f64 = 0.0;
    for qk in &f.q {
        avg += &f.t * qk * &f.t_star / f.q.len() as f64;
        idem = idem.max((qk * qk - qk).amax());
        sand = sand.max((qk * &f.r * qk - &f.r).amax());
    }
    let mut adj: f64 = 0.0;
    for s in 0..f.t.nrows() {
        for x in 0..f.t.ncols() {
            adj = adj.max((f.mu[s] * f.t[(s, x)] - f.nu[x] * f.t_star[(x, s)]).abs());
        }
    }
    Ok(UllrichReport {
        states: sw.n(),
        joint_states: f.t.ncols(),
        blocks: blocks.len(),
        sw_error: sw.max_diff(&trt),
        block_error: swd.max_diff(&avg),
        idempotent_error: idem,
        sandwich_error: sand,
        adjoint_error: adj,
    })
}

/// Non-empty tiled blocks `T_j^ell`.
pub fn tiled_blocks(tree: &crate::tree::Tree, ell: usize) -> Vec<Vec<usize>> {
    (1..=ell + 1)
        .map(|j| tree.t_set(j, ell))
        .filter(|b| !b.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Potts, SpinBoundary};
    use crate::tree::Tree;

    #[test]
    fn factorization_h0_h1() {
        for (h, q) in [(0, 2), (0, 3), (1, 2)] {
            let t = Tree::new(2, h).unwrap();
            let blocks = tiled_blocks(&t, 1);
            let b = SpinBoundary::mono(&t, 0);
            let m = SpinModel::new(t, Potts::new(q, 2f64.ln()).unwrap(), b).unwrap();
            let r = ullrich_check(&m, &blocks).unwrap();
            assert!(r.sw_error < 1e-12, "{r:?}");
            assert!(r.block_error < 1e-12, "{r:?}");
            assert!(r.idempotent_error < 1e-12, "{r:?}");
            assert!(r.sandwich_error < 1e-12, "{r:?}");
            assert!(r.adjoint_error < 1e-12, "{r:?}");
        }
    }
}
