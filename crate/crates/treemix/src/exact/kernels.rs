//! Exact transition matrices for every chain, by enumerating the chain's
//! randomness.

use crate::error::{invalid, Result};
use crate::exact::functionals::Groups;
use crate::exact::matrix::{compact_row, SparseKernel, TransitionMatrix};
use crate::model::{cut_edge_prob, RcGraph, SpinModel};

fn block_masks(m: &SpinModel, blocks: &[Vec<usize>]) -> Result<Vec<Vec<bool>>> {
    if blocks.is_empty() {
        return Err(invalid("blocks", "need at least one block"));
    }
    Ok(blocks
        .iter()
        .map(|b| {
            let mut mask = vec![false; m.n()];
            for &v in b {
                mask[v] = true;
            }
            mask
        })
        .collect())
}

/// Adds `weight * SW_block(sigma, .)` into `row`; `block = None` is plain SW.
fn sw_row(m: &SpinModel, sigma: &[u8], block: Option<&[bool]>, weight: f64, row: &mut [f64]) {
    let q = m.q();
    let p = m.potts.p();
    let mono = m.mono_edges(sigma);
    let k = mono.len();
    let mut target = sigma.to_vec();
    for a in 0u64..1 << k {
        let open_count = a.count_ones() as i32;
        let w = p.powi(open_count) * (1.0 - p).powi(k as i32 - open_count);
        if w == 0.0 {
            continue;
        }
        let mut is_open = vec![false; m.tree.num_edges()];
        for (bit, &e) in mono.iter().enumerate() {
            is_open[e] = a >> bit & 1 == 1;
        }
        let cl = m.clusters(|e| is_open[e], block);
        let tops = cl.recolored();
        let slot: Vec<Option<usize>> = (0..m.n())
            .map(|v| tops.iter().position(|&t| t == cl.top[v]))
            .collect();
        let outcomes = q.pow(tops.len() as u32);
        let share = weight * w / outcomes as f64;
        for o in 0..outcomes {
            for v in 0..m.n() {
                if let Some(i) = slot[v] {
                    target[v] = (o / q.pow(i as u32) % q) as u8;
                } else {
                    target[v] = sigma[v];
                }
            }
            row[m.encode(&target)] += share;
        }
    }
}

/// SW with boundary, by summation over subsets of `M(sigma)`.
pub fn sw_matrix(m: &SpinModel) -> Result<TransitionMatrix> {
    let pi = m.gibbs()?.probs;
    let ns = pi.len();
    let mut out = TransitionMatrix::zeros(ns, pi)?;
    let mut row = vec![0.0; ns];
    for s in 0..ns {
        row.iter_mut().for_each(|x| *x = 0.0);
        sw_row(m, &m.decode(s), None, 1.0, &mut row);
        for (j, &x) in row.iter().enumerate() {
            out.p[(s, j)] = x;
        }
    }
    Ok(out)
}

/// `SW_k`: percolate, then recolor only clusters inside block `k`.
pub fn sw_single_block_matrix(m: &SpinModel, block: &[usize]) -> Result<TransitionMatrix> {
    sw_block_matrix(m, &[block.to_vec()])
}

/// Block SW `SW_D = (1/m) sum_k SW_k`.
pub fn sw_block_matrix(m: &SpinModel, blocks: &[Vec<usize>]) -> Result<TransitionMatrix> {
    let masks = block_masks(m, blocks)?;
    let pi = m.gibbs()?.probs;
    let ns = pi.len();
    let mut out = TransitionMatrix::zeros(ns, pi)?;
    let mut row = vec![0.0; ns];
    let w = 1.0 / masks.len() as f64;
    for s in 0..ns {
        row.iter_mut().for_each(|x| *x = 0.0);
        let sigma = m.decode(s);
        for mask in &masks {
            sw_row(m, &sigma, Some(mask), w, &mut row);
        }
        for (j, &x) in row.iter().enumerate() {
            out.p[(s, j)] = x;
        }
    }
    Ok(out)
}

/// Heat-bath block dynamics `(1/m) sum_k Pi_k`, `Pi_k` the conditional
/// resampling of block `k`.
pub fn block_hb_matrix(m: &SpinModel, blocks: &[Vec<usize>]) -> Result<TransitionMatrix> {
    block_masks(m, blocks)?;
    let pi = m.gibbs()?.probs;
    let ns = pi.len();
    let mut out = TransitionMatrix::zeros(ns, pi)?;
    let w = 1.0 / blocks.len() as f64;
    for b in blocks {
        let g = Groups::outside(m.q(), m.n(), b);
        let mass = g.mass(&out.pi);
        let mut members = vec![Vec::new(); g.count];
        for (s, &gi) in g.of.iter().enumerate() {
            members[gi as usize].push(s);
        }
        for group in &members {
            let gm = mass[g.of[group[0]] as usize];
            for &i in group {
                for &j in group {
                    out.p[(i, j)] += w * out.pi[j] / gm;
                }
            }
        }
    }
    Ok(out)
}

/// Single-site heat-bath (Glauber) dynamics.
pub fn glauber_matrix(m: &SpinModel) -> Result<TransitionMatrix> {
    let blocks: Vec<Vec<usize>> = (0..m.n()).map(|v| vec![v]).collect();
    block_hb_matrix(m, &blocks)
}

/// Edge heat-bath dynamics with the cut-edge rule.
pub fn rc_edge_hb_kernel(g: &RcGraph, p: f64, q: f64) -> Result<SparseKernel> {
    let pi = g.rc_measure(p, q)?.probs;
    let ne = g.num_edges();
    let rc = cut_edge_prob(p, q);
    let w = 1.0 / ne as f64;
    let rows = (0..pi.len() as u64)
        .map(|a| {
            let mut row = Vec::with_capacity(2 * ne);
            for e in 0..ne {
                let r = if g.is_cut(a, e) { rc } else { p };
                row.push(((a | 1 << e) as u32, w * r));
                row.push(((a & !(1 << e)) as u32, w * (1.0 - r)));
            }
            compact_row(row)
        })
        .collect();
    Ok(SparseKernel { rows, pi })
}

/// Single-bond dynamics: spins per cluster, then one uniform edge refreshed
/// if its endpoints agree.
pub fn single_bond_kernel(g: &RcGraph, p: f64, q: f64) -> Result<SparseKernel> {
    let pi = g.rc_measure(p, q)?.probs;
    let ne = g.num_edges();
    let w = 1.0 / ne as f64;
    let rows = (0..pi.len() as u64)
        .map(|a| {
            let mut row = Vec::with_capacity(2 * ne);
            for e in 0..ne {
                let on = (a | 1 << e) as u32;
                let off = (a & !(1 << e)) as u32;
                if a >> e & 1 == 1 || g.joined_without(a, e) {
                    row.push((on, w * p));
                    row.push((off, w * (1.0 - p)));
                } else {
                    row.push((on, w * p / q));
                    row.push((off, w * (1.0 - p / q)));
                }
            }
            compact_row(row)
        })
        .collect();
    Ok(SparseKernel { rows, pi })
}

/// Random-cluster SW: uniform spin per cluster (wired classes merged), then
/// percolate the monochromatic edges.
pub fn rc_sw_matrix(g: &RcGraph, p: f64, q: usize) -> Result<TransitionMatrix> {
    let pi = g.rc_measure(p, q as f64)?.probs;
    let ns = pi.len();
    let ne = g.num_edges();
    let mut out = TransitionMatrix::zeros(ns, pi)?;
    for a in 0..ns as u64 {
        let rep = g.report(a, None);
        let roots: Vec<usize> = (0..g.nv).filter(|&v| rep.label[v] == v).collect();
        let idx: Vec<usize> = (0..g.nv)
            .map(|v| roots.binary_search(&rep.label[v]).unwrap())
            .collect();
        let c = roots.len();
        let outcomes = q.pow(c as u32);
        let share = 1.0 / outcomes as f64;
        for o in 0..outcomes {
            let spin = |v: usize| o / q.pow(idx[v] as u32) % q;
            let mono: Vec<usize> = (0..ne)
                .filter(|&e| {
                    let (x, y) = g.edges[e];
                    spin(x) == spin(y)
                })
                .collect();
            let k = mono.len();
            for b in 0u64..1 << k {
                let open = b.count_ones() as i32;
                let w = p.powi(open) * (1.0 - p).powi(k as i32 - open);
                let mut target = 0usize;
                for (bit, &e) in mono.iter().enumerate() {
                    if b >> bit & 1 == 1 {
                        target |= 1 << e;
                    }
                }
                out.p[(a as usize, target)] += share * w;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::mixing::tv_mixing_time;
    use crate::model::{Potts, RcBoundary, SpinBoundary};
    use crate::tree::Tree;

    fn model(d: usize, h: usize, q: usize, beta: f64) -> SpinModel {
        let t = Tree::new(d, h).unwrap();
        let b = SpinBoundary::mono(&t, 0);
        SpinModel::new(t, Potts::new(q, beta).unwrap(), b).unwrap()
    }

    #[test]
    fn sw_beta_zero_uniform_rows() {
        let m = model(2, 1, 2, 0.0);
        let sw = sw_matrix(&m).unwrap();
        assert!(sw.p.iter().all(|&x| (x - 0.125).abs() < 1e-15));
        assert_eq!(tv_mixing_time(&sw, &sw.pi, None, 10).tau, Some(1));
    }

    #[test]
    fn sw_stationary_and_reversible() {
        for (h, q, beta) in [(1, 2, 2f64.ln()), (1, 3, 1.0), (2, 2, 2.0)] {
            let m = model(2, h, q, beta);
            let sw = sw_matrix(&m).unwrap();
            assert!(sw.row_sum_error() < 1e-12);
            assert!(sw.stationarity_error() < 1e-12);
            assert!(sw.detailed_balance_error() < 1e-10);
        }
    }

    #[test]
    fn sw_with_free_boundary() {
        let t = Tree::new(2, 1).unwrap();
        let m = SpinModel::new(t.clone(), Potts::new(2, 1.0).unwrap(), SpinBoundary::free(&t)).unwrap();
        let sw = sw_matrix(&m).unwrap();
        assert!(sw.stationarity_error() < 1e-12);
    }

    #[test]
    fn one_vertex_glauber() {
        let t = Tree::new(2, 0).unwrap();
        let m = SpinModel::new(t.clone(), Potts::new(2, 0.9).unwrap(), SpinBoundary::free(&t)).unwrap();
        let g = glauber_matrix(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.p[(i, j)] - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn full_block_is_perfect_sample() {
        let m = model(2, 1, 2, 1.0);
        let all: Vec<usize> = (0..m.n()).collect();
        let hb = block_hb_matrix(&m, &[all.clone()]).unwrap();
        for i in 0..hb.n() {
            for j in 0..hb.n() {
                assert!((hb.p[(i, j)] - hb.pi[j]).abs() < 1e-15);
            }
        }
        let swd = sw_block_matrix(&m, &[all]).unwrap();
        let sw = sw_matrix(&m).unwrap();
        assert!(sw.max_diff(&swd.p) < 1e-15);
    }

    #[test]
    fn rc_chains_stationary() {
        let t = Tree::new(2, 0).unwrap();
        let g = RcGraph::tree(&t, RcBoundary::wired(&t)).unwrap();
        let hb = rc_edge_hb_kernel(&g, 0.5, 2.0).unwrap();
        assert!(hb.stationarity_error() < 1e-12);
        assert!(hb.detailed_balance_error() < 1e-12);
        let sb = single_bond_kernel(&g, 0.5, 2.0).unwrap();
        assert!(sb.stationarity_error() < 1e-12);
        assert!(sb.detailed_balance_error() < 1e-12);
        let sw = rc_sw_matrix(&g, 0.5, 2).unwrap();
        assert!(sw.row_sum_error() < 1e-12);
        assert!(sw.stationarity_error() < 1e-12);
        let zero = rc_sw_matrix(&g, 0.0, 2).unwrap();
        assert!((0..4).all(|i| (zero.p[(i, 0)] - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rc_q1_is_bernoulli_refresh() {
        let t = Tree::new(2, 0).unwrap();
        let g = RcGraph::tree(&t, RcBoundary::free()).unwrap();
        let sw = rc_sw_matrix(&g, 0.3, 1).unwrap();
        for i in 0..4 {
            assert!((sw.p[(i, 3)] - 0.09).abs() < 1e-15);
        }
    }
}
