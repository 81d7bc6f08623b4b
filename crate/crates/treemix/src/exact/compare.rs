//! The comparison chain: SW against block SW against heat-bath blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exact::functionals::{dirichlet, Groups};
use crate::exact::kernels::{block_hb_matrix, sw_block_matrix, sw_matrix, sw_single_block_matrix};
use crate::exact::spectral::{spectrum, spectrum_of};
use crate::model::SpinModel;

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub blocks: usize,
    /// `min_{k, eta}` gap of `SW_k` restricted to configurations equal to `eta` off `D_k`.
    pub gamma_min: f64,
    /// `min_{k,j} exp(-beta |E_kj|)` over the pieces of each block.
    pub gamma_floor: f64,
    pub gap_sw: f64,
    pub gap_sw_block: f64,
    pub gap_hb_block: f64,
    pub functions: usize,
    /// `min_f E_SW(f,f) - E_SWD(f,f)`.
    pub slack_sw_vs_block: f64,
    /// `min_f E_SWD(f,f) - gamma_min E_BD(f,f)`.
    pub slack_block_vs_hb: f64,
    /// `gap(SW) - gamma_min gap(B_D)`.
    pub slack_gap: f64,
}

/// Gap of `SW_k` on each class `Omega_{D_k}^eta`, minimized.
pub fn gamma_min(m: &SpinModel, blocks: &[Vec<usize>]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for b in blocks {
        let swk = sw_single_block_matrix(m, b)?;
        let g = Groups::outside(m.q(), m.n(), b);
        let mut members = vec![Vec::new(); g.count];
        for (s, &gi) in g.of.iter().enumerate() {
            members[gi as usize].push(s);
        }
        for cls in &members {
            let k = cls.len();
            let z: f64 = cls.iter().map(|&i| swk.pi[i]).sum();
            let pi: Vec<f64> = cls.iter().map(|&i| swk.pi[i] / z).collect();
            let sub = nalgebra::DMatrix::from_fn(k, k, |a, c| swk.p[(cls[a], cls[c])]);
            best = best.min(spectrum_of(&sub, &pi)?.gap_abs);
        }
    }
    Ok(best)
}

/// `min_{k,j} exp(-beta |E_kj|)`, `E_kj` the active edges touching piece `D_kj`.
pub fn gamma_floor(m: &SpinModel, blocks: &[Vec<usize>]) -> f64 {
    let t = &m.tree;
    let mut worst = 1.0f64;
    for b in blocks {
        for piece in t.pieces(b) {
            let edges = (0..t.num_edges())
                .filter(|&e| {
                    let (x, y) = t.edge(e);
                    m.is_active(e) && (piece.contains(&x) || piece.contains(&y))
                })
                .count();
            worst = worst.min((-m.potts.beta * edges as f64).exp());
        }
    }
    worst
}

pub fn compare_chain(m: &SpinModel, blocks: &[Vec<usize>], functions: usize, seed: u64) -> Result<CompareReport> {
    let sw = sw_matrix(m)?;
    let swd = sw_block_matrix(m, blocks)?;
    let bd = block_hb_matrix(m, blocks)?;
    let gamma = gamma_min(m, blocks)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s1 = f64::INFINITY;
    let mut s2 = f64::INFINITY;
    for _ in 0..functions {
        let f: Vec<f64> = (0..sw.n()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let e_sw = dirichlet(&sw.p, &sw.pi, &f);
        let e_swd = dirichlet(&swd.p, &swd.pi, &f);
        let e_bd = dirichlet(&bd.p, &bd.pi, &f);
        s1 = s1.min(e_sw - e_swd);
        s2 = s2.min(e_swd - gamma * e_bd);
    }
    let gap_sw = spectrum(&sw)?.gap_abs;
    let gap_bd = spectrum(&bd)?.gap_abs;
    Ok(CompareReport {
        blocks: blocks.len(),
        gamma_min: gamma,
        gamma_floor: gamma_floor(m, blocks),
        gap_sw,
        gap_sw_block: spectrum(&swd)?.gap_abs,
        gap_hb_block: gap_bd,
        functions,
        slack_sw_vs_block: s1,
        slack_block_vs_hb: s2,
        slack_gap: gap_sw - gamma * gap_bd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ullrich::tiled_blocks;
    use crate::model::{Potts, SpinBoundary};
    use crate::tree::Tree;

    #[test]
    fn comparison_d2_h1() {
        let t = Tree::new(2, 1).unwrap();
        let blocks = tiled_blocks(&t, 1);
        let b = SpinBoundary::mono(&t, 0);
        let m = SpinModel::new(t, Potts::new(2, 1.0).unwrap(), b).unwrap();
        let r = compare_chain(&m, &blocks, 200, 3).unwrap();
        assert!(r.slack_sw_vs_block >= -1e-12);
        assert!(r.slack_block_vs_hb >= -1e-12);
        assert!(r.slack_gap >= -1e-12);
        assert!(r.gamma_min >= r.gamma_floor - 1e-12);
    }
}
