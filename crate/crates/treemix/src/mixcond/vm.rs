use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::mixcond::updown::UpDown;
use crate::mixcond::{Certificate, Condition, Mode, Witness};
use crate::model::SpinModel;

/// Joint law of `(sigma_far, sigma_near)` under `mu_region^eta`, rows indexed by
/// the far configuration and columns by the near one (base-`q`, listed order).
pub fn joint_marginal(m: &SpinModel, region: &[usize], eta: &[u8], far: &[usize], near: &[usize]) -> Result<DMatrix<f64>> {
    let q = m.q();
    let table = m.conditional(region, eta)?;
    let mut rho = DMatrix::zeros(q.pow(far.len() as u32), q.pow(near.len() as u32));
    let key = |sigma: &[u8], set: &[usize]| set.iter().rev().fold(0, |acc, &v| acc * q + sigma[v] as usize);
    for (&code, &p) in table.support.iter().zip(&table.probs) {
        let sigma = m.decode(code);
        rho[(key(&sigma, far), key(&sigma, near))] += p;
    }
    Ok(rho)
}

/// `T_v \ B(v, ell)`.
pub fn far_set(m: &SpinModel, v: usize, ell: usize) -> Vec<usize> {
    let dv = m.tree.depth(v);
    m.tree.subtree(v).into_iter().filter(|&u| m.tree.depth(u) >= dv + ell).collect()
}

/// `lambda_2(Q_v)` for the marginal of `mu_{T_v}^eta`, `eta` fixing the parent spin.
pub fn vm_cell(m: &SpinModel, v: usize, parent_spin: Option<u8>, ell: usize) -> Result<f64> {
    let far = far_set(m, v, ell);
    if far.is_empty() {
        return Ok(0.0);
    }
    let mut eta = vec![0u8; m.n()];
    if let (Some(p), Some(s)) = (m.tree.parent(v), parent_spin) {
        eta[p] = s;
    }
    let rho = joint_marginal(m, &m.tree.subtree(v), &eta, &far, &[v])?;
    UpDown::new(&rho)?.epsilon()
}

fn cells_vm(m: &SpinModel) -> Vec<(usize, Option<u8>)> {
    let mut out = Vec::new();
    for v in 0..m.n() {
        if m.tree.parent(v).is_some() {
            out.extend((0..m.q() as u8).map(|s| (v, Some(s))));
        } else {
            out.push((v, None));
        }
    }
    out
}

fn pick_cells<T: Clone>(all: Vec<T>, mode: Mode) -> Vec<T> {
    match mode {
        Mode::Exhaustive => all,
        Mode::Sampled { budget, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..budget).map(|_| all[rng.gen_range(0..all.len())].clone()).collect()
        }
    }
}

/// `eps_VM = max_{v, eta} lambda_2(Q_v)`; vertices with an empty far set give 0.
pub fn vm_epsilon(m: &SpinModel, ell: usize, mode: Mode) -> Result<Certificate> {
    let cells = pick_cells(cells_vm(m), mode);
    let mut best = 0.0;
    let mut witness = None;
    for &(v, s) in &cells {
        let e = vm_cell(m, v, s, ell)?;
        if witness.is_none() || e > best {
            best = e;
            witness = Some(Witness {
                site: v,
                eta: s.map(|s| vec![s + 1]).unwrap_or_default(),
            });
        }
    }
    Ok(Certificate {
        condition: Condition::Vm,
        ell,
        epsilon: best,
        lower_bound: matches!(mode, Mode::Sampled { .. }),
        mode,
        cells: cells.len(),
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PvmReport {
    pub certificate: Certificate,
    /// Max over levels of `eps` at that level (index `i - 1`).
    pub per_level: Vec<f64>,
    /// `max |gap(Q_{L_i}) - min_v gap(Q_v)|` over the evaluated cells.
    pub product_error: f64,
}

/// `eps_PVM` from the joint law of `(sigma_{F_{i-ell}}, sigma_{L_i})` under
/// `mu_{F_i}^eta`, `eta` ranging over the spins on `L_{i+1}`.
pub fn pvm_epsilon(m: &SpinModel, ell: usize, mode: Mode) -> Result<PvmReport> {
    let t = &m.tree;
    let q = m.q();
    let mut all = Vec::new();
    for i in 1..=t.h + 1 {
        let above = if i <= t.h { t.level_set(i + 1) } else { Vec::new() };
        let count = q.pow(above.len() as u32);
        all.extend((0..count).map(|c| (i, c)));
    }
    let cells = pick_cells(all, mode);
    let mut per_level = vec![0.0f64; t.h + 1];
    let mut best = 0.0;
    let mut witness = None;
    let mut product_error: f64 = 0.0;
    for &(i, c) in &cells {
        let above = if i <= t.h { t.level_set(i + 1) } else { Vec::new() };
        let mut eta = vec![0u8; m.n()];
        let mut k = c;
        for &u in &above {
            eta[u] = (k % q) as u8;
            k /= q;
        }
        let far = t.f_set(i as i64 - ell as i64);
        let level = t.level_set(i);
        let e = if far.is_empty() {
            0.0
        } else {
            let rho = joint_marginal(m, &t.f_set(i as i64), &eta, &far, &level)?;
            UpDown::new(&rho)?.epsilon()?
        };
        let mut per_vertex: f64 = 0.0;
        for &v in &level {
            let s = t.parent(v).map(|p| eta[p]);
            per_vertex = per_vertex.max(vm_cell(m, v, s, ell)?);
        }
        product_error = product_error.max((e - per_vertex).abs());
        per_level[i - 1] = per_level[i - 1].max(e);
        if witness.is_none() || e > best {
            best = e;
            witness = Some(Witness {
                site: i,
                eta: above.iter().map(|&u| eta[u] + 1).collect(),
            });
        }
    }
    Ok(PvmReport {
        certificate: Certificate {
            condition: Condition::Pvm,
            ell,
            epsilon: best,
            lower_bound: matches!(mode, Mode::Sampled { .. }),
            mode,
            cells: cells.len(),
            witness,
        },
        per_level,
        product_error,
    })
}
