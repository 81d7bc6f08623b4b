use serde::{Deserialize, Serialize};

use crate::dynamics::blocks::BlockSpec;
use crate::model::treedp::sample_region;
use crate::model::SpinModel;
use crate::rng::{domain, Streams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    HeatBath,
    Sw,
}

/// SW update restricted to clusters inside `block` (`None`: plain SW).
/// Monochromatic edge `e` opens iff `r_e < p`; a recolored cluster takes
/// `s_v` of its top vertex.
pub fn sw_block_step(m: &SpinModel, sigma: &mut [u8], block: Option<&[bool]>, s: &Streams, step: u64) {
    let p = m.potts.p();
    let q = m.q();
    let ne = m.tree.num_edges();
    let r = s.units(step, domain::EDGE, ne);
    let open: Vec<bool> = (0..ne).map(|e| m.mono(sigma, e) == Some(true) && r[e] < p).collect();
    let cl = m.clusters(|e| open[e], block);
    let tops = cl.recolored();
    if tops.is_empty() {
        return;
    }
    let u = s.units(step, domain::VERTEX, m.n());
    let spin = |v: usize| ((u[v] * q as f64) as usize).min(q - 1) as u8;
    for v in 0..m.n() {
        let t = cl.top[v];
        if cl.free[t] {
            sigma[v] = spin(t);
        }
    }
}

pub fn sw_step(m: &SpinModel, sigma: &mut [u8], s: &Streams, step: u64) {
    sw_block_step(m, sigma, None, s, step)
}

/// Picks a block uniformly, then updates it by heat-bath or by SW.
pub fn block_step(m: &SpinModel, sigma: &mut [u8], blocks: &BlockSpec, kind: BlockKind, s: &Streams, step: u64) {
    let k = s.below(step, domain::BLOCK, 0, blocks.len());
    let mask = &blocks.masks[k];
    match kind {
        BlockKind::HeatBath => sample_region(m, sigma, mask, &mut s.stream(step, domain::AUX)),
        BlockKind::Sw => sw_block_step(m, sigma, Some(mask), s, step),
    }
}

/// Heat-bath update of one uniform vertex.
pub fn glauber_step(m: &SpinModel, sigma: &mut [u8], s: &Streams, step: u64) {
    let v = s.below(step, domain::CHOICE, 0, m.n());
    let mut mask = vec![false; m.n()];
    mask[v] = true;
    sample_region(m, sigma, &mask, &mut s.stream(step, domain::AUX));
}

/// One step of the coupled pair: shared `r_e`, `s_v`; `y` only recolors
/// clusters inside `restriction` when given.
pub fn coupled_sw_step(m: &SpinModel, x: &mut [u8], y: &mut [u8], restriction: Option<&[bool]>, s: &Streams, step: u64) {
    sw_block_step(m, x, None, s, step);
    sw_block_step(m, y, restriction, s, step);
}
