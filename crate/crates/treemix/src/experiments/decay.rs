//! Influence of the spin above the root on the left-most leaf edge.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exact::mixing::tv;
use crate::experiments::linear_fit;
use crate::model::treedp::edge_marginal;
use crate::model::{Potts, SpinBoundarySpec, SpinModel};
use crate::tree::Tree;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayProfile {
    pub d: usize,
    pub q: usize,
    pub beta: f64,
    /// 1-based spins above the root.
    pub pair: (u8, u8),
    pub heights: Vec<usize>,
    pub tv: Vec<f64>,
    /// `tv[k+1] / tv[k]`, when `tv[k] > 0`.
    pub ratios: Vec<f64>,
    /// `1 - max ratio`; positive means strict contraction per level.
    pub delta_hat: f64,
    /// Fitted `c` in `tv ~ C e^{-c h}` (over heights with `tv > 0`).
    pub rate: f64,
    pub residuals: Vec<f64>,
}

pub fn decay_profile(
    d: usize,
    heights: &[usize],
    q: usize,
    beta: f64,
    boundary: &SpinBoundarySpec,
    pair: (u8, u8),
) -> Result<DecayProfile> {
    let (i, j) = pair;
    if i == 0 || j == 0 || i as usize > q || j as usize > q {
        return Err(invalid("pair", format!("spins must lie in 1..={q}")));
    }
    let potts = Potts::new(q, beta)?;
    let mut out = Vec::with_capacity(heights.len());
    for &h in heights {
        if h == 0 {
            return Err(invalid("heights", "height must be >= 1 for a leaf edge below the root"));
        }
        let t = Tree::new(d, h)?;
        let b = boundary.resolve(&t, q)?;
        let m = SpinModel::new(t, potts, b)?;
        let (u, c) = m.tree.leftmost_leaf_edge(0).expect("h >= 1");
        let flat = |s: u8| edge_marginal(&m, Some(s - 1), u, c).concat();
        out.push(tv(&flat(i), &flat(j)));
    }
    let ratios: Vec<f64> = out.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
    let delta_hat = 1.0 - ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pos: Vec<(f64, f64)> = heights
        .iter()
        .zip(&out)
        .filter(|x| *x.1 > 0.0)
        .map(|(&h, &v)| (h as f64, v.ln()))
        .collect();
    let (rate, residuals) = if pos.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = pos.into_iter().unzip();
        let (slope, _, res) = linear_fit(&x, &y);
        (-slope, res)
    } else {
        (f64::INFINITY, Vec::new())
    };
    Ok(DecayProfile {
        d,
        q,
        beta,
        pair,
        heights: heights.to_vec(),
        tv: out,
        ratios,
        delta_hat: if delta_hat.is_finite() { delta_hat } else { 1.0 },
        rate,
        residuals,
    })
}
