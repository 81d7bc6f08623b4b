//! Statistical lower-bound experiment, CMD and decay checks, mixing-time
//! scaling.

pub mod cmd;
pub mod decay;
pub mod lowerbound;
pub mod scaling;

pub use cmd::{cmd_check, random_events, CmdRow};
pub use decay::{decay_profile, DecayProfile};
pub use lowerbound::{lb_experiment, LbReport, LbSpec};
pub use scaling::{mixing_scaling, ScalingChain, ScalingMode, ScalingRow, ScalingSpec};

use crate::error::Result;
use crate::model::{SpinBoundary, SpinModel};
use crate::tree::Tree;

/// The model on the subtree `T_v` with the inherited boundary slots; the
/// parent of `v` is not included.
pub fn subtree_model(m: &SpinModel, v: usize) -> Result<SpinModel> {
    let t = &m.tree;
    let hb = t.h - t.depth(v);
    let sub = Tree::new(t.d, hb)?;
    let j = hb as u32 + 1;
    let dj = t.d.pow(j);
    let first = dj * v + (dj - 1) / (t.d - 1);
    let slots = (first..first + dj).map(|s| m.boundary.at(t, s)).collect();
    let b = SpinBoundary::partial(&sub, slots)?;
    SpinModel::new(sub, m.potts, b)
}

/// Least-squares slope and intercept of `y` against `x`, with residuals.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let res = x.iter().zip(y).map(|(a, b)| b - icpt - slope * a).collect();
    (slope, icpt, res)
}
