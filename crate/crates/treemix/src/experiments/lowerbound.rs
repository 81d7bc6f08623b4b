//! Coupled SW runs from the block starting condition: disagreement
//! containment, the monochromatic-edge statistic and the one-step surplus.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, NegativeBinomial};

use crate::dynamics::coupled_sw_step;
use crate::error::{invalid, Result};
use crate::experiments::subtree_model;
use crate::model::treedp::{edge_marginal, sample_region};
use crate::model::{Potts, SpinBoundarySpec, SpinModel};
use crate::rng::{domain, Streams};
use crate::slowmix::clopper_pearson;
use crate::tree::Tree;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LbSpec {
    pub d: usize,
    pub h: usize,
    pub q: usize,
    pub beta: f64,
    pub boundary: SpinBoundarySpec,
    pub alphas: Vec<f64>,
    /// `R_hat = min(floor(n^xi), N)` test edges enter the containment event.
    pub xi: f64,
    pub replicas: usize,
    pub seed: u64,
}

impl Default for LbSpec {
    fn default() -> Self {
        LbSpec {
            d: 2,
            h: 6,
            q: 2,
            beta: std::f64::consts::LN_2,
            boundary: SpinBoundarySpec::Mono { spin: 1 },
            alphas: vec![0.125, 0.25, 0.5, 1.0],
            xi: 0.25,
            replicas: 10_000,
            seed: 1,
        }
    }
}

/// One row per swept `alpha`.
#[derive(Clone, Debug, Serialize)]
pub struct LbRow {
    pub alpha: f64,
    pub tau: usize,
    /// Replicas with `X_tau = Y_tau` on all of the first `R_hat` test edges.
    pub contained: usize,
    pub freq: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean over blocks of `Pr[X_tau(e_i) != Y_tau(e_i)]`.
    pub reach_freq: f64,
    /// `Pr[sum of tau Geom(1-p) >= D]`, `D` the distance from the block's
    /// outside parent to the upper end of `e_i`.
    pub reach_bound: f64,
    /// Mean of `f(Y_tau)`, monochromatic test edges among the first `R_hat`.
    pub f_mean: f64,
    pub w: f64,
    /// `W + sqrt(R log R)`.
    pub hoeffding_a: f64,
    pub pr_f_ge_a: f64,
    pub pr_stat_f_ge_a: f64,
    /// `max_a Pr[f(Y_tau) >= a] - Pr_stationary[f >= a]`.
    pub tv_plugin: f64,
    pub tv_plugin_a: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurplusRow {
    pub block: usize,
    pub mu_a: f64,
    pub y1_freq: f64,
    pub surplus: f64,
    /// `(1 - mu(A_i)) (q-1) p / q`.
    pub bound: f64,
    pub sigma: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LbReport {
    pub spec: LbSpec,
    pub n: usize,
    pub k: usize,
    pub blocks: usize,
    pub r_hat: usize,
    pub rows: Vec<LbRow>,
    pub surplus: Vec<SurplusRow>,
    /// Some swept `alpha` has a 99% containment lower bound of at least 0.9.
    pub containment_ok: bool,
    pub surplus_ok: bool,
}

struct Replica {
    /// Per recorded time: containment on the first `R_hat` edges, per-block
    /// disagreement flags, `f(Y_t)`.
    at: Vec<(bool, Vec<bool>, usize)>,
    y1_in_a: Vec<bool>,
    f_stationary: usize,
}

pub fn lb_experiment(spec: &LbSpec) -> Result<LbReport> {
    let tree = Tree::new(spec.d, spec.h)?;
    let potts = Potts::new(spec.q, spec.beta)?;
    let boundary = spec.boundary.resolve(&tree, spec.q)?;
    let m = SpinModel::new(tree.clone(), potts, boundary)?;
    let t = &m.tree;
    let n = t.n;
    let k = ((n as f64).ln() / (spec.d as f64).ln() / 2.0).ceil() as usize;
    if k < 2 || k > t.h + 1 {
        return Err(invalid("h", format!("block level k = {k} needs 2 <= k <= h+1")));
    }
    if spec.alphas.iter().any(|&a| a < 0.0) || spec.replicas == 0 {
        return Err(invalid("alphas", "need alpha >= 0 and replicas > 0"));
    }
    let roots = t.level_set(k);
    let nblocks = roots.len();
    let r_hat = ((n as f64).powf(spec.xi).floor() as usize).clamp(1, nblocks);
    let edges: Vec<(usize, usize)> = roots.iter().map(|&v| t.leftmost_leaf_edge(v).expect("k >= 2")).collect();
    let masks: Vec<Vec<bool>> = roots
        .iter()
        .map(|&v| {
            let mut b = vec![false; n];
            t.subtree(v).into_iter().for_each(|u| b[u] = true);
            b
        })
        .collect();
    let mut in_b = vec![false; n];
    for mask in &masks {
        in_b.iter_mut().zip(mask).for_each(|(b, &x)| *b |= x);
    }
    let taus: Vec<usize> = spec
        .alphas
        .iter()
        .map(|a| (a * (n as f64).ln()).ceil() as usize)
        .collect();
    let horizon = taus.iter().copied().max().unwrap_or(0).max(1);

    // Exact mu^1_{B_i}(A_i).
    let mu_a: Vec<f64> = roots
        .iter()
        .zip(&edges)
        .map(|(&v, &(u, c))| {
            let sub = subtree_model(&m, v)?;
            let (su, sc) = (relative(t, v, u), relative(t, v, c));
            let j = edge_marginal(&sub, Some(0), su, sc);
            Ok((0..spec.q).map(|s| j[s][s]).sum())
        })
        .collect::<Result<_>>()?;

    let streams = Streams::new(spec.seed);
    let sample_blocks = |sigma: &mut [u8], rng: &mut rand_chacha::ChaCha8Rng, condition: bool| {
        for (mask, &(u, c)) in masks.iter().zip(&edges) {
            loop {
                sample_region(&m, sigma, mask, rng);
                if !condition || sigma[u] == sigma[c] {
                    break;
                }
            }
        }
    };
    let reps: Vec<Replica> = (0..spec.replicas)
        .into_par_iter()
        .map(|r| {
            let s = streams.replica(r as u64);
            let mut x = vec![0u8; n];
            sample_blocks(&mut x, &mut s.stream(0, domain::INIT), true);
            let mut y = x.clone();
            let mut at = Vec::with_capacity(horizon + 1);
            let mut y1_in_a = Vec::new();
            let record = |x: &[u8], y: &[u8]| {
                let dis: Vec<bool> = edges.iter().map(|&(u, c)| x[u] != y[u] || x[c] != y[c]).collect();
                let f = edges[..r_hat].iter().filter(|&&(u, c)| y[u] == y[c]).count();
                (!dis[..r_hat].iter().any(|&b| b), dis, f)
            };
            at.push(record(&x, &y));
            for step in 1..=horizon {
                coupled_sw_step(&m, &mut x, &mut y, Some(&in_b), &s, step as u64);
                if step == 1 {
                    y1_in_a = edges.iter().map(|&(u, c)| y[u] == y[c]).collect();
                }
                at.push(record(&x, &y));
            }
            let mut z = vec![0u8; n];
            sample_blocks(&mut z, &mut s.stream(u64::MAX, domain::INIT), false);
            let f_stationary = edges[..r_hat].iter().filter(|&&(u, c)| z[u] == z[c]).count();
            Replica { at, y1_in_a, f_stationary }
        })
        .collect();

    let nr = spec.replicas as f64;
    let p = potts.p();
    let w: f64 = mu_a[..r_hat].iter().sum();
    let rr = r_hat as f64;
    let hoeffding_a = w + (rr * rr.ln().max(0.0)).sqrt();
    let mut stat_ge = vec![0.0; r_hat + 2];
    for rep in &reps {
        for a in 0..=rep.f_stationary {
            stat_ge[a] += 1.0 / nr;
        }
    }
    let depth_gap = t.depth(edges[0].0) - (t.depth(roots[0]) - 1);
    let rows = spec
        .alphas
        .iter()
        .zip(&taus)
        .map(|(&alpha, &tau)| {
            let contained = reps.iter().filter(|r| r.at[tau].0).count();
            let (ci_low, ci_high) = clopper_pearson(contained, spec.replicas, 0.99);
            let reach = reps.iter().map(|r| r.at[tau].1.iter().filter(|&&b| b).count()).sum::<usize>() as f64
                / (nr * nblocks as f64);
            let reach_bound = if tau == 0 {
                0.0
            } else if p >= 1.0 {
                1.0
            } else {
                NegativeBinomial::new(tau as f64, 1.0 - p)
                    .map(|nb| nb.sf(depth_gap as u64 - 1))
                    .unwrap_or(1.0)
            };
            let mut ge = vec![0.0; r_hat + 2];
            for rep in &reps {
                for a in 0..=rep.at[tau].2 {
                    ge[a] += 1.0 / nr;
                }
            }
            let (tv_a, tv) = (0..=r_hat)
                .map(|a| (a, ge[a] - stat_ge[a]))
                .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
            let a_idx = (hoeffding_a.ceil() as usize).min(r_hat + 1);
            LbRow {
                alpha,
                tau,
                contained,
                freq: contained as f64 / nr,
                ci_low,
                ci_high,
                reach_freq: reach,
                reach_bound,
                f_mean: reps.iter().map(|r| r.at[tau].2 as f64).sum::<f64>() / nr,
                w,
                hoeffding_a,
                pr_f_ge_a: ge[a_idx],
                pr_stat_f_ge_a: stat_ge[a_idx],
                tv_plugin: tv,
                tv_plugin_a: tv_a,
            }
        })
        .collect::<Vec<_>>();
    let q = spec.q as f64;
    let surplus: Vec<SurplusRow> = (0..nblocks)
        .map(|i| {
            let f = reps.iter().filter(|r| r.y1_in_a[i]).count() as f64 / nr;
            let sigma = (f * (1.0 - f) / nr).sqrt();
            let bound = (1.0 - mu_a[i]) * (q - 1.0) * p / q;
            let surplus = f - mu_a[i];
            SurplusRow {
                block: i,
                mu_a: mu_a[i],
                y1_freq: f,
                surplus,
                bound,
                sigma,
                ok: surplus >= bound - 3.0 * sigma,
            }
        })
        .collect();
    Ok(LbReport {
        spec: spec.clone(),
        n,
        k,
        blocks: nblocks,
        r_hat,
        containment_ok: rows.iter().any(|r| r.ci_low >= 0.9),
        surplus_ok: surplus.iter().all(|s| s.ok),
        rows,
        surplus,
    })
}

/// Index of `u` inside the BFS numbering of the subtree rooted at `v`.
fn relative(t: &Tree, v: usize, u: usize) -> usize {
    let j = (t.depth(u) - t.depth(v)) as u32;
    let dj = t.d.pow(j);
    let first_abs = dj * v + (dj - 1) / (t.d - 1);
    (dj - 1) / (t.d - 1) + (u - first_abs)
}
