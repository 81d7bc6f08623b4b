//! Monte Carlo for the number of gadgets reaching their subtree root under
//! the dominating Bernoulli percolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::beta::beta_reg;

use crate::error::{invalid, Result};
use crate::rng::Streams;
use crate::slowmix::conductance::distorted_classes;
use crate::slowmix::embed::Embedding;

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub h: usize,
    pub ell: usize,
    pub m: usize,
    pub p_hat: f64,
    pub big_m: usize,
    pub r: f64,
    pub samples: usize,
    pub seed: u64,
    /// Samples with more than `M` gadgets joined to their subtree root.
    pub hits: usize,
    pub freq: f64,
    pub ci_level: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `Pr[Bin(m, r) > M]`.
    pub exact_tail: f64,
    pub inside: bool,
    /// Frequency of more than `M` distorted classes (never above `freq`).
    pub freq_distorted: f64,
    pub mean_reached: f64,
    /// Covariance of the reach indicators of gadgets 0 and 1, and its
    /// standard error under independence.
    pub cov01: f64,
    pub cov01_se: f64,
}

/// `x` with `I_x(a, b) = p`. Bisection on the regularized incomplete beta;
/// statrs' own inverse stops near 1e-5, too coarse for pinned intervals.
fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact two-sided Clopper-Pearson interval for `k` successes in `n`.
pub fn clopper_pearson(k: usize, n: usize, level: f64) -> (f64, f64) {
    let a = (1.0 - level) / 2.0;
    let lo = if k == 0 { 0.0 } else { beta_quantile(k as f64, (n - k + 1) as f64, a) };
    let hi = if k == n { 1.0 } else { beta_quantile((k + 1) as f64, (n - k) as f64, 1.0 - a) };
    (lo, hi)
}

const CHUNK: usize = 8192;

pub fn tail_monte_carlo(emb: &Embedding, p_hat: f64, big_m: usize, samples: usize, seed: u64) -> Result<TailReport> {
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(invalid("p_hat", format!("need 0 <= p_hat <= 1, got {p_hat}")));
    }
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let t = &emb.tree;
    let used = emb.used();
    let m = used.len();
    let classes = emb.gadget_classes();
    let gf = emb.gadget_flags();
    let bulk: Vec<usize> = (0..t.num_edges()).filter(|&e| !gf[e]).collect();
    // Edges on the path from c_i up to the root of B_i.
    let paths: Vec<Vec<usize>> = used
        .iter()
        .map(|g| {
            let mut v = g.c;
            let mut path = Vec::new();
            while v != g.root {
                path.push(t.edge_to(v));
                v = t.parent(v).expect("c lies below its subtree root");
            }
            path
        })
        .collect();
    let streams = Streams::new(seed);
    let chunks = samples.div_ceil(CHUNK);
    // (hits, distorted hits, sum reached, n0, n1, n01)
    let totals = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(streams.replica(c as u64).seed);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut open = vec![false; t.num_edges()];
            let mut acc = [0usize; 6];
            for _ in 0..count {
                for &e in &bulk {
                    open[e] = rng.gen::<f64>() < p_hat;
                }
                let reach: Vec<bool> = paths.iter().map(|p| p.iter().all(|&e| open[e])).collect();
                let x = reach.iter().filter(|&&b| b).count();
                acc[0] += (x > big_m) as usize;
                acc[1] += (distorted_classes(emb, |e| open[e], &classes) > big_m) as usize;
                acc[2] += x;
                if m >= 2 {
                    acc[3] += reach[0] as usize;
                    acc[4] += reach[1] as usize;
                    acc[5] += (reach[0] && reach[1]) as usize;
                }
            }
            acc
        })
        .reduce(|| [0; 6], |a, b| std::array::from_fn(|i| a[i] + b[i]));
    let n = samples as f64;
    let r = p_hat.powi(emb.ell as i32 - 1);
    let exact_tail = Binomial::new(r, m as u64)
        .map_err(|e| invalid("p_hat", e.to_string()))?
        .sf(big_m as u64);
    let level = 0.99;
    let (ci_low, ci_high) = clopper_pearson(totals[0], samples, level);
    let (f0, f1) = (totals[3] as f64 / n, totals[4] as f64 / n);
    Ok(TailReport {
        h: emb.h,
        ell: emb.ell,
        m,
        p_hat,
        big_m,
        r,
        samples,
        seed,
        hits: totals[0],
        freq: totals[0] as f64 / n,
        ci_level: level,
        ci_low,
        ci_high,
        exact_tail,
        inside: ci_low <= exact_tail && exact_tail <= ci_high,
        freq_distorted: totals[1] as f64 / n,
        mean_reached: totals[2] as f64 / n,
        cov01: totals[5] as f64 / n - f0 * f1,
        cov01_se: (f0 * (1.0 - f0) * f1 * (1.0 - f1) / n).sqrt(),
    })
}
