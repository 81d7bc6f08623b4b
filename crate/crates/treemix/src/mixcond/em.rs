//! Entropy-mixing constant, estimated from below by direct maximization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::mixcond::updown::UpDown;
use crate::mixcond::vm::{far_set, joint_marginal};
use crate::mixcond::{Certificate, Condition, Mode, Witness};
use crate::model::SpinModel;

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

struct EntRatio<'a> {
    ud: &'a UpDown,
}

impl EntRatio<'_> {
    /// `(Ent_pi(g_v), Ent_nu(g), g_v, E g)` for `g = exp(theta)`.
    fn parts(&self, g: &[f64]) -> (f64, f64, Vec<f64>, f64) {
        let nu = &self.ud.nu;
        let pi = &self.ud.pi;
        let e: f64 = nu.iter().zip(g).map(|(a, b)| a * b).sum();
        let gv: Vec<f64> = (0..pi.len())
            .map(|j| self.ud.down.row(j).iter().zip(g).map(|(a, b)| a * b).sum())
            .collect();
        let den = nu.iter().zip(g).map(|(a, &b)| a * xlogx(b)).sum::<f64>() - xlogx(e);
        let num = pi.iter().zip(&gv).map(|(a, &b)| a * xlogx(b)).sum::<f64>() - xlogx(e);
        (num, den, gv, e)
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let g: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        let (num, den, _, _) = self.parts(&g);
        if den > 1e-300 {
            (num / den).max(0.0)
        } else {
            0.0
        }
    }

    fn grad(&self, theta: &[f64]) -> Vec<f64> {
        let g: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        let (num, den, gv, e) = self.parts(&g);
        let nu = &self.ud.nu;
        let pi = &self.ud.pi;
        (0..g.len())
            .map(|i| {
                let dd = nu[i] * (g[i] / e).ln();
                // rho(i, j) = pi_j down(j, i)
                let dn: f64 = (0..pi.len()).map(|j| pi[j] * self.ud.down[(j, i)] * (gv[j] / e).ln()).sum();
                g[i] * (dn * den - num * dd) / (den * den)
            })
            .collect()
    }

    /// Normalized gradient ascent in `log g` with step halving.
    fn ascend(&self, mut theta: Vec<f64>, iters: usize) -> f64 {
        let mut val = self.value(&theta);
        let mut step = 1.0;
        for _ in 0..iters {
            let g = self.grad(&theta);
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm < 1e-14 {
                break;
            }
            loop {
                let cand: Vec<f64> = theta.iter().zip(&g).map(|(t, d)| t + step * d / norm).collect();
                let v = self.value(&cand);
                if v > val {
                    theta = cand;
                    val = v;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
                if step < 1e-10 {
                    return val;
                }
            }
        }
        val
    }
}

/// Largest `Ent(g_v) / Ent(g)` found over `g > 0` on the far configuration,
/// for one `(v, eta)` cell. The linearized value `lambda_2` (the limit
/// `g = 1 + t f`, `t -> 0`) is included as a candidate.
pub fn em_cell(ud: &UpDown, restarts: usize, iters: usize, seed: u64) -> Result<f64> {
    if ud.is_degenerate() {
        return Ok(0.0);
    }
    let r = EntRatio { ud };
    let n = ud.nu.len();
    let mut best = ud.epsilon()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..restarts {
        let scale = [0.3, 1.0, 3.0][k % 3];
        let theta: Vec<f64> = (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        best = best.max(r.ascend(theta, iters));
    }
    Ok(best.min(1.0))
}

/// Lower estimate of `eps_EM` over all vertices and parent spins.
pub fn em_epsilon_estimate(m: &SpinModel, ell: usize, restarts: usize, iters: usize, seed: u64) -> Result<Certificate> {
    let mut best = 0.0;
    let mut witness = None;
    let mut cells = 0;
    for v in 0..m.n() {
        let far = far_set(m, v, ell);
        if far.is_empty() {
            continue;
        }
        let spins: Vec<Option<u8>> = match m.tree.parent(v) {
            Some(_) => (0..m.q() as u8).map(Some).collect(),
            None => vec![None],
        };
        for s in spins {
            let mut eta = vec![0u8; m.n()];
            if let (Some(p), Some(s)) = (m.tree.parent(v), s) {
                eta[p] = s;
            }
            let rho = joint_marginal(m, &m.tree.subtree(v), &eta, &far, &[v])?;
            let ud = UpDown::new(&rho)?;
            let e = em_cell(&ud, restarts, iters, seed ^ (v as u64) << 8 ^ s.unwrap_or(255) as u64)?;
            cells += 1;
            if witness.is_none() || e > best {
                best = e;
                witness = Some(Witness {
                    site: v,
                    eta: s.map(|s| vec![s + 1]).unwrap_or_default(),
                });
            }
        }
    }
    Ok(Certificate {
        condition: Condition::Em,
        ell,
        epsilon: best,
        lower_bound: true,
        mode: Mode::Exhaustive,
        cells,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Potts, SpinBoundary};
    use crate::tree::Tree;

    fn model(beta: f64) -> SpinModel {
        let t = Tree::new(2, 2).unwrap();
        let b = SpinBoundary::mono(&t, 0);
        SpinModel::new(t, Potts::new(2, beta).unwrap(), b).unwrap()
    }

    #[test]
    fn beta_zero_is_zero() {
        let c = em_epsilon_estimate(&model(0.0), 1, 3, 50, 1).unwrap();
        assert!(c.epsilon < 1e-12);
    }

    #[test]
    fn bounded_and_stable_across_seeds() {
        let m = model(1.0);
        let a = em_epsilon_estimate(&m, 1, 12, 400, 1).unwrap().epsilon;
        let b = em_epsilon_estimate(&m, 1, 12, 400, 2).unwrap().epsilon;
        assert!(a <= 1.0 && b <= 1.0);
        assert!((a - b).abs() < 1e-4, "{a} {b}");
    }
}
