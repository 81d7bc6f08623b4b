//! Complete monotonicity of `Pr(X_t in B)` for PSD reversible chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::matrix::{Kernel, TransitionMatrix};
use crate::exact::spectral::{check_psd, spectrum};

#[derive(Clone, Debug, Serialize)]
pub struct CmdRow {
    pub event: usize,
    pub t: usize,
    pub pi_b: f64,
    pub prob: f64,
    /// `pi(B) + (1-pi(B))^{1-t} (Pr(X_1 in B) - pi(B))^t` (for `t >= 1`).
    pub bound: f64,
    /// `prob - max(pi(B), bound)`; negative means a violation.
    pub slack: f64,
}

/// `count` random events, each state kept with probability 1/2, never empty
/// or full.
pub fn random_events(states: usize, count: usize, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let b: Vec<bool> = (0..states).map(|_| rng.gen::<bool>()).collect();
            if b.iter().any(|&x| x) && !b.iter().all(|&x| x) {
                break b;
            }
        })
        .collect()
}

/// Exact `Pr(X_t in B)` for `X_0 ~ pi` restricted to `B`, `t = 1..=horizon`.
pub fn cmd_check(p: &TransitionMatrix, events: &[Vec<bool>], horizon: usize) -> Result<Vec<CmdRow>> {
    check_psd(&spectrum(p)?, 1e-12)?;
    let n = p.n();
    let mut rows = Vec::with_capacity(events.len() * horizon);
    for (k, b) in events.iter().enumerate() {
        let pi_b: f64 = (0..n).filter(|&i| b[i]).map(|i| p.pi[i]).sum();
        if pi_b <= 0.0 {
            return Err(Error::EmptySet("event B has zero mass"));
        }
        let mut mu: Vec<f64> = (0..n).map(|i| if b[i] { p.pi[i] / pi_b } else { 0.0 }).collect();
        let mut next = vec![0.0; n];
        let mut first = 0.0;
        for t in 1..=horizon {
            p.push(&mu, &mut next);
            std::mem::swap(&mut mu, &mut next);
            let prob: f64 = (0..n).filter(|&i| b[i]).map(|i| mu[i]).sum();
            if t == 1 {
                first = prob;
            }
            let rest = 1.0 - pi_b;
            let bound = if rest <= 0.0 {
                pi_b
            } else {
                pi_b + rest * ((first - pi_b) / rest).powi(t as i32)
            };
            rows.push(CmdRow {
                event: k,
                t,
                pi_b,
                prob,
                bound,
                slack: prob - pi_b.max(bound),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::kernels::sw_matrix;
    use crate::model::{Potts, SpinBoundary, SpinModel};
    use crate::tree::Tree;

    fn sw() -> TransitionMatrix {
        let t = Tree::new(2, 1).unwrap();
        let b = SpinBoundary::mono(&t, 0);
        sw_matrix(&SpinModel::new(t, Potts::new(2, 2f64.ln()).unwrap(), b).unwrap()).unwrap()
    }

    #[test]
    fn full_space_and_first_step() {
        let p = sw();
        let rows = cmd_check(&p, &[vec![true; p.n()]], 3).unwrap();
        assert!(rows.iter().all(|r| (r.prob - 1.0).abs() < 1e-12 && (r.bound - 1.0).abs() < 1e-12));
        let ev = random_events(p.n(), 5, 2);
        let rows = cmd_check(&p, &ev, 50).unwrap();
        for r in rows.iter().filter(|r| r.t == 1) {
            assert!((r.prob - r.bound).abs() < 1e-14);
        }
        assert!(rows.iter().all(|r| r.slack >= -1e-12));
    }

    #[test]
    fn rejects_non_psd() {
        let flip = crate::exact::matrix::two_state(1.0, 1.0);
        assert!(cmd_check(&flip, &[vec![true, false]], 2).is_err());
    }
}
