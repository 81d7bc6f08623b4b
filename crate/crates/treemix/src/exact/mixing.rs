//! Total-variation mixing times by repeated pushes of point masses.

use serde::Serialize;

use crate::exact::matrix::Kernel;

#[derive(Clone, Debug, Serialize)]
pub struct MixReport {
    /// First `t` with worst-start TV <= 1/4; `None` if not reached.
    pub tau: Option<usize>,
    pub worst_start: Option<usize>,
    /// Worst TV over starts at each `t = 0, 1, ...`.
    pub tv_curve: Vec<f64>,
    pub starts: usize,
}

pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Worst-start mixing time over the given `starts` (all states if `None`).
pub fn tv_mixing_time<K: Kernel>(k: &K, pi: &[f64], starts: Option<&[usize]>, max_t: usize) -> MixReport {
    let n = k.dim();
    let all: Vec<usize>;
    let starts = match starts {
        Some(s) => s,
        None => {
            all = (0..n).collect();
            &all
        }
    };
    let mut curve = vec![0.0f64; max_t + 1];
    let mut worst: Option<(usize, usize)> = None;
    let mut diverged = None;
    let mut mu = vec![0.0; n];
    let mut next = vec![0.0; n];
    for &s in starts {
        mu.iter_mut().for_each(|x| *x = 0.0);
        mu[s] = 1.0;
        let mut t = 0;
        let mut d = tv(&mu, pi);
        curve[0] = curve[0].max(d);
        while d > 0.25 && t < max_t {
            k.push(&mu, &mut next);
            std::mem::swap(&mut mu, &mut next);
            t += 1;
            d = tv(&mu, pi);
            curve[t] = curve[t].max(d);
        }
        if d > 0.25 {
            diverged = Some(s);
            break;
        }
        if worst.map_or(true, |(t0, _)| t > t0) {
            worst = Some((t, s));
        }
    }
    let (tau, worst_start) = match (diverged, worst) {
        (Some(s), _) => (None, Some(s)),
        (None, Some((t, s))) => (Some(t), Some(s)),
        (None, None) => (Some(0), None),
    };
    let last = tau.unwrap_or(max_t);
    curve.truncate(last + 1);
    MixReport {
        tau,
        worst_start,
        tv_curve: curve,
        starts: starts.len(),
    }
}

/// Relaxation-time bracket `(t_rel - 1) ln 2 <= tau <= t_rel ln(4/pi_min)`.
pub fn relaxation_bracket(gap_abs: f64, pi_min: f64) -> (f64, f64) {
    let t_rel = 1.0 / gap_abs;
    ((t_rel - 1.0) * 2f64.ln(), t_rel * (4.0 / pi_min).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::{two_state, TransitionMatrix};
    use nalgebra::DMatrix;

    #[test]
    fn rows_equal_pi_mix_in_one() {
        let p = DMatrix::from_row_slice(2, 2, &[0.3, 0.7, 0.3, 0.7]);
        let m = TransitionMatrix::new(p, vec![0.3, 0.7]);
        assert_eq!(tv_mixing_time(&m, &m.pi, None, 100).tau, Some(1));
    }

    #[test]
    fn identity_diverges() {
        let m = TransitionMatrix::new(DMatrix::identity(2, 2), vec![0.5, 0.5]);
        assert_eq!(tv_mixing_time(&m, &m.pi, None, 50).tau, None);
    }

    #[test]
    fn two_state_curve() {
        let m = two_state(0.1, 0.1);
        let r = tv_mixing_time(&m, &m.pi, None, 100);
        // TV from a point is 0.5 * 0.8^t
        assert_eq!(r.tau, Some(4));
        let (lo, hi) = relaxation_bracket(0.2, 0.5);
        assert!(lo <= 4.0 && 4.0 <= hi);
    }
}
