//! Subtree dynamic programming for Potts conditionals on trees.

use rand::Rng;

use crate::model::spin::SpinModel;
use crate::rng::pick;

/// Upward messages for the vertices flagged in `inside`, with all other
/// spins read from `sigma`. `extra_root` adds a pinned parent above vertex 0.
fn messages(m: &SpinModel, sigma: &[u8], inside: &[bool], extra_root: Option<u8>) -> Vec<f64> {
    let q = m.q();
    let w = m.potts.w();
    let t = &m.tree;
    let mut msg = vec![0.0; t.n * q];
    for v in (0..t.n).rev() {
        if !inside[v] {
            continue;
        }
        let mut cur = vec![1.0; q];
        let mut pin = |spin: u8| {
            for (s, c) in cur.iter_mut().enumerate() {
                if s != spin as usize {
                    *c *= w;
                }
            }
        };
        match t.parent(v) {
            Some(p) if !inside[p] => pin(sigma[p]),
            None => {
                if let Some(s) = extra_root {
                    pin(s)
                }
            }
            _ => {}
        }
        for c in t.children(v) {
            if c >= t.n {
                if let Some(s) = m.boundary.at(t, c) {
                    pin(s);
                }
            } else if !inside[c] {
                pin(sigma[c]);
            }
        }
        for c in t.children(v).filter(|&c| c < t.n && inside[c]) {
            let mc = &msg[c * q..(c + 1) * q];
            let total: f64 = mc.iter().sum();
            for (s, x) in cur.iter_mut().enumerate() {
                *x *= w * total + (1.0 - w) * mc[s];
            }
        }
        let z: f64 = cur.iter().sum();
        for (s, x) in cur.into_iter().enumerate() {
            msg[v * q + s] = x / z;
        }
    }
    msg
}

/// Resample the spins on `inside` from the conditional Gibbs measure given
/// the rest of `sigma`.
pub fn sample_region<R: Rng + ?Sized>(m: &SpinModel, sigma: &mut [u8], inside: &[bool], rng: &mut R) {
    let q = m.q();
    let w = m.potts.w();
    let msg = messages(m, sigma, inside, None);
    for v in 0..m.tree.n {
        if !inside[v] {
            continue;
        }
        let mut weights = msg[v * q..(v + 1) * q].to_vec();
        if let Some(p) = m.tree.parent(v).filter(|&p| inside[p]) {
            for (s, x) in weights.iter_mut().enumerate() {
                if s != sigma[p] as usize {
                    *x *= w;
                }
            }
        }
        sigma[v] = pick(rng, &weights) as u8;
    }
}

/// Joint law of the spins at `(u, child)` for the whole-tree measure, where
/// `child` is a child of `u`; `root_parent` pins a parent above the root.
pub fn edge_marginal(m: &SpinModel, root_parent: Option<u8>, u: usize, child: usize) -> Vec<Vec<f64>> {
    let q = m.q();
    let w = m.potts.w();
    let t = &m.tree;
    let inside = vec![true; t.n];
    let sigma = vec![0u8; t.n];
    let msg = messages(m, &sigma, &inside, root_parent);
    let mut path = vec![child];
    while let Some(p) = t.parent(*path.last().unwrap()) {
        path.push(p);
    }
    path.reverse();
    let mut dist = msg[0..q].to_vec();
    let mut joint = vec![vec![0.0; q]; q];
    for k in 1..path.len() {
        let c = path[k];
        let mc = &msg[c * q..(c + 1) * q];
        let mut next = vec![0.0; q];
        for s in 0..q {
            let row: Vec<f64> = (0..q).map(|r| if r == s { mc[r] } else { w * mc[r] }).collect();
            let z: f64 = row.iter().sum();
            for r in 0..q {
                let x = dist[s] * row[r] / z;
                next[r] += x;
                if c == child && path[k - 1] == u {
                    joint[s][r] = x;
                }
            }
        }
        dist = next;
    }
    joint
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Potts, SpinBoundary};
    use crate::tree::Tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(beta: f64) -> SpinModel {
        let t = Tree::new(2, 1).unwrap();
        let b = SpinBoundary::list(&t, vec![0, 1, 1, 0]).unwrap();
        SpinModel::new(t, Potts::new(3, beta).unwrap(), b).unwrap()
    }

    #[test]
    fn region_sampler_matches_table() {
        let m = model(0.8);
        let g = m.gibbs().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut counts = vec![0.0; g.probs.len()];
        let reps = 200_000;
        for _ in 0..reps {
            let mut s = vec![0u8; 3];
            sample_region(&m, &mut s, &[true; 3], &mut rng);
            counts[m.encode(&s)] += 1.0;
        }
        for (c, p) in counts.iter().zip(&g.probs) {
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((c / reps as f64 - p).abs() < 5.0 * se + 1e-9);
        }
    }

    #[test]
    fn edge_marginal_matches_table() {
        let m = model(1.3);
        let g = m.gibbs().unwrap();
        let j = edge_marginal(&m, None, 0, 1);
        for s in 0..3 {
            for r in 0..3 {
                let exact: f64 = (0..g.probs.len())
                    .filter(|&c| {
                        let x = m.decode(c);
                        x[0] == s && x[1] == r
                    })
                    .map(|c| g.probs[c])
                    .sum();
                assert!((j[s as usize][r as usize] - exact).abs() < 1e-13);
            }
        }
    }
}
