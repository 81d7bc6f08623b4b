//! Potts and Edwards-Sokal measures on a tree with a spin boundary.

use crate::error::{check_cap, invalid, Result, WEIGHT_CAP};
use crate::model::boundary::SpinBoundary;
use crate::model::params::Potts;
use crate::tree::Tree;

/// An exact finite distribution. `support[k]` is a configuration code and
/// `probs[k]` its probability.
#[derive(Clone, Debug)]
pub struct MeasureTable {
    pub support: Vec<usize>,
    pub probs: Vec<f64>,
    pub log_z: f64,
}

impl MeasureTable {
    pub fn from_log_weights(support: Vec<usize>, logw: Vec<f64>) -> Self {
        let m = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = logw.iter().map(|&l| (l - m).exp()).collect();
        let s: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|x| *x /= s);
        MeasureTable {
            support,
            probs,
            log_z: m + s.ln(),
        }
    }

    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }
}

/// Output of [`SpinModel::clusters`].
#[derive(Clone, Debug)]
pub struct Clusters {
    pub top: Vec<usize>,
    pub free: Vec<bool>,
}

impl Clusters {
    /// Tops of the clusters that get a fresh spin.
    pub fn recolored(&self) -> Vec<usize> {
        (0..self.top.len())
            .filter(|&v| self.top[v] == v && self.free[v])
            .collect()
    }
}

/// Potts model on `T ∪ ∂T` with boundary spins.
#[derive(Clone, Debug)]
pub struct SpinModel {
    pub tree: Tree,
    pub potts: Potts,
    pub boundary: SpinBoundary,
}

impl SpinModel {
    pub fn new(tree: Tree, potts: Potts, boundary: SpinBoundary) -> Result<Self> {
        boundary.check(potts.q)?;
        if boundary.slots().len() != tree.nb {
            return Err(invalid("boundary", "size does not match the tree"));
        }
        Ok(SpinModel {
            tree,
            potts,
            boundary,
        })
    }

    pub fn q(&self) -> usize {
        self.potts.q
    }

    pub fn n(&self) -> usize {
        self.tree.n
    }

    pub fn num_states(&self) -> Result<usize> {
        let needed = (self.q() as u128)
            .checked_pow(self.n() as u32)
            .unwrap_or(u128::MAX);
        check_cap("spin configurations", needed, WEIGHT_CAP)?;
        Ok(needed as usize)
    }

    pub fn decode(&self, mut code: usize) -> Vec<u8> {
        let q = self.q();
        (0..self.n())
            .map(|_| {
                let s = (code % q) as u8;
                code /= q;
                s
            })
            .collect()
    }

    pub fn encode(&self, sigma: &[u8]) -> usize {
        sigma.iter().rev().fold(0, |acc, &s| acc * self.q() + s as usize)
    }

    pub fn spin(&self, sigma: &[u8], node: usize) -> Option<u8> {
        if node < self.tree.n {
            Some(sigma[node])
        } else {
            self.boundary.at(&self.tree, node)
        }
    }

    /// Edges whose both endpoints carry a spin (free slots drop out).
    pub fn active_edges(&self) -> Vec<usize> {
        (0..self.tree.num_edges())
            .filter(|&e| {
                let (_, c) = self.tree.edge(e);
                c < self.tree.n || self.boundary.at(&self.tree, c).is_some()
            })
            .collect()
    }

    pub fn is_active(&self, e: usize) -> bool {
        let (_, c) = self.tree.edge(e);
        c < self.tree.n || self.boundary.at(&self.tree, c).is_some()
    }

    /// `Some(true)` if `e` is monochromatic, `None` if inactive.
    pub fn mono(&self, sigma: &[u8], e: usize) -> Option<bool> {
        let (a, b) = self.tree.edge(e);
        Some(self.spin(sigma, a)? == self.spin(sigma, b)?)
    }

    pub fn mono_edges(&self, sigma: &[u8]) -> Vec<usize> {
        (0..self.tree.num_edges())
            .filter(|&e| self.mono(sigma, e) == Some(true))
            .collect()
    }

    pub fn bichromatic(&self, sigma: &[u8]) -> usize {
        (0..self.tree.num_edges())
            .filter(|&e| self.mono(sigma, e) == Some(false))
            .count()
    }

    pub fn log_weight(&self, sigma: &[u8]) -> f64 {
        let k = self.bichromatic(sigma);
        if k == 0 {
            0.0
        } else {
            -self.potts.beta * k as f64
        }
    }

    /// Gibbs measure on the whole tree, indexed by configuration code.
    pub fn gibbs(&self) -> Result<MeasureTable> {
        let ns = self.num_states()?;
        let logw: Vec<f64> = (0..ns).map(|c| self.log_weight(&self.decode(c))).collect();
        Ok(MeasureTable::from_log_weights((0..ns).collect(), logw))
    }

    /// `mu_A^eta`: spins outside `region` fixed by `eta` (a full configuration).
    pub fn conditional(&self, region: &[usize], eta: &[u8]) -> Result<MeasureTable> {
        let q = self.q();
        let needed = (q as u128).checked_pow(region.len() as u32).unwrap_or(u128::MAX);
        check_cap("conditional table", needed, WEIGHT_CAP)?;
        let mut inside = vec![false; self.n()];
        for &v in region {
            inside[v] = true;
        }
        let edges: Vec<usize> = (0..self.tree.num_edges())
            .filter(|&e| {
                let (a, b) = self.tree.edge(e);
                inside[a] || (b < self.n() && inside[b])
            })
            .collect();
        let mut sigma = eta.to_vec();
        let mut support = Vec::with_capacity(needed as usize);
        let mut logw = Vec::with_capacity(needed as usize);
        for k in 0..needed as usize {
            let mut c = k;
            for &v in region {
                sigma[v] = (c % q) as u8;
                c /= q;
            }
            let bi = edges
                .iter()
                .filter(|&&e| self.mono(&sigma, e) == Some(false))
                .count();
            support.push(self.encode(&sigma));
            logw.push(if bi == 0 { 0.0 } else { -self.potts.beta * bi as f64 });
        }
        Ok(MeasureTable::from_log_weights(support, logw))
    }

    /// Clusters of the open edges among internal vertices. A cluster is
    /// named by its highest vertex; `free[top]` says it avoids the boundary
    /// and, if `block` is given, stays inside the block.
    pub fn clusters(&self, open: impl Fn(usize) -> bool, block: Option<&[bool]>) -> Clusters {
        let t = &self.tree;
        let mut top = vec![0; t.n];
        let mut free = vec![true; t.n];
        for v in 0..t.n {
            top[v] = match t.parent(v) {
                Some(p) if open(t.edge_to(v)) => top[p],
                _ => v,
            };
            let r = top[v];
            if t.children(v).any(|c| c >= t.n && open(t.edge_to(c))) {
                free[r] = false;
            }
            if let Some(b) = block {
                if !b[v] {
                    free[r] = false;
                }
            }
        }
        Clusters { top, free }
    }

    /// Edwards-Sokal joint measure. Joint states are `code * 2^|E| + edge mask`.
    pub fn edwards_sokal(&self) -> Result<MeasureTable> {
        let ne = self.tree.num_edges();
        let ns = self.num_states()?;
        let needed = (ns as u128) << ne;
        check_cap("joint spin-edge space", needed, WEIGHT_CAP)?;
        let p = self.potts.p();
        let active = self.active_edges();
        let mut support = Vec::new();
        let mut logw = Vec::new();
        for c in 0..ns {
            let sigma = self.decode(c);
            let mono = self.mono_edges(&sigma);
            let mono_mask: u64 = mono.iter().map(|&e| 1u64 << e).sum();
            let active_mask: u64 = active.iter().map(|&e| 1u64 << e).sum();
            for a in 0..(1u64 << ne) {
                let ok = a & !mono_mask == 0 && a & !active_mask == 0;
                let k = a.count_ones() as f64;
                let rest = active.len() as f64 - k;
                support.push(c << ne | a as usize);
                logw.push(if ok {
                    k * p.ln() + rest * (1.0 - p).ln()
                } else {
                    f64::NEG_INFINITY
                });
            }
        }
        Ok(MeasureTable::from_log_weights(support, logw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(d: usize, h: usize, q: usize, beta: f64) -> SpinModel {
        let t = Tree::new(d, h).unwrap();
        let b = SpinBoundary::mono(&t, 0);
        SpinModel::new(t, Potts::new(q, beta).unwrap(), b).unwrap()
    }

    #[test]
    fn beta_zero_uniform() {
        let m = model(2, 1, 3, 0.0);
        let g = m.gibbs().unwrap();
        assert!(g.probs.iter().all(|&x| (x - 1.0 / 27.0).abs() < 1e-15));
    }

    #[test]
    fn leaf_with_mono_neighbors() {
        // leaf 1 of the d=2,h=1 tree: parent 0 and slots 3,4
        let m = model(2, 1, 2, 2f64.ln());
        let t = m.conditional(&[1], &[0, 0, 0]).unwrap();
        let p1 = t.support.iter().zip(&t.probs).find(|(&c, _)| m.decode(c)[1] == 0).unwrap().1;
        assert!((p1 - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn empty_region_point_mass() {
        let m = model(2, 1, 2, 1.0);
        let t = m.conditional(&[], &[1, 0, 1]).unwrap();
        assert_eq!(t.support, vec![m.encode(&[1, 0, 1])]);
        assert_eq!(t.probs, vec![1.0]);
    }

    #[test]
    fn encode_roundtrip() {
        let m = model(2, 2, 3, 1.0);
        for c in [0, 5, 100, 2186] {
            assert_eq!(m.encode(&m.decode(c)), c);
        }
    }

    #[test]
    fn relabel_invariance() {
        let t = Tree::new(2, 2).unwrap();
        let pp = Potts::new(3, 0.7).unwrap();
        let z0 = SpinModel::new(t.clone(), pp, SpinBoundary::mono(&t, 0)).unwrap().gibbs().unwrap();
        let z2 = SpinModel::new(t.clone(), pp, SpinBoundary::mono(&t, 2)).unwrap().gibbs().unwrap();
        assert!((z0.log_z - z2.log_z).abs() < 1e-12);
    }

    #[test]
    fn es_spin_marginal() {
        let m = model(2, 0, 2, 2f64.ln());
        let es = m.edwards_sokal().unwrap();
        let g = m.gibbs().unwrap();
        let ne = m.tree.num_edges();
        let mut marg = vec![0.0; g.probs.len()];
        for (&s, &p) in es.support.iter().zip(&es.probs) {
            marg[s >> ne] += p;
        }
        for (a, b) in marg.iter().zip(&g.probs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
