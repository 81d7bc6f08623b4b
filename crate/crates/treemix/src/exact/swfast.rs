//! Structured SW operator on a tree: `mu P` without forming `P`.
//!
//! For a vertex `v` with parent spins `(s, s')` (old, new) the subtree kernel
//! `K_v^{(s,s'),x}` sums the edge-percolation and recoloring weights inside
//! `T_v`, including the parent edge. `x = any` is unrestricted and `x = zero`
//! keeps the cluster of `v` away from the boundary. A cluster closed off at
//! its top vertex weighs `1/q` if it avoids the boundary and `1` otherwise,
//! so with `C_x = ⊗_c K_c^{(t,t'),x}`:
//!
//! ```text
//! K^x = (1 - p m) [C_zero / q + C_any - C_zero] + p m 1(t' = s') C_x,   m = 1(t = s)
//! ```
//!
//! Local indices put the vertex spin first, then children with the first
//! child least significant.

use nalgebra::DMatrix;

use crate::error::{check_cap, Result, DENSE_CAP, MATRIX_CAP};
use crate::exact::matrix::{Kernel, TransitionMatrix};
use crate::model::SpinModel;

/// `[x][s * q + s']`, `x = 0` any, `x = 1` zero.
type Pairs = [Vec<DMatrix<f64>>; 2];

pub struct SwOperator {
    q: usize,
    children: Vec<Pairs>,
    dims: Vec<usize>,
    to_local: Vec<u32>,
    pub pi: Vec<f64>,
}

fn kron_children(kids: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let mut acc = DMatrix::from_element(1, 1, 1.0);
    for k in kids {
        acc = k.kronecker(&acc);
    }
    acc
}

fn node_pairs(m: &SpinModel, v: usize) -> Pairs {
    let q = m.q();
    let p = m.potts.p();
    let t = &m.tree;
    let mut any = Vec::with_capacity(q * q);
    let mut zero = Vec::with_capacity(q * q);
    if t.is_boundary(v) {
        let tau = m.boundary.at(t, v);
        for s in 0..q {
            for s2 in 0..q {
                let (a, z) = match tau {
                    None => (1.0, 1.0),
                    Some(tau) => {
                        let mono = if s == tau as usize { 1.0 } else { 0.0 };
                        let keep = if s2 == tau as usize { 1.0 } else { 0.0 };
                        (1.0 - p * mono + p * mono * keep, 1.0 - p * mono)
                    }
                };
                any.push(DMatrix::from_element(1, 1, a));
                zero.push(DMatrix::from_element(1, 1, z));
            }
        }
        return [any, zero];
    }
    let kids: Vec<Pairs> = t.children(v).map(|c| node_pairs(m, c)).collect();
    let inner: usize = kids.iter().map(|k| k[0][0].nrows()).product();
    let dim = q * inner;
    // closed-off and open parts for each (t, t')
    let mut closed = Vec::with_capacity(q * q);
    let mut open = Vec::with_capacity(q * q);
    for tt in 0..q * q {
        let c_any = kron_children(&kids.iter().map(|k| &k[0][tt]).collect::<Vec<_>>());
        let c_zero = kron_children(&kids.iter().map(|k| &k[1][tt]).collect::<Vec<_>>());
        closed.push(&c_zero / q as f64 + (&c_any - &c_zero));
        open.push([c_any, c_zero]);
    }
    for s in 0..q {
        for s2 in 0..q {
            let mut ka = DMatrix::zeros(dim, dim);
            let mut kz = DMatrix::zeros(dim, dim);
            for t0 in 0..q {
                let mono = if t0 == s { 1.0 } else { 0.0 };
                for t1 in 0..q {
                    let tt = t0 * q + t1;
                    let mut ba = &closed[tt] * (1.0 - p * mono);
                    let mut bz = ba.clone();
                    if mono > 0.0 && t1 == s2 {
                        ba += &open[tt][0] * p;
                        bz += &open[tt][1] * p;
                    }
                    for i in 0..inner {
                        for j in 0..inner {
                            ka[(t0 + q * i, t1 + q * j)] = ba[(i, j)];
                            kz[(t0 + q * i, t1 + q * j)] = bz[(i, j)];
                        }
                    }
                }
            }
            any.push(ka);
            zero.push(kz);
        }
    }
    [any, zero]
}

fn local_index(m: &SpinModel, sigma: &[u8], v: usize) -> (usize, usize) {
    let t = &m.tree;
    if t.is_boundary(v) {
        return (0, 1);
    }
    let mut idx = 0;
    let mut stride = 1;
    for c in t.children(v) {
        let (i, d) = local_index(m, sigma, c);
        idx += i * stride;
        stride *= d;
    }
    (sigma[v] as usize + m.q() * idx, m.q() * stride)
}

/// `y[l, j, r] = sum_i x[l, i, r] k[i, j]` for a tensor of shape `(left, n, right)`.
fn mode_product(x: &[f64], k: &DMatrix<f64>, left: usize, right: usize, y: &mut [f64]) {
    let n = k.nrows();
    if left == 1 {
        let xs = nalgebra::DMatrixView::from_slice(x, n, right);
        let mut ys = nalgebra::DMatrixViewMut::from_slice(y, n, right);
        ys.gemm_tr(1.0, k, &xs, 0.0);
        return;
    }
    let block = left * n;
    for r in 0..right {
        let xs = nalgebra::DMatrixView::from_slice(&x[r * block..(r + 1) * block], left, n);
        let mut ys = nalgebra::DMatrixViewMut::from_slice(&mut y[r * block..(r + 1) * block], left, n);
        ys.gemm(1.0, &xs, k, 0.0);
    }
}

impl SwOperator {
    pub fn new(m: &SpinModel) -> Result<Self> {
        let ns = m.num_states()?;
        check_cap("matrix states", ns as u128, MATRIX_CAP)?;
        let q = m.q();
        let t = &m.tree;
        let children: Vec<Pairs> = t.children(0).map(|c| node_pairs(m, c)).collect();
        let dims = children.iter().map(|k| k[0][0].nrows()).collect();
        let to_local = (0..ns)
            .map(|s| local_index(m, &m.decode(s), 0).0 as u32)
            .collect();
        Ok(SwOperator {
            q,
            children,
            dims,
            to_local,
            pi: m.gibbs()?.probs,
        })
    }

    fn push_local(&self, x: &[f64], out: &mut [f64]) {
        let q = self.q;
        let inner: usize = self.dims.iter().product();
        out.iter_mut().for_each(|v| *v = 0.0);
        // slice t of the local vector: entries t + q * i
        let mut xt = vec![0.0; inner];
        let mut a = vec![0.0; inner];
        let mut b = vec![0.0; inner];
        for t0 in 0..q {
            for (i, v) in xt.iter_mut().enumerate() {
                *v = x[t0 + q * i];
            }
            if xt.iter().all(|&v| v == 0.0) {
                continue;
            }
            for t1 in 0..q {
                let tt = t0 * q + t1;
                for (x_idx, coef) in [(0usize, 1.0), (1, 1.0 / q as f64 - 1.0)] {
                    a.copy_from_slice(&xt);
                    let mut left = 1;
                    for (c, kids) in self.children.iter().enumerate() {
                        let n = self.dims[c];
                        mode_product(&a, &kids[x_idx][tt], left, inner / (left * n), &mut b);
                        std::mem::swap(&mut a, &mut b);
                        left *= n;
                    }
                    for (j, v) in a.iter().enumerate() {
                        out[t1 + q * j] += coef * v;
                    }
                }
            }
        }
    }

    /// Row `i` is `e_i P`; only for spaces that fit a dense matrix.
    pub fn to_dense(&self) -> Result<TransitionMatrix> {
        let n = self.dim();
        check_cap("dense matrix states", n as u128, DENSE_CAP)?;
        let mut p = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut row = vec![0.0; n];
        for i in 0..n {
            e[i] = 1.0;
            self.push(&e, &mut row);
            e[i] = 0.0;
            for j in 0..n {
                p[(i, j)] = row[j];
            }
        }
        Ok(TransitionMatrix::new(p, self.pi.clone()))
    }
}

impl Kernel for SwOperator {
    fn dim(&self) -> usize {
        self.to_local.len()
    }

    fn push(&self, mu: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let mut x = vec![0.0; n];
        for (g, &l) in self.to_local.iter().enumerate() {
            x[l as usize] = mu[g];
        }
        let mut y = vec![0.0; n];
        self.push_local(&x, &mut y);
        for (g, &l) in self.to_local.iter().enumerate() {
            out[g] = y[l as usize];
        }
    }
}
