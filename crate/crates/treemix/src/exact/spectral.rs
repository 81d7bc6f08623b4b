//! Spectra of reversible chains via the symmetrized similarity transform.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::exact::matrix::{Kernel, TransitionMatrix};

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub lambda2: f64,
    pub lambda_min: f64,
    /// `1 - max(|lambda2|, |lambda_min|)`.
    pub gap_abs: f64,
    /// `1 - lambda2`.
    pub gap: f64,
    /// Right eigenvector for `lambda2` (a function on states, zero off support).
    pub f2: Vec<f64>,
}

const SYM_TOL: f64 = 1e-10;

/// Spectrum of a chain reversible w.r.t. `pi`; states with `pi = 0` are dropped.
pub fn spectrum_of(p: &DMatrix<f64>, pi: &[f64]) -> Result<Spectrum> {
    let support: Vec<usize> = (0..pi.len()).filter(|&i| pi[i] > 0.0).collect();
    let m = support.len();
    let sq: Vec<f64> = support.iter().map(|&i| pi[i].sqrt()).collect();
    let mut s = DMatrix::zeros(m, m);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            s[(a, b)] = sq[a] * p[(i, j)] / sq[b];
        }
    }
    let asym = (&s - s.transpose()).amax();
    if asym > SYM_TOL {
        return Err(Error::NotReversible(asym));
    }
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let lambda2 = eigenvalues.get(1).copied().unwrap_or(0.0);
    let lambda_min = if m > 1 { eigenvalues[m - 1] } else { 0.0 };
    let mut f2 = vec![0.0; pi.len()];
    if m > 1 {
        let u = eig.eigenvectors.column(order[1]);
        for (a, &i) in support.iter().enumerate() {
            f2[i] = u[a] / sq[a];
        }
    }
    Ok(Spectrum {
        gap_abs: 1.0 - lambda2.abs().max(lambda_min.abs()),
        gap: 1.0 - lambda2,
        lambda2,
        lambda_min,
        eigenvalues,
        f2,
    })
}

pub fn spectrum(m: &TransitionMatrix) -> Result<Spectrum> {
    spectrum_of(&m.p, &m.pi)
}

/// Fails if any eigenvalue is below `-tol`.
pub fn check_psd(s: &Spectrum, tol: f64) -> Result<()> {
    if s.lambda_min < -tol {
        return Err(Error::NotPsd(s.lambda_min));
    }
    Ok(())
}

/// Extreme nontrivial eigenvalues of a large reversible kernel.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LanczosReport {
    pub lambda2: f64,
    pub lambda_min: f64,
    /// Residual norm of the `lambda2` Ritz pair; the true eigenvalue is
    /// within this distance.
    pub residual: f64,
    pub iterations: usize,
}

/// Lanczos with full reorthogonalization on `D^{1/2} P D^{-1/2}` restricted
/// to the complement of `sqrt(pi)`. Requires `pi > 0` everywhere.
pub fn lanczos<K: Kernel>(k: &K, pi: &[f64], iters: usize, seed: u64) -> Result<LanczosReport> {
    use rand::{Rng, SeedableRng};
    let n = k.dim();
    if pi.iter().any(|&x| x <= 0.0) {
        return Err(Error::Parse("lanczos needs a strictly positive stationary measure".into()));
    }
    let sq: Vec<f64> = pi.iter().map(|x| x.sqrt()).collect();
    let apply = |y: &[f64], out: &mut [f64]| {
        let x: Vec<f64> = y.iter().zip(&sq).map(|(a, b)| a * b).collect();
        k.push(&x, out);
        out.iter_mut().zip(&sq).for_each(|(o, b)| *o /= b);
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let orth = |v: &mut [f64], basis: &[Vec<f64>]| {
        for _ in 0..2 {
            for u in basis {
                let c = dot(v, u);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
        }
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let top: Vec<f64> = sq.clone();
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    orth(&mut v, std::slice::from_ref(&top));
    let nrm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    let mut basis = vec![top];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let m = iters.min(n - 1).max(1);
    for j in 0..m {
        apply(&v, &mut w);
        alpha.push(dot(&w, &v));
        basis.push(v.clone());
        orth(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        beta.push(b);
        if b < 1e-13 || j + 1 == m {
            break;
        }
        v = w.iter().map(|x| x / b).collect();
    }
    let kk = alpha.len();
    let mut t = DMatrix::zeros(kk, kk);
    for i in 0..kk {
        t[(i, i)] = alpha[i];
        if i + 1 < kk {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (mut hi, mut lo) = (0, 0);
    for i in 0..kk {
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
    }
    Ok(LanczosReport {
        lambda2: eig.eigenvalues[hi],
        lambda_min: eig.eigenvalues[lo],
        residual: (beta[kk - 1] * eig.eigenvectors[(kk - 1, hi)]).abs(),
        iterations: kk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::two_state;

    #[test]
    fn two_state_gaps() {
        let s = spectrum(&two_state(0.5, 0.5)).unwrap();
        assert!((s.gap_abs - 1.0).abs() < 1e-14);
        let s = spectrum(&two_state(0.25, 0.25)).unwrap();
        assert!((s.gap_abs - 0.5).abs() < 1e-14);
        assert!((s.lambda2 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn product_chain_gap() {
        let a = two_state(0.2, 0.3);
        let g = spectrum(&a).unwrap().gap;
        // lazy product: pick a coordinate, move it
        let k = a.p.kronecker(&DMatrix::identity(2, 2)) * 0.5 + DMatrix::identity(2, 2).kronecker(&a.p) * 0.5;
        let pi: Vec<f64> = a.pi.iter().flat_map(|x| a.pi.iter().map(move |y| x * y)).collect();
        let s = spectrum_of(&k, &pi).unwrap();
        assert!((s.gap - g / 2.0).abs() < 1e-12);
        // synchronous product keeps the gap
        let k = a.p.kronecker(&a.p);
        let s = spectrum_of(&k, &pi).unwrap();
        assert!((s.gap - g).abs() < 1e-12);
    }

    #[test]
    fn rejects_irreversible() {
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(spectrum_of(&p, &[1.0 / 3.0; 3]).is_err());
    }

    #[test]
    fn lanczos_matches_dense() {
        use crate::exact::kernels::glauber_matrix;
        use crate::model::{Potts, SpinBoundary, SpinModel};
        use crate::tree::Tree;
        let t = Tree::new(2, 1).unwrap();
        let b = SpinBoundary::mono(&t, 0);
        let m = SpinModel::new(t, Potts::new(2, 1.0).unwrap(), b).unwrap();
        let p = glauber_matrix(&m).unwrap();
        let s = spectrum(&p).unwrap();
        let l = lanczos(&p, &p.pi, 7, 3).unwrap();
        assert!((l.lambda2 - s.lambda2).abs() < 1e-10, "{l:?} {}", s.lambda2);
        assert!((l.lambda_min - s.lambda_min).abs() < 1e-10);
    }
}
