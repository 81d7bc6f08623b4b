//! Up/down chains of a joint distribution on `Phi x Psi`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::functionals::var;
use crate::exact::spectral::spectrum_of;

/// `up(x, y) = rho(y | x)`, `down(y, x) = rho(x | y)` over the support of
/// the marginals `nu` on `Phi` and `pi` on `Psi`.
#[derive(Clone, Debug)]
pub struct UpDown {
    pub nu: Vec<f64>,
    pub pi: Vec<f64>,
    pub up: DMatrix<f64>,
    pub down: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UpDownReport {
    pub phi: usize,
    pub psi: usize,
    pub degenerate: bool,
    /// `lambda_2(P_up P_down)`, the smallest GVM constant.
    pub epsilon: f64,
    /// Largest of `|P1 - 1|`, `|nu P_up - pi|`, `|pi P_down - nu|`.
    pub marginal_error: f64,
    /// Max gap between the sorted nonzero spectra of the two products.
    pub spectra_error: f64,
}

impl UpDown {
    /// Rows of `rho` are `Phi`, columns `Psi`; zero-mass rows and columns are dropped.
    pub fn new(rho: &DMatrix<f64>) -> Result<Self> {
        if rho.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(invalid("rho", "entries must be finite and nonnegative"));
        }
        let total = rho.sum();
        if total <= 0.0 {
            return Err(invalid("rho", "zero total mass"));
        }
        let rows: Vec<usize> = (0..rho.nrows()).filter(|&i| rho.row(i).sum() > 0.0).collect();
        let cols: Vec<usize> = (0..rho.ncols()).filter(|&j| rho.column(j).sum() > 0.0).collect();
        let r = DMatrix::from_fn(rows.len(), cols.len(), |i, j| rho[(rows[i], cols[j])] / total);
        let nu: Vec<f64> = (0..r.nrows()).map(|i| r.row(i).sum()).collect();
        let pi: Vec<f64> = (0..r.ncols()).map(|j| r.column(j).sum()).collect();
        let up = DMatrix::from_fn(r.nrows(), r.ncols(), |i, j| r[(i, j)] / nu[i]);
        let down = DMatrix::from_fn(r.ncols(), r.nrows(), |j, i| r[(i, j)] / pi[j]);
        Ok(UpDown { nu, pi, up, down })
    }

    pub fn is_degenerate(&self) -> bool {
        self.nu.len() <= 1 || self.pi.len() <= 1
    }

    /// `lambda_2` computed on the smaller side.
    pub fn epsilon(&self) -> Result<f64> {
        if self.is_degenerate() {
            return Ok(0.0);
        }
        let s = if self.nu.len() <= self.pi.len() {
            spectrum_of(&(&self.up * &self.down), &self.nu)?
        } else {
            spectrum_of(&(&self.down * &self.up), &self.pi)?
        };
        Ok(s.lambda2.max(0.0))
    }

    /// `Var_pi(P_down f) / Var_nu(f)` for `f` on `Phi`.
    pub fn ratio(&self, f: &[f64]) -> f64 {
        let g: Vec<f64> = (0..self.pi.len())
            .map(|j| self.down.row(j).iter().zip(f).map(|(a, b)| a * b).sum())
            .collect();
        var(&self.pi, &g) / var(&self.nu, f)
    }

    pub fn report(&self) -> Result<UpDownReport> {
        let mut err: f64 = 0.0;
        for m in [&self.up, &self.down] {
            for i in 0..m.nrows() {
                err = err.max((m.row(i).sum() - 1.0).abs());
            }
        }
        for j in 0..self.pi.len() {
            let x: f64 = (0..self.nu.len()).map(|i| self.nu[i] * self.up[(i, j)]).sum();
            err = err.max((x - self.pi[j]).abs());
        }
        for i in 0..self.nu.len() {
            let x: f64 = (0..self.pi.len()).map(|j| self.pi[j] * self.down[(j, i)]).sum();
            err = err.max((x - self.nu[i]).abs());
        }
        let spectra_error = if self.is_degenerate() {
            0.0
        } else {
            let a = spectrum_of(&(&self.up * &self.down), &self.nu)?.eigenvalues;
            let b = spectrum_of(&(&self.down * &self.up), &self.pi)?.eigenvalues;
            let nz = |v: Vec<f64>| v.into_iter().filter(|x| x.abs() > 1e-9).collect::<Vec<_>>();
            let (a, b) = (nz(a), nz(b));
            if a.len() != b.len() {
                f64::INFINITY
            } else {
                a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
        };
        Ok(UpDownReport {
            phi: self.nu.len(),
            psi: self.pi.len(),
            degenerate: self.is_degenerate(),
            epsilon: self.epsilon()?,
            marginal_error: err,
            spectra_error,
        })
    }

    /// Best ratio over `samples` random `f`; the best one is then refined by
    /// power iteration of `P_up P_down` on `nu`-centered functions.
    pub fn variational_sup(&self, samples: usize, seed: u64) -> VariationalSup {
        let n = self.nu.len();
        if self.is_degenerate() {
            return VariationalSup { random: 0.0, refined: 0.0, iterations: 0 };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = f64::NEG_INFINITY;
        let mut arg = vec![0.0; n];
        for _ in 0..samples {
            let f: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let r = self.ratio(&f);
            if r.is_finite() && r > best {
                best = r;
                arg = f;
            }
        }
        let k = &self.up * &self.down;
        let mut f = arg;
        let mut refined = best;
        let mut iterations = 0;
        for it in 1..=20_000 {
            let mean: f64 = f.iter().zip(&self.nu).map(|(a, b)| a * b).sum();
            let centered: Vec<f64> = f.iter().map(|x| x - mean).collect();
            let mut next: Vec<f64> = (0..n)
                .map(|i| k.row(i).iter().zip(&centered).map(|(a, b)| a * b).sum())
                .collect();
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            next.iter_mut().for_each(|x| *x /= norm);
            let r = self.ratio(&next);
            f = next;
            iterations = it;
            let done = (r - refined).abs() < 1e-15;
            refined = refined.max(r);
            if done {
                break;
            }
        }
        VariationalSup { random: best, refined, iterations }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalSup {
    pub random: f64,
    pub refined: f64,
    pub iterations: usize,
}

/// A random strictly positive joint distribution on `nphi x npsi`.
pub fn random_joint(nphi: usize, npsi: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(nphi, npsi, |_, _| rng.gen::<f64>().powi(3) + 1e-3);
    let s = m.sum();
    m / s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_is_zero() {
        let nu = [0.2, 0.3, 0.5];
        let pi = [0.6, 0.4];
        let rho = DMatrix::from_fn(3, 2, |i, j| nu[i] * pi[j]);
        assert!(UpDown::new(&rho).unwrap().epsilon().unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_is_one() {
        let rho = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.2, 0.3, 0.5]));
        assert!((UpDown::new(&rho).unwrap().epsilon().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_joint_checks() {
        let rho = random_joint(7, 4, 3);
        let ud = UpDown::new(&rho).unwrap();
        let r = ud.report().unwrap();
        assert!(r.marginal_error < 1e-12 && r.spectra_error < 1e-9);
        let v = ud.variational_sup(2000, 1);
        assert!(v.random <= r.epsilon + 1e-9);
        assert!(v.refined <= r.epsilon + 1e-9 && v.refined >= r.epsilon - 1e-6, "{v:?} {r:?}");
    }
}
