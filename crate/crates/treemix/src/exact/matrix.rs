//! Transition kernels over enumerated spaces.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_cap, Result, DENSE_CAP, MATRIX_CAP};

/// Anything that can push a distribution forward one step: `out = mu P`.
pub trait Kernel: Sync {
    fn dim(&self) -> usize;
    fn push(&self, mu: &[f64], out: &mut [f64]);
}

/// Dense row-stochastic matrix with its stationary measure.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub p: DMatrix<f64>,
    pub pi: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(p: DMatrix<f64>, pi: Vec<f64>) -> Self {
        TransitionMatrix { p, pi }
    }

    pub fn zeros(n: usize, pi: Vec<f64>) -> Result<Self> {
        check_cap("matrix states", n as u128, MATRIX_CAP)?;
        check_cap("dense matrix states", n as u128, DENSE_CAP)?;
        Ok(TransitionMatrix {
            p: DMatrix::zeros(n, n),
            pi,
        })
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn row_sum_error(&self) -> f64 {
        (0..self.n())
            .map(|i| (self.p.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_j |(pi P)_j - pi_j|`.
    pub fn stationarity_error(&self) -> f64 {
        let pi = DVector::from_column_slice(&self.pi);
        let moved = self.p.tr_mul(&pi);
        moved
            .iter()
            .zip(&self.pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max_{i,j} |pi_i P_ij - pi_j P_ji|`.
    pub fn detailed_balance_error(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let a = self.pi[i] * self.p[(i, j)];
                let b = self.pi[j] * self.p[(j, i)];
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }

    pub fn max_diff(&self, other: &DMatrix<f64>) -> f64 {
        (&self.p - other).amax()
    }
}

impl Kernel for TransitionMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn push(&self, mu: &[f64], out: &mut [f64]) {
        let x = nalgebra::DVectorView::from_slice(mu, mu.len());
        let mut y = nalgebra::DVectorViewMut::from_slice(out, mu.len());
        y.gemv_tr(1.0, &self.p, &x, 0.0);
    }
}

/// Row-list sparse kernel for spaces beyond the dense cap.
#[derive(Clone, Debug)]
pub struct SparseKernel {
    pub rows: Vec<Vec<(u32, f64)>>,
    pub pi: Vec<f64>,
}

impl SparseKernel {
    pub fn row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().map(|x| x.1).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn stationarity_error(&self) -> f64 {
        let mut out = vec![0.0; self.pi.len()];
        self.push(&self.pi, &mut out);
        out.iter()
            .zip(&self.pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn detailed_balance_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, pij) in row {
                let j = j as usize;
                let pji = self.rows[j]
                    .iter()
                    .filter(|x| x.0 as usize == i)
                    .map(|x| x.1)
                    .sum::<f64>();
                worst = worst.max((self.pi[i] * pij - self.pi[j] * pji).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Result<TransitionMatrix> {
        let mut m = TransitionMatrix::zeros(self.rows.len(), self.pi.clone())?;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, x) in row {
                m.p[(i, j as usize)] += x;
            }
        }
        Ok(m)
    }
}

impl Kernel for SparseKernel {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn push(&self, mu: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, row) in self.rows.iter().enumerate() {
            let m = mu[i];
            if m == 0.0 {
                continue;
            }
            for &(j, x) in row {
                out[j as usize] += m * x;
            }
        }
    }
}

/// Collapse duplicate targets in a row.
pub fn compact_row(mut row: Vec<(u32, f64)>) -> Vec<(u32, f64)> {
    row.sort_by_key(|x| x.0);
    let mut out: Vec<(u32, f64)> = Vec::with_capacity(row.len());
    for (j, x) in row {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += x,
            _ => out.push((j, x)),
        }
    }
    out
}

/// Two-state chain `[[1-a, a], [b, 1-b]]`.
pub fn two_state(a: f64, b: f64) -> TransitionMatrix {
    let p = DMatrix::from_row_slice(2, 2, &[1.0 - a, a, b, 1.0 - b]);
    TransitionMatrix::new(p, vec![b / (a + b), a / (a + b)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_is_left_multiplication() {
        let m = two_state(0.25, 0.5);
        let mut out = vec![0.0; 2];
        m.push(&[1.0, 0.0], &mut out);
        assert_eq!(out, vec![0.75, 0.25]);
        assert!(m.stationarity_error() < 1e-15);
        assert!(m.detailed_balance_error() < 1e-15);
    }

    #[test]
    fn sparse_matches_dense() {
        let s = SparseKernel {
            rows: vec![vec![(0, 0.5), (1, 0.5)], vec![(0, 0.5), (1, 0.5)]],
            pi: vec![0.5, 0.5],
        };
        let d = s.to_dense().unwrap();
        let (mut a, mut b) = (vec![0.0; 2], vec![0.0; 2]);
        s.push(&[0.3, 0.7], &mut a);
        d.push(&[0.3, 0.7], &mut b);
        assert_eq!(a, b);
    }
}
