//! Expectation, variance, entropy and their conditional versions on a
//! finite product space `[q]^n` with measure `pi`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn mean(pi: &[f64], f: &[f64]) -> f64 {
    pi.iter().zip(f).map(|(p, x)| p * x).sum()
}

pub fn var(pi: &[f64], f: &[f64]) -> f64 {
    let m = mean(pi, f);
    pi.iter().zip(f).map(|(p, x)| p * (x - m) * (x - m)).sum()
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn ent(pi: &[f64], f: &[f64]) -> Result<f64> {
    if f.iter().any(|&x| x < 0.0) {
        return Err(Error::NegativeEntropy);
    }
    let m = mean(pi, f);
    let e: f64 = pi.iter().zip(f).map(|(p, &x)| p * xlogx(x)).sum::<f64>() - xlogx(m);
    Ok(e.max(0.0))
}

/// `E_P(f,f) = 1/2 sum pi(x) P(x,y) (f(x)-f(y))^2`.
pub fn dirichlet(p: &DMatrix<f64>, pi: &[f64], f: &[f64]) -> f64 {
    let n = pi.len();
    let mut s = 0.0;
    for i in 0..n {
        if pi[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            let d = f[i] - f[j];
            s += pi[i] * p[(i, j)] * d * d;
        }
    }
    0.5 * s
}

/// `<f, (I-P) f>_pi`.
pub fn dirichlet_inner(p: &DMatrix<f64>, pi: &[f64], f: &[f64]) -> f64 {
    let n = pi.len();
    let mut s = 0.0;
    for i in 0..n {
        let pf: f64 = (0..n).map(|j| p[(i, j)] * f[j]).sum();
        s += pi[i] * f[i] * (f[i] - pf);
    }
    s
}

/// States grouped by their configuration outside a vertex set `A`.
#[derive(Clone, Debug)]
pub struct Groups {
    pub of: Vec<u32>,
    pub count: usize,
}

impl Groups {
    /// Group the codes of `[q]^n` by the digits outside `set`.
    pub fn outside(q: usize, n: usize, set: &[usize]) -> Self {
        let size = q.pow(n as u32);
        let mut inside = vec![false; n];
        for &v in set {
            inside[v] = true;
        }
        let mut id = vec![u32::MAX; size];
        let mut of = Vec::with_capacity(size);
        let mut count = 0;
        for code in 0..size {
            let (mut c, mut key, mut pw) = (code, 0usize, 1usize);
            for &ins in &inside {
                if !ins {
                    key += (c % q) * pw;
                }
                c /= q;
                pw *= q;
            }
            if id[key] == u32::MAX {
                id[key] = count as u32;
                count += 1;
            }
            of.push(id[key]);
        }
        Groups { of, count }
    }

    /// Grouping by an arbitrary key per state.
    pub fn by_key(keys: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let of = keys
            .iter()
            .map(|k| {
                let next = map.len() as u32;
                *map.entry(*k).or_insert(next)
            })
            .collect();
        Groups {
            of,
            count: map.len(),
        }
    }

    pub fn mass(&self, pi: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.count];
        for (s, &g) in self.of.iter().enumerate() {
            m[g as usize] += pi[s];
        }
        m
    }

    /// `E_A(f)`, returned per state.
    pub fn expect(&self, pi: &[f64], f: &[f64]) -> Vec<f64> {
        let mass = self.mass(pi);
        let mut acc = vec![0.0; self.count];
        for (s, &g) in self.of.iter().enumerate() {
            acc[g as usize] += pi[s] * f[s];
        }
        self.of
            .iter()
            .map(|&g| {
                let m = mass[g as usize];
                if m > 0.0 {
                    acc[g as usize] / m
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// `Var_A(f)`, returned per state.
    pub fn variance(&self, pi: &[f64], f: &[f64]) -> Vec<f64> {
        let m = self.expect(pi, f);
        let sq: Vec<f64> = f.iter().zip(&m).map(|(x, mu)| (x - mu) * (x - mu)).collect();
        self.expect(pi, &sq)
    }

    /// `Ent_A(f)`, returned per state.
    pub fn entropy(&self, pi: &[f64], f: &[f64]) -> Result<Vec<f64>> {
        if f.iter().any(|&x| x < 0.0) {
            return Err(Error::NegativeEntropy);
        }
        let m = self.expect(pi, f);
        let fl: Vec<f64> = f.iter().map(|&x| xlogx(x)).collect();
        let mfl = self.expect(pi, &fl);
        Ok(mfl.iter().zip(&m).map(|(a, &b)| (a - xlogx(b)).max(0.0)).collect())
    }
}
