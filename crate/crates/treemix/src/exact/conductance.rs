//! Conductance of state subsets.

use crate::error::{Error, Result};
use crate::exact::matrix::TransitionMatrix;

/// `Phi(S) = Q(S, S^c) / pi(S)`.
pub fn conductance(m: &TransitionMatrix, set: &[bool]) -> Result<f64> {
    let ps: f64 = (0..m.n()).filter(|&i| set[i]).map(|i| m.pi[i]).sum();
    if ps <= 0.0 {
        return Err(Error::EmptySet("conductance needs pi(S) > 0"));
    }
    let mut q = 0.0;
    for i in (0..m.n()).filter(|&i| set[i]) {
        for j in (0..m.n()).filter(|&j| !set[j]) {
            q += m.pi[i] * m.p[(i, j)];
        }
    }
    Ok(q / ps)
}

/// Minimum conductance over all `S` with `0 < pi(S) <= 1/2` (at most 16 states).
pub fn min_conductance(m: &TransitionMatrix) -> Result<(f64, Vec<bool>)> {
    let n = m.n();
    if n > 16 {
        return Err(Error::Infeasible {
            what: "exhaustive conductance search".into(),
            needed: 1 << n.min(100),
            cap: 1 << 16,
        });
    }
    let mut best = (f64::INFINITY, vec![false; n]);
    for mask in 1u32..(1 << n) - 1 {
        let set: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let ps: f64 = (0..n).filter(|&i| set[i]).map(|i| m.pi[i]).sum();
        if ps <= 0.0 || ps > 0.5 + 1e-12 {
            continue;
        }
        let phi = conductance(m, &set)?;
        if phi < best.0 {
            best = (phi, set);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::two_state;
    use crate::exact::spectral::spectrum;

    #[test]
    fn two_state_phi() {
        let m = two_state(0.3, 0.3);
        assert!((conductance(&m, &[true, false]).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(conductance(&m, &[true, true]).unwrap(), 0.0);
        assert!(conductance(&m, &[false, false]).is_err());
        let (phi, _) = min_conductance(&m).unwrap();
        assert!(spectrum(&m).unwrap().gap <= 2.0 * phi + 1e-12);
    }
}
