use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Potts parameters: `q` spins and inverse temperature `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potts {
    pub q: usize,
    pub beta: f64,
}

impl Potts {
    pub fn new(q: usize, beta: f64) -> Result<Self> {
        if q < 1 || q > 255 {
            return Err(invalid("q", format!("need 1 <= q <= 255, got {q}")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(invalid("beta", format!("need finite beta >= 0, got {beta}")));
        }
        if 1.0 - (-beta).exp() >= 1.0 {
            return Err(invalid("beta", "p = 1 is not allowed"));
        }
        Ok(Potts { q, beta })
    }

    /// Build from the edge probability `p = 1 - e^{-beta}`.
    pub fn from_p(q: usize, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid("p", format!("need 0 <= p < 1, got {p}")));
        }
        Potts::new(q, -(1.0 - p).ln())
    }

    pub fn p(&self) -> f64 {
        -(-self.beta).exp_m1()
    }

    /// Weight of a bichromatic edge, `e^{-beta}`.
    pub fn w(&self) -> f64 {
        (-self.beta).exp()
    }

    pub fn p_min(&self, d: usize) -> f64 {
        (-self.beta * (d as f64 + 1.0)).exp() / self.q as f64
    }
}

/// Edge-heat-bath inclusion probability for a cut edge.
pub fn cut_edge_prob(p: f64, q: f64) -> f64 {
    p / (q * (1.0 - p) + p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived() {
        let pp = Potts::new(2, 2f64.ln()).unwrap();
        assert!((pp.p() - 0.5).abs() < 1e-15);
        assert!(pp.p_min(2) > 0.0 && pp.p_min(2) <= 0.5);
        assert!((cut_edge_prob(0.5, 2.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cut_edge_prob(0.3, 1.0), 0.3);
        assert!(Potts::new(2, f64::INFINITY).is_err());
        assert!(Potts::new(2, 800.0).is_err());
        assert!((Potts::from_p(2, 0.2).unwrap().p() - 0.2).abs() < 1e-15);
    }
}
