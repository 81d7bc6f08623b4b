//! Counter-based random streams.
//!
//! A stream is addressed by `(seed, step, domain)`; inside a stream the
//! ChaCha word position is the per-item counter, so any draw can be
//! regenerated without replaying earlier ones.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Domains keep unrelated draws in disjoint streams.
pub mod domain {
    pub const EDGE: u64 = 1;
    pub const VERTEX: u64 = 2;
    pub const CHOICE: u64 = 3;
    pub const BLOCK: u64 = 4;
    pub const INIT: u64 = 5;
    pub const AUX: u64 = 6;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Streams {
    pub seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Streams { seed }
    }

    /// Sub-family for replica `r`; replicas never share a stream.
    pub fn replica(&self, r: u64) -> Self {
        Streams {
            seed: splitmix(self.seed ^ splitmix(r.wrapping_add(0x5eed))),
        }
    }

    pub fn stream(&self, step: u64, dom: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(splitmix(step).wrapping_add(dom.wrapping_mul(0x2545_f491_4f6c_dd1d)));
        rng
    }

    /// Uniform in [0,1) for item `index`, random access.
    pub fn unit(&self, step: u64, dom: u64, index: u64) -> f64 {
        let mut rng = self.stream(step, dom);
        rng.set_word_pos(2 * index as u128);
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..q` for item `index`, random access.
    pub fn below(&self, step: u64, dom: u64, index: u64, q: usize) -> usize {
        let u = self.unit(step, dom, index);
        ((u * q as f64) as usize).min(q - 1)
    }
}

impl Streams {
    /// Items `0..count` of one stream, same values as `unit` gives one by one.
    pub fn units(&self, step: u64, dom: u64, count: usize) -> Vec<f64> {
        let mut rng = self.stream(step, dom);
        (0..count)
            .map(|_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
            .collect()
    }
}

/// Sample an index from unnormalized nonnegative weights.
pub fn pick<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
