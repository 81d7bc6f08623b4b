use serde::Serialize;

use crate::error::{invalid, Result};
use crate::tree::Tree;

/// A block family covering `V(T)`; each block is a union of pieces at
/// pairwise distance at least 2.
#[derive(Clone, Debug, Serialize)]
pub struct BlockSpec {
    pub blocks: Vec<Vec<usize>>,
    /// `max |D_kj|` over all pieces.
    pub vol: usize,
    #[serde(skip)]
    pub masks: Vec<Vec<bool>>,
}

impl BlockSpec {
    pub fn new(tree: &Tree, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(invalid("blocks", "need at least one block"));
        }
        let mut covered = vec![false; tree.n];
        let mut masks = Vec::with_capacity(blocks.len());
        let mut vol = 0;
        for b in &blocks {
            let mut mask = vec![false; tree.n];
            for &v in b {
                if v >= tree.n {
                    return Err(invalid("blocks", format!("vertex {v} is not internal")));
                }
                mask[v] = true;
                covered[v] = true;
            }
            let pieces = tree.pieces(b);
            for (i, a) in pieces.iter().enumerate() {
                vol = vol.max(a.len());
                if tree.n <= 10_000 {
                    for c in &pieces[i + 1..] {
                        if tree.min_dist(a, c) < 2 {
                            return Err(invalid("blocks", "pieces closer than distance 2"));
                        }
                    }
                }
            }
            masks.push(mask);
        }
        if let Some(v) = covered.iter().position(|&c| !c) {
            return Err(invalid("blocks", format!("vertex {v} not covered")));
        }
        Ok(BlockSpec { blocks, vol, masks })
    }

    /// The tiled family `T_1^ell, ..., T_{ell+1}^ell` (empty tiles dropped).
    pub fn tiled(tree: &Tree, ell: usize) -> Result<Self> {
        if ell == 0 || ell > tree.h + 1 {
            return Err(invalid("ell", format!("need 1 <= ell <= h+1, got {ell}")));
        }
        let blocks = (1..=ell + 1)
            .map(|j| tree.t_set(j, ell))
            .filter(|b| !b.is_empty())
            .collect();
        BlockSpec::new(tree, blocks)
    }

    pub fn whole(tree: &Tree) -> Self {
        BlockSpec {
            blocks: vec![(0..tree.n).collect()],
            vol: tree.n,
            masks: vec![vec![true; tree.n]],
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiled_is_valid() {
        let t = Tree::new(2, 3).unwrap();
        for ell in 1..=4 {
            let b = BlockSpec::tiled(&t, ell).unwrap();
            assert!(b.vol <= (1 << ell) - 1);
        }
    }

    #[test]
    fn rejects_uncovered() {
        let t = Tree::new(2, 1).unwrap();
        assert!(BlockSpec::new(&t, vec![vec![0, 1]]).is_err());
        assert!(BlockSpec::new(&t, vec![vec![1, 2], vec![0, 1]]).is_ok());
    }
}
