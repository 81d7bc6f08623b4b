use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::tree::Tree;

/// Spins on the boundary slots; `None` marks a free slot (no edge to it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinBoundary {
    spins: Vec<Option<u8>>,
}

impl SpinBoundary {
    pub fn mono(tree: &Tree, k: u8) -> Self {
        SpinBoundary {
            spins: vec![Some(k); tree.nb],
        }
    }

    pub fn free(tree: &Tree) -> Self {
        SpinBoundary {
            spins: vec![None; tree.nb],
        }
    }

    pub fn list(tree: &Tree, spins: Vec<u8>) -> Result<Self> {
        if spins.len() != tree.nb {
            return Err(invalid(
                "boundary",
                format!("expected {} spins, got {}", tree.nb, spins.len()),
            ));
        }
        Ok(SpinBoundary {
            spins: spins.into_iter().map(Some).collect(),
        })
    }

    /// Explicit slots, `None` for free ones.
    pub fn partial(tree: &Tree, spins: Vec<Option<u8>>) -> Result<Self> {
        if spins.len() != tree.nb {
            return Err(invalid(
                "boundary",
                format!("expected {} slots, got {}", tree.nb, spins.len()),
            ));
        }
        Ok(SpinBoundary { spins })
    }

    pub fn random(tree: &Tree, q: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpinBoundary {
            spins: (0..tree.nb).map(|_| Some(rng.gen_range(0..q) as u8)).collect(),
        }
    }

    /// Spin at boundary slot with node id `node`.
    pub fn at(&self, tree: &Tree, node: usize) -> Option<u8> {
        self.spins[node - tree.n]
    }

    pub fn slots(&self) -> &[Option<u8>] {
        &self.spins
    }

    pub fn is_mono(&self) -> Option<u8> {
        let first = self.spins.first().copied().flatten()?;
        self.spins.iter().all(|&s| s == Some(first)).then_some(first)
    }

    pub fn check(&self, q: usize) -> Result<()> {
        if self.spins.iter().flatten().any(|&s| s as usize >= q) {
            return Err(invalid("boundary", format!("spin out of range for q={q}")));
        }
        Ok(())
    }
}

/// File form of a spin boundary; spins are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpinBoundarySpec {
    Mono { spin: u8 },
    List { spins: Vec<u8> },
    Random { seed: u64 },
    Free,
}

impl SpinBoundarySpec {
    pub fn resolve(&self, tree: &Tree, q: usize) -> Result<SpinBoundary> {
        let one = |s: u8| {
            if s == 0 || s as usize > q {
                Err(invalid("boundary", format!("spin {s} outside 1..={q}")))
            } else {
                Ok(s - 1)
            }
        };
        let b = match self {
            SpinBoundarySpec::Mono { spin } => SpinBoundary::mono(tree, one(*spin)?),
            SpinBoundarySpec::List { spins } => {
                SpinBoundary::list(tree, spins.iter().map(|&s| one(s)).collect::<Result<_>>()?)?
            }
            SpinBoundarySpec::Random { seed } => SpinBoundary::random(tree, q, *seed),
            SpinBoundarySpec::Free => SpinBoundary::free(tree),
        };
        b.check(q)?;
        Ok(b)
    }
}

/// Wiring partition of boundary vertices (node ids of the instance).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcBoundary {
    pub classes: Vec<Vec<usize>>,
}

impl RcBoundary {
    pub fn free() -> Self {
        RcBoundary { classes: Vec::new() }
    }

    pub fn wired(tree: &Tree) -> Self {
        RcBoundary {
            classes: vec![(tree.n..tree.nodes()).collect()],
        }
    }

    pub fn partition(classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &classes {
            for &v in c {
                if !seen.insert(v) {
                    return Err(invalid("wiring", format!("vertex {v} in two classes")));
                }
            }
        }
        Ok(RcBoundary { classes })
    }

    pub fn is_wired_over(&self, tree: &Tree) -> bool {
        let nontrivial: Vec<_> = self.classes.iter().filter(|c| c.len() > 1).collect();
        nontrivial.len() == 1 && nontrivial[0].len() == tree.nb
            || (tree.nb == 1 && self.classes.len() == 1)
    }
}

/// File form of an RC boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RcBoundarySpec {
    Free,
    Wired,
    Partition { classes: Vec<Vec<usize>> },
}

impl RcBoundarySpec {
    pub fn resolve(&self, tree: &Tree) -> Result<RcBoundary> {
        match self {
            RcBoundarySpec::Free => Ok(RcBoundary::free()),
            RcBoundarySpec::Wired => Ok(RcBoundary::wired(tree)),
            RcBoundarySpec::Partition { classes } => {
                for &v in classes.iter().flatten() {
                    if v < tree.n || v >= tree.nodes() {
                        return Err(invalid("wiring", format!("{v} is not a boundary slot")));
                    }
                }
                RcBoundary::partition(classes.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let t = Tree::new(2, 0).unwrap();
        let s: SpinBoundarySpec = serde_json::from_str(r#"{"kind":"mono","spin":2}"#).unwrap();
        assert_eq!(s.resolve(&t, 2).unwrap(), SpinBoundary::mono(&t, 1));
        let s: SpinBoundarySpec =
            serde_json::from_str(r#"{"kind":"list","spins":[1,2]}"#).unwrap();
        assert_eq!(s.resolve(&t, 2).unwrap().slots(), &[Some(0), Some(1)]);
        assert!(s.resolve(&t, 1).is_err());
        let r: RcBoundarySpec = serde_json::from_str(r#"{"kind":"wired"}"#).unwrap();
        assert_eq!(r.resolve(&t).unwrap().classes, vec![vec![1, 2]]);
        let r: RcBoundarySpec =
            serde_json::from_str(r#"{"kind":"partition","classes":[[1],[2]]}"#).unwrap();
        assert!(r.resolve(&t).is_ok());
        let r: RcBoundarySpec =
            serde_json::from_str(r#"{"kind":"partition","classes":[[0]]}"#).unwrap();
        assert!(r.resolve(&t).is_err());
    }
}
