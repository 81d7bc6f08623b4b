//! Orbit representatives of the state space under child-subtree swaps that
//! fix the boundary. Worst-start quantities only need one start per orbit.

use petgraph::unionfind::UnionFind;

use crate::error::{check_cap, Result, WEIGHT_CAP};
use crate::model::{RcBoundary, SpinModel};
use crate::tree::Tree;

/// Node permutations (over `T ∪ ∂T`) swapping the subtrees of adjacent
/// children of some vertex.
pub fn child_swaps(tree: &Tree) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for v in 0..tree.n {
        let kids: Vec<usize> = tree.children(v).collect();
        for w in kids.windows(2) {
            let mut perm: Vec<usize> = (0..tree.nodes()).collect();
            let mut stack = vec![(w[0], w[1])];
            while let Some((a, b)) = stack.pop() {
                perm[a] = b;
                perm[b] = a;
                if a < tree.n {
                    stack.extend(tree.children(a).zip(tree.children(b)));
                }
            }
            out.push(perm);
        }
    }
    out
}

fn representatives(n: usize, maps: &[Box<dyn Fn(usize) -> usize + '_>]) -> Vec<usize> {
    let mut uf = UnionFind::<usize>::new(n);
    for s in 0..n {
        for f in maps {
            uf.union(s, f(s));
        }
    }
    let mut seen = vec![false; n];
    let mut reps = Vec::new();
    for s in 0..n {
        let r = uf.find_mut(s);
        if !seen[r] {
            seen[r] = true;
            reps.push(s);
        }
    }
    reps
}

/// One spin configuration per orbit.
pub fn spin_orbits(m: &SpinModel) -> Result<Vec<usize>> {
    let n = m.num_states()?;
    let t = &m.tree;
    let slots = |v: usize| m.boundary.at(t, v);
    let maps: Vec<Box<dyn Fn(usize) -> usize + '_>> = child_swaps(t)
        .into_iter()
        .filter(|perm| (t.n..t.nodes()).all(|b| slots(b) == slots(perm[b])))
        .map(|perm| {
            Box::new(move |s: usize| {
                let sigma = m.decode(s);
                let mut image = sigma.clone();
                for v in 0..m.n() {
                    image[perm[v]] = sigma[v];
                }
                m.encode(&image)
            }) as Box<dyn Fn(usize) -> usize>
        })
        .collect();
    Ok(representatives(n, &maps))
}

/// One edge configuration of `T ∪ ∂T` per orbit, keeping the wiring fixed.
pub fn rc_orbits(tree: &Tree, wiring: &RcBoundary) -> Result<Vec<usize>> {
    let class_of = |v: usize| wiring.classes.iter().position(|c| c.contains(&v));
    let ne = tree.num_edges();
    check_cap("edge configurations", 1u128 << ne.min(127), WEIGHT_CAP)?;
    let maps: Vec<Box<dyn Fn(usize) -> usize>> = child_swaps(tree)
        .into_iter()
        .filter(|perm| (tree.n..tree.nodes()).all(|b| class_of(b) == class_of(perm[b])))
        .map(|perm| {
            Box::new(move |mask: usize| {
                (0..ne)
                    .filter(|&e| mask >> e & 1 == 1)
                    .map(|e| 1usize << (perm[e + 1] - 1))
                    .sum()
            }) as Box<dyn Fn(usize) -> usize>
        })
        .collect();
    Ok(representatives(1 << ne, &maps))
}
