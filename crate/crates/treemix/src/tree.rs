//! Complete d-ary trees with external boundary slots, and their level and
//! block decompositions.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Complete d-ary tree of height `h` plus the `d^{h+1}` boundary slots.
///
/// Nodes are numbered breadth-first: internal vertices `0..n`, boundary
/// slots `n..n+nb`. The children of node `v` are `d*v+1 ..= d*v+d`, and the
/// edge to node `c` has index `c - 1`.
#[derive(Clone, Debug)]
pub struct Tree {
    pub d: usize,
    pub h: usize,
    pub n: usize,
    pub nb: usize,
    depth: Vec<usize>,
}

impl Tree {
    pub fn new(d: usize, h: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid("d", format!("branching factor must be >= 2, got {d}")));
        }
        if h > 40 {
            return Err(invalid("h", format!("height {h} is out of range")));
        }
        let pow = |k: u32| (d as u128).checked_pow(k);
        let nb = pow(h as u32 + 1).ok_or_else(|| invalid("h", "tree too large"))?;
        let n = (nb - 1) / (d as u128 - 1);
        if n + nb > (1u128 << 26) {
            return Err(invalid("h", format!("tree with {} nodes is too large", n + nb)));
        }
        let (n, nb) = (n as usize, nb as usize);
        let mut depth = vec![0; n + nb];
        for v in 1..n + nb {
            depth[v] = depth[(v - 1) / d] + 1;
        }
        Ok(Tree { d, h, n, nb, depth })
    }

    pub fn nodes(&self) -> usize {
        self.n + self.nb
    }

    pub fn num_edges(&self) -> usize {
        self.n + self.nb - 1
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        v >= self.n
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v > 0).then(|| (v - 1) / self.d)
    }

    /// Children of an internal vertex (boundary slots for a leaf).
    pub fn children(&self, v: usize) -> std::ops::Range<usize> {
        if v >= self.n {
            return 0..0;
        }
        self.d * v + 1..self.d * v + self.d + 1
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Distance to the boundary: leaves are at level 1, the root at `h+1`.
    pub fn level(&self, v: usize) -> usize {
        self.h + 1 - self.depth[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.n && self.depth[v] == self.h
    }

    /// Endpoints `(parent, child)` of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let c = e + 1;
        ((c - 1) / self.d, c)
    }

    pub fn edge_to(&self, child: usize) -> usize {
        child - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_edges()).map(|e| self.edge(e))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.parent(v).into_iter().collect();
        out.extend(self.children(v));
        out
    }

    /// Internal vertices of the subtree rooted at `v`, in BFS order.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        self.ball(v, usize::MAX)
    }

    /// Vertices of `T_v` at distance `< ell` from `v`.
    pub fn ball(&self, v: usize, ell: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if ell == 0 || v >= self.n {
            return out;
        }
        let mut frontier = vec![v];
        let mut dist = 0;
        while !frontier.is_empty() && dist < ell {
            out.extend(&frontier);
            frontier = frontier
                .iter()
                .flat_map(|&u| self.children(u))
                .filter(|&c| c < self.n)
                .collect();
            dist += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn level_set(&self, i: usize) -> Vec<usize> {
        if i == 0 || i > self.h + 1 {
            return Vec::new();
        }
        (0..self.n).filter(|&v| self.level(v) == i).collect()
    }

    /// `F_i`: vertices within distance `i` of the boundary; clamps out-of-range `i`.
    pub fn f_set(&self, i: i64) -> Vec<usize> {
        (0..self.n).filter(|&v| self.level(v) as i64 <= i).collect()
    }

    /// `B_i^ell = F_i \ F_{i-ell}`.
    pub fn b_set(&self, i: i64, ell: usize) -> Vec<usize> {
        let lo = i - ell as i64;
        (0..self.n)
            .filter(|&v| {
                let l = self.level(v) as i64;
                l <= i && l > lo
            })
            .collect()
    }

    /// Tiled block `T_j^ell`, `1 <= j <= ell+1`.
    pub fn t_set(&self, j: usize, ell: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut i = j;
        while i <= self.h + ell {
            out.extend(self.b_set(i as i64, ell));
            i += ell + 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_even(&self, v: usize) -> bool {
        (self.level(v) - 1) % 2 == 0
    }

    pub fn even_set(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.is_even(v)).collect()
    }

    pub fn odd_set(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.is_even(v)).collect()
    }

    /// Graph distance in `T ∪ ∂T`.
    pub fn dist(&self, mut u: usize, mut v: usize) -> usize {
        let mut k = 0;
        while self.depth[u] > self.depth[v] {
            u = (u - 1) / self.d;
            k += 1;
        }
        while self.depth[v] > self.depth[u] {
            v = (v - 1) / self.d;
            k += 1;
        }
        while u != v {
            u = (u - 1) / self.d;
            v = (v - 1) / self.d;
            k += 2;
        }
        k
    }

    /// Connected pieces of a vertex set; each piece is listed top vertex first.
    pub fn pieces(&self, set: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.n];
        for &v in set {
            inside[v] = true;
        }
        let mut out = Vec::new();
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        for &top in &sorted {
            if self.parent(top).is_some_and(|p| inside[p]) {
                continue;
            }
            let mut piece = vec![top];
            let mut k = 0;
            while k < piece.len() {
                let u = piece[k];
                piece.extend(self.children(u).filter(|&c| c < self.n && inside[c]));
                k += 1;
            }
            out.push(piece);
        }
        out
    }

    pub fn min_dist(&self, a: &[usize], b: &[usize]) -> usize {
        a.iter()
            .flat_map(|&u| b.iter().map(move |&v| (u, v)))
            .map(|(u, v)| self.dist(u, v))
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Left-most internal edge touching a leaf, inside the subtree of `v`:
    /// returns `(parent, leaf)`.
    pub fn leftmost_leaf_edge(&self, v: usize) -> Option<(usize, usize)> {
        if self.depth[v] >= self.h {
            return None;
        }
        let mut u = v;
        while !self.is_leaf(u) {
            u = self.d * u + 1;
        }
        Some(((u - 1) / self.d, u))
    }

    pub fn decompose(&self, ell: usize) -> Result<Decomposition> {
        if ell == 0 || ell > self.h + 1 {
            return Err(invalid("ell", format!("need 1 <= ell <= h+1 = {}, got {ell}", self.h + 1)));
        }
        let top = self.h + 1;
        Ok(Decomposition {
            d: self.d,
            h: self.h,
            ell,
            n: self.n,
            boundary_slots: self.nb,
            edges: self.num_edges(),
            levels: (0..=top).map(|i| self.level_set(i)).collect(),
            even: self.even_set(),
            odd: self.odd_set(),
            b_sets: (1..=top).map(|i| self.b_set(i as i64, ell)).collect(),
            tiles: (1..=ell + 1)
                .map(|j| {
                    let set = self.t_set(j, ell);
                    Tile {
                        j,
                        pieces: self.pieces(&set),
                        vertices: set,
                    }
                })
                .collect(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    pub j: usize,
    pub vertices: Vec<usize>,
    pub pieces: Vec<Vec<usize>>,
}

/// Level sets `L_0..L_{h+1}`, parity classes, `B_i^ell` and the tiles.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub d: usize,
    pub h: usize,
    pub ell: usize,
    pub n: usize,
    pub boundary_slots: usize,
    pub edges: usize,
    pub levels: Vec<Vec<usize>>,
    pub even: Vec<usize>,
    pub odd: Vec<usize>,
    /// `b_sets[i-1] = B_i^ell` for `1 <= i <= h+1`.
    pub b_sets: Vec<Vec<usize>>,
    pub tiles: Vec<Tile>,
}
