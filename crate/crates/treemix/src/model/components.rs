use petgraph::unionfind::UnionFind;

/// Component accounting for an edge set with wiring classes merged.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    /// Representative per vertex.
    pub label: Vec<usize>,
    /// Components with wiring classes merged, `c^xi(A)`.
    pub c_xi: usize,
    /// Components containing no boundary vertex, `c(A)`.
    pub c_inside: usize,
    /// Components fully inside the supplied block, `c_k(A)`.
    pub c_block: Option<usize>,
}

/// Union-find over `nv` vertices with `open` edges and `wiring` classes.
pub fn components(
    nv: usize,
    edges: &[(usize, usize)],
    open: impl Fn(usize) -> bool,
    wiring: &[Vec<usize>],
    is_boundary: &[bool],
    block: Option<&[bool]>,
) -> ComponentReport {
    let mut uf = UnionFind::<usize>::new(nv);
    for class in wiring {
        for w in class.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    for (e, &(a, b)) in edges.iter().enumerate() {
        if open(e) {
            uf.union(a, b);
        }
    }
    let label = uf.into_labeling();
    let mut touches = vec![false; nv];
    let mut outside_block = vec![false; nv];
    let mut is_root = vec![false; nv];
    for v in 0..nv {
        is_root[label[v]] = true;
        if is_boundary[v] {
            touches[label[v]] = true;
        }
        if let Some(bk) = block {
            if !bk[v] {
                outside_block[label[v]] = true;
            }
        }
    }
    let roots = (0..nv).filter(|&r| is_root[r]);
    let c_xi = roots.clone().count();
    let c_inside = roots.clone().filter(|&r| !touches[r]).count();
    let c_block = block.map(|_| roots.filter(|&r| !outside_block[r]).count());
    ComponentReport {
        label,
        c_xi,
        c_inside,
        c_block,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // d=2, h=0: root 0, slots 1,2
    const E: [(usize, usize); 2] = [(0, 1), (0, 2)];
    const BD: [bool; 3] = [false, true, true];

    #[test]
    fn empty_no_wiring() {
        let r = components(3, &E, |_| false, &[], &BD, None);
        assert_eq!(r.c_xi, 3);
        assert_eq!(r.c_inside, 1);
    }

    #[test]
    fn empty_wired() {
        let r = components(3, &E, |_| false, &[vec![1, 2]], &BD, None);
        assert_eq!(r.c_xi, 2);
    }

    #[test]
    fn all_edges() {
        let r = components(3, &E, |_| true, &[], &BD, Some(&[true, false, false]));
        assert_eq!(r.c_xi, 1);
        assert_eq!(r.c_inside, 0);
        assert_eq!(r.c_block, Some(0));
        let r = components(3, &E, |_| false, &[], &BD, Some(&[true, false, false]));
        assert_eq!(r.c_block, Some(1));
    }
}
