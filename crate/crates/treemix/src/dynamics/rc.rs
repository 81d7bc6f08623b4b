use crate::error::{invalid, Result};
use crate::model::{cut_edge_prob, RcGraph};
use crate::rng::{domain, Streams};

/// Edge heat-bath: a uniform edge is included with probability
/// `p / (q(1-p) + p)` if it is a cut edge, `p` otherwise.
pub fn rc_edge_hb_step(g: &RcGraph, a: &mut [bool], p: f64, q: f64, s: &Streams, step: u64) {
    let e = s.below(step, domain::CHOICE, 0, g.num_edges());
    let r = if g.joined_without_flags(a, e) { p } else { cut_edge_prob(p, q) };
    a[e] = s.unit(step, domain::EDGE, e as u64) < r;
}

/// Random-cluster SW on a wired graph: a uniform spin per component, then
/// each monochromatic edge independently with probability `p`.
pub fn rc_sw_step(g: &RcGraph, a: &mut [bool], p: f64, q: usize, s: &Streams, step: u64) -> Result<()> {
    if !g.is_wired() {
        return Err(invalid("wiring", "random-cluster SW needs the wired boundary"));
    }
    let rep = g.report_flags(a, None);
    let u = s.units(step, domain::VERTEX, g.nv);
    let spin = |v: usize| ((u[rep.label[v]] * q as f64) as usize).min(q - 1);
    let r = s.units(step, domain::EDGE, g.num_edges());
    for (e, &(x, y)) in g.edges.iter().enumerate() {
        a[e] = spin(x) == spin(y) && r[e] < p;
    }
    Ok(())
}

/// Single-bond dynamics with the spins integrated out: the chosen edge
/// refreshes to Bernoulli(p) when its endpoints are forced equal (`e ∈ A` or
/// joined without it), and opens with probability `p/q` otherwise.
pub fn single_bond_step(g: &RcGraph, a: &mut [bool], p: f64, q: f64, s: &Streams, step: u64) {
    let e = s.below(step, domain::CHOICE, 0, g.num_edges());
    let r = if a[e] || g.joined_without_flags(a, e) { p } else { p / q };
    a[e] = s.unit(step, domain::EDGE, e as u64) < r;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::kernels::{rc_edge_hb_kernel, rc_sw_matrix, single_bond_kernel};
    use crate::model::RcBoundary;
    use crate::tree::Tree;

    fn to_mask(a: &[bool]) -> usize {
        a.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| 1 << e).sum()
    }

    fn empirical(ne: usize, start: usize, n: usize, mut step: impl FnMut(&mut [bool], u64)) -> Vec<f64> {
        let mut counts = vec![0.0; 1 << ne];
        for r in 0..n {
            let mut a: Vec<bool> = (0..ne).map(|e| start >> e & 1 == 1).collect();
            step(&mut a, r as u64);
            counts[to_mask(&a)] += 1.0 / n as f64;
        }
        counts
    }

    fn close(emp: &[f64], row: &[f64], n: usize) {
        for (f, e) in emp.iter().zip(row) {
            let se = (e * (1.0 - e) / n as f64).sqrt();
            assert!((f - e).abs() <= 4.5 * se + 1e-12, "{f} vs {e}");
        }
    }

    #[test]
    fn samplers_match_kernels() {
        let t = Tree::new(2, 1).unwrap();
        let g = RcGraph::tree(&t, RcBoundary::wired(&t)).unwrap();
        let (p, q) = (0.5, 2.0);
        let ne = g.num_edges();
        let n = 100_000;
        let s = Streams::new(4);
        let dense = |rows: &[(u32, f64)]| {
            let mut v = vec![0.0; 1 << ne];
            for &(j, x) in rows {
                v[j as usize] += x;
            }
            v
        };
        let start = 0b010011;
        let k = rc_edge_hb_kernel(&g, p, q).unwrap();
        let emp = empirical(ne, start, n, |a, r| rc_edge_hb_step(&g, a, p, q, &s.replica(r), 0));
        close(&emp, &dense(&k.rows[start]), n);
        let k = single_bond_kernel(&g, p, q).unwrap();
        let emp = empirical(ne, start, n, |a, r| single_bond_step(&g, a, p, q, &s.replica(r), 0));
        close(&emp, &dense(&k.rows[start]), n);
        let m = rc_sw_matrix(&g, p, 2).unwrap();
        let emp = empirical(ne, start, n, |a, r| rc_sw_step(&g, a, p, 2, &s.replica(r), 0).unwrap());
        let row: Vec<f64> = m.p.row(start).iter().copied().collect();
        close(&emp, &row, n);
    }

    #[test]
    fn rc_sw_rejects_free() {
        let t = Tree::new(2, 1).unwrap();
        let g = RcGraph::tree(&t, RcBoundary::free()).unwrap();
        let mut a = vec![false; g.num_edges()];
        assert!(rc_sw_step(&g, &mut a, 0.5, 2, &Streams::new(0), 0).is_err());
    }
}
