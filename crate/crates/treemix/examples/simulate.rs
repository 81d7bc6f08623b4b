//! Monte Carlo SW and edge heat-bath on a tree far too large to enumerate.

use treemix::dynamics::{rc_edge_hb_step, sw_step};
use treemix::model::{Potts, RcBoundary, RcGraph, SpinBoundary, SpinModel};
use treemix::rng::Streams;
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let t = Tree::new(2, 9)?;
    let potts = Potts::new(3, 1.2)?;
    let m = SpinModel::new(t.clone(), potts, SpinBoundary::free(&t))?;
    let s = Streams::new(2024);
    let mut sigma = vec![0u8; m.n()];
    println!("SW on {} vertices, q = 3, free boundary, all-1 start", m.n());
    for step in 0..40u64 {
        sw_step(&m, &mut sigma, &s, step);
        if step % 8 == 7 {
            let ones = sigma.iter().filter(|&&x| x == 0).count();
            println!("  step {:>3}: fraction of spin 1 = {:.3}, bichromatic edges = {}", step + 1, ones as f64 / m.n() as f64, m.bichromatic(&sigma));
        }
    }

    let g = RcGraph::tree(&t, RcBoundary::wired(&t))?;
    let mut a = vec![false; g.num_edges()];
    println!("edge heat-bath, {} edges, wired", a.len());
    for step in 0..20_000u64 {
        rc_edge_hb_step(&g, &mut a, potts.p(), 3.0, &s, step);
        if step % 5000 == 4999 {
            let open = a.iter().filter(|&&x| x).count();
            println!("  step {:>5}: open {open}, components {}", step + 1, g.report_flags(&a, None).c_xi);
        }
    }
    Ok(())
}
