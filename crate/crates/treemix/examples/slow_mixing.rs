//! Boundary embedding of a host graph, gap transfer, the bad set's
//! conductance and the Monte Carlo tail.

use treemix::slowmix::*;

fn main() -> treemix::Result<()> {
    let g = HostGraph::path(2);
    let emb = embed_boundary(&g, 3, 1)?;
    let e = emb.report();
    println!("path-2 in T_3: {} leaves, capacity {}, classes {:?}, roundtrip {}", e.leaves, e.capacity, e.classes, e.roundtrip);

    for (p_hat, q) in [(0.5, 2.0), (1.0 / 3.0, 3.0)] {
        let r = gap_transfer_check(&g, p_hat, q)?;
        println!("gap transfer p_hat={p_hat:.3} q={q}: p = {:.5}, gaps {:.9} / {:.9}", r.p, r.gap, r.gap_hat);
    }

    let c = bad_set_conductance(&embed_boundary(&HostGraph::single_edge(), 2, 1)?, 0.5, 2.0, 0, None)?;
    println!(
        "conductance: pi(A) {:.4}, Phi(A) {:.4}, Phi(A^c) {:.4}, gap {:.4} ({}), consistent {}",
        c.pi_a, c.phi_a, c.phi_ac, c.gap_mhb, c.gap_method, c.cheeger_consistent
    );

    let cyc = embed_boundary(&HostGraph::cycle(8)?, 5, 2)?;
    let t = tail_monte_carlo(&cyc, 0.5, 6, 100_000, 1)?;
    println!(
        "tail (m=8, ell=2, M=6): freq {:.5} in [{:.5}, {:.5}], exact {:.5}, inside {}",
        t.freq, t.ci_low, t.ci_high, t.exact_tail, t.inside
    );
    Ok(())
}
