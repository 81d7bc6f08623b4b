//! Coupled SW runs from the block start on the binary tree of height 6:
//! disagreement containment per swept alpha and the one-step surplus.

use treemix::experiments::{lb_experiment, LbSpec};

fn main() -> treemix::Result<()> {
    let r = lb_experiment(&LbSpec::default())?;
    println!("n = {}, k = {}, blocks = {}, R_hat = {}", r.n, r.k, r.blocks, r.r_hat);
    println!("alpha  tau  contained  99% CI              reach   bound   tv_plugin");
    for row in &r.rows {
        println!(
            "{:<6} {:<4} {:<10.4} [{:.4}, {:.4}]  {:.4}  {:.4}  {:.4}",
            row.alpha, row.tau, row.freq, row.ci_low, row.ci_high, row.reach_freq, row.reach_bound, row.tv_plugin
        );
    }
    for s in &r.surplus {
        println!(
            "block {}: mu(A) = {:.4}, surplus = {:.4} >= {:.4} - 3*{:.4}: {}",
            s.block, s.mu_a, s.surplus, s.bound, s.sigma, s.ok
        );
    }
    println!("containment ok: {}, surplus ok: {}", r.containment_ok, r.surplus_ok);
    Ok(())
}
