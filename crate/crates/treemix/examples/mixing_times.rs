//! Exact worst-start mixing times of SW and edge heat-bath against height.

use treemix::experiments::{mixing_scaling, ScalingChain, ScalingSpec};

fn main() -> treemix::Result<()> {
    for chain in [ScalingChain::Sw, ScalingChain::RcEdge] {
        let spec = ScalingSpec { chain, heights: vec![1, 2], ..ScalingSpec::default() };
        let r = mixing_scaling(&spec)?;
        println!("{chain:?}");
        for row in &r.rows {
            println!(
                "  h = {} n = {:<3} states = {:<6} tau = {:?}  tau/(h+1) = {:.3}  tau/(n ln n) = {:.3}",
                row.h,
                row.n,
                row.states.unwrap_or(0),
                row.tau,
                row.tau_per_level.unwrap_or(f64::NAN),
                row.tau_per_nlogn.unwrap_or(f64::NAN)
            );
        }
        println!("  preferred fit: {:?}", r.preferred);
    }
    Ok(())
}
