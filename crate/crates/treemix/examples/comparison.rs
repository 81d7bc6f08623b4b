//! Dirichlet-form comparison of SW, block SW and heat-bath block dynamics.

use treemix::exact::compare::compare_chain;
use treemix::exact::ullrich::tiled_blocks;
use treemix::model::{Potts, SpinBoundary, SpinModel};
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let t = Tree::new(2, 2)?;
    for beta in [0.5, 2.0] {
        let m = SpinModel::new(t.clone(), Potts::new(2, beta)?, SpinBoundary::mono(&t, 0))?;
        let r = compare_chain(&m, &tiled_blocks(&t, 1), 500, 3)?;
        println!("beta = {beta}");
        println!("  gaps: SW {:.5}, SW_D {:.5}, B_D {:.5}", r.gap_sw, r.gap_sw_block, r.gap_hb_block);
        println!("  gamma_min {:.5} (floor {:.5})", r.gamma_min, r.gamma_floor);
        println!(
            "  min slacks over {} f: {:.2e}, {:.2e}; gap slack {:.5}",
            r.functions, r.slack_sw_vs_block, r.slack_block_vs_hb, r.slack_gap
        );
    }
    Ok(())
}
