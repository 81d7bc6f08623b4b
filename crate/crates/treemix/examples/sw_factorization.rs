//! SW = T R T* and its block version on the smallest trees.

use treemix::exact::ullrich::{tiled_blocks, ullrich_check};
use treemix::model::{Potts, SpinBoundary, SpinModel};
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    for (h, q) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        let t = Tree::new(2, h)?;
        let m = SpinModel::new(t.clone(), Potts::new(q, 0.7)?, SpinBoundary::mono(&t, 0))?;
        let r = ullrich_check(&m, &tiled_blocks(&t, 1))?;
        println!(
            "h={h} q={q}: {} x {} joint, |SW - TRT*| = {:.1e}, |SW_D - mean TQT*| = {:.1e}, Q idempotent {:.1e}",
            r.states, r.joint_states, r.sw_error, r.block_error, r.idempotent_error
        );
    }
    Ok(())
}
