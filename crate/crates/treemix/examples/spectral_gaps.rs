//! Exact spectral gaps of every chain on the binary tree of height 2.

use treemix::exact::kernels::*;
use treemix::exact::spectral::lanczos;
use treemix::exact::spectrum;
use treemix::exact::swfast::SwOperator;
use treemix::exact::ullrich::tiled_blocks;
use treemix::model::{Potts, RcBoundary, RcGraph, SpinBoundary, SpinModel};
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let t = Tree::new(2, 2)?;
    let potts = Potts::new(2, 1.0)?;
    let m = SpinModel::new(t.clone(), potts, SpinBoundary::mono(&t, 0))?;
    let blocks = tiled_blocks(&t, 1);
    let spin = [
        ("sw", sw_matrix(&m)?),
        ("glauber", glauber_matrix(&m)?),
        ("block-hb", block_hb_matrix(&m, &blocks)?),
        ("block-sw", sw_block_matrix(&m, &blocks)?),
    ];
    println!("spin chains, {} states, beta = 1", m.num_states()?);
    for (name, k) in &spin {
        let s = spectrum(k)?;
        println!("  {name:<9} gap {:.6}  lambda_min {:+.6}", s.gap, s.lambda_min);
    }

    let g = RcGraph::tree(&t, RcBoundary::wired(&t))?;
    let p = potts.p();
    let hb = rc_edge_hb_kernel(&g, p, 2.0)?;
    let sb = single_bond_kernel(&g, p, 2.0)?;
    println!("edge chains, {} states (Lanczos)", hb.pi.len());
    for (name, k) in [("rc-edge", &hb), ("single-bond", &sb)] {
        let r = lanczos(k, &k.pi, 300, 1)?;
        println!("  {name:<11} gap {:.6}  residual {:.1e}", 1.0 - r.lambda2, r.residual);
    }

    let big = Tree::new(2, 3)?;
    let mb = SpinModel::new(big.clone(), potts, SpinBoundary::mono(&big, 0))?;
    let op = SwOperator::new(&mb)?;
    let r = lanczos(&op, &op.pi, 200, 1)?;
    println!("sw at h = 3, {} states: gap {:.6}", op.pi.len(), 1.0 - r.lambda2);
    Ok(())
}
