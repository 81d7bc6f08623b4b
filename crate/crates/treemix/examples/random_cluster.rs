//! Random-cluster facts on trees: free boundary is product percolation,
//! wired boundary is not.

use treemix::model::rc::product_measure;
use treemix::model::{cut_edge_prob, RcBoundary, RcGraph};
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let t = Tree::new(2, 2)?;
    let (p, q) = (0.6, 3.0);
    let r = cut_edge_prob(p, q);
    println!("p = {p}, q = {q}: cut-edge probability p/(q(1-p)+p) = {r:.6}");
    for (name, w) in [("free", RcBoundary::free()), ("wired", RcBoundary::wired(&t))] {
        let g = RcGraph::tree(&t, w)?;
        let table = g.rc_measure(p, q)?;
        let prod = product_measure(g.num_edges(), r);
        let tv: f64 = 0.5 * table.support.iter().zip(&table.probs).map(|(&s, &x)| (x - prod[s]).abs()).sum::<f64>();
        println!("{name:>5}: TV to product Bernoulli({r:.4}) over {} edges = {tv:.3e}", g.num_edges());
    }
    Ok(())
}
