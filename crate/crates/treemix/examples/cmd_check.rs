//! Complete monotonicity of return probabilities for SW started inside B.

use treemix::exact::kernels::sw_matrix;
use treemix::experiments::{cmd_check, random_events};
use treemix::model::{Potts, SpinBoundary, SpinModel};
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let t = Tree::new(2, 1)?;
    let m = SpinModel::new(t.clone(), Potts::new(2, 2f64.ln())?, SpinBoundary::mono(&t, 0))?;
    let p = sw_matrix(&m)?;
    let rows = cmd_check(&p, &random_events(p.n(), 5, 1), 8)?;
    println!("event  t  pi(B)   Pr(X_t in B)  bound     slack");
    for r in &rows {
        println!("{:>5} {:>2}  {:.4}  {:.6}      {:.6}  {:.2e}", r.event, r.t, r.pi_b, r.prob, r.bound, r.slack);
    }
    Ok(())
}
