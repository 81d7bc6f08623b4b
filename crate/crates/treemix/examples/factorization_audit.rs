//! Variance and entropy factorization inequalities on random functions.

use treemix::mixcond::factorization_audit;
use treemix::model::{Potts, SpinBoundary, SpinModel};
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let t = Tree::new(2, 2)?;
    for beta in [0.05, 0.7] {
        let m = SpinModel::new(t.clone(), Potts::new(2, beta)?, SpinBoundary::mono(&t, 0))?;
        let r = factorization_audit(&m, 1, 1000, 5, (3, 100))?;
        println!("beta {beta}: eps_PVM {:.4}, eps_EM >= {:.4}, p_min {:.4}, gap_TB {:.4}", r.eps_pvm, r.eps_em_lower, r.p_min, r.gap_tb);
        for c in &r.checks {
            let status = match (c.applicable, c.passed) {
                (false, _) => "n/a ",
                (true, true) => "ok  ",
                (true, false) => "FAIL",
            };
            let constant = c.constant.map_or(String::new(), |k| format!(" constant {k:.3}"));
            println!("  {status} {:<14} slack {:.3e}{constant} {}", c.name, c.slack, c.note);
        }
    }
    Ok(())
}
