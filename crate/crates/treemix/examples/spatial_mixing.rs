//! GVM, VM, PVM and EM constants for a binary tree, and the GVM
//! eigenvalue against a variational search.

use treemix::mixcond::{em_epsilon_estimate, pvm_epsilon, random_joint, vm_epsilon, Mode, UpDown};
use treemix::model::{Potts, SpinBoundary, SpinModel};
use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let ud = UpDown::new(&random_joint(5, 7, 9))?;
    let sup = ud.variational_sup(5000, 1);
    println!("GVM: lambda2 = {:.9}, random search {:.9}, refined {:.9}", ud.epsilon()?, sup.random, sup.refined);

    let t = Tree::new(2, 2)?;
    for beta in [0.3, 1.0] {
        let m = SpinModel::new(t.clone(), Potts::new(2, beta)?, SpinBoundary::mono(&t, 0))?;
        for ell in [1, 2] {
            let vm = vm_epsilon(&m, ell, Mode::Exhaustive)?;
            let pvm = pvm_epsilon(&m, ell, Mode::Exhaustive)?;
            let em = em_epsilon_estimate(&m, ell, 3, 100, 1)?;
            println!(
                "beta {beta} ell {ell}: VM {:.6}  PVM {:.6}  EM >= {:.6}  ({} cells)",
                vm.epsilon, pvm.certificate.epsilon, em.epsilon, vm.cells
            );
        }
    }
    Ok(())
}
