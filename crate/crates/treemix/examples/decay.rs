//! How fast the spin above the root stops mattering at the left-most leaf.

use treemix::experiments::decay_profile;
use treemix::model::SpinBoundarySpec;

fn main() -> treemix::Result<()> {
    let hs: Vec<usize> = (1..=8).collect();
    for beta in [0.5, 2f64.ln(), 1.5] {
        let p = decay_profile(2, &hs, 2, beta, &SpinBoundarySpec::Free, (1, 2))?;
        let tv: Vec<String> = p.tv.iter().map(|x| format!("{x:.2e}")).collect();
        println!("beta {beta:.3}: rate {:.4}, delta_hat {:.4}\n  tv {}", p.rate, p.delta_hat, tv.join(" "));
    }
    Ok(())
}
