//! Optimal hypothesis test between two random qubit states, checked against
//! its dual certificate.
//!
//! `cargo run --example neyman_pearson`

use purity::entropy::neyman_pearson;
use purity::operator::random::random_density_with;
use purity::operator::HilbertDims;

fn main() -> purity::Result<()> {
    let dims = HilbertDims::single("A", 3);
    let rho = random_density_with(dims.clone(), 3, 11)?;
    let sigma = random_density_with(dims, 2, 12)?;
    println!("{:>6} {:>12} {:>12} {:>10} {:>10}", "ε", "β", "dual", "D_H", "threshold");
    for eps in [0.01, 0.1, 0.25, 0.5, 0.9] {
        let t = neyman_pearson(&rho, &sigma, eps)?;
        println!("{eps:>6} {:>12.6e} {:>12.6e} {:>10.4} {:>10.4}", t.beta, t.dual_value, t.value(), t.threshold);
    }
    Ok(())
}
