//! Concentrate purity from a single qutrit-like spectrum with a borrowed ancilla.
//!
//! `cargo run --example concentration`

use purity::concentration::run_concentration;
use purity::entropy::h_max_tilde;
use purity::operator::{DensityOperator, HilbertDims};

fn main() -> purity::Result<()> {
    let rho = DensityOperator::diagonal(HilbertDims::single("A", 4), &[0.5, 0.3, 0.15, 0.05])?;
    for eps in [0.0, 0.05, 0.1, 0.2] {
        let report = run_concentration(&rho, eps)?;
        println!(
            "ε = {eps:<4}  H̃_max = {:.4}  rate = {:.4} bits  ancilla = {:.4}  distance = {:.4} ≤ {:.4}",
            h_max_tilde(&rho, eps)?,
            report.rate_bits,
            report.ancilla_bits,
            report.achieved_distance,
            report.distance_bound,
        );
    }
    Ok(())
}
