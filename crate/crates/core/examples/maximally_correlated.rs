//! Two perfectly correlated bits: neither party can concentrate anything
//! alone, but one bit of communication gives Bob a pure qubit.
//!
//! `cargo run --example maximally_correlated`

use purity::concentration::run_concentration;
use purity::distillation::run_distillation;
use purity::operator::{DensityOperator, HilbertDims, RankOnePovm};

fn main() -> purity::Result<()> {
    let eps = 0.25;
    let half = DensityOperator::diagonal(HilbertDims::single("A", 2), &[0.5, 0.5])?;
    println!("local concentration of each marginal: {} bits", run_concentration(&half, eps)?.rate_bits);

    let rho = DensityOperator::diagonal(HilbertDims::new([("A", 2), ("B", 2)])?, &[0.5, 0.0, 0.0, 0.5])?;
    let povm = RankOnePovm::computational_basis(HilbertDims::single("A", 2));
    let report = run_distillation(&rho, &povm, eps, 0)?;
    let l = &report.ledger;
    println!(
        "with communication: Alice {} + Bob {} = {} net bits for {} bit sent; distance {:.1e}",
        l.alice_net_bits, l.bob_net_bits, l.net_bits, l.communication_bits, report.final_distance
    );
    Ok(())
}
