//! Entropic quantities of a partially entangled two-qubit state and the
//! terms of the distillation rate for a measurement in the computational basis.
//!
//! `cargo run --example entropy_table`

use purity::entropy::{h_max, h_max_prime, h_max_smooth_ub, h_max_tilde, i_h, i_max, distillation_rate_terms, von_neumann};
use purity::operator::{CVector, DensityOperator, HilbertDims, PureStateVector, RankOnePovm, C64};

fn main() -> purity::Result<()> {
    let dims = HilbertDims::new([("A", 2), ("B", 2)])?;
    let (a, b) = (0.8f64.sqrt(), 0.2f64.sqrt());
    let psi = PureStateVector::new(
        dims.clone(),
        CVector::from_vec(vec![C64::new(a, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(b, 0.0)]),
    )?;
    // Mix the pure state with white noise.
    let pure = psi.density();
    let noisy = pure.matrix() * C64::new(0.9, 0.0) + purity::operator::CMatrix::identity(4, 4) * C64::new(0.025, 0.0);
    let rho = DensityOperator::from_matrix(dims, noisy)?;

    println!("H(AB)         = {:.4}", von_neumann(&rho)?);
    println!("H_max(AB)     = {:.4}", h_max(&rho));
    println!("I_max(A:B)    = {:.4}", i_max(&rho)?);
    for eps in [0.05, 0.2] {
        println!(
            "ε = {eps}: H̃ = {:.4}, H′ = {:.4}, 2log Tr√ρ′ = {:.4}, I_H(A:B) = {:.4}",
            h_max_tilde(&rho, eps)?,
            h_max_prime(&rho, eps)?,
            h_max_smooth_ub(&rho, eps)?,
            i_h(&rho, eps)?,
        );
    }
    let povm = RankOnePovm::computational_basis(HilbertDims::single("A", 2));
    let terms = distillation_rate_terms(&rho, &povm, 0.1)?;
    println!("{}", serde_json::to_string_pretty(&terms).expect("report serializes"));
    Ok(())
}
