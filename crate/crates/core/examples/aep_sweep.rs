//! Per-copy truncation entropies of a biased bit approach the Shannon entropy
//! slowly; the spectrum is handled as a multiset, so n = 200 is cheap.
//!
//! `cargo run --example aep_sweep`

use purity::entropy::{aep_sweep_spectrum, shannon};
use purity::operator::SpectralMultiset;

fn main() -> purity::Result<()> {
    let p = [0.9, 0.1];
    let h = shannon(&p)?;
    let sweep = aep_sweep_spectrum(&SpectralMultiset::from_eigenvalues(&p)?, 0.01, 200)?;
    println!("H = {h:.5}");
    for point in sweep.iter().filter(|pt| pt.n % 25 == 0 || pt.n == 1 || pt.n == 30) {
        println!(
            "n = {:>3}  H̃/n = {:.5}  deviation = {:.5}  H′/n = {:.5}",
            point.n,
            point.h_tilde_per_copy,
            point.h_tilde_per_copy - h,
            point.h_prime_per_copy
        );
    }
    Ok(())
}
