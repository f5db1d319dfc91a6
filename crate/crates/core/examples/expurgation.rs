//! Markov expurgation on a joint index distribution with exact rational masses.
//!
//! `cargo run --example expurgation`

use num_bigint::BigInt;
use num_rational::BigRational;
use purity::distillation::expurgate_pairs;

fn main() -> purity::Result<()> {
    // Ten equally likely rows, ten columns each; row 3 is entirely bad.
    let cell = BigRational::new(BigInt::from(1), BigInt::from(100));
    let joint = vec![vec![cell; 10]; 10];
    let eps_pp = BigRational::new(BigInt::from(1), BigInt::from(256));
    let result = expurgate_pairs(&joint, |k, _| k != 3, eps_pp)?;
    println!("Good_K = {:?}", result.good_k);
    println!("Pr[good pairs] = {}, Pr[Good_K] = {}", result.pr_good_pairs, result.pr_good_k);
    println!("worst Pr[bad | k] on Good_K = {}", result.worst_bad_given_good_k);
    println!("all three bounds hold: {}", result.invariants_hold());
    Ok(())
}
