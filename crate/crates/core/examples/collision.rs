//! Collision rate of random equal-size binning: exact enumeration against the
//! law (N − 1)/(|X| − 1), and a Monte Carlo estimate on a larger alphabet.
//!
//! `cargo run --example collision`

use purity::distillation::{collision_probability, CollisionMode};

fn main() -> purity::Result<()> {
    for (domain, n_block) in [(4, 2), (6, 2), (6, 3)] {
        let est = collision_probability(domain, n_block, CollisionMode::Exact)?;
        let exact = est.exact.expect("exact mode");
        println!("|X| = {domain}, N = {n_block}: {exact} (law {}/{})", n_block - 1, domain - 1);
    }
    let est = collision_probability(64, 8, CollisionMode::MonteCarlo { seed: 1, trials: 200_000 })?;
    println!("|X| = 64, N = 8: {:.5} from {} samples (law {:.5})", est.value, est.samples, 7.0 / 63.0);
    Ok(())
}
