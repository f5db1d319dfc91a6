//! Distillation of n noisy copies of a correlated bit through the classical
//! fast path, with every stage error next to its bound.
//!
//! `cargo run --release --example iid_distillation`

use purity::distillation::run_distillation_diagonal;

fn noisy_copies(n: usize, flip: f64) -> Vec<Vec<f64>> {
    let k = 1usize << n;
    (0..k)
        .map(|x| {
            (0..k)
                .map(|b| {
                    let flips = (x ^ b).count_ones() as i32;
                    0.5f64.powi(n as i32) * flip.powi(flips) * (1.0 - flip).powi(n as i32 - flips)
                })
                .collect()
        })
        .collect()
}

fn main() -> purity::Result<()> {
    let eps = 0.1;
    for n in 2..=8 {
        let r = run_distillation_diagonal(&noisy_copies(n, 0.05), eps, 0)?;
        let (l, s) = (&r.ledger, &r.stages);
        println!(
            "n = {n}: net {:>6.3} bits ({:.3}/copy), sent {:>6.3}, blocks {}×{}; decoding {:.4} ≤ {:.4}; distance {:.4} ≤ {:.4}",
            l.net_bits,
            l.net_bits / n as f64,
            l.communication_bits,
            l.blocks,
            l.block_size,
            s.decoding.measured,
            s.decoding.bound,
            r.final_distance,
            r.accumulated_bound,
        );
    }
    Ok(())
}
