use proptest::prelude::*;
use purity::distillation::{build_decoders, make_binning, run_distillation_diagonal};
use purity::entropy::{i_h_cq_test, CqState};
use purity::operator::random::{random_density_with, random_simplex, rng};
use purity::operator::{CMatrix, HilbertDims};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() }
}

fn random_joint(rows: usize, cols: usize, seed: u64) -> Vec<Vec<f64>> {
    random_simplex(rows * cols, &mut rng(seed)).chunks(cols).map(<[f64]>::to_vec).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn classical_runs_keep_the_ledger_and_every_bound(rows in 2usize..=8, cols in 2usize..=8, seed in any::<u64>(), eps in 0.02f64..0.4) {
        let r = run_distillation_diagonal(&random_joint(rows, cols, seed), eps, seed).unwrap();
        prop_assert_eq!(r.ledger.imbalance(), 0.0);
        prop_assert!(r.stages.all_hold(1e-9), "{:?}", r.stages);
        prop_assert!(r.final_distance <= r.accumulated_bound + 1e-9);
        prop_assert!(r.ledger.communication_bits <= r.ledger.log2_good_set + (1.0 + r.ledger.padding as f64).log2() + 1e-12);
    }

    #[test]
    fn decoders_complete_to_identity(k in 2usize..=6, seed in any::<u64>()) {
        let dims = HilbertDims::single("B", 4);
        let conditionals = (0..k as u64).map(|x| random_density_with(dims.clone(), 2, seed ^ (x + 1)).unwrap()).collect();
        let cq = CqState::new(random_simplex(k, &mut rng(seed)), conditionals).unwrap();
        let binning = make_binning(&cq, 0.3, seed).unwrap();
        let projectors = i_h_cq_test(&cq, 0.3).unwrap().projectors;
        let decoder = build_decoders(&cq, &binning, &projectors).unwrap();
        for m in 0..decoder.blocks() {
            let completed = decoder.completed(m);
            let total = completed.iter().fold(CMatrix::zeros(4, 4), |acc, t| acc + t.to_dense());
            prop_assert!((total - CMatrix::identity(4, 4)).iter().all(|z| z.norm() < 1e-9));
            for theta in completed.iter().chain(std::iter::once(&decoder.abort[m])) {
                prop_assert!(theta.eigenvalues().iter().all(|&v| v > -1e-9));
            }
        }
    }
}
