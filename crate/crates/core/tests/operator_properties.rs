use proptest::prelude::*;
use purity::operator::random::random_density_with;
use purity::operator::*;

fn state(labels: &[(&str, usize)], seed: u64) -> DensityOperator {
    let dims = HilbertDims::new(labels.iter().map(|(l, d)| (*l, *d))).unwrap();
    let total = dims.total();
    random_density_with(dims, 1 + (seed as usize % total), seed).unwrap()
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn partial_trace_of_product_factorizes(da in 1usize..=4, db in 1usize..=2, seed in any::<u64>()) {
        let a = state(&[("A", da)], seed);
        let b = state(&[("B", db)], seed ^ 1);
        let ab = tensor(a.op(), b.op()).unwrap();
        let left = partial_trace(&ab, &["A"]).unwrap();
        let right = partial_trace(&ab, &["B"]).unwrap();
        prop_assert!(max_entry(&(left.matrix() - a.matrix())) < 1e-10);
        prop_assert!(max_entry(&(right.matrix() - b.matrix())) < 1e-10);
    }

    #[test]
    fn nested_partial_traces_commute(seed in any::<u64>()) {
        let rho = state(&[("A", 2), ("B", 2), ("C", 2)], seed);
        let one_by_one = partial_trace(&partial_trace(rho.op(), &["A", "B"]).unwrap(), &["A"]).unwrap();
        let at_once = partial_trace(rho.op(), &["A"]).unwrap();
        prop_assert!(max_entry(&(one_by_one.matrix() - at_once.matrix())) < 1e-12);
    }

    #[test]
    fn trace_distance_is_a_unitarily_invariant_metric(d in 2usize..=5, seed in any::<u64>()) {
        let (r, s, t) = (state(&[("A", d)], seed), state(&[("A", d)], seed ^ 2), state(&[("A", d)], seed ^ 3));
        let rs = trace_distance(&r, &s).unwrap();
        let st = trace_distance(&s, &t).unwrap();
        let rt = trace_distance(&r, &t).unwrap();
        prop_assert!(rt <= rs + st + 1e-9);
        prop_assert!((0.0..=2.0 + 1e-9).contains(&rs));
        let u = haar_unitary(d, seed);
        let ur = DensityOperator::from_matrix(r.dims().clone(), apply_unitary(&u, r.matrix())).unwrap();
        let us = DensityOperator::from_matrix(s.dims().clone(), apply_unitary(&u, s.matrix())).unwrap();
        prop_assert!((trace_distance(&ur, &us).unwrap() - rs).abs() < 1e-9);
    }

    #[test]
    fn fidelity_and_trace_distance_ordering(d in 2usize..=5, seed in any::<u64>()) {
        let (r, s) = (state(&[("A", d)], seed), state(&[("A", d)], seed ^ 5));
        let f = generalized_fidelity(&r, &s).unwrap();
        let half = trace_distance(&r, &s).unwrap() / 2.0;
        prop_assert!(1.0 - f <= half + 1e-9);
        prop_assert!(half <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn gentle_measurement_holds(d in 2usize..=6, seed in any::<u64>(), weights in prop::collection::vec(0.0f64..=1.0, 6)) {
        let rho = state(&[("A", d)], seed);
        let u = haar_unitary(d, seed ^ 7);
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(d, weights[..d].iter().map(|w| C64::new(*w, 0.0))));
        let lam = HermitianOperator::new(rho.dims().clone(), apply_unitary(&u, &diag)).unwrap();
        let (lhs, rhs) = gentle_measurement_check(&rho, &lam).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }

    #[test]
    fn sequential_projections_succeed(d in 2usize..=6, len in 1usize..=4, seed in any::<u64>()) {
        let rho = state(&[("A", d)], seed);
        let projectors: Vec<HermitianOperator> = (0..len as u64)
            .map(|i| {
                let u = haar_unitary(d, seed.wrapping_add(100 + i));
                let keep = 1 + (seed.wrapping_add(i) as usize % d);
                let diag = CMatrix::from_diagonal(&CVector::from_iterator(
                    d,
                    (0..d).map(|k| C64::new(if k < keep { 1.0 } else { 0.0 }, 0.0)),
                ));
                HermitianOperator::new(rho.dims().clone(), apply_unitary(&u, &diag)).unwrap()
            })
            .collect();
        let (lhs, rhs) = sequential_success(&rho, &projectors).unwrap();
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn dephasing_is_idempotent(seed in any::<u64>()) {
        let rho = state(&[("A", 2), ("B", 3)], seed);
        let once = dephase(&rho, "B").unwrap();
        let twice = dephase(&once, "B").unwrap();
        prop_assert_eq!(once.matrix(), twice.matrix());
        prop_assert!((once.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn purification_recovers_the_state(d in 1usize..=5, seed in any::<u64>()) {
        let rho = state(&[("A", d)], seed);
        let psi = purify(&rho).unwrap();
        let back = reduced_from_vector(psi.amplitudes(), psi.dims(), &["A"]).unwrap();
        prop_assert!(max_entry(&(back - rho.matrix())) < 1e-10);
    }

    #[test]
    fn eigh_is_deterministic_and_reconstructs(d in 1usize..=6, seed in any::<u64>()) {
        let rho = state(&[("A", d)], seed);
        let (first, second) = (rho.eigh(), rho.clone().eigh());
        prop_assert_eq!(&first.values, &second.values);
        prop_assert_eq!(&first.vectors, &second.vectors);
        prop_assert!(first.values.windows(2).all(|w| w[0] >= w[1] - DEGENERACY_GAP));
        prop_assert!(max_entry(&(first.reconstruct() - rho.matrix())) < 1e-10);
    }

    #[test]
    fn left_polar_is_unitary_and_recomposes(d in 1usize..=5, rank in 1usize..=5, seed in any::<u64>()) {
        let rank = rank.min(d);
        let g = purity::operator::random::ginibre(d, rank, &mut purity::operator::random::rng(seed));
        let h = purity::operator::random::ginibre(rank, d, &mut purity::operator::random::rng(seed ^ 9));
        let q = g * h;
        let u = left_polar(&q);
        prop_assert!(max_entry(&(u.adjoint() * &u - CMatrix::identity(d, d))) < 1e-9);
        prop_assert!(max_entry(&(&u * psd_sqrt(&(q.adjoint() * &q)) - &q)) < 1e-8);
    }

    #[test]
    fn tensor_power_multiset_matches_dense_spectrum(p in prop::collection::vec(0.01f64..1.0, 2..=3), n in 1usize..=3) {
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|x| x / total).collect();
        let ms = SpectralMultiset::from_eigenvalues(&p).unwrap().tensor_power(n).unwrap();
        let mut dense: Vec<f64> = vec![1.0];
        for _ in 0..n {
            dense = dense.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
        }
        prop_assert!((ms.total_mass() - 1.0).abs() < 1e-10);
        let from_dense = SpectralMultiset::from_eigenvalues(&dense).unwrap();
        prop_assert!((ms.entropy() - from_dense.entropy()).abs() < 1e-10);
        prop_assert_eq!(ms.count(), from_dense.count());
    }
}
