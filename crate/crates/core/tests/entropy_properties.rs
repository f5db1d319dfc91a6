use purity::entropy::*;
use purity::operator::random::{random_density_with, random_simplex, rng};
use purity::operator::*;
use rand::Rng;

fn diag(label: &str, p: &[f64]) -> DensityOperator {
    DensityOperator::diagonal(HilbertDims::single(label, p.len()), p).unwrap()
}

/// Fractional-knapsack oracle for commuting `D_H`: fill type-I mass in order
/// of decreasing likelihood ratio, splitting the last atom.
fn knapsack_beta(rho: &[f64], sigma: &[f64], eps: f64) -> f64 {
    let mut idx: Vec<usize> = (0..rho.len()).filter(|&i| rho[i] > 0.0).collect();
    idx.sort_by(|&a, &b| (rho[b] * sigma[a]).partial_cmp(&(rho[a] * sigma[b])).unwrap());
    let mut need = 1.0 - eps;
    let mut beta = 0.0;
    for i in idx {
        if need <= 0.0 {
            break;
        }
        let take = need.min(rho[i]);
        beta += sigma[i] * take / rho[i];
        need -= take;
    }
    beta
}

#[test]
fn neyman_pearson_strong_duality_on_random_triples() {
    let mut r = rng(2024);
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let d = r.random_range(2..=6);
        let dims = HilbertDims::single("A", d);
        let rho = random_density_with(dims.clone(), r.random_range(1..=d), seed).unwrap();
        let sigma = random_density_with(dims, r.random_range(1..=d), seed + 10_000).unwrap();
        let eps = r.random_range(0.001..0.999);
        let t = neyman_pearson(&rho, &sigma, eps).unwrap();
        assert!((t.alpha - (1.0 - eps)).abs() < 1e-9, "alpha {} eps {eps}", t.alpha);
        let lam = HermitianOperator::new(rho.dims().clone(), t.test_block(0).to_dense()).unwrap();
        lam.check_effect(1e-9).unwrap();
        worst = worst.max(t.duality_gap());
    }
    assert!(worst <= 1e-7, "worst duality gap {worst}");
}

#[test]
fn neyman_pearson_matches_knapsack_on_commuting_pairs() {
    let mut r = rng(7);
    for _ in 0..300 {
        let d = r.random_range(2..=6);
        let p = random_simplex(d, &mut r);
        let mut q = random_simplex(d, &mut r);
        if r.random_bool(0.3) {
            q[0] = 0.0;
            let s: f64 = q.iter().sum();
            q.iter_mut().for_each(|x| *x /= s);
        }
        let eps = r.random_range(0.0..0.95);
        let t = neyman_pearson(&diag("A", &p), &diag("A", &q), eps).unwrap();
        let want = knapsack_beta(&p, &q, eps);
        assert!((t.beta - want).abs() < 1e-9, "{} vs {want}", t.beta);
    }
}

#[test]
fn hypothesis_testing_orderings() {
    let mut r = rng(99);
    for seed in 0..200u64 {
        let d = r.random_range(2..=4);
        let dims = HilbertDims::single("A", d);
        let rho = random_density_with(dims.clone(), d, seed).unwrap();
        let sigma = random_density_with(dims, d, seed + 500).unwrap();
        let d0 = d_h(&rho, &sigma, 0.0).unwrap();
        let rel = relative_entropy(&rho, &sigma).unwrap();
        let dmax = d_max(&rho, &sigma).unwrap();
        assert!(d0 <= rel + 1e-9 && rel <= dmax + 1e-9, "{d0} {rel} {dmax}");
        let mut prev = d0;
        for eps in [0.05, 0.1, 0.3, 0.6] {
            let v = d_h(&rho, &sigma, eps).unwrap();
            assert!(v >= prev - 1e-9);
            prev = v;
        }
    }
}

#[test]
fn data_processing_under_partial_trace_and_dephasing() {
    let mut r = rng(5);
    for seed in 0..500u64 {
        let dims = HilbertDims::new([("A", 2), ("B", r.random_range(2..=3))]).unwrap();
        let d = dims.total();
        let rho = random_density_with(dims.clone(), r.random_range(1..=d), seed).unwrap();
        let sigma = random_density_with(dims, d, seed + 7777).unwrap();
        let eps = r.random_range(0.01..0.9);
        let full = d_h(&rho, &sigma, eps).unwrap();
        let tr = |s: &DensityOperator| {
            DensityOperator::new(partial_trace(s.op(), &["A"]).unwrap()).unwrap()
        };
        let reduced = d_h(&tr(&rho), &tr(&sigma), eps).unwrap();
        let deph = d_h(&dephase(&rho, "B").unwrap(), &dephase(&sigma, "B").unwrap(), eps).unwrap();
        assert!(reduced <= full + 1e-7, "partial trace {reduced} > {full}");
        assert!(deph <= full + 1e-7, "dephasing {deph} > {full}");
    }
}

#[test]
fn i_h_examples_and_cq_agreement() {
    let dims = HilbertDims::new([("A", 2), ("B", 2)]).unwrap();
    let prod = DensityOperator::diagonal(dims.clone(), &[0.25; 4]).unwrap();
    for eps in [0.0, 0.1, 0.3] {
        assert!((i_h(&prod, eps).unwrap() - (1.0 / (1.0 - eps)).log2()).abs() < 1e-9);
    }
    // General path and cq path on random measured states.
    for seed in 0..40u64 {
        let rho = random_density_with(dims.clone(), 4, seed).unwrap();
        let povm = RankOnePovm::computational_basis(HilbertDims::single("A", 2));
        let cq = measure_cq(&rho, &povm, "A").unwrap();
        let joint = cq.joint().unwrap();
        let general = i_h(&joint, 0.2).unwrap();
        let (blockwise, _) = i_h_cq(&cq, 0.2).unwrap();
        assert!((general - blockwise).abs() < 1e-7, "{general} vs {blockwise}");
    }
}

#[test]
fn conditional_i_h_reductions() {
    let cq = CqState::classical(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
    let single = i_h_cq(&cq, 0.2).unwrap().0;
    assert!((i_h_cond_cq(std::slice::from_ref(&cq), &[1.0], 0.2).unwrap() - single).abs() < 1e-9);
    assert!((i_h_cond_cq(&[cq.clone(), cq.clone()], &[0.5, 0.5], 0.2).unwrap() - single).abs() < 1e-9);

    // Direct assembly oracle: explicit K-block-diagonal operators.
    let prod = CqState::classical(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
    let got = i_h_cond_cq(&[prod.clone(), cq.clone()], &[0.5, 0.5], 0.2).unwrap();
    let mut joint = Vec::new();
    let mut product = Vec::new();
    for c in [&prod, &cq] {
        let avg = c.average();
        for x in 0..c.len() {
            for b in 0..2 {
                joint.push(0.5 * c.prob(x) * c.conditional(x).matrix()[(b, b)].re);
                product.push(0.5 * c.prob(x) * avg[(b, b)].re);
            }
        }
    }
    let want = -knapsack_beta(&joint, &product, 0.2).log2();
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn modified_max_information_matches_lp_on_commuting_instances() {
    let mut r = rng(31);
    for _ in 0..50 {
        let k = r.random_range(2..=4);
        let conds: Vec<DensityOperator> = (0..k).map(|_| diag("B", &random_simplex(3, &mut r))).collect();
        let cq = CqState::new(random_simplex(k, &mut r), conds).unwrap();
        let (v, sigma) = i_max_mod_cq(&cq).unwrap();
        let lp = i_max_mod_commuting(&cq);
        assert!((v - lp).abs() < 1e-4, "{v} vs {lp}");
        for x in 0..k {
            let bound = d_max(cq.conditional(x), &sigma).unwrap();
            assert!(bound <= v + 1e-7);
        }
    }
}

#[test]
fn modified_max_information_certificate_on_quantum_instances() {
    for seed in 0..30u64 {
        let dims = HilbertDims::single("B", 3);
        let conds: Vec<DensityOperator> =
            (0..3).map(|j| random_density_with(dims.clone(), 1 + (j % 3), seed * 3 + j as u64).unwrap()).collect();
        let cq = CqState::new(vec![0.3, 0.3, 0.4], conds).unwrap();
        let full = i_max_mod_cq_full(&cq).unwrap();
        assert!(full.value >= 0.0);
        assert!(full.value - full.lower_bound <= 1e-4);
        for x in 0..3 {
            assert!(d_max(cq.conditional(x), &full.sigma).unwrap() <= full.value + 1e-7);
        }
    }
}

#[test]
fn measured_max_information_surrogate_holds_at_zero_smoothing() {
    for seed in 0..40u64 {
        let da = 2 + (seed as usize % 2);
        let rho = random_density_with(HilbertDims::single("A", da), da, seed).unwrap();
        let povm = random_rank_one_povm(da, da + 1, seed + 1).unwrap();
        let psi = purify(&rho).unwrap();
        let joint = psi.density();
        let cq = measure_cq(&joint, &povm, "A").unwrap();
        let (lhs, _) = i_max_mod_cq(&cq).unwrap();
        for eps in [0.1, 0.3] {
            let rhs = h_max_tilde(&rho, eps * eps / 48.0).unwrap() - 2.0 * (eps * eps / 24.0).log2();
            assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
        }
    }
}

#[test]
fn rate_terms_are_finite_on_random_qubit_pairs() {
    for seed in 0..20u64 {
        let dims = HilbertDims::new([("A", 2), ("B", 2)]).unwrap();
        let rho = random_density_with(dims, 4, seed).unwrap();
        let povm = random_rank_one_povm(2, 3, seed).unwrap();
        let r = distillation_rate_terms(&rho, &povm, 0.1).unwrap();
        assert!(r.is_well_formed());
        assert!(r.quantities.values().all(|q| q.value.is_finite()));
    }
}

#[test]
fn aep_binary_source_at_thirty_copies() {
    let ms = SpectralMultiset::from_eigenvalues(&[0.9, 0.1]).unwrap();
    let pts = aep_sweep_spectrum(&ms, 0.01, 30).unwrap();
    let h = 0.468_995_593_589_281;
    let last = &pts[29];
    // Binomial-tail oracle: all strings with at most 7 ones plus part of the
    // 8-ones class survive the 0.01 truncation.
    assert!((last.h_tilde_per_copy - 0.709_476_440_045_529_6).abs() < 1e-9);
    assert!((pts[4].h_tilde_per_copy - 0.8).abs() < 1e-12);
    assert!(last.h_tilde_per_copy >= h);
    assert!((last.h_tilde_per_copy - h).abs() < (pts[4].h_tilde_per_copy - h).abs());
    assert!((last.h_prime_per_copy - h).abs() < (pts[4].h_prime_per_copy - h).abs());
}
