use rayon::prelude::*;
use serde::Serialize;

use super::smoothing::{check_eps, tail_entropies_multiset};
use crate::operator::{DensityOperator, SpectralMultiset};
use crate::{Error, Result};

/// Spectrum of `ρ^{⊗n}` as a multiset.
pub fn iid_power(ms: &SpectralMultiset, n: usize) -> Result<SpectralMultiset> {
    ms.tensor_power(n)
}

/// Per-copy smoothed entropies of `ρ^{⊗n}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AepPoint {
    pub n: usize,
    pub h_tilde_per_copy: f64,
    pub h_prime_per_copy: f64,
    pub h_max_ub_per_copy: f64,
}

/// Sweep `n = 1..=n_max` over the single-copy spectrum of `rho`.
pub fn aep_sweep(rho: &DensityOperator, eps: f64, n_max: usize) -> Result<Vec<AepPoint>> {
    let ms = SpectralMultiset::from_eigenvalues(&rho.eigenvalues())?;
    aep_sweep_spectrum(&ms, eps, n_max)
}

/// Sweep over a spectrum given directly. Points are computed in parallel
/// and returned in increasing `n`.
pub fn aep_sweep_spectrum(ms: &SpectralMultiset, eps: f64, n_max: usize) -> Result<Vec<AepPoint>> {
    check_eps(eps)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let t = tail_entropies_multiset(&ms.tensor_power(n)?, eps)?;
            let k = n as f64;
            Ok(AepPoint {
                n,
                h_tilde_per_copy: t.tilde / k,
                h_prime_per_copy: t.prime / k,
                h_max_ub_per_copy: t.smooth_ub / k,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::smoothing::tail_entropies_probs;

    #[test]
    fn multiset_matches_dense_kronecker() {
        // Oracle: explicit product distribution for n = 4.
        let p = [0.7, 0.2, 0.1];
        let mut dense = vec![1.0];
        for _ in 0..4 {
            dense = dense.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
        }
        let ms = SpectralMultiset::from_eigenvalues(&p).unwrap().tensor_power(4).unwrap();
        for eps in [0.0, 0.05, 0.2] {
            let a = tail_entropies_probs(&dense, eps).unwrap();
            let b = tail_entropies_multiset(&ms, eps).unwrap();
            assert!((a.tilde - b.tilde).abs() < 1e-12, "{eps}");
            assert!((a.prime - b.prime).abs() < 1e-9);
            assert!((a.smooth_ub - b.smooth_ub).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_is_ordered() {
        let ms = SpectralMultiset::from_eigenvalues(&[0.9, 0.1]).unwrap();
        let pts = aep_sweep_spectrum(&ms, 0.01, 12).unwrap();
        assert!(pts.iter().enumerate().all(|(i, p)| p.n == i + 1));
    }
}
