//! Truncation-based smoothed max-entropies.
//!
//! The ε-tail of the spectrum is removed greedily from the smallest
//! eigenvalue upward. The retained sub-normalized operator `ρ′` is the witness
//! for all three quantities, so each is an upper bound on its fidelity-ball
//! smoothed counterpart.

use crate::operator::{c, CMatrix, DensityOperator, HermitianOperator, SpectralMultiset, TRUNCATION_SLACK};
use crate::{Error, Result};

/// Which entries survive the ε-tail removal.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    /// Per input index: retained?
    pub kept: Vec<bool>,
    pub removed_mass: f64,
}

impl Truncation {
    pub fn retained_count(&self) -> usize {
        self.kept.iter().filter(|k| **k).count()
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must lie in [0, 1)")));
    }
    Ok(())
}

/// Values closer than this are ordered by index alone.
const TIE_QUANTUM: f64 = 1e-13;

/// Greedy tail removal over `values` listed in their tie-break order: among
/// equal values the later index is removed first. Non-positive entries carry
/// no mass and are always removed.
///
/// Values are compared on a grid of [`TIE_QUANTUM`], so rounding noise in
/// the last digits does not reshuffle exact ties.
pub fn truncate_values(values: &[f64], eps: f64) -> Truncation {
    let key = |v: f64| (v / TIE_QUANTUM).round();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| key(values[b]).total_cmp(&key(values[a])).then(a.cmp(&b)));
    truncate_in_order(values, &order, eps)
}

/// Same as [`truncate_values`] but with a caller-supplied descending order.
pub(crate) fn truncate_in_order(values: &[f64], order: &[usize], eps: f64) -> Truncation {
    let budget = eps + TRUNCATION_SLACK;
    let mut kept = vec![true; values.len()];
    let mut removed = 0.0;
    for &i in order.iter().rev() {
        let v = values[i].max(0.0);
        if removed + v > budget {
            break;
        }
        removed += v;
        kept[i] = false;
    }
    Truncation { kept, removed_mass: removed }
}

/// Probability vector with its ε-tail zeroed.
pub fn truncate_tail_probs(p: &[f64], eps: f64) -> Vec<f64> {
    let t = truncate_values(p, eps);
    p.iter().zip(&t.kept).map(|(&x, &k)| if k { x } else { 0.0 }).collect()
}

/// `ρ′`: the state with its ε-tail of eigenvalues removed.
pub fn truncate_tail(rho: &DensityOperator, eps: f64) -> DensityOperator {
    let spec = rho.eigh();
    let t = truncate_eigen(&spec.values, eps);
    let d = rho.dim();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        if t.kept[i] {
            let v = spec.vectors.column(i);
            m += v * v.adjoint() * c(spec.values[i]);
        }
    }
    if t.retained_count() == 0 {
        return rho.clone();
    }
    DensityOperator::from_trusted(HermitianOperator::from_matrix_unchecked(rho.dims().clone(), m))
}

/// Truncation of a canonical eigen-spectrum: order is the eigen-index order.
pub(crate) fn truncate_eigen(values: &[f64], eps: f64) -> Truncation {
    let order: Vec<usize> = (0..values.len()).collect();
    truncate_in_order(values, &order, eps)
}

/// The three truncation-based quantities at once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEntropies {
    /// `log₂ |supp ρ′|`.
    pub tilde: f64,
    /// `log₂ 1/λ_min(ρ′)`.
    pub prime: f64,
    /// `2 log₂ Tr √ρ′`.
    pub smooth_ub: f64,
}

pub(crate) fn tail_entropies_of(values: &[f64], t: &Truncation) -> TailEntropies {
    let kept: Vec<f64> = values.iter().zip(&t.kept).filter(|(v, k)| **k && **v > 0.0).map(|(v, _)| *v).collect();
    let min = kept.iter().copied().fold(f64::INFINITY, f64::min);
    TailEntropies {
        tilde: (kept.len() as f64).log2(),
        prime: -min.log2(),
        smooth_ub: 2.0 * kept.iter().map(|v| v.sqrt()).sum::<f64>().log2(),
    }
}

pub fn tail_entropies(rho: &DensityOperator, eps: f64) -> Result<TailEntropies> {
    check_eps(eps)?;
    let values = rho.eigh().values;
    let t = truncate_eigen(&values, eps);
    Ok(tail_entropies_of(&values, &t))
}

pub fn tail_entropies_probs(p: &[f64], eps: f64) -> Result<TailEntropies> {
    check_eps(eps)?;
    let t = truncate_values(p, eps);
    Ok(tail_entropies_of(p, &t))
}

pub fn tail_entropies_multiset(ms: &SpectralMultiset, eps: f64) -> Result<TailEntropies> {
    check_eps(eps)?;
    let (kept, _) = ms.truncate_tail(eps);
    Ok(TailEntropies {
        tilde: crate::operator::log2_biguint(&kept.support_size()),
        prime: -kept.min_positive().unwrap_or(0.0).log2(),
        smooth_ub: 2.0 * kept.log2_sqrt_sum(),
    })
}

/// `H̃_max^ε`: log of the support size of `ρ′`.
pub fn h_max_tilde(rho: &DensityOperator, eps: f64) -> Result<f64> {
    Ok(tail_entropies(rho, eps)?.tilde)
}

/// `(H′_max)^ε`: log of the inverse smallest retained eigenvalue.
pub fn h_max_prime(rho: &DensityOperator, eps: f64) -> Result<f64> {
    Ok(tail_entropies(rho, eps)?.prime)
}

/// `2 log₂ Tr √ρ′`, an upper bound on the smoothed max-entropy.
pub fn h_max_smooth_ub(rho: &DensityOperator, eps: f64) -> Result<f64> {
    Ok(tail_entropies(rho, eps)?.smooth_ub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HilbertDims;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::diagonal(HilbertDims::single("A", p.len()), p).unwrap()
    }

    /// Sort-and-cumsum oracle: number of atoms removed.
    fn removed_oracle(p: &[f64], eps: f64) -> usize {
        let mut v = p.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut acc = 0.0;
        let mut n = 0;
        for x in v {
            if acc + x > eps + 1e-12 {
                break;
            }
            acc += x;
            n += 1;
        }
        n
    }

    #[test]
    fn four_level_example() {
        let p = [0.5, 0.3, 0.15, 0.05];
        assert_eq!(truncate_tail_probs(&p, 0.1), vec![0.5, 0.3, 0.15, 0.0]);
        let t = tail_entropies(&diag(&p), 0.1).unwrap();
        assert!((t.tilde - 3f64.log2()).abs() < 1e-12);
        assert!((t.prime - (1.0 / 0.15f64).log2()).abs() < 1e-9);
        assert_eq!(removed_oracle(&p, 0.1), 1);
    }

    #[test]
    fn uniform_eight() {
        let p = [0.125; 8];
        let t = truncate_values(&p, 0.25);
        assert_eq!(t.retained_count(), 6);
        assert_eq!(removed_oracle(&p, 0.25), 2);
        // Ties: the highest indices go first.
        assert_eq!(t.kept, vec![true, true, true, true, true, true, false, false]);
    }

    #[test]
    fn no_atom_removable() {
        let t = tail_entropies(&diag(&[0.25; 4]), 0.2).unwrap();
        assert!((t.tilde - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_eps_is_identity() {
        let rho = diag(&[0.5, 0.3, 0.2]);
        let out = truncate_tail(&rho, 0.0);
        assert!((out.matrix() - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn pure_state_zeros() {
        let t = tail_entropies(&diag(&[1.0, 0.0, 0.0]), 0.3).unwrap();
        assert!(t.tilde.abs() < 1e-12 && t.prime.abs() < 1e-12 && t.smooth_ub.abs() < 1e-12);
    }
}
