//! Seeded generators for test inputs.
//!
//! Every generator owns a `ChaCha8Rng` seeded from the caller's `u64`, so the
//! same seed always yields bit-identical output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, CVector, DensityOperator, HermitianOperator, HilbertDims, RankOnePovm, C64};
use crate::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Hilbert–Schmidt random state of the given rank, labelled `A`.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(HilbertDims::single("A", d.max(1)), rank, seed)
}

/// Hilbert–Schmidt random state on `dims`.
pub fn random_density_with(dims: HilbertDims, rank: usize, seed: u64) -> Result<DensityOperator> {
    let d = dims.total();
    if rank == 0 || rank > d {
        return Err(Error::Infeasible(format!("rank {rank} for dimension {d}")));
    }
    let mut r = rng(seed);
    let g = ginibre(d, rank, &mut r);
    let w = &g * g.adjoint();
    let tr = super::re_trace(&w);
    let op = HermitianOperator::from_matrix_unchecked(dims, w * c(1.0 / tr));
    Ok(DensityOperator::from_trusted(op))
}

/// Haar-random unitary from Gram–Schmidt on a Gaussian matrix.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    haar_unitary_from(d, &mut rng(seed))
}

pub fn haar_unitary_from(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(d, d, rng);
    let mut q = CMatrix::zeros(d, d);
    for j in 0..d {
        let mut v: CVector = g.column(j).into_owned();
        for k in 0..j {
            let qk = q.column(k);
            let overlap = qk.dotc(&v);
            v -= qk * overlap;
        }
        // Second pass for numerical orthogonality.
        for k in 0..j {
            let qk = q.column(k);
            let overlap = qk.dotc(&v);
            v -= qk * overlap;
        }
        let n = v.norm();
        q.set_column(j, &(v / c(n)));
    }
    q
}

/// Rank-one POVM with `k ≥ d` outcomes from the rows of a Haar isometry.
///
/// With `k = d` every weight is one and the vectors form an orthonormal basis.
pub fn random_rank_one_povm(d: usize, k: usize, seed: u64) -> Result<RankOnePovm> {
    if k < d || d == 0 {
        return Err(Error::Infeasible(format!("{k} outcomes cannot be complete in dimension {d}")));
    }
    let u = haar_unitary(k, seed);
    let elements = (0..k)
        .map(|x| {
            // Row x of the first d columns, as a column vector: w = (row)†.
            let w = CVector::from_iterator(d, (0..d).map(|j| u[(x, j)].conj()));
            let weight = w.norm_squared();
            let psi = if weight > 0.0 { w / c(weight.sqrt()) } else { CVector::zeros(d) };
            (weight, psi)
        })
        .collect();
    RankOnePovm::new(HilbertDims::single("A", d), elements)
}

/// Uniformly random point of the probability simplex.
pub fn random_simplex(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs;

    #[test]
    fn rank_one_state_is_pure() {
        let rho = random_density(4, 1, 3).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_povm_is_a_basis() {
        let povm = random_rank_one_povm(3, 3, 5).unwrap();
        for x in 0..3 {
            assert!((povm.weight(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(haar_unitary(4, 9), haar_unitary(4, 9));
        assert_eq!(random_density(4, 2, 9).unwrap(), random_density(4, 2, 9).unwrap());
        let u = haar_unitary(5, 1);
        assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(5, 5))) < 1e-12);
    }
}
