//! Bob's coherent version of the decoder.
//!
//! For each block `m` the completed decoder `{Θ′_n}` defines the isometry
//! `V = Σ_n |n⟩^N ⊗ √Θ′_n` from `B` into `N ⊗ B`. With `E = |0⟩^N ⊗ I` the
//! operator `V†E = √Θ′_0` is Hermitian, so `Z = V − E` satisfies
//! `Z†Z = 2(I − √Θ′_0)` and the reflection `W = I − 2 P_{ran Z}` maps `V` onto
//! `E`. Its `(0, n)` block is `√Θ′_n`, the only part the analysis constrains.

use super::decoder::SequentialDecoder;
use crate::operator::{c, eigh_raw, max_abs, orthonormalize, CMatrix, CVector};
use crate::{Error, Result};

/// Singular values of `Z` at or below this are treated as zero.
pub(crate) const RANGE_TOL: f64 = 1e-7;

/// Block-diagonal unitary `W = Σ_m |m⟩⟨m| ⊗ W(m)` on `M ⊗ N ⊗ B`.
#[derive(Clone, Debug)]
pub struct BobUnitary {
    /// `W(m)` on `N ⊗ B`, index `n·d_B + b`.
    pub blocks: Vec<CMatrix>,
    pub block_size: usize,
    pub b_dim: usize,
}

impl BobUnitary {
    /// The full operator on `M ⊗ N ⊗ B`.
    pub fn full(&self) -> CMatrix {
        let k = self.block_size * self.b_dim;
        let mut w = CMatrix::zeros(k * self.blocks.len(), k * self.blocks.len());
        for (m, b) in self.blocks.iter().enumerate() {
            w.view_mut((m * k, m * k), (k, k)).copy_from(b);
        }
        w
    }

    /// Largest entry of `W†W − I` over all blocks.
    pub fn unitarity_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|w| max_abs(&(w.adjoint() * w - CMatrix::identity(w.nrows(), w.ncols()))))
            .fold(0.0, f64::max)
    }
}

/// Stacks `√Θ′_n` into the isometry `V`.
fn decoding_isometry(completed: &[CMatrix]) -> CMatrix {
    let n = completed.len();
    let d = completed[0].nrows();
    let mut v = CMatrix::zeros(n * d, d);
    for (k, t) in completed.iter().enumerate() {
        v.view_mut((k * d, 0), (d, d)).copy_from(&crate::operator::psd_sqrt(t));
    }
    v
}

/// Builds `W(m)` for every block of `decoder`.
pub fn bob_unitary(decoder: &SequentialDecoder) -> Result<BobUnitary> {
    let n = decoder.block_size();
    let d = decoder.theta.first().and_then(|t| t.first()).map_or(0, |b| b.dim());
    let mut blocks = Vec::with_capacity(decoder.blocks());
    for m in 0..decoder.blocks() {
        let completed: Vec<CMatrix> = decoder.completed(m).iter().map(|b| b.to_dense()).collect();
        let v = decoding_isometry(&completed);
        let mut z = v.clone();
        for i in 0..d {
            z[(i, i)] -= c(1.0);
        }
        // Range of Z from the eigenvectors of Z†Z: ran Z = Z·supp(Z†Z).
        let (values, vectors) = eigh_raw(&(z.adjoint() * &z));
        let images: Vec<CVector> = (0..d)
            .filter(|&i| values[i] > RANGE_TOL * RANGE_TOL)
            .map(|i| &z * vectors.column(i) / c(values[i].sqrt()))
            .collect();
        let mut w = CMatrix::identity(n * d, n * d);
        for col in orthonormalize(&images, 1e-8) {
            w -= &col * col.adjoint() * c(2.0);
        }
        // W V must equal E = |0⟩ ⊗ I.
        let mut image = &w * &v;
        for i in 0..d {
            image[(i, i)] -= c(1.0);
        }
        let miss = max_abs(&image);
        if miss > 1e-6 {
            return Err(Error::Numerical(format!("block {m}: W·V misses |0⟩ ⊗ I by {miss:.3e}")));
        }
        blocks.push(w);
    }
    let out = BobUnitary { blocks, block_size: n, b_dim: d };
    let res = out.unitarity_residual();
    if res > 1e-8 {
        return Err(Error::Numerical(format!("W is not unitary (residual {res:.3e})")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distillation::binning::Binning;
    use crate::distillation::decoder::build_decoders;
    use crate::entropy::{i_h_cq, CqState};
    use crate::operator::random::random_density_with;
    use crate::operator::{psd_sqrt, DensityOperator, HilbertDims};

    #[test]
    fn single_symbol_blocks_give_identity() {
        let cq = CqState::classical(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let (_, proj) = i_h_cq(&cq, 0.2).unwrap();
        let b = Binning::with_block_size(2, 1, 3).unwrap();
        let w = bob_unitary(&build_decoders(&cq, &b, &proj).unwrap()).unwrap();
        for blk in &w.blocks {
            assert!(max_abs(&(blk - CMatrix::identity(2, 2))) < 1e-12);
        }
    }

    #[test]
    fn orthogonal_pair_moves_n_to_zero() {
        let dims = HilbertDims::single("B", 2);
        let conds = vec![
            DensityOperator::diagonal(dims.clone(), &[1.0, 0.0]).unwrap(),
            DensityOperator::diagonal(dims, &[0.0, 1.0]).unwrap(),
        ];
        let cq = CqState::new(vec![0.5, 0.5], conds).unwrap();
        let (_, proj) = i_h_cq(&cq, 0.1).unwrap();
        let b = Binning::with_block_size(2, 2, 8).unwrap();
        let w = bob_unitary(&build_decoders(&cq, &b, &proj).unwrap()).unwrap();
        for x in 0..2 {
            let (_, n) = b.slot(x);
            // Input |n⟩|x⟩ must land in the N = 0 sector.
            let col = w.blocks[0].column(n * 2 + x);
            assert!((col.rows(0, 2).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_blocks_are_unitary_with_prescribed_first_row() {
        for seed in 0..30u64 {
            let dims = HilbertDims::single("B", 3);
            let conds: Vec<DensityOperator> =
                (0..4).map(|j| random_density_with(dims.clone(), 2, seed * 5 + j).unwrap()).collect();
            let cq = CqState::new(vec![0.25; 4], conds).unwrap();
            let (_, proj) = i_h_cq(&cq, 0.3).unwrap();
            let b = Binning::with_block_size(4, 2, seed).unwrap();
            let dec = build_decoders(&cq, &b, &proj).unwrap();
            let w = bob_unitary(&dec).unwrap();
            assert!(w.unitarity_residual() < 1e-8);
            for m in 0..b.blocks {
                let completed = dec.completed(m);
                for (n, t) in completed.iter().enumerate() {
                    let blk = w.blocks[m].view((0, n * 3), (3, 3)).into_owned();
                    assert!(max_abs(&(blk - psd_sqrt(&t.to_dense()))) < 1e-7);
                }
            }
        }
    }
}
