//! Multipartite complex linear algebra.

mod block;
mod channels;
mod dims;
mod facts;
mod hermitian;
mod measures;
mod multiset;
mod povm;
pub mod random;
mod spectral;

pub use block::Block;
pub use channels::{
    apply_unitary, dephase, kron, partial_trace, partial_trace_matrix, purify,
    reduced_from_vector, tensor,
};
pub use dims::HilbertDims;
pub use facts::{gentle_measurement_check, sequential_success};
pub use hermitian::{DensityOperator, HermitianOperator, PureStateVector};
pub use measures::{generalized_fidelity, trace_distance, trace_norm, trace_norm_hermitian};
pub use multiset::{log2_biguint, SpectralMultiset};
pub(crate) use multiset::TRUNCATION_SLACK;
pub use povm::RankOnePovm;
pub use random::{haar_unitary, random_density, random_rank_one_povm};
pub use spectral::{
    eigh, eigh_matrix, eigh_raw, hermitian_function, is_projector, left_polar, psd_sqrt, SpectralDecomposition,
    DEGENERACY_GAP,
};
pub(crate) use spectral::orthonormalize;

pub use nalgebra::Complex;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Relative Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_TOL` count as non-negative.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest absolute entry.
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// `(M + M†) / 2`.
pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Real part of the trace.
pub(crate) fn re_trace(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// `Tr[A B]` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc.re
}
