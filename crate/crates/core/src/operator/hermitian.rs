use super::{
    c, eigh, hermitian_part, max_abs, re_trace, CMatrix, CVector, HilbertDims,
    SpectralDecomposition, C64, HERMITIAN_TOL, PSD_TOL,
};
use crate::{Error, Result};

/// Hermitian matrix carrying multipartite dimension metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dims: HilbertDims,
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates shape and Hermiticity, then stores the exact Hermitian part.
    pub fn new(dims: HilbertDims, matrix: CMatrix) -> Result<Self> {
        let d = dims.total();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, dims {} require {d}x{d}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        let dev = max_abs(&(&matrix - matrix.adjoint()));
        if dev > HERMITIAN_TOL * max_abs(&matrix) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { dims, matrix: hermitian_part(&matrix) })
    }

    /// Symmetrizes without checking.
    pub(crate) fn from_matrix_unchecked(dims: HilbertDims, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.total());
        Self { dims, matrix: hermitian_part(&matrix) }
    }

    pub fn identity(dims: HilbertDims) -> Self {
        let d = dims.total();
        Self { dims, matrix: CMatrix::identity(d, d) }
    }

    pub fn zeros(dims: HilbertDims) -> Self {
        let d = dims.total();
        Self { dims, matrix: CMatrix::zeros(d, d) }
    }

    pub fn from_real_diagonal(dims: HilbertDims, diag: &[f64]) -> Result<Self> {
        if diag.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} diagonal entries for dims {dims}",
                diag.len()
            )));
        }
        let v = CVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x)));
        Ok(Self { dims, matrix: CMatrix::from_diagonal(&v) })
    }

    /// `|v⟩⟨v|` scaled by `weight`.
    pub fn rank_one(dims: HilbertDims, v: &CVector, weight: f64) -> Result<Self> {
        if v.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!("vector of length {} for dims {dims}", v.len())));
        }
        Ok(Self { dims, matrix: v * v.adjoint() * c(weight) })
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        re_trace(&self.matrix)
    }

    pub fn eigh(&self) -> SpectralDecomposition {
        eigh(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        super::eigh_raw(&self.matrix).0
    }

    /// Same matrix with relabelled subsystems of equal total dimension.
    pub fn with_dims(self, dims: HilbertDims) -> Result<Self> {
        if dims.total() != self.dim() {
            return Err(Error::DimensionMismatch(format!("cannot view {} as {dims}", self.dims)));
        }
        Ok(Self { dims, matrix: self.matrix })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dims: self.dims.clone(), matrix: &self.matrix * c(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { dims: self.dims.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { dims: self.dims.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dims, other.dims)));
        }
        Ok(())
    }

    /// Checks `0 ≤ M ≤ I` within `tol`.
    pub fn check_effect(&self, tol: f64) -> Result<()> {
        let ev = self.eigenvalues();
        if let Some(&lo) = ev.last() {
            if lo < -tol {
                return Err(Error::OutsideUnitInterval(lo));
            }
        }
        if let Some(&hi) = ev.first() {
            if hi > 1.0 + tol {
                return Err(Error::OutsideUnitInterval(hi));
            }
        }
        Ok(())
    }

    /// Checks `M² = M` within `tol`.
    pub fn check_projector(&self, tol: f64) -> Result<()> {
        match super::is_projector(&self.matrix, tol) {
            Some(dev) => Err(Error::NotProjector(dev)),
            None => Ok(()),
        }
    }
}

/// Positive semi-definite operator of trace at most one.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
    normalized: bool,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(tr > 0.0 && tr <= 1.0 + 1e-10) {
            return Err(Error::InvalidTrace(tr));
        }
        let ev = op.eigenvalues();
        let lo = ev.last().copied().unwrap_or(0.0);
        if lo < -PSD_TOL {
            return Err(Error::NotPsd(lo));
        }
        let normalized = (tr - 1.0).abs() <= 1e-10;
        Ok(Self { op, normalized })
    }

    pub fn from_matrix(dims: HilbertDims, matrix: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(dims, matrix)?)
    }

    pub fn pure(state: &PureStateVector) -> Self {
        let op = HermitianOperator::from_matrix_unchecked(state.dims.clone(), state.projector());
        Self { op, normalized: true }
    }

    pub fn maximally_mixed(dims: HilbertDims) -> Self {
        let d = dims.total();
        let op = HermitianOperator::identity(dims).scaled(1.0 / d as f64);
        Self { op, normalized: true }
    }

    pub fn diagonal(dims: HilbertDims, probs: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(dims, probs)?)
    }

    /// Unchecked construction for operators known to be valid states.
    pub(crate) fn from_trusted(op: HermitianOperator) -> Self {
        let normalized = (op.trace() - 1.0).abs() <= 1e-10;
        Self { op, normalized }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dims(&self) -> &HilbertDims {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.trace()))
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.op.eigenvalues()
    }

    pub fn eigh(&self) -> SpectralDecomposition {
        self.op.eigh()
    }

    /// `ρ / Tr ρ`.
    pub fn normalize(&self) -> Self {
        let op = self.op.scaled(1.0 / self.trace());
        Self { op, normalized: true }
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        super::trace_product(self.matrix(), self.matrix())
    }

    /// Is the spectrum diagonal in the computational basis?
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let m = self.matrix();
        (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() <= tol))
    }

    pub fn diagonal_probs(&self) -> Vec<f64> {
        self.matrix().diagonal().iter().map(|z| z.re).collect()
    }
}

/// Unit vector with subsystem metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVector {
    dims: HilbertDims,
    amplitudes: CVector,
}

impl PureStateVector {
    pub fn new(dims: HilbertDims, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(norm));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Scales a non-zero vector to unit norm.
    pub fn normalized(dims: HilbertDims, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= 0.0 {
            return Err(Error::NotUnitVector(norm));
        }
        Self::new(dims, amplitudes / c(norm))
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dims: HilbertDims, index: usize) -> Result<Self> {
        let d = dims.total();
        if index >= d {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range {d}")));
        }
        let mut v = CVector::zeros(d);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { dims, amplitudes: v })
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::pure(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit() -> HilbertDims {
        HilbertDims::single("A", 2)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(HermitianOperator::new(qubit(), m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_trace_above_one_and_negative_spectrum() {
        assert!(matches!(DensityOperator::diagonal(qubit(), &[0.6, 0.6]), Err(Error::InvalidTrace(_))));
        assert!(matches!(DensityOperator::diagonal(qubit(), &[1.1, -0.1]), Err(Error::NotPsd(_))));
    }

    #[test]
    fn substates_are_not_normalized() {
        let s = DensityOperator::diagonal(qubit(), &[0.5, 0.0]).unwrap();
        assert!(!s.is_normalized());
        assert!(s.normalize().is_normalized());
    }
}
