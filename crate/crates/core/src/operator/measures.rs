use super::{eigh_raw, psd_sqrt, spectral::noise_floor, CMatrix, DensityOperator};
use crate::{Error, Result};

/// Schatten 1-norm of an arbitrary square matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    // Singular values from the Hermitian eigensolver, which stays accurate
    // on rank-deficient input.
    let values = eigh_raw(&(m.adjoint() * m)).0;
    let floor = noise_floor(values.len(), values.first().copied().unwrap_or(0.0));
    values.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum()
}

/// Schatten 1-norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigh_raw(m).0.iter().map(|x| x.abs()).sum()
}

/// `‖a − b‖₁`, unhalved.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dims(), b.dims())));
    }
    Ok(trace_norm_hermitian(&(a.matrix() - b.matrix())))
}

/// `‖√a √b‖₁ + √((1 − Tr a)(1 − Tr b))`.
pub fn generalized_fidelity(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dims(), b.dims())));
    }
    let overlap = trace_norm(&(psd_sqrt(a.matrix()) * psd_sqrt(b.matrix())));
    let defect = ((1.0 - a.trace()).max(0.0) * (1.0 - b.trace()).max(0.0)).sqrt();
    Ok(overlap + defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HilbertDims;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::diagonal(HilbertDims::single("A", p.len()), p).unwrap()
    }

    #[test]
    fn orthogonal_and_identical() {
        assert!((trace_distance(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!(trace_distance(&diag(&[0.3, 0.7]), &diag(&[0.3, 0.7])).unwrap().abs() < 1e-12);
        assert!(generalized_fidelity(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap().abs() < 1e-7);
    }

    #[test]
    fn sum_of_eigenvalue_differences() {
        let d = trace_distance(&diag(&[0.5, 0.5]), &diag(&[0.75, 0.25])).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn substate_fidelity_closed_form() {
        let f = generalized_fidelity(&diag(&[0.5, 0.0]), &diag(&[0.5, 0.0])).unwrap();
        assert!((f - 1.0).abs() < 1e-7);
    }
}
