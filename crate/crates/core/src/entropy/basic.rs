use crate::operator::{eigh_raw, CMatrix, DensityOperator};
use crate::{Error, Result};

/// Eigenvalues below this are treated as zero when taking logarithms.
pub(crate) const ZERO_EIG: f64 = 1e-14;

/// Shannon entropy in bits. The vector must sum to one.
pub fn shannon(p: &[f64]) -> Result<f64> {
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(total));
    }
    if let Some(&neg) = p.iter().find(|&&x| x < -1e-12) {
        return Err(Error::InvalidParameter(format!("negative probability {neg}")));
    }
    Ok(shannon_unchecked(p))
}

pub(crate) fn shannon_unchecked(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > ZERO_EIG).map(|&x| -x * x.log2()).sum::<f64>().max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann(rho: &DensityOperator) -> Result<f64> {
    rho.require_normalized()?;
    Ok(shannon_unchecked(&rho.eigenvalues()))
}

/// `2 log₂ Tr √ρ`, the Rényi-½ entropy of the spectrum.
pub fn h_max(rho: &DensityOperator) -> f64 {
    h_max_of_values(&rho.eigenvalues())
}

pub(crate) fn h_max_of_values(values: &[f64]) -> f64 {
    let s: f64 = values.iter().filter(|&&x| x > 0.0).map(|x| x.sqrt()).sum();
    2.0 * s.log2()
}

/// Umegaki relative entropy `D(ρ‖σ)` in bits, `+∞` on support violation.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dims(), sigma.dims())));
    }
    Ok(relative_entropy_matrix(rho.matrix(), sigma.matrix()))
}

pub(crate) fn relative_entropy_matrix(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let (rv, rvec) = eigh_raw(rho);
    let (sv, svec) = eigh_raw(sigma);
    // Tr ρ log ρ
    let self_term: f64 = rv.iter().filter(|&&x| x > ZERO_EIG).map(|&x| x * x.log2()).sum();
    // Tr ρ log σ = Σ_ij λ_i |⟨r_i|s_j⟩|² log μ_j
    let overlap = rvec.adjoint() * &svec;
    let mut cross = 0.0;
    for (i, &li) in rv.iter().enumerate() {
        if li <= ZERO_EIG {
            continue;
        }
        for (j, &mj) in sv.iter().enumerate() {
            let w = li * overlap[(i, j)].norm_sqr();
            if w <= 1e-13 {
                continue;
            }
            if mj <= ZERO_EIG {
                return f64::INFINITY;
            }
            cross += w * mj.log2();
        }
    }
    (self_term - cross).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HilbertDims;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::diagonal(HilbertDims::single("A", p.len()), p).unwrap()
    }

    #[test]
    fn binary_entropy_value() {
        let h = von_neumann(&diag(&[0.9, 0.1])).unwrap();
        let oracle = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        assert!((h - oracle).abs() < 1e-12);
        assert!((h - 0.468_995_593_589_281).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_entropies() {
        assert!((von_neumann(&diag(&[0.25; 4])).unwrap() - 2.0).abs() < 1e-12);
        assert!((h_max(&diag(&[0.5, 0.5])) - 1.0).abs() < 1e-12);
        assert!(h_max(&diag(&[1.0, 0.0])).abs() < 1e-12);
    }

    #[test]
    fn h_max_four_level() {
        let p = [0.5, 0.3, 0.15, 0.05];
        let oracle = 2.0 * p.iter().map(|x: &f64| x.sqrt()).sum::<f64>().log2();
        assert!((h_max(&diag(&p)) - oracle).abs() < 1e-12);
        assert!((oracle - 1.799_487_356_581_188).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_support() {
        assert_eq!(relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap(), f64::INFINITY);
        assert!((relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-12);
    }
}
