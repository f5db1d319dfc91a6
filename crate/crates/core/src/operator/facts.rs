use super::{psd_sqrt, re_trace, trace_norm_hermitian, trace_product, CMatrix, DensityOperator, HermitianOperator};
use crate::{Error, Result};

/// Gentle-operator inequality `‖ρ − √Λ ρ √Λ‖₁ ≤ 2√ε` with `Tr[Λρ] = 1 − ε`.
///
/// Returns `(lhs, rhs)`.
pub fn gentle_measurement_check(rho: &DensityOperator, lam: &HermitianOperator) -> Result<(f64, f64)> {
    if rho.dim() != lam.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dims(), lam.dims())));
    }
    lam.check_effect(1e-9)?;
    let eps = (1.0 - trace_product(lam.matrix(), rho.matrix())).max(0.0);
    let s = psd_sqrt(lam.matrix());
    let disturbed = &s * rho.matrix() * &s;
    let lhs = trace_norm_hermitian(&(rho.matrix() - disturbed));
    Ok((lhs, 2.0 * eps.sqrt()))
}

/// Sequential-projection bound
/// `Tr[Π_k⋯Π₁ ρ Π₁⋯Π_k] ≥ Tr ρ − 2√(Σᵢ Tr[(I − Πᵢ)ρ])`.
///
/// Returns `(lhs, rhs)`.
pub fn sequential_success(rho: &DensityOperator, projectors: &[HermitianOperator]) -> Result<(f64, f64)> {
    let d = rho.dim();
    let mut chain = CMatrix::identity(d, d);
    let mut miss = 0.0;
    for p in projectors {
        if p.dim() != d {
            return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dims(), p.dims())));
        }
        p.check_projector(1e-8)?;
        miss += (rho.trace() - trace_product(p.matrix(), rho.matrix())).max(0.0);
        chain = p.matrix() * chain;
    }
    let lhs = re_trace(&(&chain * rho.matrix() * chain.adjoint()));
    Ok((lhs, rho.trace() - 2.0 * miss.sqrt()))
}
