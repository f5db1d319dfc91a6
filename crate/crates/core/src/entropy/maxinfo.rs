use super::cq::CqState;
use super::hypothesis::bipartite_marginals;
use crate::operator::{
    c, eigh_raw, hermitian_function, hermitian_part, kron, re_trace, CMatrix, DensityOperator, HermitianOperator,
};
use crate::{Error, Result};

/// Relative eigenvalue cut-off defining the support of `σ`.
const SUPPORT_TOL: f64 = 1e-12;
/// Mass of `ρ` allowed outside `supp σ` before `D_max` is infinite.
const LEAK_TOL: f64 = 1e-10;

/// `D_max(ρ‖σ) = log₂ ‖σ^{-1/2} ρ σ^{-1/2}‖_∞`, or `+∞` when
/// `supp ρ ⊄ supp σ`.
pub fn d_max(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dims(), sigma.dims())));
    }
    Ok(d_max_matrix(rho.matrix(), sigma.matrix()))
}

pub(crate) fn d_max_matrix(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let n = rho.nrows();
    let is_diag = |m: &CMatrix| (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() == 0.0));
    if is_diag(rho) && is_diag(sigma) {
        let top = (0..n).map(|i| sigma[(i, i)].re).fold(0.0f64, f64::max);
        let mut best = 0.0f64;
        for i in 0..n {
            let (r, s) = (rho[(i, i)].re, sigma[(i, i)].re);
            if s <= SUPPORT_TOL * top {
                if r > LEAK_TOL {
                    return f64::INFINITY;
                }
                continue;
            }
            best = best.max(r / s);
        }
        return best.log2();
    }
    let (vals, vecs) = eigh_raw(sigma);
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let support: Vec<usize> = (0..n).filter(|&j| vals[j] > SUPPORT_TOL * top).collect();
    let inside: f64 = support
        .iter()
        .map(|&j| {
            let v = vecs.column(j);
            (v.adjoint() * rho * v)[(0, 0)].re
        })
        .sum();
    if re_trace(rho) - inside > LEAK_TOL {
        return f64::INFINITY;
    }
    // σ^{-1/2} restricted to the support.
    let mut w = CMatrix::zeros(n, support.len());
    for (k, &j) in support.iter().enumerate() {
        w.set_column(k, &(vecs.column(j) * c(1.0 / vals[j].sqrt())));
    }
    let inner = hermitian_part(&(w.adjoint() * rho * &w));
    let top_eig = eigh_raw(&inner).0.first().copied().unwrap_or(0.0);
    top_eig.max(f64::MIN_POSITIVE).log2()
}

/// `I_max(A:B) = D_max(ρ^{AB} ‖ ρ^A ⊗ ρ^B)` with `A` the first subsystem.
pub fn i_max(rho_ab: &DensityOperator) -> Result<f64> {
    let (a, b) = bipartite_marginals(rho_ab)?;
    let prod = kron(a.matrix(), b.matrix());
    Ok(d_max_matrix(rho_ab.matrix(), &prod).max(0.0))
}

/// Result of the modified max-information solver.
#[derive(Clone, Debug)]
pub struct ModifiedMaxInfo {
    /// Certified value `max_x D_max(ρ_x‖σ*)`.
    pub value: f64,
    /// The optimizing state.
    pub sigma: DensityOperator,
    /// Dual lower bound `log₂ Σ_x Tr[Y_x ρ_x]`.
    pub lower_bound: f64,
    pub iterations: usize,
}

pub const MAX_ITERATIONS: usize = 10_000;
const TARGET_GAP: f64 = 1e-9;
const ACCEPT_GAP: f64 = 1e-4;

/// `min_σ max_x D_max(ρ_x‖σ)` over labels of positive probability.
///
/// The value equals `log₂ min{Tr ω : ω ≥ ρ_x ∀x}`, whose dual is
/// `log₂ max_Y Σ_x Tr[Y_x ρ_x]` over POVMs `Y`. A multiplicative fixed-point
/// iteration on `Y` drives both sides together: each step yields a primal
/// candidate `ω = Σ_x ρ_x Y_x` (certified by recomputing `D_max` exactly) and
/// a dual value. Iteration stops once the two agree within `1e-9` bits.
pub fn i_max_mod_cq(cq: &CqState) -> Result<(f64, DensityOperator)> {
    let r = i_max_mod_cq_full(cq)?;
    Ok((r.value, r.sigma))
}

pub fn i_max_mod_cq_full(cq: &CqState) -> Result<ModifiedMaxInfo> {
    cq.require_normalized()?;
    let states: Vec<&CMatrix> =
        (0..cq.len()).filter(|&x| cq.prob(x) > 0.0).map(|x| cq.conditional(x).matrix()).collect();
    let d = cq.quantum_dim();
    let dims = cq.quantum_dims().clone();
    let k = states.len();
    let mut y: Vec<CMatrix> = vec![CMatrix::identity(d, d) * c(1.0 / k as f64); k];

    let mut best_upper = f64::INFINITY;
    let mut best_sigma = None;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // Dual value of the current POVM.
        let guess: f64 = states.iter().zip(&y).map(|(r, yx)| crate::operator::trace_product(yx, r)).sum();
        lower = lower.max(guess.log2());

        // Primal candidate from the Lagrange operator Σ ρ_x Y_x.
        let mut omega = CMatrix::zeros(d, d);
        for (r, yx) in states.iter().zip(&y) {
            omega += *r * yx;
        }
        let omega = hermitian_function(&omega, |v| v.max(0.0));
        let tr = re_trace(&omega);
        if tr > 0.0 {
            let sigma = omega * c(1.0 / tr);
            let upper = states.iter().map(|r| d_max_matrix(r, &sigma)).fold(f64::NEG_INFINITY, f64::max);
            if upper < best_upper {
                best_upper = upper;
                best_sigma = Some(sigma);
            }
        }
        if best_upper - lower <= TARGET_GAP {
            break;
        }

        // Y_x ← G⁺ ρ_x Y_x ρ_x G⁺ with G = (Σ_x ρ_x Y_x ρ_x)^{1/2}.
        let mut s = CMatrix::zeros(d, d);
        let products: Vec<CMatrix> = states.iter().zip(&y).map(|(r, yx)| *r * yx * *r).collect();
        for p in &products {
            s += p;
        }
        let (vals, _) = eigh_raw(&s);
        let cut = vals.first().copied().unwrap_or(0.0).max(0.0) * 1e-14;
        let g_inv = hermitian_function(&s, |v| if v > cut { 1.0 / v.sqrt() } else { 0.0 });
        let kernel = hermitian_function(&s, |v| if v > cut { 0.0 } else { 1.0 });
        for (x, p) in products.iter().enumerate() {
            y[x] = hermitian_part(&(&g_inv * p * &g_inv));
        }
        y[0] += kernel;
    }

    let gap = best_upper - lower;
    if !(gap <= ACCEPT_GAP) {
        return Err(Error::NonConvergence { iterations, residual: gap });
    }
    let sigma = best_sigma.expect("finite upper bound implies a candidate");
    Ok(ModifiedMaxInfo {
        value: best_upper.max(0.0),
        sigma: DensityOperator::from_trusted(HermitianOperator::from_matrix_unchecked(dims, sigma)),
        lower_bound: lower,
        iterations,
    })
}

/// Exact value for commuting conditionals: `log₂ Σ_b max_x ρ_x(b)`.
pub fn i_max_mod_commuting(cq: &CqState) -> f64 {
    let d = cq.quantum_dim();
    let s: f64 = (0..d)
        .map(|b| {
            (0..cq.len())
                .filter(|&x| cq.prob(x) > 0.0)
                .map(|x| cq.conditional(x).matrix()[(b, b)].re)
                .fold(0.0, f64::max)
        })
        .sum();
    s.log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HilbertDims;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::diagonal(HilbertDims::single("B", p.len()), p).unwrap()
    }

    #[test]
    fn d_max_examples() {
        let rho = diag(&[0.3, 0.7]);
        assert!(d_max(&rho, &rho).unwrap().abs() < 1e-12);
        assert!((d_max(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(d_max(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn i_max_examples() {
        let dims = HilbertDims::new([("A", 2), ("B", 2)]).unwrap();
        let corr = DensityOperator::diagonal(dims.clone(), &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((i_max(&corr).unwrap() - 1.0).abs() < 1e-12);
        let prod = DensityOperator::diagonal(dims.clone(), &[0.25; 4]).unwrap();
        assert!(i_max(&prod).unwrap().abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = crate::operator::PureStateVector::new(
            dims,
            crate::operator::CVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]),
        )
        .unwrap();
        assert!((i_max(&bell.density()).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn modified_single_and_orthogonal() {
        let single = CqState::new(vec![1.0], vec![diag(&[0.6, 0.4])]).unwrap();
        let (v, s) = i_max_mod_cq(&single).unwrap();
        assert!(v.abs() < 1e-8);
        assert!((s.matrix()[(0, 0)].re - 0.6).abs() < 1e-8);

        let orth = CqState::new(vec![0.5, 0.5], vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).unwrap();
        let (v, s) = i_max_mod_cq(&orth).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
        assert!((s.matrix()[(0, 0)].re - 0.5).abs() < 1e-8);
    }
}
