use super::{c, CMatrix, CVector, DensityOperator, HermitianOperator, HilbertDims, PureStateVector};
use crate::{Error, Result};

/// Kronecker product of two matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `a ⊗ b` with concatenated subsystem lists.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    let dims = a.dims().concat(b.dims())?;
    Ok(HermitianOperator::from_matrix_unchecked(dims, kron(a.matrix(), b.matrix())))
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace(op: &HermitianOperator, keep: &[&str]) -> Result<HermitianOperator> {
    let (m, dims) = partial_trace_matrix(op.matrix(), op.dims(), keep)?;
    Ok(HermitianOperator::from_matrix_unchecked(dims, m))
}

/// Matrix-level partial trace; returns the reduced matrix and its dims.
pub fn partial_trace_matrix(m: &CMatrix, dims: &HilbertDims, keep: &[&str]) -> Result<(CMatrix, HilbertDims)> {
    if m.nrows() != dims.total() {
        return Err(Error::DimensionMismatch(format!("matrix of size {} for dims {dims}", m.nrows())));
    }
    let kept = dims.restrict(keep)?;
    let (idx, dk, dt) = dims.split_indices(keep)?;
    // by_traced[t] lists (kept index, full index).
    let mut by_traced: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(dk); dt];
    for (full, &(k, t)) in idx.iter().enumerate() {
        by_traced[t].push((k, full));
    }
    let mut out = CMatrix::zeros(dk, dk);
    for group in &by_traced {
        for &(k1, i) in group {
            for &(k2, j) in group {
                out[(k1, k2)] += m[(i, j)];
            }
        }
    }
    Ok((out, kept))
}

/// Reduced matrix of `|ψ⟩⟨ψ|` on `keep`, without forming the full projector.
pub fn reduced_from_vector(psi: &CVector, dims: &HilbertDims, keep: &[&str]) -> Result<CMatrix> {
    if psi.len() != dims.total() {
        return Err(Error::DimensionMismatch(format!("vector of length {} for dims {dims}", psi.len())));
    }
    let (idx, dk, dt) = dims.split_indices(keep)?;
    let mut reshaped = CMatrix::zeros(dk, dt);
    for (full, &(k, t)) in idx.iter().enumerate() {
        reshaped[(k, t)] = psi[full];
    }
    Ok(&reshaped * reshaped.adjoint())
}

/// Dephases `label` in its computational basis.
pub fn dephase(rho: &DensityOperator, label: &str) -> Result<DensityOperator> {
    let digits = rho.dims().digit_of(label)?;
    let mut m = rho.matrix().clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if digits[i] != digits[j] {
                m[(i, j)] = c(0.0);
            }
        }
    }
    let op = HermitianOperator::from_matrix_unchecked(rho.dims().clone(), m);
    Ok(DensityOperator::from_trusted(op))
}

/// `U M U†`.
pub fn apply_unitary(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

/// Canonical purification on `A ⊗ R` with `dim R = rank ρ`.
///
/// The reference subsystem is labelled `R` (primed until the label is free).
pub fn purify(rho: &DensityOperator) -> Result<PureStateVector> {
    rho.require_normalized()?;
    let spec = rho.eigh();
    let kept: Vec<usize> = (0..spec.dim()).filter(|&i| spec.values[i] > 1e-12).collect();
    let rank = kept.len().max(1);
    let mut label = String::from("R");
    while rho.dims().position(&label).is_ok() {
        label.push('\'');
    }
    let dims = rho.dims().concat(&HilbertDims::single(&label, rank))?;
    let d = rho.dim();
    let mut v = CVector::zeros(d * rank);
    for (r, &i) in kept.iter().enumerate() {
        let w = c(spec.values[i].sqrt());
        for a in 0..d {
            v[a * rank + r] = spec.vectors[(a, i)] * w;
        }
    }
    PureStateVector::normalized(dims, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{max_abs, random_density};

    fn dims2(a: usize, b: usize) -> HilbertDims {
        HilbertDims::new([("A", a), ("B", b)]).unwrap()
    }

    #[test]
    fn kron_of_diagonals() {
        let a = HermitianOperator::from_real_diagonal(HilbertDims::single("A", 2), &[1.0, 0.0]).unwrap();
        let b = HermitianOperator::from_real_diagonal(HilbertDims::single("B", 2), &[0.0, 1.0]).unwrap();
        let t = tensor(&a, &b).unwrap();
        let want = [0.0, 1.0, 0.0, 0.0];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(t.matrix()[(i, i)].re, *w);
        }
        assert_eq!(t.dims(), &dims2(2, 2));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]);
        let r = reduced_from_vector(&v, &dims2(2, 2), &["A"]).unwrap();
        assert!(max_abs(&(r - CMatrix::identity(2, 2) * c(0.5))) < 1e-15);
    }

    #[test]
    fn product_factorizes() {
        let a = random_density(3, 3, 1).unwrap().into_op().with_dims(HilbertDims::single("A", 3)).unwrap();
        let b = random_density(2, 2, 2).unwrap().into_op().with_dims(HilbertDims::single("B", 2)).unwrap();
        let ab = tensor(&a, &b).unwrap();
        let ra = partial_trace(&ab, &["A"]).unwrap();
        let rb = partial_trace(&ab, &["B"]).unwrap();
        assert!(max_abs(&(ra.matrix() - a.matrix())) < 1e-12);
        assert!(max_abs(&(rb.matrix() - b.matrix())) < 1e-12);
    }

    #[test]
    fn dephase_plus_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureStateVector::new(HilbertDims::single("A", 2), CVector::from_vec(vec![c(s), c(s)])).unwrap();
        let out = dephase(&plus.density(), "A").unwrap();
        assert!(max_abs(&(out.matrix() - CMatrix::identity(2, 2) * c(0.5))) < 1e-15);
    }

    #[test]
    fn purify_round_trip_rank3() {
        let rho = random_density(4, 3, 11).unwrap();
        let psi = purify(&rho).unwrap();
        assert_eq!(psi.dims().dim_of("R").unwrap(), 3);
        let back = reduced_from_vector(psi.amplitudes(), psi.dims(), &["A"]).unwrap();
        assert!(max_abs(&(back - rho.matrix())) < 1e-10);
    }
}
