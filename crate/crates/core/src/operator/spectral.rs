use std::ops::Range;

use nalgebra::SymmetricEigen;

use super::{c, hermitian_part, CMatrix, CVector, HermitianOperator};

/// Eigenvalues closer than this are treated as one degenerate group.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Eigen-decomposition with a reproducible basis.
///
/// Eigenvalues are sorted in descending order. Inside a degenerate group the
/// basis is rebuilt from the group projector by pivoted Gram–Schmidt over the
/// computational basis, so the result depends only on the projector and not
/// on the internal rotation chosen by the eigen-solver.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Eigenvalues (Rayleigh quotients of the returned vectors).
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column.
    pub vectors: CMatrix,
    /// Index ranges of degenerate groups, in order.
    pub groups: Vec<Range<usize>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// `Σ f(λᵢ) |vᵢ⟩⟨vᵢ|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = c(f(lam));
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }

    /// Distinct eigenvalues with their multiplicities.
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        self.groups
            .iter()
            .map(|g| {
                let mean = self.values[g.clone()].iter().sum::<f64>() / g.len() as f64;
                (mean, g.len())
            })
            .collect()
    }
}

/// Raw eigen-decomposition of a Hermitian matrix, eigenvalues descending.
///
/// The basis inside degenerate eigenspaces is whatever the solver returns;
/// use it only for spectral functions that do not depend on that choice.
pub fn eigh_raw(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// `f(M)` for Hermitian `M`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = eigh_raw(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let w = c(f(lam));
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    let out = &scaled * vectors.adjoint();
    hermitian_part(&out)
}

/// Eigenvalues at or below this level are indistinguishable from rounding
/// noise of the eigensolver on an `n × n` matrix with spectral radius `top`.
pub(crate) fn noise_floor(n: usize, top: f64) -> f64 {
    n as f64 * f64::EPSILON * top
}

/// Square root of the positive part of a Hermitian matrix. Eigenvalues at
/// the solver's noise floor are treated as zero, so a rank-deficient input
/// does not pick up `√(1e-16)`-sized spurious components.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = eigh_raw(m);
    let top = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let floor = noise_floor(values.len(), top);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let w = c(if lam > floor { lam.sqrt() } else { 0.0 });
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    hermitian_part(&(&scaled * vectors.adjoint()))
}

/// Largest entry of `P² − P` and `P − P†`, or `None` when within `tol`.
pub fn is_projector(m: &CMatrix, tol: f64) -> Option<f64> {
    let sq = m * m;
    let dev = super::max_abs(&(&sq - m)).max(super::max_abs(&(m - m.adjoint())));
    if dev > tol {
        Some(dev)
    } else {
        None
    }
}

/// Canonical decomposition of a Hermitian operator.
pub fn eigh(op: &HermitianOperator) -> SpectralDecomposition {
    eigh_matrix(op.matrix())
}

/// Canonical decomposition of a Hermitian matrix (assumed Hermitian).
pub fn eigh_matrix(m: &CMatrix) -> SpectralDecomposition {
    let n = m.nrows();
    let (raw_values, raw_vectors) = eigh_raw(m);
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || raw_values[i - 1] - raw_values[i] >= DEGENERACY_GAP {
            groups.push(start..i);
            start = i;
        }
    }

    let mut vectors = CMatrix::zeros(n, n);
    for g in &groups {
        let block = raw_vectors.columns(g.start, g.len()).into_owned();
        let basis = pivoted_basis(&block);
        for (k, col) in basis.into_iter().enumerate() {
            vectors.set_column(g.start + k, &col);
        }
    }

    let values = (0..n)
        .map(|j| {
            let v = vectors.column(j);
            (v.adjoint() * m * v)[(0, 0)].re
        })
        .collect();
    SpectralDecomposition { values, vectors, groups }
}

/// Orthonormal basis of the span of `block`'s columns, built by pivoted
/// Gram–Schmidt on the projected computational basis vectors.
fn pivoted_basis(block: &CMatrix) -> Vec<CVector> {
    let n = block.nrows();
    let g = block.ncols();
    // Columns of the projector: P e_j.
    let mut residual = block * block.adjoint();
    let mut chosen = Vec::with_capacity(g);
    let mut used = vec![false; n];
    for _ in 0..g {
        let mut best = None;
        let mut best_norm = 0.0f64;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let norm = residual.column(j).norm();
            if norm > best_norm * (1.0 + 1e-9) + 1e-14 {
                best = Some(j);
                best_norm = norm;
            }
        }
        let Some(j) = best else { break };
        used[j] = true;
        let q: CVector = residual.column(j) / c(best_norm);
        let overlaps = q.adjoint() * &residual;
        residual -= &q * overlaps;
        chosen.push(q);
    }
    if chosen.len() < g {
        // Numerically degenerate projector; fall back to the solver's basis.
        return (0..g).map(|k| block.column(k).into_owned()).collect();
    }
    chosen
}

/// Orthonormal vectors spanning the same space as `vectors`, by modified
/// Gram–Schmidt applied twice. Vectors whose residual falls below `tol` are
/// dropped.
pub(crate) fn orthonormalize(vectors: &[CVector], tol: f64) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let overlap = q.dotc(&w);
                w -= q * overlap;
            }
        }
        let norm = w.norm();
        if norm > tol {
            out.push(w / c(norm));
        }
    }
    out
}

/// Extends orthonormal `basis` (vectors of length `n`) to a full orthonormal
/// basis, choosing at each step the computational basis vector with the
/// largest residual.
pub(crate) fn complete_basis(basis: &[CVector], n: usize) -> Vec<CVector> {
    let mut out = basis.to_vec();
    while out.len() < n {
        let mut best: Option<(f64, CVector)> = None;
        for j in 0..n {
            let mut e = CVector::zeros(n);
            e[j] = c(1.0);
            let mut w = e;
            for _ in 0..2 {
                for q in &out {
                    let overlap = q.dotc(&w);
                    w -= q * overlap;
                }
            }
            let norm = w.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b * (1.0 + 1e-9)) {
                best = Some((norm, w / c(norm)));
            }
        }
        out.push(best.expect("n > 0").1);
    }
    out
}

/// Unitary `U` with `q = U √(q†q)` for a square matrix `q`.
///
/// Built from the eigenvectors of `q†q`: on its support `U v = q v / ‖q v‖`,
/// and the kernel is mapped onto the orthogonal complement of the image.
pub fn left_polar(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let (values, vectors) = eigh_raw(&(q.adjoint() * q));
    let top = values.first().copied().unwrap_or(0.0).max(1.0);
    let support: Vec<usize> = (0..n).filter(|&i| values[i] > 1e-14 * top).collect();
    let images: Vec<CVector> = support.iter().map(|&i| q * vectors.column(i) / c(values[i].sqrt())).collect();
    let image_basis = orthonormalize(&images, 1e-8);
    let full = complete_basis(&image_basis, n);
    let mut targets = full.into_iter();
    let mut u = CMatrix::zeros(n, n);
    let order: Vec<usize> =
        support.iter().copied().chain((0..n).filter(|i| !support.contains(i))).collect();
    for i in order {
        let t = targets.next().expect("complete basis");
        u += t * vectors.column(i).adjoint();
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{max_abs, random};

    #[test]
    fn identity_is_one_group() {
        let d = eigh_matrix(&CMatrix::identity(2, 2));
        assert_eq!(d.multiplicities().len(), 1);
        assert_eq!(d.groups[0].len(), 2);
        assert!((d.vectors.clone() - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn pauli_x_values() {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let d = eigh_matrix(&x);
        assert!((d.values[0] - 1.0).abs() < 1e-12);
        assert!((d.values[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_on_random_matrices() {
        for seed in 0..20 {
            let u = random::haar_unitary(5, seed);
            let m = hermitian_part(&(u.clone() + u.adjoint() * c(0.3)));
            let d = eigh_matrix(&m);
            assert!(max_abs(&(d.reconstruct() - &m)) < 1e-9);
            for w in d.values.windows(2) {
                assert!(w[0] >= w[1] - DEGENERACY_GAP);
            }
        }
    }

    #[test]
    fn degenerate_basis_is_rotation_invariant() {
        // Same projector, two different internal bases.
        let p = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(1.0), c(0.0)]));
        let u = random::haar_unitary(3, 7);
        let m = &u * &p * u.adjoint();
        let a = eigh_matrix(&m);
        let b = eigh_matrix(&hermitian_part(&m.clone()));
        assert_eq!(a.vectors, b.vectors);
        assert!(max_abs(&(a.reconstruct() - &m)) < 1e-12);
    }
}
