//! Single-party purity concentration.
//!
//! Given `ρ^A` and ε, the retained eigenspace of the ε-truncated spectrum has
//! dimension `r = 2^{H̃_max^ε(A)}`. Borrowing an ancilla `C` of dimension `r`
//! makes `A ⊗ C` factorize as `A_g ⊗ A_p` with `dim A_g = r` and
//! `dim A_p = d_A`; a unitary then rotates the retained subspace onto
//! `A_g ⊗ |0⟩`.

use serde::Serialize;

use crate::entropy::{check_eps, truncate_eigen};
use crate::operator::{c, eigh_matrix, trace_norm_hermitian, CMatrix, DensityOperator, HermitianOperator};
use crate::{Error, Result};

/// Outcome of [`run_concentration`].
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    /// `log₂ d_{A_p} − log₂ d_C`.
    pub rate_bits: f64,
    /// `log₂ d_C`, the borrowed ancilla.
    pub ancilla_bits: f64,
    /// `log₂ d_{A_p}`, pure qubits produced before discounting the ancilla.
    pub gross_bits: f64,
    /// `‖Tr_{A_g}[U(ρ ⊗ |0⟩⟨0|^C)U†] − |0⟩⟨0|^{A_p}‖₁`.
    pub achieved_distance: f64,
    /// `3√ε`.
    pub distance_bound: f64,
    pub eps_used: f64,
    /// `(dim A_g, dim A_p)`.
    pub split: (usize, usize),
    #[serde(skip)]
    pub map: ConcentrationMap,
}

impl ConcentrationReport {
    /// The full unitary on `A ⊗ C` (see [`ConcentrationMap::unitary`]).
    pub fn unitary(&self) -> CMatrix {
        self.map.unitary()
    }
}

/// Position of the `i`-th basis vector (retained ones first) inside
/// `A_g ⊗ A_p` for retained rank `r` and `dim A_p = d2`: retained `i < r`
/// go to `(g = i, p = 0)`; the `j`-th remaining vector goes to
/// `(g = j mod r, p = 1 + j div r)`.
pub fn relabel_index(i: usize, r: usize, d2: usize) -> (usize, usize) {
    debug_assert!(r > 0 && i < r * d2);
    if i < r {
        (i, 0)
    } else {
        let j = i - r;
        (j % r, 1 + j / r)
    }
}

/// How the concentration unitary acts on the `C = 0` slice of `A ⊗ C`.
///
/// `basis` is an orthonormal basis of `A` whose first `rank` columns span the
/// retained subspace; column `i` is sent to the standard basis vector
/// `relabel_index(i, rank, d_A)` of `A_g ⊗ A_p`.
#[derive(Clone, Debug)]
pub struct ConcentrationMap {
    pub basis: CMatrix,
    pub rank: usize,
}

impl ConcentrationMap {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `(g, p)` slot of basis vector `i`.
    pub fn target(&self, i: usize) -> (usize, usize) {
        relabel_index(i, self.rank, self.dim())
    }

    /// Isometry `A → A_g ⊗ A_p`, i.e. the unitary restricted to `C = 0`.
    pub fn isometry(&self) -> CMatrix {
        let d = self.dim();
        let mut v = CMatrix::zeros(self.rank * d, d);
        for i in 0..d {
            let (g, p) = self.target(i);
            let row = g * d + p;
            for k in 0..d {
                v[(row, k)] = self.basis[(k, i)].conj();
            }
        }
        v
    }

    /// Full unitary from `A ⊗ C` to `A_g ⊗ A_p`. The `C = 0` inputs follow
    /// [`Self::isometry`]; the other inputs fill the unused output slots in
    /// increasing order.
    pub fn unitary(&self) -> CMatrix {
        let d = self.dim();
        let r = self.rank;
        let n = d * r;
        let iso = self.isometry();
        let mut used = vec![false; n];
        for i in 0..d {
            let (g, p) = self.target(i);
            used[g * d + p] = true;
        }
        let mut free = (0..n).filter(|&k| !used[k]);
        let mut u = CMatrix::zeros(n, n);
        for a in 0..d {
            for cc in 0..r {
                let col = a * r + cc;
                if cc == 0 {
                    u.set_column(col, &iso.column(a));
                } else {
                    let slot = free.next().expect("slot count matches");
                    u[(slot, col)] = c(1.0);
                }
            }
        }
        u
    }

    /// `Tr_{A_g}` of the image of `ω` (an operator on `E ⊗ A` for an
    /// untouched register `E` of dimension `outer`), as an operator on
    /// `E ⊗ A_p`.
    pub fn reduce_to_pure_part(&self, omega: &CMatrix, outer: usize) -> CMatrix {
        let d = self.dim();
        let mut rot = CMatrix::zeros(outer * d, outer * d);
        for e in 0..outer {
            rot.view_mut((e * d, e * d), (d, d)).copy_from(&self.basis);
        }
        let w = rot.adjoint() * omega * &rot;
        let targets: Vec<(usize, usize)> = (0..d).map(|i| self.target(i)).collect();
        let mut by_g: Vec<Vec<usize>> = vec![Vec::new(); self.rank];
        for (i, &(g, _)) in targets.iter().enumerate() {
            by_g[g].push(i);
        }
        let mut out = CMatrix::zeros(outer * d, outer * d);
        for members in &by_g {
            for &i in members {
                for &j in members {
                    let (pi, pj) = (targets[i].1, targets[j].1);
                    for e in 0..outer {
                        for f in 0..outer {
                            out[(e * d + pi, f * d + pj)] += w[(e * d + i, f * d + j)];
                        }
                    }
                }
            }
        }
        out
    }
}

/// Projector onto the retained eigenspace of the ε-truncated spectrum.
pub fn build_projector(rho: &DensityOperator, eps: f64) -> Result<HermitianOperator> {
    let (spec, kept) = retained_spectrum(rho, eps)?;
    let d = rho.dim();
    let mut p = CMatrix::zeros(d, d);
    for i in (0..d).filter(|&i| kept[i]) {
        let v = spec.vectors.column(i);
        p += v * v.adjoint();
    }
    Ok(HermitianOperator::from_matrix_unchecked(rho.dims().clone(), p))
}

fn retained_spectrum(rho: &DensityOperator, eps: f64) -> Result<(crate::operator::SpectralDecomposition, Vec<bool>)> {
    rho.require_normalized()?;
    check_eps(eps)?;
    let spec = rho.eigh();
    let t = truncate_eigen(&spec.values, eps);
    let kept = (0..rho.dim()).map(|i| t.kept[i] && spec.values[i] > 0.0).collect();
    Ok((spec, kept))
}

/// Concentration map for `ρ` at smoothing `ε`: retained eigenvectors first
/// (canonical order), then the discarded ones.
pub fn concentration_map(rho: &DensityOperator, eps: f64) -> Result<ConcentrationMap> {
    let (spec, kept) = retained_spectrum(rho, eps)?;
    let d = rho.dim();
    let order: Vec<usize> = (0..d).filter(|&i| kept[i]).chain((0..d).filter(|&i| !kept[i])).collect();
    let mut basis = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &spec.vectors.column(src));
    }
    let rank = kept.iter().filter(|k| **k).count();
    Ok(ConcentrationMap { basis, rank })
}

/// Unitary mapping `supp Π` into `A_g ⊗ |0⟩^{A_p}`.
///
/// The retained basis diagonalizes `ΠρΠ` on `supp Π` (canonical order); the
/// complement basis comes from the canonical decomposition of `I − Π`. Basis
/// vectors are sent to `A_g ⊗ A_p` positions by [`relabel_index`].
pub fn concentration_unitary(rho: &DensityOperator, projector: &HermitianOperator, split: (usize, usize)) -> Result<CMatrix> {
    let d = rho.dim();
    let (d1, d2) = split;
    if projector.dim() != d || d1 * d2 != d {
        return Err(Error::DimensionMismatch(format!("split {d1}x{d2} for total dimension {d}")));
    }
    projector.check_projector(1e-8)?;
    let rank = projector.trace().round() as usize;
    if rank != d1 {
        return Err(Error::DimensionMismatch(format!("projector rank {rank} but dim A_g = {d1}")));
    }
    let basis = ordered_basis(rho.matrix(), projector.matrix(), rank);
    let mut u = CMatrix::zeros(d, d);
    for i in 0..d {
        let (g, p) = relabel_index(i, d1, d2);
        let row = g * d2 + p;
        for k in 0..d {
            u[(row, k)] = basis[(k, i)].conj();
        }
    }
    Ok(u)
}

/// Columns: orthonormal basis of `supp Π` diagonalizing `ΠρΠ`, followed by
/// the canonical basis of `ker Π`.
fn ordered_basis(rho: &CMatrix, projector: &CMatrix, rank: usize) -> CMatrix {
    let d = rho.nrows();
    let pspec = eigh_matrix(projector);
    let w = pspec.vectors.columns(0, rank).into_owned();
    let compressed = w.adjoint() * rho * &w;
    let inner = eigh_matrix(&compressed);
    let retained = &w * &inner.vectors;
    let mut basis = CMatrix::zeros(d, d);
    basis.columns_mut(0, rank).copy_from(&retained);
    basis.columns_mut(rank, d - rank).copy_from(&pspec.vectors.columns(rank, d - rank));
    basis
}

/// Distance of an operator on `A_p` from `|0⟩⟨0|`.
pub(crate) fn distance_to_vacuum(m: &CMatrix) -> f64 {
    let mut target = m.clone();
    target[(0, 0)] -= c(1.0);
    trace_norm_hermitian(&target)
}

/// Concentrates `ρ^A` with a borrowed ancilla of dimension `r = rank Π`.
pub fn run_concentration(rho: &DensityOperator, eps: f64) -> Result<ConcentrationReport> {
    let map = concentration_map(rho, eps)?;
    let r = map.rank;
    let da = rho.dim();
    let ap = map.reduce_to_pure_part(rho.matrix(), 1);
    let achieved_distance = distance_to_vacuum(&ap);
    let ancilla_bits = (r as f64).log2();
    let gross_bits = (da as f64).log2();
    Ok(ConcentrationReport {
        rate_bits: gross_bits - ancilla_bits,
        ancilla_bits,
        gross_bits,
        achieved_distance,
        distance_bound: 3.0 * eps.sqrt(),
        eps_used: eps,
        split: (r, da),
        map,
    })
}
