//! Alice's local stages: coherent measurement, controlled relabeling and
//! pruning of the classical register.

use crate::concentration::relabel_index;
use crate::entropy::truncate_values;
use crate::operator::{c, CMatrix, CVector, HilbertDims, PureStateVector, RankOnePovm, C64};
use crate::{Error, Result};

/// Applies the isometry `V = Σ_x |x⟩^X ⊗ √Λ_x^A` to `phi`.
///
/// The output lives on `X ⊗ (dims of phi)`; the classical register is
/// labelled `X` (primed until the label is free).
pub fn coherent_measure(phi: &PureStateVector, povm: &RankOnePovm, a_label: &str) -> Result<PureStateVector> {
    let dims = phi.dims();
    let da = dims.dim_of(a_label)?;
    if povm.dims().total() != da {
        return Err(Error::DimensionMismatch(format!(
            "POVM on dimension {} applied to `{a_label}` of dimension {da}",
            povm.dims().total()
        )));
    }
    let (split, _, _) = dims.split_indices(&[a_label])?;
    let total = dims.total();
    let amps = phi.amplitudes();
    let mut out = CVector::zeros(povm.len() * total);
    for (x, (w, psi)) in povm.elements().enumerate() {
        // ⟨ψ_x|_A φ, indexed by the rest of the system.
        let mut overlap = vec![C64::new(0.0, 0.0); total / da];
        for (full, &(a, rest)) in split.iter().enumerate() {
            overlap[rest] += psi[a].conj() * amps[full];
        }
        let sw = c(w.sqrt());
        for (full, &(a, rest)) in split.iter().enumerate() {
            out[x * total + full] = sw * psi[a] * overlap[rest];
        }
    }
    let mut label = String::from("X");
    while dims.position(&label).is_ok() {
        label.push('\'');
    }
    let out_dims = HilbertDims::single(&label, povm.len()).concat(dims)?;
    let norm = out.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::PovmIncomplete((norm - 1.0).abs()));
    }
    PureStateVector::new(out_dims, out)
}

/// Unitary with `U|ψ⟩ = |0⟩` for a unit vector `ψ`: a Householder reflection
/// followed by a global phase.
pub fn householder_to_zero(psi: &CVector) -> CMatrix {
    let d = psi.len();
    let phase = if psi[0].norm() > 0.0 { psi[0] / c(psi[0].norm()) } else { c(1.0) };
    let mut w = psi.clone();
    w[0] -= phase;
    let wn2 = w.norm_squared();
    let id = CMatrix::identity(d, d);
    if wn2 < 1e-28 {
        return id * phase.conj();
    }
    (id - &w * w.adjoint() * c(2.0 / wn2)) * phase.conj()
}

/// `Σ_x |x⟩⟨x|^X ⊗ U_x` with `U_x|ψ_x⟩ = |0⟩`; zero-weight outcomes get the
/// identity block.
pub fn relabel_unitary(povm: &RankOnePovm) -> CMatrix {
    let da = povm.dims().total();
    let k = povm.len();
    let mut u = CMatrix::zeros(k * da, k * da);
    for (x, (w, psi)) in povm.elements().enumerate() {
        let block = if w > 0.0 { householder_to_zero(psi) } else { CMatrix::identity(da, da) };
        u.view_mut((x * da, x * da), (da, da)).copy_from(&block);
    }
    u
}

/// Labels kept after dropping the least likely outcomes of total mass at
/// most `eps` (ties: the higher label is dropped first), in ascending order.
pub fn prune_good_set(p: &[f64], eps: f64) -> Result<Vec<usize>> {
    crate::entropy::check_eps(eps)?;
    let t = truncate_values(p, eps);
    Ok((0..p.len()).filter(|&x| t.kept[x] && p[x] > 0.0).collect())
}

/// Alice's concentration of the dephased register `X`: good labels occupy
/// `X_g` slots `0..|S|` with `X_p = 0`; the others are spread over `X_p ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliceRelabel {
    pub good: Vec<usize>,
    /// `(g, p)` for every original label.
    pub slots: Vec<(usize, usize)>,
}

impl AliceRelabel {
    pub fn new(alphabet: usize, good: Vec<usize>) -> Result<Self> {
        if good.is_empty() {
            return Err(Error::InvalidParameter("good set is empty".into()));
        }
        let r = good.len();
        let mut slots = vec![(0, 0); alphabet];
        let mut is_good = vec![false; alphabet];
        for (i, &x) in good.iter().enumerate() {
            slots[x] = (i, 0);
            is_good[x] = true;
        }
        for (j, x) in (0..alphabet).filter(|&x| !is_good[x]).enumerate() {
            slots[x] = relabel_index(r + j, r, alphabet);
        }
        Ok(Self { good, slots })
    }

    pub fn rank(&self) -> usize {
        self.good.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::measure_cq;
    use crate::operator::{max_abs, purify, random_density, random_rank_one_povm, DensityOperator};

    #[test]
    fn householder_examples() {
        let e0 = CVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(max_abs(&(householder_to_zero(&e0) - CMatrix::identity(2, 2))) < 1e-15);
        let e1 = CVector::from_vec(vec![c(0.0), c(1.0)]);
        let swap = householder_to_zero(&e1);
        assert!((swap[(0, 1)].re - 1.0).abs() < 1e-15 && (swap[(1, 0)].re - 1.0).abs() < 1e-15);
        let psi = CVector::from_vec(vec![C64::new(0.3, 0.4), C64::new(-0.5, 0.2), C64::new(0.1, -0.67)]).normalize();
        let u = householder_to_zero(&psi);
        let img = &u * &psi;
        assert!((img[0] - c(1.0)).norm() < 1e-12 && img[1].norm() < 1e-12 && img[2].norm() < 1e-12);
        assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn coherent_measurement_probabilities_match_traces() {
        for seed in 0..100u64 {
            let rho = random_density(3, 3, seed).unwrap();
            let povm = random_rank_one_povm(3, 4, seed + 1).unwrap();
            let phi = purify(&rho).unwrap();
            let out = coherent_measure(&phi, &povm, "A").unwrap();
            let n = phi.dim();
            for x in 0..povm.len() {
                let p: f64 = out.amplitudes().rows(x * n, n).norm_squared();
                let want = crate::operator::trace_product(&povm.element(x), rho.matrix());
                assert!((p - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn basis_povm_on_mixed_qubit_is_uniform() {
        let rho = DensityOperator::maximally_mixed(HilbertDims::single("A", 2));
        let povm = RankOnePovm::computational_basis(HilbertDims::single("A", 2));
        let out = coherent_measure(&purify(&rho).unwrap(), &povm, "A").unwrap();
        let n = out.dim() / 2;
        assert!((out.amplitudes().rows(0, n).norm_squared() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn relabel_resets_a_register() {
        let rho = random_density(3, 2, 5).unwrap();
        let povm = random_rank_one_povm(3, 5, 6).unwrap();
        let out = coherent_measure(&purify(&rho).unwrap(), &povm, "A").unwrap();
        let u = relabel_unitary(&povm);
        // Apply U ⊗ I_R and read off the A marginal.
        let rest = out.dim() / (povm.len() * 3);
        let mut full = CMatrix::zeros(out.dim(), out.dim());
        for i in 0..povm.len() * 3 {
            for j in 0..povm.len() * 3 {
                for r in 0..rest {
                    full[(i * rest + r, j * rest + r)] = u[(i, j)];
                }
            }
        }
        let after = &full * out.amplitudes();
        let a = crate::operator::reduced_from_vector(&after, out.dims(), &["A"]).unwrap();
        assert!(a[(0, 0)].re >= 1.0 - 1e-9);
        let cq = measure_cq(&rho.clone(), &povm, "A");
        assert!(cq.is_err(), "single-system state has no side information");
    }

    #[test]
    fn pruning_examples() {
        assert_eq!(prune_good_set(&[0.5, 0.0, 0.5], 0.0).unwrap(), vec![0, 2]);
        assert_eq!(prune_good_set(&[0.125; 8], 0.25).unwrap().len(), 6);
        assert_eq!(prune_good_set(&[0.125; 8], 0.25).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(prune_good_set(&[0.5, 0.3, 0.15, 0.05], 0.1).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn alice_relabel_slots() {
        let r = AliceRelabel::new(5, vec![0, 2]).unwrap();
        assert_eq!(r.slots, vec![(0, 0), (0, 1), (1, 0), (1, 1), (0, 2)]);
    }
}
