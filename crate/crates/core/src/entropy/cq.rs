use crate::operator::{
    c, partial_trace_matrix, CMatrix, DensityOperator, HermitianOperator, HilbertDims, RankOnePovm,
};
use crate::{Error, Result};

/// Classical-quantum state `Σ_x p(x) |x⟩⟨x| ⊗ ρ_x`.
///
/// Probabilities may be sub-normalized. Every conditional is a normalized
/// state on the same quantum system.
#[derive(Clone, Debug)]
pub struct CqState {
    labels: Vec<String>,
    probs: Vec<f64>,
    conditionals: Vec<DensityOperator>,
}

impl CqState {
    pub fn new(probs: Vec<f64>, conditionals: Vec<DensityOperator>) -> Result<Self> {
        let labels = (0..probs.len()).map(|x| x.to_string()).collect();
        Self::with_labels(labels, probs, conditionals)
    }

    pub fn with_labels(labels: Vec<String>, probs: Vec<f64>, conditionals: Vec<DensityOperator>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter("cq state needs at least one label".into()));
        }
        if probs.len() != conditionals.len() || labels.len() != probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels, {} probabilities, {} conditionals",
                labels.len(),
                probs.len(),
                conditionals.len()
            )));
        }
        if let Some(&p) = probs.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("negative probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-10 {
            return Err(Error::InvalidTrace(total));
        }
        let d = conditionals[0].dim();
        for rho in &conditionals {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch(format!("conditionals on {} and {}", conditionals[0].dims(), rho.dims())));
            }
            rho.require_normalized()?;
        }
        Ok(Self { labels, probs, conditionals })
    }

    /// Classical joint distribution: conditionals are computational basis
    /// states `|b⟩` of a `d_b`-dimensional system labelled `B`.
    pub fn classical(joint: &[Vec<f64>]) -> Result<Self> {
        let db = joint.first().map(|r| r.len()).unwrap_or(0);
        let dims = HilbertDims::single("B", db.max(1));
        let mut probs = Vec::with_capacity(joint.len());
        let mut conds = Vec::with_capacity(joint.len());
        for row in joint {
            if row.len() != db {
                return Err(Error::DimensionMismatch("ragged joint distribution".into()));
            }
            let p: f64 = row.iter().sum();
            probs.push(p);
            let cond = if p > 0.0 {
                row.iter().map(|v| v / p).collect()
            } else {
                vec![1.0 / db as f64; db]
            };
            conds.push(DensityOperator::diagonal(dims.clone(), &cond)?);
        }
        Self::new(probs, conds)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn conditional(&self, x: usize) -> &DensityOperator {
        &self.conditionals[x]
    }

    pub fn conditionals(&self) -> &[DensityOperator] {
        &self.conditionals
    }

    pub fn quantum_dims(&self) -> &HilbertDims {
        self.conditionals[0].dims()
    }

    pub fn quantum_dim(&self) -> usize {
        self.conditionals[0].dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-10
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.total_mass()))
        }
    }

    /// `ρ^B = Σ_x p(x) ρ_x`.
    pub fn average(&self) -> CMatrix {
        let d = self.quantum_dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, rho) in self.probs.iter().zip(&self.conditionals) {
            if *p > 0.0 {
                m += rho.matrix() * c(*p);
            }
        }
        m
    }

    /// The joint block-diagonal operator on `X ⊗ B`.
    pub fn joint(&self) -> Result<DensityOperator> {
        let d = self.quantum_dim();
        let k = self.len();
        let dims = HilbertDims::single("X", k).concat(self.quantum_dims())?;
        let mut m = CMatrix::zeros(k * d, k * d);
        for (x, (p, rho)) in self.probs.iter().zip(&self.conditionals).enumerate() {
            m.view_mut((x * d, x * d), (d, d)).copy_from(&(rho.matrix() * c(*p)));
        }
        Ok(DensityOperator::from_trusted(HermitianOperator::from_matrix_unchecked(dims, m)))
    }

    /// Are all conditionals diagonal in the computational basis?
    pub fn is_classical(&self) -> bool {
        self.conditionals.iter().all(|r| r.is_diagonal(1e-13))
    }

    /// Sub-state keeping only `subset`, with the remaining labels' mass.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        Self::with_labels(
            subset.iter().map(|&x| self.labels[x].clone()).collect(),
            subset.iter().map(|&x| self.probs[x]).collect(),
            subset.iter().map(|&x| self.conditionals[x].clone()).collect(),
        )
    }

    /// Rescales probabilities to sum to one.
    pub fn renormalized(&self) -> Result<Self> {
        let t = self.total_mass();
        if t <= 0.0 {
            return Err(Error::InvalidTrace(t));
        }
        Self::with_labels(self.labels.clone(), self.probs.iter().map(|p| p / t).collect(), self.conditionals.clone())
    }
}

/// The cq state `(X:B)` produced by measuring subsystem `a_label` of
/// `rho` with `povm`. Zero-probability outcomes get the maximally mixed
/// conditional as a placeholder.
pub fn measure_cq(rho: &DensityOperator, povm: &RankOnePovm, a_label: &str) -> Result<CqState> {
    let dims = rho.dims();
    let da = dims.dim_of(a_label)?;
    if povm.dims().total() != da {
        return Err(Error::DimensionMismatch(format!(
            "POVM on dimension {} applied to `{a_label}` of dimension {da}",
            povm.dims().total()
        )));
    }
    let rest: Vec<&str> = dims.labels().filter(|l| *l != a_label).collect();
    if rest.is_empty() {
        return Err(Error::InvalidDims("measured state has no side information".into()));
    }
    let (split, _, _) = dims.split_indices(&[a_label])?;
    let rest_dims = dims.restrict(&rest)?;
    let rest_dim = rest_dims.total();
    let mut probs = Vec::with_capacity(povm.len());
    let mut conds = Vec::with_capacity(povm.len());
    for (w, psi) in povm.elements() {
        // Tr_A[(c|ψ⟩⟨ψ| ⊗ I) ρ] = c ⟨ψ|_A ρ |ψ⟩_A
        let mut contract = CMatrix::zeros(rest_dim, dims.total());
        for (full, &(a, r)) in split.iter().enumerate() {
            contract[(r, full)] = psi[a].conj();
        }
        let out = &contract * rho.matrix() * contract.adjoint() * c(w);
        let p = crate::operator::re_trace(&out).max(0.0);
        probs.push(p);
        let cond = if p > 1e-15 {
            DensityOperator::from_trusted(HermitianOperator::from_matrix_unchecked(rest_dims.clone(), out * c(1.0 / p)))
        } else {
            DensityOperator::maximally_mixed(rest_dims.clone())
        };
        conds.push(cond);
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    CqState::with_labels(povm.labels().to_vec(), probs, conds)
}

/// Reduced state helper used by the measured-state constructors.
pub(crate) fn marginal(rho: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    let (m, dims) = partial_trace_matrix(rho.matrix(), rho.dims(), keep)?;
    Ok(DensityOperator::from_trusted(HermitianOperator::from_matrix_unchecked(dims, m)))
}

/// `H_min(R|X)` of a cq state with classical conditioning:
/// `−log₂ Σ_x p(x) λ_max(ρ_x)`.
pub fn h_min_cond_cq(cq: &CqState) -> Result<f64> {
    cq.require_normalized()?;
    let s: f64 = cq
        .probs()
        .iter()
        .zip(cq.conditionals())
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, rho)| p * rho.eigenvalues()[0])
        .sum();
    if s <= 0.0 {
        return Err(Error::InvalidParameter("cq state has empty support".into()));
    }
    Ok(-s.log2())
}
