use super::{c, eigh_raw, CMatrix, CVector, HilbertDims, PureStateVector, C64};
use crate::{Error, Result};

/// Completeness tolerance in operator norm.
pub const POVM_TOL: f64 = 1e-8;

/// Measurement `{c_x |ψ_x⟩⟨ψ_x|}` with `Σ_x c_x |ψ_x⟩⟨ψ_x| = I`.
#[derive(Clone, Debug)]
pub struct RankOnePovm {
    dims: HilbertDims,
    labels: Vec<String>,
    elements: Vec<(f64, PureStateVector)>,
}

impl RankOnePovm {
    pub fn new(dims: HilbertDims, elements: Vec<(f64, CVector)>) -> Result<Self> {
        let labels = (0..elements.len()).map(|x| x.to_string()).collect();
        Self::with_labels(dims, labels, elements)
    }

    pub fn with_labels(dims: HilbertDims, labels: Vec<String>, elements: Vec<(f64, CVector)>) -> Result<Self> {
        if labels.len() != elements.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} outcomes",
                labels.len(),
                elements.len()
            )));
        }
        let d = dims.total();
        let mut sum = CMatrix::zeros(d, d);
        let mut checked = Vec::with_capacity(elements.len());
        for (w, v) in elements {
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative POVM weight {w}")));
            }
            let psi = PureStateVector::new(dims.clone(), v)?;
            sum += psi.projector() * c(w);
            checked.push((w, psi));
        }
        let residual = eigh_raw(&(sum - CMatrix::identity(d, d)))
            .0
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if residual > POVM_TOL {
            return Err(Error::PovmIncomplete(residual));
        }
        Ok(Self { dims, labels, elements: checked })
    }

    /// Measurement in the computational basis.
    pub fn computational_basis(dims: HilbertDims) -> Self {
        let d = dims.total();
        let elements = (0..d)
            .map(|x| (1.0, PureStateVector::basis(dims.clone(), x).expect("index in range")))
            .collect();
        Self { labels: (0..d).map(|x| x.to_string()).collect(), dims, elements }
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.elements[x].0
    }

    pub fn vector(&self, x: usize) -> &CVector {
        self.elements[x].1.amplitudes()
    }

    pub fn elements(&self) -> impl Iterator<Item = (f64, &CVector)> {
        self.elements.iter().map(|(w, v)| (*w, v.amplitudes()))
    }

    /// `Λ_x = c_x |ψ_x⟩⟨ψ_x|`.
    pub fn element(&self, x: usize) -> CMatrix {
        self.elements[x].1.projector() * c(self.elements[x].0)
    }

    /// `P(x) = c_x ⟨ψ_x|ρ|ψ_x⟩`.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|(w, v)| {
                let a = v.amplitudes();
                let val: C64 = (a.adjoint() * rho * a)[(0, 0)];
                w * val.re
            })
            .collect()
    }

    /// Does every element lie on a computational basis vector?
    pub fn is_computational(&self) -> Option<Vec<usize>> {
        self.elements
            .iter()
            .map(|(_, v)| {
                let a = v.amplitudes();
                let nz: Vec<usize> = (0..a.len()).filter(|&i| a[i].norm() > 1e-12).collect();
                (nz.len() == 1).then(|| nz[0])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incomplete_povm_is_rejected() {
        let dims = HilbertDims::single("A", 2);
        let e0 = CVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(matches!(RankOnePovm::new(dims, vec![(1.0, e0)]), Err(Error::PovmIncomplete(_))));
    }

    #[test]
    fn basis_probabilities() {
        let povm = RankOnePovm::computational_basis(HilbertDims::single("A", 2));
        let rho = CMatrix::identity(2, 2) * c(0.5);
        assert_eq!(povm.probabilities(&rho), vec![0.5, 0.5]);
        assert_eq!(povm.is_computational(), Some(vec![0, 1]));
    }
}
