use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::cq::{marginal, measure_cq};
use super::hypothesis::i_h_cq;
use super::smoothing::h_max_tilde;
use crate::operator::{DensityOperator, RankOnePovm};
use crate::{Error, Result};

/// How a reported number relates to the quantity it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    UpperBound,
    LowerBound,
}

/// A value in bits with its bound tag. Infinite values serialize as `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub kind: BoundKind,
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Quantity", 2)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("value", &crate::harness::report::Number(self.value))?;
        st.end()
    }
}

/// Named entropic quantities plus free-form notes, in sorted key order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EntropyReport {
    pub quantities: BTreeMap<String, Quantity>,
    pub notes: BTreeMap<String, String>,
}

impl EntropyReport {
    pub fn insert(&mut self, name: &str, value: f64, kind: BoundKind) {
        self.quantities.insert(name.to_string(), Quantity { value, kind });
    }

    pub fn note(&mut self, name: &str, text: impl Into<String>) {
        self.notes.insert(name.to_string(), text.into());
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).map(|q| q.value)
    }

    /// Every value is finite or `+∞`.
    pub fn is_well_formed(&self) -> bool {
        self.quantities.values().all(|q| q.value.is_finite() || q.value == f64::INFINITY)
    }
}

/// Term-by-term breakdown of the one-way distillable-purity lower bound
/// for `ρ^{AB}` measured with `povm` on `A` (the first subsystem).
///
/// The smoothing parameters follow the protocol: `ε²/48` for Alice's
/// concentration, `ε` for Bob's, and `ε₀ = ε^{1/4}` (coefficient 1) for the
/// hypothesis-testing term. Unspecified additive constants are recorded as
/// notes only.
pub fn distillation_rate_terms(rho_ab: &DensityOperator, povm: &RankOnePovm, eps: f64) -> Result<EntropyReport> {
    rho_ab.require_normalized()?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must lie in [0, 1)")));
    }
    let dims = rho_ab.dims();
    if dims.len() < 2 {
        return Err(Error::InvalidDims(format!("{dims} is not bipartite")));
    }
    let labels: Vec<&str> = dims.labels().collect();
    let a_label = labels[0];
    let rho_a = marginal(rho_ab, &labels[..1])?;
    let rho_b = marginal(rho_ab, &labels[1..])?;
    let eps_a = eps * eps / 48.0;
    let eps0 = eps.powf(0.25);

    let h_a = h_max_tilde(&rho_a, eps_a)?;
    let h_b = h_max_tilde(&rho_b, eps)?;
    let cq = measure_cq(rho_ab, povm, a_label)?;
    let (ih, _) = i_h_cq(&cq, eps0)?;
    let comm = if eps > 0.0 { h_a - 2.0 * (eps * eps / 24.0).log2() } else { f64::INFINITY };

    let mut r = EntropyReport::default();
    r.insert("log_dA_dB", (rho_a.dim() as f64 * rho_b.dim() as f64).log2(), BoundKind::Exact);
    r.insert("h_tilde_A", h_a, BoundKind::Exact);
    r.insert("h_tilde_B", h_b, BoundKind::Exact);
    r.insert("i_h_X_B", ih, BoundKind::Exact);
    r.insert("communication_surrogate", comm, BoundKind::UpperBound);
    r.note("eps_A", format!("eps^2/48 = {eps_a}"));
    r.note("eps_B", format!("eps = {eps}"));
    r.note("eps0", format!("eps^(1/4) with coefficient 1 = {eps0}"));
    r.note("constant_O1", "unspecified additive O(1) term, not evaluated");
    r.note("constant_Olog_eps", "unspecified additive O(log eps) term, not evaluated");
    r.note(
        "rate_expression",
        "log_dA_dB - h_tilde_A - h_tilde_B + i_h_X_B + O(log eps) - O(1)",
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HilbertDims;

    #[test]
    fn correlated_bits_at_zero_eps() {
        let dims = HilbertDims::new([("A", 2), ("B", 2)]).unwrap();
        let rho = DensityOperator::diagonal(dims, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let povm = RankOnePovm::computational_basis(HilbertDims::single("A", 2));
        let r = distillation_rate_terms(&rho, &povm, 0.0).unwrap();
        assert!((r.get("i_h_X_B").unwrap() - 1.0).abs() < 1e-12);
        assert!((r.get("h_tilde_A").unwrap() - 1.0).abs() < 1e-12);
        assert!((r.get("h_tilde_B").unwrap() - 1.0).abs() < 1e-12);
        assert!((r.get("log_dA_dB").unwrap() - 2.0).abs() < 1e-12);
        assert!(r.is_well_formed());
    }

    #[test]
    fn product_pure_state() {
        let dims = HilbertDims::new([("A", 2), ("B", 2)]).unwrap();
        let rho = DensityOperator::diagonal(dims, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let povm = RankOnePovm::computational_basis(HilbertDims::single("A", 2));
        let eps = 0.01;
        let r = distillation_rate_terms(&rho, &povm, eps).unwrap();
        let eps0 = eps.powf(0.25);
        assert!((r.get("i_h_X_B").unwrap() - (1.0 / (1.0 - eps0)).log2()).abs() < 1e-9);
        assert!(r.get("h_tilde_A").unwrap().abs() < 1e-12);
        assert!(r.get("h_tilde_B").unwrap().abs() < 1e-12);
    }
}
