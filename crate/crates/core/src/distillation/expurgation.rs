//! Markov-inequality expurgation of a joint index distribution `P_{KL}`.
//!
//! Given a set of good pairs with `Pr[good] ≥ 1 − 2√ε″`, keep the indices
//! `k` whose conditional good mass `η_k` is at least `1 − ε″^{1/4}`. All
//! comparisons are carried out on powers (`x ≤ ε″^{1/4}` as `x⁴ ≤ ε″`), so
//! with rational inputs every check is exact.

use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use serde::Serialize;

use crate::{Error, Result};

/// Scalars the expurgation can run on.
pub trait Mass: Clone + PartialOrd + Num + ToPrimitive {
    /// Slack added to every `≤ ε″` comparison.
    fn slack() -> Self;
}

impl Mass for f64 {
    fn slack() -> Self {
        1e-12
    }
}

impl Mass for BigRational {
    fn slack() -> Self {
        BigRational::zero()
    }
}

/// Kept pairs and indices with the probabilities that certify them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpurgationResult<T> {
    pub good_pairs: Vec<(usize, usize)>,
    pub good_k: Vec<usize>,
    /// `η_k = Pr[good | k]`; `1` for indices of zero mass.
    pub eta: Vec<T>,
    pub pr_good_pairs: T,
    pub pr_good_k: T,
    /// `max_{k ∈ Good_K} Pr[bad | k]`.
    pub worst_bad_given_good_k: T,
    pub eps_pp: T,
}

/// `x ≤ 2 ε″^{1/power}` for `power ∈ {2, 4}`, i.e. `(x/2)^power ≤ ε″`.
fn within<T: Mass>(x: &T, eps_pp: &T, power: u32, halve: bool) -> bool {
    if *x <= T::zero() {
        return true;
    }
    let two = T::one() + T::one();
    let base = if halve { x.clone() / two } else { x.clone() };
    let mut p = T::one();
    for _ in 0..power {
        p = p * base.clone();
    }
    p <= eps_pp.clone() + T::slack()
}

impl<T: Mass> ExpurgationResult<T> {
    /// `Pr[Good_KL] ≥ 1 − 2√ε″`.
    pub fn pairs_bound_holds(&self) -> bool {
        within(&(T::one() - self.pr_good_pairs.clone()), &self.eps_pp, 2, true)
    }

    /// `Pr[Good_K] ≥ 1 − 2ε″^{1/4}`.
    pub fn index_bound_holds(&self) -> bool {
        within(&(T::one() - self.pr_good_k.clone()), &self.eps_pp, 4, true)
    }

    /// `Pr[Bad_{L|k}] ≤ ε″^{1/4}` for every kept `k`.
    pub fn conditional_bound_holds(&self) -> bool {
        within(&self.worst_bad_given_good_k, &self.eps_pp, 4, false)
    }

    pub fn invariants_hold(&self) -> bool {
        self.pairs_bound_holds() && self.index_bound_holds() && self.conditional_bound_holds()
    }

    /// The three bounds as `(achieved, limit)` in floating point.
    pub fn achieved_bounds(&self) -> [(f64, f64); 3] {
        let e = self.eps_pp.to_f64().unwrap_or(f64::NAN);
        let f = |x: &T| x.to_f64().unwrap_or(f64::NAN);
        [
            (1.0 - f(&self.pr_good_pairs), 2.0 * e.sqrt()),
            (1.0 - f(&self.pr_good_k), 2.0 * e.powf(0.25)),
            (f(&self.worst_bad_given_good_k), e.powf(0.25)),
        ]
    }
}

/// Expurgates `joint[k][l]` with respect to the pair predicate `good`.
pub fn expurgate_pairs<T: Mass>(
    joint: &[Vec<T>],
    good: impl Fn(usize, usize) -> bool,
    eps_pp: T,
) -> Result<ExpurgationResult<T>> {
    if !(eps_pp > T::zero() && eps_pp < T::one()) {
        return Err(Error::InvalidParameter("ε″ must lie in (0, 1)".into()));
    }
    if joint.iter().flatten().any(|p| *p < T::zero()) {
        return Err(Error::InvalidParameter("negative probability".into()));
    }
    let total = joint.iter().flatten().fold(T::zero(), |a, p| a + p.clone());
    let deviation = (total.to_f64().unwrap_or(f64::NAN) - 1.0).abs();
    if !(deviation <= 1e-9) {
        return Err(Error::NotNormalized(total.to_f64().unwrap_or(f64::NAN)));
    }

    let mut good_pairs = Vec::new();
    let mut pr_good_pairs = T::zero();
    let mut eta = Vec::with_capacity(joint.len());
    for (k, row) in joint.iter().enumerate() {
        let mass = row.iter().fold(T::zero(), |a, p| a + p.clone());
        let mut good_mass = T::zero();
        for (l, p) in row.iter().enumerate() {
            if good(k, l) {
                good_pairs.push((k, l));
                good_mass = good_mass + p.clone();
            }
        }
        pr_good_pairs = pr_good_pairs + good_mass.clone();
        eta.push(if mass.is_zero() { T::one() } else { good_mass / mass });
    }
    if !within(&(T::one() - pr_good_pairs.clone()), &eps_pp, 2, true) {
        return Err(Error::Precondition(format!(
            "Pr[good] = {:.6} is below 1 − 2√ε″",
            pr_good_pairs.to_f64().unwrap_or(f64::NAN)
        )));
    }

    let mut good_k = Vec::new();
    let mut pr_good_k = T::zero();
    let mut worst = T::zero();
    for (k, e) in eta.iter().enumerate() {
        let bad = T::one() - e.clone();
        if within(&bad, &eps_pp, 4, false) {
            good_k.push(k);
            pr_good_k = joint[k].iter().fold(pr_good_k, |a, p| a + p.clone());
            if bad > worst {
                worst = bad;
            }
        }
    }
    let out = ExpurgationResult {
        good_pairs,
        good_k,
        eta,
        pr_good_pairs,
        pr_good_k,
        worst_bad_given_good_k: worst,
        eps_pp,
    };
    if !out.invariants_hold() {
        return Err(Error::Numerical("expurgation bounds failed after selection".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn all_good_keeps_everything() {
        let joint = vec![vec![0.25, 0.25], vec![0.5, 0.0]];
        let r = expurgate_pairs(&joint, |_, _| true, 0.01).unwrap();
        assert_eq!(r.good_k, vec![0, 1]);
        assert!(r.eta.iter().all(|e| *e == 1.0));
    }

    #[test]
    fn concentrated_bad_mass_drops_one_index() {
        // Uniform over 10 × 10; the ten bad pairs all sit in row 3, so
        // η_3 = 0 and every other row has η = 1. ε″ = 1/256 allows
        // 1 − Pr[good] up to 1/8.
        let joint = vec![vec![q(1, 100); 10]; 10];
        let r = expurgate_pairs(&joint, |k, _| k != 3, q(1, 256)).unwrap();
        assert_eq!(r.good_k, vec![0, 1, 2, 4, 5, 6, 7, 8, 9]);
        assert_eq!(r.pr_good_k, q(9, 10));
        assert_eq!(r.worst_bad_given_good_k, q(0, 1));
        assert!(r.invariants_hold());
    }

    #[test]
    fn threshold_is_inclusive() {
        // ε″ = 1/16 gives ε″^{1/4} = 1/2: a row with η = 1/2 stays.
        let joint = vec![vec![q(1, 8), q(1, 8)], vec![q(3, 4), q(0, 1)]];
        let r = expurgate_pairs(&joint, |k, l| !(k == 0 && l == 1), q(1, 16)).unwrap();
        assert_eq!(r.good_k, vec![0, 1]);
        assert_eq!(r.eta[0], q(1, 2));
    }

    #[test]
    fn precondition_is_enforced() {
        let joint = vec![vec![0.5, 0.5]];
        assert!(matches!(expurgate_pairs(&joint, |_, l| l == 0, 0.01), Err(Error::Precondition(_))));
    }
}
