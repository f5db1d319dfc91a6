use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Relative tolerance under which two eigenvalues are merged.
const MERGE_TOL: f64 = 1e-12;
/// Slack added to the truncation budget.
pub(crate) const TRUNCATION_SLACK: f64 = 1e-12;

/// `log₂ n` for arbitrarily large integers (`-∞` for zero).
pub fn log2_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    let top: BigUint = n >> shift;
    top.to_f64().expect("64-bit value").log2() + shift as f64
}

/// Spectrum stored as distinct eigenvalues with (possibly huge) multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMultiset {
    entries: Vec<(f64, BigUint)>,
}

impl SpectralMultiset {
    /// Validates and canonicalizes: merges near-equal values, sorts descending
    /// and drops empty entries.
    pub fn new(entries: Vec<(f64, BigUint)>) -> Result<Self> {
        for (v, _) in &entries {
            if !(-1e-10..=1.0 + 1e-10).contains(v) {
                return Err(Error::InvalidParameter(format!("eigenvalue {v} outside [0, 1]")));
            }
        }
        let out = Self::canonical(entries.into_iter().map(|(v, m)| (v.clamp(0.0, 1.0), m)).collect());
        let mass = out.total_mass();
        if mass > 1.0 + 1e-10 {
            return Err(Error::InvalidTrace(mass));
        }
        Ok(out)
    }

    /// Multiset of the given eigenvalue list.
    pub fn from_eigenvalues(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| (v, BigUint::one())).collect())
    }

    fn canonical(mut entries: Vec<(f64, BigUint)>) -> Self {
        entries.retain(|(_, m)| !m.is_zero());
        entries.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut merged: Vec<(f64, BigUint)> = Vec::with_capacity(entries.len());
        for (v, m) in entries {
            match merged.last_mut() {
                Some((u, n)) if (*u - v).abs() <= MERGE_TOL * u.abs().max(v.abs()) => *n += m,
                _ => merged.push((v, m)),
            }
        }
        Self { entries: merged }
    }

    pub fn entries(&self) -> &[(f64, BigUint)] {
        &self.entries
    }

    /// Total number of eigenvalues, zeros included.
    pub fn count(&self) -> BigUint {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Number of strictly positive eigenvalues.
    pub fn support_size(&self) -> BigUint {
        self.entries.iter().filter(|(v, _)| *v > 0.0).map(|(_, m)| m).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(v, m)| v * m.to_f64().unwrap_or(f64::INFINITY)).sum()
    }

    /// Smallest strictly positive eigenvalue.
    pub fn min_positive(&self) -> Option<f64> {
        self.entries.iter().rev().map(|(v, _)| *v).find(|v| *v > 0.0)
    }

    /// `log₂ Σ mⱼ √λⱼ`, computed in the log domain.
    pub fn log2_sqrt_sum(&self) -> f64 {
        let terms: Vec<f64> = self
            .entries
            .iter()
            .filter(|(v, _)| *v > 0.0)
            .map(|(v, m)| log2_biguint(m) + 0.5 * v.log2())
            .collect();
        let Some(top) = terms.iter().copied().reduce(f64::max) else {
            return f64::NEG_INFINITY;
        };
        top + terms.iter().map(|t| (t - top).exp2()).sum::<f64>().log2()
    }

    /// Shannon entropy of the spectrum (bits).
    pub fn entropy(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(v, _)| *v > 0.0)
            .map(|(v, m)| -v * v.log2() * m.to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }

    /// Removes the smallest eigenvalues while their cumulative mass stays
    /// within `eps`. Groups may be split; atoms are removed one at a time.
    pub fn truncate_tail(&self, eps: f64) -> (Self, f64) {
        let budget = eps + TRUNCATION_SLACK;
        let mut removed = 0.0f64;
        let mut kept: Vec<(f64, BigUint)> = self.entries.clone();
        for idx in (0..kept.len()).rev() {
            let (v, m) = kept[idx].clone();
            if v <= 0.0 {
                kept[idx].1 = BigUint::zero();
                continue;
            }
            let room = ((budget - removed) / v).floor();
            if room < 1.0 {
                break;
            }
            let m_f = m.to_f64().unwrap_or(f64::INFINITY);
            if room >= m_f {
                removed += v * m_f;
                kept[idx].1 = BigUint::zero();
            } else {
                let k = BigUint::from(room as u128);
                removed += v * room;
                kept[idx].1 = m - k;
                break;
            }
        }
        (Self::canonical(kept), removed)
    }

    /// Spectrum of the `n`-fold tensor power, enumerated by type classes.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("tensor power n must be at least 1".into()));
        }
        let k = self.entries.len();
        let logs: Vec<f64> = self.entries.iter().map(|(v, _)| v.log2()).collect();
        let factorials = factorial_table(n);
        let mut out = Vec::new();
        let mut comp = vec![0usize; k];
        compositions(n, 0, &mut comp, &mut |c| {
            let mut log_val = 0.0;
            let mut zero = false;
            let mut mult = factorials[n].clone();
            let mut denom = BigUint::one();
            for (j, &kj) in c.iter().enumerate() {
                if kj == 0 {
                    continue;
                }
                if self.entries[j].0 <= 0.0 {
                    zero = true;
                } else {
                    log_val += kj as f64 * logs[j];
                }
                denom *= &factorials[kj];
                mult *= self.entries[j].1.pow(kj as u32);
            }
            let value = if zero { 0.0 } else { log_val.exp2() };
            out.push((value, mult / denom));
        });
        Ok(Self::canonical(out))
    }
}

fn factorial_table(n: usize) -> Vec<BigUint> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(BigUint::one());
    for i in 1..=n {
        let next = &t[i - 1] * BigUint::from(i);
        t.push(next);
    }
    t
}

fn compositions(rest: usize, pos: usize, comp: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if comp.is_empty() {
        return;
    }
    if pos == comp.len() - 1 {
        comp[pos] = rest;
        f(comp);
        return;
    }
    for k in 0..=rest {
        comp[pos] = k;
        compositions(rest - k, pos + 1, comp, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power_stays_pure() {
        let ms = SpectralMultiset::from_eigenvalues(&[1.0, 0.0]).unwrap();
        let p = ms.tensor_power(7).unwrap();
        assert_eq!(p.support_size(), BigUint::one());
        assert!((p.entries()[0].0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_power_merges() {
        let ms = SpectralMultiset::from_eigenvalues(&[0.5, 0.5]).unwrap();
        let p = ms.tensor_power(3).unwrap();
        assert_eq!(p.entries().len(), 1);
        assert!((p.entries()[0].0 - 0.125).abs() < 1e-15);
        assert_eq!(p.entries()[0].1, BigUint::from(8u32));
    }

    #[test]
    fn truncation_splits_groups() {
        let ms = SpectralMultiset::from_eigenvalues(&[0.125; 8]).unwrap();
        let (kept, removed) = ms.truncate_tail(0.25);
        assert_eq!(kept.support_size(), BigUint::from(6u32));
        assert!((removed - 0.25).abs() < 1e-15);
    }

    #[test]
    fn big_log2() {
        let n = BigUint::one() << 2000usize;
        assert!((log2_biguint(&n) - 2000.0).abs() < 1e-9);
    }
}
