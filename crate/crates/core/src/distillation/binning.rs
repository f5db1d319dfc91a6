//! Equal-size binning of a classical alphabet by a random permutation.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::entropy::{i_h_cq, CqState};
use crate::operator::random::rng;
use crate::{Error, Result};

/// A bijection from the padded alphabet `X̂` onto `[M] × [N]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Binning {
    /// `position[x] = σ(x)`, flattened as `m·N + n`.
    pub position: Vec<usize>,
    /// Number of blocks `M`.
    pub blocks: usize,
    /// Block size `N`.
    pub block_size: usize,
    /// Number of genuine symbols; labels `≥ source_len` are padding.
    pub source_len: usize,
    pub seed: u64,
    /// `I_H^ε(X:B)` used to size the blocks (`NaN` when supplied directly).
    pub i_h: f64,
}

impl Binning {
    /// Random binning of `len` symbols into blocks of size `n_block`,
    /// padding the alphabet up to the next multiple of `n_block`.
    pub fn with_block_size(len: usize, n_block: usize, seed: u64) -> Result<Self> {
        if len == 0 || n_block == 0 {
            return Err(Error::InvalidParameter("alphabet and block size must be positive".into()));
        }
        let padded = len.div_ceil(n_block) * n_block;
        let mut order: Vec<usize> = (0..padded).collect();
        order.shuffle(&mut rng(seed));
        // order[pos] = symbol; invert.
        let mut position = vec![0; padded];
        for (pos, &x) in order.iter().enumerate() {
            position[x] = pos;
        }
        Ok(Self { position, blocks: padded / n_block, block_size: n_block, source_len: len, seed, i_h: f64::NAN })
    }

    pub fn padded_len(&self) -> usize {
        self.position.len()
    }

    pub fn padding(&self) -> usize {
        self.padded_len() - self.source_len
    }

    /// `(m, n) = σ(x)`.
    pub fn slot(&self, x: usize) -> (usize, usize) {
        let pos = self.position[x];
        (pos / self.block_size, pos % self.block_size)
    }

    /// `f_σ(x)`.
    pub fn block_of(&self, x: usize) -> usize {
        self.slot(x).0
    }

    /// Symbols of block `m` ordered by their in-block index `n`.
    pub fn members(&self, m: usize) -> Vec<usize> {
        let mut out = vec![0; self.block_size];
        for (x, &pos) in self.position.iter().enumerate() {
            if pos / self.block_size == m {
                out[pos % self.block_size] = x;
            }
        }
        out
    }

    /// All blocks at once: `members_all()[m][n]`.
    pub fn members_all(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0; self.block_size]; self.blocks];
        for (x, &pos) in self.position.iter().enumerate() {
            out[pos / self.block_size][pos % self.block_size] = x;
        }
        out
    }

    pub fn is_padding(&self, x: usize) -> bool {
        x >= self.source_len
    }
}

/// `N = max(1, ⌊2^{I_H + 2 log₂ ε}⌋)`, capped at the alphabet size.
pub fn block_size_for(i_h: f64, eps: f64, alphabet: usize) -> usize {
    if eps <= 0.0 || i_h.is_nan() {
        return 1;
    }
    if i_h == f64::INFINITY {
        return alphabet.max(1);
    }
    let exponent = i_h + 2.0 * eps.log2();
    let raw = if exponent >= 63.0 { f64::MAX } else { (exponent.exp2() + 1e-9).floor() };
    (raw.min(alphabet as f64) as usize).max(1)
}

/// Block sizes from `I_H^ε(X:B)` of `cq`, then a seeded permutation.
pub fn make_binning(cq: &CqState, eps: f64, seed: u64) -> Result<Binning> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must lie in (0, 1)")));
    }
    let (i_h, _) = i_h_cq(cq, eps)?;
    binning_from_i_h(i_h, cq.len(), eps, seed)
}

pub(crate) fn binning_from_i_h(i_h: f64, len: usize, eps: f64, seed: u64) -> Result<Binning> {
    let n = block_size_for(i_h, eps, len);
    let mut b = Binning::with_block_size(len, n, seed)?;
    b.i_h = i_h;
    Ok(b)
}

/// How [`collision_probability`] evaluates the collision rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollisionMode {
    /// Every permutation of the domain (at most 7 symbols).
    Exact,
    MonteCarlo { seed: u64, trials: usize },
}

/// Collision rate of `f_σ` for distinct symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionEstimate {
    pub value: f64,
    /// Exact rational in [`CollisionMode::Exact`].
    pub exact: Option<BigRational>,
    /// Permutations examined.
    pub samples: usize,
}

/// Largest domain [`CollisionMode::Exact`] accepts.
pub const EXACT_DOMAIN_LIMIT: usize = 7;

/// `Pr_σ[f_σ(x) = f_σ(x′)]` averaged over ordered pairs `x ≠ x′`.
pub fn collision_probability(domain: usize, n_block: usize, mode: CollisionMode) -> Result<CollisionEstimate> {
    if domain < 2 || n_block == 0 || !domain.is_multiple_of(n_block) {
        return Err(Error::InvalidParameter(format!(
            "block size {n_block} must divide a domain of at least two symbols (got {domain})"
        )));
    }
    let pairs = domain * (domain - 1);
    let collisions_of = |perm: &[usize]| -> usize {
        let mut hits = 0;
        for x in 0..domain {
            for y in 0..domain {
                if x != y && perm[x] / n_block == perm[y] / n_block {
                    hits += 1;
                }
            }
        }
        hits
    };
    match mode {
        CollisionMode::Exact => {
            if domain > EXACT_DOMAIN_LIMIT {
                return Err(Error::InvalidParameter(format!(
                    "exact enumeration is limited to {EXACT_DOMAIN_LIMIT} symbols"
                )));
            }
            let mut hits = 0usize;
            let mut count = 0usize;
            for perm in (0..domain).permutations(domain) {
                hits += collisions_of(&perm);
                count += 1;
            }
            let exact = BigRational::new(BigInt::from(hits), BigInt::from(count * pairs));
            Ok(CollisionEstimate { value: exact.to_f64().unwrap_or(f64::NAN), exact: Some(exact), samples: count })
        }
        CollisionMode::MonteCarlo { seed, trials } => {
            if trials == 0 {
                return Err(Error::InvalidParameter("at least one trial is required".into()));
            }
            let mut r = rng(seed);
            let mut perm: Vec<usize> = (0..domain).collect();
            let mut hits = 0usize;
            for _ in 0..trials {
                perm.shuffle(&mut r);
                let x = r.random_range(0..domain);
                let mut y = r.random_range(0..domain - 1);
                if y >= x {
                    y += 1;
                }
                if perm[x] / n_block == perm[y] / n_block {
                    hits += 1;
                }
            }
            Ok(CollisionEstimate { value: hits as f64 / trials as f64, exact: None, samples: trials })
        }
    }
}

/// Exact per-pair check: does every ordered pair collide with probability
/// `(N − 1)/(|X| − 1)`?
pub fn collision_law_holds_pairwise(domain: usize, n_block: usize) -> Result<bool> {
    if !(2..=EXACT_DOMAIN_LIMIT).contains(&domain) || !domain.is_multiple_of(n_block) {
        return Err(Error::InvalidParameter("pairwise check needs a small divisible domain".into()));
    }
    let mut hits = vec![vec![0usize; domain]; domain];
    let mut count = 0usize;
    for perm in (0..domain).permutations(domain) {
        count += 1;
        for x in 0..domain {
            for y in 0..domain {
                if x != y && perm[x] / n_block == perm[y] / n_block {
                    hits[x][y] += 1;
                }
            }
        }
    }
    let law = BigRational::new(BigInt::from(n_block - 1), BigInt::from(domain - 1));
    Ok((0..domain).cartesian_product(0..domain).filter(|(x, y)| x != y).all(|(x, y)| {
        let p = BigRational::new(BigInt::from(hits[x][y]), BigInt::from(count));
        (p - &law).is_zero()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn exact_collision_law() {
        let four = collision_probability(4, 2, CollisionMode::Exact).unwrap();
        assert_eq!(four.exact.unwrap(), ratio(1, 3));
        let six = collision_probability(6, 3, CollisionMode::Exact).unwrap();
        assert_eq!(six.exact.unwrap(), ratio(2, 5));
        let one_block = collision_probability(5, 5, CollisionMode::Exact).unwrap();
        assert_eq!(one_block.exact.unwrap(), ratio(1, 1));
        assert!(collision_law_holds_pairwise(6, 2).unwrap());
    }

    #[test]
    fn monte_carlo_is_close() {
        let est = collision_probability(8, 4, CollisionMode::MonteCarlo { seed: 3, trials: 20_000 }).unwrap();
        assert!((est.value - 3.0 / 7.0).abs() < 0.02);
    }

    #[test]
    fn collision_rejects_bad_inputs() {
        assert!(collision_probability(5, 2, CollisionMode::Exact).is_err());
        assert!(collision_probability(8, 2, CollisionMode::Exact).is_err());
    }

    #[test]
    fn padding_and_partition() {
        let b = Binning::with_block_size(5, 2, 11).unwrap();
        assert_eq!((b.padded_len(), b.padding(), b.blocks), (6, 1, 3));
        let mut seen: Vec<usize> = b.members_all().concat();
        seen.sort();
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
        for x in 0..6 {
            let (m, n) = b.slot(x);
            assert_eq!(b.members(m)[n], x);
        }
    }

    #[test]
    fn block_size_formula() {
        // Product cq state: I_H = log 1/(1-ε) is tiny, N clamps to one.
        assert_eq!(block_size_for((1.0f64 / 0.99).log2(), 0.01, 16), 1);
        // Uniform perfectly correlated 768 symbols at ε = 1/4: I_H = 10.
        let i_h = 768f64.log2() - 0.75f64.log2();
        assert_eq!(block_size_for(i_h, 0.25, 768), 64);
        assert_eq!(block_size_for(40.0, 0.5, 10), 10);
    }

    #[test]
    fn correlated_six_bits() {
        // Oracle: for uniform perfectly correlated symbols the optimal test
        // keeps the diagonal with weight (1 − ε), so β = (1 − ε)/64.
        let k = 64;
        let joint: Vec<Vec<f64>> =
            (0..k).map(|x| (0..k).map(|b| if x == b { 1.0 / k as f64 } else { 0.0 }).collect()).collect();
        let cq = CqState::classical(&joint).unwrap();
        let b = make_binning(&cq, 0.25, 1).unwrap();
        let want_ih = 6.0 + (4.0f64 / 3.0).log2();
        assert!((b.i_h - want_ih).abs() < 1e-9);
        // 2^{I_H − 4} = 5.33…, so N = 5 and 64 symbols pad to 65.
        assert_eq!((b.block_size, b.blocks, b.padding()), (5, 13, 1));
    }
}
