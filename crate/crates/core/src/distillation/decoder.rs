//! Bob's sequential decoder inside each block.
//!
//! For block `m` with members `a_0, …, a_{N−1}` Bob applies the projectors
//! `Π_{a_0}, Π_{a_1}, …` in turn and stops at the first acceptance. Outcome
//! `ℓ` has the effect `Θ_ℓ = Q_ℓ†Q_ℓ` with
//! `Q_ℓ = Π_{a_ℓ}(I − Π_{a_{ℓ−1}})⋯(I − Π_{a_0})`, and the abort element is
//! `⊥ = I − Σ_ℓ Θ_ℓ`.

use serde::Serialize;

use super::binning::Binning;
use crate::entropy::CqState;
use crate::operator::{c, left_polar, Block};
use crate::{Error, Result};

/// Tolerance on `Θ ≥ 0` and `⊥ ≥ 0`.
const PSD_SLACK: f64 = 1e-8;

/// Decoding POVMs for every block.
#[derive(Clone, Debug)]
pub struct SequentialDecoder {
    /// `theta[m][n] = Θ_n(m)`.
    pub theta: Vec<Vec<Block>>,
    /// `abort[m] = ⊥(m)`.
    pub abort: Vec<Block>,
    /// Left polar factors: `Q_n(m) = polar[m][n] · √Θ_n(m)`.
    pub polar: Vec<Vec<Block>>,
    /// Products `Q_n(m)` themselves.
    pub sequential: Vec<Vec<Block>>,
}

impl SequentialDecoder {
    pub fn blocks(&self) -> usize {
        self.theta.len()
    }

    pub fn block_size(&self) -> usize {
        self.theta.first().map_or(0, Vec::len)
    }

    /// `Θ′_n(m)`: the abort element folded into outcome `n = 0` so the
    /// family sums to the identity.
    pub fn completed(&self, m: usize) -> Vec<Block> {
        let mut out = self.theta[m].clone();
        out[0] = out[0].add(&self.abort[m]);
        out
    }
}

fn polar_block(q: &Block) -> Block {
    match q {
        Block::Diagonal(v) => Block::Diagonal(v.iter().map(|x| if *x < 0.0 { -1.0 } else { 1.0 }).collect()),
        Block::Dense(m) => Block::Dense(left_polar(m)),
    }
}

/// Builds `Θ_n(m)`, `⊥(m)` and the polar factors from per-label test
/// projectors `Π_x` (one per genuine symbol of `binning`). Padding symbols
/// use the zero projector, so their mass goes to `⊥`.
pub fn build_decoders(cq: &CqState, binning: &Binning, projectors: &[Block]) -> Result<SequentialDecoder> {
    if projectors.len() != cq.len() || binning.source_len != cq.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} projectors, {} symbols, binning over {}",
            projectors.len(),
            cq.len(),
            binning.source_len
        )));
    }
    build_from_projectors(binning, projectors)
}

pub(crate) fn build_from_projectors(binning: &Binning, projectors: &[Block]) -> Result<SequentialDecoder> {
    let template = projectors
        .first()
        .ok_or_else(|| Error::InvalidParameter("no projectors".into()))?;
    let zero = template.zeros_like();
    let id = template.identity_like();
    let mut theta = Vec::with_capacity(binning.blocks);
    let mut abort = Vec::with_capacity(binning.blocks);
    let mut polar = Vec::with_capacity(binning.blocks);
    let mut sequential = Vec::with_capacity(binning.blocks);
    for members in binning.members_all() {
        // Running product (I − Π_{a_{ℓ−1}})⋯(I − Π_{a_0}).
        let mut miss = id.clone();
        let mut sum = zero.clone();
        let mut th = Vec::with_capacity(members.len());
        let mut pol = Vec::with_capacity(members.len());
        let mut seq = Vec::with_capacity(members.len());
        for &x in &members {
            let pi = if binning.is_padding(x) { &zero } else { &projectors[x] };
            let q = pi.mul(&miss);
            let t = q.adjoint().mul(&q);
            let t = hermitian_block(&t);
            sum = sum.add(&t);
            pol.push(polar_block(&q));
            miss = id.sub(pi).mul(&miss);
            seq.push(q);
            th.push(t);
        }
        let bot = hermitian_block(&id.sub(&sum));
        let low = bot.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if low < -PSD_SLACK {
            return Err(Error::NotPsd(low));
        }
        theta.push(th);
        abort.push(bot);
        polar.push(pol);
        sequential.push(seq);
    }
    Ok(SequentialDecoder { theta, abort, polar, sequential })
}

fn hermitian_block(b: &Block) -> Block {
    match b {
        Block::Diagonal(_) => b.clone(),
        Block::Dense(m) => Block::Dense((m + m.adjoint()) * c(0.5)),
    }
}

/// Exact decoding statistics of one binning.
#[derive(Clone, Debug, Serialize)]
pub struct DecodingReport {
    /// `Σ_x P(x) (1 − Tr[Θ_x ρ_x])`.
    pub avg_error: f64,
    /// `√(2ε) + ε`.
    pub bound: f64,
    /// Per symbol: `1 − Tr[Θ_x ρ_x]`.
    pub per_symbol: Vec<f64>,
    /// Per symbol: `Tr[(I − Π_x)ρ_x] + Σ_{i<ℓ} Tr[Π_{a_i} ρ_x]`.
    pub union_terms: Vec<f64>,
}

impl DecodingReport {
    /// Symbols violating `error ≤ 2√(union term)` (the non-commutative union
    /// bound with its factor 2).
    pub fn union_bound_violations(&self, slack: f64) -> Vec<usize> {
        (0..self.per_symbol.len())
            .filter(|&x| self.per_symbol[x] > 2.0 * self.union_terms[x].sqrt() + slack)
            .collect()
    }

    /// Symbols violating the sharper form `error ≤ √(union term)`.
    pub fn sharp_union_violations(&self, slack: f64) -> Vec<usize> {
        (0..self.per_symbol.len())
            .filter(|&x| self.per_symbol[x] > self.union_terms[x].sqrt() + slack)
            .collect()
    }
}

/// Exact simulation of the sequential measurement for every symbol of `cq`.
pub fn decoding_error(
    cq: &CqState,
    binning: &Binning,
    decoder: &SequentialDecoder,
    projectors: &[Block],
    eps: f64,
) -> Result<DecodingReport> {
    let diagonal = matches!(projectors.first(), Some(Block::Diagonal(_)));
    let states: Vec<Block> = cq
        .conditionals()
        .iter()
        .map(|r| {
            if diagonal {
                Block::Diagonal(r.diagonal_probs())
            } else {
                Block::Dense(r.matrix().clone())
            }
        })
        .collect();
    decoding_error_blocks(cq.probs(), &states, binning, decoder, projectors, eps)
}

pub(crate) fn decoding_error_blocks(
    probs: &[f64],
    states: &[Block],
    binning: &Binning,
    decoder: &SequentialDecoder,
    projectors: &[Block],
    eps: f64,
) -> Result<DecodingReport> {
    let k = probs.len();
    if states.len() != k || projectors.len() != k || binning.source_len != k {
        return Err(Error::DimensionMismatch("decoder inputs disagree on the alphabet".into()));
    }
    let members = binning.members_all();
    let mut per_symbol = vec![0.0; k];
    let mut union_terms = vec![0.0; k];
    let mut avg = 0.0;
    for x in 0..k {
        let (m, n) = binning.slot(x);
        let rho = &states[x];
        let success = decoder.theta[m][n].trace_with(rho);
        per_symbol[x] = (1.0 - success).max(0.0);
        let mut u = rho.trace() - projectors[x].trace_with(rho);
        for &a in &members[m][..n] {
            if !binning.is_padding(a) {
                u += projectors[a].trace_with(rho);
            }
        }
        union_terms[x] = u.max(0.0);
        avg += probs[x] * per_symbol[x];
    }
    Ok(DecodingReport { avg_error: avg, bound: (2.0 * eps).sqrt() + eps, per_symbol, union_terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::i_h_cq;
    use crate::operator::random::random_density_with;
    use crate::operator::{max_abs, CMatrix, DensityOperator, HilbertDims};

    #[test]
    fn single_symbol_blocks_use_the_projector() {
        let cq = CqState::classical(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let (_, proj) = i_h_cq(&cq, 0.2).unwrap();
        let b = Binning::with_block_size(2, 1, 0).unwrap();
        let dec = build_decoders(&cq, &b, &proj).unwrap();
        for x in 0..2 {
            let (m, n) = b.slot(x);
            assert_eq!(dec.theta[m][n], proj[x]);
        }
    }

    #[test]
    fn orthogonal_pure_conditionals_decode_perfectly() {
        let dims = HilbertDims::single("B", 2);
        let conds = vec![
            DensityOperator::diagonal(dims.clone(), &[1.0, 0.0]).unwrap(),
            DensityOperator::diagonal(dims, &[0.0, 1.0]).unwrap(),
        ];
        let cq = CqState::new(vec![0.5, 0.5], conds).unwrap();
        let (_, proj) = i_h_cq(&cq, 0.1).unwrap();
        let b = Binning::with_block_size(2, 2, 4).unwrap();
        let dec = build_decoders(&cq, &b, &proj).unwrap();
        let rep = decoding_error(&cq, &b, &dec, &proj, 0.1).unwrap();
        assert!(rep.avg_error < 1e-12);
    }

    #[test]
    fn random_quantum_blocks_are_sub_povms() {
        for seed in 0..100u64 {
            let dims = HilbertDims::single("B", 4);
            let conds: Vec<DensityOperator> =
                (0..4).map(|j| random_density_with(dims.clone(), 2, seed * 7 + j).unwrap()).collect();
            let cq = CqState::new(vec![0.25; 4], conds).unwrap();
            let (_, proj) = i_h_cq(&cq, 0.2).unwrap();
            let b = Binning::with_block_size(4, 2, seed).unwrap();
            let dec = build_decoders(&cq, &b, &proj).unwrap();
            for m in 0..b.blocks {
                let total = dec.completed(m).iter().fold(proj[0].zeros_like(), |acc, t| acc.add(t));
                assert!(max_abs(&(total.to_dense() - CMatrix::identity(4, 4))) < 1e-9);
                assert!(dec.abort[m].eigenvalues().iter().all(|&v| v > -1e-9));
                for n in 0..b.block_size {
                    let q = dec.sequential[m][n].to_dense();
                    let rebuilt = dec.polar[m][n].to_dense() * dec.theta[m][n].sqrt_psd().to_dense();
                    assert!(max_abs(&(q - rebuilt)) < 1e-7);
                }
            }
            let rep = decoding_error(&cq, &b, &dec, &proj, 0.2).unwrap();
            assert!(rep.union_bound_violations(1e-9).is_empty());
        }
    }
}
