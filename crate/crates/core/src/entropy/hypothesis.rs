//! Exact quantum Neyman–Pearson tests over block-diagonal operator pairs.
//!
//! For `μ > 0` let `P(μ)` project onto the positive part of `μρ − σ`. The map
//! `μ ↦ Tr[P(μ)ρ]` is non-decreasing, so a bisection brackets the smallest
//! `μ*` with `Tr[P(μ*)ρ] ≥ 1 − ε`. The optimal test mixes the two bracketing
//! projectors so that the type-I constraint holds with equality. The dual
//! function `g(μ) = μ(1 − ε) − Tr(μρ − σ)₊` lower-bounds every feasible type-II
//! error and certifies optimality.

use super::cq::{marginal, CqState};
use super::smoothing::check_eps;
use crate::operator::{kron, Block, DensityOperator};
use crate::{Error, Result};

/// Relative threshold for the positive-eigenspace projector.
const POSITIVE_TOL: f64 = 1e-13;
/// Relative threshold for support and kernel projectors.
const SUPPORT_TOL: f64 = 1e-12;
const LOG_MU_RANGE: f64 = 200.0;

/// Optimal test for `D_H^ε(ρ‖σ)` on a block-diagonal pair.
#[derive(Clone, Debug)]
pub struct NeymanPearsonTest {
    /// `t = 1/μ*` in `{ρ − tσ > 0}`; zero when the test is the support projector.
    pub threshold: f64,
    /// Weight `γ` of the boundary eigenspace.
    pub boundary_weight: f64,
    /// `Tr[Λρ]`.
    pub alpha: f64,
    /// `Tr[Λσ]`.
    pub beta: f64,
    /// Best dual value `max_μ g(μ)`; a lower bound on the optimal `β`.
    pub dual_value: f64,
    /// Per-block projector excluding the boundary eigenspace.
    pub lower: Vec<Block>,
    /// Per-block projector including the boundary eigenspace.
    pub upper: Vec<Block>,
}

impl NeymanPearsonTest {
    /// `D_H^ε = −log₂ β` (`+∞` when `β = 0`).
    pub fn value(&self) -> f64 {
        if self.beta <= 0.0 {
            f64::INFINITY
        } else {
            -self.beta.log2()
        }
    }

    /// Test operator `Λ_b = (1 − γ) P_lo + γ P_hi` on block `b`.
    pub fn test_block(&self, b: usize) -> Block {
        let g = self.boundary_weight;
        self.lower[b].combine(1.0 - g, &self.upper[b], g)
    }

    /// `|β − dual|`, the optimality gap.
    pub fn duality_gap(&self) -> f64 {
        (self.beta - self.dual_value).abs()
    }
}

struct Evaluation {
    alpha: f64,
    positive_part: f64,
    projectors: Vec<Block>,
}

fn evaluate(pairs: &[(Block, Block)], mu: f64) -> Evaluation {
    let mut alpha = 0.0;
    let mut positive_part = 0.0;
    let mut projectors = Vec::with_capacity(pairs.len());
    for (rho, sigma) in pairs {
        let m = rho.combine(mu, sigma, -1.0);
        let p = match &m {
            Block::Diagonal(v) => {
                let (r, s) = match (rho, sigma) {
                    (Block::Diagonal(r), Block::Diagonal(s)) => (r, s),
                    _ => unreachable!("diagonal difference of diagonal blocks"),
                };
                positive_part += v.iter().filter(|x| **x > 0.0).sum::<f64>();
                Block::Diagonal(
                    v.iter()
                        .enumerate()
                        .map(|(i, &x)| if x > POSITIVE_TOL * (mu * r[i] + s[i]) { 1.0 } else { 0.0 })
                        .collect(),
                )
            }
            Block::Dense(_) => {
                let eig = m.eigenvalues();
                positive_part += eig.iter().filter(|x| **x > 0.0).sum::<f64>();
                let scale = mu * rho.trace() + sigma.trace();
                m.projector_above(POSITIVE_TOL * scale)
            }
        };
        alpha += p.trace_with(rho);
        projectors.push(p);
    }
    Evaluation { alpha, positive_part, projectors }
}

fn same_layout(pairs: &[(Block, Block)]) -> Result<()> {
    for (r, s) in pairs {
        if r.dim() != s.dim() || r.is_diagonal() != s.is_diagonal() {
            return Err(Error::DimensionMismatch("ρ and σ blocks differ in shape".into()));
        }
    }
    Ok(())
}

/// Neyman–Pearson test for `⊕_b ρ_b` against `⊕_b σ_b`.
pub fn neyman_pearson_blocks(pairs: &[(Block, Block)], eps: f64) -> Result<NeymanPearsonTest> {
    check_eps(eps)?;
    same_layout(pairs)?;
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("no blocks".into()));
    }
    let total: f64 = pairs.iter().map(|(r, _)| r.trace()).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let target = 1.0 - eps;

    // Perfect discrimination: the kernel of σ alone can carry the constraint.
    let kernels: Vec<Block> = pairs
        .iter()
        .map(|(_, s)| s.scale(-1.0).projector_above(-SUPPORT_TOL * s.trace().max(1e-300)))
        .collect();
    let kernel_mass: f64 = kernels.iter().zip(pairs).map(|(k, (r, _))| k.trace_with(r)).sum();
    if kernel_mass > 0.0 && kernel_mass >= target - 1e-12 {
        let gamma = (target / kernel_mass).min(1.0);
        let lower: Vec<Block> = kernels.iter().map(Block::zeros_like).collect();
        return Ok(NeymanPearsonTest {
            threshold: 0.0,
            boundary_weight: gamma,
            alpha: gamma * kernel_mass,
            beta: 0.0,
            dual_value: 0.0,
            lower,
            upper: kernels,
        });
    }

    if eps == 0.0 {
        return Ok(support_test(pairs));
    }

    // Bracket μ* on a log scale, then refine linearly.
    let mut lo = -LOG_MU_RANGE;
    let mut hi = LOG_MU_RANGE;
    if evaluate(pairs, hi.exp2()).alpha < target {
        return Ok(support_test(pairs));
    }
    while hi - lo > 1.0 {
        let mid = 0.5 * (lo + hi);
        if evaluate(pairs, mid.exp2()).alpha >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (mut mu_lo, mut mu_hi) = (lo.exp2(), hi.exp2());
    for _ in 0..200 {
        let mid = 0.5 * (mu_lo + mu_hi);
        if mid <= mu_lo || mid >= mu_hi || mu_hi - mu_lo <= 1e-15 * mu_hi {
            break;
        }
        if evaluate(pairs, mid).alpha >= target {
            mu_hi = mid;
        } else {
            mu_lo = mid;
        }
    }

    let e_lo = evaluate(pairs, mu_lo);
    let e_hi = evaluate(pairs, mu_hi);
    let gap = e_hi.alpha - e_lo.alpha;
    let gamma = if gap > 0.0 { ((target - e_lo.alpha) / gap).clamp(0.0, 1.0) } else { 1.0 };
    let beta_of = |ps: &[Block]| -> f64 { ps.iter().zip(pairs).map(|(p, (_, s))| p.trace_with(s)).sum() };
    let beta = ((1.0 - gamma) * beta_of(&e_lo.projectors) + gamma * beta_of(&e_hi.projectors)).max(0.0);
    let alpha = (1.0 - gamma) * e_lo.alpha + gamma * e_hi.alpha;
    let dual = |mu: f64, e: &Evaluation| mu * target - e.positive_part;
    let dual_value = dual(mu_lo, &e_lo).max(dual(mu_hi, &e_hi));
    Ok(NeymanPearsonTest {
        threshold: 1.0 / mu_hi,
        boundary_weight: gamma,
        alpha,
        beta,
        dual_value,
        lower: e_lo.projectors,
        upper: e_hi.projectors,
    })
}

/// `ε = 0`: the support projector of `ρ` is optimal.
fn support_test(pairs: &[(Block, Block)]) -> NeymanPearsonTest {
    let supports: Vec<Block> =
        pairs.iter().map(|(r, _)| r.projector_above(SUPPORT_TOL * r.trace().max(1e-300))).collect();
    let alpha = supports.iter().zip(pairs).map(|(p, (r, _))| p.trace_with(r)).sum();
    let beta = supports.iter().zip(pairs).map(|(p, (_, s))| p.trace_with(s)).sum::<f64>().max(0.0);
    let target = 1.0;
    // The dual supremum is approached as μ → ∞; scan moderate μ where
    // cancellation stays below 1e-9.
    let dual_value = (0..=24)
        .map(|k| {
            let mu = f64::from(k).exp2();
            mu * target - evaluate(pairs, mu).positive_part
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .min(beta);
    NeymanPearsonTest {
        threshold: 0.0,
        boundary_weight: 0.0,
        alpha,
        beta,
        dual_value,
        lower: supports.clone(),
        upper: supports,
    }
}

fn as_block(rho: &DensityOperator, diagonal: bool) -> Block {
    if diagonal {
        Block::Diagonal(rho.diagonal_probs())
    } else {
        Block::Dense(rho.matrix().clone())
    }
}

/// Neyman–Pearson test for a single pair.
pub fn neyman_pearson(rho: &DensityOperator, sigma: &DensityOperator, eps: f64) -> Result<NeymanPearsonTest> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dims(), sigma.dims())));
    }
    rho.require_normalized()?;
    let diagonal = rho.is_diagonal(0.0) && sigma.is_diagonal(0.0);
    neyman_pearson_blocks(&[(as_block(rho, diagonal), as_block(sigma, diagonal))], eps)
}

/// `D_H^ε(ρ‖σ)` in bits.
pub fn d_h(rho: &DensityOperator, sigma: &DensityOperator, eps: f64) -> Result<f64> {
    Ok(neyman_pearson(rho, sigma, eps)?.value())
}

/// `I_H^ε(A:B) = D_H^ε(ρ^{AB} ‖ ρ^A ⊗ ρ^B)`, with `A` the first subsystem.
pub fn i_h(rho_ab: &DensityOperator, eps: f64) -> Result<f64> {
    let (rho_a, rho_b) = bipartite_marginals(rho_ab)?;
    let prod = DensityOperator::from_trusted(crate::operator::HermitianOperator::from_matrix_unchecked(
        rho_ab.dims().clone(),
        kron(rho_a.matrix(), rho_b.matrix()),
    ));
    d_h(rho_ab, &prod, eps)
}

/// Marginals on the first subsystem and on the rest.
pub(crate) fn bipartite_marginals(rho_ab: &DensityOperator) -> Result<(DensityOperator, DensityOperator)> {
    let dims = rho_ab.dims();
    if dims.len() < 2 {
        return Err(Error::InvalidDims(format!("{dims} is not bipartite")));
    }
    let labels: Vec<&str> = dims.labels().collect();
    Ok((marginal(rho_ab, &labels[..1])?, marginal(rho_ab, &labels[1..])?))
}

/// Optimal cq-structured test for `I_H^ε(X:B)`.
#[derive(Clone, Debug)]
pub struct CqTest {
    pub value: f64,
    pub test: NeymanPearsonTest,
    /// Per-label projectors `Π_x` (boundary included); zero for labels of
    /// zero probability.
    pub projectors: Vec<Block>,
}

/// Block pairs `(p_x ρ_x, p_x ρ^B)` of a cq state, skipping empty labels.
fn cq_pairs(cq: &CqState, diagonal: bool) -> (Vec<(Block, Block)>, Vec<usize>) {
    let avg = cq.average();
    let avg_block = if diagonal {
        Block::Diagonal(avg.diagonal().iter().map(|z| z.re).collect())
    } else {
        Block::Dense(avg)
    };
    let mut pairs = Vec::new();
    let mut labels = Vec::new();
    for x in 0..cq.len() {
        let p = cq.prob(x);
        if p > 0.0 {
            pairs.push((as_block(cq.conditional(x), diagonal).scale(p), avg_block.scale(p)));
            labels.push(x);
        }
    }
    (pairs, labels)
}

/// `I_H^ε(X:B)` of a cq state and its per-label test projectors.
pub fn i_h_cq_test(cq: &CqState, eps: f64) -> Result<CqTest> {
    cq.require_normalized()?;
    let diagonal = cq.is_classical();
    let (pairs, labels) = cq_pairs(cq, diagonal);
    let test = neyman_pearson_blocks(&pairs, eps)?;
    let zero = if diagonal {
        Block::Diagonal(vec![0.0; cq.quantum_dim()])
    } else {
        Block::Dense(crate::operator::CMatrix::zeros(cq.quantum_dim(), cq.quantum_dim()))
    };
    let mut projectors = vec![zero; cq.len()];
    for (b, &x) in labels.iter().enumerate() {
        projectors[x] = test.upper[b].clone();
    }
    Ok(CqTest { value: test.value(), test, projectors })
}

/// `I_H^ε(X:B)` of a cq state with its per-label projectors.
pub fn i_h_cq(cq: &CqState, eps: f64) -> Result<(f64, Vec<Block>)> {
    let t = i_h_cq_test(cq, eps)?;
    Ok((t.value, t.projectors))
}

/// Conditional `I_H^ε(L:B|K)` for a family of cq states `σ^{LB}_k` with
/// weights `w_k`: the test runs between `⊕_{k,l} w_k p_k(l) ρ_{kl}` and
/// `⊕_{k,l} w_k p_k(l) ρ^B_k`.
pub fn i_h_cond_cq(family: &[CqState], weights: &[f64], eps: f64) -> Result<f64> {
    if family.len() != weights.len() || family.is_empty() {
        return Err(Error::DimensionMismatch(format!("{} blocks, {} weights", family.len(), weights.len())));
    }
    let d = family[0].quantum_dim();
    if family.iter().any(|f| f.quantum_dim() != d) {
        return Err(Error::DimensionMismatch("blocks act on different B systems".into()));
    }
    let wsum: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0) || (wsum - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter("weights must form a distribution".into()));
    }
    let diagonal = family.iter().all(CqState::is_classical);
    let mut pairs = Vec::new();
    for (cq, &w) in family.iter().zip(weights) {
        cq.require_normalized()?;
        if w <= 0.0 {
            continue;
        }
        let (block_pairs, _) = cq_pairs(cq, diagonal);
        pairs.extend(block_pairs.into_iter().map(|(r, s)| (r.scale(w), s.scale(w))));
    }
    Ok(neyman_pearson_blocks(&pairs, eps)?.value())
}
