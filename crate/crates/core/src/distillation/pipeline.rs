//! End-to-end one-way distillation on an explicit bipartite state.
//!
//! Stages, in order:
//!
//! 1. Alice purifies, measures `A` coherently with the caller's rank-one POVM
//!    and resets `A` to `|0⟩` with a controlled Householder relabeling.
//! 2. The classical register `X` is dephased and concentrated: the good set
//!    `S` sits in `X_g` with `X_p = 0`.
//! 3. `X_g` is sent through the dephasing channel, split by a permutation
//!    binning into a block index `M` and an in-block index `N`.
//! 4. Bob applies `W` on `M ⊗ N ⊗ B`, which moves the decoded `N` to `|0⟩`.
//! 5. Bob concentrates what is left on `M ⊗ B`.
//!
//! The report carries a purity ledger, every stage error next to its bound,
//! and the exact distance of the pure registers from `|0…0⟩`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::binning::{binning_from_i_h, Binning};
use super::bob::{bob_unitary, BobUnitary};
use super::decoder::{build_decoders, decoding_error, DecodingReport, SequentialDecoder};
use super::protocol::{coherent_measure, householder_to_zero, prune_good_set, AliceRelabel};
use crate::concentration::{concentration_map, distance_to_vacuum, run_concentration};
use crate::entropy::{check_eps, i_h_cq_test, marginal, CqState};
use crate::operator::random::rng;
use crate::operator::{
    c, purify, reduced_from_vector, trace_norm_hermitian, CMatrix, CVector, DensityOperator, HermitianOperator,
    HilbertDims, RankOnePovm,
};
use crate::{Error, Result};

/// Permutations tried before giving up on the decoding bound.
pub const MAX_ATTEMPTS: usize = 64;

/// A measured error and the bound it is held to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub measured: f64,
    pub bound: f64,
}

impl Stage {
    pub fn holds(&self, slack: f64) -> bool {
        self.measured <= self.bound + slack
    }
}

/// Purity bookkeeping in bits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityLedger {
    /// `log₂|X|`, the register for the coherent measurement.
    pub x_ancilla_bits: f64,
    /// `log₂|S|`, Alice's concentration ancilla.
    pub alice_ancilla_bits: f64,
    /// Bob's concentration ancilla on `M ⊗ B`.
    pub bob_ancilla_bits: f64,
    pub borrowed_bits: f64,
    /// `log₂ d_A + log₂|X|` (the reset `A` and `X_p`).
    pub alice_gross_bits: f64,
    /// `log₂ N`.
    pub bob_intra_bin_bits: f64,
    /// `log₂(M d_B)`.
    pub bob_local_gross_bits: f64,
    pub gross_bits: f64,
    pub alice_net_bits: f64,
    pub bob_net_bits: f64,
    pub net_bits: f64,
    /// `log₂(M N)`.
    pub communication_bits: f64,
    pub log2_good_set: f64,
    pub log2_alphabet: f64,
    pub blocks: usize,
    pub block_size: usize,
    pub padding: usize,
}

pub(crate) struct LedgerInputs {
    pub d_a: usize,
    pub alphabet: usize,
    pub good: usize,
    pub blocks: usize,
    pub block_size: usize,
    pub padding: usize,
    pub d_b: usize,
    pub bob_rank: usize,
}

impl PurityLedger {
    pub(crate) fn new(v: &LedgerInputs) -> Self {
        let lg = |n: usize| (n as f64).log2();
        let x_ancilla_bits = lg(v.alphabet);
        let alice_ancilla_bits = lg(v.good);
        let bob_ancilla_bits = lg(v.bob_rank);
        let alice_gross_bits = lg(v.d_a) + lg(v.alphabet);
        let bob_intra_bin_bits = lg(v.block_size);
        let bob_local_gross_bits = lg(v.blocks * v.d_b);
        let borrowed_bits = x_ancilla_bits + alice_ancilla_bits + bob_ancilla_bits;
        let gross_bits = alice_gross_bits + bob_intra_bin_bits + bob_local_gross_bits;
        Self {
            x_ancilla_bits,
            alice_ancilla_bits,
            bob_ancilla_bits,
            borrowed_bits,
            alice_gross_bits,
            bob_intra_bin_bits,
            bob_local_gross_bits,
            gross_bits,
            alice_net_bits: alice_gross_bits - x_ancilla_bits - alice_ancilla_bits,
            bob_net_bits: bob_intra_bin_bits + bob_local_gross_bits - bob_ancilla_bits,
            net_bits: gross_bits - borrowed_bits,
            communication_bits: lg(v.blocks * v.block_size),
            log2_good_set: lg(v.good),
            log2_alphabet: lg(v.alphabet),
            blocks: v.blocks,
            block_size: v.block_size,
            padding: v.padding,
        }
    }

    /// `gross − borrowed − net`; zero up to rounding.
    pub fn imbalance(&self) -> f64 {
        self.gross_bits - self.borrowed_bits - self.net_bits
    }
}

/// Stage-by-stage errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageErrors {
    /// Weight of the post-relabel state outside `A = |0⟩`.
    pub relabel_residual: f64,
    /// `‖X_p − |0⟩⟨0|‖₁` against `3√ε`.
    pub alice_concentration: Stage,
    /// Average sequential-decoding error against `√(2ε) + ε`.
    pub decoding: Stage,
    /// `‖Tr_{MB}[W σ W†] − |0⟩⟨0|^N‖₁` against `2√ε′`.
    pub n_register: Stage,
    /// `‖Tr_{MN}[W σ W†] − Σ P ρ‖₁` against `2ε′`.
    pub b_disturbance: Stage,
    /// `‖(MB)_p − |0⟩⟨0|‖₁` against `3√ε`.
    pub bob_concentration: Stage,
    /// Symbols breaking `error ≤ 2√(union term)`.
    pub union_bound_violations: usize,
    /// Symbols breaking the sharper `error ≤ √(union term)`.
    pub sharp_union_violations: usize,
}

impl StageErrors {
    pub fn all_hold(&self, slack: f64) -> bool {
        [self.alice_concentration, self.decoding, self.n_register, self.b_disturbance, self.bob_concentration]
            .iter()
            .all(|s| s.holds(slack))
    }

    /// Sum of the bounds of the stages that act on the output registers.
    pub fn accumulated_bound(&self) -> f64 {
        self.alice_concentration.bound + self.n_register.bound + self.b_disturbance.bound + self.bob_concentration.bound
    }
}

/// Everything measured in one run.
#[derive(Clone, Debug, Serialize)]
pub struct DistillationReport {
    pub eps: f64,
    pub seed: u64,
    /// Seed of the binning that was kept.
    pub accepted_seed: u64,
    pub attempts: usize,
    /// `I_H^ε(X:B)` of the pruned cq state.
    pub i_h: f64,
    /// `Σ P ‖ρ − √Θ′ρ√Θ′‖₁` on the pruned state.
    pub eps_prime: f64,
    /// `2√(√(2ε) + ε) + 2ε`, the value `ε′` is bounded by on average over
    /// permutations.
    pub eps_prime_average_bound: f64,
    pub ledger: PurityLedger,
    pub stages: StageErrors,
    /// `‖Tr_{garbage}[final] − |0⟩⟨0|^{A_p} ⊗ |0⟩⟨0|^{B_p}‖₁`.
    pub final_distance: f64,
    pub accumulated_bound: f64,
    /// Rate of concentrating `A` and `B` separately, without communication.
    pub local_only_bits: f64,
    #[serde(skip)]
    pub binning: Binning,
}

/// Derived seeds: the caller's seed first, then a seeded stream.
pub fn attempt_seeds(seed: u64) -> Vec<u64> {
    let mut r = rng(seed ^ 0x5eed_0f_b1_22_1d);
    std::iter::once(seed).chain((1..MAX_ATTEMPTS).map(|_| r.random::<u64>())).collect()
}

pub(crate) struct Selected<D> {
    pub binning: Binning,
    pub decoder: D,
    pub decoding: DecodingReport,
    pub attempts: usize,
}

/// Tries binnings until the average decoding error meets its bound.
pub(crate) fn select_binning<D>(
    seed: u64,
    mut attempt: impl FnMut(u64) -> Result<(Binning, D, DecodingReport)>,
) -> Result<Selected<D>> {
    let mut best: Option<(u64, f64, f64)> = None;
    for (k, s) in attempt_seeds(seed).into_iter().enumerate() {
        let (binning, decoder, decoding) = attempt(s)?;
        if decoding.avg_error <= decoding.bound {
            return Ok(Selected { binning, decoder, decoding, attempts: k + 1 });
        }
        if best.is_none_or(|(_, e, _)| decoding.avg_error < e) {
            best = Some((s, decoding.avg_error, decoding.bound));
        }
    }
    let (best_seed, best_error, bound) = best.expect("at least one attempt");
    Err(Error::RetryExhausted { attempts: MAX_ATTEMPTS, best_seed, best_error, bound })
}

/// The `(X:B)` cq state left after steps 1–2, with `R` traced out, and the
/// weight that leaked out of `A = |0⟩`.
pub fn alice_local_stage(rho_ab: &DensityOperator, povm: &RankOnePovm) -> Result<(CqState, f64)> {
    let dims = rho_ab.dims();
    let labels: Vec<&str> = dims.labels().collect();
    let (a, b_labels) = (labels[0], &labels[1..]);
    let d_a = dims.dim_of(a)?;
    let phi = purify(rho_ab)?;
    let measured = coherent_measure(&phi, povm, a)?;
    let total = phi.dim();
    let (split, _, rest) = phi.dims().split_indices(&[a])?;
    let rest_labels: Vec<&str> = phi.dims().labels().filter(|l| *l != a).collect();
    let rest_dims = phi.dims().restrict(&rest_labels)?;
    let b_dims = dims.restrict(b_labels)?;
    let amps = measured.amplitudes();
    let mut probs = Vec::with_capacity(povm.len());
    let mut conds = Vec::with_capacity(povm.len());
    let mut leaked = 0.0;
    for (x, (w, psi)) in povm.elements().enumerate() {
        let mut block = CMatrix::zeros(d_a, rest);
        for (full, &(ai, ri)) in split.iter().enumerate() {
            block[(ai, ri)] = amps[x * total + full];
        }
        let u = if w > 0.0 { householder_to_zero(psi) } else { CMatrix::identity(d_a, d_a) };
        let reset = u * block;
        leaked += reset.rows(1, d_a - 1).norm_squared();
        let v: CVector = reset.row(0).transpose();
        let p = v.norm_squared();
        probs.push(p);
        let cond = if p > 1e-15 {
            let m = reduced_from_vector(&(v / c(p.sqrt())), &rest_dims, b_labels)?;
            DensityOperator::from_trusted(HermitianOperator::from_matrix_unchecked(b_dims.clone(), m))
        } else {
            DensityOperator::maximally_mixed(b_dims.clone())
        };
        conds.push(cond);
    }
    let s: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= s);
    Ok((CqState::with_labels(povm.labels().to_vec(), probs, conds)?, leaked))
}

fn trace_out_n(m: &CMatrix, n: usize, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for k in 0..n {
        out += m.view((k * d, k * d), (d, d));
    }
    out
}

fn trace_out_b(m: &CMatrix, n: usize, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (0..d).map(|b| m[(i * d + b, j * d + b)]).sum();
        }
    }
    out
}

/// Runs the protocol on `rho_ab` (first subsystem is Alice's `A`, the rest
/// is Bob's `B`) with `povm` on `A`.
pub fn run_distillation(rho_ab: &DensityOperator, povm: &RankOnePovm, eps: f64, seed: u64) -> Result<DistillationReport> {
    rho_ab.require_normalized()?;
    check_eps(eps)?;
    let dims = rho_ab.dims();
    if dims.len() < 2 {
        return Err(Error::InvalidDims(format!("{dims} is not bipartite")));
    }
    let labels: Vec<&str> = dims.labels().collect();
    let d_a = dims.dim_of(labels[0])?;
    let b_dims = dims.restrict(&labels[1..])?;
    let d_b = b_dims.total();

    let (cq_full, leaked) = alice_local_stage(rho_ab, povm)?;
    let k = cq_full.len();
    let alice = AliceRelabel::new(k, prune_good_set(cq_full.probs(), eps)?)?;
    let pruned = cq_full.restrict(&alice.good)?.renormalized()?;
    let r_a = alice.rank();
    let test = i_h_cq_test(&pruned, eps)?;
    let projectors = test.projectors;

    let selected = select_binning(seed, |s| {
        let binning = binning_from_i_h(test.value, r_a, eps, s)?;
        let decoder = build_decoders(&pruned, &binning, &projectors)?;
        let decoding = decoding_error(&pruned, &binning, &decoder, &projectors, eps)?;
        Ok((binning, decoder, decoding))
    })?;
    let binning = &selected.binning;
    let decoder: &SequentialDecoder = &selected.decoder;
    let bob = bob_unitary(decoder)?;
    let (n_sz, m_sz) = (binning.block_size, binning.blocks);
    let nb = n_sz * d_b;

    // Actual state per X_p value and block, then after W.
    let mut actual: BTreeMap<usize, Vec<CMatrix>> = BTreeMap::new();
    for x in 0..k {
        let p = cq_full.prob(x);
        if p <= 0.0 {
            continue;
        }
        let (g, xp) = alice.slots[x];
        let (m, n) = binning.slot(g);
        let blocks = actual.entry(xp).or_insert_with(|| vec![CMatrix::zeros(nb, nb); m_sz]);
        let mut view = blocks[m].view_mut((n * d_b, n * d_b), (d_b, d_b));
        view += cq_full.conditional(x).matrix() * c(p);
    }
    let conjugate = |w: &BobUnitary, blocks: &mut Vec<CMatrix>| {
        for (m, b) in blocks.iter_mut().enumerate() {
            *b = &w.blocks[m] * &*b * w.blocks[m].adjoint();
        }
    };
    for blocks in actual.values_mut() {
        conjugate(&bob, blocks);
    }

    // Ideal pruned state for the Corollary-type contracts.
    let mut ideal = vec![CMatrix::zeros(nb, nb); m_sz];
    let mut eps_prime = 0.0;
    for y in 0..r_a {
        let (m, n) = binning.slot(y);
        let rho = pruned.conditional(y).matrix();
        let mut view = ideal[m].view_mut((n * d_b, n * d_b), (d_b, d_b));
        view += rho * c(pruned.prob(y));
        let s = crate::operator::psd_sqrt(&decoder.completed(m)[n].to_dense());
        eps_prime += pruned.prob(y) * trace_norm_hermitian(&(rho - &s * rho * &s));
    }
    let mut before_b = CMatrix::zeros(d_b, d_b);
    for blk in &ideal {
        before_b += trace_out_n(blk, n_sz, d_b);
    }
    conjugate(&bob, &mut ideal);
    let mut n_reg = CMatrix::zeros(n_sz, n_sz);
    let mut after_b = CMatrix::zeros(d_b, d_b);
    for blk in &ideal {
        n_reg += trace_out_b(blk, n_sz, d_b);
        after_b += trace_out_n(blk, n_sz, d_b);
    }
    let n_register = Stage { measured: distance_to_vacuum(&n_reg), bound: 2.0 * eps_prime.sqrt() };
    let b_disturbance = Stage { measured: trace_norm_hermitian(&(after_b - before_b)), bound: 2.0 * eps_prime };

    // Bob's concentration on M ⊗ B.
    let mb = m_sz * d_b;
    let mut tau = CMatrix::zeros(mb, mb);
    for blocks in actual.values() {
        for (m, blk) in blocks.iter().enumerate() {
            let mut view = tau.view_mut((m * d_b, m * d_b), (d_b, d_b));
            view += trace_out_n(blk, n_sz, d_b);
        }
    }
    let mb_dims = HilbertDims::single("M", m_sz).concat(&b_dims)?;
    let tau_state = DensityOperator::from_trusted(HermitianOperator::from_matrix_unchecked(mb_dims, tau)).normalize();
    let map = concentration_map(&tau_state, eps)?;
    let bob_stage = Stage {
        measured: distance_to_vacuum(&map.reduce_to_pure_part(tau_state.matrix(), 1)),
        bound: 3.0 * eps.sqrt(),
    };

    // Final pure registers: X_p, N and (MB)_p. Only X_p = 0 can contribute
    // to the vacuum component.
    let mut final_distance = 2.0 * leaked;
    for (&xp, blocks) in &actual {
        if xp != 0 {
            final_distance += blocks.iter().map(crate::operator::re_trace).sum::<f64>();
            continue;
        }
        // Reorder (m, n, b) into N ⊗ (M ⊗ B).
        let mut omega = CMatrix::zeros(n_sz * mb, n_sz * mb);
        for (m, blk) in blocks.iter().enumerate() {
            for n1 in 0..n_sz {
                for n2 in 0..n_sz {
                    let src = blk.view((n1 * d_b, n2 * d_b), (d_b, d_b));
                    omega.view_mut((n1 * mb + m * d_b, n2 * mb + m * d_b), (d_b, d_b)).copy_from(&src);
                }
            }
        }
        final_distance += distance_to_vacuum(&map.reduce_to_pure_part(&omega, n_sz));
    }
    let x_p_mass: f64 = (0..k).filter(|&x| alice.slots[x].1 != 0).map(|x| cq_full.prob(x)).sum();

    let stages = StageErrors {
        relabel_residual: leaked,
        alice_concentration: Stage { measured: 2.0 * x_p_mass, bound: 3.0 * eps.sqrt() },
        decoding: Stage { measured: selected.decoding.avg_error, bound: selected.decoding.bound },
        n_register,
        b_disturbance,
        bob_concentration: bob_stage,
        union_bound_violations: selected.decoding.union_bound_violations(1e-9).len(),
        sharp_union_violations: selected.decoding.sharp_union_violations(1e-9).len(),
    };
    let ledger = PurityLedger::new(&LedgerInputs {
        d_a,
        alphabet: k,
        good: r_a,
        blocks: m_sz,
        block_size: n_sz,
        padding: binning.padding(),
        d_b,
        bob_rank: map.rank,
    });
    let local_only_bits = {
        let ra = marginal(rho_ab, &labels[..1])?;
        let rb = marginal(rho_ab, &labels[1..])?;
        run_concentration(&ra.normalize(), eps)?.rate_bits + run_concentration(&rb.normalize(), eps)?.rate_bits
    };
    Ok(DistillationReport {
        eps,
        seed,
        accepted_seed: binning.seed,
        attempts: selected.attempts,
        i_h: test.value,
        eps_prime,
        eps_prime_average_bound: 2.0 * ((2.0 * eps).sqrt() + eps).sqrt() + 2.0 * eps,
        accumulated_bound: stages.accumulated_bound(),
        ledger,
        stages,
        final_distance,
        local_only_bits,
        binning: selected.binning,
    })
}
