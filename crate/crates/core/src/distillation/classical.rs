//! Distillation of a classical joint distribution `P(x, b)` measured in the
//! computational basis.
//!
//! Every operator in the dense pipeline is then diagonal in `b`, and Bob's
//! reflection `W(m)` splits into one real Householder reflection on `N` per
//! value of `b`. This path never forms an operator larger than `N × N`, so
//! it reaches alphabets far beyond the dense one while agreeing with it on
//! every reported number.

use std::collections::BTreeMap;

use super::binning::binning_from_i_h;
use super::bob::RANGE_TOL;
use super::decoder::{build_from_projectors, decoding_error_blocks};
use super::pipeline::{select_binning, DistillationReport, LedgerInputs, PurityLedger, Stage, StageErrors};
use super::protocol::{prune_good_set, AliceRelabel};
use crate::entropy::{check_eps, neyman_pearson_blocks, tail_entropies_probs, truncate_in_order};
use crate::operator::{c, trace_norm_hermitian, Block, CMatrix, DEGENERACY_GAP};
use crate::{Error, Result};

/// Descending order of `values` with the tie rule of the canonical
/// eigendecomposition: runs of values closer than [`DEGENERACY_GAP`] form one
/// group, listed by ascending index.
pub fn canonical_diagonal_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(order.len());
    let mut start = 0;
    for i in 1..=order.len() {
        if i == order.len() || values[order[i - 1]] - values[order[i]] >= DEGENERACY_GAP {
            let mut group = order[start..i].to_vec();
            group.sort_unstable();
            out.extend(group);
            start = i;
        }
    }
    out
}

/// `N × N` real symmetric accumulator, row-major.
struct Square {
    n: usize,
    data: Vec<f64>,
}

impl Square {
    fn new(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Adds `W diag(q) W` for `W = I − 2uuᵀ`, or `diag(q)` when `u` is `None`.
    fn add_reflected(&mut self, q: &[f64], u: Option<&[f64]>) {
        let n = self.n;
        let Some(u) = u else {
            for i in 0..n {
                self.data[i * n + i] += q[i];
            }
            return;
        };
        let du: Vec<f64> = (0..n).map(|i| q[i] * u[i]).collect();
        let s: f64 = (0..n).map(|i| u[i] * du[i]).sum();
        for i in 0..n {
            let row = &mut self.data[i * n..(i + 1) * n];
            row[i] += q[i];
            for j in 0..n {
                row[j] += -2.0 * (u[i] * du[j] + du[i] * u[j]) + 4.0 * s * u[i] * u[j];
            }
        }
    }

    fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    fn distance_to_vacuum(&self) -> f64 {
        let mut m = CMatrix::from_fn(self.n, self.n, |i, j| c(self.data[i * self.n + j]));
        m[(0, 0)] -= c(1.0);
        trace_norm_hermitian(&m)
    }
}

/// Unit vector `u` of the reflection sending `v = (√Θ′_n[b])_n` to `e_0`, or
/// `None` when `v` already is `e_0`.
fn reflection_axis(v: &[f64]) -> Option<Vec<f64>> {
    let mut z = v.to_vec();
    z[0] -= 1.0;
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > RANGE_TOL).then(|| z.iter().map(|x| x / norm).collect())
}

fn validate_joint(joint: &[Vec<f64>]) -> Result<usize> {
    let d_b = joint.first().map_or(0, Vec::len);
    if joint.is_empty() || d_b == 0 || joint.iter().any(|r| r.len() != d_b) {
        return Err(Error::InvalidDims("joint distribution must be a non-empty rectangle".into()));
    }
    if let Some(bad) = joint.iter().flatten().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidParameter(format!("probability {bad} is not a non-negative number")));
    }
    let total: f64 = joint.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    Ok(d_b)
}

/// Runs the protocol on `Σ P(x, b) |x⟩⟨x| ⊗ |b⟩⟨b|` with Alice measuring in
/// the computational basis.
pub fn run_distillation_diagonal(joint: &[Vec<f64>], eps: f64, seed: u64) -> Result<DistillationReport> {
    check_eps(eps)?;
    let d_b = validate_joint(joint)?;
    let d_a = joint.len();
    let total: f64 = joint.iter().flatten().sum();
    let probs: Vec<f64> = joint.iter().map(|r| r.iter().sum::<f64>() / total).collect();
    let conds: Vec<Vec<f64>> = joint
        .iter()
        .map(|r| {
            let s: f64 = r.iter().sum();
            if s > 0.0 {
                r.iter().map(|p| p / s).collect()
            } else {
                vec![1.0 / d_b as f64; d_b]
            }
        })
        .collect();

    let alice = AliceRelabel::new(d_a, prune_good_set(&probs, eps)?)?;
    let r_a = alice.rank();
    let kept_mass: f64 = alice.good.iter().map(|&x| probs[x]).sum();
    let py: Vec<f64> = alice.good.iter().map(|&x| probs[x] / kept_mass).collect();
    let states: Vec<Block> = alice.good.iter().map(|&x| Block::Diagonal(conds[x].clone())).collect();
    let avg: Vec<f64> = (0..d_b).map(|b| (0..r_a).map(|y| py[y] * conds[alice.good[y]][b]).sum()).collect();
    let pairs: Vec<(Block, Block)> = (0..r_a)
        .map(|y| (states[y].scale(py[y]), Block::Diagonal(avg.iter().map(|a| a * py[y]).collect())))
        .collect();
    let test = neyman_pearson_blocks(&pairs, eps)?;
    let i_h = test.value();
    let projectors = test.upper;

    let selected = select_binning(seed, |s| {
        let binning = binning_from_i_h(i_h, r_a, eps, s)?;
        let decoder = build_from_projectors(&binning, &projectors)?;
        let decoding = decoding_error_blocks(&py, &states, &binning, &decoder, &projectors, eps)?;
        Ok((binning, decoder, decoding))
    })?;
    let binning = &selected.binning;
    let (n_sz, m_sz) = (binning.block_size, binning.blocks);

    // √Θ′_n(m)[b], stored as sqrt_theta[m][b][n].
    let sqrt_theta: Vec<Vec<Vec<f64>>> = (0..m_sz)
        .map(|m| {
            let completed = selected.decoder.completed(m);
            let diag: Vec<Vec<f64>> = completed
                .iter()
                .map(|t| match t {
                    Block::Diagonal(v) => v.iter().map(|x| x.max(0.0).sqrt()).collect(),
                    Block::Dense(_) => unreachable!("diagonal projectors give diagonal decoders"),
                })
                .collect();
            (0..d_b).map(|b| (0..n_sz).map(|n| diag[n][b]).collect()).collect()
        })
        .collect();
    let axes: Vec<Vec<Option<Vec<f64>>>> =
        sqrt_theta.iter().map(|per_b| per_b.iter().map(|v| reflection_axis(v)).collect()).collect();

    // Actual and ideal N-register weights per (m, b).
    let mut actual: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut tau = vec![0.0; m_sz * d_b];
    let mut x_p_mass = 0.0;
    for x in 0..d_a {
        if probs[x] <= 0.0 {
            continue;
        }
        let (g, xp) = alice.slots[x];
        let (m, n) = binning.slot(g);
        for b in 0..d_b {
            let w = probs[x] * conds[x][b];
            tau[m * d_b + b] += w;
            if xp == 0 && w > 0.0 {
                actual.entry((m, b)).or_insert_with(|| vec![0.0; n_sz])[n] += w;
            }
        }
        if xp != 0 {
            x_p_mass += probs[x];
        }
    }
    let mut ideal: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut eps_prime = 0.0;
    for y in 0..r_a {
        let (m, n) = binning.slot(y);
        let rho = &conds[alice.good[y]];
        for b in 0..d_b {
            let w = py[y] * rho[b];
            if w > 0.0 {
                ideal.entry((m, b)).or_insert_with(|| vec![0.0; n_sz])[n] += w;
                let theta = sqrt_theta[m][b][n] * sqrt_theta[m][b][n];
                eps_prime += w * (1.0 - theta).abs();
            }
        }
    }

    let mut n_reg = Square::new(n_sz);
    let mut after_b = vec![0.0; d_b];
    for (&(m, b), q) in &ideal {
        let mut one = Square::new(n_sz);
        one.add_reflected(q, axes[m][b].as_deref());
        after_b[b] += one.trace();
        n_reg.add_reflected(q, axes[m][b].as_deref());
    }
    let b_shift: f64 = (0..d_b).map(|b| (after_b[b] - avg[b]).abs()).sum();

    // Bob's concentration on M ⊗ B.
    let order = canonical_diagonal_order(&tau);
    let truncation = truncate_in_order(&tau, &order, eps);
    let retained: Vec<bool> = (0..tau.len()).map(|k| truncation.kept[k] && tau[k] > 0.0).collect();
    let bob_rank = retained.iter().filter(|k| **k).count();
    if bob_rank == 0 {
        return Err(Error::Numerical("Bob's retained support is empty".into()));
    }
    let removed: f64 = (0..tau.len()).filter(|&k| !retained[k]).map(|k| tau[k]).sum();
    let tau_mass: f64 = tau.iter().sum();

    let mut omega = Square::new(n_sz);
    let mut final_distance = x_p_mass;
    for (&(m, b), q) in &actual {
        if retained[m * d_b + b] {
            omega.add_reflected(q, axes[m][b].as_deref());
        } else {
            final_distance += q.iter().sum::<f64>();
        }
    }
    final_distance += omega.distance_to_vacuum();

    let decoding = &selected.decoding;
    let stages = StageErrors {
        relabel_residual: 0.0,
        alice_concentration: Stage { measured: 2.0 * x_p_mass, bound: 3.0 * eps.sqrt() },
        decoding: Stage { measured: decoding.avg_error, bound: decoding.bound },
        n_register: Stage { measured: n_reg.distance_to_vacuum(), bound: 2.0 * eps_prime.sqrt() },
        b_disturbance: Stage { measured: b_shift, bound: 2.0 * eps_prime },
        bob_concentration: Stage { measured: 2.0 * removed / tau_mass, bound: 3.0 * eps.sqrt() },
        union_bound_violations: decoding.union_bound_violations(1e-9).len(),
        sharp_union_violations: decoding.sharp_union_violations(1e-9).len(),
    };
    let ledger = PurityLedger::new(&LedgerInputs {
        d_a,
        alphabet: d_a,
        good: r_a,
        blocks: m_sz,
        block_size: n_sz,
        padding: binning.padding(),
        d_b,
        bob_rank,
    });
    let p_b: Vec<f64> = (0..d_b).map(|b| joint.iter().map(|r| r[b]).sum::<f64>() / total).collect();
    let local_only_bits = (d_a as f64).log2() - tail_entropies_probs(&probs, eps)?.tilde + (d_b as f64).log2()
        - tail_entropies_probs(&p_b, eps)?.tilde;
    Ok(DistillationReport {
        eps,
        seed,
        accepted_seed: binning.seed,
        attempts: selected.attempts,
        i_h,
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
