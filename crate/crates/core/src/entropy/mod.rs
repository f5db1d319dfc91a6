//! One-shot entropic quantities.
//!
//! Everything is in bits. Smoothed max-entropies are computed from an
//! explicit truncation witness and are therefore upper bounds on their
//! fidelity-ball counterparts; hypothesis-testing quantities are exact.

mod aep;
mod basic;
mod cq;
mod hypothesis;
mod maxinfo;
mod report;
mod smoothing;

pub use aep::{aep_sweep, aep_sweep_spectrum, iid_power, AepPoint};
pub use basic::{h_max, relative_entropy, shannon, von_neumann};
pub use cq::{h_min_cond_cq, measure_cq, CqState};
pub use hypothesis::{
    d_h, i_h, i_h_cond_cq, i_h_cq, i_h_cq_test, neyman_pearson, neyman_pearson_blocks, CqTest,
    NeymanPearsonTest,
};
pub use maxinfo::{d_max, i_max, i_max_mod_commuting, i_max_mod_cq, i_max_mod_cq_full, ModifiedMaxInfo};
pub use report::{distillation_rate_terms, BoundKind, EntropyReport, Quantity};
pub use smoothing::{
    h_max_prime, h_max_smooth_ub, h_max_tilde, tail_entropies, tail_entropies_multiset, tail_entropies_probs,
    truncate_tail, truncate_tail_probs, truncate_values, TailEntropies, Truncation,
};

pub(crate) use cq::marginal;
pub(crate) use smoothing::{check_eps, truncate_eigen, truncate_in_order};
