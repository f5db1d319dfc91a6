//! One-way purity distillation from a bipartite state.
//!
//! The building blocks are public so they can be exercised one at a time:
//! [`protocol`] holds Alice's local steps, [`binning`] the random permutation
//! binning, [`decoder`] Bob's sequential decoder and [`bob`] its coherent
//! version. [`run_distillation`] chains them on a dense state and
//! [`run_distillation_diagonal`] does the same for classical joint
//! distributions without forming large matrices.

pub mod binning;
pub mod bob;
pub mod classical;
pub mod decoder;
pub mod expurgation;
pub mod pipeline;
pub mod protocol;

pub use binning::{
    block_size_for, collision_law_holds_pairwise, collision_probability, make_binning, Binning, CollisionEstimate,
    CollisionMode,
};
pub use bob::{bob_unitary, BobUnitary};
pub use classical::{canonical_diagonal_order, run_distillation_diagonal};
pub use decoder::{build_decoders, decoding_error, DecodingReport, SequentialDecoder};
pub use expurgation::{expurgate_pairs, ExpurgationResult};
pub use pipeline::{
    alice_local_stage, attempt_seeds, run_distillation, DistillationReport, PurityLedger, Stage, StageErrors,
    MAX_ATTEMPTS,
};
pub use protocol::{coherent_measure, householder_to_zero, prune_good_set, relabel_unitary, AliceRelabel};
