use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use serde::Serialize;

use crate::{Error, Result};

/// Report encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// One experiment and its own parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Subcommand)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Entropic quantities of a density, cq, spectral or joint state. With a
    /// bipartite density and `--povm`, also the rate-expression terms.
    Entropy {
        #[arg(long)]
        povm: Option<PathBuf>,
    },
    /// Optimal Neyman–Pearson test of `--state` against `--sigma`.
    NpTest {
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Single-party purity concentration.
    Concentrate,
    /// One-way distillation. A `joint` state file runs the diagonal fast
    /// path; a bipartite density uses `--povm` (default: computational basis
    /// on the first subsystem).
    Distill {
        #[arg(long)]
        povm: Option<PathBuf>,
    },
    /// Per-copy smoothed max-entropies of `ρ^{⊗n}` for `n = 1..=n_max`.
    AepSweep {
        #[arg(long, default_value_t = 30)]
        n_max: usize,
    },
    /// Collision rate of the random binning of `--domain` symbols into
    /// `--blocks` equal blocks.
    Collision {
        #[arg(long)]
        domain: usize,
        #[arg(long)]
        blocks: usize,
        /// Enumerate every permutation (domain ≤ 7) instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Entropy { .. } => "entropy",
            Command::NpTest { .. } => "np-test",
            Command::Concentrate => "concentrate",
            Command::Distill { .. } => "distill",
            Command::AepSweep { .. } => "aep-sweep",
            Command::Collision { .. } => "collision",
        }
    }

    pub fn needs_state(&self) -> bool {
        !matches!(self, Command::Collision { .. })
    }
}

/// Everything that determines a report. Output location and thread count
/// are not serialized: they never change the numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub state: Option<PathBuf>,
    pub eps: f64,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { command, state: None, eps: 0.1, seed: 0, format: Format::Json, threads: None, out: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!("--eps {} must lie in [0, 1)", self.eps)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        Ok(())
    }
}
