//! Command-line driver.
//!
//! Exit codes: `0` success, `1` the computation or an input file failed
//! validation, `2` the command line itself was malformed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::{json, Value};

use super::config::{Command, Format, RunConfig};
use super::report::{Number, Report};
use super::state_file::{ingest, StateInput};
use crate::concentration::run_concentration;
use crate::distillation::{collision_probability, run_distillation, run_distillation_diagonal, CollisionMode};
use crate::entropy::{
    aep_sweep, aep_sweep_spectrum, h_max, h_min_cond_cq, i_h, i_h_cq, i_max, i_max_mod_cq, neyman_pearson,
    shannon, tail_entropies, tail_entropies_multiset, tail_entropies_probs, distillation_rate_terms, von_neumann,
    BoundKind, CqState, EntropyReport,
};
use crate::operator::{HilbertDims, RankOnePovm, SpectralMultiset};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "purity", version, about = "Purity concentration and one-way distillation experiments")]
struct Cli {
    /// Input state file (JSON, schema 1).
    #[arg(long, global = true)]
    state: Option<PathBuf>,
    /// Smoothing parameter in [0, 1).
    #[arg(long, global = true, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for parallel sweeps (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            command: c.command,
            state: c.state,
            eps: c.eps,
            seed: c.seed,
            format: c.format,
            threads: c.threads,
            out: c.out,
        }
    }
}

fn load(path: &Path) -> Result<StateInput> {
    ingest(path)
}

fn load_povm(path: &Path) -> Result<RankOnePovm> {
    match load(path)? {
        StateInput::Povm(p) => Ok(p),
        other => Err(Error::InvalidParameter(format!("{} holds a {} state, not a POVM", path.display(), other.kind()))),
    }
}

fn to_value(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn entropy_of_spectrum(r: &mut EntropyReport, values: &[f64], eps: f64) -> Result<()> {
    r.insert("von_neumann", shannon(values)?, BoundKind::Exact);
    let t = tail_entropies_probs(values, eps)?;
    r.insert("h_max_tilde", t.tilde, BoundKind::Exact);
    r.insert("h_max_prime", t.prime, BoundKind::Exact);
    r.insert("h_max_smooth", t.smooth_ub, BoundKind::UpperBound);
    Ok(())
}

fn cq_entropies(r: &mut EntropyReport, cq: &CqState, eps: f64) -> Result<()> {
    r.insert("h_min_X_given_B", h_min_cond_cq(cq)?, BoundKind::Exact);
    r.insert("i_h_X_B", i_h_cq(cq, eps)?.0, BoundKind::Exact);
    r.insert("i_max_mod_X_B", i_max_mod_cq(cq)?.0, BoundKind::UpperBound);
    Ok(())
}

fn entropy_command(config: &RunConfig, state: StateInput, povm: Option<&Path>) -> Result<Value> {
    let eps = config.eps;
    let mut r = EntropyReport::default();
    match state {
        StateInput::Density(rho) => {
            r.insert("von_neumann", von_neumann(&rho)?, BoundKind::Exact);
            r.insert("h_max", h_max(&rho), BoundKind::Exact);
            let t = tail_entropies(&rho, eps)?;
            r.insert("h_max_tilde", t.tilde, BoundKind::Exact);
            r.insert("h_max_prime", t.prime, BoundKind::Exact);
            r.insert("h_max_smooth", t.smooth_ub, BoundKind::UpperBound);
            if rho.dims().len() >= 2 {
                r.insert("i_max_A_B", i_max(&rho)?, BoundKind::Exact);
                r.insert("i_h_A_B", i_h(&rho, eps)?, BoundKind::Exact);
                if let Some(p) = povm {
                    let terms = distillation_rate_terms(&rho, &load_povm(p)?, eps)?;
                    return Ok(json!({"quantities": to_value(&r), "rate_terms": to_value(&terms)}));
                }
            }
        }
        StateInput::Cq(cq) => cq_entropies(&mut r, &cq, eps)?,
        StateInput::Joint(joint) => {
            let p_x: Vec<f64> = joint.iter().map(|row| row.iter().sum()).collect();
            entropy_of_spectrum(&mut r, &p_x, eps)?;
            cq_entropies(&mut r, &CqState::classical(&joint)?, eps)?;
        }
        StateInput::Spectral(ms) => {
            r.insert("von_neumann", ms.entropy(), BoundKind::Exact);
            let t = tail_entropies_multiset(&ms, eps)?;
            r.insert("h_max_tilde", t.tilde, BoundKind::Exact);
            r.insert("h_max_prime", t.prime, BoundKind::Exact);
            r.insert("h_max_smooth", t.smooth_ub, BoundKind::UpperBound);
        }
        StateInput::Povm(_) => return Err(Error::InvalidParameter("entropy needs a state, not a POVM".into())),
    }
    Ok(json!({"quantities": to_value(&r)}))
}

fn np_command(config: &RunConfig, state: StateInput, sigma: &Path) -> Result<Value> {
    let (StateInput::Density(rho), StateInput::Density(sigma)) = (state, load(sigma)?) else {
        return Err(Error::InvalidParameter("np-test compares two density files".into()));
    };
    let t = neyman_pearson(&rho, &sigma, config.eps)?;
    Ok(json!({
        "alpha": Number(t.alpha),
        "beta": Number(t.beta),
        "dual_value": Number(t.dual_value),
        "duality_gap": Number(t.duality_gap()),
        "threshold": Number(t.threshold),
        "boundary_weight": Number(t.boundary_weight),
        "d_h": Number(t.value()),
    }))
}

fn concentrate_command(config: &RunConfig, state: StateInput) -> Result<Value> {
    match state {
        StateInput::Density(rho) => Ok(to_value(&run_concentration(&rho, config.eps)?)),
        StateInput::Spectral(ms) => {
            let t = tail_entropies_multiset(&ms, config.eps)?;
            let log_d = crate::operator::log2_biguint(&ms.count());
            Ok(json!({
                "rate_bits": Number(log_d - t.tilde),
                "ancilla_bits": Number(t.tilde),
                "gross_bits": Number(log_d),
                "distance_bound": Number(3.0 * config.eps.sqrt()),
                "eps_used": Number(config.eps),
            }))
        }
        other => Err(Error::InvalidParameter(format!("concentrate needs a density or spectral file, got {}", other.kind()))),
    }
}

fn distill_command(config: &RunConfig, state: StateInput, povm: Option<&Path>) -> Result<Value> {
    let report = match state {
        StateInput::Joint(joint) => run_distillation_diagonal(&joint, config.eps, config.seed)?,
        StateInput::Density(rho) => {
            let povm = match povm {
                Some(p) => load_povm(p)?,
                None => {
                    let (label, d) = rho.dims().parts()[0].clone();
                    RankOnePovm::computational_basis(HilbertDims::single(&label, d))
                }
            };
            run_distillation(&rho, &povm, config.eps, config.seed)?
        }
        other => return Err(Error::InvalidParameter(format!("distill needs a density or joint file, got {}", other.kind()))),
    };
    Ok(to_value(&report))
}

fn aep_command(config: &RunConfig, state: StateInput, n_max: usize) -> Result<Value> {
    let (points, entropy) = match state {
        StateInput::Density(rho) => {
            let h = von_neumann(&rho)?;
            (aep_sweep(&rho, config.eps, n_max)?, h)
        }
        StateInput::Spectral(ms) => {
            let h = ms.entropy();
            (aep_sweep_spectrum(&ms, config.eps, n_max)?, h)
        }
        StateInput::Joint(joint) => {
            let p: Vec<f64> = joint.into_iter().flatten().collect();
            let ms = SpectralMultiset::from_eigenvalues(&p)?;
            (aep_sweep_spectrum(&ms, config.eps, n_max)?, ms.entropy())
        }
        other => return Err(Error::InvalidParameter(format!("aep-sweep needs a spectrum, got {}", other.kind()))),
    };
    Ok(json!({"entropy": Number(entropy), "rows": to_value(&points)}))
}

fn collision_command(config: &RunConfig, domain: usize, blocks: usize, exact: bool, trials: usize) -> Result<Value> {
    if blocks == 0 || !domain.is_multiple_of(blocks) {
        return Err(Error::InvalidParameter(format!("{blocks} blocks do not divide a domain of {domain}")));
    }
    let n_block = domain / blocks;
    let mode = if exact { CollisionMode::Exact } else { CollisionMode::MonteCarlo { seed: config.seed, trials } };
    let est = collision_probability(domain, n_block, mode)?;
    let law = (n_block as f64 - 1.0) / (domain as f64 - 1.0);
    Ok(json!({
        "domain": domain,
        "blocks": blocks,
        "block_size": n_block,
        "value": Number(est.value),
        "exact": est.exact.map(|q| q.to_string()),
        "law": Number(law),
        "law_exact": format!("{}/{}", n_block - 1, domain - 1),
        "samples": est.samples,
    }))
}

/// Runs one configured experiment and returns its report.
pub fn run_subcommand(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let state = match (&config.state, config.command.needs_state()) {
        (Some(p), true) => Some(load(p)?),
        (None, true) => return Err(Error::InvalidParameter(format!("{} needs --state", config.command.name()))),
        _ => None,
    };
    let compute = || -> Result<Value> {
        match (&config.command, state) {
            (Command::Entropy { povm }, Some(s)) => entropy_command(config, s, povm.as_deref()),
            (Command::NpTest { sigma }, Some(s)) => np_command(config, s, sigma),
            (Command::Concentrate, Some(s)) => concentrate_command(config, s),
            (Command::Distill { povm }, Some(s)) => distill_command(config, s, povm.as_deref()),
            (Command::AepSweep { n_max }, Some(s)) => aep_command(config, s, *n_max),
            (Command::Collision { domain, blocks, exact, trials }, _) => {
                collision_command(config, *domain, *blocks, *exact, *trials)
            }
            _ => unreachable!("state presence checked above"),
        }
    };
    let result = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(compute)?,
        None => compute()?,
    };
    Ok(Report::new(config.command.name(), config, result))
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `--out` or `stdout`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
                return EXIT_OK;
            }
            let _ = write!(stderr, "{text}");
            return EXIT_USAGE;
        }
    };
    let config = RunConfig::from(cli);
    if config.command.needs_state() && config.state.is_none() {
        let _ = writeln!(stderr, "error: `{}` requires --state <path>", config.command.name());
        return EXIT_USAGE;
    }
    let report = match run_subcommand(&config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_DOMAIN;
        }
    };
    let text = match config.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_DOMAIN;
    }
    EXIT_OK
}
