//! JSON state files.
//!
//! Every file is an object with `"schema": 1` and a `"kind"`:
//!
//! | kind       | fields                                                        |
//! |------------|---------------------------------------------------------------|
//! | `density`  | `dims`, and either `matrix` (`[re, im]` entries) or `diagonal` |
//! | `cq`       | `dims`, `probs`, `conditionals` (matrices or `{"diagonal"}`), optional `labels` |
//! | `spectral` | `eigenvalues`, `multiplicities` (integers or decimal strings)  |
//! | `joint`    | `probs`: a rectangular table `P(x, b)`                         |
//! | `povm`     | `dims`, `elements`: `{weight, vector, label?}` rank-one terms  |
//!
//! `dims` is a list of `[label, dimension]` pairs. Syntax and type errors
//! carry serde's line and column; invariant failures name the line and JSON
//! path of the offending field.

use std::path::Path;

use num_bigint::BigUint;
use serde::de::{DeserializeOwned, IgnoredAny};
use serde::Deserialize;
use serde_json::json;

use crate::entropy::CqState;
use crate::operator::{
    CMatrix, CVector, DensityOperator, HilbertDims, RankOnePovm, SpectralMultiset, C64,
};
use crate::{Error, Result};

/// Schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A validated state file.
#[derive(Clone, Debug)]
pub enum StateInput {
    Density(DensityOperator),
    Cq(CqState),
    Spectral(SpectralMultiset),
    /// Classical joint distribution `P(x, b)`, rows indexed by `x`.
    Joint(Vec<Vec<f64>>),
    Povm(RankOnePovm),
}

impl StateInput {
    pub fn kind(&self) -> &'static str {
        match self {
            StateInput::Density(_) => "density",
            StateInput::Cq(_) => "cq",
            StateInput::Spectral(_) => "spectral",
            StateInput::Joint(_) => "joint",
            StateInput::Povm(_) => "povm",
        }
    }
}

type Entry = [f64; 2];

#[derive(Deserialize)]
struct Header {
    schema: u32,
    kind: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    #[serde(rename = "schema")]
    _schema: IgnoredAny,
    #[serde(rename = "kind")]
    _kind: IgnoredAny,
    dims: Vec<(String, usize)>,
    matrix: Option<Vec<Vec<Entry>>>,
    diagonal: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OperatorEntries {
    Matrix(Vec<Vec<Entry>>),
    Diagonal { diagonal: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CqFile {
    #[serde(rename = "schema")]
    _schema: IgnoredAny,
    #[serde(rename = "kind")]
    _kind: IgnoredAny,
    dims: Vec<(String, usize)>,
    probs: Vec<f64>,
    conditionals: Vec<OperatorEntries>,
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Multiplicity {
    Small(u64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralFile {
    #[serde(rename = "schema")]
    _schema: IgnoredAny,
    #[serde(rename = "kind")]
    _kind: IgnoredAny,
    eigenvalues: Vec<f64>,
    multiplicities: Vec<Multiplicity>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JointFile {
    #[serde(rename = "schema")]
    _schema: IgnoredAny,
    #[serde(rename = "kind")]
    _kind: IgnoredAny,
    probs: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmElement {
    weight: f64,
    vector: Vec<Entry>,
    label: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmFile {
    #[serde(rename = "schema")]
    _schema: IgnoredAny,
    #[serde(rename = "kind")]
    _kind: IgnoredAny,
    dims: Vec<(String, usize)>,
    elements: Vec<PovmElement>,
}

/// Builds errors anchored at `origin` and the line of a field.
struct Locator<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Locator<'_> {
    /// Line of the first occurrence of `"key"`, 1-based.
    fn line_of(&self, key: &str) -> usize {
        let needle = format!("\"{key}\"");
        self.text
            .find(&needle)
            .map_or(1, |pos| self.text[..pos].matches('\n').count() + 1)
    }

    fn at(&self, key: &str, path: &str, message: impl Into<String>) -> Error {
        Error::Schema { path: format!("{}:{} ({path})", self.origin, self.line_of(key)), message: message.into() }
    }

    fn wrap(&self, key: &str, path: &str) -> impl Fn(Error) -> Error + '_ {
        let key = key.to_string();
        let path = path.to_string();
        move |e| self.at(&key, &path, e.to_string())
    }

    fn parse<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_str(self.text).map_err(|e| Error::Schema {
            path: format!("{}:{}:{}", self.origin, e.line(), e.column()),
            message: e.to_string(),
        })
    }
}

fn dims_from(loc: &Locator, parts: Vec<(String, usize)>) -> Result<HilbertDims> {
    HilbertDims::new(parts).map_err(loc.wrap("dims", "$.dims"))
}

fn matrix_from(loc: &Locator, key: &str, path: &str, rows: &[Vec<Entry>], d: usize) -> Result<CMatrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(loc.at(key, path, format!("expected a {d}×{d} matrix to match dims")));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn check_trace(loc: &Locator, key: &str, path: &str, trace: f64) -> Result<()> {
    if (trace - 1.0).abs() > 1e-10 {
        return Err(loc.at(key, path, format!("trace invariant violated: trace is {trace}, expected 1")));
    }
    Ok(())
}

fn density_from(loc: &Locator, dims: HilbertDims, entries: &OperatorEntries, key: &str, path: &str) -> Result<DensityOperator> {
    let d = dims.total();
    let rho = match entries {
        OperatorEntries::Matrix(rows) => {
            let m = matrix_from(loc, key, path, rows, d)?;
            let trace: f64 = m.diagonal().iter().map(|z| z.re).sum();
            check_trace(loc, key, path, trace)?;
            DensityOperator::from_matrix(dims, m)
        }
        OperatorEntries::Diagonal { diagonal } => {
            if diagonal.len() != d {
                return Err(loc.at(key, path, format!("expected {d} diagonal entries to match dims")));
            }
            check_trace(loc, key, path, diagonal.iter().sum())?;
            DensityOperator::diagonal(dims, diagonal)
        }
    };
    rho.map_err(loc.wrap(key, path))
}

/// Parses and validates the text of a state file. `origin` names the source
/// in error messages.
pub fn parse_state(text: &str, origin: &str) -> Result<StateInput> {
    let loc = Locator { origin, text };
    let header: Header = loc.parse()?;
    if header.schema != SCHEMA_VERSION {
        return Err(loc.at(
            "schema",
            "$.schema",
            format!("unsupported schema {} (this build reads {SCHEMA_VERSION})", header.schema),
        ));
    }
    match header.kind.as_str() {
        "density" => {
            let f: DensityFile = loc.parse()?;
            let dims = dims_from(&loc, f.dims)?;
            let entries = match (f.matrix, f.diagonal) {
                (Some(m), None) => (OperatorEntries::Matrix(m), "matrix"),
                (None, Some(d)) => (OperatorEntries::Diagonal { diagonal: d }, "diagonal"),
                _ => return Err(loc.at("kind", "$", "give exactly one of `matrix` or `diagonal`")),
            };
            let path = format!("$.{}", entries.1);
            Ok(StateInput::Density(density_from(&loc, dims, &entries.0, entries.1, &path)?))
        }
        "cq" => {
            let f: CqFile = loc.parse()?;
            let dims = dims_from(&loc, f.dims)?;
            if f.probs.len() != f.conditionals.len() {
                return Err(loc.at("conditionals", "$.conditionals", "one conditional per probability is required"));
            }
            let conds = f
                .conditionals
                .iter()
                .enumerate()
                .map(|(x, c)| density_from(&loc, dims.clone(), c, "conditionals", &format!("$.conditionals[{x}]")))
                .collect::<Result<Vec<_>>>()?;
            let labels = f.labels.unwrap_or_else(|| (0..conds.len()).map(|x| x.to_string()).collect());
            let cq = CqState::with_labels(labels, f.probs, conds).map_err(loc.wrap("probs", "$.probs"))?;
            cq.require_normalized().map_err(loc.wrap("probs", "$.probs"))?;
            Ok(StateInput::Cq(cq))
        }
        "spectral" => {
            let f: SpectralFile = loc.parse()?;
            if f.eigenvalues.len() != f.multiplicities.len() {
                return Err(loc.at("multiplicities", "$.multiplicities", "one multiplicity per eigenvalue is required"));
            }
            let mut entries = Vec::with_capacity(f.eigenvalues.len());
            for (i, (v, m)) in f.eigenvalues.iter().zip(f.multiplicities).enumerate() {
                let m = match m {
                    Multiplicity::Small(k) => BigUint::from(k),
                    Multiplicity::Text(s) => s.parse::<BigUint>().map_err(|e| {
                        loc.at("multiplicities", &format!("$.multiplicities[{i}]"), format!("`{s}`: {e}"))
                    })?,
                };
                entries.push((*v, m));
            }
            let ms = SpectralMultiset::new(entries).map_err(loc.wrap("eigenvalues", "$.eigenvalues"))?;
            check_trace(&loc, "eigenvalues", "$.eigenvalues", ms.total_mass())?;
            Ok(StateInput::Spectral(ms))
        }
        "joint" => {
            let f: JointFile = loc.parse()?;
            let width = f.probs.first().map_or(0, Vec::len);
            if width == 0 || f.probs.iter().any(|r| r.len() != width) {
                return Err(loc.at("probs", "$.probs", "joint table must be a non-empty rectangle"));
            }
            if let Some((x, b)) = f
                .probs
                .iter()
                .enumerate()
                .flat_map(|(x, r)| r.iter().enumerate().map(move |(b, p)| (x, b, *p)))
                .find(|(_, _, p)| !(p.is_finite() && *p >= 0.0))
                .map(|(x, b, _)| (x, b))
            {
                return Err(loc.at("probs", &format!("$.probs[{x}][{b}]"), "probabilities must be non-negative"));
            }
            check_trace(&loc, "probs", "$.probs", f.probs.iter().flatten().sum())?;
            Ok(StateInput::Joint(f.probs))
        }
        "povm" => {
            let f: PovmFile = loc.parse()?;
            let dims = dims_from(&loc, f.dims)?;
            let d = dims.total();
            let mut labels = Vec::with_capacity(f.elements.len());
            let mut elements = Vec::with_capacity(f.elements.len());
            for (x, e) in f.elements.into_iter().enumerate() {
                if e.vector.len() != d {
                    return Err(loc.at("elements", &format!("$.elements[{x}].vector"), format!("expected {d} amplitudes")));
                }
                labels.push(e.label.unwrap_or_else(|| x.to_string()));
                elements.push((e.weight, CVector::from_iterator(d, e.vector.iter().map(|z| C64::new(z[0], z[1])))));
            }
            let povm = RankOnePovm::with_labels(dims, labels, elements).map_err(loc.wrap("elements", "$.elements"))?;
            Ok(StateInput::Povm(povm))
        }
        other => Err(loc.at(
            "kind",
            "$.kind",
            format!("unknown kind `{other}` (expected density, cq, spectral, joint or povm)"),
        )),
    }
}

/// Reads and validates a state file.
pub fn ingest(path: impl AsRef<Path>) -> Result<StateInput> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_state(&text, &path.display().to_string())
}

fn dims_json(dims: &HilbertDims) -> serde_json::Value {
    json!(dims.parts())
}

/// Serializes a density operator in the `density` form with full matrix
/// entries.
pub fn density_to_json(rho: &DensityOperator) -> String {
    let m = rho.matrix();
    let rows: Vec<Vec<Entry>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    let v = json!({"schema": SCHEMA_VERSION, "kind": "density", "dims": dims_json(rho.dims()), "matrix": rows});
    serde_json::to_string_pretty(&v).expect("JSON values serialize")
}

/// Serializes a classical joint distribution in the `joint` form.
pub fn joint_to_json(joint: &[Vec<f64>]) -> String {
    let v = json!({"schema": SCHEMA_VERSION, "kind": "joint", "probs": joint});
    serde_json::to_string_pretty(&v).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const HALF_IDENTITY: &str = r#"{
  "schema": 1,
  "kind": "density",
  "dims": [["A", 2]],
  "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]
}"#;

    #[test]
    fn identity_over_two() {
        let StateInput::Density(rho) = parse_state(HALF_IDENTITY, "mem").unwrap() else { panic!("kind") };
        assert_eq!(rho.matrix(), DensityOperator::maximally_mixed(HilbertDims::single("A", 2)).matrix());
    }

    #[test]
    fn cq_with_orthogonal_conditionals() {
        let text = r#"{"schema": 1, "kind": "cq", "dims": [["B", 2]], "probs": [0.5, 0.5],
            "conditionals": [{"diagonal": [1, 0]}, [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]]}"#;
        let StateInput::Cq(cq) = parse_state(text, "mem").unwrap() else { panic!("kind") };
        assert_eq!(cq.len(), 2);
        assert_eq!(cq.conditional(1).diagonal_probs(), vec![0.0, 1.0]);
    }

    #[test]
    fn trace_violation_names_the_line() {
        let text = HALF_IDENTITY.replace("[0.5, 0]]]", "[0.7, 0]]]");
        let err = parse_state(&text, "bad.json").unwrap_err().to_string();
        assert!(err.starts_with("bad.json:5 ($.matrix)"), "{err}");
        assert!(err.contains("trace invariant"), "{err}");
        assert!(err.contains("1.2"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_state("{\n \"schema\": 1,\n \"kind\": \"density\",\n \"dims\": [[\"A\", 2]],\n \"matrix\": 3\n}", "f")
            .unwrap_err()
            .to_string();
        assert!(err.starts_with("f:5:"), "{err}");
    }

    #[test]
    fn unknown_fields_and_kinds_are_rejected() {
        assert!(parse_state(r#"{"schema": 1, "kind": "joint", "probs": [[1]], "extra": 0}"#, "f").is_err());
        assert!(parse_state(r#"{"schema": 1, "kind": "tensor"}"#, "f").unwrap_err().to_string().contains("unknown kind"));
        assert!(parse_state(r#"{"schema": 2, "kind": "joint", "probs": [[1]]}"#, "f").is_err());
    }

    #[test]
    fn spectral_with_big_multiplicity() {
        let text = r#"{"schema": 1, "kind": "spectral", "eigenvalues": [0.5, 0], "multiplicities": [2, "100000000000000000000000"]}"#;
        let StateInput::Spectral(ms) = parse_state(text, "f").unwrap() else { panic!("kind") };
        assert_eq!(ms.support_size(), BigUint::from(2u32));
    }

    #[test]
    fn povm_and_round_trips() {
        let text = r#"{"schema": 1, "kind": "povm", "dims": [["A", 2]], "elements": [
            {"weight": 1, "vector": [[1, 0], [0, 0]], "label": "up"},
            {"weight": 1, "vector": [[0, 0], [1, 0]]}]}"#;
        let StateInput::Povm(p) = parse_state(text, "f").unwrap() else { panic!("kind") };
        assert_eq!(p.labels(), &["up".to_string(), "1".to_string()]);

        let rho = crate::operator::random_density(3, 2, 4).unwrap();
        let StateInput::Density(back) = parse_state(&density_to_json(&rho), "f").unwrap() else { panic!("kind") };
        assert_eq!(back.matrix(), rho.matrix());
        let joint = vec![vec![0.25, 0.25], vec![0.5, 0.0]];
        let StateInput::Joint(j) = parse_state(&joint_to_json(&joint), "f").unwrap() else { panic!("kind") };
        assert_eq!(j, joint);
    }
}
