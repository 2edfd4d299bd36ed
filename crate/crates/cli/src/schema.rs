//! Input documents: problem files and verify files.

use std::collections::BTreeSet;
use std::path::Path;

use majorant_core::dual::SolverConfig;
use majorant_core::primal::MajorantMode;
use majorant_core::{CoefficientSequence, Complex64, QuadratureConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One Fourier coefficient `f̂(n) = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRecord {
    pub n: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

pub fn records_of(seq: &CoefficientSequence) -> Vec<CoefficientRecord> {
    seq.iter()
        .map(|(n, v)| CoefficientRecord {
            n,
            re: v.re,
            im: v.im,
        })
        .collect()
}

/// Checks a coefficient list and converts it. `field` names the list in
/// error messages.
pub fn sequence_of(
    records: &[CoefficientRecord],
    field: &str,
) -> Result<CoefficientSequence, CliError> {
    let mut seen = BTreeSet::new();
    for (i, r) in records.iter().enumerate() {
        if !seen.insert(r.n) {
            return Err(CliError::Schema(format!(
                "{field}[{i}].n: duplicate frequency {}",
                r.n
            )));
        }
        if !r.re.is_finite() || !r.im.is_finite() {
            return Err(CliError::Schema(format!(
                "{field}[{i}]: coefficient is not finite"
            )));
        }
    }
    let seq =
        CoefficientSequence::from_pairs(records.iter().map(|r| (r.n, Complex64::new(r.re, r.im))));
    if seq.is_empty() {
        return Err(CliError::Schema(format!(
            "{field}: needs at least one nonzero coefficient"
        )));
    }
    Ok(seq)
}

fn validate_j(j: Option<u32>) -> Result<u32, CliError> {
    match j {
        None => Err(CliError::Schema(
            "j: missing (set it in the file or pass --j)".into(),
        )),
        Some(j) if j < 2 => Err(CliError::Schema(format!("j: must be at least 2, got {j}"))),
        Some(j) => Ok(j),
    }
}

/// A problem: the coefficients of `f`, the order `j`, and optional settings
/// that mirror the command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    pub coefficients: Vec<CoefficientRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<MajorantMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
}

impl ProblemFile {
    pub fn sequence(&self) -> Result<CoefficientSequence, CliError> {
        sequence_of(&self.coefficients, "coefficients")
    }

    /// Order from the flag, else from the file.
    pub fn order(&self, flag: Option<u32>) -> Result<u32, CliError> {
        validate_j(flag.or(self.j))
    }
}

/// A candidate conjugate `H` for `f`, optionally with the majorant `F` it is
/// claimed to generate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<u32>,
    pub f: Vec<CoefficientRecord>,
    #[serde(rename = "H")]
    pub h: Vec<CoefficientRecord>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f_major: Option<Vec<CoefficientRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
}

impl VerifyFile {
    pub fn order(&self, flag: Option<u32>) -> Result<u32, CliError> {
        validate_j(flag.or(self.j))
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses JSON, reporting the path of the offending field on failure.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Schema(format!("{what}: {inner}"))
        } else {
            CliError::Schema(format!("{what}: {path}: {inner}"))
        }
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse(&read_text(path)?, &path.display().to_string())
}
