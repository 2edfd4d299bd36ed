//! Report documents and their canonical JSON encoding.

use std::io;

use majorant_core::dual::SolverConfig;
use majorant_core::primal::MajorantMode;
use majorant_core::verify::Check;
use majorant_core::QuadratureConfig;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::schema::CoefficientRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Nonconvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Tool {
    pub fn current() -> Self {
        Self {
            name: "majorant".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// The input as it was understood, after defaults and validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub j: u32,
    pub f: Vec<CoefficientRecord>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<CoefficientRecord>>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f_major: Option<Vec<CoefficientRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<MajorantMode>,
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub solver: SolverConfig,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// `‖f‖_p`, p = 2j/(2j−1).
    pub f_p: f64,
    /// `‖F‖_p`.
    pub f_major_p: f64,
    /// `‖G‖_{2j}`.
    pub g_2j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualDiagnostics {
    pub iterations: usize,
    pub gap: f64,
    pub converged: bool,
    /// `K` from the seeded random start.
    pub restart_k: f64,
    pub restart_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDiagnostics {
    pub mode: MajorantMode,
    pub iterations: usize,
    pub stationarity: f64,
    pub converged: bool,
    pub norm_p: f64,
    pub active_set: Vec<i64>,
    pub f_major: Vec<CoefficientRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualDiagnostics>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primal: Vec<PrimalDiagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_discrepancy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kkt: Option<std::collections::BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorability: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: Tool,
    pub command: String,
    pub status: Status,
    pub input: InputEcho,
    pub config: ConfigEcho,
    /// `K_p(f)`, the reciprocal of the minimal majorant norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_p: Option<f64>,
    #[serde(rename = "G")]
    pub g: Vec<CoefficientRecord>,
    #[serde(rename = "F")]
    pub f_major: Vec<CoefficientRecord>,
    pub norms: Norms,
    pub checks: Vec<Check>,
    pub diagnostics: Diagnostics,
}

/// Pretty JSON with every float written as `d.dddddddddddddddde±x`
/// (17 significant digits).
struct SignificantDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SignificantDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Canonical text of any serializable document, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, SignificantDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
