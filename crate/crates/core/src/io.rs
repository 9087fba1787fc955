//! JSON wire formats: state files, measurements, and reports.
//!
//! State files carry either an explicit matrix, pure-state amplitudes, or a
//! family stanza:
//!
//! ```json
//! { "dims": [2, 2], "matrix": [[[re, im], ...], ...] }
//! { "dims": [2, 2], "amplitudes": [[re, im], ...] }
//! { "family": { "kind": "isotropic", "d": 2, "p": 0.5 } }
//! ```
//!
//! Matrices are row-major; complex entries are `[re, im]` pairs. Joint
//! indices are A-major: |i⟩⊗|j⟩ ↦ i·dB + j.

use serde::{Deserialize, Serialize};

use crate::engine::{BoundsReport, EParamReport};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::measurement::Measurement;
use crate::optimize::OptimizationConfig;
use crate::product_opt::InnerMinResult;
use crate::state::{CMatrix, CVector, DensityMatrix, Dims, PureState, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
}

/// Parse a state file into a density matrix (pure inputs become projectors).
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state file: {e}")))?;
    if let Some(family) = &file.family {
        return family.realize();
    }
    let dims = file
        .dims
        .ok_or_else(|| Error::Parse("state file needs `dims` unless a family is given".into()))?;
    let dims = Dims::new(dims[0], dims[1]);
    if let Some(rows) = &file.matrix {
        let n = dims.total();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("matrix must be {n}×{n} for dims {dims:?}")));
        }
        let mut m = CMatrix::zeros(n, n);
        for (r, row) in rows.iter().enumerate() {
            for (c, &[re, im]) in row.iter().enumerate() {
                m[(r, c)] = C64::new(re, im);
            }
        }
        return DensityMatrix::new(m, dims);
    }
    if let Some(amps) = &file.amplitudes {
        let n = dims.total();
        if amps.len() != n {
            return Err(Error::Parse(format!(
                "amplitudes must have length {n} for dims {dims:?}"
            )));
        }
        let mut v = CVector::zeros(n);
        for (k, &[re, im]) in amps.iter().enumerate() {
            v[k] = C64::new(re, im);
        }
        return Ok(PureState::new(v, dims)?.density());
    }
    Err(Error::Parse(
        "state file needs one of `matrix`, `amplitudes`, or `family`".into(),
    ))
}

pub fn density_to_state_file(rho: &DensityMatrix) -> StateFile {
    let n = rho.dims().total();
    let m = rho.matrix();
    let rows = (0..n)
        .map(|r| (0..n).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect();
    StateFile {
        dims: Some([rho.dims().a, rho.dims().b]),
        matrix: Some(rows),
        amplitudes: None,
        family: None,
    }
}

pub fn pure_to_state_file(psi: &PureState) -> StateFile {
    StateFile {
        dims: Some([psi.dims().a, psi.dims().b]),
        matrix: None,
        amplitudes: Some(psi.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
        family: None,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementFile {
    pub dims: [usize; 2],
    pub vectors: Vec<Vec<[f64; 2]>>,
}

pub fn measurement_to_file(m: &Measurement) -> MeasurementFile {
    MeasurementFile {
        dims: [m.dims().a, m.dims().b],
        vectors: m
            .vectors()
            .iter()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    }
}

pub fn measurement_from_file(file: &MeasurementFile) -> Result<Measurement> {
    let dims = Dims::new(file.dims[0], file.dims[1]);
    let n = dims.total();
    let vectors = file
        .vectors
        .iter()
        .map(|entries| {
            let mut v = CVector::zeros(n);
            if entries.len() != n {
                return Err(Error::Parse(format!("vector length {} ≠ {n}", entries.len())));
            }
            for (k, &[re, im]) in entries.iter().enumerate() {
                v[k] = C64::new(re, im);
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Measurement::new(vectors, dims)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsJson {
    pub info_content: f64,
    pub dim_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_qubit_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qutrit_numeric_bound: Option<f64>,
    pub eigenbasis_lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bell_diag_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pure_state_lower: Option<f64>,
    pub coherent_info: f64,
    pub consistent: bool,
}

impl From<&BoundsReport> for BoundsJson {
    fn from(b: &BoundsReport) -> Self {
        BoundsJson {
            info_content: b.info_content,
            dim_bound: b.dim_bound,
            two_qubit_bound: b.two_qubit_bound,
            qutrit_numeric_bound: b.qutrit_numeric_bound,
            eigenbasis_lower: b.eigenbasis_lower,
            bell_diag_lower: b.bell_diag_lower,
            pure_state_lower: b.pure_state_lower,
            coherent_info: b.coherent_info,
            consistent: b.consistent,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InnerMinJson {
    pub value: f64,
    pub left: Vec<[f64; 2]>,
    pub right: Vec<[f64; 2]>,
    pub restarts_used: usize,
    pub converged: bool,
}

impl From<&InnerMinResult> for InnerMinJson {
    fn from(r: &InnerMinResult) -> Self {
        InnerMinJson {
            value: r.value,
            left: r.minimizer.left().iter().map(|z| [z.re, z.im]).collect(),
            right: r.minimizer.right().iter().map(|z| [z.re, z.im]).collect(),
            restarts_used: r.restarts_used,
            converged: r.converged,
        }
    }
}

/// Non-normative per-run comparison against the coherent information; the
/// relation is conjectural and is recorded, never asserted.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureJson {
    pub non_normative: bool,
    pub coherent_info: f64,
    pub estimate_minus_coherent_info: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_value: Option<f64>,
    pub bounds: BoundsJson,
    pub inner: InnerMinJson,
    pub best_measurement: MeasurementFile,
    pub restarts_used: usize,
    pub upper_consistent: bool,
    pub sandwich_ok: bool,
    pub conjecture_comparison: ConjectureJson,
    pub config: RunConfigJson,
    pub version: String,
}

/// Seed and budgets recorded with every run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfigJson {
    pub restarts: usize,
    pub inner_restarts: usize,
    pub max_iters: usize,
    pub outer_evals: usize,
    pub f_tol: f64,
    pub grid_resolution: f64,
    pub seed: u64,
    pub max_dim: usize,
}

impl From<&OptimizationConfig> for RunConfigJson {
    fn from(c: &OptimizationConfig) -> Self {
        RunConfigJson {
            restarts: c.restarts,
            inner_restarts: c.inner_restarts,
            max_iters: c.max_iters,
            outer_evals: c.outer_evals,
            f_tol: c.f_tol,
            grid_resolution: c.grid_resolution,
            seed: c.seed,
            max_dim: c.max_dim,
        }
    }
}

pub fn report_to_json(report: &EParamReport, cfg: &OptimizationConfig) -> ReportJson {
    ReportJson {
        estimate: report.estimate,
        analytic_value: report.analytic_value,
        bounds: BoundsJson::from(&report.bounds),
        inner: InnerMinJson::from(&report.inner_result),
        best_measurement: measurement_to_file(&report.best_measurement),
        restarts_used: report.restarts_used,
        upper_consistent: report.upper_consistent,
        sandwich_ok: report.sandwich_ok(),
        conjecture_comparison: ConjectureJson {
            non_normative: true,
            coherent_info: report.bounds.coherent_info,
            estimate_minus_coherent_info: report.conjecture_gap(),
        },
        config: RunConfigJson::from(cfg),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Aligned human-readable rendering of a report.
pub fn report_human(report: &EParamReport) -> String {
    let mut out = String::new();
    let b = &report.bounds;
    let mut line = |label: &str, value: String| {
        out.push_str(&format!("{label:<28} {value}\n"));
    };
    line("estimate", format!("{:+.6}", report.estimate));
    if let Some(a) = report.analytic_value {
        line("analytic value", format!("{a:+.6}"));
    }
    line("restarts used", format!("{}", report.restarts_used));
    line("inner minimum", format!("{:+.6}", report.inner_result.value));
    line(
        "inner converged",
        format!("{}", report.inner_result.converged),
    );
    out.push_str("bounds:\n");
    let mut bound_line = |label: &str, value: Option<f64>| {
        if let Some(v) = value {
            out.push_str(&format!("  {label:<26} {v:+.6}\n"));
        }
    };
    bound_line("upper: info content", Some(b.info_content));
    bound_line("upper: dimension profile", Some(b.dim_bound));
    bound_line("upper: two-qubit (1 - S)", b.two_qubit_bound);
    bound_line("upper: qutrit numeric", b.qutrit_numeric_bound);
    bound_line("lower: eigenbasis", Some(b.eigenbasis_lower));
    bound_line("lower: Bell-diagonal", b.bell_diag_lower);
    bound_line("lower: pure capped", b.pure_state_lower);
    out.push_str(&format!(
        "  {:<26} {}\n",
        "bounds consistent", b.consistent
    ));
    out.push_str(&format!(
        "{:<28} {}\n",
        "sandwich ok",
        report.sandwich_ok()
    ));
    out.push_str("conjecture comparison (non-normative):\n");
    out.push_str(&format!(
        "  {:<26} {:+.6}\n",
        "coherent information", b.coherent_info
    ));
    out.push_str(&format!(
        "  {:<26} {:+.6}\n",
        "estimate - coherent info",
        report.conjecture_gap()
    ));
    out
}
