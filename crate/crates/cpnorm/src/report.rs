//! Report envelope shared by every command.
//!
//! JSON: `{"config", "results", "residuals", "meta"}` with complex entries as
//! `[re, im]`. CSV: one flat scalar row per result, no matrices.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use cpnorm_core::{doubling, solver, tol, ComplexMatrix, SchattenExponent, SolverOptions};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Schatten exponent as a JSON number, or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exp(pub SchattenExponent);

impl Serialize for Exp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            SchattenExponent::Finite(v) => s.serialize_f64(v),
            SchattenExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
        .collect();
    Value::Array(rows)
}

pub fn solver_json(opts: &SolverOptions) -> Value {
    json!({
        "restarts": opts.restarts,
        "max_iterations": opts.max_iterations,
        "step_init": opts.step_init,
        "tol_grad": opts.tol_grad,
        "tol_value": opts.tol_value,
        "epsilon_smooth": opts.epsilon_smooth,
        "seed": opts.seed,
        "allow_non_cp": opts.allow_non_cp,
        "infinity_surrogate": solver::INFINITY_SURROGATE,
        "stall_window": solver::STALL_WINDOW,
    })
}

/// Numerical tolerances of the core library plus the command's own checks.
pub fn tolerances_json(checks: Value) -> Value {
    json!({
        "hermitian": tol::HERMITIAN,
        "psd_clip": tol::PSD_CLIP,
        "rank": tol::RANK,
        "jacobi": tol::JACOBI,
        "cp": tol::CP,
        "identity": doubling::IDENTITY_TOL,
        "abs_block": doubling::ABS_BLOCK_TOL,
        "margin": doubling::MARGIN_TOL,
        "unit_norm": doubling::UNIT_NORM_TOL,
        "checks": checks,
    })
}

#[derive(Debug)]
pub struct Report {
    pub config: Value,
    pub results: Value,
    pub residuals: Value,
    pub seed: u64,
    pub solver: SolverOptions,
    pub checks: Value,
    /// Pre-rendered CSV body (header + rows).
    pub csv: String,
}

impl Report {
    pub fn to_json(&self, timestamp: u64) -> Value {
        json!({
            "config": self.config,
            "results": self.results,
            "residuals": self.residuals,
            "meta": {
                "seed": self.seed,
                "tolerances": tolerances_json(self.checks.clone()),
                "solver": solver_json(&self.solver),
                "version": env!("CARGO_PKG_VERSION"),
                "timestamp": timestamp,
            },
        })
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(unix_time()))
                    .map_err(|e| CliError::io("serializing report", e.into()))?;
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
        })
    }

    /// Writes to `output`, or stdout when `None`.
    pub fn write(&self, format: Format, output: Option<&Path>) -> CliResult<()> {
        let body = self.render(format)?;
        match output {
            Some(path) => fs::write(path, body).map_err(|e| CliError::io(format!("writing {}", path.display()), e)),
            None => std::io::stdout()
                .lock()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::io("writing stdout", e)),
        }
    }
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn csv_of<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::io("writing CSV", std::io::Error::other(e)))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::io("writing CSV", std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Drops `meta.timestamp` so two reports can be compared byte for byte.
pub fn without_timestamp(report: &str) -> CliResult<String> {
    let mut v: Value = serde_json::from_str(report).map_err(|e| CliError::Config(format!("not a JSON report: {e}")))?;
    if let Some(meta) = v.get_mut("meta").and_then(Value::as_object_mut) {
        meta.remove("timestamp");
    }
    Ok(serde_json::to_string_pretty(&v).expect("value serializes"))
}
