use std::path::PathBuf;

use cpnorm_core::{ChannelSpec, InputClass, SchattenExponent, SolverOptions};
use serde_json::{json, Value};

use crate::channel_file;
use crate::report::{Exp, Format};

/// Fully resolved invocation of one command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    /// Channel given by flags or file; `None` for generated instance sets.
    pub channel: Option<ChannelSpec>,
    pub p: SchattenExponent,
    pub q: SchattenExponent,
    pub class: InputClass,
    /// Also carries the base seed and the non-CP override.
    pub solver: SolverOptions,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

#[derive(Clone, Debug)]
pub enum Command {
    Norm,
    Verify(VerifyParams),
    Purity(PurityParams),
    Suite(SuiteParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Norm => "norm",
            Self::Verify(_) => "verify",
            Self::Purity(_) => "purity",
            Self::Suite(_) => "suite",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyParams {
    /// Number of generated channels; ignored when a channel is given.
    pub random: usize,
    /// Candidate input and output dimensions of generated channels.
    pub dims: Vec<usize>,
    /// Every `(p, q)` pair from this list is checked.
    pub exponents: Vec<SchattenExponent>,
    /// Random inputs per `(p, q)` fed through the proof chain.
    pub inputs: usize,
    /// Bound on `|general − hermitian| / (1 + hermitian)`.
    pub gap_tol: f64,
    /// Samples per class for the sampling oracle; 0 disables it.
    pub brute_force: usize,
    /// Solver values may fall below the oracle by at most this much.
    pub oracle_tol: f64,
    /// Rescale the Kraus operators of odd-indexed generated channels by
    /// random positive factors, giving non-trace-preserving CP maps.
    pub scale_kraus: bool,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            random: 0,
            dims: vec![2, 3],
            exponents: [1.0, 1.5, 2.0, 3.0].map(SchattenExponent::Finite).to_vec(),
            inputs: 2,
            gap_tol: 1e-6,
            brute_force: 0,
            oracle_tol: 1e-4,
            scale_kraus: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PurityParams {
    /// Values of the family parameter (λ or γ); empty means the channel as given.
    pub grid: Vec<f64>,
    /// Bound on `|ν − ‖Φ‖_{1→q}|`.
    pub tol: f64,
}

impl Default for PurityParams {
    fn default() -> Self {
        Self { grid: Vec::new(), tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteParams {
    pub verify: VerifyParams,
    pub closed_form_tol: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            verify: VerifyParams {
                random: 50,
                ..VerifyParams::default()
            },
            closed_form_tol: 1e-6,
        }
    }
}

fn exps(list: &[SchattenExponent]) -> Vec<Exp> {
    list.iter().copied().map(Exp).collect()
}

fn verify_json(v: &VerifyParams) -> Value {
    json!({
        "random": v.random,
        "dims": v.dims,
        "exponents": exps(&v.exponents),
        "inputs": v.inputs,
        "gap_tol": v.gap_tol,
        "brute_force": v.brute_force,
        "oracle_tol": v.oracle_tol,
        "scale_kraus": v.scale_kraus,
    })
}

impl RunConfig {
    /// Echo of the configuration embedded in every report. The output path
    /// is left out so that reruns to different files compare equal.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "command": self.command.name(),
            "channel": self.channel.as_ref().map(channel_file::to_json),
            "format": match self.format { Format::Json => "json", Format::Csv => "csv" },
            "seed": self.solver.seed,
            "allow_non_cp": self.solver.allow_non_cp,
        });
        let extra = match &self.command {
            Command::Norm => {
                v["p"] = json!(Exp(self.p));
                v["class"] = json!(self.class.name());
                None
            }
            Command::Verify(p) => Some(("verify", verify_json(p))),
            Command::Purity(p) => Some(("purity", json!({ "grid": p.grid, "tol": p.tol }))),
            Command::Suite(p) => Some((
                "suite",
                json!({ "verify": verify_json(&p.verify), "closed_form_tol": p.closed_form_tol }),
            )),
        };
        if matches!(self.command, Command::Norm | Command::Purity(_)) {
            v["q"] = json!(Exp(self.q));
        }
        if let Some((key, val)) = extra {
            v[key] = val;
        }
        v
    }
}
