use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpnorm_core::{ChannelFamily, ChannelSpec, InputClass, SchattenExponent, SolverOptions};

use crate::channel_file;
use crate::config::{Command, PurityParams, RunConfig, SuiteParams, VerifyParams};
use crate::error::{CliError, CliResult};
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "cpnorm", version, about = "Schatten p->q norms and maximal output purity of completely positive maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Estimate max ‖Φ(A)‖_q / ‖A‖_p over one input class.
    Norm(NormArgs),
    /// Compare Hermitian and general norms and check the doubling chain.
    Verify(VerifyArgs),
    /// Maximal output purity over a parameter sweep.
    Purity(PurityArgs),
    /// Random-channel verification, closed-form spot checks and the
    /// transpose negative control in one report.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Identity,
    Depolarizing,
    #[value(name = "amplitude_damping", alias = "amplitude-damping")]
    AmplitudeDamping,
    #[value(name = "random_stinespring", alias = "random-stinespring")]
    RandomStinespring,
    Transpose,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ClassArg {
    Hermitian,
    General,
    #[value(alias = "positive_trace_one")]
    Positive,
}

impl From<ClassArg> for InputClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Hermitian => Self::Hermitian,
            ClassArg::General => Self::General,
            ClassArg::Positive => Self::PositiveTraceOne,
        }
    }
}

/// `1.5`, `2`, `inf`.
pub fn parse_exponent(s: &str) -> Result<SchattenExponent, String> {
    let v = match s.trim() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"))?,
    };
    SchattenExponent::new(v).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Input dimension (and output dimension unless --d-out is set).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub d_out: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub kraus_rank: Option<usize>,
    /// Channel-spec JSON file (object or bare list of Kraus operators).
    #[arg(long, value_name = "FILE", conflicts_with_all = ["family", "channel"])]
    pub kraus: Option<PathBuf>,
    #[arg(long, value_name = "FILE", conflicts_with = "family")]
    pub channel: Option<PathBuf>,
}

impl ChannelArgs {
    /// `sweep` stands in for a missing λ or γ when a purity grid sets it.
    fn resolve(&self, seed: u64, sweep: Option<f64>) -> CliResult<Option<ChannelSpec>> {
        if let Some(path) = self.kraus.as_ref().or(self.channel.as_ref()) {
            if !path.exists() {
                return Err(CliError::Config(format!("channel file {} does not exist", path.display())));
            }
            return channel_file::load(path).map(Some);
        }
        let Some(family) = self.family else {
            return Ok(None);
        };
        let need = |v: Option<f64>, flag: &str| v.or(sweep).ok_or_else(|| CliError::Config(format!("{flag} is required for this family")));
        let d = self.d;
        let family = match family {
            FamilyArg::Identity => ChannelFamily::Identity { d },
            FamilyArg::Depolarizing => ChannelFamily::Depolarizing {
                d,
                lambda: need(self.lambda, "--lambda")?,
            },
            FamilyArg::AmplitudeDamping => ChannelFamily::AmplitudeDamping {
                gamma: need(self.gamma, "--gamma")?,
            },
            FamilyArg::RandomStinespring => {
                let d_out = self.d_out.unwrap_or(d);
                ChannelFamily::RandomStinespring {
                    d_in: d,
                    d_out,
                    kraus_rank: self.kraus_rank.unwrap_or(d.div_ceil(d_out.max(1)).max(2)),
                    seed,
                }
            }
            FamilyArg::Transpose => ChannelFamily::Transpose { d },
        };
        let name = family.name().to_string();
        Ok(Some(ChannelSpec::new(name, family)))
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = SolverOptions::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = SolverOptions::default().max_iterations)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = SolverOptions::default().step_init)]
    pub step_init: f64,
    #[arg(long, default_value_t = SolverOptions::default().tol_grad)]
    pub tol_grad: f64,
    #[arg(long, default_value_t = SolverOptions::default().tol_value)]
    pub tol_value: f64,
    #[arg(long, default_value_t = SolverOptions::default().epsilon_smooth)]
    pub epsilon_smooth: f64,
    /// Base seed; instance k of a generated set uses seed + k.
    #[arg(long, env = "CPNORM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Admit maps whose Choi matrix is not PSD (negative controls).
    #[arg(long)]
    pub allow_non_cp: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            step_init: self.step_init,
            tol_grad: self.tol_grad,
            tol_value: self.tol_value,
            epsilon_smooth: self.epsilon_smooth,
            seed: self.seed,
            allow_non_cp: self.allow_non_cp,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report path; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_parser = parse_exponent)]
    pub p: SchattenExponent,
    #[arg(long, value_parser = parse_exponent)]
    pub q: SchattenExponent,
    #[arg(long, value_enum, default_value_t = ClassArg::Hermitian)]
    pub class: ClassArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Comma-separated dimensions for generated channels.
    #[arg(long, value_delimiter = ',', default_values_t = [2_usize, 3])]
    pub dims: Vec<usize>,
    /// Comma-separated exponents; all (p, q) pairs are checked.
    #[arg(long, value_delimiter = ',', value_parser = parse_exponent, default_value = "1,1.5,2,3")]
    pub exponents: Vec<SchattenExponent>,
    /// Random inputs per (p, q) run through the doubling chain.
    #[arg(long, default_value_t = 2)]
    pub inputs: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub gap_tol: f64,
    /// Sampling-oracle draws per class (0 = off).
    #[arg(long, default_value_t = 0)]
    pub brute_force: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub oracle_tol: f64,
    /// Keep every generated channel trace-preserving.
    #[arg(long)]
    pub no_scale_kraus: bool,
}

impl CheckArgs {
    fn params(&self, random: usize) -> VerifyParams {
        VerifyParams {
            random,
            dims: self.dims.clone(),
            exponents: self.exponents.clone(),
            inputs: self.inputs,
            gap_tol: self.gap_tol,
            brute_force: self.brute_force,
            oracle_tol: self.oracle_tol,
            scale_kraus: !self.no_scale_kraus,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Generate N random CP maps instead of a single given channel.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[command(flatten)]
    pub checks: CheckArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PurityArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_parser = parse_exponent, default_value = "2")]
    pub q: SchattenExponent,
    /// Comma-separated values of λ (depolarizing) or γ (amplitude damping).
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 50)]
    pub random: usize,
    #[command(flatten)]
    pub checks: CheckArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub closed_form_tol: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn config(
    command: Command,
    channel: Option<ChannelSpec>,
    (p, q, class): (SchattenExponent, SchattenExponent, InputClass),
    solver: &SolverArgs,
    output: &OutputArgs,
) -> RunConfig {
    RunConfig {
        command,
        channel,
        p,
        q,
        class,
        solver: solver.options(),
        output: output.output.clone(),
        format: output.format,
        jobs: output.jobs,
    }
}

impl Cli {
    pub fn into_config(self) -> CliResult<RunConfig> {
        let one = SchattenExponent::Finite(1.0);
        Ok(match self.command {
            Sub::Norm(a) => {
                let channel = a.channel.resolve(a.solver.seed, None)?;
                config(Command::Norm, channel, (a.p, a.q, a.class.into()), &a.solver, &a.output)
            }
            Sub::Verify(a) => {
                let channel = a.channel.resolve(a.solver.seed, None)?;
                let params = a.checks.params(a.random);
                config(Command::Verify(params), channel, (one, one, InputClass::Hermitian), &a.solver, &a.output)
            }
            Sub::Purity(a) => {
                let channel = a.channel.resolve(a.solver.seed, a.grid.first().copied())?;
                let params = PurityParams { grid: a.grid, tol: a.tol };
                config(
                    Command::Purity(params),
                    channel,
                    (one, a.q, InputClass::PositiveTraceOne),
                    &a.solver,
                    &a.output,
                )
            }
            Sub::Suite(a) => {
                let params = SuiteParams {
                    verify: a.checks.params(a.random),
                    closed_form_tol: a.closed_form_tol,
                };
                config(Command::Suite(params), None, (one, one, InputClass::Hermitian), &a.solver, &a.output)
            }
        })
    }
}
