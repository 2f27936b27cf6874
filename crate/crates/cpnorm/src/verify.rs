//! Hermitian vs general norm comparison and proof-chain residuals over a set
//! of channel instances.

use cpnorm_core::channel::{is_completely_positive, CpCertificate, LinearMap};
use cpnorm_core::doubling::verify_proof_chain;
use cpnorm_core::random::{gaussian_matrix, rng_from_seed};
use cpnorm_core::solver::brute_force_grid;
use cpnorm_core::{norm_pq, Channel, ChannelFamily, ChannelSpec, InputClass, KrausMap, SchattenExponent, SolverOptions};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel_file;
use crate::config::VerifyParams;
use crate::error::{CliError, CliResult};
use crate::report::Exp;

/// Seed of instance `index` under base seed `base`.
pub fn instance_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub spec: ChannelSpec,
    pub channel: Channel,
    pub cert: CpCertificate,
}

impl Instance {
    pub fn new(index: usize, seed: u64, spec: ChannelSpec) -> CliResult<Self> {
        let channel = spec.build()?;
        let cert = is_completely_positive(&channel)?;
        Ok(Self {
            index,
            seed,
            spec,
            channel,
            cert,
        })
    }

    pub fn kraus_rank(&self) -> Option<usize> {
        self.channel.as_kraus().map(|k| k.kraus_ops().len())
    }

    pub fn summary(&self) -> Value {
        json!({
            "index": self.index,
            "seed": self.seed,
            "spec": channel_file::to_json(&self.spec),
            "d_in": self.channel.input_dim(),
            "d_out": self.channel.output_dim(),
            "kraus_rank": self.kraus_rank(),
            "trace_preservation_defect": self.channel.as_kraus().map(KrausMap::trace_preservation_defect),
            "completely_positive": self.cert.completely_positive,
            "min_choi_eigenvalue": self.cert.min_choi_eigenvalue,
        })
    }
}

/// Random CP maps: dimensions drawn from `dims`, Kraus rank uniform over the
/// admissible range `⌈d_in/d_out⌉ ..= d_in·d_out`. With `scale_kraus`, odd
/// instances get their Kraus operators rescaled by factors in `[0.5, 1.5]`.
pub fn random_instances(count: usize, dims: &[usize], base_seed: u64, scale_kraus: bool) -> CliResult<Vec<Instance>> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(CliError::Config("--dims needs positive dimensions".into()));
    }
    (0..count)
        .map(|index| {
            let seed = instance_seed(base_seed, index);
            let mut rng = rng_from_seed(seed);
            rng.set_stream(1);
            let d_in = dims[rng.random_range(0..dims.len())];
            let d_out = dims[rng.random_range(0..dims.len())];
            let kraus_rank = rng.random_range(d_in.div_ceil(d_out)..=d_in * d_out);
            let family = ChannelFamily::RandomStinespring {
                d_in,
                d_out,
                kraus_rank,
                seed,
            };
            let spec = if scale_kraus && index % 2 == 1 {
                let base = KrausMap::random_stinespring(d_in, d_out, kraus_rank, seed)?;
                let factors: Vec<f64> = (0..kraus_rank).map(|_| rng.random_range(0.5..1.5)).collect();
                let kraus = base.scaled(&factors)?.kraus_ops().to_vec();
                ChannelSpec::new(format!("scaled_{index}"), ChannelFamily::Explicit { kraus })
            } else {
                ChannelSpec::new(format!("random_{index}"), family)
            };
            Instance::new(index, seed, spec)
        })
        .collect()
}

/// One `(instance, p, q)` row. Proof-chain columns hold the worst value over
/// the random inputs and are empty when `q = ∞`.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub instance: usize,
    pub channel: String,
    pub d_in: usize,
    pub d_out: usize,
    pub kraus_rank: Option<usize>,
    pub completely_positive: bool,
    pub p: Exp,
    pub q: Exp,
    pub hermitian: f64,
    pub general: f64,
    pub relative_gap: f64,
    pub hermitian_converged: bool,
    pub general_converged: bool,
    pub brute_force_hermitian: Option<f64>,
    pub brute_force_general: Option<f64>,
    pub chain_inputs: usize,
    pub doubling_identity_gap: Option<f64>,
    pub abs_block_residual: Option<f64>,
    pub abs_output_split_gap: Option<f64>,
    pub positivity_margin: Option<f64>,
    pub ah_margin: Option<f64>,
    pub chain_slack: Option<f64>,
    pub unit_norm_residual: Option<f64>,
    pub final_margin: Option<f64>,
    pub bound_margin: Option<f64>,
    pub gap_ok: bool,
    pub chain_ok: Option<bool>,
    pub oracle_ok: Option<bool>,
    pub pass: bool,
}

impl VerifyRow {
    pub fn describe_failure(&self, params: &VerifyParams) -> Option<String> {
        if self.pass {
            return None;
        }
        let mut why = Vec::new();
        if !self.gap_ok {
            why.push(format!("relative gap {:.3e} > {:.1e}", self.relative_gap, params.gap_tol));
        }
        if self.chain_ok == Some(false) {
            why.push("proof-chain step out of tolerance".to_string());
        }
        if self.oracle_ok == Some(false) {
            why.push(format!("solver below sampling oracle by more than {:.1e}", params.oracle_tol));
        }
        Some(format!(
            "instance {} ({}) p={} q={}: {}",
            self.instance,
            self.channel,
            self.p.0,
            self.q.0,
            why.join("; ")
        ))
    }
}

#[derive(Default)]
struct Worst {
    identity: f64,
    abs_block: f64,
    split: f64,
    positivity: f64,
    ah: f64,
    slack: f64,
    unit: f64,
    final_margin: f64,
    bound: f64,
    ok: bool,
}

fn chain_residuals<M: LinearMap>(
    map: &M,
    p: SchattenExponent,
    q: f64,
    reference: f64,
    inputs: usize,
    seed: u64,
    stream: u64,
) -> CliResult<Worst> {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(stream);
    let mut w = Worst {
        positivity: f64::INFINITY,
        ah: f64::INFINITY,
        slack: f64::INFINITY,
        final_margin: f64::INFINITY,
        bound: f64::INFINITY,
        ok: true,
        ..Worst::default()
    };
    let n = map.input_dim();
    for _ in 0..inputs {
        let a = gaussian_matrix(&mut rng, n, n);
        let r = verify_proof_chain(map, &a, p, q, reference)?;
        w.identity = w.identity.max(r.lhs_doubling_identity.relative_gap());
        w.abs_block = w.abs_block.max(r.abs_block_residual);
        w.split = w.split.max(r.abs_output_split.relative_gap());
        w.positivity = w.positivity.min(r.positivity_margin);
        w.ah = w.ah.min(r.ah_margin);
        w.slack = w.slack.min(r.chain_slack);
        w.unit = w.unit.max(r.unit_norm_residual);
        w.final_margin = w.final_margin.min(r.final_margin);
        w.bound = w.bound.min(r.bound_margin);
        w.ok &= r.passed();
    }
    Ok(w)
}

fn rows_for_instance(inst: &Instance, params: &VerifyParams, solver: &SolverOptions) -> CliResult<Vec<VerifyRow>> {
    if !inst.cert.completely_positive && !solver.allow_non_cp {
        return Err(CliError::NotCompletelyPositive {
            min_eigenvalue: inst.cert.min_choi_eigenvalue,
        });
    }
    let opts = SolverOptions { seed: inst.seed, ..*solver };
    let map = &inst.channel;
    let exps = &params.exponents;
    let oracle = |class| -> CliResult<Option<Vec<Vec<f64>>>> {
        if params.brute_force == 0 {
            return Ok(None);
        }
        Ok(Some(brute_force_grid(map, exps, exps, class, params.brute_force, inst.seed)?))
    };
    let (bf_herm, bf_gen) = (oracle(InputClass::Hermitian)?, oracle(InputClass::General)?);

    let mut rows = Vec::with_capacity(exps.len() * exps.len());
    for (i, &p) in exps.iter().enumerate() {
        for (j, &q) in exps.iter().enumerate() {
            let herm = norm_pq(map, p, q, InputClass::Hermitian, &opts)?;
            let gen = norm_pq(map, p, q, InputClass::General, &opts)?;
            let relative_gap = (gen.value - herm.value).abs() / (1.0 + herm.value);
            let worst = match q {
                SchattenExponent::Finite(qv) if params.inputs > 0 => {
                    let stream = 2 + (i * exps.len() + j) as u64;
                    Some(chain_residuals(map, p, qv, herm.value, params.inputs, inst.seed, stream)?)
                }
                _ => None,
            };
            let bf_h = bf_herm.as_ref().map(|g| g[i][j]);
            let bf_g = bf_gen.as_ref().map(|g| g[i][j]);
            let oracle_ok = match (bf_h, bf_g) {
                (Some(h), Some(g)) => Some(herm.value >= h - params.oracle_tol && gen.value >= g - params.oracle_tol),
                _ => None,
            };
            let gap_ok = relative_gap <= params.gap_tol;
            let chain_ok = worst.as_ref().map(|w| w.ok);
            let pick = |f: fn(&Worst) -> f64| worst.as_ref().map(f);
            rows.push(VerifyRow {
                instance: inst.index,
                channel: inst.spec.name.clone(),
                d_in: map.input_dim(),
                d_out: map.output_dim(),
                kraus_rank: inst.kraus_rank(),
                completely_positive: inst.cert.completely_positive,
                p: Exp(p),
                q: Exp(q),
                hermitian: herm.value,
                general: gen.value,
                relative_gap,
                hermitian_converged: herm.converged,
                general_converged: gen.converged,
                brute_force_hermitian: bf_h,
                brute_force_general: bf_g,
                chain_inputs: if worst.is_some() { params.inputs } else { 0 },
                doubling_identity_gap: pick(|w| w.identity),
                abs_block_residual: pick(|w| w.abs_block),
                abs_output_split_gap: pick(|w| w.split),
                positivity_margin: pick(|w| w.positivity),
                ah_margin: pick(|w| w.ah),
                chain_slack: pick(|w| w.slack),
                unit_norm_residual: pick(|w| w.unit),
                final_margin: pick(|w| w.final_margin),
                bound_margin: pick(|w| w.bound),
                gap_ok,
                chain_ok,
                oracle_ok,
                pass: gap_ok && chain_ok != Some(false) && oracle_ok != Some(false),
            });
        }
    }
    Ok(rows)
}

/// Rows in instance order, then `p`, then `q`, whatever the completion order.
pub fn verify_instances(instances: &[Instance], params: &VerifyParams, solver: &SolverOptions) -> CliResult<Vec<VerifyRow>> {
    if params.exponents.is_empty() {
        return Err(CliError::Config("--exponents is empty".into()));
    }
    // refuse non-CP maps before spending any solver time
    if !solver.allow_non_cp {
        if let Some(bad) = instances.iter().find(|i| !i.cert.completely_positive) {
            return Err(CliError::NotCompletelyPositive {
                min_eigenvalue: bad.cert.min_choi_eigenvalue,
            });
        }
    }
    let per_instance: Vec<Vec<VerifyRow>> = instances
        .par_iter()
        .map(|inst| rows_for_instance(inst, params, solver))
        .collect::<CliResult<_>>()?;
    Ok(per_instance.into_iter().flatten().collect())
}

fn fold(rows: &[VerifyRow], f: impl Fn(&VerifyRow) -> Option<f64>, max: bool) -> Option<f64> {
    rows.iter()
        .filter_map(f)
        .reduce(|a, b| if max { a.max(b) } else { a.min(b) })
}

/// Worst value of every residual column over all rows, plus pass counts.
pub fn summarize(rows: &[VerifyRow]) -> Value {
    let passed = rows.iter().filter(|r| r.pass).count();
    json!({
        "max_relative_gap": fold(rows, |r| Some(r.relative_gap), true),
        "max_doubling_identity_gap": fold(rows, |r| r.doubling_identity_gap, true),
        "max_abs_block_residual": fold(rows, |r| r.abs_block_residual, true),
        "max_abs_output_split_gap": fold(rows, |r| r.abs_output_split_gap, true),
        "min_positivity_margin": fold(rows, |r| r.positivity_margin, false),
        "min_ah_margin": fold(rows, |r| r.ah_margin, false),
        "min_chain_slack": fold(rows, |r| r.chain_slack, false),
        "max_unit_norm_residual": fold(rows, |r| r.unit_norm_residual, true),
        "min_final_margin": fold(rows, |r| r.final_margin, false),
        "min_bound_margin": fold(rows, |r| r.bound_margin, false),
        "min_oracle_margin": fold(rows, |r| match (r.brute_force_hermitian, r.brute_force_general) {
            (Some(h), Some(g)) => Some((r.hermitian - h).min(r.general - g)),
            _ => None,
        }, false),
        "totals": { "rows": rows.len(), "passed": passed, "failed": rows.len() - passed },
    })
}
