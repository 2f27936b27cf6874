use cpnorm_core::channel::{is_completely_positive, LinearMap, TransposeMap};
use cpnorm_core::{
    norm_pq, schatten_norm, ChannelFamily, ChannelSpec, Error as CoreError, InputClass, KrausMap, SchattenExponent,
    SolverOptions,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, PurityParams, RunConfig, SuiteParams, VerifyParams};
use crate::error::{CliError, CliResult};
use crate::report::{csv_of, matrix_json, Exp, Report};
use crate::verify::{random_instances, summarize, verify_instances, Instance, VerifyRow};

/// A finished run: the report is always written, `failures` decides exit 4.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub failures: Vec<String>,
}

pub fn run(config: &RunConfig) -> CliResult<Outcome> {
    config.solver.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} worker threads: {e}", config.jobs)))?;
    pool.install(|| match &config.command {
        Command::Norm => run_norm(config),
        Command::Verify(params) => run_verify(config, params),
        Command::Purity(params) => run_purity(config, params),
        Command::Suite(params) => run_suite(config, params),
    })
}

fn require_channel(config: &RunConfig) -> CliResult<&ChannelSpec> {
    config
        .channel
        .as_ref()
        .ok_or_else(|| CliError::Config("no channel given; use --family or --kraus/--channel".into()))
}

fn report(config: &RunConfig, results: Value, residuals: Value, checks: Value, csv: String) -> Report {
    Report {
        config: config.to_json(),
        results,
        residuals,
        seed: config.solver.seed,
        solver: config.solver,
        checks,
        csv,
    }
}

#[derive(Serialize)]
struct NormRow<'a> {
    channel: &'a str,
    class: &'static str,
    p: Exp,
    q: Exp,
    value: f64,
    converged: bool,
    frank_wolfe_gap: f64,
    restarts: usize,
    best_restart: usize,
    iterations: usize,
    total_iterations: usize,
    completely_positive: bool,
    min_choi_eigenvalue: f64,
}

fn run_norm(config: &RunConfig) -> CliResult<Outcome> {
    let spec = require_channel(config)?;
    let inst = Instance::new(0, config.solver.seed, spec.clone())?;
    let est = norm_pq(&inst.channel, config.p, config.q, config.class, &config.solver)?;
    let constraint = match config.class {
        InputClass::PositiveTraceOne => (est.maximizer.trace().re - 1.0).abs(),
        _ => (schatten_norm(&est.maximizer, config.p)? - 1.0).abs(),
    };
    let row = NormRow {
        channel: &spec.name,
        class: config.class.name(),
        p: Exp(config.p),
        q: Exp(config.q),
        value: est.value,
        converged: est.converged,
        frank_wolfe_gap: est.grad_norm_final,
        restarts: est.restarts_used,
        best_restart: est.best_restart,
        iterations: est.iterations,
        total_iterations: est.total_iterations,
        completely_positive: inst.cert.completely_positive,
        min_choi_eigenvalue: inst.cert.min_choi_eigenvalue,
    };
    let mut results = serde_json::to_value(&row).expect("row serializes");
    results["channel"] = inst.summary();
    results["maximizer"] = matrix_json(&est.maximizer);
    results["value_history"] = json!(est.value_history);
    let residuals = json!({
        "frank_wolfe_gap": est.grad_norm_final,
        "constraint_residual": constraint,
        "maximizer_hermitian_deviation": est.maximizer.hermitian_deviation(),
    });
    let csv = csv_of(&[row])?;
    Ok(Outcome {
        report: report(config, results, residuals, json!({}), csv),
        failures: Vec::new(),
    })
}

fn verify_checks(params: &VerifyParams) -> Value {
    json!({ "gap": params.gap_tol, "oracle": params.oracle_tol })
}

fn instances_for(config: &RunConfig, params: &VerifyParams) -> CliResult<Vec<Instance>> {
    match &config.channel {
        Some(spec) => Ok(vec![Instance::new(0, config.solver.seed, spec.clone())?]),
        None if params.random > 0 => random_instances(params.random, &params.dims, config.solver.seed, params.scale_kraus),
        None => Err(CliError::Config("verify needs a channel or --random N".into())),
    }
}

fn run_verify(config: &RunConfig, params: &VerifyParams) -> CliResult<Outcome> {
    let instances = instances_for(config, params)?;
    let rows = verify_instances(&instances, params, &config.solver)?;
    let failures = rows.iter().filter_map(|r| r.describe_failure(params)).collect();
    let results = json!({
        "instances": instances.iter().map(Instance::summary).collect::<Vec<_>>(),
        "rows": rows,
    });
    let csv = csv_of(&rows)?;
    Ok(Outcome {
        report: report(config, results, summarize(&rows), verify_checks(params), csv),
        failures,
    })
}

#[derive(Serialize)]
struct PurityRow {
    channel: String,
    parameter: Option<&'static str>,
    value: Option<f64>,
    q: Exp,
    purity: f64,
    hermitian_1_to_q: f64,
    difference: f64,
    pass: bool,
}

fn purity_rows(config: &RunConfig, params: &PurityParams) -> CliResult<Vec<PurityRow>> {
    let spec = require_channel(config)?;
    let points: Vec<(Option<&'static str>, Option<f64>, ChannelSpec)> = if params.grid.is_empty() {
        vec![(None, None, spec.clone())]
    } else {
        let vary = |v: f64| match &spec.family {
            ChannelFamily::Depolarizing { d, .. } => Ok(("lambda", ChannelFamily::Depolarizing { d: *d, lambda: v })),
            ChannelFamily::AmplitudeDamping { .. } => Ok(("gamma", ChannelFamily::AmplitudeDamping { gamma: v })),
            other => Err(CliError::Config(format!("--grid needs a depolarizing or amplitude_damping family, got {}", other.name()))),
        };
        params
            .grid
            .iter()
            .map(|&v| {
                let (name, family) = vary(v)?;
                Ok((Some(name), Some(v), ChannelSpec::new(format!("{}_{name}={v}", spec.name), family)))
            })
            .collect::<CliResult<_>>()?
    };
    let one = SchattenExponent::Finite(1.0);
    points
        .into_iter()
        .map(|(parameter, value, spec)| {
            let inst = Instance::new(0, config.solver.seed, spec)?;
            let nu = norm_pq(&inst.channel, one, config.q, InputClass::PositiveTraceOne, &config.solver)?;
            let herm = norm_pq(&inst.channel, one, config.q, InputClass::Hermitian, &config.solver)?;
            let difference = (nu.value - herm.value).abs();
            Ok(PurityRow {
                channel: inst.spec.name,
                parameter,
                value,
                q: Exp(config.q),
                purity: nu.value,
                hermitian_1_to_q: herm.value,
                difference,
                pass: difference <= params.tol,
            })
        })
        .collect()
}

fn run_purity(config: &RunConfig, params: &PurityParams) -> CliResult<Outcome> {
    let rows = purity_rows(config, params)?;
    let failures = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: purity {} vs 1->q norm {} (diff {:.3e})", r.channel, r.purity, r.hermitian_1_to_q, r.difference))
        .collect();
    let max_diff = rows.iter().map(|r| r.difference).fold(0.0_f64, f64::max);
    let results = serde_json::to_value(&rows).expect("rows serialize");
    let csv = csv_of(&rows)?;
    Ok(Outcome {
        report: report(config, results, json!({ "max_difference": max_diff }), json!({ "purity_vs_norm": params.tol }), csv),
        failures,
    })
}

/// One scalar check in the suite table.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub section: &'static str,
    pub label: String,
    pub value: f64,
    pub expected: Option<f64>,
    pub error: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

fn closed_form_checks(solver: &SolverOptions, exponents: &[SchattenExponent], tol: f64) -> CliResult<Vec<CheckRow>> {
    let mut out = Vec::new();
    let mut check = |label: String, value: f64, expected: f64| {
        let error = (value - expected).abs();
        out.push(CheckRow {
            section: "closed_form",
            label,
            value,
            expected: Some(expected),
            error: Some(error),
            tolerance: tol,
            pass: error <= tol,
        });
    };
    for d in [2, 3] {
        let id = KrausMap::identity(d);
        for &p in exponents {
            for &q in exponents {
                // 1 for p <= q, d^{1/q - 1/p} otherwise
                let expected = (d as f64).powf((1.0 / q.value() - 1.0 / p.value()).max(0.0));
                for class in [InputClass::Hermitian, InputClass::General] {
                    let v = norm_pq(&id, p, q, class, solver)?.value;
                    check(format!("identity d={d} p={p} q={q} {class}"), v, expected);
                }
            }
        }
    }
    let one = SchattenExponent::Finite(1.0);
    let two = SchattenExponent::Finite(2.0);
    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let map = KrausMap::depolarizing(2, lambda)?;
        let v = norm_pq(&map, one, two, InputClass::PositiveTraceOne, solver)?.value;
        let expected = ((1.0 - lambda / 2.0).powi(2) + (lambda / 2.0).powi(2)).sqrt();
        check(format!("depolarizing d=2 lambda={lambda} purity q=2"), v, expected);
    }
    let v = norm_pq(&KrausMap::amplitude_damping(1.0)?, one, two, InputClass::PositiveTraceOne, solver)?.value;
    check("amplitude_damping gamma=1 purity q=2".into(), v, 1.0);
    Ok(out)
}

/// The transpose map on `C²` must be flagged non-CP and refused by the solver.
fn negative_control(solver: &SolverOptions) -> CliResult<(Value, Vec<CheckRow>)> {
    let t = TransposeMap { d: 2 };
    let cert = is_completely_positive(&t)?;
    let strict = SolverOptions { allow_non_cp: false, ..*solver };
    let refused = matches!(
        norm_pq(&t, SchattenExponent::Finite(1.0), SchattenExponent::Finite(2.0), InputClass::Hermitian, &strict),
        Err(CoreError::NotCompletelyPositive { .. })
    );
    let summary = json!({
        "map": "transpose",
        "d": t.input_dim(),
        "min_choi_eigenvalue": cert.min_choi_eigenvalue,
        "completely_positive": cert.completely_positive,
        "refused_without_override": refused,
    });
    let rows = vec![
        CheckRow {
            section: "negative_control",
            label: "transpose d=2 min Choi eigenvalue".into(),
            value: cert.min_choi_eigenvalue,
            expected: Some(-1.0),
            error: None,
            tolerance: -0.99,
            pass: cert.min_choi_eigenvalue <= -0.99 && !cert.completely_positive,
        },
        CheckRow {
            section: "negative_control",
            label: "transpose d=2 refused without override".into(),
            value: if refused { 1.0 } else { 0.0 },
            expected: Some(1.0),
            error: None,
            tolerance: 0.0,
            pass: refused,
        },
    ];
    Ok((summary, rows))
}

fn theorem_checks(rows: &[VerifyRow], params: &VerifyParams) -> Vec<CheckRow> {
    rows.iter()
        .map(|r| CheckRow {
            section: "theorem",
            label: format!("instance {} ({}) p={} q={}", r.instance, r.channel, r.p.0, r.q.0),
            value: r.relative_gap,
            expected: None,
            error: None,
            tolerance: params.gap_tol,
            pass: r.pass,
        })
        .collect()
}

fn run_suite(config: &RunConfig, params: &SuiteParams) -> CliResult<Outcome> {
    let v = &params.verify;
    if v.random == 0 {
        return Err(CliError::Config("suite needs --random N with N >= 1".into()));
    }
    let instances = random_instances(v.random, &v.dims, config.solver.seed, v.scale_kraus)?;
    let strict = SolverOptions { allow_non_cp: false, ..config.solver };
    let rows = verify_instances(&instances, v, &strict)?;
    let finite: Vec<SchattenExponent> = v.exponents.iter().copied().filter(|e| !e.is_infinite()).collect();
    let closed = closed_form_checks(&strict, &finite, params.closed_form_tol)?;
    let (control, control_rows) = negative_control(&config.solver)?;

    let mut table = theorem_checks(&rows, v);
    table.extend(closed.iter().cloned());
    table.extend(control_rows.iter().cloned());
    let mut failures: Vec<String> = rows.iter().filter_map(|r| r.describe_failure(v)).collect();
    failures.extend(
        closed
            .iter()
            .chain(&control_rows)
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {} = {} (expected {:?})", c.section, c.label, c.value, c.expected)),
    );

    let max_closed = closed.iter().filter_map(|c| c.error).fold(0.0_f64, f64::max);
    let results = json!({
        "theorem": {
            "instances": instances.iter().map(Instance::summary).collect::<Vec<_>>(),
            "rows": rows,
        },
        "closed_form": closed,
        "negative_control": control,
    });
    let residuals = json!({
        "theorem": summarize(&rows),
        "closed_form_max_error": max_closed,
        "negative_control_min_choi_eigenvalue": control["min_choi_eigenvalue"],
    });
    let mut checks = verify_checks(v);
    checks["closed_form"] = json!(params.closed_form_tol);
    let csv = csv_of(&table)?;
    Ok(Outcome {
        report: report(config, results, residuals, checks, csv),
        failures,
    })
}
