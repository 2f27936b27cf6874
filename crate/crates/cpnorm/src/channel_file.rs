//! Channel-spec JSON.
//!
//! ```json
//! {"name": "dep", "family": "depolarizing", "params": {"d": 2, "lambda": 0.5}}
//! {"name": "k", "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}
//! ```
//!
//! `kraus` is a list of `d_out × d_in` matrices of `[re, im]` pairs. A bare
//! top-level list is read as `kraus`. The optional `dims: [d_in, d_out]` is
//! checked against the operators.

use std::fs;
use std::path::Path;

use cpnorm_core::{ChannelFamily, ChannelSpec, ComplexMatrix, C64};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::report::matrix_json;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn load(path: &Path) -> CliResult<ChannelSpec> {
    let text = fs::read_to_string(path).map_err(|e| bad(format!("cannot read channel file {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let default_name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("channel");
    from_json(&value, default_name)
}

pub fn from_json(value: &Value, default_name: &str) -> CliResult<ChannelSpec> {
    let obj = match value {
        Value::Array(_) => {
            let kraus = parse_kraus(value)?;
            return Ok(ChannelSpec::new(default_name, ChannelFamily::Explicit { kraus }));
        }
        Value::Object(obj) => obj,
        _ => return Err(bad("channel spec must be a JSON object or a list of Kraus operators")),
    };
    for key in obj.keys() {
        if !["name", "family", "params", "kraus", "dims"].contains(&key.as_str()) {
            return Err(bad(format!("unknown channel-spec field `{key}`")));
        }
    }
    let name = match obj.get("name") {
        None => default_name.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(bad("`name` must be a string")),
    };
    let empty = Map::new();
    let params = match obj.get("params") {
        None => &empty,
        Some(Value::Object(p)) => p,
        Some(_) => return Err(bad("`params` must be an object")),
    };
    let family = match (obj.get("family").map(Value::as_str), obj.get("kraus")) {
        (Some(None), _) => return Err(bad("`family` must be a string")),
        (None | Some(Some("explicit")), Some(k)) => ChannelFamily::Explicit { kraus: parse_kraus(k)? },
        (Some(Some("explicit")), None) | (None, None) => return Err(bad("explicit channel needs `kraus`")),
        (Some(Some(f)), Some(_)) => return Err(bad(format!("`kraus` given for family `{f}`"))),
        (Some(Some(f)), None) => family_from_params(f, params)?,
    };
    if let Some(dims) = obj.get("dims") {
        check_dims(dims, &family)?;
    }
    Ok(ChannelSpec::new(name, family))
}

fn family_from_params(family: &str, params: &Map<String, Value>) -> CliResult<ChannelFamily> {
    let float = |key: &str| -> CliResult<f64> {
        params
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| bad(format!("family `{family}` needs numeric param `{key}`")))
    };
    let count = |key: &str| -> CliResult<usize> {
        params
            .get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| bad(format!("family `{family}` needs non-negative integer param `{key}`")))
    };
    Ok(match family {
        "identity" => ChannelFamily::Identity { d: count("d")? },
        "depolarizing" => ChannelFamily::Depolarizing {
            d: count("d")?,
            lambda: float("lambda")?,
        },
        "amplitude_damping" => ChannelFamily::AmplitudeDamping { gamma: float("gamma")? },
        "random_stinespring" => ChannelFamily::RandomStinespring {
            d_in: count("d_in")?,
            d_out: count("d_out")?,
            kraus_rank: count("kraus_rank")?,
            seed: params.get("seed").map_or(Ok(0), |v| v.as_u64().ok_or_else(|| bad("`seed` must be a non-negative integer")))?,
        },
        "transpose" => ChannelFamily::Transpose { d: count("d")? },
        other => return Err(bad(format!("unknown channel family `{other}`"))),
    })
}

fn parse_kraus(value: &Value) -> CliResult<Vec<ComplexMatrix>> {
    let ops = value.as_array().ok_or_else(|| bad("`kraus` must be a list of matrices"))?;
    if ops.is_empty() {
        return Err(bad("`kraus` is empty"));
    }
    let mut kraus = Vec::with_capacity(ops.len());
    for (k, op) in ops.iter().enumerate() {
        let rows = op
            .as_array()
            .filter(|r| !r.is_empty())
            .ok_or_else(|| bad(format!("Kraus operator {k} must be a non-empty list of rows")))?;
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let entries = row.as_array().ok_or_else(|| bad(format!("Kraus operator {k}: rows must be lists")))?;
            let mut out = Vec::with_capacity(entries.len());
            for z in entries {
                out.push(parse_complex(z).ok_or_else(|| bad(format!("Kraus operator {k}: entries must be [re, im] pairs")))?);
            }
            parsed.push(out);
        }
        let m = ComplexMatrix::from_rows(&parsed).map_err(|e| bad(format!("Kraus operator {k}: {e}")))?;
        if let Some(first) = kraus.first() {
            let first: &ComplexMatrix = first;
            if first.shape() != m.shape() {
                return Err(bad(format!(
                    "Kraus operator {k} is {:?}, operator 0 is {:?}",
                    m.shape(),
                    first.shape()
                )));
            }
        }
        kraus.push(m);
    }
    Ok(kraus)
}

fn parse_complex(z: &Value) -> Option<C64> {
    match z.as_array()?.as_slice() {
        [re, im] => Some(C64::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

fn check_dims(dims: &Value, family: &ChannelFamily) -> CliResult<()> {
    let pair = dims
        .as_array()
        .and_then(|d| match d.as_slice() {
            [a, b] => Some((a.as_u64()? as usize, b.as_u64()? as usize)),
            _ => None,
        })
        .ok_or_else(|| bad("`dims` must be [d_in, d_out]"))?;
    let expected = match family {
        ChannelFamily::Explicit { kraus } => (kraus[0].cols(), kraus[0].rows()),
        ChannelFamily::Identity { d } | ChannelFamily::Depolarizing { d, .. } | ChannelFamily::Transpose { d } => (*d, *d),
        ChannelFamily::AmplitudeDamping { .. } => (2, 2),
        ChannelFamily::RandomStinespring { d_in, d_out, .. } => (*d_in, *d_out),
    };
    if pair != expected {
        return Err(bad(format!("`dims` {pair:?} does not match the channel's (d_in, d_out) = {expected:?}")));
    }
    Ok(())
}

/// Inverse of [`from_json`].
pub fn to_json(spec: &ChannelSpec) -> Value {
    let params = match &spec.family {
        ChannelFamily::Identity { d } | ChannelFamily::Transpose { d } => json!({ "d": d }),
        ChannelFamily::Depolarizing { d, lambda } => json!({ "d": d, "lambda": lambda }),
        ChannelFamily::AmplitudeDamping { gamma } => json!({ "gamma": gamma }),
        ChannelFamily::RandomStinespring {
            d_in,
            d_out,
            kraus_rank,
            seed,
        } => json!({ "d_in": d_in, "d_out": d_out, "kraus_rank": kraus_rank, "seed": seed }),
        ChannelFamily::Explicit { kraus } => {
            let ops: Vec<Value> = kraus.iter().map(matrix_json).collect();
            return json!({ "name": spec.name, "family": "explicit", "kraus": ops });
        }
    };
    json!({ "name": spec.name, "family": spec.family.name(), "params": params })
}
