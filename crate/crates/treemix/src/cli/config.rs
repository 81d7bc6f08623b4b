//! Per-command configuration: defaults, then a JSON file, then flags.

use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{invalid, Error, Result};
use crate::model::{RcBoundarySpec, SpinBoundarySpec};
use crate::slowmix::HostGraph;

/// Seed used when neither the config file nor a flag sets one.
pub const SEED_ENV: &str = "TREEMIX_SEED";

pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(1)
}

/// Declares a config struct whose fields are all optional. The same struct is
/// the clap argument group, the JSON file schema and (after resolution) the
/// record stored in the manifest.
macro_rules! config {
    ($(#[$sm:meta])* $name:ident { $( $(#[$fm:meta])* $field:ident : $ty:ty = $default:expr ),* $(,)? }) => {
        $(#[$sm])*
        #[derive(Clone, Debug, Default, clap::Args, serde::Serialize, serde::Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fm])*
                #[arg(long)]
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $crate::cli::config::Defaults for $name {
            fn defaults() -> Self {
                #[allow(unused_imports)]
                use $crate::cli::config::*;
                $name { $( $field: $default ),* }
            }
        }
    };
}
pub(crate) use config;

pub trait Defaults {
    fn defaults() -> Self;
}

fn overlay(base: &mut Map<String, Value>, top: Value) {
    if let Value::Object(top) = top {
        for (k, v) in top {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
    }
}

/// Defaults, then `file` (JSON object), then the non-null flags.
pub fn resolve<T>(flags: &T, file: Option<&Value>) -> Result<T>
where
    T: Defaults + Serialize + DeserializeOwned,
{
    let mut acc = match serde_json::to_value(T::defaults())? {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Some(f) = file {
        if !f.is_object() {
            return Err(invalid("config", "the config file must hold a JSON object"));
        }
        overlay(&mut acc, f.clone());
    }
    overlay(&mut acc, serde_json::to_value(flags)?);
    serde_json::from_value(Value::Object(acc))
        .map_err(|e| Error::Parse(format!("config: {e}")))
}

pub fn read_config(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Unwraps a resolved field; `None` means it has no default and was not given.
pub fn req<T: Clone>(v: &Option<T>, name: &'static str) -> Result<T> {
    v.clone().ok_or_else(|| invalid(name, "required but not set"))
}

fn json_or_file<T: DeserializeOwned>(s: &str) -> std::result::Result<Option<T>, String> {
    let text = if let Some(path) = s.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?
    } else if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        return Ok(None);
    };
    serde_json::from_str(&text).map(Some).map_err(|e| e.to_string())
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<T>().map_err(|_| format!("bad list entry `{x}`")))
        .collect()
}

/// `mono:K`, `free`, `random:SEED`, `list:a,b,...`, inline JSON or `@file.json`.
impl FromStr for SpinBoundarySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(spec) = json_or_file(s)? {
            return Ok(spec);
        }
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "free" => Ok(SpinBoundarySpec::Free),
            "mono" => arg
                .parse()
                .map(|spin| SpinBoundarySpec::Mono { spin })
                .map_err(|_| format!("mono needs a spin, got `{arg}`")),
            "random" => arg
                .parse()
                .map(|seed| SpinBoundarySpec::Random { seed })
                .map_err(|_| format!("random needs a seed, got `{arg}`")),
            "list" => parse_list(arg).map(|spins| SpinBoundarySpec::List { spins }),
            _ => Err(format!("unknown boundary `{s}`")),
        }
    }
}

/// `wired`, `free`, inline JSON or `@file.json`.
impl FromStr for RcBoundarySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Some(spec) = json_or_file(s)? {
            return Ok(spec);
        }
        match s {
            "wired" => Ok(RcBoundarySpec::Wired),
            "free" => Ok(RcBoundarySpec::Free),
            _ => Err(format!("unknown wiring `{s}`")),
        }
    }
}

/// `edge`, `path:M`, `cycle:M`, or a path to an edge-list file.
pub fn host_graph(spec: &str) -> Result<HostGraph> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let count = || -> Result<usize> {
        arg.parse().map_err(|_| invalid("graph", format!("`{spec}` needs an edge count")))
    };
    match kind {
        "edge" => Ok(HostGraph::single_edge()),
        "path" => {
            let m = count()?;
            if m == 0 {
                return Err(invalid("graph", "a path needs at least one edge"));
            }
            Ok(HostGraph::path(m))
        }
        "cycle" => HostGraph::cycle(count()?),
        _ => {
            let text = std::fs::read_to_string(spec)
                .map_err(|e| invalid("graph", format!("{spec}: {e}")))?;
            HostGraph::parse(&text)
        }
    }
}

/// `beta`, or `beta = -ln(1 - p)` when `p` is set.
pub fn coupling(beta: &Option<f64>, p: &Option<f64>) -> Result<f64> {
    match p {
        Some(p) if !(0.0..1.0).contains(p) => Err(invalid("p", format!("must lie in [0, 1), got {p}"))),
        Some(p) => Ok(-(1.0 - p).ln()),
        None => req(beta, "beta"),
    }
}
