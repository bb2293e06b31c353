//! Experiment configuration: one JSON document per run.
//!
//! The keys `command`, `seed`, `tolerance_scale`, `out`, `threads` and
//! `time_budget_s` are common to every command; everything else is parsed
//! into the command's own settings, and unknown keys are rejected.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::resolvsym::{rational_from_json, Q};
use crate::symplin::{random_exact_space, ExactSpace};

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub tolerance_scale: Option<f64>,
    pub out: Option<String>,
    pub threads: Option<usize>,
    pub time_budget_s: Option<f64>,
}

const COMMON_KEYS: [&str; 6] = [
    "command",
    "seed",
    "tolerance_scale",
    "out",
    "threads",
    "time_budget_s",
];

/// Splits a config document into the common part and the command settings.
pub fn split_config<T: DeserializeOwned>(doc: Value) -> Result<(Common, T)> {
    let Value::Object(map) = doc else {
        return Err(Error::Parse("config must be a JSON object".into()));
    };
    let (mut common, mut rest) = (Map::new(), Map::new());
    for (k, v) in map {
        if COMMON_KEYS.contains(&k.as_str()) {
            common.insert(k, v);
        } else {
            rest.insert(k, v);
        }
    }
    let common: Common =
        serde_json::from_value(Value::Object(common)).map_err(|e| Error::Parse(e.to_string()))?;
    let settings: T =
        serde_json::from_value(Value::Object(rest)).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((common, settings))
}

/// A symplectic space: `{"standard": n}`, `{"random": dim}` or `{"form": [[…]]}`
/// with rational entries given as integers, decimals or "p/q" strings.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Standard(usize),
    Random(usize),
    Form(Vec<Vec<Value>>),
}

impl SpaceSpec {
    /// Whether building the space consumes randomness.
    pub fn is_random(&self) -> bool {
        matches!(self, SpaceSpec::Random(_))
    }

    pub fn build<R: rand::Rng>(&self, rng: &mut R) -> Result<ExactSpace> {
        match self {
            SpaceSpec::Standard(n) if *n > 0 => Ok(ExactSpace::standard(*n)),
            SpaceSpec::Standard(_) => Err(Error::InvalidArgument(
                "standard space needs at least one mode".into(),
            )),
            SpaceSpec::Random(d) => random_exact_space(rng, *d),
            SpaceSpec::Form(rows) => ExactSpace::new(rational_matrix(rows)?),
        }
    }
}

pub fn rational_matrix(rows: &[Vec<Value>]) -> Result<Vec<Vec<Q>>> {
    rows.iter()
        .map(|r| r.iter().map(rational_from_json).collect())
        .collect()
}
