use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;

use super::{AssemblyClass, Builtin, WeightRule};
use crate::error::{Error, Result};
use crate::number::Real;

/// User-supplied class definition, read from JSON or TOML.
///
/// Weights are strings such as `"1/3"` so that exact values survive the
/// round trip through the document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub rho: Option<Real>,
    #[serde(default)]
    pub weights: Option<Vec<Real>>,
    #[serde(default)]
    pub formula: Option<Formula>,
}

/// Named weight formulas.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Formula {
    Permutations,
    Mappings,
    TwoRegularGraphs,
    SetPartitions,
    Forests,
    /// `lambda_j = theta / (j * radius^j)` for `j >= min_size`.
    Logarithmic {
        theta: Real,
        radius: Real,
        #[serde(default = "default_min_size")]
        min_size: usize,
    },
}

fn default_min_size() -> usize {
    1
}

impl ClassConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a `.toml` file as TOML and anything else as JSON.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            _ => Self::from_json_str(&text),
        }
    }
}

fn exact(value: &Real, what: &str) -> Result<BigRational> {
    value.as_exact().cloned().ok_or_else(|| {
        Error::Config(format!(
            "{what} must be an exact rational string, got {value}"
        ))
    })
}

pub fn class_from_config(config: &ClassConfig) -> Result<AssemblyClass> {
    let rho = config.rho.clone().ok_or(Error::MissingRho)?;
    let rule = match (&config.weights, &config.formula) {
        (Some(_), Some(_)) | (None, None) => return Err(Error::AmbiguousWeights),
        (Some(list), None) => {
            let weights = list
                .iter()
                .enumerate()
                .map(|(i, w)| exact(w, &format!("weight {}", i + 1)))
                .collect::<Result<Vec<_>>>()?;
            WeightRule::Explicit(weights)
        }
        (None, Some(formula)) => match formula {
            Formula::Permutations => WeightRule::Builtin(Builtin::Permutations),
            Formula::Mappings => WeightRule::Builtin(Builtin::Mappings),
            Formula::TwoRegularGraphs => WeightRule::Builtin(Builtin::TwoRegularGraphs),
            Formula::SetPartitions => WeightRule::Builtin(Builtin::SetPartitions),
            Formula::Forests => WeightRule::Builtin(Builtin::Forests),
            Formula::Logarithmic {
                theta,
                radius,
                min_size,
            } => WeightRule::Logarithmic {
                theta: exact(theta, "theta")?,
                radius: exact(radius, "radius")?,
                min_size: *min_size,
            },
        },
    };
    let description = config
        .description
        .clone()
        .unwrap_or_else(|| "user-defined class".to_string());
    AssemblyClass::new(config.name.clone(), description, rho, rule)
}
