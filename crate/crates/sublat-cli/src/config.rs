//! Experiment configuration: one JSON-serializable struct shared by the CLI
//! flags and `--config` files. Mode and site indices are 1-based here, on
//! the external surface; the runner converts to the crate's 0-based API.

use serde::{Deserialize, Serialize};
use sublat::model::{Boundary, Topology};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SpectrumScatter,
    MuSweep,
    InteractionSweep,
    Crosscheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SpectrumScatter => "spectrum_scatter",
            ExperimentKind::MuSweep => "mu_sweep",
            ExperimentKind::InteractionSweep => "interaction_sweep",
            ExperimentKind::Crosscheck => "crosscheck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Which fermionic modes the entropy is taken over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubsetSpec {
    Named(NamedSubset),
    /// Explicit 1-based mode indices.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedSubset {
    SublatticeB,
}

impl Default for SubsetSpec {
    fn default() -> Self {
        SubsetSpec::Named(NamedSubset::SublatticeB)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Topology>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default = "default_alpha", with = "alpha_serde")]
    pub alpha: f64,
    #[serde(default)]
    pub subset: SubsetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default)]
    pub plot: bool,
}

fn default_seed() -> u64 {
    1
}

fn default_alpha() -> f64 {
    1.0
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

/// JSON has no infinity literal, so `alpha` serializes as a number or the
/// string `"inf"`.
mod alpha_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(alpha: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if alpha.is_infinite() {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(*alpha)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(x) => Ok(x),
            Raw::Text(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Text(s) => Err(de::Error::custom(format!(
                "alpha must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(format!("config JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse `--grid` values: either `a:b:step` (inclusive, step > 0) or a
/// comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, RunError> {
    let bad = |msg: &str| RunError::Config(format!("grid: {msg} (got {text:?})"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected a:b:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(&format!("{e}")))?;
        let (a, b, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || step.is_nan() || !a.is_finite() || !b.is_finite() || b < a {
            return Err(bad("need finite a <= b and step > 0"));
        }
        let mut grid = Vec::new();
        let mut k = 0u64;
        loop {
            let x = a + step * k as f64;
            if x > b + 1e-12 * step.max(1.0) {
                break;
            }
            grid.push(x.min(b));
            k += 1;
        }
        Ok(grid)
    } else {
        let grid: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(&format!("{e}")))?;
        if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
            return Err(bad("need at least one finite value"));
        }
        Ok(grid)
    }
}

pub fn parse_alpha(text: &str) -> Result<f64, RunError> {
    if text == "inf" {
        return Ok(f64::INFINITY);
    }
    let alpha: f64 = text
        .parse()
        .map_err(|e| RunError::Config(format!("alpha: {e} (got {text:?})")))?;
    if alpha > 0.0 {
        Ok(alpha)
    } else {
        Err(RunError::Config(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

pub fn parse_subset(text: &str) -> Result<SubsetSpec, RunError> {
    if text == "sublattice_b" {
        return Ok(SubsetSpec::Named(NamedSubset::SublatticeB));
    }
    let indices: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| RunError::Config(format!("subset: {e} (got {text:?})")))?;
    if indices.contains(&0) {
        return Err(RunError::Config("subset: mode indices are 1-based".into()));
    }
    Ok(SubsetSpec::Explicit(indices))
}

pub fn parse_boundary(text: &str) -> Result<Boundary, RunError> {
    match text {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        other => Err(RunError::Config(format!(
            "boundary must be open or periodic, got {other:?}"
        ))),
    }
}

pub fn parse_topology(text: &str) -> Result<Topology, RunError> {
    match text {
        "chain_nn" => Ok(Topology::ChainNn),
        "dense" => Ok(Topology::Dense),
        other => Err(RunError::Config(format!(
            "topology must be chain_nn or dense, got {other:?}"
        ))),
    }
}

pub fn parse_format(text: &str) -> Result<OutputFormat, RunError> {
    match text {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(RunError::Config(format!(
            "format must be csv or json, got {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_range_and_list() {
        assert_eq!(parse_grid("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.25").unwrap(), vec![0.25]);
        assert_eq!(parse_grid("1, 2, 3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn grid_endpoint_inclusive_with_roundoff() {
        let g = parse_grid("0:2:0.4").unwrap();
        assert_eq!(g.len(), 6);
        assert!((g[5] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_parse_and_roundtrip() {
        assert_eq!(parse_alpha("2").unwrap(), 2.0);
        assert!(parse_alpha("inf").unwrap().is_infinite());
        assert!(parse_alpha("0").is_err());
        let cfg = ExperimentConfig {
            kind: ExperimentKind::SpectrumScatter,
            n: 8,
            seed: 7,
            boundary: None,
            topology: None,
            grid: None,
            alpha: f64::INFINITY,
            subset: SubsetSpec::default(),
            out: None,
            format: OutputFormat::Csv,
            plot: false,
        };
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert!(back.alpha.is_infinite());
        assert_eq!(back, cfg);
    }

    #[test]
    fn subset_parse() {
        assert_eq!(parse_subset("sublattice_b").unwrap(), SubsetSpec::default());
        assert_eq!(
            parse_subset("2,5,6").unwrap(),
            SubsetSpec::Explicit(vec![2, 5, 6])
        );
        assert!(parse_subset("0,1").is_err(), "1-based indices");
        assert!(parse_subset("b").is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg =
            ExperimentConfig::from_json(r#"{"kind": "mu_sweep", "n": 200, "grid": [0.0, 0.5]}"#)
                .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::MuSweep);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.alpha, 1.0);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert!(!cfg.plot);
    }
}
