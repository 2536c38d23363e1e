use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fourier::DecodeParams;
use crate::gadget::{GadgetParams, OmegaBeta};
use crate::oracles::Budget;
use crate::rational::{self, ratio, Rational};

use super::generate::PlantedSseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Kcut,
    Dalks,
    Muchb,
    Biclique,
    Amplify,
    Decode,
}

impl Pipeline {
    pub const ALL: [Pipeline; 6] = [
        Pipeline::Kcut,
        Pipeline::Dalks,
        Pipeline::Muchb,
        Pipeline::Biclique,
        Pipeline::Amplify,
        Pipeline::Decode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Kcut => "kcut",
            Pipeline::Dalks => "dalks",
            Pipeline::Muchb => "muchb",
            Pipeline::Biclique => "biclique",
            Pipeline::Amplify => "amplify",
            Pipeline::Decode => "decode",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pipeline::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown pipeline {s:?}")))
    }
}

/// The planted SSE instance and its promise parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceConfig {
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    #[serde(with = "rational::serde_str")]
    pub phi: Rational,
    #[serde(with = "rational::serde_str")]
    pub degree: Rational,
    #[serde(with = "rational::serde_str")]
    pub eta: Rational,
    #[serde(with = "rational::serde_str")]
    pub m: Rational,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            n: 6,
            delta: ratio(1, 3),
            phi: ratio(1, 8),
            degree: ratio(1, 1),
            eta: ratio(1, 4),
            m: ratio(2, 1),
        }
    }
}

impl InstanceConfig {
    pub fn spec(&self, seed: u64) -> PlantedSseSpec {
        PlantedSseSpec {
            n: self.n,
            delta: self.delta.clone(),
            phi: self.phi.clone(),
            degree: self.degree.clone(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GadgetConfig {
    pub r: usize,
    pub k: usize,
    pub ell: usize,
    #[serde(with = "rational::serde_str")]
    pub eps_t: Rational,
    #[serde(with = "rational::serde_str")]
    pub eps_v: Rational,
    #[serde(with = "rational::serde_str")]
    pub beta: Rational,
    /// Materialize the hypergraph by exact enumeration; otherwise sample.
    pub exact: bool,
    pub samples: usize,
}

impl Default for GadgetConfig {
    fn default() -> Self {
        GadgetConfig {
            r: 2,
            k: 1,
            ell: 1,
            eps_t: ratio(1, 8),
            eps_v: ratio(1, 10),
            beta: ratio(1, 2),
            exact: true,
            samples: 4096,
        }
    }
}

impl GadgetConfig {
    pub fn params(&self) -> Result<GadgetParams> {
        GadgetParams::new(
            self.r,
            self.k,
            self.ell,
            self.eps_t.clone(),
            self.eps_v.clone(),
            OmegaBeta::new(self.beta.clone())?,
        )
    }
}

/// Randomized graph product on a planted `K_{planted,planted}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplifyConfig {
    pub n: usize,
    pub planted: usize,
    #[serde(with = "rational::serde_str")]
    pub noise: Rational,
    pub k: usize,
    pub tuples: usize,
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    /// Sampled tuple pairs whose adjacency is recomputed from the base graph.
    pub pair_checks: usize,
}

impl Default for AmplifyConfig {
    fn default() -> Self {
        AmplifyConfig {
            n: 32,
            planted: 16,
            noise: ratio(1, 4),
            k: 3,
            tuples: 512,
            eps: ratio(1, 1),
            pair_checks: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HypergraphConfig {
    pub vertices: usize,
    pub edges: usize,
}

impl Default for HypergraphConfig {
    fn default() -> Self {
        HypergraphConfig { vertices: 6, edges: 5 }
    }
}

/// One file drives every pipeline; sections a pipeline does not use are
/// ignored by it but still hashed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub pipeline: Pipeline,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub instance: InstanceConfig,
    #[serde(default)]
    pub gadget: GadgetConfig,
    #[serde(default = "desk_decode")]
    pub decode: DecodeParams,
    #[serde(default)]
    pub amplify: AmplifyConfig,
    #[serde(default)]
    pub hypergraph: HypergraphConfig,
}

/// Decoder defaults for desk-scale instances: `κ = 1/10`. The asymptotic
/// `κ = 1/16` admits every coordinate when `R` is 2 or 3, which makes the
/// decoder uniform.
pub fn desk_decode() -> DecodeParams {
    DecodeParams {
        kappa: ratio(1, 10),
        ..DecodeParams::default()
    }
}

fn default_budget() -> u64 {
    Budget::default().0 as u64
}

impl Config {
    pub fn new(pipeline: Pipeline) -> Self {
        Config {
            pipeline,
            seed: 0,
            budget: default_budget(),
            instance: InstanceConfig::default(),
            gadget: GadgetConfig::default(),
            decode: desk_decode(),
            amplify: AmplifyConfig::default(),
            hypergraph: HypergraphConfig::default(),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads `.json` files as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn budget(&self) -> Budget {
        Budget::new(self.budget as u128)
    }

    /// SHA-256 of the canonical JSON encoding, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
