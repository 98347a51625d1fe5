//! Run configuration: search caps, tolerances, and the seed for randomized
//! corpora. Round-trips losslessly through TOML; the CLI lets flags override
//! file values.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Max nodes touched per level of the p-adic root tree.
    pub root_tree_cap: u64,
    /// Max points enumerated in any box / residue-grid sum.
    pub box_volume_cap: u64,
    /// Largest N solved by exhaustive subset enumeration.
    pub exhaustive_n_cap: u32,
    /// Largest N attempted by branch-and-bound before degrading to greedy.
    pub branch_and_bound_n_cap: u32,
    /// Float slack per check, relative.
    pub float_slack: f64,
    /// Hard ceiling for prime tables.
    pub prime_limit: u64,
    /// Field-extension degree cap for smoothness scans.
    pub ext_degree_cap: u32,
    /// Depth cap for per-prime certification searches.
    pub cert_depth_max: u32,
    /// Cap for the gradient level gamma_d(p).
    pub gamma_cap: u32,
    /// Output format for table-like CLI results.
    pub output: OutputFormat,
    /// Seed for every randomized corpus; fixed seed means fixed corpus.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            root_tree_cap: 1 << 22,
            box_volume_cap: 4_000_000,
            exhaustive_n_cap: 24,
            branch_and_bound_n_cap: 220,
            float_slack: 1e-9,
            prime_limit: 100_000_000,
            ext_degree_cap: 2,
            cert_depth_max: 8,
            gamma_cap: 12,
            output: OutputFormat::Json,
            seed: 0x5eed_cafe,
        }
    }
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization")
    }

    pub fn validate(&self) -> Result<()> {
        let caps = [
            ("root_tree_cap", self.root_tree_cap),
            ("box_volume_cap", self.box_volume_cap),
            ("exhaustive_n_cap", self.exhaustive_n_cap as u64),
            ("branch_and_bound_n_cap", self.branch_and_bound_n_cap as u64),
            ("prime_limit", self.prime_limit),
            ("ext_degree_cap", self.ext_degree_cap as u64),
            ("cert_depth_max", self.cert_depth_max as u64),
            ("gamma_cap", self.gamma_cap as u64),
        ];
        for (name, value) in caps {
            if value == 0 {
                return Err(Error::Invalid(format!("cap {name} must be positive")));
            }
        }
        if !(self.float_slack > 0.0) {
            return Err(Error::Invalid("float_slack must be positive".into()));
        }
        Ok(())
    }

    /// Hash of the canonical TOML form; embedded in outputs for provenance.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_is_lossless() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
    }

    #[test]
    fn partial_configs_fill_defaults() {
        let cfg = RunConfig::from_toml("seed = 7\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.ext_degree_cap, RunConfig::default().ext_degree_cap);
    }

    #[test]
    fn zero_caps_rejected() {
        let mut cfg = RunConfig::default();
        cfg.gamma_cap = 0;
        assert!(cfg.validate().is_err());
    }
}
