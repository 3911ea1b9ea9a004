use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use socnav_core::env::EnvConfig;
use socnav_core::planners::DwaParams;

/// Benchmark configuration file: an `[env]` table and a `[dwa]` table, both
/// optional and both defaulting field by field, nested tables included.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub env: EnvConfig,
    pub dwa: DwaParams,
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let patch: toml::Table = toml::from_str(text)?;
        let mut base = toml::Table::try_from(BenchConfig::default())?;
        merge(&mut base, patch);
        let cfg: BenchConfig = base.try_into()?;
        cfg.env.validate()?;
        cfg.dwa.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> anyhow::Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

fn merge(base: &mut toml::Table, patch: toml::Table) {
    for (k, v) in patch {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(slot)), toml::Value::Table(t)) => merge(slot, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
