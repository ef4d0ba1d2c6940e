//! Kernel configuration files (TOML, or JSON when the text starts with `{`).
//!
//! ```toml
//! q = 4
//! q_tilde = 6
//! mu = 2.8
//! schedule = "layered"
//! rows_per_layer = 1
//! cn_storage = "compressed"
//! tie_mode = "always_positive"
//! max_iter = 20
//!
//! [luts]
//! 2 = "[0, 1, 2, 3, 4, 5, 6, 7]"
//! 3 = "[0, 1, 1, 3, 3, 3, 7, 7]"
//! 6 = "[0, 1, 1, 2, 2, 7, 7, 7]"
//! ```
//!
//! A single `lut = "..."` key applies one framing to every degree; with
//! neither key the kernel is min-sum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CnStorage, KernelSpec, Schedule};
use crate::code::{group_layers_in_order, QcCode};
use crate::error::{Error, Result};
use crate::framing::{Alphabet, FramingFunction, FramingSet, TieMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    #[default]
    Flooding,
    Layered,
}

fn default_max_iter() -> usize {
    20
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub q: u32,
    pub q_tilde: u32,
    pub mu: f64,
    #[serde(default)]
    pub schedule: ScheduleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows_per_layer: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_order: Option<Vec<usize>>,
    #[serde(default)]
    pub cn_storage: CnStorage,
    #[serde(default)]
    pub tie_mode: TieMode,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_true")]
    pub early_exit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lut: Option<FramingFunction>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub luts: BTreeMap<String, FramingFunction>,
}

impl KernelConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: KernelConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.framings()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.q, self.q_tilde).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn framings(&self) -> Result<FramingSet> {
        let max = self.alphabet()?.max();
        let check = |f: &FramingFunction| {
            if f.max() == max {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "LUT {f} does not have {} entries",
                    max + 1
                )))
            }
        };
        match (&self.lut, self.luts.is_empty()) {
            (Some(_), false) => Err(Error::Config(
                "give either `lut` or `luts`, not both".into(),
            )),
            (Some(f), true) => {
                check(f)?;
                Ok(FramingSet::Uniform(f.clone()))
            }
            (None, true) => Ok(FramingSet::Uniform(FramingFunction::identity(max))),
            (None, false) => {
                let mut map = BTreeMap::new();
                for (k, f) in &self.luts {
                    let d: usize = k
                        .parse()
                        .ok()
                        .filter(|&d| d >= 1)
                        .ok_or_else(|| Error::Config(format!("bad VN degree key {k:?}")))?;
                    check(f)?;
                    map.insert(d, f.clone());
                }
                Ok(FramingSet::PerDegree(map))
            }
        }
    }

    /// Builds the kernel; layered schedules are resolved against `code`.
    pub fn to_spec(&self, code: Option<&QcCode>) -> Result<KernelSpec> {
        let schedule = match self.schedule {
            ScheduleKind::Flooding => Schedule::Flooding,
            ScheduleKind::Layered => {
                let code = code.ok_or_else(|| {
                    Error::Config("layered schedule needs a QC base matrix".into())
                })?;
                let order = self
                    .row_order
                    .clone()
                    .unwrap_or_else(|| (0..code.rows()).collect());
                let rpl = self.rows_per_layer.unwrap_or(1);
                Schedule::Layered(group_layers_in_order(code, &order, rpl)?)
            }
        };
        let spec = KernelSpec {
            alphabet: self.alphabet()?,
            framings: self.framings()?,
            mu: self.mu,
            schedule,
            cn_storage: self.cn_storage,
            max_iter: self.max_iter,
            tie_mode: self.tie_mode,
            early_exit: self.early_exit,
        };
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }
}
