//! Experiment manifests: everything needed to rerun one command and reproduce its
//! outputs byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curve::CurveConfig;
use crate::error::{Error, Result};

pub const TOOL: &str = "deltaprime";

pub const SUBCOMMANDS: [&str; 6] = ["curve", "transverse", "spectrum1d", "solve2d", "asymptotics", "threshold"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveReference {
    /// Path the configuration was read from, as given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// The configuration itself, so the manifest does not depend on the file.
    pub config: CurveConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveReference>,
    /// Every parameter with defaults resolved, keyed by flag name.
    pub parameters: BTreeMap<String, Value>,
    /// Output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
    /// RFC 3339 creation time; informational only.
    pub timestamp: String,
}

impl ExperimentManifest {
    pub fn new(subcommand: &str, curve: Option<CurveReference>, timestamp: String) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            curve,
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            timestamp,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.into(), value.into());
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ExperimentManifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.tool != TOOL {
            return Err(Error::Config(format!("manifest was written by {:?}, not {TOOL}", self.tool)));
        }
        if !SUBCOMMANDS.contains(&self.subcommand.as_str()) {
            return Err(Error::Config(format!("unknown subcommand {:?}", self.subcommand)));
        }
        if let Some(c) = &self.curve {
            c.config.validate()?;
        }
        for o in &self.outputs {
            if !is_plain_file_name(o) {
                return Err(Error::Config(format!("output {o:?} must be a plain file name")));
            }
        }
        Ok(())
    }

    /// Parameter lookups for replay.
    pub fn f64_param(&self, key: &str) -> Result<Option<f64>> {
        match self.parameters.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::Config(format!("parameter {key} is not a number"))),
        }
    }

    pub fn str_param(&self, key: &str) -> Result<Option<&str>> {
        match self.parameters.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| Error::Config(format!("parameter {key} is not a string"))),
        }
    }
}

fn is_plain_file_name(s: &str) -> bool {
    !s.is_empty() && s != "." && s != ".." && !s.contains(['/', '\\', '\0'])
}
