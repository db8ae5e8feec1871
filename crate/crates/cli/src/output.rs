//! Invocation plumbing shared by all subcommands: curve loading, output files, manifests
//! and exit codes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use deltaprime::curve::{CurveConfig, CurveModel};
use deltaprime::manifest::{CurveReference, ExperimentManifest};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::commands::{AsymptoticsArgs, CurveArgs, Solve2dArgs, Spectrum1dArgs, ThresholdArgs, TransverseArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(deltaprime::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<deltaprime::Error> for CliError {
    fn from(e: deltaprime::Error) -> Self {
        CliError::Core(e)
    }
}

/// Files and console text produced by one subcommand.
pub struct Report {
    /// `(file name, contents)`; the first entry names the manifest.
    pub files: Vec<(String, String)>,
    pub stdout: String,
}

pub trait Experiment: Serialize + DeserializeOwned + 'static {
    const NAME: &'static str;
    const DEFAULT_OUT: &'static str;

    /// Curve configuration file given on the command line, if the subcommand takes one.
    fn curve_path(&self) -> Option<&Path>;

    fn out(&self) -> Option<&str>;

    fn out_mut(&mut self) -> &mut Option<String>;

    fn run(&self, curve: Option<&CurveModel>, primary: &str) -> Result<Report, CliError>;
}

type Runner = Box<dyn FnOnce(Option<&CurveModel>) -> Result<Report, CliError>>;

pub struct Invocation {
    manifest: ExperimentManifest,
    /// Directory forced by a path-valued `--out`.
    out_parent: Option<PathBuf>,
    runner: Runner,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl Invocation {
    pub fn fresh<A: Experiment>(mut args: A) -> Result<Self, CliError> {
        let curve = match args.curve_path() {
            Some(p) => Some(CurveReference {
                path: Some(p.display().to_string()),
                config: CurveConfig::from_json(&read(p)?)?,
            }),
            None => None,
        };
        let out = args.out_mut().take().unwrap_or_else(|| A::DEFAULT_OUT.to_string());
        let out_path = PathBuf::from(&out);
        let name = out_path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Usage(format!("--out {out:?} has no file name")))?
            .to_string();
        let out_parent = out_path.parent().filter(|p| !p.as_os_str().is_empty()).map(Path::to_path_buf);
        *args.out_mut() = Some(name);
        Self::build(args, curve, out_parent)
    }

    fn build<A: Experiment>(args: A, curve: Option<CurveReference>, out_parent: Option<PathBuf>) -> Result<Self, CliError> {
        let mut manifest = ExperimentManifest::new(A::NAME, curve, timestamp());
        match serde_json::to_value(&args).map_err(|e| CliError::Usage(e.to_string()))? {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    manifest.set(&k, v);
                }
            }
            _ => unreachable!("argument structs serialize as objects"),
        }
        let runner: Runner = Box::new(move |model| {
            let primary = args.out().unwrap_or(A::DEFAULT_OUT).to_string();
            args.run(model, &primary)
        });
        Ok(Self {
            manifest,
            out_parent,
            runner,
        })
    }

    pub fn replay(path: &Path) -> Result<Self, CliError> {
        let m = ExperimentManifest::from_json(&read(path)?)?;
        let params = serde_json::Value::Object(m.parameters.clone().into_iter().collect());
        let curve = m.curve.clone();
        fn decode<A: Experiment>(v: serde_json::Value) -> Result<A, CliError> {
            serde_json::from_value(v).map_err(|e| CliError::Core(deltaprime::Error::Config(format!("manifest parameters: {e}"))))
        }
        match m.subcommand.as_str() {
            "curve" => Self::build(decode::<CurveArgs>(params)?, curve, None),
            "transverse" => Self::build(decode::<TransverseArgs>(params)?, curve, None),
            "spectrum1d" => Self::build(decode::<Spectrum1dArgs>(params)?, curve, None),
            "solve2d" => Self::build(decode::<Solve2dArgs>(params)?, curve, None),
            "asymptotics" => Self::build(decode::<AsymptoticsArgs>(params)?, curve, None),
            "threshold" => Self::build(decode::<ThresholdArgs>(params)?, curve, None),
            other => Err(CliError::Usage(format!("cannot replay {other:?}"))),
        }
    }

    pub fn execute(self, dir: &Path) -> Result<(), CliError> {
        let dir = self.out_parent.clone().unwrap_or_else(|| dir.to_path_buf());
        let model = match &self.manifest.curve {
            Some(c) => Some(CurveModel::from_config(&c.config)?),
            None => None,
        };
        let report = (self.runner)(model.as_ref())?;
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        let mut manifest = self.manifest;
        for (name, contents) in &report.files {
            let p = dir.join(name);
            fs::write(&p, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
            manifest.outputs.push(name.clone());
        }
        let stem = report
            .files
            .first()
            .map(|(n, _)| Path::new(n).file_stem().and_then(|s| s.to_str()).unwrap_or(n).to_string())
            .unwrap_or_else(|| manifest.subcommand.clone());
        let mpath = dir.join(format!("{stem}.manifest.json"));
        fs::write(&mpath, manifest.to_json()).map_err(|e| CliError::Io(format!("cannot write {}: {e}", mpath.display())))?;
        print!("{}", report.stdout);
        Ok(())
    }
}

/// `x` in shortest round-trip form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Io("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(deltaprime::Error::Parameter("x".into())).exit_code(), 2);
        let regime = deltaprime::Error::Regime { ratio: 1.0, coupling: 0.0 };
        assert_eq!(CliError::Core(regime).exit_code(), 2);
        let stuck = deltaprime::Error::NotConverged { iterations: 3, residual: 1.0 };
        assert_eq!(CliError::Core(stuck).exit_code(), 3);
        assert_eq!(CliError::Core(deltaprime::Error::Numerical("x".into())).exit_code(), 3);
    }
}
