//! JSON curve configuration and the assembled curve model consumed by the solvers.

use serde::{Deserialize, Serialize};

use super::planar::{curve_from_curvature_with, PlanarCurve, ReconstructionOptions};
use super::profile::{CurvatureProfile, CurveBounds};
use super::tube::{injectivity_halfwidth, InjectivityOptions};
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: f64 = 20.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Line {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    GaussianBump {
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    TwoBump {
        c: f64,
        s0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

impl CurveConfig {
    pub fn line() -> Self {
        CurveConfig::Line {
            window: None,
            tolerance: None,
        }
    }

    pub fn gaussian_bump(c: f64) -> Self {
        CurveConfig::GaussianBump {
            c,
            window: None,
            tolerance: None,
        }
    }

    pub fn two_bump(c: f64, s0: f64) -> Self {
        CurveConfig::TwoBump {
            c,
            s0,
            window: None,
            tolerance: None,
        }
    }

    /// Parses and validates a configuration document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CurveConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve config serializes")
    }

    pub fn family(&self) -> &'static str {
        match self {
            CurveConfig::Line { .. } => "line",
            CurveConfig::GaussianBump { .. } => "gaussian_bump",
            CurveConfig::TwoBump { .. } => "two_bump",
        }
    }

    pub fn window(&self) -> f64 {
        match self {
            CurveConfig::Line { window, .. }
            | CurveConfig::GaussianBump { window, .. }
            | CurveConfig::TwoBump { window, .. } => window.unwrap_or(DEFAULT_WINDOW),
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            CurveConfig::Line { tolerance, .. }
            | CurveConfig::GaussianBump { tolerance, .. }
            | CurveConfig::TwoBump { tolerance, .. } => tolerance.unwrap_or(DEFAULT_TOLERANCE),
        }
    }

    pub fn profile(&self) -> CurvatureProfile {
        match *self {
            CurveConfig::Line { .. } => CurvatureProfile::Line,
            CurveConfig::GaussianBump { c, .. } => CurvatureProfile::GaussianBump { c },
            CurveConfig::TwoBump { c, s0, .. } => CurvatureProfile::TwoBump { c, s0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite")))
            }
        };
        match *self {
            CurveConfig::Line { .. } => {}
            CurveConfig::GaussianBump { c, .. } => finite("c", c)?,
            CurveConfig::TwoBump { c, s0, .. } => {
                finite("c", c)?;
                finite("s0", s0)?;
            }
        }
        let w = self.window();
        if !(w.is_finite() && w > 0.0 && w <= 1e4) {
            return Err(Error::Config(format!("window {w} must lie in (0, 1e4]")));
        }
        let t = self.tolerance();
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(Error::Config(format!("tolerance {t} must lie in (0, 1)")));
        }
        Ok(())
    }
}

/// Everything the spectral modules need to know about a curve.
#[derive(Debug, Clone)]
pub struct CurveModel {
    pub config: CurveConfig,
    pub profile: CurvatureProfile,
    pub curve: PlanarCurve,
    pub bounds: CurveBounds,
    /// Estimated injectivity half-width `d` on the configured window.
    pub injectivity: f64,
}

impl CurveModel {
    pub fn from_config(config: &CurveConfig) -> Result<Self> {
        Self::with_injectivity(config, InjectivityOptions::default())
    }

    pub fn with_injectivity(config: &CurveConfig, opts: InjectivityOptions) -> Result<Self> {
        config.validate()?;
        let profile = config.profile();
        let window = config.window();
        let curve = match config {
            CurveConfig::Line { .. } => PlanarCurve::Line,
            _ => curve_from_curvature_with(
                &profile,
                ReconstructionOptions {
                    window,
                    tolerance: config.tolerance(),
                    ..Default::default()
                },
            )?,
        };
        let bounds = profile.bounds(window);
        let injectivity = injectivity_halfwidth(&curve, window, opts)?;
        Ok(Self {
            config: config.clone(),
            profile,
            curve,
            bounds,
            injectivity,
        })
    }

    /// Same geometry with `gamma -> -gamma` (the curve mirrored across its chord).
    pub fn reflected(&self) -> Self {
        let mut m = self.clone();
        m.profile = self.profile.reflected();
        m.config = match self.config.clone() {
            CurveConfig::GaussianBump { c, window, tolerance } => CurveConfig::GaussianBump {
                c: -c,
                window,
                tolerance,
            },
            CurveConfig::TwoBump {
                c,
                s0,
                window,
                tolerance,
            } => CurveConfig::TwoBump {
                c: -c,
                s0,
                window,
                tolerance,
            },
            line => line,
        };
        m.curve = match &self.curve {
            PlanarCurve::Line => PlanarCurve::Line,
            _ => curve_from_curvature_with(
                &m.profile,
                ReconstructionOptions {
                    window: self.config.window(),
                    tolerance: self.config.tolerance(),
                    ..Default::default()
                },
            )
            .expect("reflected reconstruction mirrors a successful one"),
        };
        m
    }
}
