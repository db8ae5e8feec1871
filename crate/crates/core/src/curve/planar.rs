//! Unit-speed planar curves and their reconstruction from a curvature profile.

use std::fmt;
use std::sync::Arc;

use super::profile::CurvatureProfile;
use crate::error::{Error, Result};
use crate::ode::{self, Tolerance};

pub type Point = [f64; 2];

/// Position and derivatives through order four at one arc-length value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurveJet {
    pub pos: Point,
    pub d1: Point,
    pub d2: Point,
    pub d3: Point,
    pub d4: Point,
}

/// Unit-speed tolerance on `|Gamma'|^2 - 1`.
pub const UNIT_SPEED_TOL: f64 = 1e-10;

#[derive(Clone)]
pub enum PlanarCurve {
    /// `Gamma(s) = (s, 0)`.
    Line,
    /// `Gamma(s) = (R sin(s/R), R cos(s/R))`, signed curvature `1/R`.
    Circle { radius: f64 },
    /// Curve integrated from a curvature profile.
    Reconstructed(Arc<ReconstructedCurve>),
    /// Closed-form jet supplied by the caller; unit speed is checked on evaluation.
    Custom(Arc<dyn Fn(f64) -> CurveJet + Send + Sync>),
}

impl fmt::Debug for PlanarCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarCurve::Line => write!(f, "Line"),
            PlanarCurve::Circle { radius } => write!(f, "Circle {{ radius: {radius} }}"),
            PlanarCurve::Reconstructed(r) => write!(f, "Reconstructed({:?})", r.profile),
            PlanarCurve::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl PlanarCurve {
    pub fn jet(&self, s: f64) -> Result<CurveJet> {
        match self {
            PlanarCurve::Line => Ok(CurveJet {
                pos: [s, 0.0],
                d1: [1.0, 0.0],
                ..Default::default()
            }),
            PlanarCurve::Circle { radius } => {
                let r = *radius;
                let (sn, cs) = (s / r).sin_cos();
                Ok(CurveJet {
                    pos: [r * sn, r * cs],
                    d1: [cs, -sn],
                    d2: [-sn / r, -cs / r],
                    d3: [-cs / (r * r), sn / (r * r)],
                    d4: [sn / (r * r * r), cs / (r * r * r)],
                })
            }
            PlanarCurve::Reconstructed(c) => c.jet(s),
            PlanarCurve::Custom(f) => Ok(f(s)),
        }
    }

    pub fn point(&self, s: f64) -> Result<Point> {
        Ok(self.jet(s)?.pos)
    }

    /// The curvature profile this curve was built from, when it has one.
    pub fn profile(&self) -> Option<CurvatureProfile> {
        match self {
            PlanarCurve::Line => Some(CurvatureProfile::Line),
            PlanarCurve::Circle { radius } => Some(CurvatureProfile::Constant {
                curvature: 1.0 / radius,
            }),
            PlanarCurve::Reconstructed(c) => Some(c.profile.clone()),
            PlanarCurve::Custom(_) => None,
        }
    }
}

/// Signed curvature `gamma = Gamma1'' Gamma2' - Gamma1' Gamma2''`.
pub fn signed_curvature(curve: &PlanarCurve, s: f64) -> Result<f64> {
    let jet = curve.jet(s)?;
    check_unit_speed(&jet, s)?;
    if let PlanarCurve::Reconstructed(c) = curve {
        return Ok(c.profile.gamma(s));
    }
    Ok(jet.d2[0] * jet.d1[1] - jet.d1[0] * jet.d2[1])
}

pub(crate) fn check_unit_speed(jet: &CurveJet, s: f64) -> Result<()> {
    let speed2 = jet.d1[0] * jet.d1[0] + jet.d1[1] * jet.d1[1];
    if (speed2 - 1.0).abs() > UNIT_SPEED_TOL {
        return Err(Error::geometry(format!(
            "curve is not unit speed at s = {s}: |Gamma'|^2 = {speed2}"
        )));
    }
    Ok(())
}

/// Curvilinear map `(s, u) -> (Gamma1 + u Gamma2', Gamma2 - u Gamma1')`.
///
/// Fails when `|u| >= halfwidth`, where the map may fold.
pub fn map_to_strip(curve: &PlanarCurve, s: f64, u: f64, halfwidth: f64) -> Result<Point> {
    if u.abs() >= halfwidth {
        return Err(Error::geometry(format!(
            "|u| = {} reaches the injectivity half-width {halfwidth}; the strip map may fold",
            u.abs()
        )));
    }
    let j = curve.jet(s)?;
    Ok([j.pos[0] + u * j.d1[1], j.pos[1] - u * j.d1[0]])
}

/// Curve obtained by integrating `theta' = -gamma`, `Gamma' = (cos theta, sin theta)` with
/// `theta(0) = 0`, `Gamma(0) = 0`.
///
/// States are tabulated on a uniform node grid over the window; evaluation integrates from
/// the nearest node, so results do not depend on evaluation order.
pub struct ReconstructedCurve {
    profile: CurvatureProfile,
    node_step: f64,
    /// Nodes at `s = i * node_step` for `i in -n..=n`; stored index `i + n`.
    nodes: Vec<[f64; 3]>,
    tol: Tolerance,
}

impl ReconstructedCurve {
    /// Largest tabulated `|s|`.
    pub fn window(&self) -> f64 {
        self.node_step * ((self.nodes.len() - 1) / 2) as f64
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] + '_ {
        move |s, y| {
            let (sn, cs) = y[0].sin_cos();
            [-self.profile.gamma(s), cs, sn]
        }
    }

    fn state(&self, s: f64) -> Result<[f64; 3]> {
        let n = ((self.nodes.len() - 1) / 2) as i64;
        let i = ((s / self.node_step).round() as i64).clamp(-n, n);
        let s0 = i as f64 * self.node_step;
        let y0 = self.nodes[(i + n) as usize];
        ode::integrate(&self.rhs(), s0, y0, s, self.tol)
    }

    pub fn jet(&self, s: f64) -> Result<CurveJet> {
        let [theta, x, y] = self.state(s)?;
        let g = self.profile.eval(s);
        let (sn, cs) = theta.sin_cos();
        let t = [cs, sn];
        let n = [-sn, cs];
        let comb = |a: f64, b: f64| [a * n[0] + b * t[0], a * n[1] + b * t[1]];
        Ok(CurveJet {
            pos: [x, y],
            d1: t,
            d2: comb(-g.value, 0.0),
            d3: comb(-g.d1, -g.value * g.value),
            d4: comb(g.value.powi(3) - g.d2, -3.0 * g.value * g.d1),
        })
    }

    /// Tangent angle `theta(s)`.
    pub fn angle(&self, s: f64) -> Result<f64> {
        Ok(self.state(s)?[0])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReconstructionOptions {
    /// Tabulation half-window.
    pub window: f64,
    pub node_step: f64,
    pub tolerance: f64,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        Self {
            window: 20.0,
            node_step: 0.05,
            tolerance: 1e-13,
        }
    }
}

pub fn curve_from_curvature(profile: &CurvatureProfile) -> Result<PlanarCurve> {
    curve_from_curvature_with(profile, ReconstructionOptions::default())
}

pub fn curve_from_curvature_with(
    profile: &CurvatureProfile,
    opts: ReconstructionOptions,
) -> Result<PlanarCurve> {
    if !(opts.window > 0.0 && opts.node_step > 0.0 && opts.tolerance > 0.0) {
        return Err(Error::param("reconstruction window, step and tolerance must be positive"));
    }
    let tol = Tolerance {
        abs: opts.tolerance * 0.1,
        rel: opts.tolerance,
        max_step: opts.node_step.min(0.05),
    };
    let n = (opts.window / opts.node_step).ceil() as usize;
    let mut curve = ReconstructedCurve {
        profile: profile.clone(),
        node_step: opts.node_step,
        nodes: vec![[0.0; 3]; 2 * n + 1],
        tol,
    };
    let mut fwd = [0.0; 3];
    let mut bwd = [0.0; 3];
    for i in 1..=n {
        let (a, b) = ((i - 1) as f64 * opts.node_step, i as f64 * opts.node_step);
        fwd = ode::integrate(&curve.rhs(), a, fwd, b, tol)?;
        bwd = ode::integrate(&curve.rhs(), -a, bwd, -b, tol)?;
        curve.nodes[n + i] = fwd;
        curve.nodes[n - i] = bwd;
    }
    Ok(PlanarCurve::Reconstructed(Arc::new(curve)))
}
