//! Curve geometry: curvature profiles, unit-speed reconstruction, the strip map and the
//! curvature-induced potentials.

mod config;
mod planar;
mod potential;
mod profile;
mod tube;

pub use config::{CurveConfig, CurveModel, DEFAULT_TOLERANCE, DEFAULT_WINDOW};
pub use planar::{
    curve_from_curvature, curve_from_curvature_with, map_to_strip, signed_curvature, CurveJet, PlanarCurve,
    Point, ReconstructedCurve, ReconstructionOptions, UNIT_SPEED_TOL,
};
pub(crate) use potential::potential_unchecked;
pub use potential::{bracket_potentials, geometric_potential, metric_factor, v_tau, BracketPotentials};
pub use profile::{CurvatureJet, CurvatureProfile, CurveBounds, NumericProfile};
pub use tube::{injectivity_halfwidth, InjectivityOptions, TubeSpec, DEFAULT_HALFWIDTH_CAP};
