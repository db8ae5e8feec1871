//! Spectral toolkit for the two-dimensional Schrödinger operator with an attractive
//! δ′ interaction supported on an asymptotically straight planar curve, in the strong
//! coupling regime β → 0₊.
//!
//! The crate is organised bottom-up:
//!
//! * [`curve`]: curvature profiles, curve reconstruction, the curvilinear strip map and
//!   the geometric potentials.
//! * [`transverse`]: the one-dimensional transverse operators across the strip.
//! * [`longitudinal`]: the comparison operator `S = -d²/ds² - γ²/4` and the bracket
//!   operators along the curve.
//! * [`strip`]: finite-element discretisation of the strip quadratic forms and a sparse
//!   shift-invert eigensolver.
//! * [`bracket`]: the assembled two-sided eigenvalue bounds, the essential-spectrum
//!   threshold and strong-coupling asymptotics studies.

pub mod bracket;
pub mod curve;
mod error;
pub mod longitudinal;
pub mod manifest;
mod ode;
pub mod parse;
pub mod richardson;
pub mod strip;
pub mod transverse;
pub mod tridiag;

pub use error::{Error, Result};
