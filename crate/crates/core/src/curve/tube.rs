//! Strip neighbourhoods `Omega_a` and a certified estimate of the injectivity half-width.

use serde::Serialize;

use super::planar::{signed_curvature, PlanarCurve, Point};
use super::profile::CurveBounds;
use crate::error::{Error, Result};

/// Value returned for curves that never approach themselves (e.g. the straight line).
pub const DEFAULT_HALFWIDTH_CAP: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
pub struct InjectivityOptions {
    /// Sampling resolution along the curve.
    pub step: f64,
    pub cap: f64,
}

impl Default for InjectivityOptions {
    fn default() -> Self {
        Self {
            step: 1e-2,
            cap: DEFAULT_HALFWIDTH_CAP,
        }
    }
}

/// Lower estimate of the largest `d` for which the curvilinear map is injective on
/// `[-window, window] x (-d, d)`.
///
/// `d_hat = min(1/gamma_+, cap, D/2 - h^2 gamma_+/8)` where `D` is the minimal distance
/// between polyline segments whose arc-length separation is at least `pi/gamma_+` (half
/// an osculating circle). Sample points sit on multiples of `step`, so enlarging the
/// window can only add pairs and the estimate is nonincreasing in `window`.
pub fn injectivity_halfwidth(curve: &PlanarCurve, window: f64, opts: InjectivityOptions) -> Result<f64> {
    if !(opts.step > 0.0 && opts.cap > 0.0 && window >= 0.0) {
        return Err(Error::param("injectivity sweep needs positive step, cap and window"));
    }
    let h = opts.step;
    let m = (window / h).floor() as i64;
    let mut pts: Vec<Point> = Vec::with_capacity((2 * m + 1) as usize);
    let mut gamma_plus = 0.0f64;
    for i in -m..=m {
        let s = i as f64 * h;
        gamma_plus = gamma_plus.max(signed_curvature(curve, s)?.abs());
        pts.push(curve.point(s)?);
    }
    let local = if gamma_plus > 0.0 {
        (1.0 / gamma_plus).min(opts.cap)
    } else {
        opts.cap
    };
    let gap = ((std::f64::consts::PI * local) / h).ceil() as usize;
    let nseg = pts.len().saturating_sub(1);
    // Distances above 2*local cannot lower the estimate.
    let mut best = 2.0 * local;
    for i in 0..nseg {
        let mut j = i + gap.max(1);
        while j < nseg {
            let dp = dist(pts[i], pts[j]);
            if dp > best + 2.0 * h {
                // Each index step moves a point by at most one arc step h.
                let skip = ((dp - best) / h).floor() as usize;
                j += skip.max(1);
                continue;
            }
            let d = segment_distance(pts[i], pts[i + 1], pts[j], pts[j + 1]);
            if d < best {
                best = d;
            }
            j += 1;
        }
    }
    if best >= 2.0 * local {
        return Ok(local);
    }
    let sagitta = h * h * gamma_plus / 8.0;
    Ok(local.min(0.5 * best - sagitta).max(0.0))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn point_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    };
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment(a, c, d)
        .min(point_segment(b, c, d))
        .min(point_segment(c, a, b))
        .min(point_segment(d, a, b))
}

/// Strip half-width `a`, truncation length `L` and injectivity estimate `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeSpec {
    pub halfwidth: f64,
    pub length: f64,
    pub injectivity: f64,
}

impl TubeSpec {
    pub fn new(halfwidth: f64, length: f64, injectivity: f64) -> Result<Self> {
        if !(halfwidth > 0.0 && halfwidth < injectivity) {
            return Err(Error::geometry(format!(
                "strip half-width {halfwidth} must lie in (0, d) with d = {injectivity}"
            )));
        }
        if !(length > 0.0) {
            return Err(Error::param("truncation length must be positive"));
        }
        Ok(Self {
            halfwidth,
            length,
            injectivity,
        })
    }

    /// Checks `d gamma_+ <= 1` and, when `longitudinal` is set, `a < 1/(2 gamma_+)`.
    pub fn check(&self, bounds: &CurveBounds, longitudinal: bool) -> Result<()> {
        if self.injectivity * bounds.gamma_plus > 1.0 + 1e-12 {
            return Err(Error::geometry(format!(
                "d * gamma_+ = {} exceeds 1",
                self.injectivity * bounds.gamma_plus
            )));
        }
        if longitudinal && 2.0 * self.halfwidth * bounds.gamma_plus >= 1.0 {
            return Err(Error::param(format!(
                "a = {} violates a < 1/(2 gamma_+) = {}",
                self.halfwidth,
                0.5 / bounds.gamma_plus
            )));
        }
        Ok(())
    }
}
