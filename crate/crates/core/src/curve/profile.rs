//! Signed curvature profiles `gamma(s)` together with their first two derivatives.
//!
//! Every spectral quantity in the crate consumes `gamma`, `gamma'` and `gamma''` only, so
//! curves are specified curvature-first. The closed-form families carry analytic
//! derivatives; [`CurvatureProfile::Numeric`] differentiates point evaluations with
//! five-point centered stencils.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Values of `gamma`, `gamma'` and `gamma''` at one arc-length position.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurvatureJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Suprema `f_+ = max |f|` of the curvature and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CurveBounds {
    pub gamma_plus: f64,
    pub dgamma_plus: f64,
    pub d2gamma_plus: f64,
}

impl CurveBounds {
    pub fn is_straight(&self) -> bool {
        self.gamma_plus == 0.0
    }

    fn max(self, other: CurveBounds) -> CurveBounds {
        CurveBounds {
            gamma_plus: self.gamma_plus.max(other.gamma_plus),
            dgamma_plus: self.dgamma_plus.max(other.dgamma_plus),
            d2gamma_plus: self.d2gamma_plus.max(other.d2gamma_plus),
        }
    }
}

/// A profile known only through point evaluations of `gamma`.
///
/// Treated as identically zero for `|s| > decay_radius`; tail bounds are therefore
/// assumptions rather than certificates.
#[derive(Clone)]
pub struct NumericProfile {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    decay_radius: f64,
}

impl NumericProfile {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, decay_radius: f64) -> Self {
        Self {
            f: Arc::new(f),
            decay_radius,
        }
    }
}

impl fmt::Debug for NumericProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericProfile")
            .field("decay_radius", &self.decay_radius)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum CurvatureProfile {
    /// `gamma = 0`.
    Line,
    /// `gamma = k` everywhere (a circle; not asymptotically straight).
    Constant { curvature: f64 },
    /// `gamma = c exp(-s^2)`.
    GaussianBump { c: f64 },
    /// `gamma = c (exp(-(s-s0)^2) + exp(-(s+s0)^2))`.
    TwoBump { c: f64, s0: f64 },
    Numeric(NumericProfile),
}

fn gaussian_jet(c: f64, s: f64) -> CurvatureJet {
    let e = c * (-s * s).exp();
    CurvatureJet {
        value: e,
        d1: -2.0 * s * e,
        d2: (4.0 * s * s - 2.0) * e,
    }
}

/// Suprema over `|x| >= r` of `|G|, |G'|, |G''|` for the unit Gaussian `G = exp(-x^2)`.
fn gaussian_tail(r: f64) -> [f64; 3] {
    let r = r.max(0.0);
    let g = (-r * r).exp();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let d1_peak = std::f64::consts::SQRT_2 * (-0.5f64).exp();
    let d1 = if r >= half { 2.0 * r * g } else { d1_peak };
    let crit = 1.5f64.sqrt();
    let d2_side = 4.0 * (-1.5f64).exp();
    let d2 = if r >= crit {
        (4.0 * r * r - 2.0) * g
    } else {
        ((4.0 * r * r - 2.0).abs() * g).max(d2_side)
    };
    [g, d1, d2]
}

impl CurvatureProfile {
    pub fn eval(&self, s: f64) -> CurvatureJet {
        match self {
            CurvatureProfile::Line => CurvatureJet::default(),
            CurvatureProfile::Constant { curvature } => CurvatureJet {
                value: *curvature,
                d1: 0.0,
                d2: 0.0,
            },
            CurvatureProfile::GaussianBump { c } => gaussian_jet(*c, s),
            CurvatureProfile::TwoBump { c, s0 } => {
                let l = gaussian_jet(*c, s - s0);
                let r = gaussian_jet(*c, s + s0);
                CurvatureJet {
                    value: l.value + r.value,
                    d1: l.d1 + r.d1,
                    d2: l.d2 + r.d2,
                }
            }
            CurvatureProfile::Numeric(p) => {
                if s.abs() > p.decay_radius {
                    return CurvatureJet::default();
                }
                numeric_jet(&*p.f, s)
            }
        }
    }

    pub fn gamma(&self, s: f64) -> f64 {
        self.eval(s).value
    }

    /// Profile of the mirrored curve, `gamma -> -gamma`.
    pub fn reflected(&self) -> CurvatureProfile {
        match self {
            CurvatureProfile::Line => CurvatureProfile::Line,
            CurvatureProfile::Constant { curvature } => CurvatureProfile::Constant {
                curvature: -curvature,
            },
            CurvatureProfile::GaussianBump { c } => CurvatureProfile::GaussianBump { c: -c },
            CurvatureProfile::TwoBump { c, s0 } => CurvatureProfile::TwoBump { c: -c, s0: *s0 },
            CurvatureProfile::Numeric(p) => {
                let f = p.f.clone();
                CurvatureProfile::Numeric(NumericProfile {
                    f: Arc::new(move |s| -f(s)),
                    decay_radius: p.decay_radius,
                })
            }
        }
    }

    pub fn is_straight(&self) -> bool {
        match self {
            CurvatureProfile::Line => true,
            CurvatureProfile::Constant { curvature } => *curvature == 0.0,
            CurvatureProfile::GaussianBump { c } | CurvatureProfile::TwoBump { c, .. } => *c == 0.0,
            CurvatureProfile::Numeric(_) => false,
        }
    }

    /// Radius beyond which the profile is negligible (`|gamma| < 1e-16 * scale`).
    /// Infinite for profiles that do not decay.
    pub fn decay_radius(&self) -> f64 {
        // exp(-r^2) < 1e-16 for r > 6.07
        const GAUSS_R: f64 = 6.1;
        match self {
            CurvatureProfile::Line => 0.0,
            CurvatureProfile::Constant { curvature } => {
                if *curvature == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            CurvatureProfile::GaussianBump { .. } => GAUSS_R,
            CurvatureProfile::TwoBump { s0, .. } => s0.abs() + GAUSS_R,
            CurvatureProfile::Numeric(p) => p.decay_radius,
        }
    }

    /// Upper bounds for `sup_{|s| >= r} (|gamma|, |gamma'|, |gamma''|)`.
    pub fn tail_bound(&self, r: f64) -> CurveBounds {
        let r = r.max(0.0);
        match self {
            CurvatureProfile::Line => CurveBounds::default(),
            CurvatureProfile::Constant { curvature } => CurveBounds {
                gamma_plus: curvature.abs(),
                ..Default::default()
            },
            CurvatureProfile::GaussianBump { c } => {
                let [g, g1, g2] = gaussian_tail(r);
                let c = c.abs();
                CurveBounds {
                    gamma_plus: c * g,
                    dgamma_plus: c * g1,
                    d2gamma_plus: c * g2,
                }
            }
            CurvatureProfile::TwoBump { c, s0 } => {
                let s0 = s0.abs();
                let c = c.abs();
                let near = gaussian_tail(r - s0);
                let far = gaussian_tail(r + s0);
                CurveBounds {
                    gamma_plus: c * (near[0] + far[0]),
                    dgamma_plus: c * (near[1] + far[1]),
                    d2gamma_plus: c * (near[2] + far[2]),
                }
            }
            CurvatureProfile::Numeric(p) => {
                if r >= p.decay_radius {
                    CurveBounds::default()
                } else {
                    let w = p.decay_radius;
                    let mut b = sampled_bounds(self, r, w);
                    b = b.max(sampled_bounds(self, -w, -r));
                    b
                }
            }
        }
    }

    /// Global bounds `gamma_+`, `(gamma')_+`, `(gamma'')_+`: dense sampling with local
    /// refinement on `[-window, window]`, combined with the tail bound beyond it.
    pub fn bounds(&self, window: f64) -> CurveBounds {
        match self {
            CurvatureProfile::Line => CurveBounds::default(),
            CurvatureProfile::Constant { .. } => self.tail_bound(0.0),
            _ => {
                let w = window.abs().min(self.decay_radius().max(1.0) + 1.0);
                sampled_bounds(self, -w, w).max(self.tail_bound(w))
            }
        }
    }
}

// Step sizes balance truncation against roundoff for unit-scale profiles.
const H1: f64 = 1e-3;
const H2: f64 = 2e-3;

fn numeric_jet(f: &dyn Fn(f64) -> f64, s: f64) -> CurvatureJet {
    let f0 = f(s);
    let (fm2, fm1, fp1, fp2) = (f(s - 2.0 * H1), f(s - H1), f(s + H1), f(s + 2.0 * H1));
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * H1);
    let (gm2, gm1, gp1, gp2) = (f(s - 2.0 * H2), f(s - H2), f(s + H2), f(s + 2.0 * H2));
    let d2 = (-gm2 + 16.0 * gm1 - 30.0 * f0 + 16.0 * gp1 - gp2) / (12.0 * H2 * H2);
    CurvatureJet { value: f0, d1, d2 }
}

/// Maximises `|gamma|`, `|gamma'|`, `|gamma''|` on `[lo, hi]`: grid scan, then golden-section
/// refinement around every grid-local maximum.
fn sampled_bounds(profile: &CurvatureProfile, lo: f64, hi: f64) -> CurveBounds {
    if hi <= lo {
        return CurveBounds::default();
    }
    let n = (((hi - lo) / 0.01).ceil() as usize).max(8);
    let h = (hi - lo) / n as f64;
    let pts: Vec<CurvatureJet> = (0..=n).map(|i| profile.eval(lo + i as f64 * h)).collect();
    let comp = |jet: &CurvatureJet, k: usize| match k {
        0 => jet.value.abs(),
        1 => jet.d1.abs(),
        _ => jet.d2.abs(),
    };
    let mut out = [0.0f64; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let vals: Vec<f64> = pts.iter().map(|j| comp(j, k)).collect();
        let mut best = vals.iter().cloned().fold(0.0, f64::max);
        for i in 1..n {
            if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] > 0.0 {
                let a = lo + (i - 1) as f64 * h;
                let b = lo + (i + 1) as f64 * h;
                let m = golden_max(|s| comp(&profile.eval(s), k), a, b);
                best = best.max(m);
            }
        }
        *slot = best;
    }
    CurveBounds {
        gamma_plus: out[0],
        dgamma_plus: out[1],
        d2gamma_plus: out[2],
    }
}

pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = f(a).max(f(b)).max(f1).max(f2);
    for _ in 0..80 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
        best = best.max(f1).max(f2);
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    best
}
