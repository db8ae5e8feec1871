//! Metric factor, curvature-induced potential and its crude two-sided estimates.

use super::profile::{golden_max, CurvatureProfile, CurveBounds};
use crate::error::{Error, Result};

/// `g(s, u) = 1 + u gamma(s)`.
pub fn metric_factor(profile: &CurvatureProfile, s: f64, u: f64) -> Result<f64> {
    let ug = u * profile.gamma(s);
    if ug.abs() >= 1.0 {
        return Err(Error::geometry(format!(
            "degenerate metric at (s, u) = ({s}, {u}): |u gamma| = {}",
            ug.abs()
        )));
    }
    Ok(1.0 + ug)
}

/// `V(s, u) = u gamma'' / (2 g^3) - 5 (u gamma')^2 / (4 g^4) - gamma^2 / (4 g^2)`.
pub fn geometric_potential(profile: &CurvatureProfile, s: f64, u: f64) -> Result<f64> {
    let j = profile.eval(s);
    let g = 1.0 + u * j.value;
    if g <= 0.0 || (u * j.value).abs() >= 1.0 {
        return Err(Error::geometry(format!("degenerate metric at (s, u) = ({s}, {u})")));
    }
    Ok(potential_unchecked(j.value, j.d1, j.d2, u))
}

#[inline]
pub(crate) fn potential_unchecked(gamma: f64, d1: f64, d2: f64, u: f64) -> f64 {
    let g = 1.0 + u * gamma;
    let g2 = g * g;
    let ud1 = u * d1;
    u * d2 / (2.0 * g2 * g) - 5.0 * ud1 * ud1 / (4.0 * g2 * g2) - gamma * gamma / (4.0 * g2)
}

/// The `s`-only potentials `V^(+)` and `V^(-)` sandwiching `V(s, u)` for `|u| <= a`.
#[derive(Debug, Clone)]
pub struct BracketPotentials {
    profile: CurvatureProfile,
    /// `a (gamma'')_+ / (2 (1 - a gamma_+)^3)`
    curv2_term: f64,
    /// `5 (a (gamma')_+)^2 / (4 (1 - a gamma_+)^4)`
    curv1_term: f64,
    inner: f64,
    outer: f64,
}

impl BracketPotentials {
    pub fn plus(&self, s: f64) -> f64 {
        let g = self.profile.gamma(s);
        self.curv2_term - g * g / (4.0 * self.outer * self.outer)
    }

    pub fn minus(&self, s: f64) -> f64 {
        let g = self.profile.gamma(s);
        -self.curv2_term - self.curv1_term - g * g / (4.0 * self.inner * self.inner)
    }
}

/// Builds `V^(+)(s) = a(gamma'')_+/(2(1-a gamma_+)^3) - gamma^2/(4(1+a gamma_+)^2)` and
/// `V^(-)(s) = -a(gamma'')_+/(2(1-a gamma_+)^3) - 5(a(gamma')_+)^2/(4(1-a gamma_+)^4) - gamma^2/(4(1-a gamma_+)^2)`.
pub fn bracket_potentials(bounds: &CurveBounds, profile: &CurvatureProfile, a: f64) -> Result<BracketPotentials> {
    if !(a >= 0.0) {
        return Err(Error::param(format!("half-width a = {a} must be nonnegative")));
    }
    let ag = a * bounds.gamma_plus;
    if ag >= 1.0 {
        return Err(Error::param(format!("a gamma_+ = {ag} must be below 1")));
    }
    let inner = 1.0 - ag;
    let ad1 = a * bounds.dgamma_plus;
    Ok(BracketPotentials {
        profile: profile.clone(),
        curv2_term: a * bounds.d2gamma_plus / (2.0 * inner.powi(3)),
        curv1_term: 5.0 * ad1 * ad1 / (4.0 * inner.powi(4)),
        inner,
        outer: 1.0 + ag,
    })
}

/// `min_{|u| <= a} V(s, u)`: grid scan in `u`, golden refinement around the best node.
fn min_over_u(profile: &CurvatureProfile, s: f64, a: f64) -> f64 {
    let j = profile.eval(s);
    if a == 0.0 {
        return potential_unchecked(j.value, j.d1, j.d2, 0.0);
    }
    const NU: usize = 40;
    let h = 2.0 * a / NU as f64;
    let f = |u: f64| potential_unchecked(j.value, j.d1, j.d2, u);
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..=NU {
        let v = f(-a + i as f64 * h);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = (-a + (best_i as f64 - 1.0) * h).max(-a);
    let hi = (-a + (best_i as f64 + 1.0) * h).min(a);
    best.min(-golden_max(|u| -f(u), lo, hi))
}

/// `V_tau = inf_{|s| > tau, |u| < a} V(s, u)`.
///
/// The finite part `tau <= |s| <= R` (with `R` past the decay radius) is scanned on a grid
/// and every grid-local minimum refined by golden section; beyond `R` the analytic tail
/// bound on `gamma`, `gamma'`, `gamma''` gives `V >= -(tail)`, which is folded in.
pub fn v_tau(profile: &CurvatureProfile, a: f64, tau: f64) -> Result<f64> {
    let bounds = profile.bounds(f64::INFINITY);
    if a * bounds.gamma_plus >= 1.0 {
        return Err(Error::param(format!(
            "a gamma_+ = {} must be below 1",
            a * bounds.gamma_plus
        )));
    }
    if profile.is_straight() {
        return Ok(0.0);
    }
    let tau = tau.max(0.0);
    let far = tau.max(profile.decay_radius()) + 2.0;
    if !far.is_finite() {
        // Non-decaying profile: V is s-independent.
        return Ok(min_over_u(profile, 0.0, a));
    }
    let tail = profile.tail_bound(far);
    let inner = 1.0 - a * bounds.gamma_plus;
    let ad1 = a * tail.dgamma_plus;
    let tail_v = a * tail.d2gamma_plus / (2.0 * inner.powi(3))
        + 5.0 * ad1 * ad1 / (4.0 * inner.powi(4))
        + tail.gamma_plus * tail.gamma_plus / (4.0 * inner * inner);

    let mut inf = -tail_v;
    for sign in [1.0, -1.0] {
        let n = (((far - tau) / 0.02).ceil() as usize).max(16);
        let h = (far - tau) / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| min_over_u(profile, sign * (tau + i as f64 * h), a)).collect();
        for (i, &v) in vals.iter().enumerate() {
            inf = inf.min(v);
            let left = i == 0 || vals[i - 1] >= v;
            let right = i == n || vals[i + 1] >= v;
            if left && right {
                let lo = tau + (i as f64 - 1.0).max(0.0) * h;
                let hi = tau + ((i + 1).min(n)) as f64 * h;
                let m = -golden_max(|t| -min_over_u(profile, sign * t, a), lo, hi);
                inf = inf.min(m);
            }
        }
    }
    Ok(inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_factor_examples() {
        let p = CurvatureProfile::Constant { curvature: 0.5 };
        assert_eq!(metric_factor(&p, 0.0, 0.0).unwrap(), 1.0);
        assert!((metric_factor(&p, 1.0, 0.4).unwrap() - 1.2).abs() < 1e-15);
        let m = CurvatureProfile::Constant { curvature: -0.5 };
        assert!((metric_factor(&m, 1.0, 0.4).unwrap() - 0.8).abs() < 1e-15);
        assert!(metric_factor(&p, 0.0, 2.0).is_err());
    }

    #[test]
    fn potential_on_curve_and_for_constant_curvature() {
        let p = CurvatureProfile::GaussianBump { c: 0.8 };
        let g = p.gamma(0.3);
        assert!((geometric_potential(&p, 0.3, 0.0).unwrap() + g * g / 4.0).abs() < 1e-16);
        let r = 2.0;
        let c = CurvatureProfile::Constant { curvature: 1.0 / r };
        let u = 0.3;
        let g = 1.0 + u / r;
        let want = -1.0 / (4.0 * r * r * g * g);
        assert!((geometric_potential(&c, 5.0, u).unwrap() - want).abs() < 1e-16);
    }

    #[test]
    fn straight_line_potentials_vanish() {
        let b = CurvatureProfile::Line.bounds(10.0);
        let bp = bracket_potentials(&b, &CurvatureProfile::Line, 0.3).unwrap();
        assert_eq!(bp.plus(1.0), 0.0);
        assert_eq!(bp.minus(1.0), 0.0);
        assert_eq!(v_tau(&CurvatureProfile::Line, 0.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bracket_potentials_collapse_as_a_vanishes() {
        let p = CurvatureProfile::Constant { curvature: 0.7 };
        let b = p.bounds(1.0);
        let bp = bracket_potentials(&b, &p, 1e-9).unwrap();
        let want = -0.49 / 4.0;
        assert!((bp.plus(0.0) - want).abs() < 1e-8);
        assert!((bp.minus(0.0) - want).abs() < 1e-8);
        assert!(bracket_potentials(&b, &p, 1.0 / 0.7).is_err());
    }

    #[test]
    fn v_tau_far_out_is_negligible() {
        let p = CurvatureProfile::GaussianBump { c: 1.0 };
        let v = v_tau(&p, 0.05, 8.0).unwrap();
        assert!(v <= 0.0 && v.abs() < 1e-20, "{v}");
    }

    #[test]
    fn v_tau_at_zero_sees_the_bump() {
        let p = CurvatureProfile::GaussianBump { c: 1.0 };
        let a = 0.05;
        let v = v_tau(&p, a, 0.0).unwrap();
        let on_curve = -0.25;
        assert!(v <= on_curve);
        // crude |V + gamma^2/4| <= a-linear envelope from the bracket potentials
        let b = p.bounds(20.0);
        let bp = bracket_potentials(&b, &p, a).unwrap();
        assert!(v >= bp.minus(0.0) - 1e-12);
    }

    #[test]
    fn v_tau_nonincreasing_in_a() {
        let p = CurvatureProfile::TwoBump { c: 0.4, s0: 3.0 };
        let mut prev = f64::INFINITY;
        for a in [0.01, 0.05, 0.1, 0.2] {
            let v = v_tau(&p, a, 1.0).unwrap();
            assert!(v <= prev + 1e-14);
            prev = v;
        }
    }
}
