//! Transverse operators `-f''` on `(-a, 0) ∪ (0, a)` with δ′ matching at `u = 0`:
//! `f'(0-) = f'(0+) = -(f(0+) - f(0-))/β + γ_s (f(0+) + f(0-))/2`.
//!
//! The upper operator carries Dirichlet ends `f(±a) = 0`, the lower one Robin ends
//! `f'(±a) = ∓γ₊ f(±a)`. Continuity of `f'` across `u = 0` forces the negative-energy
//! eigenfunction to be odd, which removes `γ_s` from the problem and reduces it to
//!
//! * Dirichlet: `κ = (2/β) tanh(κa)`,
//! * Robin: `tanh(κa) (κ² - 2γ₊/β) = κ (2/β - γ₊)`,
//!
//! with `t = -κ²`. Both are solved by bisection. [`transverse_fd_oracle`] discretises the
//! same interval problem independently and is used to validate the reductions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tridiag::SymTridiag;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndCondition {
    Dirichlet,
    Robin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseProblem {
    pub halfwidth: f64,
    pub beta: f64,
    /// Curvature value entering the matching condition.
    pub gamma_s: f64,
    /// Robin coefficient for the lower operator.
    pub gamma_plus: f64,
    pub end: EndCondition,
    /// Permit `a/β <= 2` (no regime assertions are made then).
    pub allow_outside_regime: bool,
}

impl TransverseProblem {
    pub fn dirichlet(halfwidth: f64, beta: f64) -> Self {
        Self {
            halfwidth,
            beta,
            gamma_s: 0.0,
            gamma_plus: 0.0,
            end: EndCondition::Dirichlet,
            allow_outside_regime: false,
        }
    }

    pub fn robin(halfwidth: f64, beta: f64, gamma_plus: f64) -> Self {
        Self {
            gamma_plus,
            end: EndCondition::Robin,
            ..Self::dirichlet(halfwidth, beta)
        }
    }

    pub fn with_gamma_s(mut self, gamma_s: f64) -> Self {
        self.gamma_s = gamma_s;
        self
    }

    pub fn allow_outside_regime(mut self) -> Self {
        self.allow_outside_regime = true;
        self
    }

    /// `a/β > 2` and `2/β > γ₊`.
    pub fn in_lemma_regime(&self) -> bool {
        in_regime(self.halfwidth, self.beta, self.gamma_plus)
    }

    fn validate(&self) -> Result<()> {
        if !(self.halfwidth > 0.0 && self.beta > 0.0) || !self.halfwidth.is_finite() || !self.beta.is_finite() {
            return Err(Error::param(format!(
                "transverse problem needs a > 0 and beta > 0 (got a = {}, beta = {})",
                self.halfwidth, self.beta
            )));
        }
        if !(self.gamma_plus >= 0.0) {
            return Err(Error::param("gamma_plus must be nonnegative"));
        }
        if !self.allow_outside_regime && !self.in_lemma_regime() {
            return Err(regime_error(self.halfwidth, self.beta, self.gamma_plus));
        }
        Ok(())
    }
}

pub fn in_regime(a: f64, beta: f64, gamma_plus: f64) -> bool {
    a / beta > 2.0 && 2.0 / beta > gamma_plus
}

fn regime_error(a: f64, beta: f64, gamma_plus: f64) -> Error {
    Error::Regime {
        ratio: a / beta,
        coupling: 0.5 * beta * gamma_plus,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Transcendental,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransverseEigenvalue {
    pub t: f64,
    pub kappa: f64,
    pub method: Method,
    /// Relative residual of the matching condition (transcendental) or of the matrix
    /// eigenpair (finite difference).
    pub residual: f64,
}

/// Relative bisection tolerance on `κ`.
const KAPPA_RTOL: f64 = 1e-15;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= KAPPA_RTOL * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Negative eigenvalue of the Dirichlet transverse operator.
pub fn transverse_eigenvalue_dirichlet(a: f64, beta: f64) -> Result<TransverseEigenvalue> {
    solve_transcendental(&TransverseProblem::dirichlet(a, beta))
}

/// Negative eigenvalue of the Robin transverse operator.
pub fn transverse_eigenvalue_robin(a: f64, beta: f64, gamma_plus: f64) -> Result<TransverseEigenvalue> {
    solve_transcendental(&TransverseProblem::robin(a, beta, gamma_plus))
}

pub fn solve_transcendental(problem: &TransverseProblem) -> Result<TransverseEigenvalue> {
    problem.validate()?;
    let a = problem.halfwidth;
    let beta = problem.beta;
    let two_b = 2.0 / beta;
    let fail = || regime_error(a, beta, problem.gamma_plus);
    match problem.end {
        EndCondition::Dirichlet => {
            // kappa - 2/beta + (2/beta)(1 - tanh(kappa a)), the last factor kept unrounded
            let f = |k: f64| (k - two_b) + two_b * one_minus_tanh(k * a);
            let lo = 1e-9 * two_b.min(1.0 / a);
            let hi = two_b;
            if !(f(lo) < 0.0 && f(hi) > 0.0) {
                return Err(fail());
            }
            let kappa = bisect(f, lo, hi);
            let residual = ((kappa - two_b) + two_b * one_minus_tanh(kappa * a)).abs() / kappa;
            Ok(TransverseEigenvalue {
                t: -kappa * kappa,
                kappa,
                method: Method::Transcendental,
                residual,
            })
        }
        EndCondition::Robin => {
            let g = problem.gamma_plus;
            if g >= two_b {
                return Err(fail());
            }
            // tanh(ka)(k² - 2g/β) - k(2/β - g), regrouped so the root near 2/β is not lost to rounding
            let f = |k: f64| (k - two_b) * (k + g) - one_minus_tanh(k * a) * (k * k - 2.0 * g / beta);
            let lo = two_b;
            let mut hi = two_b + g + 1.0 / a;
            let mut widen = 0;
            while f(hi) <= 0.0 {
                hi *= 2.0;
                widen += 1;
                if widen > 60 {
                    return Err(fail());
                }
            }
            if !(f(lo) < 0.0) {
                return Err(fail());
            }
            let kappa = bisect(f, lo, hi);
            // With f = cosh(κ(a-u)) + (γ₊/κ) sinh(κ(a-u)) on (0, a) and odd across 0, the
            // matching residual divided by cosh(κa) is f(κ)/κ.
            let residual = (f(kappa)).abs() / (kappa * kappa);
            Ok(TransverseEigenvalue {
                t: -kappa * kappa,
                kappa,
                method: Method::Transcendental,
                residual,
            })
        }
    }
}

/// 1 - tanh(x) for x >= 0 without cancellation.
fn one_minus_tanh(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    if x >= 0.0 {
        2.0 * e / (1.0 + e)
    } else {
        2.0 / (1.0 + e)
    }
}

/// `(-4/β² - 16/β² e^{-4a/β}, -4/β² + 16/β² e^{-4a/β})`; requires `a/β > 2`.
pub fn lemma_trans_envelope(a: f64, beta: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && beta > 0.0) {
        return Err(Error::param("envelope needs a > 0 and beta > 0"));
    }
    if !(a / beta > 2.0) {
        return Err(regime_error(a, beta, 0.0));
    }
    let b2 = beta * beta;
    let centre = -4.0 / b2;
    let spread = 16.0 / b2 * (-4.0 * a / beta).exp();
    Ok((centre - spread, centre + spread))
}

/// Assembled pencil of the finite-difference oracle.
fn oracle_matrix(problem: &TransverseProblem, n: usize) -> Result<SymTridiag> {
    if n < 16 {
        return Err(Error::param(format!("oracle needs at least 16 cells per half (got {n})")));
    }
    let a = problem.halfwidth;
    let beta = problem.beta;
    if !(a > 0.0 && beta > 0.0) {
        return Err(Error::param("oracle needs a > 0 and beta > 0"));
    }
    let gs = problem.gamma_s;
    if gs.abs() >= 2.0 / beta {
        return Err(Error::param(format!(
            "|gamma_s| = {} must stay below 2/beta for the symmetrised matching",
            gs.abs()
        )));
    }
    let h = a / n as f64;
    let robin = problem.end == EndCondition::Robin;
    // Nodes of one half: Robin keeps the outer end, Dirichlet drops it.
    let per_half = if robin { n + 1 } else { n };
    let size = 2 * per_half;
    let mut diag = vec![0.0; size];
    let mut off = vec![0.0; size - 1];
    let mut mass = vec![0.0; size];
    // Half-line cells: node k and k+1 within each half, plus the dropped Dirichlet end.
    let mut cell = |p: Option<usize>, q: Option<usize>, diag: &mut [f64], off: &mut [f64]| {
        for idx in [p, q].into_iter().flatten() {
            diag[idx] += 1.0 / h;
            mass[idx] += 0.5 * h;
        }
        if let (Some(p), Some(q)) = (p, q) {
            off[p.min(q)] -= 1.0 / h;
        }
    };
    // Left half, ordered from u = -a (or -a + h) up to 0-.
    let left_interface = per_half - 1;
    let right_interface = per_half;
    for c in 0..n {
        // cell between u = -a + c h and -a + (c+1) h
        let (p, q) = if robin { (Some(c), Some(c + 1)) } else { (c.checked_sub(1), Some(c)) };
        cell(p, q, &mut diag, &mut off);
    }
    for c in 0..n {
        // cell between u = c h and (c+1) h
        let p = Some(right_interface + c);
        let q = if robin || c + 1 < n { Some(right_interface + c + 1) } else { None };
        cell(p, q, &mut diag, &mut off);
    }
    // Matching at u = 0 after the diagonal similarity on the left half: the pencil is
    // symmetric with interface form p f+^2 + 2 sqrt(-pq) f+ f- - q f-^2.
    let p = -1.0 / beta + 0.5 * gs;
    let q = 1.0 / beta + 0.5 * gs;
    diag[right_interface] += p;
    diag[left_interface] -= q;
    off[left_interface] += (-p * q).sqrt();
    if robin {
        diag[0] += problem.gamma_plus;
        diag[size - 1] += problem.gamma_plus;
    }
    SymTridiag::from_pencil(&diag, &off, &mass)
}

/// Lowest `count` eigenvalues of the discretised transverse operator with `n` cells per
/// half-interval.
pub fn transverse_fd_spectrum(problem: &TransverseProblem, n: usize, count: usize) -> Result<Vec<f64>> {
    Ok(oracle_matrix(problem, n)?.lowest(count))
}

/// Lowest eigenvalue of the discretisation; errors with [`Error::NoBoundState`] when it is
/// not negative.
pub fn transverse_fd_oracle(problem: &TransverseProblem, n: usize) -> Result<TransverseEigenvalue> {
    let m = oracle_matrix(problem, n)?;
    let t = m.eigenvalue(0);
    if t >= 0.0 {
        return Err(Error::NoBoundState { lowest: t });
    }
    let v = m.eigenvector(t);
    let mv = m.matvec(&v);
    let residual = mv.iter().zip(&v).map(|(x, y)| (x - t * y).powi(2)).sum::<f64>().sqrt() / t.abs();
    Ok(TransverseEigenvalue {
        t,
        kappa: (-t).sqrt(),
        method: Method::FiniteDifference,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::richardson::extrapolate_even;

    #[test]
    fn dirichlet_deep_regime_is_minus_four() {
        let e = transverse_eigenvalue_dirichlet(10.0, 1.0).unwrap();
        assert!(e.t >= -4.0 && e.t <= -4.0 + 16.0 * (-40f64).exp() + 4.0 * f64::EPSILON * 4.0);
        assert!((e.t + 4.0).abs() < 1e-12);
        assert!(e.residual < 1e-10);
    }

    #[test]
    fn dirichlet_moderate_regime_near_envelope() {
        let e = transverse_eigenvalue_dirichlet(3.0, 1.0).unwrap();
        let (lo, hi) = lemma_trans_envelope(3.0, 1.0).unwrap();
        // 16 e^{-12} = 9.83e-5
        assert!((hi + 4.0 - 16.0 * (-12f64).exp()).abs() < 1e-15);
        assert!(e.t > -4.0 && lo <= e.t);
        // The exact root exceeds the exponential bound at second order:
        // t + 4 = 16 e^{-4a}(1 + 8a e^{-4a} + ...) for β = 1.
        let w = 16.0 * (-12f64).exp();
        let excess = (e.t + 4.0) / w - 1.0;
        assert!(excess > 0.0 && (excess - 24.0 * (-12f64).exp()).abs() < 0.2 * excess, "{excess}");
    }

    #[test]
    fn robin_without_curvature_solves_kappa_tanh() {
        let e = transverse_eigenvalue_robin(10.0, 1.0, 0.0).unwrap();
        assert!((e.kappa * (e.kappa * 10.0).tanh() - 2.0).abs() < 1e-13);
        assert!(e.t <= -4.0 && e.t >= -4.0 - 16.0 * (-40f64).exp() - 1e-13);
    }

    #[test]
    fn robin_with_curvature_sits_below_threshold() {
        let e = transverse_eigenvalue_robin(3.0, 1.0, 0.5).unwrap();
        let (lo, _) = lemma_trans_envelope(3.0, 1.0).unwrap();
        assert!(e.t <= -4.0 && e.t >= lo, "{}", e.t);
        assert!(e.residual < 1e-10);
    }

    #[test]
    fn envelope_examples_and_regime() {
        let (lo, hi) = lemma_trans_envelope(1.0, 0.1).unwrap();
        let s = 1600.0 * (-40f64).exp();
        assert!((lo + 400.0 + s).abs() < 1e-10 && (hi + 400.0 - s).abs() < 1e-10);
        assert!(matches!(lemma_trans_envelope(1.0, 1.0), Err(Error::Regime { .. })));
        assert!(matches!(transverse_eigenvalue_dirichlet(1.0, 1.0), Err(Error::Regime { .. })));
        assert!(matches!(transverse_eigenvalue_robin(3.0, 1.0, 2.5), Err(Error::Regime { .. })));
    }

    #[test]
    fn outside_regime_override_still_solves() {
        let p = TransverseProblem::dirichlet(1.0, 1.0).allow_outside_regime();
        let e = solve_transcendental(&p).unwrap();
        assert!(e.t > -4.0 && e.t < 0.0);
        // below 2a/β = 1 there is no bound state at all
        let p = TransverseProblem::dirichlet(0.4, 1.0).allow_outside_regime();
        assert!(solve_transcendental(&p).is_err());
    }

    #[test]
    fn oracle_is_independent_of_gamma_s() {
        let base = transverse_fd_oracle(&TransverseProblem::dirichlet(3.0, 1.0), 2048).unwrap().t;
        for g in [-1.0, 1.0] {
            let p = TransverseProblem::dirichlet(3.0, 1.0).with_gamma_s(g);
            let t = transverse_fd_oracle(&p, 2048).unwrap().t;
            assert!((t - base).abs() < 1e-8, "{g}: {t} vs {base}");
        }
    }

    #[test]
    fn vanishing_coupling_has_no_bound_state() {
        let p = TransverseProblem::dirichlet(3.0, 1e6).allow_outside_regime();
        match transverse_fd_oracle(&p, 256) {
            Err(Error::NoBoundState { lowest }) => {
                let mode = (std::f64::consts::PI / 6.0).powi(2);
                assert!((lowest - mode).abs() < 1e-3 * mode, "{lowest}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_leading_error_matches_lumped_analysis() {
        // Lumped-mass discretisation of the odd mode: t_h = -4/β² + 4h²/β⁴ + O(h⁴).
        let (a, beta, n) = (3.0, 1.0, 4096);
        let exact = transverse_eigenvalue_dirichlet(a, beta).unwrap().t;
        let t = transverse_fd_oracle(&TransverseProblem::dirichlet(a, beta), n).unwrap().t;
        let h = a / n as f64;
        let lead = 4.0 * h * h / beta.powi(4);
        assert!(((t - exact) - lead).abs() < 0.01 * lead, "{} vs {lead}", t - exact);
        // resolution at which the raw oracle sits within 4e-7 of the reduction
        let fine = transverse_fd_oracle(&TransverseProblem::dirichlet(a, beta), 10_000).unwrap().t;
        assert!((fine - exact).abs() < 4e-7);
    }

    #[test]
    fn oracle_converges_at_second_order() {
        for problem in [
            TransverseProblem::dirichlet(2.5, 1.0),
            TransverseProblem::robin(3.0, 1.0, 0.5).with_gamma_s(0.3),
        ] {
            let exact = solve_transcendental(&problem).unwrap().t;
            let levels: Vec<f64> = [64, 128, 256]
                .iter()
                .map(|&n| transverse_fd_oracle(&problem, n).unwrap().t)
                .collect();
            let ex = extrapolate_even(&levels);
            assert!((ex.observed_order - 2.0).abs() < 0.1, "{}", ex.observed_order);
            assert!((ex.value - exact).abs() < 1e-6 * exact.abs());
        }
    }

    #[test]
    fn oracle_has_exactly_one_negative_eigenvalue() {
        for problem in [TransverseProblem::dirichlet(3.0, 0.5), TransverseProblem::robin(3.0, 0.5, 1.0)] {
            let spec = transverse_fd_spectrum(&problem, 256, 3).unwrap();
            assert!(spec[0] < 0.0 && spec[1] > 0.0, "{spec:?}");
        }
    }
}
