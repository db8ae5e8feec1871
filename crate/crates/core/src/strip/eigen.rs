//! Lowest eigenvalues of a banded pencil `(A, M)` with diagonal `M` by shift-invert Lanczos.
//!
//! The shift always stays below the whole spectrum, so `A - σM` is positive definite and
//! its unpivoted factorisation is stable. Converged eigenvalues are certified by counting
//! negative pivots of `A - (λ_k + δ)M`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::banded::BandedLdlt;
use super::form::SymmetricOperator2D;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov dimension per pass.
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_krylov: 60,
            max_restarts: 12,
            seed: 0x005e_ed2d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigen2D {
    pub values: Vec<f64>,
    /// `‖Av − λMv‖ / ‖Mv‖` per pair.
    pub residuals: Vec<f64>,
    /// `‖Av − λMv‖_{M⁻¹} / ‖v‖_M`, a bound on the distance to the nearest eigenvalue.
    pub error_bounds: Vec<f64>,
    pub shifts: Vec<f64>,
    pub lanczos_steps: usize,
    /// Negative pivots of `A − (λ_k + δ)M` matched `k`.
    pub certified: bool,
}

fn factor(op: &SymmetricOperator2D, sigma: f64) -> Result<BandedLdlt> {
    let mut a = op.stiffness.clone();
    a.shift_by_mass(sigma, &op.mass);
    a.into_ldlt()
}

/// Number of eigenvalues of the pencil below `x`.
pub fn count_below(op: &SymmetricOperator2D, x: f64) -> Result<usize> {
    Ok(factor(op, x)?.negative_count())
}

fn dot_m(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    m.iter().zip(x).zip(y).map(|((m, x), y)| m * x * y).sum()
}

struct Ritz {
    lambda: f64,
    vector: Vec<f64>,
    residual: f64,
    bound: f64,
}

impl Ritz {
    fn converged(&self, rtol: f64) -> bool {
        self.residual <= rtol * self.lambda.abs() || self.residual == 0.0
    }
}

fn residual(op: &SymmetricOperator2D, lambda: f64, x: &[f64], work: &mut [f64]) -> (f64, f64) {
    op.stiffness.matvec(x, work);
    let mut r2 = 0.0;
    let mut rm = 0.0;
    let mut mx2 = 0.0;
    let mut xm = 0.0;
    for i in 0..x.len() {
        let r = work[i] - lambda * op.mass[i] * x[i];
        r2 += r * r;
        rm += r * r / op.mass[i];
        mx2 += (op.mass[i] * x[i]).powi(2);
        xm += op.mass[i] * x[i] * x[i];
    }
    ((r2 / mx2).sqrt(), (rm / xm).sqrt())
}

/// Eigenpairs of the Lanczos tridiagonal, largest first. A dense symmetric solver keeps
/// the vectors of clustered eigenvalues orthogonal.
fn projected_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = alpha.len();
    let t = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let e = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| e.eigenvectors.column(i).iter().cloned().collect()).collect();
    (values, vectors)
}

/// Removes the `M`-components along the locked vectors (twice, for stability).
fn deflate(m: &[f64], locked: &[Ritz], w: &mut [f64]) {
    for _ in 0..2 {
        for r in locked {
            let c = dot_m(m, &r.vector, w);
            w.iter_mut().zip(&r.vector).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// One Lanczos pass on `(A − σM)⁻¹M` in the `M` inner product; returns the lowest `want`
/// Ritz pairs once the first `k` meet `rtol`, or the best available at the end.
#[allow(clippy::too_many_arguments)]
fn lanczos_pass(
    op: &SymmetricOperator2D,
    fact: &BandedLdlt,
    sigma: f64,
    locked: &[Ritz],
    start: &[f64],
    k: usize,
    want: usize,
    rtol: f64,
    max_krylov: usize,
    steps: &mut usize,
) -> (Vec<Ritz>, bool) {
    let n = op.len();
    let m = &op.mass;
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut v = start.to_vec();
    deflate(m, locked, &mut v);
    let nv = dot_m(m, &v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    q.push(v);
    let mut work = vec![0.0; n];
    let limit = max_krylov.min(n);
    let mut best: Vec<Ritz> = Vec::new();
    for j in 0..limit {
        let mut w: Vec<f64> = q[j].iter().zip(m).map(|(x, mi)| x * mi).collect();
        fact.solve_in_place(&mut w);
        *steps += 1;
        let a = dot_m(m, &q[j], &w);
        alpha.push(a);
        deflate(m, locked, &mut w);
        // two passes of full reorthogonalisation
        for _ in 0..2 {
            for qi in &q {
                let c = dot_m(m, qi, &w);
                w.iter_mut().zip(qi).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = dot_m(m, &w, &w).sqrt();
        let last = j + 1 == limit || b <= 1e-14 * a.abs().max(1e-300);
        let size = j + 1;
        if size >= want.min(limit) && (size % 5 == 0 || last) {
            let t = projected_eigen(&alpha, &beta);
            let count = want.min(size);
            let mut pairs = Vec::with_capacity(count);
            for i in 0..count {
                let (theta, s) = (t.0[i], &t.1[i]);
                let mut x = vec![0.0; n];
                for (c, qc) in s.iter().zip(&q) {
                    x.iter_mut().zip(qc).for_each(|(xi, qi)| *xi += c * qi);
                }
                let lambda = sigma + 1.0 / theta;
                let nx = dot_m(m, &x, &x).sqrt();
                x.iter_mut().for_each(|xi| *xi /= nx);
                let (res, bound) = residual(op, lambda, &x, &mut work);
                pairs.push(Ritz {
                    lambda,
                    vector: x,
                    residual: res,
                    bound,
                });
            }
            let done = pairs.len() >= k && pairs[..k].iter().all(|p| p.converged(rtol));
            best = pairs;
            if done {
                return (best, true);
            }
        }
        if last {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        q.push(w);
    }
    (best, false)
}

/// The `k` lowest eigenvalues of the pencil `(A, M)`.
pub fn lowest_eigenvalues_2d(op: &SymmetricOperator2D, k: usize, rtol: f64) -> Result<Eigen2D> {
    lowest_eigenvalues_2d_with(op, k, rtol, LanczosOptions::default())
}

pub fn lowest_eigenvalues_2d_with(
    op: &SymmetricOperator2D,
    k: usize,
    rtol: f64,
    opts: LanczosOptions,
) -> Result<Eigen2D> {
    let n = op.len();
    if k == 0 || k > n {
        return Err(Error::param(format!("k = {k} must lie in 1..={n}")));
    }
    if !(rtol >= 1e-10) {
        return Err(Error::param(format!("rtol = {rtol} must be at least 1e-10")));
    }
    // lower the first shift until nothing lies beneath it
    let mut sigma = op.initial_shift;
    let mut fact = None;
    for _ in 0..60 {
        match factor(op, sigma) {
            Ok(f) if f.negative_count() == 0 => {
                fact = Some(f);
                break;
            }
            _ => sigma -= sigma.abs().max(1.0),
        }
    }
    let mut fact = fact.ok_or_else(|| Error::Numerical("no shift below the spectrum found".into()))?;
    let mut shifts = vec![sigma];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut locked: Vec<Ritz> = Vec::new();
    // number of locked pairs wanted; grows when the inertia count reveals a missed one
    let mut goal = k;
    let mut need = k;
    let mut steps = 0;
    let mut last_residual = f64::INFINITY;
    for _pass in 0..opts.max_restarts {
        need = need.min(n - locked.len());
        if need > 0 {
            let want = (need + 2).min(n - locked.len());
            let krylov = opts.max_krylov.max(2 * want + 10);
            let (pairs, _) = lanczos_pass(op, &fact, sigma, &locked, &start, need, want, rtol, krylov, &mut steps);
            if pairs.is_empty() {
                return Err(Error::Numerical("Lanczos produced no Ritz pairs".into()));
            }
            last_residual = pairs
                .iter()
                .take(need)
                .map(|p| p.residual / p.lambda.abs().max(1e-300))
                .fold(0.0, f64::max);
            let lowest = pairs[0].lambda;
            let spread = pairs.last().map_or(0.0, |p| p.lambda - lowest).max(0.0);
            let first_bound = pairs[0].bound;
            let mut rest = Vec::new();
            let mut taking = true;
            for (i, p) in pairs.into_iter().enumerate() {
                if taking && i < need && p.converged(rtol) {
                    locked.push(p);
                } else {
                    taking = false;
                    rest.push(p);
                }
            }
            need = goal.saturating_sub(locked.len());
            if need > 0 {
                // move the shift up towards the bottom of the spectrum, staying below it
                let floor = locked.iter().map(|p| p.lambda).fold(lowest, f64::min);
                let target = floor - (2.0 * first_bound).max(0.05 * spread).max(1e-9 * floor.abs());
                raise_shift(op, &mut sigma, &mut fact, target, floor, &mut shifts);
                start = vec![0.0; n];
                for p in rest.iter().take(need + 2) {
                    start.iter_mut().zip(&p.vector).for_each(|(s, x)| *s += x);
                }
                if start.iter().all(|x| *x == 0.0) {
                    start = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                }
                continue;
            }
        }
        locked.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let lam_k = locked[k - 1].lambda;
        let delta = (2.0 * locked[k - 1].bound).max(1e-10 * lam_k.abs().max(1.0));
        let below = count_below(op, lam_k + delta)?;
        let found = locked.iter().filter(|p| p.lambda < lam_k + delta).count();
        if below <= found {
            let certified = below == found;
            locked.truncate(k);
            return Ok(Eigen2D {
                values: locked.iter().map(|p| p.lambda).collect(),
                residuals: locked.iter().map(|p| p.residual).collect(),
                error_bounds: locked.iter().map(|p| p.bound).collect(),
                shifts,
                lanczos_steps: steps,
                certified,
            });
        }
        // eigenvalues were missed (a degenerate partner, say): search the complement
        goal = locked.len() + (below - found);
        need = below - found;
        start = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    }
    Err(Error::NotConverged {
        iterations: steps,
        residual: last_residual,
    })
}

/// Inertia bisections per restart when raising the shift.
const SHIFT_BISECTIONS: usize = 10;

/// Raises the shift toward `ceiling`, an upper bound on the lowest eigenvalue still wanted
/// (the lowest Ritz value of the last pass), while `A − σM` stays positive definite.
/// `target` is tried first; after that the gap is bisected by inertia.
fn raise_shift(
    op: &SymmetricOperator2D,
    sigma: &mut f64,
    fact: &mut BandedLdlt,
    target: f64,
    ceiling: f64,
    shifts: &mut Vec<f64>,
) {
    let (mut lo, mut hi) = (*sigma, ceiling);
    let mut best = None;
    let mut trial = if target > lo && target < hi { target } else { 0.5 * (lo + hi) };
    for _ in 0..SHIFT_BISECTIONS {
        if !(trial > lo && trial < hi) || hi - lo <= 1e-9 * hi.abs().max(1.0) {
            break;
        }
        match factor(op, trial) {
            Ok(f) if f.negative_count() == 0 => {
                lo = trial;
                best = Some(f);
            }
            _ => hi = trial,
        }
        trial = 0.5 * (lo + hi);
    }
    if let Some(f) = best {
        *fact = f;
        *sigma = lo;
        shifts.push(lo);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveConfig, CurveModel};
    use crate::longitudinal::BracketSign;
    use crate::strip::form::{assemble_form, StripGrid, StripProblem};
    use std::f64::consts::PI;

    #[test]
    fn free_strip_box_modes() {
        let model = CurveModel::from_config(&CurveConfig::line()).unwrap();
        let (a, l) = (1.0, 2.0);
        let p = StripProblem::new(&model, a, f64::INFINITY, l).unwrap();
        let g = StripGrid::new(l, a, 32, 32, BracketSign::Plus).unwrap();
        let op = assemble_form(&p, &g).unwrap();
        let e = lowest_eigenvalues_2d(&op, 3, 1e-9).unwrap();
        assert!(e.certified, "{e:?}");
        let exact = (PI / (2.0 * a)).powi(2) + (PI / (2.0 * l)).powi(2);
        // lumped Q1 on a 32 x 32 grid
        assert!((e.values[0] - exact).abs() < 2e-2 * exact, "{} vs {exact}", e.values[0]);
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for (r, v) in e.residuals.iter().zip(&e.values) {
            assert!(*r <= 1e-9 * v.abs());
        }
    }

    #[test]
    fn coupled_line_has_transverse_ground_state() {
        let model = CurveModel::from_config(&CurveConfig::line()).unwrap();
        let (a, beta, l) = (3.0, 1.0, 4.0);
        let p = StripProblem::new(&model, a, beta, l).unwrap();
        let g = StripGrid::new(l, a, 32, 96, BracketSign::Plus).unwrap();
        let op = assemble_form(&p, &g).unwrap();
        let e = lowest_eigenvalues_2d(&op, 2, 1e-9).unwrap();
        let t = crate::transverse::transverse_eigenvalue_dirichlet(a, beta).unwrap().t;
        let want = t + (PI / (2.0 * l)).powi(2);
        assert!((e.values[0] - want).abs() < 5e-3 * want.abs(), "{} vs {want}", e.values[0]);
        assert!(e.certified);
    }

    #[test]
    fn rejects_bad_requests() {
        let model = CurveModel::from_config(&CurveConfig::line()).unwrap();
        let p = StripProblem::new(&model, 1.0, 1.0, 2.0).unwrap();
        let g = StripGrid::new(2.0, 1.0, 8, 8, BracketSign::Minus).unwrap();
        let op = assemble_form(&p, &g).unwrap();
        assert!(lowest_eigenvalues_2d(&op, 0, 1e-9).is_err());
        assert!(lowest_eigenvalues_2d(&op, 1, 1e-12).is_err());
    }
}
