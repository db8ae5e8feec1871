//! One-dimensional operators `-c f'' + W f` on `(-L, L)` with Dirichlet ends.
//!
//! Used for the comparison operator `S = -d²/ds² - γ²/4` and the bracket operators
//! `U± = -(1 ∓ aγ₊)⁻² d²/ds² + V^(±)`. Eigenvalues come from a three-point discretisation,
//! Richardson-extrapolated over three meshes; the box `L` is either fixed or doubled until
//! the eigenvalues settle.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::curve::{bracket_potentials, CurvatureProfile, CurveBounds};
use crate::error::{Error, Result};
use crate::richardson::extrapolate_even;
use crate::tridiag::SymTridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketSign {
    Plus,
    Minus,
}

impl BracketSign {
    /// `+1` for the upper operator, `-1` for the lower.
    pub fn sign(self) -> f64 {
        match self {
            BracketSign::Plus => 1.0,
            BracketSign::Minus => -1.0,
        }
    }
}

/// A potential `W(s)` shared between threads.
#[derive(Clone)]
pub struct Potential1D(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl Potential1D {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.0)(s)
    }
}

impl fmt::Debug for Potential1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Potential1D(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Truncation {
    /// Use the configured `L` as is.
    Fixed,
    /// Double `L` (at fixed mesh width) until the eigenvalues move less than `rtol · |μ₁|`.
    Adaptive { rtol: f64, max_doublings: usize },
}

impl Truncation {
    pub fn adaptive() -> Self {
        Truncation::Adaptive {
            rtol: 1e-8,
            max_doublings: 6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Operator1DSpec {
    pub kinetic: f64,
    pub potential: Potential1D,
    /// Half-length `L` of the box (initial value when adaptive).
    pub half_length: f64,
    /// Cells of the coarsest mesh across `(-L, L)`.
    pub cells: usize,
    pub negative_only: bool,
    pub truncation: Truncation,
    /// Sizes the adaptive start `L = decay + 10/sqrt|μ₁|`.
    pub decay_radius: f64,
}

impl Operator1DSpec {
    pub fn new(kinetic: f64, potential: Potential1D, half_length: f64, cells: usize) -> Self {
        Self {
            kinetic,
            potential,
            half_length,
            cells,
            negative_only: true,
            truncation: Truncation::Fixed,
            decay_radius: 0.0,
        }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn all_eigenvalues(mut self) -> Self {
        self.negative_only = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.kinetic > 0.0 && self.kinetic.is_finite()) {
            return Err(Error::param(format!("kinetic coefficient {} must be positive", self.kinetic)));
        }
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::param(format!("box half-length {} must be positive", self.half_length)));
        }
        if self.cells < 64 {
            return Err(Error::param(format!("need at least 64 cells (got {})", self.cells)));
        }
        Ok(())
    }
}

/// `S = -d²/ds² - γ²/4` on `(-L, L)`.
pub fn build_comparison_operator(profile: &CurvatureProfile, half_length: f64, cells: usize) -> Operator1DSpec {
    let p = profile.clone();
    let mut spec = Operator1DSpec::new(
        1.0,
        Potential1D::new(move |s| {
            let g = p.gamma(s);
            -0.25 * g * g
        }),
        half_length,
        cells,
    );
    spec.decay_radius = finite_decay(profile);
    spec
}

/// `U± = -(1 ∓ aγ₊)⁻² d²/ds² + V^(±)` on `(-L, L)`; requires `aγ₊ < 1/2`.
pub fn build_bracket_operator(
    sign: BracketSign,
    profile: &CurvatureProfile,
    bounds: &CurveBounds,
    a: f64,
    half_length: f64,
    cells: usize,
) -> Result<Operator1DSpec> {
    if !(a >= 0.0) {
        return Err(Error::param(format!("half-width a = {a} must be nonnegative")));
    }
    let ag = a * bounds.gamma_plus;
    if ag >= 0.5 {
        return Err(Error::param(format!("a gamma_+ = {ag} must be below 1/2")));
    }
    let bp = bracket_potentials(bounds, profile, a)?;
    let kinetic = (1.0 - sign.sign() * ag).powi(-2);
    let potential = match sign {
        BracketSign::Plus => Potential1D::new(move |s| bp.plus(s)),
        BracketSign::Minus => Potential1D::new(move |s| bp.minus(s)),
    };
    let mut spec = Operator1DSpec::new(kinetic, potential, half_length, cells);
    spec.decay_radius = finite_decay(profile);
    Ok(spec)
}

fn finite_decay(profile: &CurvatureProfile) -> f64 {
    let r = profile.decay_radius();
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum1D {
    pub values: Vec<f64>,
    /// Richardson error estimate per eigenvalue.
    pub err_disc: Vec<f64>,
    /// Change under the last doubling of `L`; `NaN` for a fixed box.
    pub err_trunc: Vec<f64>,
    /// Observed convergence order per eigenvalue.
    pub orders: Vec<f64>,
    pub requested: usize,
    /// `false` when fewer than `requested` eigenvalues passed the negativity filter.
    pub complete: bool,
    /// Box actually used.
    pub half_length: f64,
    pub finest_cells: usize,
}

fn discrete_matrix(spec: &Operator1DSpec, half_length: f64, cells: usize) -> Result<SymTridiag> {
    let h = 2.0 * half_length / cells as f64;
    let c = spec.kinetic / (h * h);
    let diag = (1..cells)
        .map(|i| 2.0 * c + spec.potential.eval(-half_length + i as f64 * h))
        .collect::<Vec<_>>();
    if diag.iter().any(|d| !d.is_finite()) {
        return Err(Error::Numerical("potential is not finite on the grid".into()));
    }
    SymTridiag::new(diag, vec![-c; cells - 2])
}

struct BoxResult {
    values: Vec<f64>,
    errors: Vec<f64>,
    orders: Vec<f64>,
}

/// Three meshes `n, 2n, 4n` on a fixed box.
fn solve_box(spec: &Operator1DSpec, half_length: f64, cells: usize, k: usize) -> Result<BoxResult> {
    let levels: Vec<SymTridiag> = (0..3)
        .map(|l| discrete_matrix(spec, half_length, cells << l))
        .collect::<Result<_>>()?;
    let count = if spec.negative_only {
        levels.iter().map(|m| m.count_below(0.0)).min().unwrap_or(0).min(k)
    } else {
        k.min(levels[0].len())
    };
    let mut out = BoxResult {
        values: Vec::with_capacity(count),
        errors: Vec::with_capacity(count),
        orders: Vec::with_capacity(count),
    };
    for j in 0..count {
        let seq: Vec<f64> = levels.iter().map(|m| m.eigenvalue(j)).collect();
        let ex = extrapolate_even(&seq);
        out.values.push(ex.value);
        out.errors.push(ex.error);
        out.orders.push(ex.observed_order);
    }
    if spec.negative_only {
        // an extrapolated value may cross 0 for a barely bound state
        let keep = out.values.iter().take_while(|&&v| v < 0.0).count();
        out.values.truncate(keep);
        out.errors.truncate(keep);
        out.orders.truncate(keep);
    }
    Ok(out)
}

/// Up to `k` lowest eigenvalues (below 0 unless the filter is off).
pub fn lowest_eigenvalues_1d(spec: &Operator1DSpec, k: usize) -> Result<Spectrum1D> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    spec.validate()?;
    let h = 2.0 * spec.half_length / spec.cells as f64;
    let (half_length, cells, res, err_trunc) = match spec.truncation {
        Truncation::Fixed => {
            let r = solve_box(spec, spec.half_length, spec.cells, k)?;
            let nan = vec![f64::NAN; r.values.len()];
            (spec.half_length, spec.cells, r, nan)
        }
        Truncation::Adaptive { rtol, max_doublings } => {
            let mut l = spec.half_length;
            let mut r = solve_box(spec, l, spec.cells, k)?;
            // a weakly bound state only shows once the box exceeds its decay length
            let mut grown = 0;
            while spec.negative_only && r.values.is_empty() && grown < max_doublings {
                l *= 2.0;
                r = solve_box(spec, l, cells_for(l, h), k)?;
                grown += 1;
            }
            if r.values.is_empty() {
                let n = cells_for(l, h);
                return Ok(Spectrum1D {
                    values: vec![],
                    err_disc: vec![],
                    err_trunc: vec![],
                    orders: vec![],
                    requested: k,
                    complete: false,
                    half_length: l,
                    finest_cells: n << 2,
                });
            }
            if let Some(&mu) = r.values.first() {
                if mu < 0.0 {
                    let need = spec.decay_radius + 10.0 / mu.abs().sqrt();
                    if need > l {
                        l = need;
                        r = solve_box(spec, l, cells_for(l, h), k)?;
                    }
                }
            }
            let mut trunc = vec![f64::NAN; r.values.len()];
            let mut doublings = 0;
            loop {
                let next_l = 2.0 * l;
                let next = solve_box(spec, next_l, cells_for(next_l, h), k)?;
                let scale = next.values.first().map_or(1.0, |v| v.abs().max(1e-300));
                let shared = r.values.len().min(next.values.len());
                let change: Vec<f64> = (0..shared).map(|j| (next.values[j] - r.values[j]).abs()).collect();
                let settled = next.values.len() == r.values.len() && change.iter().all(|&d| d < rtol * scale);
                trunc = change;
                trunc.resize(next.values.len(), f64::NAN);
                l = next_l;
                r = next;
                doublings += 1;
                if settled {
                    break;
                }
                if doublings >= max_doublings {
                    return Err(Error::NotConverged {
                        iterations: doublings,
                        residual: trunc.iter().cloned().filter(|x| x.is_finite()).fold(0.0, f64::max),
                    });
                }
            }
            (l, cells_for(l, h), r, trunc)
        }
    };
    let complete = res.values.len() >= k;
    Ok(Spectrum1D {
        values: res.values,
        err_disc: res.errors,
        err_trunc,
        orders: res.orders,
        requested: k,
        complete,
        half_length,
        finest_cells: cells << 2,
    })
}

fn cells_for(half_length: f64, h: f64) -> usize {
    ((2.0 * half_length / h).round() as usize).max(64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongResidual {
    pub a: f64,
    pub j: usize,
    pub sign: BracketSign,
    pub mu: f64,
    pub mu_bracket: f64,
    pub diff: f64,
    /// `diff / (a j²)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongCheck {
    /// Smallest `C` with `|μ_j±(a) − μ_j| ≤ C a j²` over all entries.
    pub constant: f64,
    /// Per-`a` constants, in input order.
    pub per_a: Vec<(f64, f64)>,
    /// Largest over smallest per-`a` constant is at most 2.
    pub stable: bool,
    pub j_used: usize,
    /// `j_max` was reduced because `S` has fewer negative eigenvalues.
    pub restricted: bool,
    pub residuals: Vec<LongResidual>,
}

/// Box and mesh for [`lemma_long_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongGrid {
    pub half_length: f64,
    pub cells: usize,
}

impl Default for LongGrid {
    fn default() -> Self {
        Self {
            half_length: 40.0,
            cells: 1600,
        }
    }
}

/// Fits `C` in `|μ_j±(a) − μ_j| ≤ C a j²` over `a_list` and `j <= j_max`.
pub fn lemma_long_check(
    profile: &CurvatureProfile,
    bounds: &CurveBounds,
    a_list: &[f64],
    j_max: usize,
    grid: LongGrid,
) -> Result<LongCheck> {
    if a_list.is_empty() || j_max == 0 {
        return Err(Error::param("need at least one a and j_max >= 1"));
    }
    let s = lowest_eigenvalues_1d(&build_comparison_operator(profile, grid.half_length, grid.cells), j_max)?;
    let j_used = s.values.len();
    let mut residuals = Vec::new();
    let mut per_a = Vec::new();
    for &a in a_list {
        let mut c_a: f64 = 0.0;
        for sign in [BracketSign::Plus, BracketSign::Minus] {
            if j_used == 0 {
                break;
            }
            let op = build_bracket_operator(sign, profile, bounds, a, grid.half_length, grid.cells)?.all_eigenvalues();
            let u = lowest_eigenvalues_1d(&op, j_used)?;
            for j in 0..j_used {
                let diff = (u.values[j] - s.values[j]).abs();
                let jj = (j + 1) as f64;
                let ratio = diff / (a * jj * jj);
                c_a = c_a.max(ratio);
                residuals.push(LongResidual {
                    a,
                    j: j + 1,
                    sign,
                    mu: s.values[j],
                    mu_bracket: u.values[j],
                    diff,
                    ratio,
                });
            }
        }
        per_a.push((a, c_a));
    }
    let constant = per_a.iter().map(|p| p.1).fold(0.0, f64::max);
    let min_c = per_a.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let stable = constant == 0.0 || constant <= 2.0 * min_c;
    Ok(LongCheck {
        constant,
        per_a,
        stable,
        j_used,
        restricted: j_used < j_max,
        residuals,
    })
}
