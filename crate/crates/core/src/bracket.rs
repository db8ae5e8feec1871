//! Two-sided eigenvalue bounds from the separable bracket operators, the certified
//! essential-spectrum threshold and strong-coupling asymptotics studies.
//!
//! The bracket spectra are `t₋ + μ_j⁻(a)` (lower) and `t₊ + μ_j⁺(a)` (upper), with `t±` the
//! transverse ground states of width `2a` and `μ_j±` the eigenvalues of `U±` on the shared
//! box `(-L, L)`. The prediction is `-4/β² + μ_j` with `μ_j` the bound states of `S`.

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{v_tau, CurveModel};
use crate::error::{Error, Result};
use crate::longitudinal::{
    build_bracket_operator, build_comparison_operator, lowest_eigenvalues_1d, BracketSign, Truncation,
};
use crate::strip::{convergence_study, StripProblem};
use crate::transverse::{in_regime, lemma_trans_envelope, solve_transcendental, TransverseProblem};

/// `β` below which `a(β)/β = -(3/4) ln β` exceeds 2.
pub fn regime_beta() -> f64 {
    (-8.0f64 / 3.0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    pub beta: f64,
    pub halfwidth: f64,
    /// `a/β`.
    pub ratio: f64,
    pub in_regime: bool,
}

/// `a(β) = -(3/4) β ln β`.
pub fn halfwidth_schedule(beta: f64) -> Result<Schedule> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param(format!("schedule needs 0 < beta < 1 (got {beta})")));
    }
    let ratio = -0.75 * beta.ln();
    Ok(Schedule {
        beta,
        halfwidth: ratio * beta,
        ratio,
        in_regime: ratio > 2.0,
    })
}

/// Box and mesh shared by the 1D bracket solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketOptions {
    /// Longitudinal box half-length `L`, also used by direct strip solves.
    pub half_length: f64,
    /// Coarsest 1D mesh across `(-L, L)`.
    pub cells: usize,
    /// Run outside the transverse regime instead of failing.
    pub allow_outside_regime: bool,
    /// Replaces `a(β)` when set.
    pub halfwidth: Option<f64>,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            half_length: 20.0,
            cells: 800,
            allow_outside_regime: false,
            halfwidth: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketRecord {
    pub j: usize,
    /// `t₋ + μ_j⁻(a)`.
    pub lower: f64,
    /// `t₊ + μ_j⁺(a)`.
    pub upper: f64,
    /// `-4/β² + μ_j`.
    pub prediction: f64,
    pub mu: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    /// Combined discretisation error of the 1D pieces.
    pub tolerance: f64,
    pub lambda_minus: Option<f64>,
    pub lambda_plus: Option<f64>,
    /// Error estimates of the direct solves.
    pub lambda_minus_error: Option<f64>,
    pub lambda_plus_error: Option<f64>,
    /// Worst `|λ + 4/β² - μ_j|` over the lower side, the upper side and the midpoint, where
    /// the sides are the direct solves when present and the bracket ends otherwise.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketedSpectrum {
    pub beta: f64,
    pub halfwidth: f64,
    pub in_regime: bool,
    pub t_minus: f64,
    pub t_plus: f64,
    /// `-4/β²`.
    pub threshold: f64,
    pub half_length: f64,
    pub records: Vec<BracketRecord>,
    pub requested: usize,
    /// `false` when `S` has fewer than `requested` bound states.
    pub complete: bool,
}

impl BracketedSpectrum {
    /// `lower ≤ upper` for every record, up to the reported tolerance.
    pub fn ordered(&self) -> bool {
        self.records.iter().all(|r| r.lower <= r.upper + r.tolerance)
    }

    /// `lower - ε ≤ λ⁻ ≤ λ⁺ ≤ upper + ε` for every record with direct solves.
    pub fn sandwich_holds(&self) -> bool {
        self.records.iter().all(|r| match (r.lambda_minus, r.lambda_plus) {
            (Some(m), Some(p)) => {
                let eps = r.tolerance + r.lambda_minus_error.unwrap_or(0.0) + r.lambda_plus_error.unwrap_or(0.0);
                r.lower - eps <= m && m <= p + eps && p <= r.upper + eps
            }
            _ => true,
        })
    }

    /// Largest `|t± + 4/β²|`, the residual when there is no bound state.
    pub fn transverse_residual(&self) -> f64 {
        (self.t_minus - self.threshold).abs().max((self.t_plus - self.threshold).abs())
    }
}

fn transverse_pair(a: f64, beta: f64, gamma_plus: f64, force: bool) -> Result<(f64, f64)> {
    let mut d = TransverseProblem::dirichlet(a, beta);
    let mut r = TransverseProblem::robin(a, beta, gamma_plus);
    if force {
        d = d.allow_outside_regime();
        r = r.allow_outside_regime();
    }
    Ok((solve_transcendental(&r)?.t, solve_transcendental(&d)?.t))
}

/// Bracket spectra at `a = a(β)` (or the override) for the `k` lowest indices.
pub fn bracket_spectrum(model: &CurveModel, beta: f64, k: usize, opts: &BracketOptions) -> Result<BracketedSpectrum> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let (a, scheduled_regime) = match opts.halfwidth {
        Some(a) => (a, true),
        None => {
            let s = halfwidth_schedule(beta)?;
            (s.halfwidth, s.in_regime)
        }
    };
    let gp = model.bounds.gamma_plus;
    let in_reg = scheduled_regime && in_regime(a, beta, gp);
    if !in_reg && !opts.allow_outside_regime {
        return Err(Error::Regime {
            ratio: a / beta,
            coupling: 0.5 * beta * gp,
        });
    }
    let (t_minus, t_plus) = transverse_pair(a, beta, gp, opts.allow_outside_regime)?;

    let s = build_comparison_operator(&model.profile, opts.half_length, opts.cells).with_truncation(Truncation::adaptive());
    let mu = lowest_eigenvalues_1d(&s, k)?;
    let count = mu.values.len();
    let mut records = Vec::with_capacity(count);
    if count > 0 {
        let solve = |sign| -> Result<_> {
            let op = build_bracket_operator(sign, &model.profile, &model.bounds, a, opts.half_length, opts.cells)?
                .all_eigenvalues();
            lowest_eigenvalues_1d(&op, count)
        };
        let minus = solve(BracketSign::Minus)?;
        let plus = solve(BracketSign::Plus)?;
        let threshold = -4.0 / (beta * beta);
        for j in 0..count {
            let lower = t_minus + minus.values[j];
            let upper = t_plus + plus.values[j];
            let prediction = threshold + mu.values[j];
            let mut rec = BracketRecord {
                j: j + 1,
                lower,
                upper,
                prediction,
                mu: mu.values[j],
                mu_minus: minus.values[j],
                mu_plus: plus.values[j],
                tolerance: minus.err_disc[j] + plus.err_disc[j],
                lambda_minus: None,
                lambda_plus: None,
                lambda_minus_error: None,
                lambda_plus_error: None,
                residual: 0.0,
            };
            rec.residual = worst_residual(&rec, beta);
            records.push(rec);
        }
    }
    Ok(BracketedSpectrum {
        beta,
        halfwidth: a,
        in_regime: in_reg,
        t_minus,
        t_plus,
        threshold: -4.0 / (beta * beta),
        half_length: opts.half_length,
        records,
        requested: k,
        complete: count >= k,
    })
}

fn worst_residual(r: &BracketRecord, beta: f64) -> f64 {
    let lo = r.lambda_minus.unwrap_or(r.lower);
    let hi = r.lambda_plus.unwrap_or(r.upper);
    let shift = 4.0 / (beta * beta) - r.mu;
    [lo, hi, 0.5 * (r.lower + r.upper)]
        .iter()
        .map(|v| (v + shift).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EssentialThresholdBound {
    pub beta: f64,
    pub tau: f64,
    pub halfwidth: f64,
    pub v_tau: f64,
    /// `V_τ - 4/β² - (16/β²) e^{-4a/β}`.
    pub value: f64,
}

/// Lower bound on the essential spectrum from the potential outside `|s| ≤ τ`.
pub fn ess_threshold_bound(model: &CurveModel, beta: f64, tau: f64, a: f64) -> Result<EssentialThresholdBound> {
    if !in_regime(a, beta, model.bounds.gamma_plus) {
        return Err(Error::Regime {
            ratio: a / beta,
            coupling: 0.5 * beta * model.bounds.gamma_plus,
        });
    }
    let (lo, _) = lemma_trans_envelope(a, beta)?;
    let v = v_tau(&model.profile, a, tau)?;
    Ok(EssentialThresholdBound {
        beta,
        tau,
        halfwidth: a,
        v_tau: v,
        value: v + lo,
    })
}

/// `τ ∈ {1, 2, 4, ..., 64}`.
pub const TAU_GRID: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedThreshold {
    /// Largest bound over the grid.
    pub best: EssentialThresholdBound,
    pub grid: Vec<EssentialThresholdBound>,
}

pub fn certified_threshold(model: &CurveModel, beta: f64, a: f64) -> Result<CertifiedThreshold> {
    let grid = TAU_GRID
        .iter()
        .map(|&tau| ess_threshold_bound(model, beta, tau, a))
        .collect::<Result<Vec<_>>>()?;
    let best = *grid
        .iter()
        .max_by(|x, y| x.value.total_cmp(&y.value))
        .expect("tau grid is not empty");
    Ok(CertifiedThreshold { best, grid })
}

/// Strip meshes for the direct solves of an asymptotics study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectOptions {
    pub n_s: usize,
    pub n_u: usize,
    pub levels: usize,
    pub rtol: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            n_s: 375,
            n_u: 40,
            levels: 3,
            rtol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StudyOptions {
    pub bracket: BracketOptions,
    pub direct: Option<DirectOptions>,
}

/// One CSV row of an asymptotics study. `j = 0` marks a curve without bound states,
/// where the row carries the transverse pair against `-4/β²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyRow {
    pub beta: f64,
    pub a: f64,
    pub j: usize,
    pub lower: f64,
    pub upper: f64,
    pub prediction: f64,
    pub lambda_minus: Option<f64>,
    pub lambda_plus: Option<f64>,
    pub residual: f64,
    pub ratio_to_beta_lnbeta: f64,
}

pub const STUDY_COLUMNS: [&str; 10] = [
    "beta",
    "a",
    "j",
    "lower",
    "upper",
    "prediction",
    "lambda_minus",
    "lambda_plus",
    "residual",
    "ratio_to_beta_lnbeta",
];

impl StudyRow {
    pub fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        format!(
            "{:e},{:e},{},{:e},{:e},{:e},{},{},{:e},{:e}",
            self.beta,
            self.a,
            self.j,
            self.lower,
            self.upper,
            self.prediction,
            opt(self.lambda_minus),
            opt(self.lambda_plus),
            self.residual,
            self.ratio_to_beta_lnbeta
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsStudy {
    pub spectra: Vec<BracketedSpectrum>,
    pub rows: Vec<StudyRow>,
    /// Least-squares `C` in `|r| = C β|ln β|`, fitted on the logarithm, per index `j`.
    pub fitted: Vec<(usize, f64)>,
    /// Largest `|ln(ratio / C)|` over the grid.
    pub max_log_deviation: f64,
    /// Largest over smallest ratio, per index.
    pub spread: Vec<(usize, f64)>,
    /// Every spread is below 2 and every grid point is in the regime.
    pub bounded: bool,
}

impl AsymptoticsStudy {
    pub fn to_csv(&self) -> String {
        let mut out = STUDY_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }
}

fn with_direct(model: &CurveModel, mut spec: BracketedSpectrum, d: &DirectOptions) -> Result<BracketedSpectrum> {
    let k = spec.records.len();
    if k == 0 {
        return Ok(spec);
    }
    let p = StripProblem::new(model, spec.halfwidth, spec.beta, spec.half_length)?;
    let minus = convergence_study(&p, BracketSign::Minus, d.n_s, d.n_u, d.levels, k, d.rtol)?;
    let plus = convergence_study(&p, BracketSign::Plus, d.n_s, d.n_u, d.levels, k, d.rtol)?;
    let beta = spec.beta;
    for (j, r) in spec.records.iter_mut().enumerate() {
        r.lambda_minus = Some(minus.extrapolated[j].value);
        r.lambda_plus = Some(plus.extrapolated[j].value);
        r.lambda_minus_error = Some(minus.extrapolated[j].error);
        r.lambda_plus_error = Some(plus.extrapolated[j].error);
        r.residual = worst_residual(r, beta);
    }
    Ok(spec)
}

/// Brackets (and optionally direct strip solves) over a `β` grid, with the fitted
/// `O(β|ln β|)` remainder law. Grid points run in parallel; rows are ordered by
/// decreasing `β`.
pub fn asymptotics_study(model: &CurveModel, betas: &[f64], k: usize, opts: &StudyOptions) -> Result<AsymptoticsStudy> {
    if betas.is_empty() {
        return Err(Error::param("beta grid is empty"));
    }
    let mut betas = betas.to_vec();
    betas.sort_by(|x, y| y.total_cmp(x));
    let spectra = betas
        .par_iter()
        .map(|&beta| {
            let spec = bracket_spectrum(model, beta, k, &opts.bracket)?;
            match &opts.direct {
                Some(d) => with_direct(model, spec, d),
                None => Ok(spec),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for s in &spectra {
        let scale = s.beta * s.beta.ln().abs();
        if s.records.is_empty() {
            let residual = s.transverse_residual();
            rows.push(StudyRow {
                beta: s.beta,
                a: s.halfwidth,
                j: 0,
                lower: s.t_minus,
                upper: s.t_plus,
                prediction: s.threshold,
                lambda_minus: None,
                lambda_plus: None,
                residual,
                ratio_to_beta_lnbeta: residual / scale,
            });
        }
        for r in &s.records {
            rows.push(StudyRow {
                beta: s.beta,
                a: s.halfwidth,
                j: r.j,
                lower: r.lower,
                upper: r.upper,
                prediction: r.prediction,
                lambda_minus: r.lambda_minus,
                lambda_plus: r.lambda_plus,
                residual: r.residual,
                ratio_to_beta_lnbeta: r.residual / scale,
            });
        }
    }

    let mut fitted = Vec::new();
    let mut spread = Vec::new();
    let mut max_log_deviation: f64 = 0.0;
    let max_j = rows.iter().map(|r| r.j).max().unwrap_or(0);
    for j in 1..=max_j {
        let logs: Vec<f64> = rows.iter().filter(|r| r.j == j).map(|r| r.ratio_to_beta_lnbeta.ln()).collect();
        let log_c = logs.iter().sum::<f64>() / logs.len() as f64;
        for l in &logs {
            max_log_deviation = max_log_deviation.max((l - log_c).abs());
        }
        let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
        fitted.push((j, log_c.exp()));
        spread.push((j, (hi - lo).exp()));
    }
    let bounded = spectra.iter().all(|s| s.in_regime) && spread.iter().all(|&(_, f)| f < 2.0);
    Ok(AsymptoticsStudy {
        spectra,
        rows,
        fitted,
        max_log_deviation,
        spread,
        bounded,
    })
}
