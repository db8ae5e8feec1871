//! Mesh-refinement studies of the strip eigenvalues.

use serde::Serialize;

use super::eigen::lowest_eigenvalues_2d;
use super::form::{assemble_form, StripGrid, StripProblem};
use crate::error::{Error, Result};
use crate::longitudinal::BracketSign;
use crate::richardson::{extrapolate_even, Extrapolation};

/// Order below which a study is flagged.
pub const LOW_ORDER: f64 = 1.7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyLevel {
    pub n_s: usize,
    pub n_u: usize,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub which: BracketSign,
    pub levels: Vec<StudyLevel>,
    /// One extrapolation per eigenvalue index.
    pub extrapolated: Vec<Extrapolation>,
    /// Some observed order fell below [`LOW_ORDER`].
    pub low_order: bool,
}

impl ConvergenceStudy {
    pub fn values(&self) -> Vec<f64> {
        self.extrapolated.iter().map(|e| e.value).collect()
    }
}

/// Solves on `levels` meshes, halving both widths from `(n_s, n_u)` each time.
pub fn convergence_study(
    problem: &StripProblem,
    which: BracketSign,
    n_s: usize,
    n_u: usize,
    levels: usize,
    k: usize,
    rtol: f64,
) -> Result<ConvergenceStudy> {
    if levels < 3 {
        return Err(Error::param(format!("a convergence study needs at least 3 levels (got {levels})")));
    }
    let mut out = Vec::with_capacity(levels);
    for l in 0..levels {
        let grid = StripGrid::new(problem.half_length, problem.halfwidth, n_s << l, n_u << l, which)?;
        let op = assemble_form(problem, &grid)?;
        let e = lowest_eigenvalues_2d(&op, k, rtol)?;
        out.push(StudyLevel {
            n_s: grid.n_s,
            n_u: grid.n_u,
            values: e.values,
            residuals: e.residuals,
            certified: e.certified,
        });
    }
    let extrapolated: Vec<Extrapolation> = (0..k)
        .map(|j| extrapolate_even(&out.iter().map(|lv| lv.values[j]).collect::<Vec<_>>()))
        .collect();
    let low_order = extrapolated.iter().any(|e| !(e.observed_order >= LOW_ORDER));
    Ok(ConvergenceStudy {
        which,
        levels: out,
        extrapolated,
        low_order,
    })
}
