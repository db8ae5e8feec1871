//! Tensor grid on `(-L, L) × ((-a, 0) ∪ (0, a))` and assembly of the strip forms.
//!
//! Unknowns are ordered with `u` fastest. Each column lists the nodes of the lower half up
//! to `0-`, then `0+` and the nodes of the upper half, so the doubled interface row sits
//! in the middle of the column and the matrix is banded with half-bandwidth equal to
//! the column size.

use serde::Serialize;

use super::banded::BandedSym;
use crate::curve::{potential_unchecked, CurvatureProfile, CurveModel};
use crate::error::{Error, Result};
use crate::longitudinal::BracketSign;
use crate::transverse::{in_regime, lemma_trans_envelope};

/// Where a node sits across the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRole {
    Interior,
    /// `u = 0-` or `u = 0+`.
    Interface,
    /// `u = ±a`, present only for the lower form.
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnNode {
    pub u: f64,
    /// `true` on the `u > 0` side (including `0+`).
    pub upper: bool,
    pub role: NodeRole,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripGrid {
    pub half_length: f64,
    pub halfwidth: f64,
    /// Cells across `(-L, L)`.
    pub n_s: usize,
    /// Cells across `(-a, a)`, split evenly by the interface.
    pub n_u: usize,
    pub which: BracketSign,
}

impl StripGrid {
    pub fn new(half_length: f64, halfwidth: f64, n_s: usize, n_u: usize, which: BracketSign) -> Result<Self> {
        if !(half_length > 0.0 && halfwidth > 0.0) || !half_length.is_finite() || !halfwidth.is_finite() {
            return Err(Error::param("strip grid needs L > 0 and a > 0"));
        }
        if n_s < 4 || n_u < 4 || n_u % 2 != 0 {
            return Err(Error::param(format!("need n_s >= 4 and even n_u >= 4 (got {n_s}, {n_u})")));
        }
        Ok(Self {
            half_length,
            halfwidth,
            n_s,
            n_u,
            which,
        })
    }

    pub fn h_s(&self) -> f64 {
        2.0 * self.half_length / self.n_s as f64
    }

    pub fn h_u(&self) -> f64 {
        2.0 * self.halfwidth / self.n_u as f64
    }

    /// Unknowns per `s` node.
    pub fn column_size(&self) -> usize {
        match self.which {
            BracketSign::Plus => self.n_u,
            BracketSign::Minus => self.n_u + 2,
        }
    }

    /// Interior `s` nodes (Dirichlet at `s = ±L`).
    pub fn s_nodes(&self) -> usize {
        self.n_s - 1
    }

    pub fn len(&self) -> usize {
        self.s_nodes() * self.column_size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn s(&self, i: usize) -> f64 {
        -self.half_length + (i + 1) as f64 * self.h_s()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.column_size() + j
    }

    /// Column layout from `u = -a` upwards.
    pub fn column(&self) -> Vec<ColumnNode> {
        let half = self.n_u / 2;
        let h = self.h_u();
        let a = self.halfwidth;
        let edge = self.which == BracketSign::Minus;
        let mut col = Vec::with_capacity(self.column_size());
        let first = if edge { 0 } else { 1 };
        for k in first..=half {
            let role = if k == half {
                NodeRole::Interface
            } else if k == 0 {
                NodeRole::Edge
            } else {
                NodeRole::Interior
            };
            let u = if k == half { 0.0 } else { -a + k as f64 * h };
            col.push(ColumnNode { u, upper: false, role });
        }
        let last = if edge { half } else { half - 1 };
        for k in 0..=last {
            let role = if k == 0 {
                NodeRole::Interface
            } else if k == half {
                NodeRole::Edge
            } else {
                NodeRole::Interior
            };
            let u = if k == half { a } else { k as f64 * h };
            col.push(ColumnNode { u, upper: true, role });
        }
        col
    }

    /// Lumped weight of each column node in `u`.
    fn u_weights(&self, col: &[ColumnNode]) -> Vec<f64> {
        let h = self.h_u();
        col.iter()
            .map(|n| if n.role == NodeRole::Interior { h } else { 0.5 * h })
            .collect()
    }
}

/// Geometry and coupling shared by both strip forms.
#[derive(Debug, Clone)]
pub struct StripProblem {
    pub profile: CurvatureProfile,
    pub gamma_plus: f64,
    pub injectivity: f64,
    pub halfwidth: f64,
    /// `f64::INFINITY` decouples the two sides of the interface.
    pub beta: f64,
    pub half_length: f64,
}

impl StripProblem {
    pub fn new(model: &CurveModel, halfwidth: f64, beta: f64, half_length: f64) -> Result<Self> {
        let p = Self {
            profile: model.profile.clone(),
            gamma_plus: model.bounds.gamma_plus,
            injectivity: model.injectivity,
            halfwidth,
            beta,
            half_length,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::param(format!("beta = {} must be positive", self.beta)));
        }
        if !(self.halfwidth > 0.0 && self.halfwidth < self.injectivity) {
            return Err(Error::param(format!(
                "half-width a = {} must lie in (0, d) with d = {}",
                self.halfwidth, self.injectivity
            )));
        }
        if self.halfwidth * self.gamma_plus >= 1.0 {
            return Err(Error::param(format!(
                "a gamma_+ = {} must be below 1",
                self.halfwidth * self.gamma_plus
            )));
        }
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::param("box half-length L must be positive"));
        }
        Ok(())
    }

    pub fn inv_beta(&self) -> f64 {
        1.0 / self.beta
    }

    /// A value below the spectrum of either form, used as the first shift: the lower
    /// transverse envelope minus `1/β²` inside the transverse regime.
    pub fn initial_shift(&self) -> f64 {
        let b = self.beta;
        if b.is_finite() && in_regime(self.halfwidth, b, self.gamma_plus) {
            if let Ok((lo, _)) = lemma_trans_envelope(self.halfwidth, b) {
                return lo - 1.0 / (b * b);
            }
        }
        // outside the regime the transverse ground state lies above -4/β² - 4γ₊²
        let ib = self.inv_beta();
        -5.0 * ib * ib - 4.0 * self.gamma_plus * self.gamma_plus - 1.0
    }
}

/// Stiffness/mass pencil of one strip form.
#[derive(Debug, Clone)]
pub struct SymmetricOperator2D {
    pub stiffness: BandedSym,
    /// Lumped (diagonal) mass.
    pub mass: Vec<f64>,
    pub grid: StripGrid,
    pub which: BracketSign,
    /// Largest `|A_ij - A_ji|` seen during assembly.
    pub symmetry_residual: f64,
    pub initial_shift: f64,
}

impl SymmetricOperator2D {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Largest `|i - j|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let n = self.len();
        let b = self.stiffness.bandwidth();
        let mut w = 0;
        for i in 0..n {
            for j in i.saturating_sub(b)..i {
                if self.stiffness.get(i, j) != 0.0 {
                    w = w.max(i - j);
                }
            }
        }
        w
    }

    /// Nonzero entries of the stiffness matrix, both triangles, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let b = self.stiffness.bandwidth();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i.saturating_sub(b)..(i + b + 1).min(n) {
                let v = self.stiffness.get(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Assembles `q⁺` (Dirichlet at `u = ±a`) or `q⁻` (natural at `u = ±a` with the curvature
/// edge terms) with Dirichlet ends at `s = ±L`.
pub fn assemble_form(problem: &StripProblem, grid: &StripGrid) -> Result<SymmetricOperator2D> {
    problem.validate()?;
    if (grid.halfwidth - problem.halfwidth).abs() > 1e-15 * problem.halfwidth
        || (grid.half_length - problem.half_length).abs() > 1e-15 * problem.half_length
    {
        return Err(Error::param("grid and problem disagree on a or L"));
    }
    let col = grid.column();
    let m = col.len();
    let ns = grid.s_nodes();
    let n = grid.len();
    let hs = grid.h_s();
    let hu = grid.h_u();
    let a = grid.halfwidth;
    let wu = grid.u_weights(&col);
    let ib = problem.inv_beta();
    let prof = &problem.profile;

    // Triplets for both triangles, so symmetry can be checked rather than assumed.
    let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(n * 7);
    let pair = |p: usize, q: usize, w: f64, t: &mut Vec<(usize, usize, f64)>| {
        // w (f_p - f_q)²
        t.push((p, p, w));
        t.push((q, q, w));
        t.push((p, q, -w));
        t.push((q, p, -w));
    };
    let mut mass = vec![0.0; n];

    // Adjacent u-nodes of the same half; Dirichlet ends enter as a diagonal-only bond.
    let mut bonds: Vec<(Option<usize>, Option<usize>)> = Vec::new();
    for j in 0..m.saturating_sub(1) {
        if col[j].upper == col[j + 1].upper {
            bonds.push((Some(j), Some(j + 1)));
        }
    }
    if grid.which == BracketSign::Plus {
        bonds.push((None, Some(0)));
        bonds.push((Some(m - 1), None));
    }
    let lower_if = col.iter().position(|c| c.role == NodeRole::Interface && !c.upper).unwrap();
    let upper_if = lower_if + 1;

    for i in 0..ns {
        let s = grid.s(i);
        let jet = prof.eval(s);
        let g = jet.value;
        for (j, node) in col.iter().enumerate() {
            let idx = grid.index(i, j);
            let w = hs * wu[j];
            mass[idx] = w;
            let v = potential_unchecked(g, jet.d1, jet.d2, node.u);
            trip.push((idx, idx, w * v));
        }
        for &(p, q) in &bonds {
            let w = hs / hu;
            match (p, q) {
                (Some(p), Some(q)) => pair(grid.index(i, p), grid.index(i, q), w, &mut trip),
                (Some(p), None) | (None, Some(p)) => {
                    let k = grid.index(i, p);
                    trip.push((k, k, w));
                }
                (None, None) => {}
            }
        }
        // interface: -β⁻¹ (f₊ - f₋)² + γ/2 (f₊² - f₋²)
        let kp = grid.index(i, upper_if);
        let km = grid.index(i, lower_if);
        if ib != 0.0 {
            pair(kp, km, -hs * ib, &mut trip);
        }
        trip.push((kp, kp, 0.5 * hs * g));
        trip.push((km, km, -0.5 * hs * g));
        if grid.which == BracketSign::Minus {
            let top = grid.index(i, m - 1);
            let bottom = grid.index(i, 0);
            trip.push((top, top, -hs * g / (2.0 * (1.0 + a * g))));
            trip.push((bottom, bottom, hs * g / (2.0 * (1.0 - a * g))));
        }
    }
    // ∂_s energy with weight 1/g² at cell midpoints, Dirichlet at s = ±L.
    for c in 0..=ns {
        let s_mid = -grid.half_length + (c as f64 + 0.5) * hs;
        let gm = prof.gamma(s_mid);
        for (j, node) in col.iter().enumerate() {
            let metric = 1.0 + node.u * gm;
            if metric <= 0.0 {
                return Err(Error::geometry(format!("degenerate metric at (s, u) = ({s_mid}, {})", node.u)));
            }
            let w = wu[j] / hs / (metric * metric);
            let left = if c > 0 { Some(grid.index(c - 1, j)) } else { None };
            let right = if c < ns { Some(grid.index(c, j)) } else { None };
            match (left, right) {
                (Some(p), Some(q)) => pair(p, q, w, &mut trip),
                (Some(p), None) | (None, Some(p)) => trip.push((p, p, w)),
                (None, None) => {}
            }
        }
    }

    trip.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(trip.len() / 2);
    for (i, j, v) in trip {
        match merged.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => merged.push((i, j, v)),
        }
    }
    let mut asym: f64 = 0.0;
    let mut band = BandedSym::zeros(n, m);
    for &(i, j, v) in &merged {
        if i > j {
            let t = merged
                .binary_search_by(|e| (e.0, e.1).cmp(&(j, i)))
                .map(|k| merged[k].2)
                .unwrap_or(0.0);
            asym = asym.max((v - t).abs());
        }
        if i >= j {
            band.add(i, j, v)?;
        }
    }
    assert!(asym == 0.0, "strip form assembled asymmetric (residual {asym})");
    Ok(SymmetricOperator2D {
        stiffness: band,
        mass,
        grid: grid.clone(),
        which: grid.which,
        symmetry_residual: asym,
        initial_shift: problem.initial_shift(),
    })
}
