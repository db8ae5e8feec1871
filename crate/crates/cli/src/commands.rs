//! Subcommand arguments and their runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use deltaprime::bracket::{
    asymptotics_study, certified_threshold, ess_threshold_bound, halfwidth_schedule, BracketOptions, DirectOptions,
    StudyOptions,
};
use deltaprime::curve::CurveModel;
use deltaprime::longitudinal::{
    build_bracket_operator, build_comparison_operator, lowest_eigenvalues_1d, BracketSign, Truncation,
};
use deltaprime::parse::parse_beta_list;
use deltaprime::richardson::extrapolate_even;
use deltaprime::strip::{assemble_form, convergence_study, lowest_eigenvalues_2d, write_coo, StripGrid, StripProblem};
use deltaprime::transverse::{
    lemma_trans_envelope, solve_transcendental, transverse_fd_oracle, TransverseEigenvalue, TransverseProblem,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{json, num, CliError, Experiment, Report};

fn need_curve(curve: Option<&CurveModel>) -> Result<&CurveModel, CliError> {
    curve.ok_or_else(|| CliError::Usage("this subcommand needs --curve".into()))
}

/// `<stem><suffix>` next to the primary output.
fn sibling(primary: &str, suffix: &str) -> String {
    let stem = Path::new(primary).file_stem().and_then(|s| s.to_str()).unwrap_or(primary);
    format!("{stem}{suffix}")
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CurveArgs {
    /// Curve configuration (JSON).
    #[arg(long)]
    #[serde(skip)]
    pub curve: Option<PathBuf>,
    /// Samples of the reconstruction across the window.
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    /// Summary file name (JSON); samples go to `<stem>.csv`.
    #[arg(long)]
    pub out: Option<String>,
}

impl Experiment for CurveArgs {
    const NAME: &'static str = "curve";
    const DEFAULT_OUT: &'static str = "curve.json";

    fn curve_path(&self) -> Option<&Path> {
        self.curve.as_deref()
    }
    fn out(&self) -> Option<&str> {
        self.out.as_deref()
    }
    fn out_mut(&mut self) -> &mut Option<String> {
        &mut self.out
    }

    fn run(&self, curve: Option<&CurveModel>, primary: &str) -> Result<Report, CliError> {
        let m = need_curve(curve)?;
        if self.samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        let w = m.config.window();
        let summary = json!({
            "family": m.config.family(),
            "config": m.config,
            "window": w,
            "gamma_plus": m.bounds.gamma_plus,
            "dgamma_plus": m.bounds.dgamma_plus,
            "d2gamma_plus": m.bounds.d2gamma_plus,
            "injectivity_halfwidth": m.injectivity,
            "straight": m.bounds.is_straight(),
        });
        let mut csv = String::from("s,x,y,gamma,dgamma,d2gamma\n");
        for i in 0..self.samples {
            let s = -w + 2.0 * w * i as f64 / (self.samples - 1) as f64;
            let p = m.curve.point(s)?;
            let g = m.profile.eval(s);
            writeln!(csv, "{},{},{},{},{},{}", num(s), num(p[0]), num(p[1]), num(g.value), num(g.d1), num(g.d2)).unwrap();
        }
        let text = json(&summary);
        Ok(Report {
            files: vec![(primary.to_string(), text.clone()), (sibling(primary, ".csv"), csv)],
            stdout: text,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TransverseArgs {
    /// Strip half-width.
    #[arg(long)]
    pub a: f64,
    /// Coupling length.
    #[arg(long)]
    pub beta: f64,
    /// Robin coefficient of the lower operator.
    #[arg(long, default_value_t = 0.0)]
    pub gamma_plus: f64,
    /// Curvature at the point of interest (does not enter the reduced equations).
    #[arg(long, default_value_t = 0.0)]
    pub gamma_s: f64,
    /// Cells per half-interval of the coarsest oracle mesh; 0 skips the oracle.
    #[arg(long, default_value_t = 1024)]
    pub oracle_cells: usize,
    /// Solve outside the transverse regime.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Serialize)]
struct TransverseSide {
    transcendental: TransverseEigenvalue,
    /// Richardson value over `n, 2n, 4n` oracle meshes.
    oracle: Option<f64>,
    oracle_error: Option<f64>,
    oracle_order: Option<f64>,
    inside_envelope: Option<bool>,
}

impl TransverseArgs {
    fn side(&self, p: TransverseProblem, env: Option<(f64, f64)>) -> Result<TransverseSide, CliError> {
        let t = solve_transcendental(&p)?;
        let (mut oracle, mut oracle_error, mut oracle_order) = (None, None, None);
        if self.oracle_cells > 0 {
            let seq = (0..3)
                .map(|l| transverse_fd_oracle(&p, self.oracle_cells << l).map(|e| e.t))
                .collect::<Result<Vec<_>, _>>()?;
            let ex = extrapolate_even(&seq);
            oracle = Some(ex.value);
            oracle_error = Some(ex.error);
            oracle_order = Some(ex.observed_order);
        }
        Ok(TransverseSide {
            transcendental: t,
            oracle,
            oracle_error,
            oracle_order,
            inside_envelope: env.map(|(lo, hi)| lo <= t.t && t.t <= hi),
        })
    }
}

impl Experiment for TransverseArgs {
    const NAME: &'static str = "transverse";
    const DEFAULT_OUT: &'static str = "transverse.json";

    fn curve_path(&self) -> Option<&Path> {
        None
    }
    fn out(&self) -> Option<&str> {
        self.out.as_deref()
    }
    fn out_mut(&mut self) -> &mut Option<String> {
        &mut self.out
    }

    fn run(&self, _: Option<&CurveModel>, primary: &str) -> Result<Report, CliError> {
        let mut d = TransverseProblem::dirichlet(self.a, self.beta).with_gamma_s(self.gamma_s);
        let mut r = TransverseProblem::robin(self.a, self.beta, self.gamma_plus).with_gamma_s(self.gamma_s);
        if self.force {
            d = d.allow_outside_regime();
            r = r.allow_outside_regime();
        }
        let env = lemma_trans_envelope(self.a, self.beta).ok();
        let out = json!({
            "a": self.a,
            "beta": self.beta,
            "gamma_plus": self.gamma_plus,
            "in_regime": d.in_lemma_regime() && r.in_lemma_regime(),
            "threshold": -4.0 / (self.beta * self.beta),
            "envelope": env.map(|(lo, hi)| json!({"lower": lo, "upper": hi})),
            "dirichlet": self.side(d, env)?,
            "robin": self.side(r, env)?,
        });
        let text = json(&out);
        Ok(Report {
            files: vec![(primary.to_string(), text.clone())],
            stdout: text,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator1D {
    /// `S = -d²/ds² - γ²/4`.
    Comparison,
    /// Upper bracket operator `U⁺`.
    Plus,
    /// Lower bracket operator `U⁻`.
    Minus,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Spectrum1dArgs {
    #[arg(long)]
    #[serde(skip)]
    pub curve: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Operator1D::Comparison)]
    pub operator: Operator1D,
    /// Strip half-width for the bracket operators.
    #[arg(long)]
    pub a: Option<f64>,
    /// Box half-length `L`.
    #[arg(long = "L", default_value_t = 20.0)]
    pub half_length: f64,
    /// Coarsest mesh across `(-L, L)`.
    #[arg(long, default_value_t = 800)]
    pub cells: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Grow `L` until the eigenvalues settle.
    #[arg(long)]
    pub adaptive: bool,
    /// Report eigenvalues above zero too.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub out: Option<String>,
}

impl Experiment for Spectrum1dArgs {
    const NAME: &'static str = "spectrum1d";
    const DEFAULT_OUT: &'static str = "spectrum1d.csv";

    fn curve_path(&self) -> Option<&Path> {
        self.curve.as_deref()
    }
    fn out(&self) -> Option<&str> {
        self.out.as_deref()
    }
    fn out_mut(&mut self) -> &mut Option<String> {
        &mut self.out
    }

    fn run(&self, curve: Option<&CurveModel>, primary: &str) -> Result<Report, CliError> {
        let m = need_curve(curve)?;
        let mut spec = match self.operator {
            Operator1D::Comparison => build_comparison_operator(&m.profile, self.half_length, self.cells),
            op => {
                let a = self
                    .a
                    .ok_or_else(|| CliError::Usage("--a is required for the bracket operators".into()))?;
                let sign = if op == Operator1D::Plus { BracketSign::Plus } else { BracketSign::Minus };
                build_bracket_operator(sign, &m.profile, &m.bounds, a, self.half_length, self.cells)?
            }
        };
        if self.adaptive {
            spec = spec.with_truncation(Truncation::adaptive());
        }
        if self.all {
            spec = spec.all_eigenvalues();
        }
        let sp = lowest_eigenvalues_1d(&spec, self.k)?;
        let mut csv = String::from("j,mu,err_disc,err_trunc,order,half_length\n");
        for j in 0..sp.values.len() {
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                j + 1,
                num(sp.values[j]),
                num(sp.err_disc[j]),
                num(sp.err_trunc[j]),
                num(sp.orders[j]),
                num(sp.half_length)
            )
            .unwrap();
        }
        let stdout = format!(
            "{} of {} requested eigenvalues{}\n{csv}",
            sp.values.len(),
            sp.requested,
            if sp.complete { "" } else { " (fewer available)" }
        );
        Ok(Report {
            files: vec![(primary.to_string(), csv)],
            stdout,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    Plus,
    Minus,
}

impl From<Which> for BracketSign {
    fn from(w: Which) -> Self {
        match w {
            Which::Plus => BracketSign::Plus,
            Which::Minus => BracketSign::Minus,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Solve2dArgs {
    #[arg(long)]
    #[serde(skip)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub beta: f64,
    /// Strip half-width [default: the schedule a(β)].
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long = "L", default_value_t = 20.0)]
    pub half_length: f64,
    /// Cells across `(-L, L)` on the coarsest level.
    #[arg(long, default_value_t = 64)]
    pub ns: usize,
    /// Cells across `(-a, a)` on the coarsest level (even).
    #[arg(long, default_value_t = 16)]
    pub nu: usize,
    #[arg(long, value_enum, default_value_t = Which::Plus)]
    pub which: Which,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Refinement levels; 1 skips extrapolation.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    /// Writes the finest stiffness matrix in coordinate format to this file name.
    #[arg(long)]
    pub dump: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

impl Experiment for Solve2dArgs {
    const NAME: &'static str = "solve2d";
    const DEFAULT_OUT: &'static str = "solve2d.csv";

    fn curve_path(&self) -> Option<&Path> {
        self.curve.as_deref()
    }
    fn out(&self) -> Option<&str> {
        self.out.as_deref()
    }
    fn out_mut(&mut self) -> &mut Option<String> {
        &mut self.out
    }

    fn run(&self, curve: Option<&CurveModel>, primary: &str) -> Result<Report, CliError> {
        let m = need_curve(curve)?;
        let a = match self.a {
            Some(a) => a,
            None => halfwidth_schedule(self.beta)?.halfwidth,
        };
        let p = StripProblem::new(m, a, self.beta, self.half_length)?;
        let which: BracketSign = self.which.into();
        let mut csv = String::from("j,lambda,residual,order_estimate,error_estimate,certified\n");
        let (finest_ns, finest_nu) = if self.levels <= 1 {
            let g = StripGrid::new(self.half_length, a, self.ns, self.nu, which)?;
            let e = lowest_eigenvalues_2d(&assemble_form(&p, &g)?, self.k, self.rtol)?;
            for j in 0..e.values.len() {
                writeln!(
                    csv,
                    "{},{},{},,{},{}",
                    j + 1,
                    num(e.values[j]),
                    num(e.residuals[j]),
                    num(e.error_bounds[j]),
                    e.certified
                )
                .unwrap();
            }
            (self.ns, self.nu)
        } else {
            let st = convergence_study(&p, which, self.ns, self.nu, self.levels, self.k, self.rtol)?;
            let last = st.levels.last().expect("at least three levels");
            let certified = st.levels.iter().all(|l| l.certified);
            for (j, ex) in st.extrapolated.iter().enumerate() {
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    j + 1,
                    num(ex.value),
                    num(last.residuals[j]),
                    num(ex.observed_order),
                    num(ex.error),
                    certified
                )
                .unwrap();
            }
            (last.n_s, last.n_u)
        };
        let mut files = vec![(primary.to_string(), csv.clone())];
        if let Some(name) = &self.dump {
            let g = StripGrid::new(self.half_length, a, finest_ns, finest_nu, which)?;
            let op = assemble_form(&p, &g)?;
            let mut buf = Vec::new();
            write_coo(&op, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
            files.push((name.clone(), String::from_utf8(buf).expect("coo dump is ASCII")));
        }
        Ok(Report { files, stdout: csv })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AsymptoticsArgs {
    #[arg(long)]
    #[serde(skip)]
    pub curve: Option<PathBuf>,
    /// Comma-separated coupling grid.
    #[arg(long, default_value = "0.06,0.04,0.02")]
    pub betas: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Also solve both strip forms at every grid point.
    #[arg(long)]
    pub direct: bool,
    #[arg(long, default_value_t = 375)]
    pub ns: usize,
    #[arg(long, default_value_t = 40)]
    pub nu: usize,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long = "L", default_value_t = 20.0)]
    pub half_length: f64,
    #[arg(long, default_value_t = 800)]
    pub cells: usize,
    /// Run grid points outside the transverse regime.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<String>,
}

impl Experiment for AsymptoticsArgs {
    const NAME: &'static str = "asymptotics";
    const DEFAULT_OUT: &'static str = "asymptotics.csv";

    fn curve_path(&self) -> Option<&Path> {
        self.curve.as_deref()
    }
    fn out(&self) -> Option<&str> {
        self.out.as_deref()
    }
    fn out_mut(&mut self) -> &mut Option<String> {
        &mut self.out
    }

    fn run(&self, curve: Option<&CurveModel>, primary: &str) -> Result<Report, CliError> {
        let m = need_curve(curve)?;
        let betas = parse_beta_list(&self.betas)?;
        let opts = StudyOptions {
            bracket: BracketOptions {
                half_length: self.half_length,
                cells: self.cells,
                allow_outside_regime: self.force,
                halfwidth: None,
            },
            direct: self.direct.then_some(DirectOptions {
                n_s: self.ns,
                n_u: self.nu,
                levels: self.levels,
                ..Default::default()
            }),
        };
        let st = asymptotics_study(m, &betas, self.k, &opts)?;
        let csv = st.to_csv();
        let summary = json!({
            "fitted_constant": st.fitted,
            "spread": st.spread,
            "max_log_deviation": st.max_log_deviation,
            "bounded": st.bounded,
            "in_regime": st.spectra.iter().map(|s| s.in_regime).collect::<Vec<_>>(),
            "ordered": st.spectra.iter().all(|s| s.ordered()),
            "sandwich": st.spectra.iter().all(|s| s.sandwich_holds()),
        });
        let text = json(&summary);
        Ok(Report {
            files: vec![(primary.to_string(), csv.clone()), (sibling(primary, ".summary.json"), text.clone())],
            stdout: format!("{csv}{text}"),
        })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    #[serde(skip)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub beta: f64,
    /// Strip half-width [default: the schedule a(β)].
    #[arg(long)]
    pub a: Option<f64>,
    /// Single `τ` instead of the grid `1, 2, ..., 64`.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub out: Option<String>,
}

impl Experiment for ThresholdArgs {
    const NAME: &'static str = "threshold";
    const DEFAULT_OUT: &'static str = "threshold.json";

    fn curve_path(&self) -> Option<&Path> {
        self.curve.as_deref()
    }
    fn out(&self) -> Option<&str> {
        self.out.as_deref()
    }
    fn out_mut(&mut self) -> &mut Option<String> {
        &mut self.out
    }

    fn run(&self, curve: Option<&CurveModel>, primary: &str) -> Result<Report, CliError> {
        let m = need_curve(curve)?;
        let a = match self.a {
            Some(a) => a,
            None => halfwidth_schedule(self.beta)?.halfwidth,
        };
        let scale = -4.0 / (self.beta * self.beta);
        let out = match self.tau {
            Some(tau) => {
                let b = ess_threshold_bound(m, self.beta, tau, a)?;
                json!({ "best": b, "grid": [b], "ratio_to_transverse": b.value / scale })
            }
            None => {
                let c = certified_threshold(m, self.beta, a)?;
                json!({ "best": c.best, "grid": c.grid, "ratio_to_transverse": c.best.value / scale })
            }
        };
        let text = json(&out);
        Ok(Report {
            files: vec![(primary.to_string(), text.clone())],
            stdout: text,
        })
    }
}
