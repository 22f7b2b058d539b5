//! Monte Carlo experiment files.
//!
//! ```toml
//! experiment = "size"        # or "selection"
//! t = 200
//! k_max = 2
//! reps = 5000
//! estimation_det = "const"
//!
//! [dgp]
//! a = [[[0.5]]]              # list of p × p matrices, rows first
//! omega = [[1.0]]
//! innovation = "gaussian"    # or "student_t" with `df`
//!
//! [test]                     # size experiments
//! kind = "lr"                # or "lm" with `lags`, `variant`, `zero_pad`
//! restricted = 1
//! m = 1
//! levels = [0.01, 0.05, 0.1]
//!
//! [selection]                # selection experiments
//! ic = ["aic", "bic", "hq"]
//! lr_alpha = 0.05
//! ```

use std::path::Path;

use serde::Deserialize;

use varorder::numerics::Matrix;
use varorder::residual_tests::{AuxRegressionConfig, LmVariant, SampleRule};
use varorder::selection::{Penalty, SelectionMethod};
use varorder::simulation::{
    run_selection_experiment, run_size_experiment, DgpSpec, Innovation, McConfig, SizeTest,
};
use varorder::{DeterministicChoice, DeterministicSpec, McSummary, Tolerances};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Size,
    Selection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub experiment: ExperimentKind,
    pub t: usize,
    pub k_max: usize,
    pub reps: usize,
    #[serde(default = "default_true")]
    pub parallel: bool,
    #[serde(default = "default_det")]
    pub estimation_det: String,
    pub dgp: DgpConfig,
    pub test: Option<TestConfig>,
    pub selection: Option<SelectionConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpConfig {
    #[serde(default)]
    pub a: Vec<Vec<Vec<f64>>>,
    pub omega: Vec<Vec<f64>>,
    #[serde(default = "default_none")]
    pub det: String,
    /// `p × d`, one row per variable.
    #[serde(default)]
    pub mu: Vec<Vec<f64>>,
    #[serde(default = "default_innovation")]
    pub innovation: String,
    pub df: Option<f64>,
    pub initial: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub burn_in: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Lr,
    Lm,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestConfig {
    pub kind: TestKind,
    /// Lags under the null for `lr`.
    pub restricted: Option<usize>,
    /// Lags of the model under test for `lm`.
    pub lags: Option<usize>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_variant")]
    pub variant: String,
    #[serde(default)]
    pub zero_pad: bool,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    #[serde(default = "default_ics")]
    pub ic: Vec<String>,
    pub lr_alpha: Option<f64>,
}

fn default_true() -> bool {
    true
}
fn default_det() -> String {
    "const".into()
}
fn default_none() -> String {
    "none".into()
}
fn default_innovation() -> String {
    "gaussian".into()
}
fn default_m() -> usize {
    1
}
fn default_variant() -> String {
    "joint".into()
}
fn default_levels() -> Vec<f64> {
    vec![0.01, 0.05, 0.1]
}
fn default_ics() -> Vec<String> {
    vec!["aic".into(), "bic".into(), "hq".into()]
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Core(varorder::VarError::Configuration(msg.into()))
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<Matrix<f64>> {
    Matrix::from_rows(rows).map_err(|e| bad(format!("{what}: {e}")))
}

fn det_spec(s: &str, tol: &Tolerances) -> Result<DeterministicSpec<f64>> {
    let choice: DeterministicChoice = s.parse()?;
    Ok(DeterministicSpec::build(choice.into(), tol)?)
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| bad(e.message().to_string()))
    }

    pub fn dgp(&self, tol: &Tolerances) -> Result<DgpSpec> {
        let d = &self.dgp;
        let omega = matrix(&d.omega, "omega")?;
        let p = omega.rows();
        let a =
            d.a.iter()
                .map(|m| matrix(m, "a"))
                .collect::<Result<Vec<_>>>()?;
        let det = det_spec(&d.det, tol)?;
        let mu = if d.mu.is_empty() && det.dim() == 0 {
            Matrix::zeros(p, 0)
        } else {
            matrix(&d.mu, "mu")?
        };
        let innovation = match d.innovation.as_str() {
            "gaussian" => Innovation::Gaussian { omega },
            "student_t" => {
                let df = d.df.ok_or_else(|| bad("student_t innovations need `df`"))?;
                Innovation::StudentT { df, scale: omega }
            }
            other => return Err(bad(format!("unknown innovation `{other}`"))),
        };
        let mut spec = DgpSpec::gaussian(a, Matrix::identity(p))
            .with_deterministics(det, mu)
            .with_innovation(innovation)
            .with_burn_in(d.burn_in);
        if let Some(x0) = &d.initial {
            spec = spec.with_initial_values(matrix(x0, "initial")?);
        }
        Ok(spec)
    }

    pub fn run(&self, seed: u64, reps: Option<usize>, tol: &Tolerances) -> Result<McSummary> {
        let cfg = McConfig {
            t: self.t,
            k_max: self.k_max,
            n_reps: reps.unwrap_or(self.reps),
            seed,
            parallel: self.parallel,
        };
        let dgp = self.dgp(tol)?;
        let est = det_spec(&self.estimation_det, tol)?;
        match self.experiment {
            ExperimentKind::Size => {
                let t = self
                    .test
                    .as_ref()
                    .ok_or_else(|| bad("size experiments need a [test] table"))?;
                let test = match t.kind {
                    TestKind::Lr => SizeTest::Lr {
                        restricted: t
                            .restricted
                            .ok_or_else(|| bad("lr test needs `restricted`"))?,
                        m: t.m,
                    },
                    TestKind::Lm => {
                        let variant: LmVariant = t.variant.parse()?;
                        let sample_rule = if t.zero_pad {
                            SampleRule::ZeroPad
                        } else {
                            SampleRule::Truncate
                        };
                        SizeTest::Lm {
                            lags: t.lags.ok_or_else(|| bad("lm test needs `lags`"))?,
                            cfg: AuxRegressionConfig {
                                m: t.m,
                                variant,
                                sample_rule,
                            },
                        }
                    }
                };
                Ok(run_size_experiment(&dgp, &est, test, &t.levels, &cfg, tol)?)
            }
            ExperimentKind::Selection => {
                let s = self
                    .selection
                    .as_ref()
                    .ok_or_else(|| bad("selection experiments need a [selection] table"))?;
                let mut methods =
                    s.ic.iter()
                        .map(|n| Ok(SelectionMethod::InformationCriterion(n.parse::<Penalty>()?)))
                        .collect::<Result<Vec<_>>>()?;
                if let Some(alpha) = s.lr_alpha {
                    methods.push(SelectionMethod::SequentialLr { alpha });
                }
                Ok(run_selection_experiment(&dgp, &est, &methods, &cfg, tol)?)
            }
        }
    }
}
