//! VAR path simulation and Monte Carlo experiments.
//!
//! Replication `r` draws from the ChaCha stream `r` of the experiment seed,
//! so results do not depend on scheduling and parallel runs reproduce the
//! sequential ones bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deterministics::DeterministicSpec;
use crate::error::VarError;
use crate::numerics::{chi2_quantile_tol, symmetric_sqrt, Matrix};
use crate::residual_tests::{lm_test_with, AuxRegressionConfig};
use crate::selection::{lr_stat_multi_with, select_order_with, SelectionMethod};
use crate::tolerances::Tolerances;
use crate::var_model::{classify_roots, companion_from, fit_with, TimeSeriesData};
use crate::Result;

pub type InnovationFn = Arc<dyn Fn(&mut ChaCha8Rng) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Innovation {
    /// `N(0, Ω)`; a zero `Ω` gives the noiseless recursion.
    Gaussian { omega: Matrix<f64> },
    /// Multivariate t with `df > 2` degrees of freedom, rescaled to covariance `scale`.
    StudentT { df: f64, scale: Matrix<f64> },
    /// Any i.i.d. draw of length `p`.
    Custom(InnovationFn),
}

impl fmt::Debug for Innovation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { omega } => f.debug_struct("Gaussian").field("omega", omega).finish(),
            Self::StudentT { df, scale } => f
                .debug_struct("StudentT")
                .field("df", df)
                .field("scale", scale)
                .finish(),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Innovation {
    pub fn label(&self) -> String {
        match self {
            Self::Gaussian { .. } => "gaussian".into(),
            Self::StudentT { df, .. } => format!("student_t({df})"),
            Self::Custom(_) => "custom".into(),
        }
    }
}

/// Data-generating process `X_t = Σ A_l X_{t−l} + μ D_t + ε_t`.
#[derive(Debug, Clone)]
pub struct DgpSpec {
    pub a: Vec<Matrix<f64>>,
    /// `p × d` loadings on the deterministic terms.
    pub mu: Matrix<f64>,
    pub det: DeterministicSpec<f64>,
    pub innovation: Innovation,
    /// `k0 × p`, oldest first; zeros when absent.
    pub initial_values: Option<Matrix<f64>>,
    pub burn_in: usize,
}

impl DgpSpec {
    /// A VAR without deterministic terms and Gaussian innovations.
    pub fn gaussian(a: Vec<Matrix<f64>>, omega: Matrix<f64>) -> Self {
        let p = omega.rows();
        Self {
            a,
            mu: Matrix::zeros(p, 0),
            det: DeterministicSpec::none(),
            innovation: Innovation::Gaussian { omega },
            initial_values: None,
            burn_in: 0,
        }
    }

    pub fn with_deterministics(mut self, det: DeterministicSpec<f64>, mu: Matrix<f64>) -> Self {
        self.det = det;
        self.mu = mu;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_initial_values(mut self, x0: Matrix<f64>) -> Self {
        self.initial_values = Some(x0);
        self
    }

    pub fn with_innovation(mut self, innovation: Innovation) -> Self {
        self.innovation = innovation;
        self
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.mu.rows()
    }
}

enum Draw {
    Gaussian(Matrix<f64>),
    StudentT(Matrix<f64>, ChiSquared<f64>, f64),
    Custom(InnovationFn),
}

/// A validated specification with its covariance square root computed once.
struct Prepared<'a> {
    spec: &'a DgpSpec,
    draw: Draw,
    initial: Matrix<f64>,
}

impl<'a> Prepared<'a> {
    fn new(spec: &'a DgpSpec, tol: &Tolerances) -> Result<Self> {
        let p = spec.dim();
        if p == 0 {
            return Err(VarError::Configuration(
                "process dimension must be at least 1".into(),
            ));
        }
        for (l, a) in spec.a.iter().enumerate() {
            if a.shape() != (p, p) {
                return Err(VarError::Configuration(format!(
                    "A_{} is not {p} × {p}",
                    l + 1
                )));
            }
            a.ensure_finite("autoregressive coefficients")?;
        }
        if let Some(last) = spec.a.last() {
            if last.max_abs() == 0.0 {
                return Err(VarError::Configuration(
                    "the last coefficient matrix must be nonzero".into(),
                ));
            }
        }
        if spec.mu.cols() != spec.det.dim() {
            return Err(VarError::Configuration(format!(
                "μ has {} columns for {} deterministic terms",
                spec.mu.cols(),
                spec.det.dim()
            )));
        }
        let k0 = spec.order();
        let initial = match &spec.initial_values {
            Some(x0) if x0.shape() != (k0, p) => {
                return Err(VarError::Configuration(format!(
                    "initial values must be {k0} × {p}"
                )));
            }
            Some(x0) => x0.clone(),
            None => Matrix::zeros(k0, p),
        };
        if spec.burn_in > 0 && k0 > 0 {
            let roots = classify_roots(&companion_from(&spec.a)?, tol.root_class)?;
            if roots.n_unit + roots.n_explosive > 0 {
                return Err(VarError::Configuration(
                    "burn-in requires all companion roots inside the unit circle".into(),
                ));
            }
        }
        let root_of = |m: &Matrix<f64>| -> Result<Matrix<f64>> {
            if m.shape() != (p, p) || !m.is_symmetric(tol.symmetry_rel) {
                return Err(VarError::Configuration(format!(
                    "innovation covariance must be symmetric {p} × {p}"
                )));
            }
            symmetric_sqrt(m, tol.symmetry_rel).map_err(|_| {
                VarError::Configuration(
                    "innovation covariance is not positive semi-definite".into(),
                )
            })
        };
        let draw = match &spec.innovation {
            Innovation::Gaussian { omega } => Draw::Gaussian(root_of(omega)?),
            Innovation::StudentT { df, scale } => {
                if !(*df > 2.0) {
                    return Err(VarError::Configuration(format!(
                        "student t needs df > 2 for a finite variance, got {df}"
                    )));
                }
                let chi =
                    ChiSquared::new(*df).map_err(|e| VarError::Configuration(e.to_string()))?;
                Draw::StudentT(root_of(scale)?, chi, *df)
            }
            Innovation::Custom(f) => Draw::Custom(f.clone()),
        };
        Ok(Self {
            spec,
            draw,
            initial,
        })
    }

    fn innovation(&self, rng: &mut ChaCha8Rng, p: usize) -> Result<Vec<f64>> {
        let correlate = |s: &Matrix<f64>, z: &[f64], c: f64| -> Vec<f64> {
            (0..p)
                .map(|i| c * s.row(i).iter().zip(z).map(|(a, b)| a * b).sum::<f64>())
                .collect()
        };
        match &self.draw {
            Draw::Gaussian(s) => {
                let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
                Ok(correlate(s, &z, 1.0))
            }
            Draw::StudentT(s, chi, df) => {
                let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
                let w: f64 = rng.sample(chi);
                Ok(correlate(s, &z, ((df - 2.0) / w).sqrt()))
            }
            Draw::Custom(f) => {
                let e = f(rng);
                if e.len() != p {
                    return Err(VarError::Configuration(format!(
                        "custom innovation has length {}, expected {p}",
                        e.len()
                    )));
                }
                Ok(e)
            }
        }
    }

    fn path(&self, reserve: usize, t: usize, rng: &mut ChaCha8Rng) -> Result<TimeSeriesData<f64>> {
        let spec = self.spec;
        let (p, k0) = (spec.dim(), spec.order());
        let first = 1 - (reserve + spec.burn_in) as i64;
        let det = spec.det.generate(first, t as i64)?;
        let n = reserve + spec.burn_in + t;
        let mut x = Matrix::zeros(k0 + n, p);
        for r in 0..k0 {
            x.row_mut(r).copy_from_slice(self.initial.row(r));
        }
        for i in 0..n {
            let s = first + i as i64;
            let mut row = self.innovation(rng, p)?;
            let d = det.at(s);
            for (eq, v) in row.iter_mut().enumerate() {
                *v += spec
                    .mu
                    .row(eq)
                    .iter()
                    .zip(d)
                    .map(|(m, dv)| m * dv)
                    .sum::<f64>();
                for (l, a) in spec.a.iter().enumerate() {
                    let lagged = x.row(k0 + i - l - 1);
                    *v += a
                        .row(eq)
                        .iter()
                        .zip(lagged)
                        .map(|(c, xv)| c * xv)
                        .sum::<f64>();
                }
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(VarError::Overflow { t: s });
            }
            x.row_mut(k0 + i).copy_from_slice(&row);
        }
        let keep = x.rows_range(k0 + spec.burn_in..k0 + n);
        TimeSeriesData::new(keep, reserve, vec![])
    }
}

/// The generator for replication `rep` of an experiment seeded with `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Simulates `T` observations after `reserve` initial values.
pub fn simulate(
    spec: &DgpSpec,
    reserve: usize,
    t: usize,
    seed: u64,
) -> Result<TimeSeriesData<f64>> {
    simulate_with_rng(
        spec,
        reserve,
        t,
        &mut replication_rng(seed, 0),
        &Tolerances::default(),
    )
}

pub fn simulate_with_rng(
    spec: &DgpSpec,
    reserve: usize,
    t: usize,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<TimeSeriesData<f64>> {
    if t == 0 {
        return Err(VarError::InvalidArgument(
            "sample length must be at least 1".into(),
        ));
    }
    Prepared::new(spec, tol)?.path(reserve, t, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Effective sample length.
    pub t: usize,
    /// Initial values reserved before the effective sample.
    pub k_max: usize,
    pub n_reps: usize,
    pub seed: u64,
    pub parallel: bool,
}

/// Runs `f` once per replication on its own random stream, in order.
pub fn run_replications<R, F>(cfg: &McConfig, f: F) -> Result<Vec<Result<R>>>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<R> + Sync,
{
    if cfg.n_reps == 0 {
        return Err(VarError::InvalidArgument(
            "at least one replication is required".into(),
        ));
    }
    let one = |r: usize| f(&mut replication_rng(cfg.seed, r as u64));
    Ok(if cfg.parallel {
        (0..cfg.n_reps).into_par_iter().map(one).collect()
    } else {
        (0..cfg.n_reps).map(one).collect()
    })
}

/// Statistic computed in each replication of a size experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeTest {
    /// LR test of lags `restricted + 1 ..= restricted + m`.
    Lr { restricted: usize, m: usize },
    /// LM test on the model with `lags` lags.
    Lm {
        lags: usize,
        cfg: AuxRegressionConfig,
    },
}

impl SizeTest {
    fn label(&self) -> String {
        match self {
            Self::Lr { restricted, m } => format!("lr(k={} vs k={})", restricted, restricted + m),
            Self::Lm { lags, cfg } => format!(
                "lm({}, {}, m={}, k={})",
                cfg.variant, cfg.sample_rule, cfg.m, lags
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub experiment: String,
    pub rng_seed: u64,
    pub t: usize,
    pub n_reps: usize,
    pub failed: usize,
    /// Failed replications by error kind.
    pub failures: BTreeMap<String, usize>,
    pub df: Option<usize>,
    /// Per-replication statistics of successful replications, in replication order.
    pub statistics: Vec<f64>,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    /// Share of successful replications rejecting at each nominal level.
    pub rejection_freq: BTreeMap<String, f64>,
    pub true_order: Option<usize>,
    /// Share selecting each lag `0..=K_max`, per method.
    pub selection_freq: BTreeMap<String, Vec<f64>>,
    pub under_freq: BTreeMap<String, f64>,
    pub over_freq: BTreeMap<String, f64>,
}

impl McSummary {
    fn empty(experiment: String, cfg: &McConfig) -> Self {
        Self {
            experiment,
            rng_seed: cfg.seed,
            t: cfg.t,
            n_reps: cfg.n_reps,
            failed: 0,
            failures: BTreeMap::new(),
            df: None,
            statistics: Vec::new(),
            mean: None,
            variance: None,
            rejection_freq: BTreeMap::new(),
            true_order: None,
            selection_freq: BTreeMap::new(),
            under_freq: BTreeMap::new(),
            over_freq: BTreeMap::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: T = {}, replications = {}, failed = {}, seed = {}\n",
            self.experiment, self.t, self.n_reps, self.failed, self.rng_seed
        );
        for (kind, n) in &self.failures {
            out.push_str(&format!("  failures[{kind}] = {n}\n"));
        }
        if let Some(df) = self.df {
            out.push_str(&format!("df = {df}\n"));
        }
        if let Some(m) = self.mean {
            out.push_str(&format!("mean = {m:.4}\n"));
        }
        if let Some(v) = self.variance {
            out.push_str(&format!("variance = {v:.4}\n"));
        }
        for (level, f) in &self.rejection_freq {
            out.push_str(&format!("rejection[{level}] = {f:.4}\n"));
        }
        if !self.selection_freq.is_empty() {
            let width = self
                .selection_freq
                .values()
                .map(Vec::len)
                .max()
                .unwrap_or(0);
            out.push_str(&format!("{:>10}", "method"));
            for j in 0..width {
                out.push_str(&format!(" {:>7}", format!("k={j}")));
            }
            out.push_str(&format!(" {:>7} {:>7}\n", "under", "over"));
            for (method, freq) in &self.selection_freq {
                out.push_str(&format!("{method:>10}"));
                for f in freq {
                    out.push_str(&format!(" {f:>7.4}"));
                }
                out.push_str(&format!(
                    " {:>7.4} {:>7.4}\n",
                    self.under_freq[method], self.over_freq[method]
                ));
            }
        }
        out
    }
}

/// Splits replication outcomes, failing when too many replications failed.
fn partition<R>(
    outcomes: Vec<Result<R>>,
    summary: &mut McSummary,
    tol: &Tolerances,
) -> Result<Vec<R>> {
    let mut ok = Vec::with_capacity(outcomes.len());
    let mut first = None;
    for o in outcomes {
        match o {
            Ok(v) => ok.push(v),
            Err(e) => {
                *summary.failures.entry(e.kind().to_string()).or_default() += 1;
                first.get_or_insert(e);
            }
        }
    }
    summary.failed = summary.n_reps - ok.len();
    let n_reps = summary.n_reps;
    if summary.failed as f64 > tol.max_failure_rate * n_reps as f64 || ok.is_empty() {
        let first = first.map_or_else(String::new, |e| e.to_string());
        return Err(VarError::ExcessiveFailures {
            failed: summary.failed,
            n_reps,
            first,
        });
    }
    Ok(ok)
}

fn check_levels(levels: &[f64]) -> Result<()> {
    match levels.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        Some(a) => Err(VarError::InvalidArgument(format!(
            "nominal level {a} must lie in (0, 1)"
        ))),
        None => Ok(()),
    }
}

/// Distribution of a test statistic under the null that the tested lags
/// are zero. `est_det` is the deterministic specification used when fitting.
pub fn run_size_experiment(
    dgp: &DgpSpec,
    est_det: &DeterministicSpec<f64>,
    test: SizeTest,
    levels: &[f64],
    cfg: &McConfig,
    tol: &Tolerances,
) -> Result<McSummary> {
    check_levels(levels)?;
    let p = dgp.dim();
    let (needed, df, held) = match test {
        SizeTest::Lr { restricted, m } => {
            if m == 0 {
                return Err(VarError::InvalidArgument(
                    "number of tested lags must be at least 1".into(),
                ));
            }
            (restricted + m, p * p * m, restricted)
        }
        SizeTest::Lm { lags, cfg: aux } => {
            let q = match aux.variant {
                crate::LmVariant::Joint => p,
                crate::LmVariant::Marginal(q) | crate::LmVariant::Conditional(q) => q,
            };
            (lags + aux.m, q * q * aux.m, lags)
        }
    };
    if held < dgp.order() {
        return Err(VarError::InvalidArgument(format!(
            "the null model has {held} lags but the process has order {}",
            dgp.order()
        )));
    }
    if needed > cfg.k_max {
        return Err(VarError::InvalidArgument(format!(
            "test needs {needed} lags but K_max = {}",
            cfg.k_max
        )));
    }
    let prepared = Prepared::new(dgp, tol)?;
    let outcomes = run_replications(cfg, |rng| {
        let data = prepared.path(cfg.k_max, cfg.t, rng)?;
        let det = data.deterministic_panel(est_det)?;
        match test {
            SizeTest::Lr { restricted, m } => {
                let r = fit_with(&data, restricted, &det, tol)?;
                let f = fit_with(&data, restricted + m, &det, tol)?;
                Ok(lr_stat_multi_with(&r, &f, m, tol)?.statistic)
            }
            SizeTest::Lm { lags, cfg: aux } => {
                Ok(lm_test_with(&data, &det, lags, &aux, tol)?.statistic)
            }
        }
    })?;

    let mut summary = McSummary::empty(format!("size {}", test.label()), cfg);
    let stats = partition(outcomes, &mut summary, tol)?;
    let n = stats.len() as f64;
    let mean = stats.iter().sum::<f64>() / n;
    summary.mean = Some(mean);
    summary.variance = (stats.len() >= 2)
        .then(|| stats.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0));
    for &alpha in levels {
        let crit = chi2_quantile_tol(1.0 - alpha, df, tol.quantile_abs)?;
        let rejected = stats.iter().filter(|&&s| s > crit).count();
        summary
            .rejection_freq
            .insert(format!("{alpha}"), rejected as f64 / n);
    }
    summary.df = Some(df);
    summary.statistics = stats;
    Ok(summary)
}

/// Frequencies with which each method selects each lag `0..=K_max`.
pub fn run_selection_experiment(
    dgp: &DgpSpec,
    est_det: &DeterministicSpec<f64>,
    methods: &[SelectionMethod],
    cfg: &McConfig,
    tol: &Tolerances,
) -> Result<McSummary> {
    let k0 = dgp.order();
    if cfg.k_max < k0 {
        return Err(VarError::InvalidArgument(format!(
            "K_max = {} is below the true order {k0}",
            cfg.k_max
        )));
    }
    if methods.is_empty() {
        return Err(VarError::InvalidArgument(
            "no selection method given".into(),
        ));
    }
    let prepared = Prepared::new(dgp, tol)?;
    let outcomes = run_replications(cfg, |rng| {
        let data = prepared.path(cfg.k_max, cfg.t, rng)?;
        let det = data.deterministic_panel(est_det)?;
        Ok(select_order_with(&data, &det, cfg.k_max, methods, tol)?.k_hat)
    })?;

    let mut summary = McSummary::empty(format!("selection K_max={}", cfg.k_max), cfg);
    let picks = partition(outcomes, &mut summary, tol)?;
    let n = picks.len() as f64;
    for m in methods {
        let key = m.key();
        let mut counts = vec![0usize; cfg.k_max + 1];
        for pick in &picks {
            counts[pick[&key]] += 1;
        }
        let under = counts[..k0].iter().sum::<usize>() as f64 / n;
        let over = counts[k0 + 1..].iter().sum::<usize>() as f64 / n;
        summary
            .selection_freq
            .insert(key.clone(), counts.iter().map(|&c| c as f64 / n).collect());
        summary.under_freq.insert(key.clone(), under);
        summary.over_freq.insert(key, over);
    }
    summary.true_order = Some(k0);
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deterministics::DeterministicKind;
    use crate::selection::Penalty;

    fn ar1(phi: f64) -> DgpSpec {
        DgpSpec::gaussian(
            vec![Matrix::from_rows(&[[phi]]).unwrap()],
            Matrix::identity(1),
        )
    }

    fn constant() -> DeterministicSpec<f64> {
        DeterministicSpec::new(DeterministicKind::Constant).unwrap()
    }

    #[test]
    fn stationary_mean_matches_formula() {
        let spec = ar1(0.5)
            .with_deterministics(constant(), Matrix::from_rows(&[[1.0]]).unwrap())
            .with_burn_in(200);
        let n = 100_000;
        let data = simulate(&spec, 0, n, 42).unwrap();
        let mean = data.observations().as_slice().iter().sum::<f64>() / n as f64;
        // Long-run variance of the mean: σ²/(1 − φ)² / n.
        let se = (1.0 / 0.25 / n as f64).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn zero_noise_follows_recursion() {
        let spec = DgpSpec::gaussian(
            vec![Matrix::from_rows(&[[0.5]]).unwrap()],
            Matrix::zeros(1, 1),
        )
        .with_deterministics(constant(), Matrix::from_rows(&[[1.0]]).unwrap())
        .with_initial_values(Matrix::from_rows(&[[4.0]]).unwrap());
        let data = simulate(&spec, 1, 5, 0).unwrap();
        let mut x = 4.0;
        for &v in data.observations().as_slice() {
            x = 0.5 * x + 1.0;
            assert_eq!(v, x);
        }
    }

    #[test]
    fn same_seed_same_path() {
        let spec = ar1(1.0);
        let a = simulate(&spec, 2, 50, 9).unwrap();
        let b = simulate(&spec, 2, 50, 9).unwrap();
        assert_eq!(a.observations(), b.observations());
        let c = simulate(&spec, 2, 50, 10).unwrap();
        assert_ne!(a.observations(), c.observations());
    }

    #[test]
    fn burn_in_requires_stability() {
        assert!(matches!(
            simulate(&ar1(1.0).with_burn_in(10), 1, 20, 1),
            Err(VarError::Configuration(_))
        ));
        assert!(simulate(&ar1(0.9).with_burn_in(10), 1, 20, 1).is_ok());
    }

    #[test]
    fn explosive_path_stays_finite() {
        let spec = ar1(1.05).with_initial_values(Matrix::from_rows(&[[1.0]]).unwrap());
        let data = simulate(&spec, 1, 200, 3).unwrap();
        assert!(data.observations().is_finite());
    }

    #[test]
    fn overflow_names_the_period() {
        let spec = ar1(1e200).with_initial_values(Matrix::from_rows(&[[1.0]]).unwrap());
        assert!(matches!(
            simulate(&spec, 0, 10, 3),
            Err(VarError::Overflow { t: 2 })
        ));
    }

    #[test]
    fn student_t_needs_finite_variance() {
        let spec = ar1(0.5).with_innovation(Innovation::StudentT {
            df: 2.0,
            scale: Matrix::identity(1),
        });
        assert!(simulate(&spec, 1, 10, 1).is_err());
    }

    fn cfg(n_reps: usize, parallel: bool) -> McConfig {
        McConfig {
            t: 60,
            k_max: 2,
            n_reps,
            seed: 17,
            parallel,
        }
    }

    #[test]
    fn zero_replications_rejected() {
        let test = SizeTest::Lr {
            restricted: 1,
            m: 1,
        };
        assert!(run_size_experiment(
            &ar1(0.5),
            &constant(),
            test,
            &[0.05],
            &cfg(0, false),
            &Tolerances::default()
        )
        .is_err());
    }

    #[test]
    fn single_replication_summary_is_the_statistic() {
        let test = SizeTest::Lr {
            restricted: 1,
            m: 1,
        };
        let tol = Tolerances::default();
        let s = run_size_experiment(&ar1(0.5), &constant(), test, &[0.05], &cfg(1, false), &tol)
            .unwrap();
        assert_eq!(s.statistics.len(), 1);
        assert_eq!(s.mean, Some(s.statistics[0]));
        assert_eq!(s.variance, None);
    }

    #[test]
    fn parallel_matches_sequential() {
        let test = SizeTest::Lr {
            restricted: 1,
            m: 1,
        };
        let tol = Tolerances::default();
        let a = run_size_experiment(&ar1(1.0), &constant(), test, &[0.05], &cfg(40, false), &tol)
            .unwrap();
        let b = run_size_experiment(&ar1(1.0), &constant(), test, &[0.05], &cfg(40, true), &tol)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn null_model_must_contain_true_order() {
        let test = SizeTest::Lr {
            restricted: 0,
            m: 1,
        };
        let r = run_size_experiment(
            &ar1(0.5),
            &constant(),
            test,
            &[0.05],
            &cfg(5, false),
            &Tolerances::default(),
        );
        assert!(matches!(r, Err(VarError::InvalidArgument(_))));
    }

    #[test]
    fn white_noise_with_no_lags_selects_zero() {
        let spec = DgpSpec::gaussian(vec![], Matrix::identity(1));
        let c = McConfig {
            k_max: 0,
            ..cfg(10, true)
        };
        let methods = [
            SelectionMethod::InformationCriterion(Penalty::Akaike),
            SelectionMethod::SequentialLr { alpha: 0.05 },
        ];
        let s = run_selection_experiment(&spec, &constant(), &methods, &c, &Tolerances::default())
            .unwrap();
        assert!(s.selection_freq.values().all(|f| f == &vec![1.0]));
    }

    #[test]
    fn noiseless_selection_fails_loudly() {
        let spec = DgpSpec::gaussian(
            vec![Matrix::from_rows(&[[0.5]]).unwrap()],
            Matrix::zeros(1, 1),
        )
        .with_initial_values(Matrix::from_rows(&[[1.0]]).unwrap());
        let methods = [SelectionMethod::InformationCriterion(Penalty::Schwarz)];
        let c = McConfig {
            k_max: 1,
            ..cfg(5, false)
        };
        let err = run_selection_experiment(
            &spec,
            &DeterministicSpec::none(),
            &methods,
            &c,
            &Tolerances::default(),
        )
        .unwrap_err();
        match err {
            VarError::ExcessiveFailures { failed, first, .. } => {
                assert_eq!(failed, 5);
                assert!(first.contains("singular"), "{first}");
            }
            other => panic!("{other:?}"),
        }
    }
}
