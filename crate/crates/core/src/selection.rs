//! Lag-order selection: likelihood-ratio tests of redundant lags and
//! information criteria `Φ_j = ln det Ω̂_j + j·f(T)/T`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deterministics::DeterministicPanel;
use crate::error::VarError;
use crate::numerics::chi2_sf;
use crate::scalar::Scalar;
use crate::tolerances::Tolerances;
use crate::var_model::{fit_with, TimeSeriesData, VarFit};
use crate::Result;

pub type PenaltyFn = Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>;

/// Penalty function `f(T)` of an information criterion, for dimension `p`.
#[derive(Clone)]
pub enum Penalty {
    /// `2p²`
    Akaike,
    /// `p² ln T`
    Schwarz,
    /// `2p² ln ln T`
    HannanQuinn,
    /// User-supplied `f(T, p)`, required to be positive for `T ≥ 3`.
    Custom { name: String, f: PenaltyFn },
}

impl Penalty {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Akaike => "aic",
            Self::Schwarz => "bic",
            Self::HannanQuinn => "hq",
            Self::Custom { name, .. } => name,
        }
    }

    pub fn f_of_t(&self, t: f64, p: usize) -> Result<f64> {
        let p2 = (p * p) as f64;
        let v = match self {
            Self::Akaike => 2.0 * p2,
            Self::Schwarz => p2 * t.ln(),
            Self::HannanQuinn => 2.0 * p2 * t.ln().ln(),
            Self::Custom { name, f } => {
                let v = f(t, p);
                if t >= 3.0 && !(v > 0.0) {
                    return Err(VarError::InvalidArgument(format!(
                        "penalty `{name}` must be positive for T ≥ 3, got f({t}) = {v}"
                    )));
                }
                v
            }
        };
        if !v.is_finite() {
            return Err(VarError::InvalidArgument(format!(
                "penalty `{}` is not finite at T = {t}",
                self.name()
            )));
        }
        Ok(v)
    }
}

impl fmt::Debug for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Penalty({})", self.name())
    }
}

impl FromStr for Penalty {
    type Err = VarError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aic" | "akaike" => Ok(Self::Akaike),
            "bic" | "sc" | "schwarz" => Ok(Self::Schwarz),
            "hq" | "hqic" | "hannan_quinn" | "hannan-quinn" => Ok(Self::HannanQuinn),
            other => Err(VarError::InvalidArgument(format!(
                "unknown information criterion `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SelectionMethod {
    InformationCriterion(Penalty),
    /// General-to-specific testing at level `alpha`.
    SequentialLr {
        alpha: f64,
    },
}

impl SelectionMethod {
    pub fn key(&self) -> String {
        match self {
            Self::InformationCriterion(p) => p.name().to_string(),
            Self::SequentialLr { alpha } => format!("lr({alpha})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrStatistic {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn check_nested<T: Scalar>(restricted: &VarFit<T>, full: &VarFit<T>, m: usize) -> Result<()> {
    if m == 0 {
        return Err(VarError::InvalidArgument(
            "number of tested lags must be at least 1".into(),
        ));
    }
    if restricted.t_eff != full.t_eff
        || restricted.dim() != full.dim()
        || restricted.det_dim() != full.det_dim()
        || restricted.det_label != full.det_label
    {
        return Err(VarError::MismatchedFits(format!(
            "sample {}/{}, dimension {}/{}, deterministics {}/{}",
            restricted.t_eff,
            full.t_eff,
            restricted.dim(),
            full.dim(),
            restricted.det_label,
            full.det_label
        )));
    }
    if full.k != restricted.k + m {
        return Err(VarError::MismatchedFits(format!(
            "expected {} lags in the full model, got {}",
            restricted.k + m,
            full.k
        )));
    }
    Ok(())
}

/// `LR = T ln det Ω̂_restricted − T ln det Ω̂_full`, `χ²(p²)` under the null.
pub fn lr_stat<T: Scalar>(restricted: &VarFit<T>, full: &VarFit<T>) -> Result<LrStatistic> {
    lr_stat_multi(restricted, full, 1)
}

/// Joint test that the `m` lags `k, …, k+m−1` are zero; `χ²(p²m)` under the null.
pub fn lr_stat_multi<T: Scalar>(
    restricted: &VarFit<T>,
    full: &VarFit<T>,
    m: usize,
) -> Result<LrStatistic> {
    lr_stat_multi_with(restricted, full, m, &Tolerances::default())
}

pub fn lr_stat_multi_with<T: Scalar>(
    restricted: &VarFit<T>,
    full: &VarFit<T>,
    m: usize,
    tol: &Tolerances,
) -> Result<LrStatistic> {
    check_nested(restricted, full, m)?;
    let ld_r = restricted.log_det()?.as_f64();
    let ld_f = full.log_det()?.as_f64();
    let t = full.t_eff as f64;
    let mut statistic = t * (ld_r - ld_f);
    if statistic < 0.0 {
        let noise = tol.lr_noise_rel * t * ld_r.abs().max(ld_f.abs()).max(1.0);
        if -statistic > noise {
            return Err(VarError::MismatchedFits(format!(
                "restricted variance below the unrestricted one (LR = {statistic})"
            )));
        }
        statistic = 0.0;
    }
    let df = full.dim() * full.dim() * m;
    Ok(LrStatistic {
        statistic,
        df,
        p_value: chi2_sf(statistic, df)?,
    })
}

/// `Φ_j = ln det Ω̂_j + j·f(T)/T` with `j` the lag count of the fit.
pub fn criterion_value<T: Scalar>(fit: &VarFit<T>, penalty: &Penalty) -> Result<f64> {
    let t = fit.t_eff as f64;
    Ok(fit.log_det()?.as_f64() + fit.k as f64 * penalty.f_of_t(t, fit.dim())? / t)
}

/// Index of the smallest value; ties go to the smallest index.
pub fn argmin_parsimonious(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, &v) in values.iter().enumerate() {
        match best {
            Some(b) if !(v < values[b]) => {}
            _ => best = Some(j),
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagRow {
    pub lag: usize,
    pub log_det_omega: f64,
    /// `Φ_j` per penalty name.
    pub criteria: BTreeMap<String, f64>,
    /// Test of lag `j` against `j − 1`; absent for `j = 0`.
    pub lr: Option<f64>,
    pub df: Option<usize>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyInfo {
    pub name: String,
    pub f_of_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub lr_alpha: Option<f64>,
    pub penalties: Vec<PenaltyInfo>,
    pub test_direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub k_max: usize,
    pub t_eff: usize,
    pub p: usize,
    pub deterministics: String,
    pub per_lag: Vec<LagRow>,
    /// Selected order per method key (`aic`, `bic`, `hq`, `lr(alpha)`, …).
    pub k_hat: BTreeMap<String, usize>,
    pub method_config: MethodConfig,
}

impl OrderReport {
    pub fn to_text(&self) -> String {
        let names: Vec<&String> = self
            .method_config
            .penalties
            .iter()
            .map(|p| &p.name)
            .collect();
        let mut out = format!(
            "VAR lag order selection: p = {}, T = {}, K_max = {}, deterministics = {}\n",
            self.p, self.t_eff, self.k_max, self.deterministics
        );
        out.push_str(&format!("{:>4} {:>12}", "lag", "log_det"));
        for n in &names {
            out.push_str(&format!(" {:>12}", n));
        }
        out.push_str(&format!(" {:>12} {:>4} {:>10}\n", "LR", "df", "p_value"));
        for row in &self.per_lag {
            out.push_str(&format!("{:>4} {:>12.4}", row.lag, row.log_det_omega));
            for n in &names {
                out.push_str(&format!(" {:>12.4}", row.criteria[*n]));
            }
            match (row.lr, row.df, row.p_value) {
                (Some(lr), Some(df), Some(pv)) => {
                    out.push_str(&format!(" {lr:>12.4} {df:>4} {pv:>10.4}\n"))
                }
                _ => out.push_str(&format!(" {:>12} {:>4} {:>10}\n", "-", "-", "-")),
            }
        }
        for (method, k) in &self.k_hat {
            out.push_str(&format!("k_hat[{method}] = {k}\n"));
        }
        out
    }
}

/// Fits every lag `0..=k_max` on the common effective sample and applies
/// each selection method.
pub fn select_order<T: Scalar>(
    data: &TimeSeriesData<T>,
    det: &DeterministicPanel<T>,
    k_max: usize,
    methods: &[SelectionMethod],
) -> Result<OrderReport> {
    select_order_with(data, det, k_max, methods, &Tolerances::default())
}

pub fn select_order_with<T: Scalar>(
    data: &TimeSeriesData<T>,
    det: &DeterministicPanel<T>,
    k_max: usize,
    methods: &[SelectionMethod],
    tol: &Tolerances,
) -> Result<OrderReport> {
    if k_max > data.k_max() {
        return Err(VarError::InvalidArgument(format!(
            "K_max = {k_max} exceeds the {} reserved initial values",
            data.k_max()
        )));
    }
    for m in methods {
        if let SelectionMethod::SequentialLr { alpha } = m {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(VarError::InvalidArgument(format!(
                    "significance level {alpha} must lie in (0, 1)"
                )));
            }
        }
    }
    let fits: Vec<VarFit<T>> = (0..=k_max)
        .into_par_iter()
        .map(|j| fit_with(data, j, det, tol))
        .collect::<Result<_>>()?;
    if let Some(bad) = fits.iter().find(|f| f.singular) {
        return Err(VarError::SingularVariance { lag: bad.k });
    }

    let p = data.dim();
    let t = data.effective_len() as f64;
    let penalties: Vec<&Penalty> = methods
        .iter()
        .filter_map(|m| match m {
            SelectionMethod::InformationCriterion(p) => Some(p),
            SelectionMethod::SequentialLr { .. } => None,
        })
        .collect();

    let mut per_lag = Vec::with_capacity(k_max + 1);
    for (j, f) in fits.iter().enumerate() {
        let mut criteria = BTreeMap::new();
        for pen in &penalties {
            criteria.insert(pen.name().to_string(), criterion_value(f, pen)?);
        }
        let lr = if j > 0 {
            Some(lr_stat_multi_with(&fits[j - 1], f, 1, tol)?)
        } else {
            None
        };
        per_lag.push(LagRow {
            lag: j,
            log_det_omega: f.log_det_omega.as_f64(),
            criteria,
            lr: lr.map(|s| s.statistic),
            df: lr.map(|s| s.df),
            p_value: lr.map(|s| s.p_value),
        });
    }

    let mut k_hat = BTreeMap::new();
    let mut lr_alpha = None;
    for m in methods {
        let k = match m {
            SelectionMethod::InformationCriterion(pen) => {
                let values: Vec<f64> = per_lag.iter().map(|r| r.criteria[pen.name()]).collect();
                argmin_parsimonious(&values).expect("at least lag 0")
            }
            SelectionMethod::SequentialLr { alpha } => {
                lr_alpha = Some(*alpha);
                sequential_lr_choice(&per_lag, *alpha)
            }
        };
        k_hat.insert(m.key(), k);
    }

    Ok(OrderReport {
        k_max,
        t_eff: data.effective_len(),
        p,
        deterministics: det.spec().label().to_string(),
        per_lag,
        k_hat,
        method_config: MethodConfig {
            lr_alpha,
            penalties: penalties
                .iter()
                .map(|pen| {
                    Ok(PenaltyInfo {
                        name: pen.name().to_string(),
                        f_of_t: pen.f_of_t(t, p)?,
                    })
                })
                .collect::<Result<_>>()?,
            test_direction: "general_to_specific".into(),
        },
    })
}

/// Tests `A_K = 0`, then `A_{K−1} = 0`, … and returns the first rejected lag.
fn sequential_lr_choice(rows: &[LagRow], alpha: f64) -> usize {
    rows.iter()
        .rev()
        .find(|r| r.p_value.is_some_and(|pv| pv < alpha))
        .map_or(0, |r| r.lag)
}
