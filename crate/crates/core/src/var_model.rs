//! Least-squares VAR(k) fits on a fixed effective sample, and companion-root
//! classification.

use serde::{Deserialize, Serialize};

use crate::deterministics::{DeterministicPanel, DeterministicSpec};
use crate::error::VarError;
use crate::numerics::{eigenvalues, least_squares, log_det_spd_floor, Matrix};
use crate::scalar::Scalar;
use crate::tolerances::Tolerances;
use crate::Result;

/// A `(K_max + T) × p` panel. The first `K_max` rows are initial values; the
/// effective sample `X_1, …, X_T` is the same for every lag order `k ≤ K_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesData<T> {
    observations: Matrix<T>,
    k_max: usize,
    names: Vec<String>,
}

impl<T: Scalar> TimeSeriesData<T> {
    pub fn new(observations: Matrix<T>, k_max: usize, names: Vec<String>) -> Result<Self> {
        observations.ensure_finite("observations")?;
        let p = observations.cols();
        if p == 0 {
            return Err(VarError::InvalidArgument(
                "time series needs at least one variable".into(),
            ));
        }
        if observations.rows() <= k_max {
            return Err(VarError::InsufficientData {
                needed: k_max + 1,
                available: observations.rows(),
            });
        }
        let names = if names.is_empty() {
            (1..=p).map(|i| format!("x{i}")).collect()
        } else {
            names
        };
        if names.len() != p {
            return Err(VarError::DimensionMismatch(format!(
                "{} names for {p} variables",
                names.len()
            )));
        }
        Ok(Self {
            observations,
            k_max,
            names,
        })
    }

    pub fn observations(&self) -> &Matrix<T> {
        &self.observations
    }

    pub fn dim(&self) -> usize {
        self.observations.cols()
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Length `T` of the effective sample.
    pub fn effective_len(&self) -> usize {
        self.observations.rows() - self.k_max
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Earliest available time index, `1 − K_max`.
    pub fn first_index(&self) -> i64 {
        1 - self.k_max as i64
    }

    fn row_of(&self, s: i64) -> Result<usize> {
        let row = s + self.k_max as i64 - 1;
        if row < 0 || row >= self.observations.rows() as i64 {
            return Err(VarError::InsufficientData {
                needed: (self.k_max as i64 + 1 - s).max(0) as usize + self.effective_len(),
                available: self.observations.rows(),
            });
        }
        Ok(row as usize)
    }

    /// `X_s` for `1 − K_max ≤ s ≤ T`.
    pub fn at(&self, s: i64) -> Result<&[T]> {
        Ok(self.observations.row(self.row_of(s)?))
    }

    /// Columns `[X_{t−l} : l ∈ lags]` for `t = from, …, to`.
    pub fn lag_block(
        &self,
        lags: impl IntoIterator<Item = usize> + Clone,
        from: i64,
        to: i64,
    ) -> Result<Matrix<T>> {
        let lags: Vec<usize> = lags.into_iter().collect();
        let p = self.dim();
        let n = (to - from + 1).max(0) as usize;
        let mut out = Matrix::zeros(n, p * lags.len());
        for (i, t) in (from..=to).enumerate() {
            for (b, &l) in lags.iter().enumerate() {
                let src = self.at(t - l as i64)?;
                out.row_mut(i)[b * p..(b + 1) * p].copy_from_slice(src);
            }
        }
        Ok(out)
    }

    /// Deterministic terms over every available time index.
    pub fn deterministic_panel(
        &self,
        spec: &DeterministicSpec<T>,
    ) -> Result<DeterministicPanel<T>> {
        spec.generate(self.first_index(), self.effective_len() as i64)
    }

    /// The panel with every observation replaced by `P·X_t`.
    pub fn transform(&self, p: &Matrix<T>) -> Result<Self> {
        if p.shape() != (self.dim(), self.dim()) {
            return Err(VarError::DimensionMismatch(
                "transformation must be p × p".into(),
            ));
        }
        let obs = self.observations.matmul(&p.transpose())?;
        Self::new(obs, self.k_max, self.names.clone())
    }

    /// Scales every observation by `c`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.observations.scale(c), self.k_max, self.names.clone())
    }

    /// Reorders variables so that new variable `i` is old variable `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let names = order.iter().map(|&i| self.names[i].clone()).collect();
        Self::new(self.observations.select_cols(order), self.k_max, names)
    }

    /// Same observations with a smaller reserve: the earliest rows become
    /// part of the effective sample.
    pub fn with_reserve(&self, k_max: usize) -> Result<Self> {
        Self::new(self.observations.clone(), k_max, self.names.clone())
    }
}

/// Least-squares fit of `X_t = Σ A_l X_{t−l} + μ D_t + ε_t` over `t = 1..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarFit<T> {
    pub k: usize,
    /// `Â_1, …, Â_k`, each `p × p`.
    pub a_hat: Vec<Matrix<T>>,
    /// `p × d`.
    pub mu_hat: Matrix<T>,
    /// `T × p`.
    pub residuals: Matrix<T>,
    /// Maximum-likelihood variance `T⁻¹ Σ ε̂ ε̂'`.
    pub omega_hat: Matrix<T>,
    /// `ln det Ω̂`, or `−∞` when `singular` is set.
    pub log_det_omega: T,
    pub singular: bool,
    /// Regressors per equation, `p·k + d`.
    pub dof_used: usize,
    pub t_eff: usize,
    pub det_label: String,
}

impl<T: Scalar> VarFit<T> {
    pub fn dim(&self) -> usize {
        self.omega_hat.rows()
    }

    pub fn det_dim(&self) -> usize {
        self.mu_hat.cols()
    }

    /// `ln det Ω̂`, failing when the variance estimate is singular.
    pub fn log_det(&self) -> Result<T> {
        if self.singular {
            Err(VarError::SingularVariance { lag: self.k })
        } else {
            Ok(self.log_det_omega)
        }
    }
}

/// Fits a VAR with `k` lags using default tolerances.
pub fn fit<T: Scalar>(
    data: &TimeSeriesData<T>,
    k: usize,
    det: &DeterministicPanel<T>,
) -> Result<VarFit<T>> {
    fit_with(data, k, det, &Tolerances::default())
}

pub fn fit_with<T: Scalar>(
    data: &TimeSeriesData<T>,
    k: usize,
    det: &DeterministicPanel<T>,
    tol: &Tolerances,
) -> Result<VarFit<T>> {
    if k > data.k_max() {
        return Err(VarError::InvalidArgument(format!(
            "lag order {k} exceeds the {} reserved initial values",
            data.k_max()
        )));
    }
    let p = data.dim();
    let t_eff = data.effective_len();
    let d = det.dim();
    let dof_used = p * k + d;
    if t_eff <= dof_used {
        return Err(VarError::InsufficientData {
            needed: dof_used + 1,
            available: t_eff,
        });
    }
    let t_end = t_eff as i64;
    let y = data.lag_block([0], 1, t_end)?;
    let lags = data.lag_block(1..=k, 1, t_end)?;
    let dt = det.rows_between(1, t_end)?;
    let z = Matrix::hstack(&[&lags, &dt])?;

    let (coef, residuals) = if dof_used == 0 {
        (Matrix::zeros(p, 0), y.clone())
    } else {
        let reg = least_squares(&y, &z, tol)?;
        (reg.coefficients, reg.residuals)
    };
    let a_hat = (0..k)
        .map(|l| coef.cols_range(l * p..(l + 1) * p))
        .collect();
    let mu_hat = coef.cols_range(p * k..p * k + d);

    let inv_t = T::one() / T::from_usize_lossy(t_eff);
    let omega_hat = residuals.gram().scale(inv_t);
    let second_moment = y.gram().scale(inv_t);
    let scale = (0..p).fold(T::zero(), |m, i| m.max(second_moment[(i, i)]));
    let floor = T::c(tol.rank_rel) * scale;
    let (log_det_omega, singular) = match log_det_spd_floor(&omega_hat, floor, tol) {
        Ok(v) => (v, false),
        Err(VarError::NotPositiveDefinite { .. }) => (T::neg_infinity(), true),
        Err(e) => return Err(e),
    };
    Ok(VarFit {
        k,
        a_hat,
        mu_hat,
        residuals,
        omega_hat,
        log_det_omega,
        singular,
        dof_used,
        t_eff,
        det_label: det.spec().label().to_string(),
    })
}

/// Companion matrix with `(Â_1 … Â_k)` in the top block row and an identity
/// on the block subdiagonal.
pub fn companion<T: Scalar>(fit: &VarFit<T>) -> Result<Matrix<T>> {
    companion_from(&fit.a_hat)
}

pub fn companion_from<T: Scalar>(a: &[Matrix<T>]) -> Result<Matrix<T>> {
    let k = a.len();
    if k == 0 {
        return Err(VarError::InvalidArgument(
            "a VAR with no lags has no companion matrix".into(),
        ));
    }
    let p = a[0].rows();
    if a.iter().any(|m| m.shape() != (p, p)) {
        return Err(VarError::DimensionMismatch(
            "coefficient blocks must all be p × p".into(),
        ));
    }
    let n = p * k;
    let mut b = Matrix::zeros(n, n);
    for (l, al) in a.iter().enumerate() {
        for i in 0..p {
            for j in 0..p {
                b[(i, l * p + j)] = al[(i, j)];
            }
        }
    }
    for i in p..n {
        b[(i, i - p)] = T::one();
    }
    Ok(b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    /// Sorted by decreasing modulus.
    pub eigenvalues: Vec<Root>,
    pub n_stable: usize,
    pub n_unit: usize,
    pub n_explosive: usize,
    pub tolerance: f64,
}

impl RootReport {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "companion roots: {} stable, {} unit, {} explosive (tol {:e})\n",
            self.n_stable, self.n_unit, self.n_explosive, self.tolerance
        );
        out.push_str(&format!(
            "{:>10} {:>10} {:>10}  class\n",
            "re", "im", "modulus"
        ));
        for r in &self.eigenvalues {
            let class = classify(r.modulus, self.tolerance);
            out.push_str(&format!(
                "{:>10.4} {:>10.4} {:>10.4}  {class}\n",
                r.re, r.im, r.modulus
            ));
        }
        out
    }
}

fn classify(modulus: f64, tol: f64) -> &'static str {
    if modulus < 1.0 - tol {
        "stable"
    } else if modulus > 1.0 + tol {
        "explosive"
    } else {
        "unit"
    }
}

/// Splits the spectrum of `b` into stable, unit and explosive roots.
/// Diagnostic only: no statistic in this crate depends on it.
pub fn classify_roots<T: Scalar>(b: &Matrix<T>, tol: f64) -> Result<RootReport> {
    if !(tol > 0.0 && tol < 0.5) {
        return Err(VarError::InvalidArgument(format!(
            "root tolerance {tol} must lie in (0, 0.5)"
        )));
    }
    let mut roots: Vec<Root> = eigenvalues(b)?
        .into_iter()
        .map(|(re, im)| {
            let (re, im) = (re.as_f64(), im.as_f64());
            Root {
                re,
                im,
                modulus: re.hypot(im),
            }
        })
        .collect();
    roots.sort_by(|a, b| {
        b.modulus
            .partial_cmp(&a.modulus)
            .expect("finite")
            .then(b.re.partial_cmp(&a.re).expect("finite"))
            .then(b.im.partial_cmp(&a.im).expect("finite"))
    });
    let count = |c: &str| {
        roots
            .iter()
            .filter(|r| classify(r.modulus, tol) == c)
            .count()
    };
    Ok(RootReport {
        n_stable: count("stable"),
        n_unit: count("unit"),
        n_explosive: count("explosive"),
        eigenvalues: roots,
        tolerance: tol,
    })
}
