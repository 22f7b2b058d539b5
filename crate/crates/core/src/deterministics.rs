//! Deterministic regressors generated by `D_t = G·D_{t−1}` where every
//! eigenvalue of the generator `G` lies on the unit circle.
//!
//! `D_0` is aligned with the last initial observation, so the effective
//! sample uses `D_1, …, D_T`.

use std::fmt;
use std::str::FromStr;

use crate::error::VarError;
use crate::numerics::{eigenvalues, inverse, numerical_rank, Matrix};
use crate::scalar::Scalar;
use crate::tolerances::Tolerances;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum DeterministicKind<T> {
    None,
    Constant,
    /// `D_t = (1, t)'`.
    ConstantTrend,
    /// Constant plus `period − 1` centred seasonal terms.
    ConstantSeasonal {
        period: usize,
    },
    Custom {
        generator: Matrix<T>,
        initial: Vec<T>,
    },
}

/// Named (non-custom) choices as accepted on the command line:
/// `none`, `const`, `trend`, `seasonal:<s>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeterministicChoice {
    None,
    Constant,
    ConstantTrend,
    ConstantSeasonal(usize),
}

impl FromStr for DeterministicChoice {
    type Err = VarError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Self::None),
            "const" | "constant" => Ok(Self::Constant),
            "trend" => Ok(Self::ConstantTrend),
            other => {
                let period = other.strip_prefix("seasonal:").ok_or_else(|| {
                    VarError::InvalidArgument(format!("unknown deterministic term `{other}`"))
                })?;
                let period: usize = period.parse().map_err(|_| {
                    VarError::InvalidArgument(format!("bad seasonal period `{period}`"))
                })?;
                if period < 2 {
                    return Err(VarError::InvalidArgument(format!(
                        "seasonal period must be at least 2, got {period}"
                    )));
                }
                Ok(Self::ConstantSeasonal(period))
            }
        }
    }
}

impl fmt::Display for DeterministicChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => write!(f, "none"),
            Self::Constant => write!(f, "const"),
            Self::ConstantTrend => write!(f, "trend"),
            Self::ConstantSeasonal(s) => write!(f, "seasonal:{s}"),
        }
    }
}

impl<T: Scalar> From<DeterministicChoice> for DeterministicKind<T> {
    fn from(c: DeterministicChoice) -> Self {
        match c {
            DeterministicChoice::None => Self::None,
            DeterministicChoice::Constant => Self::Constant,
            DeterministicChoice::ConstantTrend => Self::ConstantTrend,
            DeterministicChoice::ConstantSeasonal(period) => Self::ConstantSeasonal { period },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicSpec<T> {
    generator: Matrix<T>,
    initial: Vec<T>,
    label: String,
}

impl<T: Scalar> DeterministicSpec<T> {
    pub fn build(kind: DeterministicKind<T>, tol: &Tolerances) -> Result<Self> {
        let one = T::one();
        let zero = T::zero();
        let (generator, initial, label) = match kind {
            DeterministicKind::None => (Matrix::zeros(0, 0), Vec::new(), "none".to_string()),
            DeterministicKind::Constant => (Matrix::identity(1), vec![one], "constant".to_string()),
            DeterministicKind::ConstantTrend => (
                Matrix::from_rows(&[[one, zero], [one, one]])?,
                vec![one, zero],
                "constant+trend".to_string(),
            ),
            DeterministicKind::ConstantSeasonal { period } => {
                if period < 2 {
                    return Err(VarError::InvalidArgument(format!(
                        "seasonal period must be at least 2, got {period}"
                    )));
                }
                let (g, init) = seasonal_block(period);
                (g, init, format!("constant+seasonal({period})"))
            }
            DeterministicKind::Custom { generator, initial } => {
                if !generator.is_square() || generator.rows() != initial.len() {
                    return Err(VarError::DimensionMismatch(format!(
                        "custom generator {}x{} with initial vector of length {}",
                        generator.rows(),
                        generator.cols(),
                        initial.len()
                    )));
                }
                generator.ensure_finite("deterministic generator")?;
                (generator, initial, "custom".to_string())
            }
        };
        let spec = Self {
            generator,
            initial,
            label,
        };
        spec.validate(tol)?;
        Ok(spec)
    }

    /// Shorthand for [`DeterministicSpec::build`] with default tolerances.
    pub fn new(kind: DeterministicKind<T>) -> Result<Self> {
        Self::build(kind, &Tolerances::default())
    }

    pub fn none() -> Self {
        Self {
            generator: Matrix::zeros(0, 0),
            initial: Vec::new(),
            label: "none".into(),
        }
    }

    fn validate(&self, tol: &Tolerances) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Ok(());
        }
        for (re, im) in eigenvalues(&self.generator)? {
            let modulus = re.hypot(im).as_f64();
            if (modulus - 1.0).abs() > tol.unit_circle {
                return Err(VarError::OffUnitCircle { modulus });
            }
        }
        let first = self.forward_rows(1, d as i64);
        let rank = numerical_rank(&first, tol.rank_rel);
        if rank < d {
            return Err(VarError::RankCondition { rank, dim: d });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn generator(&self) -> &Matrix<T> {
        &self.generator
    }

    pub fn initial(&self) -> &[T] {
        &self.initial
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn step(g: &Matrix<T>, v: &[T]) -> Vec<T> {
        (0..g.rows())
            .map(|i| g.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Rows `D_from, …, D_to` for `1 ≤ from`.
    fn forward_rows(&self, from: i64, to: i64) -> Matrix<T> {
        let mut v = self.initial.clone();
        let mut rows = Vec::new();
        for t in 1..=to {
            v = Self::step(&self.generator, &v);
            if t >= from {
                rows.push(v.clone());
            }
        }
        let d = self.dim();
        Matrix::from_vec_unchecked(rows.len(), d, rows.concat())
    }

    /// Panel of `D_t` for `t = t_min, …, t_max`, stepping forward from `D_0`
    /// with the generator and backward with its inverse.
    pub fn generate(&self, t_min: i64, t_max: i64) -> Result<DeterministicPanel<T>> {
        if t_min > t_max {
            return Err(VarError::InvalidArgument(format!(
                "t_min {t_min} exceeds t_max {t_max}"
            )));
        }
        let d = self.dim();
        let n = (t_max - t_min + 1) as usize;
        let mut values = Matrix::zeros(n, d);
        if d > 0 {
            let idx = |t: i64| (t - t_min) as usize;
            let mut v = self.initial.clone();
            if (t_min..=t_max).contains(&0) {
                values.row_mut(idx(0)).copy_from_slice(&v);
            }
            for t in 1..=t_max {
                v = Self::step(&self.generator, &v);
                if t >= t_min {
                    values.row_mut(idx(t)).copy_from_slice(&v);
                }
            }
            if t_min < 0 {
                let inv = inverse(&self.generator, &Tolerances::default())?;
                let mut v = self.initial.clone();
                for t in (t_min..0).rev() {
                    v = Self::step(&inv, &v);
                    if t <= t_max {
                        values.row_mut(idx(t)).copy_from_slice(&v);
                    }
                }
            }
        }
        Ok(DeterministicPanel {
            values,
            t_min,
            spec: self.clone(),
        })
    }
}

/// Constant plus the companion matrix of `1 + x + … + x^{s−1}`, whose roots
/// are the non-unit `s`-th roots of unity. The seasonal state is
/// `(c_t, c_{t−1}, …, c_{t−s+2})` with `c_t = −(c_{t−1} + … + c_{t−s+1})`,
/// started from the centred dummy pattern `(s−1, −1, …, −1)`.
fn seasonal_block<T: Scalar>(s: usize) -> (Matrix<T>, Vec<T>) {
    let d = s; // 1 + (s − 1)
    let mut g = Matrix::zeros(d, d);
    g[(0, 0)] = T::one();
    for j in 1..d {
        g[(1, j)] = -T::one();
    }
    for i in 2..d {
        g[(i, i - 1)] = T::one();
    }
    let mut init = vec![-T::one(); d];
    init[0] = T::one();
    init[1] = T::from_usize_lossy(s - 1);
    (g, init)
}

/// `D_t` for a contiguous range of `t`; row `t − t_min` holds `D_t'`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicPanel<T> {
    values: Matrix<T>,
    t_min: i64,
    spec: DeterministicSpec<T>,
}

impl<T: Scalar> DeterministicPanel<T> {
    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn spec(&self) -> &DeterministicSpec<T> {
        &self.spec
    }

    pub fn t_min(&self) -> i64 {
        self.t_min
    }

    pub fn t_max(&self) -> i64 {
        self.t_min + self.values.rows() as i64 - 1
    }

    pub fn dim(&self) -> usize {
        self.values.cols()
    }

    pub fn at(&self, t: i64) -> &[T] {
        self.values.row((t - self.t_min) as usize)
    }

    /// Rows for `t = from, …, to` (inclusive).
    pub fn rows_between(&self, from: i64, to: i64) -> Result<Matrix<T>> {
        if from < self.t_min || to > self.t_max() || from > to + 1 {
            return Err(VarError::DimensionMismatch(format!(
                "deterministic panel covers t = {}..={}, requested {from}..={to}",
                self.t_min,
                self.t_max()
            )));
        }
        Ok(self
            .values
            .rows_range((from - self.t_min) as usize..(to - self.t_min + 1) as usize))
    }
}
