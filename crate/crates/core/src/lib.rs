//! Lag-order determination for vector autoregressions.
//!
//! The crate fits VAR(k) models by least squares on a fixed effective sample
//! and determines the lag order with sequential likelihood-ratio tests,
//! penalised-likelihood information criteria, or residual autocorrelation
//! tests. None of these procedures depend on where the characteristic roots
//! lie: stationary, unit and explosive roots are all handled by the same code.
//!
//! Numerical routines are generic over [`Scalar`] (`f64` and `f32`); the
//! aliases at the crate root name the common `f64` instantiations.

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deterministics;
pub mod error;
pub mod numerics;
pub mod scalar;
pub mod selection;
pub mod simulation;
pub mod tolerances;
pub mod var_model;

pub use deterministics::{
    DeterministicChoice, DeterministicKind, DeterministicPanel, DeterministicSpec,
};
pub use error::{ErrorClass, VarError};
pub use numerics::{Matrix, RegressionResult};
pub use residual_tests::{AuxRegressionConfig, LmTestResult, LmVariant, SampleRule};
pub use scalar::Scalar;
pub use selection::{OrderReport, Penalty, SelectionMethod};
pub use simulation::{DgpSpec, Innovation, McConfig, McSummary};
pub use tolerances::Tolerances;
pub use var_model::{RootReport, TimeSeriesData, VarFit};

pub type Result<T> = std::result::Result<T, VarError>;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type TimeSeries64 = TimeSeriesData<f64>;
pub type TimeSeries32 = TimeSeriesData<f32>;
pub type VarFit64 = VarFit<f64>;
pub type VarFit32 = VarFit<f32>;
pub type DeterministicSpec64 = DeterministicSpec<f64>;
pub type DeterministicPanel64 = DeterministicPanel<f64>;
