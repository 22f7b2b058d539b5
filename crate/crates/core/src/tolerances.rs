//! Numerical thresholds shared by every module.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative pivot cutoff for rank and conditioning decisions.
    pub rank_rel: f64,
    /// Symmetry check for matrices that must be symmetric.
    pub symmetry_rel: f64,
    /// Deterministic generators must have all eigenvalues within this of the unit circle.
    pub unit_circle: f64,
    /// Default band around modulus one when classifying companion roots.
    pub root_class: f64,
    /// Negative likelihood-ratio values smaller than this (relative) are treated as zero.
    pub lr_noise_rel: f64,
    /// Bracketing tolerance of the chi-square quantile.
    pub quantile_abs: f64,
    /// Maximum share of failed Monte Carlo replications.
    pub max_failure_rate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: 1e-12,
            symmetry_rel: 1e-10,
            unit_circle: 1e-8,
            root_class: 1e-6,
            lr_noise_rel: 1e-9,
            quantile_abs: 1e-12,
            max_failure_rate: 0.01,
        }
    }
}
