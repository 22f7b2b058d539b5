//! Least squares, partial-regression residuals, log-determinants, the
//! chi-square distribution and the `Q` quadratic form.
//!
//! Everything here is a pure function of its inputs.

mod chi2;
mod cholesky;
mod eigen;
mod matrix;
mod qr;

pub use chi2::{chi2_cdf, chi2_quantile, chi2_quantile_tol, chi2_sf, ln_gamma};
pub use eigen::{eigenvalues, symmetric_eigen, symmetric_sqrt, Eigenvalue};
pub use matrix::Matrix;
pub use qr::numerical_rank;

pub(crate) use cholesky::Cholesky;
use qr::PivotedQr;

use crate::error::VarError;
use crate::scalar::Scalar;
use crate::tolerances::Tolerances;
use crate::Result;

/// Outcome of regressing a block of columns on another block.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult<T> {
    /// `a × b`: row `i` holds the coefficients of regressand column `i`.
    pub coefficients: Matrix<T>,
    /// `T × a` residuals, orthogonal to every regressor column.
    pub residuals: Matrix<T>,
    pub gram_rank: usize,
}

fn check_regression_inputs<T: Scalar>(y: &Matrix<T>, z: &Matrix<T>) -> Result<()> {
    if y.rows() != z.rows() {
        return Err(VarError::DimensionMismatch(format!(
            "regressand has {} rows, regressors {}",
            y.rows(),
            z.rows()
        )));
    }
    if y.rows() == 0 {
        return Err(VarError::InvalidArgument(
            "regression needs at least one row".into(),
        ));
    }
    y.ensure_finite("regressand")?;
    z.ensure_finite("regressors")
}

fn regress<T: Scalar>(
    y: &Matrix<T>,
    z: &Matrix<T>,
    tol: &Tolerances,
    strict: bool,
) -> Result<RegressionResult<T>> {
    check_regression_inputs(y, z)?;
    let (n, a) = y.shape();
    let b = z.cols();
    if b == 0 {
        return Ok(RegressionResult {
            coefficients: Matrix::zeros(a, 0),
            residuals: y.clone(),
            gram_rank: 0,
        });
    }
    let qr = PivotedQr::factor(z, tol.rank_rel, true);
    let rank = qr.rank();
    if strict && rank < b {
        return Err(VarError::DegenerateRegressors { rank, cols: b });
    }
    let min_norm = if rank < b {
        Some(PivotedQr::factor(z, tol.rank_rel, false))
    } else {
        None
    };

    let mut coefficients = Matrix::zeros(a, b);
    let mut residuals = Matrix::zeros(n, a);
    for c in 0..a {
        let col = y.column(c);
        let coef = match &min_norm {
            None => qr.solve_full_rank(&col),
            Some(plain) => plain.solve_min_norm(&col, rank),
        };
        for (j, v) in coef.into_iter().enumerate() {
            coefficients[(c, j)] = v;
        }
        residuals.set_column(c, &qr.residual(&col));
    }
    Ok(RegressionResult {
        coefficients,
        residuals,
        gram_rank: rank,
    })
}

/// Residuals of `y` after regression on `z`, by pivoted Householder QR.
///
/// Rank-deficient `z` yields the minimum-norm coefficients; `gram_rank`
/// reports the numerical rank. An empty `z` leaves `y` unchanged.
pub fn partial_out<T: Scalar>(
    y: &Matrix<T>,
    z: &Matrix<T>,
    tol: &Tolerances,
) -> Result<RegressionResult<T>> {
    regress(y, z, tol, false)
}

/// Like [`partial_out`] but fails with `DegenerateRegressors` when `z` does
/// not have full column rank.
pub fn least_squares<T: Scalar>(
    y: &Matrix<T>,
    z: &Matrix<T>,
    tol: &Tolerances,
) -> Result<RegressionResult<T>> {
    regress(y, z, tol, true)
}

/// `Q(Z) = Σ ε Z' (Σ Z Z')⁻¹ Σ Z ε'`.
///
/// With `Z = Q R` (pivoted, column-equilibrated) and `W` the leading `b` rows
/// of `Q'ε`, the result is `W'W`: symmetric and positive semi-definite by
/// construction, and never forms the Gram matrix of `Z`.
pub fn q_form<T: Scalar>(eps: &Matrix<T>, z: &Matrix<T>, tol: &Tolerances) -> Result<Matrix<T>> {
    check_regression_inputs(eps, z)?;
    let b = z.cols();
    if b == 0 {
        return Err(VarError::InvalidArgument(
            "q_form needs at least one regressor".into(),
        ));
    }
    if z.rows() < b {
        return Err(VarError::InsufficientData {
            needed: b,
            available: z.rows(),
        });
    }
    let qr = PivotedQr::factor(z, tol.rank_rel, true);
    if qr.rank() < b {
        return Err(VarError::DegenerateRegressors {
            rank: qr.rank(),
            cols: b,
        });
    }
    let mut w = Matrix::zeros(b, eps.cols());
    for c in 0..eps.cols() {
        let mut col = eps.column(c);
        qr.apply_qt(&mut col, b);
        for i in 0..b {
            w[(i, c)] = col[i];
        }
    }
    Ok(w.gram())
}

/// `ln det S` of a symmetric positive-definite matrix from its Cholesky pivots.
pub fn log_det_spd<T: Scalar>(s: &Matrix<T>, tol: &Tolerances) -> Result<T> {
    log_det_spd_floor(s, T::zero(), tol)
}

/// As [`log_det_spd`], treating pivots at or below `floor` as non-positive.
pub fn log_det_spd_floor<T: Scalar>(s: &Matrix<T>, floor: T, tol: &Tolerances) -> Result<T> {
    if !s.is_square() {
        return Err(VarError::DimensionMismatch(format!(
            "log-det of {}x{} matrix",
            s.rows(),
            s.cols()
        )));
    }
    s.ensure_finite("log-det input")?;
    if !s.is_symmetric(T::c(tol.symmetry_rel)) {
        return Err(VarError::InvalidArgument(
            "log-det input is not symmetric".into(),
        ));
    }
    let chol =
        Cholesky::factor(s, floor).map_err(|pivot| VarError::NotPositiveDefinite { pivot })?;
    Ok(chol.log_det())
}

/// Inverse by Gaussian elimination with partial pivoting.
pub fn inverse<T: Scalar>(a: &Matrix<T>, tol: &Tolerances) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(VarError::DimensionMismatch(
            "inverse of non-square matrix".into(),
        ));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    let scale = a.max_abs();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .abs()
                    .partial_cmp(&m[(j, col)].abs())
                    .expect("finite")
            })
            .expect("non-empty range");
        if m[(piv, col)].abs() <= T::c(tol.rank_rel) * scale {
            return Err(VarError::DegenerateRegressors { rank: col, cols: n });
        }
        if piv != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(piv, j)];
                inv[(piv, j)] = t;
            }
        }
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] = m[(col, j)] / d;
            inv[(col, j)] = inv[(col, j)] / d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[(i, col)];
            if f == T::zero() {
                continue;
            }
            for j in 0..n {
                m[(i, j)] = m[(i, j)] - f * m[(col, j)];
                inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}

/// `tr(A⁻¹ B)` for symmetric positive-definite `A`.
pub fn trace_solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, floor: T) -> Result<T> {
    let chol =
        Cholesky::factor(a, floor).map_err(|pivot| VarError::NotPositiveDefinite { pivot })?;
    Ok(chol.solve(b).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn rel_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
        let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1e-300);
        a.sub(b).unwrap().frobenius_norm() / scale
    }

    #[test]
    fn constant_regressor_demeans() {
        let y = Matrix::from_rows(&[[1.0, 10.0], [2.0, 20.0], [6.0, 0.0]]).unwrap();
        let z = Matrix::from_rows(&[[1.0], [1.0], [1.0]]).unwrap();
        let r = partial_out(&y, &z, &tol()).unwrap();
        let want = Matrix::from_rows(&[[-2.0, 0.0], [-1.0, 10.0], [3.0, -10.0]]).unwrap();
        assert!(r.residuals.sub(&want).unwrap().max_abs() < 1e-12);
        assert_eq!(r.gram_rank, 1);
    }

    #[test]
    fn self_regression_leaves_nothing() {
        let z = Matrix::from_rows(&[[1.0, 0.5], [2.0, -1.0], [0.3, 4.0], [1.0, 1.0]]).unwrap();
        let r = partial_out(&z, &z, &tol()).unwrap();
        assert!(r.residuals.max_abs() < 1e-12);
        assert_eq!(r.gram_rank, 2);
        assert!(r.coefficients.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn hand_solved_normal_equations() {
        // Z'Z = ((3,6),(6,14)), Z'y = (7,17) → β = (−2/3, 3/2).
        let y = Matrix::<f64>::column_vector(&[1.0, 2.0, 4.0]);
        let z = Matrix::from_rows(&[[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]).unwrap();
        let r = partial_out(&y, &z, &tol()).unwrap();
        assert!((r.coefficients[(0, 0)] + 2.0 / 3.0).abs() < 1e-12);
        assert!((r.coefficients[(0, 1)] - 1.5).abs() < 1e-12);
        for (got, want) in r
            .residuals
            .column(0)
            .iter()
            .zip([1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0])
        {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_regressor_block() {
        let y = Matrix::column_vector(&[1.0, 2.0]);
        let r = partial_out(&y, &Matrix::zeros(2, 0), &tol()).unwrap();
        assert_eq!(r.residuals, y);
        assert_eq!(r.gram_rank, 0);
        assert_eq!(r.coefficients.shape(), (1, 0));
    }

    #[test]
    fn regression_errors() {
        let y = Matrix::column_vector(&[1.0, 2.0]);
        let z = Matrix::column_vector(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            partial_out(&y, &z, &tol()),
            Err(VarError::DimensionMismatch(_))
        ));
        let nan = Matrix::from_vec_unchecked(2, 1, vec![1.0, f64::NAN]);
        assert!(matches!(
            partial_out(&nan, &nan, &tol()),
            Err(VarError::NonFinite(_))
        ));
        let dup = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        let yy = Matrix::<f64>::column_vector(&[1.0, 0.0, 1.0]);
        assert!(matches!(
            least_squares(&yy, &dup, &tol()),
            Err(VarError::DegenerateRegressors { rank: 1, cols: 2 })
        ));
        let r = partial_out(&yy, &dup, &tol()).unwrap();
        assert_eq!(r.gram_rank, 1);
        // Minimum-norm coefficients lie in the row space: β ∝ (1, 2).
        assert!((r.coefficients[(0, 1)] - 2.0 * r.coefficients[(0, 0)]).abs() < 1e-12);
    }

    #[test]
    fn q_form_examples() {
        let eps = Matrix::from_rows(&[[1.0, 0.2], [-1.0, 0.4], [0.5, -0.3], [2.0, 1.0]]).unwrap();
        let q = q_form(&eps, &eps, &tol()).unwrap();
        assert!(rel_diff(&q, &eps.gram()) < 1e-12);

        let z = Matrix::from_rows(&[[1.0], [2.0], [0.0], [-1.0]]).unwrap();
        let q1 = q_form(&eps, &z, &tol()).unwrap();
        let q2 = q_form(&eps, &z.scale(-37.5), &tol()).unwrap();
        assert!(rel_diff(&q1, &q2) < 1e-12);

        let e = Matrix::<f64>::column_vector(&[1.0, -1.0]);
        let zz = Matrix::column_vector(&[1.0, 2.0]);
        assert!((q_form(&e, &zz, &tol()).unwrap()[(0, 0)] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn q_form_rejects_collinear_regressors() {
        let eps = Matrix::column_vector(&[1.0, 2.0, 3.0]);
        let z = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        assert!(matches!(
            q_form(&eps, &z, &tol()),
            Err(VarError::DegenerateRegressors { .. })
        ));
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(
            log_det_spd(&Matrix::<f64>::identity(5), &tol()).unwrap(),
            0.0
        );
        let d = Matrix::diagonal(&[2.0, 8.0]);
        assert!((log_det_spd(&d, &tol()).unwrap() - 16f64.ln()).abs() < 1e-14);
        let s = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!((log_det_spd(&s, &tol()).unwrap() - 3f64.ln()).abs() < 1e-14);
        let indefinite = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            log_det_spd(&indefinite, &tol()),
            Err(VarError::NotPositiveDefinite { pivot: 1 })
        ));
    }

    #[test]
    fn inverse_round_trip() {
        let a = Matrix::from_rows(&[[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]]).unwrap();
        let inv = inverse(&a, &tol()).unwrap();
        assert!(
            a.matmul(&inv)
                .unwrap()
                .sub(&Matrix::identity(3))
                .unwrap()
                .max_abs()
                < 1e-14
        );
    }

    #[test]
    fn single_precision_instantiation() {
        let y = Matrix::<f32>::column_vector(&[1.0, 2.0, 4.0]);
        let z = Matrix::<f32>::from_rows(&[[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]).unwrap();
        let r = least_squares(&y, &z, &tol()).unwrap();
        assert!((r.coefficients[(0, 1)] - 1.5).abs() < 1e-5);
        let s = Matrix::<f32>::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!((log_det_spd(&s, &tol()).unwrap() - 3f32.ln()).abs() < 1e-6);
    }

    fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<f64>> {
        prop::collection::vec(-3.0f64..3.0, rows * cols)
            .prop_map(move |v| Matrix::new(rows, cols, v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn partial_out_is_idempotent(y in matrix_strategy(30, 2), z in matrix_strategy(30, 3)) {
            let once = partial_out(&y, &z, &tol()).unwrap().residuals;
            let twice = partial_out(&once, &z, &tol()).unwrap().residuals;
            prop_assert!(rel_diff(&once, &twice) < 1e-10);
            let orth = z.t_matmul(&once).unwrap();
            prop_assert!(orth.max_abs() < 1e-10 * y.frobenius_norm() * z.frobenius_norm());
        }

        #[test]
        fn q_form_trace_invariant_under_linear_maps(
            eps in matrix_strategy(25, 2),
            z in matrix_strategy(25, 3),
            a in matrix_strategy(3, 3),
        ) {
            let a = a.add(&Matrix::identity(3).scale(4.0)).unwrap();
            let q1 = q_form(&eps, &z, &tol()).unwrap();
            let q2 = q_form(&eps, &z.matmul(&a).unwrap(), &tol()).unwrap();
            prop_assert!((q1.trace() - q2.trace()).abs() <= 1e-10 * q1.trace().abs().max(1e-12));
        }

        #[test]
        fn partitioned_inversion(
            eps in matrix_strategy(40, 2),
            z1 in matrix_strategy(40, 2),
            z2 in matrix_strategy(40, 3),
        ) {
            let joint = q_form(&eps, &Matrix::hstack(&[&z1, &z2]).unwrap(), &tol()).unwrap();
            let z2_given_z1 = partial_out(&z2, &z1, &tol()).unwrap().residuals;
            let split = q_form(&eps, &z2_given_z1, &tol()).unwrap().add(&q_form(&eps, &z1, &tol()).unwrap()).unwrap();
            prop_assert!(rel_diff(&joint, &split) < 1e-8);
        }

        #[test]
        fn log_det_scales(m in matrix_strategy(6, 3), c in 0.01f64..100.0) {
            let s = m.gram().add(&Matrix::identity(3)).unwrap();
            let base = log_det_spd(&s, &tol()).unwrap();
            let scaled = log_det_spd(&s.scale(c), &tol()).unwrap();
            let want = base + 3.0 * c.ln();
            prop_assert!((scaled - want).abs() <= 1e-10 * want.abs().max(1.0));
        }

        #[test]
        fn chi2_round_trip(df in 1usize..=64, pi in 0usize..5) {
            let p = [0.01, 0.05, 0.5, 0.95, 0.99][pi];
            let x = chi2_quantile(p, df).unwrap();
            prop_assert!((chi2_cdf(x, df).unwrap() - p).abs() < 1e-9);
        }
    }
}
