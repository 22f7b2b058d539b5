//! Householder QR with column pivoting and the least-squares solves built on it.

use super::matrix::Matrix;
use crate::scalar::Scalar;

/// Compact Householder factorisation `Z·P = Q·R` of an `m × n` matrix.
///
/// Columns are scaled to unit Euclidean norm before factorising, so the rank
/// decision (relative to the largest diagonal entry of `R`) does not depend on
/// the units of the regressors.
pub(crate) struct PivotedQr<T> {
    /// Householder vectors on and below the diagonal, `R` strictly above it.
    packed: Matrix<T>,
    rdiag: Vec<T>,
    beta: Vec<T>,
    /// Factor column `j` is original column `perm[j]`.
    perm: Vec<usize>,
    col_scale: Vec<T>,
    rank: usize,
}

impl<T: Scalar> PivotedQr<T> {
    pub(crate) fn factor(z: &Matrix<T>, rank_rel: f64, equilibrate: bool) -> Self {
        let (m, n) = z.shape();
        let col_scale: Vec<T> = (0..n)
            .map(|j| {
                if !equilibrate {
                    return T::one();
                }
                let s = Matrix::column_vector(&z.column(j)).frobenius_norm();
                if s > T::zero() {
                    s
                } else {
                    T::one()
                }
            })
            .collect();
        let mut a = Matrix::from_fn(m, n, |i, j| z[(i, j)] / col_scale[j]);
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut rdiag = vec![T::zero(); steps];
        let mut beta = vec![T::zero(); steps];

        for j in 0..steps {
            // Pivot on the largest remaining column norm, recomputed exactly.
            let mut best = j;
            let mut best_norm = -T::one();
            for c in j..n {
                let s: T = (j..m).map(|i| a[(i, c)] * a[(i, c)]).sum();
                if s > best_norm {
                    best_norm = s;
                    best = c;
                }
            }
            if best != j {
                for i in 0..m {
                    let tmp = a[(i, j)];
                    a[(i, j)] = a[(i, best)];
                    a[(i, best)] = tmp;
                }
                perm.swap(j, best);
            }

            let norm = best_norm.max(T::zero()).sqrt();
            if norm == T::zero() {
                continue;
            }
            let x0 = a[(j, j)];
            let alpha = if x0 > T::zero() { -norm } else { norm };
            a[(j, j)] = x0 - alpha;
            let vtv = norm * (norm + x0.abs()) * T::c(2.0);
            let b = T::c(2.0) / vtv;
            rdiag[j] = alpha;
            beta[j] = b;
            for c in (j + 1)..n {
                let s: T = (j..m).map(|i| a[(i, j)] * a[(i, c)]).sum();
                let s = s * b;
                for i in j..m {
                    a[(i, c)] = a[(i, c)] - s * a[(i, j)];
                }
            }
        }

        let cutoff = T::c(rank_rel.max(10.0 * T::epsilon().as_f64()));
        let lead = rdiag.first().map_or(T::zero(), |r| r.abs());
        let rank = if lead == T::zero() {
            0
        } else {
            rdiag.iter().take_while(|r| r.abs() > cutoff * lead).count()
        };
        Self {
            packed: a,
            rdiag,
            beta,
            perm,
            col_scale,
            rank,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }

    pub(crate) fn cols(&self) -> usize {
        self.packed.cols()
    }

    fn reflect(&self, j: usize, y: &mut [T]) {
        let b = self.beta[j];
        if b == T::zero() {
            return;
        }
        let m = self.packed.rows();
        let s: T = (j..m).map(|i| self.packed[(i, j)] * y[i]).sum();
        let s = s * b;
        for (i, yi) in y.iter_mut().enumerate().take(m).skip(j) {
            *yi = *yi - s * self.packed[(i, j)];
        }
    }

    /// Applies `Qᵀ` restricted to the first `upto` reflectors.
    pub(crate) fn apply_qt(&self, y: &mut [T], upto: usize) {
        for j in 0..upto {
            self.reflect(j, y);
        }
    }

    pub(crate) fn apply_q(&self, y: &mut [T], upto: usize) {
        for j in (0..upto).rev() {
            self.reflect(j, y);
        }
    }

    /// Component of `y` orthogonal to the numerical column space.
    pub(crate) fn residual(&self, y: &[T]) -> Vec<T> {
        let mut w = y.to_vec();
        self.apply_qt(&mut w, self.rank);
        for v in w.iter_mut().take(self.rank) {
            *v = T::zero();
        }
        self.apply_q(&mut w, self.rank);
        w
    }

    fn r(&self, i: usize, j: usize) -> T {
        if i == j {
            self.rdiag[i]
        } else if j > i {
            self.packed[(i, j)]
        } else {
            T::zero()
        }
    }

    /// Coefficients of the full-rank least-squares problem in original column order.
    pub(crate) fn solve_full_rank(&self, y: &[T]) -> Vec<T> {
        let n = self.cols();
        debug_assert_eq!(self.rank, n);
        let mut c = y.to_vec();
        self.apply_qt(&mut c, n);
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let s: T = ((i + 1)..n).map(|j| self.r(i, j) * x[j]).sum();
            x[i] = (c[i] - s) / self.rdiag[i];
        }
        let mut out = vec![T::zero(); n];
        for (j, &xj) in x.iter().enumerate() {
            out[self.perm[j]] = xj / self.col_scale[self.perm[j]];
        }
        out
    }

    /// Minimum-norm coefficients using the leading `rank` pivots, via a
    /// complete orthogonal decomposition of the trapezoid `[R11 R12]`.
    ///
    /// Only meaningful on an unequilibrated factorisation, since column
    /// scaling changes which solution has minimal norm.
    pub(crate) fn solve_min_norm(&self, y: &[T], rank: usize) -> Vec<T> {
        let n = self.cols();
        if rank == 0 {
            return vec![T::zero(); n];
        }
        let mut c = y.to_vec();
        self.apply_qt(&mut c, rank);
        // R1ᵀ is n × rank; factor it as Q2·S.
        let r1t = Matrix::from_fn(n, rank, |i, j| self.r(j, i));
        let inner = PivotedQr::factor_unpivoted(&r1t);
        // Sᵀ w = c[..rank] by forward substitution.
        let mut w = vec![T::zero(); n];
        for i in 0..rank {
            let s: T = (0..i).map(|j| inner.r(j, i) * w[j]).sum();
            w[i] = (c[i] - s) / inner.rdiag[i];
        }
        inner.apply_q(&mut w, rank);
        let mut out = vec![T::zero(); n];
        for (j, &xj) in w.iter().enumerate() {
            out[self.perm[j]] = xj / self.col_scale[self.perm[j]];
        }
        out
    }

    fn factor_unpivoted(z: &Matrix<T>) -> Self {
        let (m, n) = z.shape();
        let mut a = z.clone();
        let steps = m.min(n);
        let mut rdiag = vec![T::zero(); steps];
        let mut beta = vec![T::zero(); steps];
        for j in 0..steps {
            let norm = (j..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<T>().sqrt();
            if norm == T::zero() {
                continue;
            }
            let x0 = a[(j, j)];
            let alpha = if x0 > T::zero() { -norm } else { norm };
            a[(j, j)] = x0 - alpha;
            let b = T::c(2.0) / (norm * (norm + x0.abs()) * T::c(2.0));
            rdiag[j] = alpha;
            beta[j] = b;
            for c in (j + 1)..n {
                let s = (j..m).map(|i| a[(i, j)] * a[(i, c)]).sum::<T>() * b;
                for i in j..m {
                    a[(i, c)] = a[(i, c)] - s * a[(i, j)];
                }
            }
        }
        Self {
            packed: a,
            rdiag,
            beta,
            perm: (0..n).collect(),
            col_scale: vec![T::one(); n],
            rank: steps,
        }
    }
}

/// Numerical rank of `z` under the relative pivot cutoff.
pub fn numerical_rank<T: Scalar>(z: &Matrix<T>, rank_rel: f64) -> usize {
    PivotedQr::factor(z, rank_rel, true).rank()
}
