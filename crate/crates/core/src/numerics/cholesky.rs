use super::matrix::Matrix;
use crate::scalar::Scalar;

/// Lower Cholesky factor of a symmetric matrix.
///
/// `pivots[j]` is the Schur-complement diagonal before the square root, so the
/// determinant is the product of the pivots. Fails with the index of the first
/// pivot that is not strictly above `min_pivot`.
pub(crate) struct Cholesky<T> {
    pub(crate) lower: Matrix<T>,
    pub(crate) pivots: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub(crate) fn factor(a: &Matrix<T>, min_pivot: T) -> Result<Self, usize> {
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        let mut pivots = Vec::with_capacity(n);
        for j in 0..n {
            let s: T = (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum();
            let d = a[(j, j)] - s;
            if !(d > min_pivot) || !d.is_finite() {
                return Err(j);
            }
            pivots.push(d);
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let s: T = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
                l[(i, j)] = (a[(i, j)] - s) / ljj;
            }
        }
        Ok(Self { lower: l, pivots })
    }

    /// Solves `L·X = B` column by column.
    pub(crate) fn forward(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.lower.rows();
        let mut x = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let s: T = (0..i).map(|k| self.lower[(i, k)] * x[(k, c)]).sum();
                x[(i, c)] = (x[(i, c)] - s) / self.lower[(i, i)];
            }
        }
        x
    }

    /// Solves `A·X = B`.
    pub(crate) fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.lower.rows();
        let mut x = self.forward(b);
        for c in 0..b.cols() {
            for i in (0..n).rev() {
                let s: T = ((i + 1)..n).map(|k| self.lower[(k, i)] * x[(k, c)]).sum();
                x[(i, c)] = (x[(i, c)] - s) / self.lower[(i, i)];
            }
        }
        x
    }

    pub(crate) fn log_det(&self) -> T {
        self.pivots.iter().map(|p| p.ln()).sum()
    }
}
