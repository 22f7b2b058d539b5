//! Dense eigenvalue routines: Hessenberg reduction followed by Francis
//! double-shift QR for general matrices, cyclic Jacobi for symmetric ones.
//!
//! The unsymmetric path follows the EISPACK `orthes`/`hqr` procedures.

use super::matrix::Matrix;
use crate::error::VarError;
use crate::scalar::Scalar;
use crate::Result;

/// Complex eigenvalue as `(re, im)`.
pub type Eigenvalue<T> = (T, T);

const MAX_SWEEPS_PER_ROOT: usize = 60;

/// All eigenvalues of a real square matrix.
pub fn eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<Eigenvalue<T>>> {
    if !a.is_square() {
        return Err(VarError::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    a.ensure_finite("eigenvalue input")?;
    let n = a.rows();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![(a[(0, 0)], T::zero())]),
        _ => {}
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    hqr(&mut h)
}

fn hessenberg<T: Scalar>(h: &mut Matrix<T>) {
    let n = h.rows();
    let high = n - 1;
    let mut ort = vec![T::zero(); n];
    for m in 1..high {
        let scale: T = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == T::zero() {
            continue;
        }
        let mut hh = T::zero();
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh = hh + ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > T::zero() {
            g = -g;
        }
        hh = hh - ort[m] * g;
        ort[m] = ort[m] - g;

        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * h[(i, j)]).sum::<T>() / hh;
            for i in m..=high {
                h[(i, j)] = h[(i, j)] - f * ort[i];
            }
        }
        for i in 0..=high {
            let f = (m..=high).rev().map(|j| ort[j] * h[(i, j)]).sum::<T>() / hh;
            for j in m..=high {
                h[(i, j)] = h[(i, j)] - f * ort[j];
            }
        }
        h[(m, m - 1)] = scale * g;
    }
    for i in 2..n {
        for j in 0..(i - 1) {
            h[(i, j)] = T::zero();
        }
    }
}

fn hqr<T: Scalar>(h: &mut Matrix<T>) -> Result<Vec<Eigenvalue<T>>> {
    let nn = h.rows();
    let mut re = vec![T::zero(); nn];
    let mut im = vec![T::zero(); nn];
    let eps = T::epsilon();
    let two = T::c(2.0);
    let mut exshift = T::zero();
    let (mut p, mut q, mut r, mut s, mut z): (T, T, T, T, T);
    let (mut w, mut x, mut y);

    let mut norm = T::zero();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm = norm + h[(i, j)].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let budget = MAX_SWEEPS_PER_ROOT * nn.max(1);
    while n >= 0 {
        let nu = n as usize;
        // Look for a single small subdiagonal element.
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == T::zero() {
                s = norm;
            }
            if h[(l, l - 1)].abs() <= eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root.
            h[(nu, nu)] = h[(nu, nu)] + exshift;
            re[nu] = h[(nu, nu)];
            im[nu] = T::zero();
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            // Two roots.
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / two;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(nu, nu)] = h[(nu, nu)] + exshift;
            h[(nu - 1, nu - 1)] = h[(nu - 1, nu - 1)] + exshift;
            x = h[(nu, nu)];
            if q >= T::zero() {
                z = if p >= T::zero() { p + z } else { p - z };
                re[nu - 1] = x + z;
                re[nu] = re[nu - 1];
                if z != T::zero() {
                    re[nu] = x - w / z;
                }
                im[nu - 1] = T::zero();
                im[nu] = T::zero();
            } else {
                re[nu - 1] = x + p;
                re[nu] = x + p;
                im[nu - 1] = z;
                im[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            if total_iter >= budget {
                return Err(VarError::NonConvergence(format!(
                    "{} roots unresolved after {total_iter} QR sweeps",
                    nu + 1
                )));
            }
            // Form shift.
            x = h[(nu, nu)];
            y = h[(nu - 1, nu - 1)];
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];

            if iter == 10 {
                // Wilkinson's exceptional shift.
                exshift = exshift + x;
                for i in 0..=nu {
                    h[(i, i)] = h[(i, i)] - x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = T::c(0.75) * s;
                y = x;
                w = T::c(-0.4375) * s * s;
            }
            if iter == 30 {
                s = (y - x) / two;
                s = s * s + w;
                if s > T::zero() {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / two + s);
                    for i in 0..=nu {
                        h[(i, i)] = h[(i, i)] - s;
                    }
                    exshift = exshift + s;
                    x = T::c(0.964);
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total_iter += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let lhs = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let rhs =
                    eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                h[(i, i - 2)] = T::zero();
                if i > m + 2 {
                    h[(i, i - 3)] = T::zero();
                }
            }

            // Double QR step on rows l..=n, columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast {
                        h[(k + 2, k - 1)]
                    } else {
                        T::zero()
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == T::zero() {
                        continue;
                    }
                    p = p / x;
                    q = q / x;
                    r = r / x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < T::zero() {
                    s = -s;
                }
                if s != T::zero() {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p = p + r * h[(k + 2, j)];
                            h[(k + 2, j)] = h[(k + 2, j)] - p * z;
                        }
                        h[(k, j)] = h[(k, j)] - p * x;
                        h[(k + 1, j)] = h[(k + 1, j)] - p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p = p + z * h[(i, k + 2)];
                            h[(i, k + 2)] = h[(i, k + 2)] - p * r;
                        }
                        h[(i, k)] = h[(i, k)] - p;
                        h[(i, k + 1)] = h[(i, k + 1)] - p * q;
                    }
                }
            }
        }
    }
    if re.iter().chain(&im).any(|v| !v.is_finite()) {
        return Err(VarError::NonConvergence("non-finite eigenvalue".into()));
    }
    Ok(re.into_iter().zip(im).collect())
}

/// Eigen-decomposition `A = V·diag(λ)·Vᵀ` of a symmetric matrix by cyclic
/// Jacobi rotations. Eigenvalues are returned in ascending order with
/// eigenvectors as the matching columns of `V`.
pub fn symmetric_eigen<T: Scalar>(a: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>)> {
    if !a.is_square() {
        return Err(VarError::DimensionMismatch(
            "symmetric eigen of non-square matrix".into(),
        ));
    }
    a.ensure_finite("symmetric eigen input")?;
    let n = a.rows();
    let mut m = a.clone();
    m.symmetrize();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= T::epsilon() * scale || off == T::zero() {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).expect("finite"));
            let values = order.iter().map(|&i| m[(i, i)]).collect();
            let vectors = v.select_cols(&order);
            return Ok((values, vectors));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::c(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(VarError::NonConvergence("Jacobi sweeps exhausted".into()))
}

/// Symmetric positive semi-definite square root. Eigenvalues below
/// `-neg_tol · max|λ|` are rejected; smaller negative values are clamped to 0.
pub fn symmetric_sqrt<T: Scalar>(a: &Matrix<T>, neg_tol: f64) -> Result<Matrix<T>> {
    let (vals, vecs) = symmetric_eigen(a)?;
    let top = vals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let n = a.rows();
    let mut roots = Vec::with_capacity(n);
    for (i, &v) in vals.iter().enumerate() {
        if v < -T::c(neg_tol) * top {
            return Err(VarError::NotPositiveDefinite { pivot: i });
        }
        roots.push(v.max(T::zero()).sqrt());
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| vecs[(i, k)] * roots[k] * vecs[(j, k)]).sum()
    }))
}
