//! Small dense linear-algebra kernels: a symmetric Cholesky factorization
//! with triangular solves, and a one-sided Jacobi SVD.
//!
//! The matrices in this pipeline are modest (at most a few hundred rows or
//! columns), so simple, deterministic kernels are preferred over a BLAS
//! binding: they give bit-identical results across platforms and have no
//! native dependencies. One-sided Jacobi is slow-ish but backward stable and
//! produces an exactly orthonormal right-singular basis by construction.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Array2<f64>,
}

impl Cholesky {
    /// Factors `a = L Lᵀ`. Fails when a pivot is not strictly positive,
    /// which is how singular (or indefinite) covariance matrices surface.
    pub fn new(a: ArrayView2<'_, f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dim(format!(
                "cholesky needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let mut l = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag -= l[(j, k)] * l[(j, k)];
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(Error::SingularCovariance(format!(
                    "non-positive pivot {diag:e} at column {j}"
                )));
            }
            let dsq = diag.sqrt();
            l[(j, j)] = dsq;
            for i in (j + 1)..n {
                let mut v = a[(i, j)];
                for k in 0..j {
                    v -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = v / dsq;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// Solves `L z = b` (forward substitution).
    pub fn solve_lower(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.dim();
        let mut z = b.clone();
        for i in 0..n {
            for k in 0..i {
                let t = z[k];
                z[i] -= self.lower[(i, k)] * t;
            }
            z[i] /= self.lower[(i, i)];
        }
        z
    }

    /// Solves `A x = b` via the two triangular solves.
    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.dim();
        let mut x = self.solve_lower(b);
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let t = x[k];
                x[i] -= self.lower[(k, i)] * t;
            }
            x[i] /= self.lower[(i, i)];
        }
        x
    }

    /// `ln |A|` read off the factor diagonal; avoids overflow in the
    /// determinant itself.
    pub fn ln_determinant(&self) -> f64 {
        self.lower.diag().iter().map(|d| 2.0 * d.ln()).sum()
    }

    /// Cheap reciprocal-condition estimate: extreme eigenvalues by power
    /// iteration on `A` and inverse iteration through the factor.
    pub fn rcond_estimate(&self, a: ArrayView2<'_, f64>) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let mut v = Array1::<f64>::from_elem(n, (n as f64).sqrt().recip());
        let mut lambda_max = 0.0;
        for _ in 0..50 {
            let w = a.dot(&v);
            let norm = w.dot(&w).sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            lambda_max = norm;
            v = w / norm;
        }
        let mut u = Array1::<f64>::from_elem(n, (n as f64).sqrt().recip());
        let mut inv_norm = 0.0;
        for _ in 0..50 {
            let w = self.solve(&u);
            let norm = w.dot(&w).sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return 0.0;
            }
            inv_norm = norm;
            u = w / norm;
        }
        // lambda_min ~= 1 / ||A^-1||; rcond = lambda_min / lambda_max
        1.0 / (inv_norm * lambda_max)
    }
}

/// Thin SVD `X = U Σ Vᵀ` restricted to what PCA consumes: the right-singular
/// vectors and the singular values.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// `d x r` matrix of right-singular vectors (columns), `r = min(n, d)`.
    pub v: Array2<f64>,
    /// Singular values in non-increasing order, length `r`.
    pub sigma: Array1<f64>,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Rotates column pairs of a working copy of `x` until all pairs are
/// numerically orthogonal, accumulating the rotations into `V`. Column norms
/// of the worked matrix are the singular values. `V` is a product of plane
/// rotations and therefore orthonormal to machine precision independent of
/// rank.
pub fn thin_svd(x: ArrayView2<'_, f64>) -> ThinSvd {
    let (n, d) = (x.nrows(), x.ncols());
    let mut w = x.to_owned();
    let mut v = Array2::<f64>::eye(d);
    let tol = 1e-14;
    let max_sweeps = 64;

    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..d {
            for j in (i + 1)..d {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for r in 0..n {
                    let wi = w[(r, i)];
                    let wj = w[(r, j)];
                    alpha += wi * wi;
                    beta += wj * wj;
                    gamma += wi * wj;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..n {
                    let wi = w[(r, i)];
                    let wj = w[(r, j)];
                    w[(r, i)] = c * wi - s * wj;
                    w[(r, j)] = s * wi + c * wj;
                }
                for r in 0..d {
                    let vi = v[(r, i)];
                    let vj = v[(r, j)];
                    v[(r, i)] = c * vi - s * vj;
                    v[(r, j)] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let norms: Vec<f64> = (0..d)
        .map(|j| w.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let r = n.min(d);
    let mut sigma = Array1::<f64>::zeros(r);
    let mut vr = Array2::<f64>::zeros((d, r));
    for (k, &j) in order.iter().take(r).enumerate() {
        sigma[k] = norms[j];
        vr.column_mut(k).assign(&v.column(j));
    }
    ThinSvd { v: vr, sigma }
}
