//! Principal component extraction.
//!
//! Components are the right-singular vectors of the mean-centered training
//! matrix, ordered by singular value, so the first component is the
//! direction of maximum variance of the projected data. Projection always
//! centers with the *training* mean — test rows never contribute to the
//! statistics.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::thin_svd;

/// A fitted PCA basis.
///
/// `components` is `d x r` with orthonormal columns in non-increasing
/// singular-value order; `r = min(n_train, d)`. Sign convention: each
/// column's largest-magnitude entry is positive, so component indices are
/// reproducible across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PcaModelRepr", into = "PcaModelRepr")]
pub struct PcaModel {
    mean: Array1<f64>,
    components: Array2<f64>,
    singular_values: Array1<f64>,
    n_train: usize,
}

/// JSON form: components stored column-major, one array per component.
#[derive(Debug, Serialize, Deserialize)]
struct PcaModelRepr {
    mean: Vec<f64>,
    components_column_major: Vec<Vec<f64>>,
    singular_values: Vec<f64>,
    n_train: usize,
}

impl From<PcaModel> for PcaModelRepr {
    fn from(m: PcaModel) -> Self {
        let cols = (0..m.components.ncols())
            .map(|j| m.components.column(j).to_vec())
            .collect();
        Self {
            mean: m.mean.to_vec(),
            components_column_major: cols,
            singular_values: m.singular_values.to_vec(),
            n_train: m.n_train,
        }
    }
}

impl TryFrom<PcaModelRepr> for PcaModel {
    type Error = Error;

    fn try_from(r: PcaModelRepr) -> Result<Self> {
        let d = r.mean.len();
        let k = r.components_column_major.len();
        if k != r.singular_values.len() {
            return Err(Error::Schema(format!(
                "{k} components but {} singular values",
                r.singular_values.len()
            )));
        }
        let mut components = Array2::<f64>::zeros((d, k));
        for (j, col) in r.components_column_major.iter().enumerate() {
            if col.len() != d {
                return Err(Error::Schema(format!(
                    "component {j} has length {}, expected {d}",
                    col.len()
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                components[(i, j)] = v;
            }
        }
        Ok(Self {
            mean: Array1::from_vec(r.mean),
            components,
            singular_values: Array1::from_vec(r.singular_values),
            n_train: r.n_train,
        })
    }
}

impl PcaModel {
    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn components(&self) -> &Array2<f64> {
        &self.components
    }

    pub fn singular_values(&self) -> &Array1<f64> {
        &self.singular_values
    }

    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    /// Per-component variance of the projected training data,
    /// `sigma_i^2 / n_train` (population convention).
    pub fn explained_variance(&self) -> Array1<f64> {
        self.singular_values.mapv(|s| s * s / self.n_train as f64)
    }

    /// Projects rows of `x` onto the selected components.
    ///
    /// Output column `j` is `(x - mean) . v_{indices[j]}`. Indices must be
    /// distinct and in range; an empty list yields an `m x 0` matrix.
    pub fn project(&self, x: ArrayView2<'_, f64>, component_indices: &[usize]) -> Result<Array2<f64>> {
        if x.ncols() != self.mean.len() {
            return Err(Error::Dim(format!(
                "{} input columns, model expects {}",
                x.ncols(),
                self.mean.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &idx in component_indices {
            if idx >= self.n_components() {
                return Err(Error::Index(format!(
                    "component {idx} out of range 0..{}",
                    self.n_components()
                )));
            }
            if !seen.insert(idx) {
                return Err(Error::Index(format!("component {idx} selected twice")));
            }
        }
        let m = x.nrows();
        let k = component_indices.len();
        let mut out = Array2::<f64>::zeros((m, k));
        for i in 0..m {
            for (j, &idx) in component_indices.iter().enumerate() {
                let mut acc = 0.0;
                for c in 0..x.ncols() {
                    acc += (x[(i, c)] - self.mean[c]) * self.components[(c, idx)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Projects onto the first `k` components.
    pub fn project_leading(&self, x: ArrayView2<'_, f64>, k: usize) -> Result<Array2<f64>> {
        let indices: Vec<usize> = (0..k).collect();
        self.project(x, &indices)
    }
}

/// Fits PCA on the training matrix: centers columns, takes the thin SVD,
/// and applies the deterministic sign convention.
pub fn fit_pca(x_train: ArrayView2<'_, f64>) -> Result<PcaModel> {
    let n = x_train.nrows();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "PCA needs at least 2 rows, got {n}"
        )));
    }
    let mean = x_train.sum_axis(ndarray::Axis(0)) / n as f64;
    let centered = &x_train - &mean.view().insert_axis(ndarray::Axis(0));
    let svd = thin_svd(centered.view());
    let mut components = svd.v;
    for mut col in components.columns_mut() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
    Ok(PcaModel {
        mean,
        components,
        singular_values: svd.sigma,
        n_train: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn lcg_matrix(n: usize, d: usize, mut state: u64) -> Array2<f64> {
        Array2::from_shape_fn((n, d), |_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    /// Oracle for the spectrum: cyclic Jacobi eigendecomposition of the
    /// centered scatter matrix XᵀX, independent of the SVD implementation.
    fn scatter_eigenvalues(x: &Array2<f64>) -> Vec<f64> {
        let n = x.nrows() as f64;
        let mean = x.sum_axis(ndarray::Axis(0)) / n;
        let c = x - &mean.view().insert_axis(ndarray::Axis(0));
        let d = c.ncols();
        let mut a = c.t().dot(&c);
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..d {
                for q in (p + 1)..d {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                    let cth = 1.0 / (1.0 + t * t).sqrt();
                    let sth = cth * t;
                    for k in 0..d {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = cth * akp - sth * akq;
                        a[(k, q)] = sth * akp + cth * akq;
                    }
                    for k in 0..d {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = cth * apk - sth * aqk;
                        a[(q, k)] = sth * apk + cth * aqk;
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..d).map(|i| a[(i, i)]).collect();
        eig.sort_by(|u, v| v.partial_cmp(u).unwrap());
        eig
    }

    #[test]
    fn rank_one_line_recovers_direction() {
        let x = array![
            [-2.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0]
        ];
        let m = fit_pca(x.view()).unwrap();
        assert_abs_diff_eq!(m.components()[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.components()[(1, 0)], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.singular_values()[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.singular_values()[2], 0.0, epsilon = 1e-12);
        // explained variance: sigma^2 / 4 = 10 / 4, then zeros
        let ev = m.explained_variance();
        assert_abs_diff_eq!(ev[0], 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn full_projection_reconstructs_and_matches_scatter_eigenvalues() {
        let x = lcg_matrix(10, 5, 0xfeed);
        let m = fit_pca(x.view()).unwrap();
        let proj = m.project_leading(x.view(), 5).unwrap();
        let recon = proj.dot(&m.components().t()) + &m.mean().view().insert_axis(ndarray::Axis(0));
        for (a, b) in recon.iter().zip(x.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        let eig = scatter_eigenvalues(&x);
        for (i, &lambda) in eig.iter().enumerate() {
            let s2 = m.singular_values()[i] * m.singular_values()[i];
            assert!(
                (s2 - lambda).abs() <= 1e-8 * lambda.max(1e-12),
                "eigenvalue {i}: {s2} vs {lambda}"
            );
        }
    }

    #[test]
    fn isotropic_gaussian_has_spherical_spectrum() {
        // Monte Carlo, fixed seed: sigma1/sigma2 -> 1 as n grows.
        use rand::Rng;
        let mut rng = crate::seed::stream_rng(2024, "pca-isotropic", 0);
        let n = 10_000;
        let x = Array2::from_shape_fn((n, 2), |_| {
            // Box-Muller from uniform draws.
            let u: f64 = rng.gen_range(1e-12..1.0);
            let v: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        });
        let m = fit_pca(x.view()).unwrap();
        let ratio = m.singular_values()[0] / m.singular_values()[1];
        assert!(ratio < 1.2, "ratio {ratio}");
    }

    #[test]
    fn training_projection_variance_equals_explained_variance() {
        let x = lcg_matrix(12, 4, 0xabc);
        let m = fit_pca(x.view()).unwrap();
        let proj = m.project_leading(x.view(), 4).unwrap();
        let ev = m.explained_variance();
        for j in 0..4 {
            let col = proj.column(j);
            let mean = col.sum() / 12.0;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 12.0;
            assert!(
                (var - ev[j]).abs() <= 1e-8 * ev[j].max(1e-12),
                "component {j}: {var} vs {}",
                ev[j]
            );
        }
    }

    #[test]
    fn explained_variance_sums_to_total_variance() {
        let x = lcg_matrix(15, 6, 0x51c);
        let m = fit_pca(x.view()).unwrap();
        let total: f64 = m.explained_variance().sum();
        // trace of the covariance matrix, computed directly
        let mean = x.sum_axis(ndarray::Axis(0)) / 15.0;
        let mut trace = 0.0;
        for j in 0..6 {
            trace += x
                .column(j)
                .iter()
                .map(|v| (v - mean[j]) * (v - mean[j]))
                .sum::<f64>()
                / 15.0;
        }
        assert!((total - trace).abs() <= 1e-8 * trace);
    }

    #[test]
    fn empty_selection_and_mean_row() {
        let x = lcg_matrix(8, 3, 7);
        let m = fit_pca(x.view()).unwrap();
        let empty = m.project(x.view(), &[]).unwrap();
        assert_eq!(empty.shape(), &[8, 0]);

        let mean_row = m.mean().clone().insert_axis(ndarray::Axis(0));
        let proj = m.project_leading(mean_row.view(), 3).unwrap();
        for v in proj.iter() {
            assert_abs_diff_eq!(v, &0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_errors() {
        let x = lcg_matrix(6, 3, 1);
        let m = fit_pca(x.view()).unwrap();
        assert!(matches!(m.project(x.view(), &[4]), Err(Error::Index(_))));
        assert!(matches!(m.project(x.view(), &[0, 0]), Err(Error::Index(_))));
        let wrong = lcg_matrix(2, 4, 2);
        assert!(matches!(m.project(wrong.view(), &[0]), Err(Error::Dim(_))));
    }

    #[test]
    fn needs_two_rows() {
        let x = lcg_matrix(1, 3, 5);
        assert!(matches!(fit_pca(x.view()), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn identical_test_row_projects_identically() {
        let x = lcg_matrix(9, 4, 0xd00d);
        let m = fit_pca(x.view()).unwrap();
        let train_proj = m.project_leading(x.view(), 2).unwrap();
        let row = x.row(3).insert_axis(ndarray::Axis(0));
        let test_proj = m.project_leading(row.view(), 2).unwrap();
        for j in 0..2 {
            assert_abs_diff_eq!(test_proj[(0, j)], train_proj[(3, j)], epsilon = 1e-12);
        }
    }

    #[test]
    fn single_component_reconstruction_is_idempotent() {
        let x = lcg_matrix(10, 4, 0xbeef);
        let m = fit_pca(x.view()).unwrap();
        let p1 = m.project(x.view(), &[1]).unwrap();
        // reconstruct along component 1 and re-project
        let v = m.components().column(1);
        let mut recon = Array2::<f64>::zeros((10, 4));
        for i in 0..10 {
            for c in 0..4 {
                recon[(i, c)] = m.mean()[c] + p1[(i, 0)] * v[c];
            }
        }
        let p2 = m.project(recon.view(), &[1]).unwrap();
        for (a, b) in p1.iter().zip(p2.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn explained_variance_invariant_under_rotation() {
        let x = lcg_matrix(20, 3, 0x777);
        // Gram-Schmidt on a fixed matrix gives an orthogonal rotation.
        let raw = array![[0.6, -0.2, 0.1], [0.3, 0.9, -0.4], [-0.2, 0.4, 0.8]];
        let mut q = raw.clone();
        for j in 0..3 {
            for k in 0..j {
                let dot = q.column(j).dot(&q.column(k));
                let col_k = q.column(k).to_owned();
                q.column_mut(j).zip_mut_with(&col_k, |a, b| *a -= dot * b);
            }
            let norm = f64::sqrt(q.column(j).dot(&q.column(j)));
            q.column_mut(j).mapv_inplace(|v| v / norm);
        }
        let rotated = x.dot(&q);
        let ev_a = fit_pca(x.view()).unwrap().explained_variance();
        let ev_b = fit_pca(rotated.view()).unwrap().explained_variance();
        for (a, b) in ev_a.iter().zip(ev_b.iter()) {
            assert!((a - b).abs() <= 1e-8 * a.max(1e-12));
        }
    }

    #[test]
    fn json_round_trip() {
        let x = lcg_matrix(7, 3, 0x42);
        let m = fit_pca(x.view()).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: PcaModel = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
    }
}
