//! Gaussian generative classifiers: LDA with a pooled covariance and QDA
//! with per-class covariances.
//!
//! Parameters are maximum-likelihood estimates from the training data:
//! priors `pi_k = N_k / N`, class means, and population (1/N_k) class
//! covariances; the LDA pooled covariance is the class-size-weighted average
//! `sum_k (N_k / N) Sigma_k`. Discriminants are evaluated through a Cholesky
//! factorization — solves, never an explicit inverse — and `ln |Sigma|`
//! comes off the factor diagonal.
//!
//! A covariance that fails to factorize, or whose reciprocal condition
//! estimate drops below 1e-12, is reported as
//! [`Error::SingularCovariance`]; nothing is regularized silently. An
//! explicit ridge (`Sigma + eps I`) is available through
//! [`DiscriminantOptions`] for exploration.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Cholesky;

const RCOND_FLOOR: f64 = 1e-12;

/// Covariance normalization convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CovarianceDivisor {
    /// Divide by `N_k` (maximum-likelihood / population form). Default.
    #[default]
    Population,
    /// Divide by `N_k - 1` (unbiased form); the pooled estimate then uses
    /// `N - K`.
    Sample,
}

/// Estimation options shared by LDA and QDA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantOptions {
    pub divisor: CovarianceDivisor,
    /// Ridge term added to every covariance diagonal; 0 disables it.
    pub ridge: f64,
}

impl Default for DiscriminantOptions {
    fn default() -> Self {
        Self {
            divisor: CovarianceDivisor::Population,
            ridge: 0.0,
        }
    }
}

/// Estimated prior, mean, and covariance of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianClassParams {
    pub prior: f64,
    pub mean: Array1<f64>,
    pub covariance: Array2<f64>,
}

fn validate_params(params: &[GaussianClassParams]) -> Result<usize> {
    if params.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 classes, got {}",
            params.len()
        )));
    }
    let d = params[0].mean.len();
    let prior_sum: f64 = params.iter().map(|p| p.prior).sum();
    if (prior_sum - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!("priors sum to {prior_sum}, not 1")));
    }
    for (k, p) in params.iter().enumerate() {
        if !(p.prior > 0.0 && p.prior < 1.0) {
            return Err(Error::Config(format!("prior of class {k} is {}", p.prior)));
        }
        if p.mean.len() != d || p.covariance.nrows() != d || p.covariance.ncols() != d {
            return Err(Error::Dim(format!("class {k} parameter shapes disagree")));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if (p.covariance[(i, j)] - p.covariance[(j, i)]).abs() > 1e-12 {
                    return Err(Error::Config(format!(
                        "class {k} covariance is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
    }
    Ok(d)
}

/// Per-class counts, means, and covariances from labeled rows.
fn estimate_class_params(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    opts: &DiscriminantOptions,
) -> Result<(Vec<GaussianClassParams>, Vec<usize>)> {
    let n = x.nrows();
    if y.len() != n {
        return Err(Error::Dim(format!("{n} rows but {} labels", y.len())));
    }
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} training rows")));
    }
    let k = y.iter().copied().max().map_or(0, |m| m + 1).max(2);
    let mut counts = vec![0usize; k];
    for &label in y {
        counts[label] += 1;
    }
    for (class, &c) in counts.iter().enumerate() {
        if c == 0 {
            return Err(Error::EmptyClass(format!("class {class} has no samples")));
        }
        if c < 2 {
            return Err(Error::InsufficientData(format!(
                "class {class} has {c} samples, need at least 2"
            )));
        }
    }
    let d = x.ncols();
    let mut params = Vec::with_capacity(k);
    for class in 0..k {
        let nk = counts[class] as f64;
        let mut mean = Array1::<f64>::zeros(d);
        for (i, &label) in y.iter().enumerate() {
            if label == class {
                mean += &x.row(i);
            }
        }
        mean /= nk;
        let mut cov = Array2::<f64>::zeros((d, d));
        for (i, &label) in y.iter().enumerate() {
            if label == class {
                let diff = &x.row(i) - &mean;
                for a in 0..d {
                    // exploit symmetry, fill upper then mirror
                    for b in a..d {
                        cov[(a, b)] += diff[a] * diff[b];
                    }
                }
            }
        }
        let denom = match opts.divisor {
            CovarianceDivisor::Population => nk,
            CovarianceDivisor::Sample => nk - 1.0,
        };
        for a in 0..d {
            for b in a..d {
                cov[(a, b)] /= denom;
                cov[(b, a)] = cov[(a, b)];
            }
        }
        if opts.ridge > 0.0 {
            for a in 0..d {
                cov[(a, a)] += opts.ridge;
            }
        }
        params.push(GaussianClassParams {
            prior: nk / n as f64,
            mean,
            covariance: cov,
        });
    }
    Ok((params, counts))
}

fn factor_checked(cov: &Array2<f64>, what: &str) -> Result<Cholesky> {
    let chol = Cholesky::new(cov.view())
        .map_err(|_| Error::SingularCovariance(format!("{what} does not factorize")))?;
    let rcond = chol.rcond_estimate(cov.view());
    if rcond < RCOND_FLOOR {
        return Err(Error::SingularCovariance(format!(
            "{what} reciprocal condition {rcond:.2e} below {RCOND_FLOOR:.0e}"
        )));
    }
    Ok(chol)
}

/// Linear discriminant analysis with a shared pooled covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LdaModelRepr", into = "LdaModelRepr")]
pub struct LdaModel {
    params: Vec<GaussianClassParams>,
    pooled: Array2<f64>,
    #[serde(skip)]
    weights: Vec<Array1<f64>>, // Sigma^-1 mu_k
    #[serde(skip)]
    offsets: Vec<f64>, // -0.5 mu_k' Sigma^-1 mu_k + ln pi_k
}

#[derive(Debug, Serialize, Deserialize)]
struct LdaModelRepr {
    params: Vec<GaussianClassParams>,
    pooled: Array2<f64>,
}

impl From<LdaModel> for LdaModelRepr {
    fn from(m: LdaModel) -> Self {
        Self {
            params: m.params,
            pooled: m.pooled,
        }
    }
}

impl TryFrom<LdaModelRepr> for LdaModel {
    type Error = Error;
    fn try_from(r: LdaModelRepr) -> Result<Self> {
        LdaModel::from_parts(r.params, r.pooled)
    }
}

impl LdaModel {
    /// Builds the model from explicit parameters and pooled covariance.
    pub fn from_parts(params: Vec<GaussianClassParams>, pooled: Array2<f64>) -> Result<Self> {
        let d = validate_params(&params)?;
        if pooled.nrows() != d || pooled.ncols() != d {
            return Err(Error::Dim("pooled covariance shape".into()));
        }
        let chol = factor_checked(&pooled, "pooled covariance")?;
        let mut weights = Vec::with_capacity(params.len());
        let mut offsets = Vec::with_capacity(params.len());
        for p in &params {
            let w = chol.solve(&p.mean);
            let c = -0.5 * p.mean.dot(&w) + p.prior.ln();
            weights.push(w);
            offsets.push(c);
        }
        Ok(Self {
            params,
            pooled,
            weights,
            offsets,
        })
    }

    /// Builds from per-class parameters, pooling `sum_k pi_k Sigma_k`.
    pub fn from_params(params: Vec<GaussianClassParams>) -> Result<Self> {
        let d = validate_params(&params)?;
        let mut pooled = Array2::<f64>::zeros((d, d));
        for p in &params {
            pooled.scaled_add(p.prior, &p.covariance);
        }
        Self::from_parts(params, pooled)
    }

    pub fn n_classes(&self) -> usize {
        self.params.len()
    }

    pub fn n_features(&self) -> usize {
        self.params[0].mean.len()
    }

    pub fn class_params(&self) -> &[GaussianClassParams] {
        &self.params
    }

    pub fn pooled_covariance(&self) -> &Array2<f64> {
        &self.pooled
    }

    /// `delta_k(x) = x' Sigma^-1 mu_k - mu_k' Sigma^-1 mu_k / 2 + ln pi_k`.
    pub fn discriminants(&self, x: ArrayView1<'_, f64>) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(Error::Dim(format!(
                "input has {} features, model {}",
                x.len(),
                self.n_features()
            )));
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.offsets)
            .map(|(w, c)| x.dot(w) + c)
            .collect())
    }
}

/// Quadratic discriminant analysis with per-class covariances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QdaModelRepr", into = "QdaModelRepr")]
pub struct QdaModel {
    params: Vec<GaussianClassParams>,
    #[serde(skip)]
    factors: Vec<Cholesky>,
    #[serde(skip)]
    ln_dets: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct QdaModelRepr {
    params: Vec<GaussianClassParams>,
}

impl From<QdaModel> for QdaModelRepr {
    fn from(m: QdaModel) -> Self {
        Self { params: m.params }
    }
}

impl TryFrom<QdaModelRepr> for QdaModel {
    type Error = Error;
    fn try_from(r: QdaModelRepr) -> Result<Self> {
        QdaModel::from_params(r.params)
    }
}

impl PartialEq<Cholesky> for Cholesky {
    fn eq(&self, _: &Cholesky) -> bool {
        true // factors are derived state; parameter equality decides
    }
}

impl QdaModel {
    pub fn from_params(params: Vec<GaussianClassParams>) -> Result<Self> {
        validate_params(&params)?;
        let mut factors = Vec::with_capacity(params.len());
        let mut ln_dets = Vec::with_capacity(params.len());
        for (k, p) in params.iter().enumerate() {
            let chol = factor_checked(&p.covariance, &format!("class {k} covariance"))?;
            ln_dets.push(chol.ln_determinant());
            factors.push(chol);
        }
        Ok(Self {
            params,
            factors,
            ln_dets,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.params.len()
    }

    pub fn n_features(&self) -> usize {
        self.params[0].mean.len()
    }

    pub fn class_params(&self) -> &[GaussianClassParams] {
        &self.params
    }

    /// `delta_k(x) = -ln |Sigma_k| / 2 - (x-mu_k)' Sigma_k^-1 (x-mu_k) / 2 + ln pi_k`.
    pub fn discriminants(&self, x: ArrayView1<'_, f64>) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(Error::Dim(format!(
                "input has {} features, model {}",
                x.len(),
                self.n_features()
            )));
        }
        Ok(self
            .params
            .iter()
            .zip(self.factors.iter().zip(&self.ln_dets))
            .map(|(p, (chol, ln_det))| {
                let diff = &x - &p.mean;
                let z = chol.solve_lower(&diff);
                -0.5 * ln_det - 0.5 * z.dot(&z) + p.prior.ln()
            })
            .collect())
    }
}

/// Fits LDA with default options (population covariance, no ridge).
pub fn fit_lda(x: ArrayView2<'_, f64>, y: &[usize]) -> Result<LdaModel> {
    fit_lda_with(x, y, &DiscriminantOptions::default())
}

pub fn fit_lda_with(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    opts: &DiscriminantOptions,
) -> Result<LdaModel> {
    let (params, counts) = estimate_class_params(x, y, opts)?;
    let n: usize = counts.iter().sum();
    let d = x.ncols();
    let mut pooled = Array2::<f64>::zeros((d, d));
    match opts.divisor {
        CovarianceDivisor::Population => {
            for (p, &nk) in params.iter().zip(&counts) {
                pooled.scaled_add(nk as f64 / n as f64, &p.covariance);
            }
        }
        CovarianceDivisor::Sample => {
            let denom = (n - counts.len()) as f64;
            for (p, &nk) in params.iter().zip(&counts) {
                pooled.scaled_add((nk - 1) as f64 / denom, &p.covariance);
            }
        }
    }
    LdaModel::from_parts(params, pooled)
}

/// Fits QDA with default options.
pub fn fit_qda(x: ArrayView2<'_, f64>, y: &[usize]) -> Result<QdaModel> {
    fit_qda_with(x, y, &DiscriminantOptions::default())
}

pub fn fit_qda_with(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    opts: &DiscriminantOptions,
) -> Result<QdaModel> {
    let (params, counts) = estimate_class_params(x, y, opts)?;
    if opts.ridge == 0.0 {
        // With N_k <= d the sample covariance has rank < d: provably singular.
        let d = x.ncols();
        for (class, &nk) in counts.iter().enumerate() {
            if nk <= d {
                return Err(Error::SingularCovariance(format!(
                    "class {class}: {nk} samples for {d} features makes the covariance singular"
                )));
            }
        }
    }
    QdaModel::from_params(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::argmax_tie_lowest;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    /// Test-side matrix inverse (Gauss-Jordan), independent of the Cholesky
    /// solve path used by the implementation.
    fn invert(m: &Array2<f64>) -> Array2<f64> {
        let d = m.nrows();
        let mut a = m.clone();
        let mut inv = Array2::<f64>::eye(d);
        for col in 0..d {
            let mut pivot = col;
            for r in col + 1..d {
                if a[(r, col)].abs() > a[(pivot, col)].abs() {
                    pivot = r;
                }
            }
            if pivot != col {
                for c in 0..d {
                    a.swap((col, c), (pivot, c));
                    inv.swap((col, c), (pivot, c));
                }
            }
            let p = a[(col, col)];
            for c in 0..d {
                a[(col, c)] /= p;
                inv[(col, c)] /= p;
            }
            for r in 0..d {
                if r != col {
                    let f = a[(r, col)];
                    for c in 0..d {
                        let ac = a[(col, c)];
                        let ic = inv[(col, c)];
                        a[(r, c)] -= f * ac;
                        inv[(r, c)] -= f * ic;
                    }
                }
            }
        }
        inv
    }

    fn det3(m: &Array2<f64>) -> f64 {
        m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
    }

    #[test]
    fn one_dimensional_boundary_at_zero() {
        let x = array![[-1.5], [-0.5], [0.5], [1.5]];
        let y = vec![0, 0, 1, 1];
        let m = fit_lda(x.view(), &y).unwrap();
        let d_neg = m.discriminants(array![-0.1].view()).unwrap();
        assert!(d_neg[0] > d_neg[1]);
        let d_pos = m.discriminants(array![0.1].view()).unwrap();
        assert!(d_pos[1] > d_pos[0]);
        let d_zero = m.discriminants(array![0.0].view()).unwrap();
        assert_abs_diff_eq!(d_zero[0], d_zero[1], epsilon = 1e-12);
    }

    #[test]
    fn lda_matches_direct_formula_on_hand_instance() {
        let x = array![[0.0, 0.0], [2.0, 0.0], [1.5, 1.0], [3.5, 2.0]];
        let y = vec![0, 0, 1, 1];
        let m = fit_lda(x.view(), &y).unwrap();

        // Direct evaluation with an explicit inverse.
        let mu0 = array![1.0, 0.0];
        let mu1 = array![2.5, 1.5];
        let c0 = array![[1.0, 0.0], [0.0, 0.0]];
        let c1 = array![[1.0, 0.5], [0.5, 0.25]];
        let mut pooled = Array2::<f64>::zeros((2, 2));
        pooled.scaled_add(0.5, &c0);
        pooled.scaled_add(0.5, &c1);
        let inv = invert(&pooled);
        let probe = array![0.7, -0.3];
        let delta = m.discriminants(probe.view()).unwrap();
        for (k, mu) in [mu0, mu1].iter().enumerate() {
            let w = inv.dot(mu);
            let want = probe.dot(&w) - 0.5 * mu.dot(&w) + 0.5f64.ln();
            assert_abs_diff_eq!(delta[k], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn priors_follow_class_counts() {
        let mut x = Array2::<f64>::zeros((80, 2));
        let mut state = 3u64;
        for v in x.iter_mut() {
            *v = lcg(&mut state);
        }
        let y: Vec<usize> = (0..80).map(|i| usize::from(i < 20)).collect();
        let m = fit_lda(x.view(), &y).unwrap();
        assert_abs_diff_eq!(m.class_params()[1].prior, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.class_params()[0].prior, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn identical_classes_give_equal_discriminants() {
        let params = vec![
            GaussianClassParams {
                prior: 0.5,
                mean: array![1.0, 2.0],
                covariance: array![[1.0, 0.2], [0.2, 2.0]],
            },
            GaussianClassParams {
                prior: 0.5,
                mean: array![1.0, 2.0],
                covariance: array![[1.0, 0.2], [0.2, 2.0]],
            },
        ];
        let m = LdaModel::from_params(params).unwrap();
        let d = m.discriminants(array![0.3, -1.0].view()).unwrap();
        assert_abs_diff_eq!(d[0], d[1], epsilon = 1e-12);
    }

    #[test]
    fn discriminant_difference_matches_posterior_log_ratio() {
        // The pairwise difference delta_1 - delta_0 must match the log-ratio
        // of the Gaussian class posteriors under the pooled covariance.
        let mut state = 11u64;
        let mut x = Array2::<f64>::zeros((30, 3));
        for v in x.iter_mut() {
            *v = lcg(&mut state);
        }
        for i in 15..30 {
            x[(i, 0)] += 2.0;
        }
        let y: Vec<usize> = (0..30).map(|i| usize::from(i >= 15)).collect();
        let m = fit_lda(x.view(), &y).unwrap();
        let inv = invert(m.pooled_covariance());
        for trial in 0..20 {
            let probe = array![
                lcg(&mut state) * 3.0,
                lcg(&mut state) * 3.0,
                lcg(&mut state) * 3.0
            ];
            let d = m.discriminants(probe.view()).unwrap();
            // log ratio of pi_k f_k / pi_l f_l with the shared covariance;
            // the ln|Sigma| halves cancel.
            let mut logs = [0.0f64; 2];
            for k in 0..2 {
                let diff = &probe - &m.class_params()[k].mean;
                let maha = diff.dot(&inv.dot(&diff));
                logs[k] = m.class_params()[k].prior.ln() - 0.5 * maha;
            }
            let want = logs[1] - logs[0];
            let got = d[1] - d[0];
            assert_abs_diff_eq!(got, want, epsilon = 1e-10);
            assert_eq!(got.signum(), want.signum(), "trial {trial}");
        }
    }

    #[test]
    fn shifting_all_data_preserves_predictions() {
        let mut state = 21u64;
        let mut x = Array2::<f64>::zeros((40, 2));
        for v in x.iter_mut() {
            *v = lcg(&mut state);
        }
        for i in 20..40 {
            x[(i, 1)] += 1.5;
        }
        let y: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
        let shift = array![5.0, -3.0];
        let shifted = &x + &shift.view().insert_axis(ndarray::Axis(0));

        let m0 = fit_lda(x.view(), &y).unwrap();
        let m1 = fit_lda(shifted.view(), &y).unwrap();
        for i in 0..40 {
            let d0 = m0.discriminants(x.row(i)).unwrap();
            let d1 = m1.discriminants(shifted.row(i)).unwrap();
            assert_eq!(argmax_tie_lowest(&d0), argmax_tie_lowest(&d1));
        }
    }

    #[test]
    fn qda_equals_lda_when_covariances_equal() {
        let cov = array![[1.3, 0.4], [0.4, 0.9]];
        let params = |prior: f64, mean: Array1<f64>| GaussianClassParams {
            prior,
            mean,
            covariance: cov.clone(),
        };
        let lda = LdaModel::from_params(vec![
            params(0.5, array![0.0, 0.0]),
            params(0.5, array![1.0, 2.0]),
        ])
        .unwrap();
        let qda = QdaModel::from_params(vec![
            params(0.5, array![0.0, 0.0]),
            params(0.5, array![1.0, 2.0]),
        ])
        .unwrap();
        let mut state = 77u64;
        for _ in 0..50 {
            let p = array![lcg(&mut state) * 4.0, lcg(&mut state) * 4.0];
            let dl = lda.discriminants(p.view()).unwrap();
            let dq = qda.discriminants(p.view()).unwrap();
            assert_eq!(argmax_tie_lowest(&dl), argmax_tie_lowest(&dq));
        }
    }

    #[test]
    fn qda_rejects_n_at_most_d() {
        // 256 features, 16 rows per class: provably singular.
        let d = 256;
        let mut state = 5u64;
        let x = Array2::from_shape_fn((32, d), |_| lcg(&mut state));
        let y: Vec<usize> = (0..32).map(|i| usize::from(i >= 16)).collect();
        assert!(matches!(
            fit_qda(x.view(), &y),
            Err(Error::SingularCovariance(_))
        ));
    }

    #[test]
    fn qda_at_class_mean_wins_with_equal_dets() {
        let c = array![[0.8, 0.0], [0.0, 0.8]];
        let mk = |mean: Array1<f64>| GaussianClassParams {
            prior: 0.5,
            mean,
            covariance: c.clone(),
        };
        let m = QdaModel::from_params(vec![mk(array![0.0, 0.0]), mk(array![3.0, 1.0])]).unwrap();
        let d = m.discriminants(array![3.0, 1.0].view()).unwrap();
        assert!(d[1] > d[0]);
    }

    #[test]
    fn qda_isotropic_reduces_to_nearest_mean() {
        let mk = |mean: Array1<f64>| GaussianClassParams {
            prior: 0.5,
            mean,
            covariance: Array2::eye(2),
        };
        let m = QdaModel::from_params(vec![mk(array![0.0, 0.0]), mk(array![2.0, 0.0])]).unwrap();
        let mut state = 9u64;
        for _ in 0..40 {
            let p = array![lcg(&mut state) * 4.0 + 1.0, lcg(&mut state) * 4.0];
            let d = m.discriminants(p.view()).unwrap();
            let d0 = (p[0]).hypot(p[1]);
            let d1 = (p[0] - 2.0).hypot(p[1]);
            let want = usize::from(d1 < d0);
            assert_eq!(argmax_tie_lowest(&d), want);
        }
    }

    #[test]
    fn qda_matches_direct_formula_on_random_3d_instance() {
        let mut state = 31u64;
        let mut x = Array2::<f64>::zeros((60, 3));
        for v in x.iter_mut() {
            *v = lcg(&mut state);
        }
        for i in 30..60 {
            x[(i, 0)] = x[(i, 0)] * 2.0 + 1.0;
            x[(i, 2)] *= 0.5;
        }
        let y: Vec<usize> = (0..60).map(|i| usize::from(i >= 30)).collect();
        let m = fit_qda(x.view(), &y).unwrap();
        for _ in 0..10 {
            let p = array![lcg(&mut state), lcg(&mut state), lcg(&mut state)];
            let d = m.discriminants(p.view()).unwrap();
            for k in 0..2 {
                let cp = &m.class_params()[k];
                let inv = invert(&cp.covariance);
                let diff = &p - &cp.mean;
                let want = -0.5 * det3(&cp.covariance).ln() - 0.5 * diff.dot(&inv.dot(&diff))
                    + cp.prior.ln();
                assert_abs_diff_eq!(d[k], want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn row_order_does_not_change_discriminants() {
        let mut state = 99u64;
        let mut x = Array2::<f64>::zeros((24, 3));
        for v in x.iter_mut() {
            *v = lcg(&mut state);
        }
        for i in 12..24 {
            x[(i, 1)] += 2.0;
        }
        let y: Vec<usize> = (0..24).map(|i| usize::from(i >= 12)).collect();
        let m1 = fit_lda(x.view(), &y).unwrap();

        // reverse the rows
        let rev_rows: Vec<usize> = (0..24).rev().collect();
        let mut xr = Array2::<f64>::zeros((24, 3));
        let mut yr = vec![0; 24];
        for (out, &i) in rev_rows.iter().enumerate() {
            xr.row_mut(out).assign(&x.row(i));
            yr[out] = y[i];
        }
        let m2 = fit_lda(xr.view(), &yr).unwrap();
        let p = array![0.4, 1.1, -0.2];
        let d1 = m1.discriminants(p.view()).unwrap();
        let d2 = m2.discriminants(p.view()).unwrap();
        let margin1 = d1[1] - d1[0];
        let margin2 = d2[1] - d2[0];
        assert!((margin1 - margin2).abs() < 1e-8);
    }

    #[test]
    fn discriminants_are_monotone_in_priors() {
        let base = |prior: f64| {
            vec![
                GaussianClassParams {
                    prior,
                    mean: array![0.0, 0.0],
                    covariance: Array2::eye(2),
                },
                GaussianClassParams {
                    prior: 1.0 - prior,
                    mean: array![1.0, 1.0],
                    covariance: Array2::eye(2),
                },
            ]
        };
        let p = array![0.3, 0.6];
        let mut last = f64::NEG_INFINITY;
        for prior in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let m = LdaModel::from_params(base(prior)).unwrap();
            let d = m.discriminants(p.view()).unwrap();
            assert!(d[0] > last);
            last = d[0];
        }
    }

    #[test]
    fn bayes_agreement_on_known_gaussians() {
        use rand::Rng;
        let mut rng = crate::seed::stream_rng(1234, "bayes", 0);
        let mut normal = move || {
            let u: f64 = rng.gen_range(1e-12..1.0);
            let v: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        };
        let n = 10_000;
        let mu = [array![0.0, 0.0], array![1.2, 0.8]];
        // shared covariance [[1, .3], [.3, .7]] via its Cholesky factor
        let l = array![[1.0, 0.0], [0.3, (0.7f64 - 0.09).sqrt()]];
        let mut x = Array2::<f64>::zeros((2 * n, 2));
        let mut y = Vec::with_capacity(2 * n);
        for i in 0..2 * n {
            let class = usize::from(i >= n);
            let z = array![normal(), normal()];
            let s = l.dot(&z) + &mu[class];
            x.row_mut(i).assign(&s);
            y.push(class);
        }
        let m = fit_lda(x.view(), &y).unwrap();

        // Analytic Bayes rule from the true parameters.
        let cov = array![[1.0, 0.3], [0.3, 0.7]];
        let inv = invert(&cov);
        let mut agree = 0usize;
        let trials = 4000;
        for _ in 0..trials {
            let p = array![normal() * 2.0 + 0.5, normal() * 2.0 + 0.5];
            let d = m.discriminants(p.view()).unwrap();
            let got = argmax_tie_lowest(&d);
            let mut best = (f64::NEG_INFINITY, 0usize);
            for k in 0..2 {
                let diff = &p - &mu[k];
                let score = -0.5 * diff.dot(&inv.dot(&diff));
                if score > best.0 {
                    best = (score, k);
                }
            }
            if got == best.1 {
                agree += 1;
            }
        }
        let rate = agree as f64 / trials as f64;
        assert!(rate >= 0.98, "agreement {rate}");
    }

    #[test]
    fn models_round_trip_through_json() {
        let mut state = 1u64;
        let mut x = Array2::<f64>::zeros((20, 2));
        for v in x.iter_mut() {
            *v = lcg(&mut state);
        }
        for i in 10..20 {
            x[(i, 0)] += 2.0;
        }
        let y: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        let lda = fit_lda(x.view(), &y).unwrap();
        let json = serde_json::to_string(&lda).unwrap();
        let back: LdaModel = serde_json::from_str(&json).unwrap();
        assert_eq!(lda, back);
        let p = array![0.5, 0.5];
        assert_eq!(
            lda.discriminants(p.view()).unwrap(),
            back.discriminants(p.view()).unwrap()
        );

        let qda = fit_qda(x.view(), &y).unwrap();
        let json = serde_json::to_string(&qda).unwrap();
        let back: QdaModel = serde_json::from_str(&json).unwrap();
        assert_eq!(
            qda.discriminants(p.view()).unwrap(),
            back.discriminants(p.view()).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let x = array![[0.0, 1.0], [1.0, 0.0], [2.0, 2.0], [3.0, 2.0]];
        let y = vec![0, 0, 1, 1];
        let m = fit_lda(x.view(), &y).unwrap();
        assert!(matches!(
            m.discriminants(array![1.0].view()),
            Err(Error::Dim(_))
        ));
    }

    #[test]
    fn ridge_rescues_singular_covariance() {
        // Two constant columns: population covariance is singular.
        let x = array![
            [1.0, 1.0],
            [1.0, 1.0],
            [2.0, 0.0],
            [2.0, 0.0],
            [2.0, 0.0]
        ];
        let y = vec![0, 0, 1, 1, 1];
        assert!(fit_lda(x.view(), &y).is_err());
        let opts = DiscriminantOptions {
            ridge: 1e-3,
            ..Default::default()
        };
        assert!(fit_lda_with(x.view(), &y, &opts).is_ok());
    }
}
