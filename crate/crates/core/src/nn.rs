//! Single-hidden-layer softmax network, trained with SCG.
//!
//! Derived features `Z_m = sigmoid(a_0m + a_m' x)` feed affine outputs
//! `Y = b_0 + B' Z`, turned into class probabilities by a softmax; training
//! minimizes the negative log-likelihood of one-hot targets. With zero
//! hidden units the inputs pass straight to the affine output stage, which
//! is plain linear logistic regression — the two variants are called NLR
//! and LR throughout.
//!
//! Parameters flatten to a single vector in a fixed order (hidden biases,
//! hidden weights column-major, output biases, output weights column-major)
//! so the optimizer sees one contiguous `theta`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scg::{scg_minimize, ScgDiagnostics, ScgOptions};
use crate::seed::stream_rng;
use rand::Rng;

/// All weights of the network. `n_hidden == 0` selects the linear
/// architecture: `output_weights` is then `d x K` and the hidden arrays are
/// empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkWeights {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_classes: usize,
    /// `alpha_0`, length `n_hidden`.
    pub hidden_biases: Array1<f64>,
    /// `alpha`, `n_inputs x n_hidden`.
    pub hidden_weights: Array2<f64>,
    /// `beta_0`, length `n_classes`.
    pub output_biases: Array1<f64>,
    /// `beta`, `m_eff x n_classes` where `m_eff = max(n_hidden, n_inputs for M=0)`.
    pub output_weights: Array2<f64>,
}

impl NetworkWeights {
    fn m_eff(d: usize, m: usize) -> usize {
        if m == 0 {
            d
        } else {
            m
        }
    }

    /// Total parameter count: `M (d+1) + K (M_eff + 1)`.
    pub fn parameter_count(d: usize, m: usize, k: usize) -> usize {
        m * (d + 1) + k * (Self::m_eff(d, m) + 1)
    }

    pub fn zeros(d: usize, m: usize, k: usize) -> Self {
        let m_eff = Self::m_eff(d, m);
        Self {
            n_inputs: d,
            n_hidden: m,
            n_classes: k,
            hidden_biases: Array1::zeros(m),
            hidden_weights: Array2::zeros((d, m)),
            output_biases: Array1::zeros(k),
            output_weights: Array2::zeros((m_eff, k)),
        }
    }

    /// Flattens in the documented order: hidden biases, hidden weights
    /// column-major, output biases, output weights column-major.
    pub fn flatten(&self) -> Array1<f64> {
        let mut out = Vec::with_capacity(Self::parameter_count(
            self.n_inputs,
            self.n_hidden,
            self.n_classes,
        ));
        out.extend(self.hidden_biases.iter());
        for col in self.hidden_weights.columns() {
            out.extend(col.iter());
        }
        out.extend(self.output_biases.iter());
        for col in self.output_weights.columns() {
            out.extend(col.iter());
        }
        Array1::from_vec(out)
    }

    /// Inverse of [`flatten`] for the same architecture.
    pub fn unflatten(d: usize, m: usize, k: usize, theta: &Array1<f64>) -> Result<Self> {
        let expect = Self::parameter_count(d, m, k);
        if theta.len() != expect {
            return Err(Error::Dim(format!(
                "theta has {} entries, architecture needs {expect}",
                theta.len()
            )));
        }
        let m_eff = Self::m_eff(d, m);
        let mut w = Self::zeros(d, m, k);
        let mut pos = 0;
        for j in 0..m {
            w.hidden_biases[j] = theta[pos];
            pos += 1;
        }
        for j in 0..m {
            for i in 0..d {
                w.hidden_weights[(i, j)] = theta[pos];
                pos += 1;
            }
        }
        for j in 0..k {
            w.output_biases[j] = theta[pos];
            pos += 1;
        }
        for j in 0..k {
            for i in 0..m_eff {
                w.output_weights[(i, j)] = theta[pos];
                pos += 1;
            }
        }
        Ok(w)
    }

    /// Pre-softmax outputs for a batch.
    pub fn logits(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_inputs {
            return Err(Error::Dim(format!(
                "{} input columns, network expects {}",
                x.ncols(),
                self.n_inputs
            )));
        }
        let y = if self.n_hidden == 0 {
            x.dot(&self.output_weights) + &self.output_biases
        } else {
            let mut z = x.dot(&self.hidden_weights) + &self.hidden_biases;
            z.mapv_inplace(sigmoid);
            z.dot(&self.output_weights) + &self.output_biases
        };
        Ok(y)
    }
}

fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// Row-wise softmax with max subtraction, safe for logits of any magnitude.
pub fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// One-hot encodes labels into an `n x k` target matrix.
pub fn one_hot(y: &[usize], k: usize) -> Result<Array2<f64>> {
    let mut t = Array2::<f64>::zeros((y.len(), k));
    for (i, &label) in y.iter().enumerate() {
        if label >= k {
            return Err(Error::Target(format!("label {label} out of 0..{k}")));
        }
        t[(i, label)] = 1.0;
    }
    Ok(t)
}

fn validate_one_hot(t: ArrayView2<'_, f64>) -> Result<()> {
    for (i, row) in t.rows().into_iter().enumerate() {
        let ones = row.iter().filter(|&&v| v == 1.0).count();
        let zeros = row.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || ones + zeros != row.len() {
            return Err(Error::Target(format!("row {i} is not one-hot")));
        }
    }
    Ok(())
}

/// Negative log-likelihood and its gradient in flattened-parameter order.
///
/// Loss is `-sum_i sum_k T_ik ln f_k(x_i)` computed through log-softmax, so
/// it stays finite for any finite logits. The gradient comes from
/// backpropagation through the softmax, affine, and sigmoid stages.
pub fn nll_loss_and_gradient(
    weights: &NetworkWeights,
    x: ArrayView2<'_, f64>,
    t: ArrayView2<'_, f64>,
) -> Result<(f64, Array1<f64>)> {
    if t.nrows() != x.nrows() || t.ncols() != weights.n_classes {
        return Err(Error::Dim(format!(
            "targets are {}x{}, expected {}x{}",
            t.nrows(),
            t.ncols(),
            x.nrows(),
            weights.n_classes
        )));
    }
    validate_one_hot(t)?;

    let (hidden_activations, logits) = if weights.n_hidden == 0 {
        let y = x.dot(&weights.output_weights) + &weights.output_biases;
        (None, y)
    } else {
        let mut z = x.dot(&weights.hidden_weights) + &weights.hidden_biases;
        z.mapv_inplace(sigmoid);
        let y = z.dot(&weights.output_weights) + &weights.output_biases;
        (Some(z), y)
    };

    let mut loss = 0.0;
    let mut dy = Array2::<f64>::zeros(logits.raw_dim());
    for (i, row) in logits.rows().into_iter().enumerate() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        for (k, &v) in row.iter().enumerate() {
            let p = (v - lse).exp();
            dy[(i, k)] = p - t[(i, k)];
            if t[(i, k)] == 1.0 {
                loss += lse - v;
            }
        }
    }

    let mut grad = NetworkWeights::zeros(weights.n_inputs, weights.n_hidden, weights.n_classes);
    match hidden_activations {
        None => {
            grad.output_weights = x.t().dot(&dy);
            grad.output_biases = dy.sum_axis(Axis(0));
        }
        Some(z) => {
            grad.output_weights = z.t().dot(&dy);
            grad.output_biases = dy.sum_axis(Axis(0));
            let mut da = dy.dot(&weights.output_weights.t());
            da.zip_mut_with(&z, |g, &zz| *g *= zz * (1.0 - zz));
            grad.hidden_weights = x.t().dot(&da);
            grad.hidden_biases = da.sum_axis(Axis(0));
        }
    }
    Ok((loss, grad.flatten()))
}

/// Seeded uniform initialization: weights in `+-1/sqrt(fan_in)` per layer,
/// biases zero.
pub fn init_network(d: usize, m: usize, k: usize, seed: u64) -> NetworkWeights {
    let mut rng = stream_rng(seed, "nn-init", 0);
    let mut w = NetworkWeights::zeros(d, m, k);
    if m > 0 {
        let bound = 1.0 / (d as f64).sqrt();
        for j in 0..m {
            for i in 0..d {
                w.hidden_weights[(i, j)] = rng.gen_range(-bound..=bound);
            }
        }
    }
    let m_eff = NetworkWeights::m_eff(d, m);
    let bound = 1.0 / (m_eff as f64).sqrt();
    for j in 0..k {
        for i in 0..m_eff {
            w.output_weights[(i, j)] = rng.gen_range(-bound..=bound);
        }
    }
    w
}

/// A trained network and its optimizer diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NnModelRepr", into = "NnModelRepr")]
pub struct NnModel {
    weights: NetworkWeights,
    diagnostics: ScgDiagnostics,
}

/// JSON form: architecture plus the flat parameter vector.
#[derive(Debug, Serialize, Deserialize)]
struct NnModelRepr {
    n_inputs: usize,
    n_hidden: usize,
    n_classes: usize,
    theta: Vec<f64>,
    final_loss: f64,
    iterations: usize,
}

impl From<NnModel> for NnModelRepr {
    fn from(m: NnModel) -> Self {
        Self {
            n_inputs: m.weights.n_inputs,
            n_hidden: m.weights.n_hidden,
            n_classes: m.weights.n_classes,
            theta: m.weights.flatten().to_vec(),
            final_loss: m.diagnostics.final_loss,
            iterations: m.diagnostics.iterations,
        }
    }
}

impl TryFrom<NnModelRepr> for NnModel {
    type Error = Error;
    fn try_from(r: NnModelRepr) -> Result<Self> {
        let weights = NetworkWeights::unflatten(
            r.n_inputs,
            r.n_hidden,
            r.n_classes,
            &Array1::from_vec(r.theta),
        )?;
        Ok(Self {
            weights,
            diagnostics: ScgDiagnostics {
                iterations: r.iterations,
                final_loss: r.final_loss,
                final_gradient_norm: f64::NAN,
                reason: crate::scg::StopReason::MaxIterations,
                accepted_losses: Vec::new(),
            },
        })
    }
}

impl NnModel {
    pub fn weights(&self) -> &NetworkWeights {
        &self.weights
    }

    pub fn diagnostics(&self) -> &ScgDiagnostics {
        &self.diagnostics
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.n_hidden
    }

    pub fn n_classes(&self) -> usize {
        self.weights.n_classes
    }

    /// Class probabilities for one sample.
    pub fn forward(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let batch = x.insert_axis(Axis(0));
        let logits = self.weights.logits(batch)?;
        Ok(softmax_rows(&logits).row(0).to_owned())
    }

    /// Class probabilities for a batch.
    pub fn forward_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        Ok(softmax_rows(&self.weights.logits(x)?))
    }
}

/// Trains a network with `m` hidden units (`m = 0` for LR) by SCG on the
/// negative log-likelihood. Deterministic for a fixed seed.
pub fn train_nn(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    m: usize,
    opts: &ScgOptions,
    seed: u64,
) -> Result<NnModel> {
    if y.len() != x.nrows() {
        return Err(Error::Dim(format!("{} rows but {} labels", x.nrows(), y.len())));
    }
    let k = y.iter().copied().max().map_or(0, |v| v + 1).max(2);
    for class in 0..k {
        if !y.contains(&class) {
            return Err(Error::EmptyClass(format!("class {class} missing from training data")));
        }
    }
    let d = x.ncols();
    let targets = one_hot(y, k)?;
    let theta0 = init_network(d, m, k, seed).flatten();
    let objective = |theta: &Array1<f64>| -> Result<(f64, Array1<f64>)> {
        let w = NetworkWeights::unflatten(d, m, k, theta)?;
        nll_loss_and_gradient(&w, x, targets.view())
    };
    let (theta, diagnostics) = scg_minimize(objective, theta0, opts)?;
    Ok(NnModel {
        weights: NetworkWeights::unflatten(d, m, k, &theta)?,
        diagnostics,
    })
}
