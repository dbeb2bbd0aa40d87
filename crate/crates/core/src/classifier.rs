//! Common classifier interface over LDA, QDA, LR, and NLR.
//!
//! Every model exposes per-class scores shaped like probabilities: the
//! network reports its softmax outputs directly, and the discriminant
//! models report a softmax over their discriminant values. Scores preserve
//! the argmax, so predictions are unchanged, and they give the vote
//! aggregation a common currency for breaking ties.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::discriminant::{
    fit_lda_with, fit_qda_with, DiscriminantOptions, LdaModel, QdaModel,
};
use crate::error::{Error, Result};
use crate::nn::{train_nn, NnModel};
use crate::scg::ScgOptions;

/// Index of the largest score; exact ties resolve to the lowest index.
pub fn argmax_tie_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in scores.iter().enumerate().skip(1) {
        if v > scores[best] {
            best = i;
        }
    }
    best
}

fn softmax_slice(values: &[f64]) -> Vec<f64> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// A fitted, immutable predictor exposing per-class scores.
pub trait Classifier {
    fn n_classes(&self) -> usize;

    /// One score row per input row; rows sum to 1.
    fn class_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>>;

    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        let scores = self.class_scores(x)?;
        Ok(scores
            .rows()
            .into_iter()
            .map(|row| argmax_tie_lowest(row.as_slice().expect("contiguous row")))
            .collect())
    }
}

impl Classifier for LdaModel {
    fn n_classes(&self) -> usize {
        LdaModel::n_classes(self)
    }

    fn class_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::<f64>::zeros((x.nrows(), self.n_classes()));
        for (i, row) in x.rows().into_iter().enumerate() {
            let delta = self.discriminants(row)?;
            for (k, v) in softmax_slice(&delta).into_iter().enumerate() {
                out[(i, k)] = v;
            }
        }
        Ok(out)
    }
}

impl Classifier for QdaModel {
    fn n_classes(&self) -> usize {
        QdaModel::n_classes(self)
    }

    fn class_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::<f64>::zeros((x.nrows(), self.n_classes()));
        for (i, row) in x.rows().into_iter().enumerate() {
            let delta = self.discriminants(row)?;
            for (k, v) in softmax_slice(&delta).into_iter().enumerate() {
                out[(i, k)] = v;
            }
        }
        Ok(out)
    }
}

impl Classifier for NnModel {
    fn n_classes(&self) -> usize {
        NnModel::n_classes(self)
    }

    fn class_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.forward_batch(x)
    }
}

/// Which of the four methods to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Lda,
    Qda,
    /// Linear logistic regression: the zero-hidden-unit network.
    Lr,
    /// Non-linear network; hidden units default to the feature count.
    Nlr,
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ClassifierKind::Lda => "LDA",
            ClassifierKind::Qda => "QDA",
            ClassifierKind::Lr => "LR",
            ClassifierKind::Nlr => "NLR",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lda" => Ok(Self::Lda),
            "qda" => Ok(Self::Qda),
            "lr" => Ok(Self::Lr),
            "nlr" => Ok(Self::Nlr),
            other => Err(Error::Config(format!("unknown classifier '{other}'"))),
        }
    }
}

/// Full training specification for one classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub discriminant: DiscriminantOptions,
    #[serde(default)]
    pub scg: ScgOptions,
    /// Hidden-unit override for NLR; `None` means one unit per feature.
    #[serde(default)]
    pub hidden_units: Option<usize>,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind) -> Self {
        Self {
            kind,
            discriminant: DiscriminantOptions::default(),
            scg: ScgOptions::default(),
            hidden_units: None,
        }
    }
}

/// A trained model of any of the four kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum TrainedModel {
    Lda(LdaModel),
    Qda(QdaModel),
    Nn(NnModel),
}

impl Classifier for TrainedModel {
    fn n_classes(&self) -> usize {
        match self {
            TrainedModel::Lda(m) => Classifier::n_classes(m),
            TrainedModel::Qda(m) => Classifier::n_classes(m),
            TrainedModel::Nn(m) => Classifier::n_classes(m),
        }
    }

    fn class_scores(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        match self {
            TrainedModel::Lda(m) => m.class_scores(x),
            TrainedModel::Qda(m) => m.class_scores(x),
            TrainedModel::Nn(m) => m.class_scores(x),
        }
    }
}

/// Trains the classifier described by `spec` on labeled rows.
///
/// The seed only matters for the network variants (weight initialization);
/// the discriminant fits are deterministic by themselves.
pub fn train_classifier(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    spec: &ClassifierSpec,
    seed: u64,
) -> Result<TrainedModel> {
    match spec.kind {
        ClassifierKind::Lda => Ok(TrainedModel::Lda(fit_lda_with(x, y, &spec.discriminant)?)),
        ClassifierKind::Qda => Ok(TrainedModel::Qda(fit_qda_with(x, y, &spec.discriminant)?)),
        ClassifierKind::Lr => Ok(TrainedModel::Nn(train_nn(x, y, 0, &spec.scg, seed)?)),
        ClassifierKind::Nlr => {
            let m = spec.hidden_units.unwrap_or_else(|| x.ncols().max(1));
            Ok(TrainedModel::Nn(train_nn(x, y, m, &spec.scg, seed)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn blobs(n: usize, sep: f64, state: &mut u64) -> (Array2<f64>, Vec<usize>) {
        let mut x = Array2::<f64>::zeros((n, 2));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let class = usize::from(i >= n / 2);
            x[(i, 0)] = lcg(state) + if class == 1 { sep } else { -sep };
            x[(i, 1)] = lcg(state);
            y.push(class);
        }
        (x, y)
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax_tie_lowest(&[0.5, 0.5]), 0);
        assert_eq!(argmax_tie_lowest(&[0.1, 0.9, 0.9]), 1);
        assert_eq!(argmax_tie_lowest(&[1.0]), 0);
    }

    #[test]
    fn all_kinds_train_and_score_rows_summing_to_one() {
        let mut state = 4u64;
        let (x, y) = blobs(40, 2.5, &mut state);
        for kind in [
            ClassifierKind::Lda,
            ClassifierKind::Qda,
            ClassifierKind::Lr,
            ClassifierKind::Nlr,
        ] {
            let model = train_classifier(x.view(), &y, &ClassifierSpec::new(kind), 7).unwrap();
            let scores = model.class_scores(x.view()).unwrap();
            assert_eq!(scores.ncols(), 2);
            for row in scores.rows() {
                let sum: f64 = row.sum();
                assert!((sum - 1.0).abs() < 1e-9, "{kind}: row sums to {sum}");
            }
            // well separated blobs: every kind should classify them
            let preds = model.predict(x.view()).unwrap();
            let correct = preds.iter().zip(&y).filter(|(p, t)| p == t).count();
            assert!(correct >= 38, "{kind}: {correct}/40");
        }
    }

    #[test]
    fn scores_preserve_discriminant_argmax() {
        let mut state = 8u64;
        let (x, y) = blobs(30, 1.0, &mut state);
        let model = crate::discriminant::fit_lda(x.view(), &y).unwrap();
        let scores = model.class_scores(x.view()).unwrap();
        for (i, row) in x.rows().into_iter().enumerate() {
            let delta = model.discriminants(row).unwrap();
            assert_eq!(
                argmax_tie_lowest(&delta),
                argmax_tie_lowest(scores.row(i).as_slice().unwrap())
            );
        }
    }
}
