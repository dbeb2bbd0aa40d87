//! Experiment orchestration: repeated stratified 80:20 splits, training,
//! per-channel-subtrial scoring, vote aggregation to subtrial decisions,
//! and accuracy reporting.
//!
//! One repetition: (optionally re-balance classes) -> grouped 80:20 split ->
//! per-row normalization -> feature extraction (raw, fixed component list,
//! or cross-validated forward selection) -> classifier training -> scoring
//! of test channel-subtrials -> one majority vote per subtrial. Every
//! statistic (normalization, PCA, selection, classifier parameters) is a
//! function of the training partition only. Repetition `r` derives all of
//! its randomness from the experiment seed and `r`, so repetitions are
//! independent and the whole report is reproducible byte for byte.
//!
//! Classifier failures (a singular covariance on raw features is the
//! canonical case) are recorded per repetition instead of aborting; the
//! report then carries an error tally and no mean accuracy, which the table
//! renderer prints as "-".

use std::collections::{BTreeMap, HashMap};

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{argmax_tie_lowest, train_classifier, Classifier, ClassifierSpec};
use crate::dataset::{balance_classes, grouped_split, slice_channel_subtrials, ChannelSubtrialDataset};
use crate::error::{Error, Result};
use crate::filter::{apply_filter, design_bandpass};
use crate::normalize::{zscore_normalize, zscore_recording};
use crate::pca::fit_pca;
use crate::seed::derive_seed;
use crate::selection::{select_components, SelectionOptions};

/// Bandpass stage settings for the preprocessing step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandpassConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    pub order: usize,
    pub zero_phase: bool,
}

impl Default for BandpassConfig {
    fn default() -> Self {
        Self {
            low_hz: 0.23,
            high_hz: 30.0,
            order: 4,
            zero_phase: true,
        }
    }
}

/// Recording-level preprocessing applied before slicing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    /// `None` skips filtering (data already filtered or intentionally raw).
    pub bandpass: Option<BandpassConfig>,
    /// Z-score each channel over the whole recording before slicing. The
    /// alternative to per-row normalization; scale statistics then come
    /// from the continuous recording, as when normalization precedes
    /// slicing.
    pub continuous_zscore: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            bandpass: Some(BandpassConfig::default()),
            continuous_zscore: false,
        }
    }
}

/// Row-level normalization inside the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RowNormalization {
    /// Z-score every channel-subtrial row independently. Default.
    #[default]
    PerRow,
    /// Leave rows as sliced (e.g. after continuous normalization).
    None,
}

/// When class balancing runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BalanceMode {
    /// Fresh seeded subsample of the majority class in every repetition.
    #[default]
    PerRepetition,
    /// One seeded subsample shared by all repetitions.
    Once,
    /// Use the dataset as given (must already be balanced).
    None,
}

/// Feature extraction mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FeatureMode {
    /// The normalized channel-subtrial rows themselves.
    Raw,
    /// Project onto an explicit list of principal-component indices.
    PcaExplicit { indices: Vec<usize> },
    /// Forward selection over components `0..max_pool` by grouped k-fold CV.
    PcaForwardSelection { max_pool: usize, folds: usize },
    /// Forward selection restricted to the top `top_n` components.
    PcaRestrictedForwardSelection { top_n: usize, folds: usize },
}

/// Complete experiment description. Serializable, and echoed verbatim into
/// the report, so a report file identifies its own provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Column label used by the report table.
    pub label: String,
    pub preprocessing: PreprocessConfig,
    /// Epoch length in seconds.
    pub window_s: f64,
    pub normalization: RowNormalization,
    pub balance: BalanceMode,
    pub features: FeatureMode,
    pub classifier: ClassifierSpec,
    /// Fit one PCA on the whole training partition during selection instead
    /// of refitting per CV fold.
    pub shared_pca_in_selection: bool,
    /// Evaluate only prefixes of the ranked components instead of greedy
    /// search (restricted selection variant).
    pub prefix_mode: bool,
    pub test_fraction: f64,
    pub n_repetitions: usize,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(label: impl Into<String>, features: FeatureMode, classifier: ClassifierSpec) -> Self {
        Self {
            label: label.into(),
            preprocessing: PreprocessConfig::default(),
            window_s: 1.0,
            normalization: RowNormalization::PerRow,
            balance: BalanceMode::PerRepetition,
            features,
            classifier,
            shared_pca_in_selection: false,
            prefix_mode: false,
            test_fraction: 0.2,
            n_repetitions: 20,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.n_repetitions == 0 {
            return Err(Error::Config("need at least one repetition".into()));
        }
        if !(self.window_s > 0.0) {
            return Err(Error::Config("window must be positive".into()));
        }
        match &self.features {
            FeatureMode::PcaExplicit { indices } => {
                if indices.is_empty() {
                    return Err(Error::Config("explicit component list is empty".into()));
                }
                let mut seen = std::collections::HashSet::new();
                if !indices.iter().all(|i| seen.insert(i)) {
                    return Err(Error::Config("explicit component list repeats an index".into()));
                }
            }
            FeatureMode::PcaForwardSelection { max_pool, folds } => {
                if *max_pool == 0 || *folds < 2 {
                    return Err(Error::Config("selection needs max_pool >= 1 and folds >= 2".into()));
                }
            }
            FeatureMode::PcaRestrictedForwardSelection { top_n, folds } => {
                if *top_n == 0 || *folds < 2 {
                    return Err(Error::Config("selection needs top_n >= 1 and folds >= 2".into()));
                }
            }
            FeatureMode::Raw => {}
        }
        self.classifier.scg.validate()
    }
}

/// Applies recording-level preprocessing and slices into channel-subtrials.
pub fn prepare_dataset(
    rec: &crate::dataset::Recording,
    log: &crate::dataset::StimulusLog,
    cfg: &PipelineConfig,
) -> Result<ChannelSubtrialDataset> {
    let mut rec = rec.clone();
    if let Some(bp) = &cfg.preprocessing.bandpass {
        let coeffs = design_bandpass(bp.low_hz, bp.high_hz, bp.order, rec.sampling_rate_hz())?;
        rec = apply_filter(&coeffs, &rec, bp.zero_phase)?;
    }
    if cfg.preprocessing.continuous_zscore {
        rec = zscore_recording(&rec)?;
    }
    slice_channel_subtrials(&rec, log, cfg.window_s)
}

/// One repetition's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub repetition: usize,
    /// Subtrial-level accuracy after voting; absent when the classifier
    /// failed.
    pub accuracy: Option<f64>,
    /// Row-level accuracy before voting, for diagnostics.
    pub channel_accuracy: Option<f64>,
    pub n_test_subtrials: usize,
    /// Component indices used, when a PCA mode was active.
    pub chosen_components: Option<Vec<usize>>,
    /// Group ids that formed the test partition (audit trail).
    pub test_groups: Vec<usize>,
    pub error: Option<String>,
}

/// Aggregate over all repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: PipelineConfig,
    pub repetitions: Vec<RepetitionResult>,
    /// Mean of the per-repetition accuracies; absent when every repetition
    /// failed.
    pub mean_accuracy: Option<f64>,
    pub mean_channel_accuracy: Option<f64>,
    /// Mean number of selected components across successful repetitions.
    pub mean_chosen_count: Option<f64>,
    /// Error message tallies across repetitions, keyed by error kind.
    pub error_counts: BTreeMap<String, usize>,
}

impl EvalReport {
    /// Canonical JSON bytes; identical configs and seeds produce identical
    /// bytes.
    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// Fraction of exact matches between two label sequences.
pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::Dim(format!(
            "{} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Dim("empty prediction list".into()));
    }
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Majority vote across the channel rows of each subtrial.
///
/// Each row votes its argmax class; the majority decides. An even split is
/// broken by the class with the larger summed score across the group's
/// rows, and an exact sum tie falls back to the lower class index. Returns
/// `(group_id, label)` pairs sorted by group id.
pub fn vote_aggregate(
    channel_scores: ArrayView2<'_, f64>,
    group_ids: &[usize],
    channel_count: usize,
) -> Result<Vec<(usize, usize)>> {
    if channel_scores.nrows() != group_ids.len() {
        return Err(Error::Dim(format!(
            "{} score rows vs {} group ids",
            channel_scores.nrows(),
            group_ids.len()
        )));
    }
    if channel_count == 0 {
        return Err(Error::Group("channel count must be positive".into()));
    }
    let k = channel_scores.ncols();
    let mut rows_by_group: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (row, &g) in group_ids.iter().enumerate() {
        rows_by_group.entry(g).or_default().push(row);
    }
    let mut out = Vec::with_capacity(rows_by_group.len());
    for (g, rows) in rows_by_group {
        if rows.len() != channel_count {
            return Err(Error::Group(format!(
                "group {g} has {} rows, expected {channel_count}",
                rows.len()
            )));
        }
        let mut votes = vec![0usize; k];
        let mut sums = vec![0.0f64; k];
        for &row in &rows {
            let scores = channel_scores.row(row);
            let vote = argmax_tie_lowest(scores.as_slice().expect("contiguous"));
            votes[vote] += 1;
            for (c, &s) in scores.iter().enumerate() {
                sums[c] += s;
            }
        }
        let top = *votes.iter().max().expect("non-empty");
        let leaders: Vec<usize> = (0..k).filter(|&c| votes[c] == top).collect();
        let label = if leaders.len() == 1 {
            leaders[0]
        } else {
            // tie: summed score among the tied classes, lower index wins
            // exact equality
            let mut best = leaders[0];
            for &c in &leaders[1..] {
                if sums[c] > sums[best] {
                    best = c;
                }
            }
            best
        };
        out.push((g, label));
    }
    Ok(out)
}

struct RepetitionOutcome {
    result: RepetitionResult,
}

fn run_one_repetition(
    ds: &ChannelSubtrialDataset,
    cfg: &PipelineConfig,
    rep: usize,
) -> Result<RepetitionOutcome> {
    let balanced = match cfg.balance {
        BalanceMode::PerRepetition => balance_classes(ds, derive_seed(cfg.seed, "balance", rep as u64))?,
        BalanceMode::Once => balance_classes(ds, derive_seed(cfg.seed, "balance", 0))?,
        BalanceMode::None => ds.clone(),
    };
    let (train, test) = grouped_split(
        &balanced,
        cfg.test_fraction,
        derive_seed(cfg.seed, "split", rep as u64),
    )?;
    let (train, test) = match cfg.normalization {
        RowNormalization::PerRow => {
            let (tr, _) = zscore_normalize(&train)?;
            let (te, _) = zscore_normalize(&test)?;
            (tr, te)
        }
        RowNormalization::None => (train, test),
    };

    let mut chosen: Option<Vec<usize>> = None;
    let test_groups: Vec<usize> = test.groups().iter().map(|&(g, _)| g).collect();
    let n_test_subtrials = test.n_subtrials();

    let features: Result<(Array2<f64>, Array2<f64>)> = (|| {
        match &cfg.features {
            FeatureMode::Raw => Ok((train.x().clone(), test.x().clone())),
            FeatureMode::PcaExplicit { indices } => {
                let pca = fit_pca(train.x().view())?;
                let tr = pca.project(train.x().view(), indices)?;
                let te = pca.project(test.x().view(), indices)?;
                chosen = Some(indices.clone());
                Ok((tr, te))
            }
            FeatureMode::PcaForwardSelection { max_pool, folds }
            | FeatureMode::PcaRestrictedForwardSelection {
                top_n: max_pool,
                folds,
            } => {
                let opts = SelectionOptions {
                    pool: *max_pool,
                    folds: *folds,
                    shared_pca: cfg.shared_pca_in_selection,
                    prefix_mode: cfg.prefix_mode,
                };
                let sel = select_components(
                    &train,
                    &cfg.classifier,
                    &opts,
                    derive_seed(cfg.seed, "selection", rep as u64),
                )?;
                let pca = fit_pca(train.x().view())?;
                let tr = pca.project(train.x().view(), &sel.chosen)?;
                let te = pca.project(test.x().view(), &sel.chosen)?;
                chosen = Some(sel.chosen);
                Ok((tr, te))
            }
        }
    })();
    let (x_train, x_test) = match features {
        Ok(pair) => pair,
        Err(e @ (Error::SingularCovariance(_) | Error::Numerical { .. })) => {
            return Ok(RepetitionOutcome {
                result: RepetitionResult {
                    repetition: rep,
                    accuracy: None,
                    channel_accuracy: None,
                    n_test_subtrials,
                    chosen_components: None,
                    test_groups,
                    error: Some(error_tag(&e)),
                },
            });
        }
        Err(e) => return Err(e),
    };

    let model = match train_classifier(
        x_train.view(),
        train.y(),
        &cfg.classifier,
        derive_seed(cfg.seed, "classifier", rep as u64),
    ) {
        Ok(m) => m,
        Err(e @ (Error::SingularCovariance(_) | Error::Numerical { .. })) => {
            return Ok(RepetitionOutcome {
                result: RepetitionResult {
                    repetition: rep,
                    accuracy: None,
                    channel_accuracy: None,
                    n_test_subtrials,
                    chosen_components: chosen,
                    test_groups,
                    error: Some(error_tag(&e)),
                },
            });
        }
        Err(e) => return Err(e),
    };

    let scores = model.class_scores(x_test.view())?;
    let row_predictions: Vec<usize> = scores
        .rows()
        .into_iter()
        .map(|r| argmax_tie_lowest(r.as_slice().expect("contiguous")))
        .collect();
    let channel_accuracy = accuracy(&row_predictions, test.y())?;

    let votes = vote_aggregate(scores.view(), test.group_ids(), test.n_channels())?;
    let truth: HashMap<usize, usize> = test.groups().into_iter().collect();
    let (pred, want): (Vec<usize>, Vec<usize>) = votes
        .iter()
        .map(|&(g, label)| (label, truth[&g]))
        .unzip();
    let subtrial_accuracy = accuracy(&pred, &want)?;

    Ok(RepetitionOutcome {
        result: RepetitionResult {
            repetition: rep,
            accuracy: Some(subtrial_accuracy),
            channel_accuracy: Some(channel_accuracy),
            n_test_subtrials,
            chosen_components: chosen,
            test_groups,
            error: None,
        },
    })
}

fn error_tag(e: &Error) -> String {
    match e {
        Error::SingularCovariance(_) => "SingularCovariance".into(),
        Error::Numerical { .. } => "Numerical".into(),
        other => format!("{other}"),
    }
}

/// Runs the full repeated-split experiment.
///
/// Repetitions execute independently (in parallel when a rayon pool is
/// configured with more than one thread) and are reduced in index order, so
/// the report does not depend on scheduling.
pub fn run_experiment(ds: &ChannelSubtrialDataset, cfg: &PipelineConfig) -> Result<EvalReport> {
    cfg.validate()?;
    if cfg.balance == BalanceMode::None {
        let groups = ds.groups();
        let targets = groups.iter().filter(|&&(_, l)| l == 1).count();
        if targets * 2 != groups.len() {
            return Err(Error::Config(
                "dataset is unbalanced and balancing is disabled".into(),
            ));
        }
    }
    let results: Result<Vec<RepetitionOutcome>> = (0..cfg.n_repetitions)
        .into_par_iter()
        .map(|rep| run_one_repetition(ds, cfg, rep))
        .collect();
    let repetitions: Vec<RepetitionResult> = results?.into_iter().map(|o| o.result).collect();

    let accuracies: Vec<f64> = repetitions.iter().filter_map(|r| r.accuracy).collect();
    let channel_accuracies: Vec<f64> =
        repetitions.iter().filter_map(|r| r.channel_accuracy).collect();
    let chosen_counts: Vec<f64> = repetitions
        .iter()
        .filter(|r| r.error.is_none())
        .filter_map(|r| r.chosen_components.as_ref().map(|c| c.len() as f64))
        .collect();
    let mean = |v: &[f64]| {
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    let mut error_counts = BTreeMap::new();
    for r in &repetitions {
        if let Some(tag) = &r.error {
            *error_counts.entry(tag.clone()).or_insert(0) += 1;
        }
    }
    Ok(EvalReport {
        config: cfg.clone(),
        mean_accuracy: mean(&accuracies),
        mean_channel_accuracy: mean(&channel_accuracies),
        mean_chosen_count: mean(&chosen_counts),
        repetitions,
        error_counts,
    })
}
