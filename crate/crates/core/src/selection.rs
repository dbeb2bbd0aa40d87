//! Cross-validated forward selection of principal components.
//!
//! The greedy loop evaluates, at every step, each not-yet-chosen component
//! index from the candidate pool by grouped, stratified k-fold CV on the
//! training partition: project fold-train and fold-validation rows onto the
//! tentative component set, train the classifier, vote per subtrial, and
//! pool the validation accuracy over folds. The best candidate joins the
//! set (ties go to the lower index, which favors higher-variance
//! components). The loop runs to pool exhaustion and the result is the
//! shortest prefix of the greedy path that attains the maximum validation
//! accuracy — running to exhaustion avoids premature stops on noisy
//! validation curves.
//!
//! By default PCA is refit inside every fold on that fold's training rows
//! only, so no validation row influences the basis; `shared_pca` relaxes
//! this to one fit on the whole training partition. `prefix_mode` skips the
//! greedy search and evaluates only prefixes of the ranked components.
//!
//! Folds are fixed once per selection run, so all candidates at all steps
//! compete on identical splits. The full variant scans components
//! `0..max_pool`; the restricted variant is the same search over the top
//! `top_n` components by singular value — identical machinery, different
//! pool bound.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::classifier::{train_classifier, Classifier, ClassifierSpec};
use crate::dataset::{stratified_group_folds, ChannelSubtrialDataset};
use crate::error::{Error, Result};
use crate::pca::fit_pca;
use crate::seed::derive_seed;

/// Search-space and protocol options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionOptions {
    /// Candidate pool: component indices `0..pool`.
    pub pool: usize,
    pub folds: usize,
    /// Fit PCA once on the whole training partition instead of per fold.
    pub shared_pca: bool,
    /// Evaluate prefixes of the ranked ordering instead of greedy search.
    pub prefix_mode: bool,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self {
            pool: 50,
            folds: 3,
            shared_pca: false,
            prefix_mode: false,
        }
    }
}

/// Outcome of one selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// The selected component indices: the best prefix of `path`.
    pub chosen: Vec<usize>,
    /// Greedy path over the full pool, in pick order.
    pub path: Vec<usize>,
    /// Best validation accuracy recorded at each greedy step.
    pub step_accuracies: Vec<f64>,
    /// Pool size actually searched (may be clamped by the per-fold rank).
    pub pool: usize,
    pub folds: usize,
    /// Classifier specification the search optimized for.
    pub classifier: ClassifierSpec,
}

struct FoldData {
    train_proj: Array2<f64>,
    train_y: Vec<usize>,
    val_proj: Array2<f64>,
    val_groups: Vec<usize>,
    val_truth: std::collections::HashMap<usize, usize>,
    n_channels: usize,
}

fn columns_subset(m: &Array2<f64>, indices: &[usize]) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros((m.nrows(), indices.len()));
    for (j, &idx) in indices.iter().enumerate() {
        out.column_mut(j).assign(&m.column(idx));
    }
    out
}

/// Counts correct voted subtrials over all folds for one component set.
fn cv_correct(
    folds: &[FoldData],
    indices: &[usize],
    spec: &ClassifierSpec,
    seed: u64,
) -> Result<(usize, usize)> {
    let mut correct = 0;
    let mut total = 0;
    for (fold_idx, fold) in folds.iter().enumerate() {
        let x_train = columns_subset(&fold.train_proj, indices);
        let x_val = columns_subset(&fold.val_proj, indices);
        let model = train_classifier(
            x_train.view(),
            &fold.train_y,
            spec,
            derive_seed(seed, "selection-train", fold_idx as u64),
        )?;
        let scores = model.class_scores(x_val.view())?;
        let votes = crate::evaluation::vote_aggregate(
            scores.view(),
            &fold.val_groups,
            fold.n_channels,
        )?;
        for (g, label) in votes {
            total += 1;
            if fold.val_truth[&g] == label {
                correct += 1;
            }
        }
    }
    Ok((correct, total))
}

/// Core engine shared by the full and restricted variants.
pub fn select_components(
    train: &ChannelSubtrialDataset,
    classifier: &ClassifierSpec,
    opts: &SelectionOptions,
    seed: u64,
) -> Result<SelectionResult> {
    if opts.pool == 0 {
        return Err(Error::Config("candidate pool is empty".into()));
    }
    let fold_sets = stratified_group_folds(train, opts.folds, derive_seed(seed, "selection-folds", 0))?;

    let shared = if opts.shared_pca {
        Some(fit_pca(train.x().view())?)
    } else {
        None
    };

    let mut pool = opts.pool;
    let mut folds = Vec::with_capacity(fold_sets.len());
    for (train_groups, val_groups) in &fold_sets {
        let fold_train = train.filter_groups(train_groups)?;
        let fold_val = train.filter_groups(val_groups)?;
        let pca_owned;
        let pca = match &shared {
            Some(p) => p,
            None => {
                pca_owned = fit_pca(fold_train.x().view())?;
                &pca_owned
            }
        };
        pool = pool.min(pca.n_components());
        let train_proj = pca.project_leading(fold_train.x().view(), pool.min(pca.n_components()))?;
        let val_proj = pca.project_leading(fold_val.x().view(), pool.min(pca.n_components()))?;
        folds.push(FoldData {
            train_proj,
            train_y: fold_train.y().to_vec(),
            val_proj,
            val_groups: fold_val.group_ids().to_vec(),
            val_truth: fold_val.groups().into_iter().collect(),
            n_channels: fold_val.n_channels(),
        });
    }
    // A later fold may have clamped the pool below an earlier projection
    // width; trim so every fold exposes exactly `pool` columns.
    for fold in &mut folds {
        if fold.train_proj.ncols() > pool {
            fold.train_proj = columns_subset(&fold.train_proj, &(0..pool).collect::<Vec<_>>());
            fold.val_proj = columns_subset(&fold.val_proj, &(0..pool).collect::<Vec<_>>());
        }
    }

    let mut path: Vec<usize> = Vec::with_capacity(pool);
    let mut step_accuracies: Vec<f64> = Vec::with_capacity(pool);
    if opts.prefix_mode {
        for end in 0..pool {
            path.push(end);
            let (correct, total) = cv_correct(&folds, &path, classifier, seed)?;
            step_accuracies.push(correct as f64 / total as f64);
        }
    } else {
        let mut remaining: Vec<usize> = (0..pool).collect();
        while !remaining.is_empty() {
            let mut best: Option<(usize, usize, usize)> = None; // (correct, total, candidate)
            let mut trial = path.clone();
            for &candidate in &remaining {
                trial.push(candidate);
                let (correct, total) = cv_correct(&folds, &trial, classifier, seed)?;
                trial.pop();
                let better = match best {
                    None => true,
                    // strict improvement only: earlier (lower) candidate
                    // index wins ties because `remaining` is ascending
                    Some((bc, bt, _)) => correct * bt > bc * total,
                };
                if better {
                    best = Some((correct, total, candidate));
                }
            }
            let (correct, total, picked) = best.expect("non-empty candidate set");
            path.push(picked);
            remaining.retain(|&c| c != picked);
            step_accuracies.push(correct as f64 / total as f64);
        }
    }

    // Shortest prefix attaining the maximum validation accuracy.
    let mut best_len = 1;
    for (i, &acc) in step_accuracies.iter().enumerate() {
        if acc > step_accuracies[best_len - 1] {
            best_len = i + 1;
        }
    }
    Ok(SelectionResult {
        chosen: path[..best_len].to_vec(),
        path,
        step_accuracies,
        pool,
        folds: opts.folds,
        classifier: classifier.clone(),
    })
}

/// Forward selection scanning all components up to `max_pool`.
pub fn forward_select(
    train: &ChannelSubtrialDataset,
    classifier: &ClassifierSpec,
    max_pool: usize,
    folds: usize,
    seed: u64,
) -> Result<SelectionResult> {
    select_components(
        train,
        classifier,
        &SelectionOptions {
            pool: max_pool,
            folds,
            ..Default::default()
        },
        seed,
    )
}

/// Forward selection restricted to the top `top_n` components by singular
/// value.
pub fn restricted_forward_select(
    train: &ChannelSubtrialDataset,
    classifier: &ClassifierSpec,
    top_n: usize,
    folds: usize,
    seed: u64,
) -> Result<SelectionResult> {
    select_components(
        train,
        classifier,
        &SelectionOptions {
            pool: top_n,
            folds,
            ..Default::default()
        },
        seed,
    )
}
