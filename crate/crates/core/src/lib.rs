pub mod classifier;
pub mod dataset;
pub mod discriminant;
pub mod error;
pub mod evaluation;
pub mod filter;
pub mod io;
pub mod linalg;
pub mod nn;
pub mod normalize;
pub mod pca;
pub mod scg;
pub mod seed;
pub mod selection;
pub mod synth;

pub use dataset::{
    balance_classes, grouped_split, slice_channel_subtrials, stratified_group_folds,
    ChannelSubtrialDataset, Recording, StimulusLog,
};
pub use classifier::{train_classifier, Classifier, ClassifierKind, ClassifierSpec, TrainedModel};
pub use discriminant::{
    fit_lda, fit_lda_with, fit_qda, fit_qda_with, CovarianceDivisor, DiscriminantOptions,
    GaussianClassParams, LdaModel, QdaModel,
};
pub use error::{Error, Result};
pub use evaluation::{
    accuracy, prepare_dataset, run_experiment, vote_aggregate, BalanceMode, BandpassConfig,
    EvalReport, FeatureMode, PipelineConfig, PreprocessConfig, RepetitionResult,
    RowNormalization,
};
pub use filter::{apply_filter, design_bandpass, Biquad, FilterCoefficients};
pub use nn::{init_network, nll_loss_and_gradient, train_nn, NetworkWeights, NnModel};
pub use normalize::{zscore_normalize, zscore_recording, NormStats};
pub use pca::{fit_pca, PcaModel};
pub use scg::{scg_minimize, ScgDiagnostics, ScgOptions, StopReason};
pub use selection::{
    forward_select, restricted_forward_select, select_components, SelectionOptions,
    SelectionResult,
};
pub use synth::{generate_oddball, NoiseModel, SynthConfig};
