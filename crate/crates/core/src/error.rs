//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A file did not parse as the documented format.
    #[error("parse error: {0}")]
    Parse(String),

    /// A file parsed but violated a structural rule (duplicate channel
    /// names, label outside {0, 1}, non-increasing onsets, ...).
    #[error("schema error: {0}")]
    Schema(String),

    /// A window or onset extends past the available samples.
    #[error("range error: {0}")]
    Range(String),

    /// One of the two classes has no subtrials.
    #[error("empty class: {0}")]
    EmptyClass(String),

    /// A grouped split or fold assignment is impossible at the given sizes.
    #[error("split error: {0}")]
    Split(String),

    /// Invalid bandpass design parameters.
    #[error("filter design error: {0}")]
    Design(String),

    /// Filter and recording sampling rates differ.
    #[error("sampling rate mismatch: {0}")]
    Rate(String),

    /// A row has (numerically) zero variance and cannot be normalized.
    #[error("degenerate row: {0}")]
    DegenerateRow(String),

    /// Too few samples for the requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A principal-component index is out of range or repeated.
    #[error("component index error: {0}")]
    Index(String),

    /// A covariance matrix is singular or too ill-conditioned to factorize.
    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    /// Input dimensionality does not match the fitted model.
    #[error("dimension mismatch: {0}")]
    Dim(String),

    /// A target row is not a valid one-hot encoding.
    #[error("target encoding error: {0}")]
    Target(String),

    /// A non-finite loss or gradient was produced during optimization.
    #[error("numerical failure at iteration {iteration}: {message}")]
    Numerical { iteration: usize, message: String },

    /// A vote group does not contain exactly the expected number of rows.
    #[error("vote group error: {0}")]
    Group(String),

    /// Inconsistent pipeline configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
