use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are grouped by the kind of caller mistake (or numerical failure)
/// they report; the CLI maps them onto stable exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty request: {0}")]
    EmptyRequest(&'static str),

    #[error("insufficient coefficients: need {needed}, got {available}")]
    Length { needed: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("resource cap exceeded: required truncation exceeds cap {cap}")]
    ResourceCap { cap: u64 },

    #[error("undefined estimator: {0}")]
    UndefinedEstimator(&'static str),

    #[error("kernel inconsistency: smallest eigenvalue {min_eigenvalue:e} below tolerance {tolerance:e}")]
    KernelInconsistency { min_eigenvalue: f64, tolerance: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("discretization too coarse: {0}")]
    DiscretizationTooCoarse(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("alignment: no sample at image point {0}")]
    Alignment(String),

    #[error("function vanishes on the region boundary near {re}+{im}i")]
    BoundaryZero { re: f64, im: f64 },

    #[error("phase tracking did not converge within depth cap {0}")]
    NonConvergence(u32),

    #[error("could not resolve boundary after {0} perturbations")]
    UnresolvableBoundary(u32),

    #[error("coverage: {0}")]
    Coverage(String),

    #[error("pairing: {0}")]
    Pairing(String),
}

pub type Result<T> = std::result::Result<T, Error>;
