use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace {trace} is not 1")]
    BadTrace { trace: f64 },
    #[error("R_00 = {r00}, expected 1")]
    BadRMatrix { r00: f64 },
    #[error("local operation is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("filter has largest singular value {max_singular_value} > 1")]
    NotAFilter { max_singular_value: f64 },
    #[error("filtering succeeds with probability {probability:e}")]
    ZeroProbability { probability: f64 },
    #[error("amplitudes satisfy a^2 + b^2 = {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("Kraus operators are not complete (deviation {deviation:e})")]
    IncompleteKraus { deviation: f64 },
    #[error("operator is singular (smallest singular value {smallest:e})")]
    Singular { smallest: f64 },
    #[error("matrix is not a proper rotation")]
    NotRotation,
    #[error("reduced state became singular at iteration {iteration}")]
    MarginalSingular { iteration: usize },
    #[error("normal form iteration did not converge after {iterations} iterations (marginal distance {distance:e}, success probability {probability:e})")]
    NoConvergence {
        iterations: usize,
        distance: f64,
        probability: f64,
    },
    #[error("reduced states are not maximally mixed (distance {distance:e})")]
    MarginalsNotMixed { distance: f64 },
    #[error("correlation matrix vanishes; CHSH settings are arbitrary")]
    DegenerateCorrelation,
    #[error("no counts recorded")]
    EmptyCounts,
    #[error("linear inversion system is singular")]
    SingularSystem,
    #[error("all tomography counts are zero")]
    AllZeroCounts,
    #[error("bootstrap failed: only {succeeded} of {resamples} resamples reconstructed")]
    BootstrapFailed { succeeded: usize, resamples: usize },
    #[error("expected {expected} counts, got {got}")]
    CountLength { expected: usize, got: usize },
    #[error("configuration does not match a published configuration")]
    ParameterMismatch,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
