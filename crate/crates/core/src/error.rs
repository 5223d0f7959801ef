use thiserror::Error;

/// Failures raised by state construction and the numerical experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotUnity { trace: f64 },
    #[error("eigenvalue {value:e} is below the positivity floor")]
    NegativeEigenvalue { value: f64 },
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("bipartition requires both factors of dimension >= 2, got {dim_s}x{dim_r}")]
    InvalidLayout { dim_s: usize, dim_r: usize },
    #[error("parameter `{name}` out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,
    #[error("input is not a product state (mutual information {mutual_information:e})")]
    NotProduct { mutual_information: f64 },
    #[error("input is a product state (mutual information {mutual_information:e})")]
    ProductInput { mutual_information: f64 },
    #[error("joint dimension {required} exceeds the cap {cap}")]
    JointDimensionCap { required: usize, cap: usize },
    #[error("transcript carries no retained joint state; run in joint mode")]
    MissingJointState,
    #[error("effective temperature of {subsystem} undefined: entropy change {entropy_change:e}")]
    UndefinedTemperature { subsystem: &'static str, entropy_change: f64 },
    #[error("outcome ({n}, {m}) occurs forward but has zero backward probability")]
    ImpossibleEvent { n: usize, m: usize },
    #[error("trajectory has {len} points, at least {min} required")]
    TrajectoryTooShort { len: usize, min: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
