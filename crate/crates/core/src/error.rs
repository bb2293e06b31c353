use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("symplectic form is not antisymmetric")]
    NotAntisymmetric,
    #[error("symplectic form is degenerate")]
    Degenerate,
    #[error("no symplectic basis: dimension {0} is odd")]
    OddDimension(usize),
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("vectors are not isotropic: sigma({0}, {1}) != 0")]
    NotIsotropic(usize, usize),
    #[error("inconsistent regularity data: {0}")]
    InconsistentRegularity(String),
    #[error("spectral parameter on the imaginary axis (Re z = 0)")]
    ImaginaryParameter,
    #[error("parameters outside the convergence disk: |l0 - l| = {dist} >= |l0| = {radius}")]
    OutsideDisk { dist: f64, radius: f64 },
    #[error("map is not symplectic (defect {0:e})")]
    NotSymplectic(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("quadrature did not converge: estimated error {estimate:e} above {target:e}")]
    Quadrature { estimate: f64, target: f64 },
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("invalid constraint set: {0}")]
    InvalidConstraint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
