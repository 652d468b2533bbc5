use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lattice {nx}x{ny} is too small: both dimensions must be at least 2")]
    LatticeTooSmall { nx: usize, ny: usize },

    #[error("site index {site} out of range ({n_sites} sites)")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("plaquette index {index} out of range ({count} plaquettes)")]
    PlaquetteOutOfRange { index: usize, count: usize },

    #[error("weight {k} out of range for {n} plaquettes")]
    WeightOutOfRange { k: usize, n: usize },

    #[error("configuration covers {got} plaquettes but the geometry has {expected}")]
    ConfigLength { expected: usize, got: usize },

    #[error("excitation base configuration does not match the configuration")]
    ExcitationMismatch,

    #[error("{n_sites} sites exceed the Hilbert cap of {cap} sites")]
    HilbertCap { n_sites: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("state norm {norm} is not 1")]
    NotNormalized { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tol:e}")]
    QuadratureNonConvergence { estimate: f64, tol: f64 },

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("time {t} is not on the sample grid")]
    TimeNotOnGrid { t: f64 },

    #[error("time grid must start at 0 and be strictly increasing")]
    BadTimeGrid,

    #[error("need at least {needed} non-singular samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("operator basis does not match the density matrix basis")]
    BasisMismatch,

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("basis is not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("norm drift {drift:e} exceeds the accepted bound {bound:e}")]
    NormDrift { drift: f64, bound: f64 },

    #[error("cannot parse configuration bitmask {0:?}")]
    ParseConfig(String),
}
