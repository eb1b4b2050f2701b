use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: only n = 2 and n = 3 are implemented")]
    UnsupportedDimension(usize),

    #[error("body is not C²₊ at u = {u:?}: tangential Hessian eigenvalue {eigenvalue:e}")]
    NotC2Plus { u: [f64; 3], eigenvalue: f64 },

    #[error("origin is not interior: h({u:?}) = {value:e}")]
    OriginNotInterior { u: [f64; 3], value: f64 },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("matrix is not orthogonal")]
    NotOrthogonal,

    #[error("perturbation amplitude {epsilon} violates curvature positivity; admissible range is |ε| < {bound}")]
    PerturbationTooLarge { epsilon: f64, bound: f64 },

    #[error("p = -n excluded (n = {dim})")]
    ExcludedExponent { dim: usize },

    #[error("invalid weight index: {0}")]
    InvalidIndex(String),

    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),

    #[error("non-finite integrand {value} at node {node} (u = {u:?})")]
    NonFiniteIntegrand { node: usize, u: [f64; 3], value: f64 },

    #[error("generator `{name}` is not finite at ratio {ratio:e}")]
    GeneratorDomain { name: String, ratio: f64 },

    #[error("Rényi divergence of order 1 is the KL divergence; use kl_divergence")]
    RenyiOrderOne,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("no analytic support function is available for the polar of `{0}`")]
    PolarUnavailable(String),

    #[error("rejection envelope {envelope:e} exceeded by target {value:e} at u = {u:?}")]
    EnvelopeViolation { u: [f64; 3], value: f64, envelope: f64 },

    #[error("invalid body file: {0}")]
    BodyFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
