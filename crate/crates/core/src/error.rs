use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value at t = {t}")]
    Evaluation { t: f64 },
    #[error("quadrature tolerance not met: estimate {estimate}, error bound {error_bound}")]
    ToleranceNotMet { estimate: f64, error_bound: f64 },
    #[error("vector field vanishes at t = {t}")]
    SingularField { t: f64 },
    #[error("phi'(0) = {slope}; the dual field is singular on the core circle")]
    SingularCore { slope: f64 },
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("boundary jets have Wronskians of opposite sign ({left} vs {right}); no Lutz extension exists")]
    Unsewable { left: f64, right: f64 },
    #[error("boundary jet has zero magnitude")]
    DegenerateJet,
    #[error("matrix has determinant {det}, not a torus automorphism")]
    NotTorusAutomorphism { det: i64 },
    #[error("({p}, {q}) is not coprime, the curve is a link")]
    NotAKnot { p: i64, q: i64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("epsilon {epsilon} times max speed {max_speed} reaches a full turn")]
    EpsilonTooLarge { epsilon: f64, max_speed: f64 },
    #[error("sampling band too narrow at t = {t}")]
    SamplingBand { t: f64 },
    #[error("assembly is incomplete: {0}")]
    IncompleteAssembly(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
