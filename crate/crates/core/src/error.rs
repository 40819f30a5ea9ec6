use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // Parsing.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("non-integer exponent `{text}` at offset {offset}")]
    NonIntegerExponent { text: String, offset: usize },

    // Evaluation and physical setup.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0}")]
    InvalidContext(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    // Potential analysis.
    #[error("not a double well: {0}")]
    NotDoubleWell(String),
    #[error("asymmetric potential: V({q}) = {left} but V(-{q}) = {right}")]
    AsymmetricPotential { q: f64, left: f64, right: f64 },
    #[error("multiple barriers: {0}")]
    MultipleBarriers(String),

    // Numerics.
    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {levels} levels")]
    NoConvergence {
        value: f64,
        error: f64,
        levels: usize,
    },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root finder did not converge on [{lo}, {hi}]")]
    RootNoConvergence { lo: f64, hi: f64 },

    // Semiclassical chain.
    #[error("energy {energy} outside the admissible range ({lo}, {hi})")]
    EOutOfRange { energy: f64, lo: f64, hi: f64 },
    #[error("matching point Q = {q_match} lies outside the well (a = {a}); not semiclassical")]
    MatchPointOutsideWell { q_match: f64, a: f64 },
    #[error("barrier too low: hbar*omega/2 = {zero_point} >= V_max = {v_max}")]
    BarrierTooLow { zero_point: f64, v_max: f64 },

    // Oracle.
    #[error("box too small: {0}")]
    BoxTooSmall(String),
    #[error("no separation: e1 - e0 = {delta:e} is below the noise floor {floor:e}")]
    NoSeparation { delta: f64, floor: f64 },
    #[error("epsilon samples are not converging: {0:?}")]
    NotConverging(Vec<f64>),
}

impl Error {
    /// Whether the error stems from the user's input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownFunction { .. }
                | Error::NonIntegerExponent { .. }
                | Error::InvalidContext(_)
                | Error::InvalidConfig(_)
                | Error::NotDoubleWell(_)
                | Error::AsymmetricPotential { .. }
                | Error::MultipleBarriers(_)
                | Error::EOutOfRange { .. }
                | Error::MatchPointOutsideWell { .. }
                | Error::BarrierTooLow { .. }
                | Error::BoxTooSmall(_)
        )
    }

    /// Short machine-readable name of the failed check.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownFunction { .. } => "UnknownFunction",
            Error::NonIntegerExponent { .. } => "NonIntegerExponent",
            Error::Domain(_) => "DomainError",
            Error::InvalidContext(_) => "InvalidContext",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NotDoubleWell(_) => "NotDoubleWell",
            Error::AsymmetricPotential { .. } => "AsymmetricPotential",
            Error::MultipleBarriers(_) => "MultipleBarriers",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NonFiniteSample { .. } => "NonFiniteSample",
            Error::NoBracket { .. } => "NoBracket",
            Error::RootNoConvergence { .. } => "NoConvergence",
            Error::EOutOfRange { .. } => "EOutOfRange",
            Error::MatchPointOutsideWell { .. } => "MatchPointOutsideWell",
            Error::BarrierTooLow { .. } => "BarrierTooLow",
            Error::BoxTooSmall(_) => "BoxTooSmall",
            Error::NoSeparation { .. } => "NoSeparation",
            Error::NotConverging(_) => "NotConverging",
        }
    }
}
