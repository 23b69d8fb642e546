use alloc::string::String;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid constellation parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate constellation: symbols {0} and {1} coincide")]
    DegenerateGeometry(usize, usize),
    #[error("SNR must be finite, got {0}")]
    NonFiniteSnr(f64),
    #[error("code rate {0} is outside (0, 1)")]
    InvalidCodeRate(f64),
    #[error("target rate {target} bits/symbol is unreachable (stream carries {bits} bits)")]
    UnreachableRate { target: f64, bits: u32 },
    #[error("malformed modcod entry: {0}")]
    MalformedModCod(String),
    #[error("duplicate modcod {0}")]
    DuplicateModCod(String),
    #[error("modcod table is empty")]
    EmptyTable,
    #[error("invalid antenna model: {0}")]
    InvalidAntenna(String),
    #[error("off-axis angle {0} deg is outside the main lobe")]
    OutsideMainLobe(f64),
    #[error("invalid weather CDF: {0}")]
    InvalidWeatherCdf(String),
    #[error("rate vectors have mixed supports")]
    MixedSupports,
    #[error("empty beam: no receiver can decode any modcod")]
    EmptyBeam,
    #[error("invalid linear program: {0}")]
    InvalidProblem(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),
    #[error("invalid rate weights: {0}")]
    InvalidWeights(String),
    #[error("invalid rates: {0}")]
    InvalidRates(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = core::result::Result<T, Error>;
