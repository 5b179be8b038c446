use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("modulus must be greater than 1, got {0}")]
    Modulus(u64),

    #[error("multiplier {r} is not invertible modulo {n} (gcd {gcd})")]
    NotCoprime { r: u64, n: u64, gcd: u64 },

    #[error("multiplier must be greater than 1, got {0}")]
    Multiplier(u64),

    #[error("generator list is empty")]
    NoGenerators,

    #[error("map is not a bijection on Z/{0}Z")]
    NotBijective(u64),

    #[error("malformed graph: {0}")]
    Graph(String),

    #[error("graph has {n} vertices, dense eigensolve cap is {cap}")]
    AboveCap { n: usize, cap: usize },

    #[error("directed graph: symmetrize it first")]
    Directed,

    #[error("total variation did not drop below {eps} within {steps} steps (bipartite or disconnected?)")]
    NoConvergence { eps: f64, steps: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid sequencing scheme: {0}")]
    Scheme(String),

    #[error("stream of {len} bytes is below the {min}-byte minimum")]
    UndersizedStream { len: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, LabError>;
