use thiserror::Error;

/// Errors surfaced by lattice construction, operator algebra and the law-check
/// harness. Structural failures are distinguished from ordinary check failures
/// because they invalidate every downstream identity rather than one deviation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("mismatched lattice configurations: {0}")]
    ConfigMismatch(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown lattice site: {0}")]
    UnknownSite(String),

    #[error("family is not orthogonal: max off-diagonal Gram entry {max_offdiag:.3e}")]
    NonOrthogonal { max_offdiag: f64 },

    #[error("zero-energy mode at momentum index {index}: 1/(2E) weights are undefined")]
    ZeroEnergyMode { index: usize },

    #[error("mass {0} is not on the 1/m_ir grid")]
    MassGrid(String),

    #[error("dense backend dimension {dim} exceeds cap {cap}")]
    DenseCap { dim: u128, cap: u128 },

    #[error("bins do not partition the momentum lattice: {0}")]
    NonPartition(String),

    #[error("structural failure in {context}: {detail}")]
    Structural { context: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
