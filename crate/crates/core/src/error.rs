use crate::gwi::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum TautError {
    /// A computation needs relations in an ambient the engine cannot generate.
    #[error("inductive data missing for (g,n,k) = ({g},{n},{k})")]
    InductiveDataMissing { g: i64, n: usize, k: i64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid graph {graph}: {reason}")]
    InvalidGraph { graph: String, reason: String },

    #[error("label {0} is already in use")]
    LabelCollision(u32),

    #[error("label {0} does not occur in the graph")]
    UnknownLabel(u32),

    #[error("terms live in different ambients: {0} and {1}")]
    MixedAmbients(String, String),

    #[error("invalid ambient (g,n,k) = ({g},{n},{k})")]
    InvalidAmbient { g: i64, n: usize, k: i64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("registry file {path}: {reason}")]
    Registry { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TautError>;
