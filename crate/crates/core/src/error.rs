use thiserror::Error;

#[derive(Debug, Error)]
pub enum FsiError {
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("factorization failed: pivot {value:e} at row {row} of {n}")]
    Factorization { row: usize, n: usize, value: f64 },
    #[error("blow-up detected at coarse step {step} (t = {time}): {reason}")]
    BlowUp { step: usize, time: f64, reason: String },
    #[error("meshes are not nested: {0}")]
    NotNested(String),
    #[error("reference file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = FsiError> = std::result::Result<T, E>;
