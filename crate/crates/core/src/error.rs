//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by operator construction, spectral evaluation and state
/// handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the input data failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A tensor product would exceed the configured dimension cap.
    #[error("capacity exceeded: dimension {dim} is beyond the {max} cap ({max_qubits} qubits)")]
    Capacity {
        dim: usize,
        max: usize,
        max_qubits: usize,
    },

    /// A matrix expected to be Hermitian is not.
    #[error("matrix is not Hermitian: max |M - M\u{2020}| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A measurement direction leaves the (x, y) plane, so the closed-form
    /// eigensystem does not apply.
    #[error("qubit {qubit}: direction leaves the (x,y) plane (|z| = {z:.3e}); the closed-form spectrum only covers planar frames")]
    NonPlanar { qubit: usize, z: f64 },

    /// The numeric eigensolver did not converge.
    #[error("eigensolver failed to converge within {iterations} iterations")]
    EigenNotConverged { iterations: usize },

    /// A quantity is undefined for the given input (e.g. degenerate leading
    /// eigenvalues in the overlap bound).
    #[error("undefined value: {0}")]
    Undefined(String),

    /// File or stream I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A JSON document could not be parsed or did not match the schema.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// An input file parsed but its contents are unusable.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
