use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is not one (deviation {deviation:.3e})")]
    TraceNotOne { deviation: f64 },
    #[error("Pauli index out of range: ({0}, {1}, {2}); each index must be in 0..=3")]
    IndexOutOfRange(usize, usize, usize),
    #[error("matrix is not special unitary (unitarity {unitarity:.3e}, det {det:.3e})")]
    NotSpecialUnitary { unitarity: f64, det: f64 },
    #[error("matrix is not a proper rotation (orthogonality {orthogonality:.3e}, det {det:.3e})")]
    NotRotation { orthogonality: f64, det: f64 },
    #[error("invalid flattening axis {0}; expected 1, 2 or 3")]
    InvalidAxis(usize),
    #[error("invalid rank {0}; expected 1..=8")]
    InvalidRank(usize),
    #[error("singular system: {which} (|det| ratio {magnitude:.3e})")]
    SingularSystem { which: String, magnitude: f64 },
    #[error("wrong orbit class: expected {expected}, found {found}")]
    WrongClass { expected: String, found: String },
    #[error("inconsistent invariants: {name} gives negative square {value:.3e}")]
    InconsistentInvariants { name: String, value: f64 },
    #[error("fingerprint is missing invariant {0}")]
    MissingInvariant(String),
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
