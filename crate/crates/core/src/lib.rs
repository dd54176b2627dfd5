//! Local-unitary classification of three-qubit mixed states.
//!
//! A state is handled through its Bloch tensor: three local vectors, three
//! two-body correlation matrices and the three-body tensor. Local unitaries
//! act on it as a triple of rotations. On top of that sit the polynomial
//! invariant families, canonical orbit points, the equivalence decision and
//! the recovery of a canonical tensor from its invariants.

pub mod canonical;
pub mod correlator;
pub mod error;
pub mod harness;
pub mod invariants;
pub mod io;
pub mod local_action;
pub mod pauli_bloch;
pub mod reconstruction;
pub mod scalar;
pub mod zoo;

pub use canonical::{
    canonicalize, classify, equivalent, equivalent_tensors, CanonicalForm, EquivalenceReport,
    OrbitClass, OrbitKind, Slot, Tolerances, Verdict,
};
pub use correlator::{flatten, gram, kron, refold, triple, Flattening, GramTriple};
pub use error::{Error, Result};
pub use invariants::{
    all_invariants, full_fingerprint, generic_fingerprint, CompareTol, Fingerprint,
};
pub use local_action::{act, adjoint, conjugate, haar_su2, LocalRotation, Su2};
pub use pauli_bloch::{
    decompose, expectation, pauli_string, reconstruct, BlochTensor, Component, DensityMatrix,
    Matrix8, Mode, Tensor3,
};
pub use reconstruction::{
    recover, recover_two_zero, solve_single_zero, ReconstructionTol, RecoveredBlock, Recovery,
    SignStatus, SingleZeroSolution, VandermondeSystem,
};
pub use scalar::Scalar;

pub type BlochTensor64 = BlochTensor<f64>;
pub type BlochTensor32 = BlochTensor<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type LocalRotation64 = LocalRotation<f64>;
pub type Fingerprint64 = Fingerprint<f64>;
pub type CanonicalForm64 = CanonicalForm<f64>;
pub type Recovery64 = Recovery<f64>;
