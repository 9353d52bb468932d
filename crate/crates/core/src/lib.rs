//! Bell operators for n qubits with two observables per qubit.
//!
//! The crate builds the general polynomial Bell operator and the
//! Mermin-Klyshko family, computes their exact spectral decomposition into
//! GHZ eigenpairs in closed form, verifies the operator identities relating
//! B_n and its primed partner, and runs the violation numerics: optimized
//! expectation values for pure and mixed states, the psi_N(phi) sweep with
//! its violation threshold, and the three-qubit correlation-tensor bounds.
//!
//! Conventions (fixed once, round-trip tested):
//! - qubit n is the leftmost tensor factor, qubit 1 the last, so a basis
//!   ket stores qubit k's bit at index bit k-1;
//! - coefficient tables and configurations are indexed the same way, and
//!   external bitstrings are written with qubit 1 leftmost;
//! - planar angles are reduced to [0, 2pi); GHZ phases follow the
//!   theta in [0, pi) convention with the real-f seam pinned at theta = pi.

pub mod error;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod optimize;
pub mod spectral;
pub mod state;
pub mod verify;
pub mod violation;

pub use error::{Error, Result};
pub use linalg::{
    expectation, hermitian_eig, kron, pauli, Complex64, ComplexMatrix, ComplexVector, UnitVector3,
    MAX_QUBITS,
};
pub use operator::{
    build_matrix, mk_matrix_recursive, BellCoefficients, BellOperator, LocalFrame,
    MeasurementFrame,
};
pub use spectral::{
    f_omega, full_spectrum, ghz_vector, reflection_operator, theta_lambda, GhzEigenpair, GhzLabel,
    SpectralDecomposition,
};
pub use state::QuantumState;
pub use violation::{
    bound_lower, bound_upper, correlation_tensor, mermin3_from_tensor, optimize_expectation,
    psi_family, s2_exact, s_guess, sweep_phi, table1_states, CorrelationTensor3, OperatorFamily,
    OptimizeConfig, PhiSweep, SweepPoint, ViolationResult,
};
