//! Pure and mixed n-qubit quantum states.
//!
//! Basis convention: qubit 1 occupies the least significant bit of the basis
//! index, matching the operator layout where qubit n is the leftmost tensor
//! factor (see [`crate::operator`]). The helper [`basis_index_from_bits`]
//! converts from the human-readable bitstring order (qubit 1 leftmost).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, ComplexVector};

/// Normalization tolerance for state construction.
pub const STATE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(ComplexVector),
    Mixed(ComplexMatrix),
}

/// An n-qubit state: a normalized state vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    repr: Repr,
}

impl QuantumState {
    /// Wraps a normalized pure state vector.
    pub fn pure(n: usize, amplitudes: ComplexVector) -> Result<Self> {
        let dim = 1usize << n;
        if amplitudes.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: amplitudes.dim(),
                right: dim,
            });
        }
        let norm_err = (amplitudes.norm_squared() - 1.0).abs();
        if norm_err > STATE_NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "pure state is not normalized: | |psi|^2 - 1 | = {norm_err:.3e}"
            )));
        }
        Ok(Self {
            n,
            repr: Repr::Pure(amplitudes),
        })
    }

    /// Normalizes the amplitudes first, returning the state and the
    /// normalization defect of the input.
    pub fn pure_renormalized(n: usize, amplitudes: ComplexVector) -> Result<(Self, f64)> {
        let defect = (amplitudes.norm_squared() - 1.0).abs();
        let state = Self::pure(n, amplitudes.normalized()?)?;
        Ok((state, defect))
    }

    /// Wraps a density matrix: Hermitian, unit trace, positive semidefinite
    /// up to -1e-10 on the spectrum.
    pub fn mixed(n: usize, rho: ComplexMatrix) -> Result<Self> {
        let dim = 1usize << n;
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: rho.dim(),
                right: dim,
            });
        }
        let dev = rho.hermiticity_deviation();
        if dev > STATE_NORM_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_NORM_TOL || tr.im.abs() > STATE_NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix trace is {tr}, not 1"
            )));
        }
        let (eigs, _) = hermitian_eig(&rho)?;
        if let Some(min) = eigs.last() {
            if *min < -1e-10 {
                return Err(Error::InvalidInput(format!(
                    "density matrix has a negative eigenvalue: {min:.3e}"
                )));
            }
        }
        Ok(Self {
            n,
            repr: Repr::Mixed(rho),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    /// The amplitude vector, if the state is pure.
    pub fn pure_vector(&self) -> Option<&ComplexVector> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix of the state (|psi><psi| for pure states).
    pub fn density_matrix(&self) -> ComplexMatrix {
        match &self.repr {
            Repr::Pure(v) => v.outer(v),
            Repr::Mixed(rho) => rho.clone(),
        }
    }

    /// Maximally mixed state 1/2^n.
    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        let rho = ComplexMatrix::identity(dim).scale(Complex::new(1.0 / dim as f64, 0.0));
        Self {
            n,
            repr: Repr::Mixed(rho),
        }
    }
}

/// Basis index of the computational ket written as a bitstring with qubit 1
/// leftmost: `bits[k-1]` is the state of qubit k.
pub fn basis_index_from_bits(bits: &[u8]) -> usize {
    bits.iter()
        .enumerate()
        .map(|(k, &b)| (b as usize & 1) << k)
        .sum()
}

/// Pure state from (bitstring, amplitude) pairs; bitstrings use qubit 1
/// leftmost.
pub fn pure_from_kets(n: usize, kets: &[(&str, Complex<f64>)]) -> Result<QuantumState> {
    let mut v = ComplexVector::zeros(1 << n);
    for (bits, amp) in kets {
        if bits.len() != n || bits.bytes().any(|b| b != b'0' && b != b'1') {
            return Err(Error::InvalidInput(format!(
                "bad basis bitstring {bits:?} for n = {n}"
            )));
        }
        let digits: Vec<u8> = bits.bytes().map(|b| b - b'0').collect();
        let idx = basis_index_from_bits(&digits);
        v.set(idx, v.get(idx) + amp);
    }
    QuantumState::pure(n, v.normalized()?)
}
