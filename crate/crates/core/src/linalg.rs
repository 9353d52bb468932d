//! Dense complex linear algebra for n-qubit systems.
//!
//! Vectors, square matrices, Kronecker products, Pauli operators on arbitrary
//! Bloch directions, and a numeric Hermitian eigendecomposition. The numeric
//! eigensolver is the independent oracle against which the closed-form GHZ
//! spectrum of [`crate::spectral`] is checked, so nothing in this crate calls
//! it implicitly.
//!
//! Everything is dense: the hard cap is [`MAX_QUBITS`] = 12 (4096 x 4096),
//! far beyond what the desk-scale numerics need.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::state::QuantumState;

pub type Complex64 = Complex<f64>;

/// Hard cap on the number of qubits for dense operators.
pub const MAX_QUBITS: usize = 12;
/// Matrix dimension corresponding to [`MAX_QUBITS`].
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

/// Hermiticity tolerance used when validating operator inputs.
pub const HERMITICITY_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex::new(1.0, 0.0);

fn is_power_of_two(d: usize) -> bool {
    d != 0 && d & (d - 1) == 0
}

/// A point on the unit sphere: a measurement direction.
///
/// Construction validates unit norm to 1e-12, so a value of this type can be
/// fed to [`pauli`] without further checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    /// Unit-norm tolerance for construction.
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm_sq = x * x + y * y + z * z;
        if (norm_sq - 1.0).abs() > 3.0 * Self::NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "direction ({x}, {y}, {z}) is not unit-norm: |v|^2 = {norm_sq}"
            )));
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-14 {
            return Err(Error::InvalidInput(
                "cannot normalize a (near-)zero vector".into(),
            ));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// The in-plane direction (cos a, sin a, 0).
    pub fn planar(angle: f64) -> Self {
        Self {
            x: angle.cos(),
            y: angle.sin(),
            z: 0.0,
        }
    }

    /// Spherical parametrization (sin t cos p, sin t sin p, cos t).
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Cross product; not unit-norm in general.
    pub fn cross(&self, other: &Self) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// Angle of the projection onto the (x, y) plane, in [0, 2pi).
    pub fn planar_angle(&self) -> f64 {
        crate::operator::reduce_angle(self.y.atan2(self.x))
    }
}

/// Dense complex vector of a 2^n-dimensional qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![ZERO; dim],
        }
    }

    /// Computational basis state |index> of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut data = vec![ZERO; dim];
        data[index] = ONE;
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, value: Complex64) {
        self.data[i] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm_squared(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Returns a normalized copy, or an error for a near-zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::InvalidInput(
                "cannot normalize a (near-)zero vector".into(),
            ));
        }
        Ok(self.scale(Complex::new(1.0 / n, 0.0)))
    }

    /// Inner product <self|other> (conjugate-linear in self).
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Outer product |self><other|.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        assert_eq!(self.dim(), other.dim(), "outer product needs equal dims");
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, self.data[i] * other.data[j].conj());
            }
        }
        m
    }
}

/// Dense square complex matrix on a 2^n-dimensional space, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds from row-major data. The dimension must be a power of two; all
    /// operators in this crate live on qubit registers.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Self {
        assert!(is_power_of_two(dim), "dimension {dim} is not a power of two");
        assert_eq!(data.len(), dim * dim, "data length must be dim^2");
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(is_power_of_two(dim), "dimension {dim} is not a power of two");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// 2x2 matrix from its four entries, row-major.
    pub fn two_by_two(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self {
            dim: 2,
            data: vec![a, b, c, d],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix addition dims differ");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix subtraction dims differ");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix product dims differ");
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                let dst = &mut out[i * d..(i + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: d, data: out }
    }

    pub fn matvec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim, v.dim(), "matrix-vector dims differ");
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for i in 0..d {
            let row = &self.data[i * d..(i + 1) * d];
            out[i] = row.iter().zip(v.as_slice()).map(|(a, b)| a * b).sum();
        }
        ComplexVector::new(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self { dim: d, data: out }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of self - other.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "comparison dims differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from M = M-adjoint.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                let dev = (self.data[i * d + j] - self.data[j * d + i].conj()).norm();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Kronecker product self (x) other, with the configured capacity cap.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        kron(self, other)
    }
}

/// Pauli vector sigma_a = a_x sigma_x + a_y sigma_y + a_z sigma_z.
///
/// For planar a = (cos t, sin t, 0) this is the antidiagonal matrix with
/// entries e^{-it}, e^{it}; its eigenvalues are +-1 for any unit a.
pub fn pauli(direction: &UnitVector3) -> ComplexMatrix {
    ComplexMatrix::two_by_two(
        Complex::new(direction.z(), 0.0),
        Complex::new(direction.x(), -direction.y()),
        Complex::new(direction.x(), direction.y()),
        Complex::new(-direction.z(), 0.0),
    )
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::two_by_two(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::two_by_two(ZERO, Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), ZERO)
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::two_by_two(ONE, ZERO, ZERO, -ONE)
}

/// Kronecker product A (x) B.
///
/// Errors with [`Error::Capacity`] if the result would exceed the
/// [`MAX_QUBITS`] dense cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = a
        .dim()
        .checked_mul(b.dim())
        .filter(|&d| d <= MAX_DIM)
        .ok_or(Error::Capacity {
            dim: a.dim().saturating_mul(b.dim()),
            max: MAX_DIM,
            max_qubits: MAX_QUBITS,
        })?;
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of factors, leftmost factor most significant.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidInput("empty factor list".into()))?;
    let mut acc = (*first).clone();
    for f in iter {
        acc = kron(&acc, f)?;
    }
    Ok(acc)
}

/// Numeric Hermitian eigendecomposition, eigenvalues sorted descending.
///
/// This is the independent oracle for the closed-form GHZ spectrum; it is
/// backed by nalgebra's dense symmetric eigensolver. Eigenvectors within a
/// degenerate cluster come back as an arbitrary orthonormal basis, so
/// comparisons against closed forms must go through spectral projectors.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<ComplexVector>)> {
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let d = m.dim();
    let nm = DMatrix::<Complex64>::from_fn(d, d, |i, j| {
        // Symmetrize so the solver sees an exactly Hermitian input.
        (m.get(i, j) + m.get(j, i).conj()) * Complex::new(0.5, 0.0)
    });
    let eig = nm
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::EigenNotConverged { iterations: 0 })?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| ComplexVector::new(eig.eigenvectors.column(i).iter().cloned().collect()))
        .collect();
    Ok((values, vectors))
}

/// Expectation value of a Hermitian operator on a state: <psi|M|psi> for pure
/// states, Tr(M rho) for mixed ones. The imaginary residue is asserted below
/// 1e-10 and discarded.
pub fn expectation(m: &ComplexMatrix, state: &QuantumState) -> Result<f64> {
    if m.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            left: m.dim(),
            right: state.dim(),
        });
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let value = match state.pure_vector() {
        Some(psi) => psi.inner(&m.matvec(psi)),
        None => {
            let rho = state.density_matrix();
            let d = m.dim();
            // Tr(M rho) without forming the product matrix.
            let mut acc = ZERO;
            for i in 0..d {
                for k in 0..d {
                    acc += m.get(i, k) * rho.get(k, i);
                }
            }
            acc
        }
    };
    debug_assert!(
        value.im.abs() < 1e-10,
        "expectation of a Hermitian operator came out complex: {value}"
    );
    Ok(value.re)
}
