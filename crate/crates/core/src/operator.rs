//! Bell operator construction.
//!
//! The general two-observable Bell operator is the polynomial
//! `B = sum_s beta(s) (x)_k A_k(s_k)` with `A_k(0) = sigma_{a_k}` and
//! `A_k(1) = sigma_{a_k'}`. The Mermin-Klyshko family is generated by the
//! recursion `B_n = (sigma_{a_n} + sigma_{a_n'})/2 (x) B_{n-1} +
//! (sigma_{a_n} - sigma_{a_n'})/2 (x) B_{n-1}'`, which this module provides
//! both at the coefficient level and as a direct matrix recursion; the two
//! routes are cross-checked in the tests.
//!
//! Tensor layout: qubit n is the leftmost (most significant) factor and
//! qubit 1 the last, so the recursion literally prepends qubit n. A basis
//! ket holds qubit k's bit at index bit k-1.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, ComplexMatrix, UnitVector3, MAX_QUBITS};

/// Tolerance below which a direction's z-component counts as planar.
pub const PLANAR_TOL: f64 = 1e-12;

/// Reduces an angle into [0, 2pi).
pub fn reduce_angle(angle: f64) -> f64 {
    let mut a = angle % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // -1e-20 % TAU can round to TAU itself.
    if a >= TAU {
        a = 0.0;
    }
    a
}

/// An orthonormal pair (x_hat, y_hat) defining one qubit's measurement plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    x_hat: UnitVector3,
    y_hat: UnitVector3,
}

impl LocalFrame {
    /// Orthonormality tolerance for the axis pair.
    pub const ORTHO_TOL: f64 = 1e-12;

    pub fn new(x_hat: UnitVector3, y_hat: UnitVector3) -> Result<Self> {
        let dot = x_hat.dot(&y_hat).abs();
        if dot > Self::ORTHO_TOL {
            return Err(Error::InvalidInput(format!(
                "frame axes are not orthogonal: |x.y| = {dot:.3e}"
            )));
        }
        Ok(Self { x_hat, y_hat })
    }

    /// The standard plane: x_hat = e_x, y_hat = e_y.
    pub fn standard() -> Self {
        Self {
            x_hat: UnitVector3::planar(0.0),
            y_hat: UnitVector3::planar(FRAC_PI_2),
        }
    }

    pub fn x_hat(&self) -> UnitVector3 {
        self.x_hat
    }

    pub fn y_hat(&self) -> UnitVector3 {
        self.y_hat
    }

    /// In-plane direction cos(angle) x_hat + sin(angle) y_hat.
    pub fn direction(&self, angle: f64) -> UnitVector3 {
        let (s, c) = angle.sin_cos();
        UnitVector3::normalized(
            c * self.x_hat.x() + s * self.y_hat.x(),
            c * self.x_hat.y() + s * self.y_hat.y(),
            c * self.x_hat.z() + s * self.y_hat.z(),
        )
        .expect("orthonormal axes give a unit direction")
    }
}

/// The 2n measurement angles (and optionally per-qubit planes) defining all
/// observables of an n-qubit Bell operator.
///
/// Without explicit axes, qubit k measures along the planar directions
/// `a_k = (cos alpha_k, sin alpha_k, 0)` and the primed partner likewise;
/// this is the parametrization covered by the closed-form spectrum. Custom
/// axes embed the same two angles in an arbitrary plane per qubit, which is
/// fully general for two observables and is what the violation optimizer
/// produces.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFrame {
    alpha: Vec<f64>,
    alpha_prime: Vec<f64>,
    axes: Option<Vec<LocalFrame>>,
}

impl MeasurementFrame {
    /// Planar frame from per-qubit angles; both slices must have length n.
    /// Angles are stored reduced to [0, 2pi).
    pub fn planar(alpha: &[f64], alpha_prime: &[f64]) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != alpha_prime.len() {
            return Err(Error::InvalidInput(format!(
                "angle lists must be non-empty and equal length, got {} and {}",
                alpha.len(),
                alpha_prime.len()
            )));
        }
        if alpha.len() > MAX_QUBITS {
            return Err(Error::Capacity {
                dim: 1 << alpha.len().min(63),
                max: 1 << MAX_QUBITS,
                max_qubits: MAX_QUBITS,
            });
        }
        Ok(Self {
            alpha: alpha.iter().copied().map(reduce_angle).collect(),
            alpha_prime: alpha_prime.iter().copied().map(reduce_angle).collect(),
            axes: None,
        })
    }

    /// Frame with one explicit plane per qubit.
    pub fn with_axes(alpha: &[f64], alpha_prime: &[f64], axes: Vec<LocalFrame>) -> Result<Self> {
        let mut frame = Self::planar(alpha, alpha_prime)?;
        if axes.len() != frame.n() {
            return Err(Error::InvalidInput(format!(
                "got {} frames for {} qubits",
                axes.len(),
                frame.n()
            )));
        }
        frame.axes = Some(axes);
        Ok(frame)
    }

    /// The canonical MK frame alpha_k = 0, alpha_k' = pi/2 for all k; at
    /// these angles the MK operator reaches its maximal eigenvalue
    /// 2^{(n-1)/2}.
    pub fn canonical_mk(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "MK operators need n >= 2, got {n}"
            )));
        }
        Self::planar(&vec![0.0; n], &vec![FRAC_PI_2; n])
    }

    /// Builds a frame from explicit direction pairs, one (a_k, a_k') per
    /// qubit. Each pair spans a plane; the stored axes are x_hat = a_k and
    /// y_hat completing the pair, so alpha_k = 0.
    pub fn from_directions(pairs: &[(UnitVector3, UnitVector3)]) -> Result<Self> {
        let mut alpha = Vec::with_capacity(pairs.len());
        let mut alpha_prime = Vec::with_capacity(pairs.len());
        let mut axes = Vec::with_capacity(pairs.len());
        for (a, ap) in pairs {
            let x_hat = *a;
            // y_hat: the component of a' orthogonal to a, or an arbitrary
            // orthogonal completion when the pair is (anti)parallel.
            let proj = a.dot(ap);
            let residual = [
                ap.x() - proj * a.x(),
                ap.y() - proj * a.y(),
                ap.z() - proj * a.z(),
            ];
            let y_raw = if residual.iter().map(|c| c * c).sum::<f64>().sqrt() > 1e-6 {
                UnitVector3::normalized(residual[0], residual[1], residual[2])?
            } else {
                orthogonal_completion(a)
            };
            // One more Gram-Schmidt pass: normalizing a tiny residual
            // amplifies rounding beyond the frame orthogonality tolerance.
            let drift = y_raw.dot(&x_hat);
            let y_hat = UnitVector3::normalized(
                y_raw.x() - drift * x_hat.x(),
                y_raw.y() - drift * x_hat.y(),
                y_raw.z() - drift * x_hat.z(),
            )?;
            let frame = LocalFrame::new(x_hat, y_hat)?;
            alpha.push(0.0);
            alpha_prime.push(ap.dot(&y_hat).atan2(ap.dot(&x_hat)));
            axes.push(frame);
        }
        Self::with_axes(&alpha, &alpha_prime, axes)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// Angle alpha_k (k is 1-based).
    pub fn alpha(&self, k: usize) -> f64 {
        self.alpha[k - 1]
    }

    /// Angle alpha_k' (k is 1-based).
    pub fn alpha_prime(&self, k: usize) -> f64 {
        self.alpha_prime[k - 1]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn alpha_primes(&self) -> &[f64] {
        &self.alpha_prime
    }

    pub fn axes(&self) -> Option<&[LocalFrame]> {
        self.axes.as_deref()
    }

    /// Measurement direction a_k or a_k' (k is 1-based).
    pub fn direction(&self, k: usize, primed: bool) -> UnitVector3 {
        let angle = if primed {
            self.alpha_prime[k - 1]
        } else {
            self.alpha[k - 1]
        };
        match &self.axes {
            Some(axes) => axes[k - 1].direction(angle),
            None => UnitVector3::planar(angle),
        }
    }

    /// True when every direction lies in the global (x, y) plane.
    pub fn is_planar(&self) -> bool {
        self.planar_violation().is_none()
    }

    /// First qubit (1-based) whose directions leave the (x, y) plane, with
    /// the offending |z|.
    pub fn planar_violation(&self) -> Option<(usize, f64)> {
        for k in 1..=self.n() {
            for primed in [false, true] {
                let z = self.direction(k, primed).z().abs();
                if z > PLANAR_TOL {
                    return Some((k, z));
                }
            }
        }
        None
    }

    /// Effective planar angle of direction (k, primed) in the global plane.
    /// Errors if the direction is not planar.
    pub fn planar_angle(&self, k: usize, primed: bool) -> Result<f64> {
        let d = self.direction(k, primed);
        if d.z().abs() > PLANAR_TOL {
            return Err(Error::NonPlanar {
                qubit: k,
                z: d.z().abs(),
            });
        }
        Ok(d.planar_angle())
    }

    /// Exchanges every a_k with a_k'.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.alpha_prime.clone(),
            alpha_prime: self.alpha.clone(),
            axes: self.axes.clone(),
        }
    }
}

/// Some unit vector orthogonal to v.
fn orthogonal_completion(v: &UnitVector3) -> UnitVector3 {
    let e = if v.x().abs() < 0.9 {
        (1.0, 0.0, 0.0)
    } else {
        (0.0, 1.0, 0.0)
    };
    let dot = v.x() * e.0 + v.y() * e.1 + v.z() * e.2;
    UnitVector3::normalized(e.0 - dot * v.x(), e.1 - dot * v.y(), e.2 - dot * v.z())
        .expect("completion of a unit vector is nonzero")
}

/// The real coefficient table beta(s), s in {0,1}^n, of the Bell polynomial.
///
/// Index convention: qubit k's selector bit s_k sits at bit k-1 of the table
/// index, so `beta[s]` multiplies the term using the primed observable on
/// exactly the qubits whose bit is set.
#[derive(Debug, Clone, PartialEq)]
pub struct BellCoefficients {
    n: usize,
    beta: Vec<f64>,
}

impl BellCoefficients {
    pub fn new(n: usize, beta: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "qubit count {n} out of range 1..={MAX_QUBITS}"
            )));
        }
        if beta.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "coefficient table has {} entries, expected {}",
                beta.len(),
                1 << n
            )));
        }
        if beta.iter().all(|b| *b == 0.0) {
            return Err(Error::InvalidInput(
                "coefficient table is identically zero".into(),
            ));
        }
        Ok(Self { n, beta })
    }

    /// The CHSH table: 1/2 on (00), (01), (10) and -1/2 on (11).
    pub fn chsh() -> Self {
        Self {
            n: 2,
            beta: vec![0.5, 0.5, 0.5, -0.5],
        }
    }

    /// Mermin-Klyshko coefficients for n >= 2, built by the coefficient-level
    /// recursion with the CHSH table as base case:
    /// beta_n(s, s_n=0) = (beta_{n-1}(s) + beta_{n-1}'(s)) / 2,
    /// beta_n(s, s_n=1) = (beta_{n-1}(s) - beta_{n-1}'(s)) / 2.
    pub fn mk(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "MK operators need n >= 2, got {n}"
            )));
        }
        if n > MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "qubit count {n} out of range 2..={MAX_QUBITS}"
            )));
        }
        let mut table = Self::chsh();
        for m in 3..=n {
            let primed = table.prime();
            let half = 1usize << (m - 1);
            let mut beta = vec![0.0; 1 << m];
            for s in 0..half {
                beta[s] = 0.5 * (table.beta[s] + primed.beta[s]);
                beta[s | half] = 0.5 * (table.beta[s] - primed.beta[s]);
            }
            table = Self { n: m, beta };
        }
        Ok(table)
    }

    /// Table with a single unit entry at configuration s.
    pub fn single_term(n: usize, s: usize) -> Result<Self> {
        let mut beta = vec![0.0; 1usize << n];
        *beta
            .get_mut(s)
            .ok_or_else(|| Error::InvalidInput(format!("configuration {s} out of range")))? = 1.0;
        Self::new(n, beta)
    }

    /// The primed table beta'(s) = beta(complement of s), i.e. the operator
    /// with every a_k exchanged with a_k'. An involution.
    pub fn prime(&self) -> Self {
        let mask = (1usize << self.n) - 1;
        let beta = (0..=mask).map(|s| self.beta[s ^ mask]).collect();
        Self { n: self.n, beta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: usize) -> f64 {
        self.beta[s]
    }

    pub fn table(&self) -> &[f64] {
        &self.beta
    }
}

/// A Bell operator: coefficients plus a measurement frame, with the dense
/// matrix built lazily on first use.
#[derive(Debug)]
pub struct BellOperator {
    coefficients: BellCoefficients,
    frame: MeasurementFrame,
    matrix: OnceLock<ComplexMatrix>,
}

impl BellOperator {
    pub fn new(coefficients: BellCoefficients, frame: MeasurementFrame) -> Result<Self> {
        if coefficients.n() != frame.n() {
            return Err(Error::DimensionMismatch {
                left: coefficients.n(),
                right: frame.n(),
            });
        }
        Ok(Self {
            coefficients,
            frame,
            matrix: OnceLock::new(),
        })
    }

    /// MK operator B_n on the given frame.
    pub fn mk(frame: MeasurementFrame) -> Result<Self> {
        let coefficients = BellCoefficients::mk(frame.n())?;
        Self::new(coefficients, frame)
    }

    pub fn coefficients(&self) -> &BellCoefficients {
        &self.coefficients
    }

    pub fn frame(&self) -> &MeasurementFrame {
        &self.frame
    }

    pub fn n(&self) -> usize {
        self.coefficients.n()
    }

    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    /// The dense matrix sum_s beta(s) (x)_k A_k(s_k), cached after the first
    /// call. Hermitian by construction (real beta, Hermitian factors).
    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix
            .get_or_init(|| build_matrix(&self.coefficients, &self.frame))
    }
}

/// The per-qubit observable pair [sigma_{a_k}, sigma_{a_k'}] for k = 1..=n.
pub fn frame_observables(frame: &MeasurementFrame) -> Vec<[ComplexMatrix; 2]> {
    (1..=frame.n())
        .map(|k| {
            [
                pauli(&frame.direction(k, false)),
                pauli(&frame.direction(k, true)),
            ]
        })
        .collect()
}

/// Evaluates the Bell polynomial as a dense matrix.
pub fn build_matrix(coefficients: &BellCoefficients, frame: &MeasurementFrame) -> ComplexMatrix {
    assert_eq!(
        coefficients.n(),
        frame.n(),
        "coefficients and frame disagree on n"
    );
    polynomial_from_observables(coefficients, &frame_observables(frame))
}

/// The polynomial sum over an explicit observable table; `observables[k-1]`
/// holds qubit k's pair.
pub fn polynomial_from_observables(
    coefficients: &BellCoefficients,
    observables: &[[ComplexMatrix; 2]],
) -> ComplexMatrix {
    let n = coefficients.n();
    assert_eq!(n, observables.len());
    let mut acc = ComplexMatrix::zeros(1 << n);
    for s in 0..(1usize << n) {
        let beta = coefficients.get(s);
        if beta == 0.0 {
            continue;
        }
        // Factor order: qubit n leftmost.
        let mut term = observables[n - 1][(s >> (n - 1)) & 1].clone();
        for k in (1..n).rev() {
            term = kron(&term, &observables[k - 1][(s >> (k - 1)) & 1])
                .expect("dimension within cap by construction");
        }
        acc = acc.add(&term.scale(num_complex::Complex::new(beta, 0.0)));
    }
    acc
}

/// MK matrices (B_n, B_n') by the direct matrix-level recursion. This is the
/// fast path used by the violation optimizer; the coefficient route above is
/// the general one, and the two are compared in tests.
pub fn mk_matrix_recursive(frame: &MeasurementFrame) -> Result<(ComplexMatrix, ComplexMatrix)> {
    mk_from_observables(&frame_observables(frame))
}

/// The matrix recursion over an explicit observable table.
pub fn mk_from_observables(
    observables: &[[ComplexMatrix; 2]],
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = observables.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "MK operators need n >= 2, got {n}"
        )));
    }
    let half = num_complex::Complex::new(0.5, 0.0);
    let [s2, s2p] = &observables[1];
    let sum2 = s2.add(s2p).scale(half);
    let diff2 = s2.sub(s2p).scale(half);
    let [s1, s1p] = &observables[0];
    let mut b = kron(&sum2, s1)?.add(&kron(&diff2, s1p)?);
    let mut bp = kron(&sum2, s1p)?.sub(&kron(&diff2, s1)?);
    for pair in &observables[2..] {
        let [sk, skp] = pair;
        let sum = sk.add(skp).scale(half);
        let diff = sk.sub(skp).scale(half);
        let next_b = kron(&sum, &b)?.add(&kron(&diff, &bp)?);
        let next_bp = kron(&sum, &bp)?.sub(&kron(&diff, &b)?);
        b = next_b;
        bp = next_bp;
    }
    Ok((b, bp))
}
