//! Closed-form spectral decomposition of planar two-observable Bell
//! operators.
//!
//! Every such operator is diagonalized by the 2^n GHZ states
//! `(e^{i theta} |Omega> + |Omega-bar>) / sqrt 2`, one per bit configuration
//! Omega. The phase and eigenvalue come from the complex number `f_Omega`
//! obtained by replacing each observable `sigma_{a_k}` with the phase factor
//! `e^{+-i alpha_k}` (sign set by omega_k). No matrix is ever diagonalized
//! here; the numeric eigensolver in [`crate::linalg`] serves only as an
//! independent cross-check.

use num_complex::Complex;
use rayon::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{kron_all, sigma_z, Complex64, ComplexMatrix, ComplexVector};
use crate::operator::BellOperator;

/// A bit configuration Omega in {0,1}^n labelling one GHZ eigenvector.
///
/// omega_k is stored at bit k-1, which by the crate's tensor layout makes
/// the stored integer equal to the basis index of |Omega>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GhzLabel {
    n: usize,
    bits: usize,
}

impl GhzLabel {
    pub fn new(n: usize, bits: usize) -> Result<Self> {
        if n == 0 || n > crate::linalg::MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "qubit count {n} out of range 1..={}",
                crate::linalg::MAX_QUBITS
            )));
        }
        if bits >= 1 << n {
            return Err(Error::InvalidInput(format!(
                "configuration {bits:#b} does not fit {n} qubits"
            )));
        }
        Ok(Self { n, bits })
    }

    /// Parses a bitstring with qubit 1 leftmost, e.g. "011" for n = 3.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let n = s.len();
        let mut bits = 0usize;
        for (i, b) in s.bytes().enumerate() {
            match b {
                b'0' => {}
                b'1' => bits |= 1 << i,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "bad configuration bitstring {s:?}"
                    )))
                }
            }
        }
        Self::new(n, bits)
    }

    /// Renders the configuration with qubit 1 leftmost.
    pub fn bitstring(&self) -> String {
        (0..self.n)
            .map(|k| if self.bits >> k & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// omega_k for 1-based k.
    pub fn bit(&self, k: usize) -> bool {
        self.bits >> (k - 1) & 1 == 1
    }

    /// The complementary configuration Omega-bar.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: self.bits ^ ((1 << self.n) - 1),
        }
    }

    /// Basis index of |Omega> under the crate layout (identical to the raw
    /// bits by construction).
    pub fn basis_index(&self) -> usize {
        self.bits
    }

    pub fn raw_bits(&self) -> usize {
        self.bits
    }

    /// All 2^n configurations in basis-index order.
    pub fn all(n: usize) -> impl Iterator<Item = GhzLabel> {
        (0..1usize << n).map(move |bits| GhzLabel { n, bits })
    }
}

/// One eigenpair of the decomposition: configuration, phase, eigenvalue and
/// the complex number they derive from.
///
/// The phase convention follows the paper: theta lives in [0, pi), except
/// that a real f (a measure-zero seam) lands exactly on theta = pi; its
/// complementary partner then takes theta = 0, keeping the basis orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzEigenpair {
    pub label: GhzLabel,
    pub theta: f64,
    pub lambda: f64,
    pub f: Complex64,
}

impl GhzEigenpair {
    /// The eigenvector (e^{i theta} |Omega> + |Omega-bar>) / sqrt 2.
    pub fn vector(&self) -> ComplexVector {
        ghz_vector(&self.label, self.theta)
    }
}

/// The full set of 2^n GHZ eigenpairs of one Bell operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n: usize,
    pairs: Vec<GhzEigenpair>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Pairs indexed by the configuration's basis index.
    pub fn pairs(&self) -> &[GhzEigenpair] {
        &self.pairs
    }

    pub fn pair(&self, label: &GhzLabel) -> &GhzEigenpair {
        &self.pairs[label.basis_index()]
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues_sorted(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pairs.iter().map(|p| p.lambda).collect();
        v.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        v
    }

    /// Rebuilds sum_Omega lambda_Omega P_Omega.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = 1usize << self.n;
        let mut acc = ComplexMatrix::zeros(dim);
        for pair in &self.pairs {
            if pair.lambda == 0.0 {
                continue;
            }
            let v = pair.vector();
            acc = acc.add(&v.outer(&v).scale(Complex::new(pair.lambda, 0.0)));
        }
        acc
    }
}

/// The complex number f_Omega: the Bell polynomial with every observable
/// replaced by a phase, `sum_s beta(s) prod_k exp(i (-1)^{omega_k}
/// alpha_k(s_k))`.
///
/// Requires a planar frame; errors name the first offending qubit.
pub fn f_omega(op: &BellOperator, label: &GhzLabel) -> Result<Complex64> {
    let phases = planar_phase_table(op)?;
    Ok(f_omega_from_phases(op, &phases, label))
}

/// Per-qubit phase factors e^{i alpha_k} and e^{i alpha_k'}, validated
/// planar. Row k-1 holds [unprimed, primed].
fn planar_phase_table(op: &BellOperator) -> Result<Vec<[Complex64; 2]>> {
    let frame = op.frame();
    (1..=frame.n())
        .map(|k| {
            Ok([
                Complex::from_polar(1.0, frame.planar_angle(k, false)?),
                Complex::from_polar(1.0, frame.planar_angle(k, true)?),
            ])
        })
        .collect()
}

fn f_omega_from_phases(
    op: &BellOperator,
    phases: &[[Complex64; 2]],
    label: &GhzLabel,
) -> Complex64 {
    let n = op.n();
    let coeffs = op.coefficients();
    let mut acc = Complex::new(0.0, 0.0);
    for s in 0..1usize << n {
        let beta = coeffs.get(s);
        if beta == 0.0 {
            continue;
        }
        let mut prod = Complex::new(beta, 0.0);
        for k in 1..=n {
            let phase = phases[k - 1][s >> (k - 1) & 1];
            prod *= if label.bit(k) { phase.conj() } else { phase };
        }
        acc += prod;
    }
    acc
}

/// Phase and eigenvalue from f, following the branch rule: for
/// arg f in [0, pi) take theta = -arg f - pi and lambda = -|f|; for
/// arg f in [pi, 2pi) take theta = -arg f and lambda = +|f|. Theta is
/// reduced mod 2pi; e^{i theta} f = lambda holds in exact arithmetic.
///
/// f = 0 returns (0, 0) by convention. A floating-point arg within 1e-12 of
/// pi is snapped to pi before branching, so the seam is deterministic.
pub fn theta_lambda(f: Complex64) -> (f64, f64) {
    if f.re == 0.0 && f.im == 0.0 {
        return (0.0, 0.0);
    }
    let mut arg = f.arg();
    if arg < 0.0 {
        arg += TAU;
    }
    if (arg - PI).abs() < 1e-12 {
        arg = PI;
    }
    let modulus = f.norm();
    let (theta_raw, lambda) = if arg < PI {
        (-arg - PI, -modulus)
    } else {
        (-arg, modulus)
    };
    let mut theta = theta_raw.rem_euclid(TAU);
    if theta >= TAU {
        theta = 0.0;
    }
    (theta, lambda)
}

/// The GHZ state (e^{i theta} |Omega> + |Omega-bar>) / sqrt 2.
pub fn ghz_vector(label: &GhzLabel, theta: f64) -> ComplexVector {
    let mut v = ComplexVector::zeros(1 << label.n());
    v.set(
        label.basis_index(),
        Complex::from_polar(FRAC_1_SQRT_2, theta),
    );
    v.set(
        label.complement().basis_index(),
        Complex::new(FRAC_1_SQRT_2, 0.0),
    );
    v
}

/// Full closed-form spectrum: one eigenpair per configuration.
///
/// Only the half with omega_1 = 0 is computed; the complementary partner is
/// derived from it via theta-bar = pi - theta and lambda-bar = -lambda
/// (and f-bar = conj f), which keeps the pair exactly orthonormal even on
/// the real-f seam.
pub fn full_spectrum(op: &BellOperator) -> Result<SpectralDecomposition> {
    let n = op.n();
    let phases = planar_phase_table(op)?;
    let dim = 1usize << n;
    let mut pairs: Vec<Option<GhzEigenpair>> = vec![None; dim];
    // Configurations with omega_1 = 0 are the even basis indices.
    let primary: Vec<GhzEigenpair> = (0..dim / 2)
        .into_par_iter()
        .map(|half_bits| {
            let label = GhzLabel {
                n,
                bits: half_bits << 1,
            };
            let f = f_omega_from_phases(op, &phases, &label);
            let (theta, lambda) = theta_lambda(f);
            GhzEigenpair {
                label,
                theta,
                lambda,
                f,
            }
        })
        .collect();
    for pair in primary {
        let index = pair.label.basis_index();
        let partner_label = pair.label.complement();
        let partner = GhzEigenpair {
            label: partner_label,
            theta: (PI - pair.theta).rem_euclid(TAU),
            lambda: -pair.lambda,
            f: pair.f.conj(),
        };
        pairs[partner_label.basis_index()] = Some(partner);
        pairs[index] = Some(pair);
    }
    Ok(SpectralDecomposition {
        n,
        pairs: pairs
            .into_iter()
            .map(|p| p.expect("every configuration filled"))
            .collect(),
    })
}

/// The reflection operator U[k]: sigma_z on qubit k, identity elsewhere.
/// U[k]^2 = 1 and all U[k] commute.
pub fn reflection_operator(n: usize, k: usize) -> Result<ComplexMatrix> {
    if n == 0 || n > crate::linalg::MAX_QUBITS {
        return Err(Error::InvalidInput(format!(
            "qubit count {n} out of range 1..={}",
            crate::linalg::MAX_QUBITS
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "qubit index {k} out of range 1..={n}"
        )));
    }
    let id = ComplexMatrix::identity(2);
    let sz = sigma_z();
    // Factor order: qubit n leftmost.
    let factors: Vec<&ComplexMatrix> = (1..=n).rev().map(|q| if q == k { &sz } else { &id }).collect();
    kron_all(&factors)
}
