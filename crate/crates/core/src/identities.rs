//! Mermin-Klyshko operator identities.
//!
//! Closed forms for B_n^2, the commutator [B_n, B_n'] and the anticommutator
//! {B_n, B_n'} in terms of the per-qubit wedge operators
//! `sigma_{a_k ^ a_k'} = (a_k x a_k') . sigma`, plus the eigenvalue-structure
//! results: the sum rule `sum_{top half} lambda_k^2 = 2^{n-1}`, the
//! non-degeneracy gap of the leading eigenvalue, the minimal-overlap
//! threshold p-bar, and the three-qubit eigenvalue constraint identity.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, Complex64, ComplexMatrix};
use crate::operator::{mk_matrix_recursive, MeasurementFrame};
use crate::spectral::{full_spectrum, GhzLabel, SpectralDecomposition};

/// The 2x2 wedge operator sigma_{a ^ a'} = (a x a') . sigma for qubit k
/// (1-based). Not normalized: its scale is |sin| of the angle between the
/// two directions, and it vanishes when a = +-a'.
pub fn wedge_matrix(frame: &MeasurementFrame, k: usize) -> ComplexMatrix {
    let a = frame.direction(k, false);
    let ap = frame.direction(k, true);
    let cross = a.cross(&ap);
    ComplexMatrix::two_by_two(
        Complex::new(cross[2], 0.0),
        Complex::new(cross[0], -cross[1]),
        Complex::new(cross[0], cross[1]),
        Complex::new(-cross[2], 0.0),
    )
}

/// Sum over all subsets of {1..n} with the requested cardinality parity of
/// the tensor products of wedge operators (identity on the other qubits).
fn wedge_subset_sum(frame: &MeasurementFrame, odd: bool) -> Result<ComplexMatrix> {
    let n = frame.n();
    let id = ComplexMatrix::identity(2);
    let wedges: Vec<ComplexMatrix> = (1..=n).map(|k| wedge_matrix(frame, k)).collect();
    let mut acc = ComplexMatrix::zeros(1 << n);
    for subset in 0..1usize << n {
        if (subset.count_ones() % 2 == 1) != odd {
            continue;
        }
        // Factor order: qubit n leftmost.
        let factors: Vec<&ComplexMatrix> = (1..=n)
            .rev()
            .map(|k| {
                if subset >> (k - 1) & 1 == 1 {
                    &wedges[k - 1]
                } else {
                    &id
                }
            })
            .collect();
        acc = acc.add(&kron_all(&factors)?);
    }
    Ok(acc)
}

/// Closed form for B_n^2 = B_n'^2: the sum over products of an even number
/// of wedge operators, the empty product being the identity.
pub fn bn_squared_closed(frame: &MeasurementFrame) -> Result<ComplexMatrix> {
    if frame.n() < 2 {
        return Err(Error::InvalidInput(format!(
            "MK identities need n >= 2, got {}",
            frame.n()
        )));
    }
    wedge_subset_sum(frame, false)
}

/// Closed form for the commutator [B_n, B_n'] = 2i times the sum over
/// products of an odd number of wedge operators. Anti-Hermitian.
pub fn commutator_closed(frame: &MeasurementFrame) -> Result<ComplexMatrix> {
    if frame.n() < 2 {
        return Err(Error::InvalidInput(format!(
            "MK identities need n >= 2, got {}",
            frame.n()
        )));
    }
    Ok(wedge_subset_sum(frame, true)?.scale(Complex64::new(0.0, 2.0)))
}

/// The anticommutator {B_n, B_n'} is this multiple of the identity:
/// 2 prod_k (a_k . a_k'), i.e. 2 prod_k cos(alpha_k - alpha_k') for planar
/// frames.
pub fn anticommutator_value(frame: &MeasurementFrame) -> f64 {
    2.0 * (1..=frame.n())
        .map(|k| frame.direction(k, false).dot(&frame.direction(k, true)))
        .product::<f64>()
}

/// Trace of B_n^2 computed from the matrix; equals 2^n for every frame.
pub fn trace_b2(frame: &MeasurementFrame) -> Result<f64> {
    let (b, _) = mk_matrix_recursive(frame)?;
    let tr = b.matmul(&b).trace();
    debug_assert!(tr.im.abs() < 1e-10);
    Ok(tr.re)
}

/// Eigenvalues of an MK operator sorted descending, with the rescaled values
/// mu_i = lambda_i / 2^{n/2 - 1} used by the overlap bound.
#[derive(Debug, Clone)]
pub struct EigenvalueProfile {
    n: usize,
    lambdas: Vec<f64>,
}

impl EigenvalueProfile {
    pub fn from_spectrum(spectrum: &SpectralDecomposition) -> Self {
        Self {
            n: spectrum.n(),
            lambdas: spectrum.eigenvalues_sorted(),
        }
    }

    pub fn from_lambdas(n: usize, mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "expected {} eigenvalues for n = {n}, got {}",
                1usize << n,
                lambdas.len()
            )));
        }
        lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        Ok(Self { n, lambdas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// lambda_i, 1-based, descending.
    pub fn lambda(&self, i: usize) -> f64 {
        self.lambdas[i - 1]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// mu_i = lambda_i / 2^{n/2-1}, 1-based.
    pub fn mu(&self, i: usize) -> f64 {
        self.lambda(i) / self.violation_threshold()
    }

    /// The n-qubit violation threshold 2^{n/2 - 1}.
    pub fn violation_threshold(&self) -> f64 {
        2f64.powf(self.n as f64 / 2.0 - 1.0)
    }

    /// Sum of squares over the positive half of the spectrum; 2^{n-1} for MK
    /// operators.
    pub fn half_sum_of_squares(&self) -> f64 {
        self.lambdas[..1 << (self.n - 1)]
            .iter()
            .map(|l| l * l)
            .sum()
    }
}

/// Outcome of the leading-eigenvalue degeneracy check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DegeneracyReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub threshold: f64,
    /// Whether lambda1 exceeds the threshold, i.e. the lemma applies.
    pub applicable: bool,
    /// When applicable: lambda1 - lambda2 > tol and lambda2 < threshold.
    pub verdict: bool,
}

/// Checks: if lambda1 > 2^{n/2-1} then lambda1 is non-degenerate and
/// lambda2 < 2^{n/2-1}. Vacuously true when lambda1 is at or below the
/// threshold.
pub fn degeneracy_check(profile: &EigenvalueProfile, tol: f64) -> DegeneracyReport {
    let lambda1 = profile.lambda(1);
    let lambda2 = profile.lambda(2);
    let threshold = profile.violation_threshold();
    let applicable = lambda1 > threshold + tol;
    let verdict = !applicable || (lambda1 - lambda2 > tol && lambda2 < threshold);
    DegeneracyReport {
        lambda1,
        lambda2,
        threshold,
        applicable,
        verdict,
    }
}

/// The minimal overlap p-bar = (1 - mu2) / (mu1 - mu2) with the top
/// eigenvector that a state needs before it can exceed the n-qubit violation
/// threshold. Lies in (1/2, 1] whenever lambda1 > 2^{n/2-1}.
pub fn p_bar(profile: &EigenvalueProfile) -> Result<f64> {
    let mu1 = profile.mu(1);
    let mu2 = profile.mu(2);
    if mu1 - mu2 <= f64::EPSILON {
        return Err(Error::Undefined(format!(
            "p-bar needs lambda1 > lambda2, got mu1 = {mu1}, mu2 = {mu2}"
        )));
    }
    Ok((1.0 - mu2) / (mu1 - mu2))
}

/// Result of evaluating the three-qubit eigenvalue constraint identity.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintCheck {
    /// Both sides of the identity; they agree within 1e-6 away from the
    /// guarded denominator.
    Evaluated { lhs: f64, rhs: f64 },
    /// The denominator fell below the guard threshold; the identity's limit
    /// diverges there and the case is skipped, not failed.
    Skipped { denominator: f64 },
}

/// Default guard on the constraint denominator.
pub const CONSTRAINT_GUARD: f64 = 1e-6;

/// The n = 3 MK eigenvalue constraint
/// `(l3^2 + l1^2 - 2)(l3^2 + l4^2 - 2) / (l3^2 + l2^2 - 2) =
/// 2 sin^2(alpha_1 - alpha_1')`, with lambda_i labelled by the configuration
/// families Omega = 000, 001, 010, 011 (not by magnitude).
pub fn mermin3_constraint(frame: &MeasurementFrame, guard: f64) -> Result<ConstraintCheck> {
    if frame.n() != 3 {
        return Err(Error::InvalidInput(format!(
            "the constraint identity is specific to n = 3, got n = {}",
            frame.n()
        )));
    }
    let op = crate::operator::BellOperator::mk(frame.clone())?;
    let spectrum = full_spectrum(&op)?;
    // lambda_i^2 per family; the identity only involves squares so the sign
    // convention of each family is immaterial.
    let sq = |bits: &str| -> f64 {
        let pair = spectrum.pair(&GhzLabel::from_bitstring(bits).expect("3-bit label"));
        pair.lambda * pair.lambda
    };
    let (l1, l2, l3, l4) = (sq("000"), sq("001"), sq("010"), sq("011"));
    let denominator = l3 + l2 - 2.0;
    if denominator.abs() <= guard {
        return Ok(ConstraintCheck::Skipped { denominator });
    }
    let lhs = (l3 + l1 - 2.0) * (l3 + l4 - 2.0) / denominator;
    let delta = frame.planar_angle(1, false)? - frame.planar_angle(1, true)?;
    let rhs = 2.0 * delta.sin().powi(2);
    Ok(ConstraintCheck::Evaluated { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;
    use crate::operator::BellOperator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn random_planar_frame(rng: &mut impl Rng, n: usize) -> MeasurementFrame {
        let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        let alpha_prime: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        MeasurementFrame::planar(&alpha, &alpha_prime).unwrap()
    }

    #[test]
    fn wedge_is_hermitian_and_vanishes_on_parallel_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let frame = random_planar_frame(&mut rng, 2);
            for k in 1..=2 {
                let w = wedge_matrix(&frame, k);
                assert!(w.hermiticity_deviation() < 1e-12);
            }
        }
        let parallel = MeasurementFrame::planar(&[0.7, 1.0], &[0.7, 1.0]).unwrap();
        assert!(wedge_matrix(&parallel, 1).frobenius_norm() < 1e-12);
        // Anti-parallel directions also vanish.
        let anti = MeasurementFrame::planar(&[0.2, 0.0], &[0.2 + std::f64::consts::PI, 0.0]).unwrap();
        assert!(wedge_matrix(&anti, 1).frobenius_norm() < 1e-12);
    }

    #[test]
    fn planar_wedge_is_sine_times_sigma_z() {
        let frame = MeasurementFrame::planar(&[0.3, 0.0], &[1.4, 0.0]).unwrap();
        let w = wedge_matrix(&frame, 1);
        let s = (1.4f64 - 0.3).sin();
        assert!((w.get(0, 0).re - s).abs() < 1e-14);
        assert!((w.get(1, 1).re + s).abs() < 1e-14);
        assert!(w.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn bn_squared_n2_explicit() {
        // B_2^2 = 1 + Sigma_2 (x) Sigma_1.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let frame = random_planar_frame(&mut rng, 2);
        let closed = bn_squared_closed(&frame).unwrap();
        let expected = ComplexMatrix::identity(4).add(
            &crate::linalg::kron(&wedge_matrix(&frame, 2), &wedge_matrix(&frame, 1)).unwrap(),
        );
        assert!(closed.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn commutator_n2_explicit() {
        // [B_2, B_2'] = 2i (1 (x) Sigma_1 + Sigma_2 (x) 1).
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let frame = random_planar_frame(&mut rng, 2);
        let closed = commutator_closed(&frame).unwrap();
        let id = ComplexMatrix::identity(2);
        let q2 = crate::linalg::kron(&id, &wedge_matrix(&frame, 1))
            .unwrap()
            .add(&crate::linalg::kron(&wedge_matrix(&frame, 2), &id).unwrap());
        assert!(closed.max_abs_diff(&q2.scale(Complex64::new(0.0, 2.0))) < 1e-14);
    }

    #[test]
    fn closed_forms_match_direct_matrix_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 2..=6 {
            let frame = random_planar_frame(&mut rng, n);
            let (b, bp) = mk_matrix_recursive(&frame).unwrap();
            let b2 = b.matmul(&b);
            assert!(bn_squared_closed(&frame).unwrap().max_abs_diff(&b2) < 1e-9);
            let comm = b.matmul(&bp).sub(&bp.matmul(&b));
            assert!(commutator_closed(&frame).unwrap().max_abs_diff(&comm) < 1e-9);
        }
    }

    #[test]
    fn identity_frame_collapses_closed_forms() {
        // All a_k = a_k': every wedge vanishes; B^2 = 1 and [B, B'] = 0.
        let frame = MeasurementFrame::planar(&[0.4, 1.3, 2.2], &[0.4, 1.3, 2.2]).unwrap();
        assert!(
            bn_squared_closed(&frame)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(8))
                < 1e-12
        );
        assert!(commutator_closed(&frame).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn lemma_square_bn_equals_bn_primed() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=6 {
            let frame = random_planar_frame(&mut rng, n);
            let (b, bp) = mk_matrix_recursive(&frame).unwrap();
            assert!(b.matmul(&b).max_abs_diff(&bp.matmul(&bp)) < 1e-9);
        }
    }

    #[test]
    fn anticommutator_is_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in 2..=5 {
            let frame = random_planar_frame(&mut rng, n);
            let (b, bp) = mk_matrix_recursive(&frame).unwrap();
            let anti = b.matmul(&bp).add(&bp.matmul(&b));
            let value = anticommutator_value(&frame);
            let expected = ComplexMatrix::identity(1 << n).scale(Complex64::new(value, 0.0));
            assert!(anti.max_abs_diff(&expected) < 1e-9);
        }
        // Identical pairs give 2, orthogonal pairs give 0.
        let same = MeasurementFrame::planar(&[0.1, 0.2], &[0.1, 0.2]).unwrap();
        assert!((anticommutator_value(&same) - 2.0).abs() < 1e-14);
        let canonical = MeasurementFrame::canonical_mk(4).unwrap();
        assert!(anticommutator_value(&canonical).abs() < 1e-14);
    }

    #[test]
    fn trace_of_b_squared_is_two_to_the_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 2..=8 {
            let frame = random_planar_frame(&mut rng, n);
            let tr = trace_b2(&frame).unwrap();
            assert!(
                (tr - (1u64 << n) as f64).abs() < 1e-8,
                "n = {n}: trace {tr}"
            );
        }
    }

    #[test]
    fn eq34_half_sum_of_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 2..=8 {
            let frame = random_planar_frame(&mut rng, n);
            let op = BellOperator::mk(frame).unwrap();
            let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).unwrap());
            let sum = profile.half_sum_of_squares();
            assert!((sum - (1u64 << (n - 1)) as f64).abs() < 1e-8);
            // Consequence: lambda1^2 + lambda2^2 <= 2^{n-1}.
            let two = profile.lambda(1).powi(2) + profile.lambda(2).powi(2);
            assert!(two <= (1u64 << (n - 1)) as f64 + 1e-8);
        }
    }

    #[test]
    fn degeneracy_check_examples() {
        // Canonical n = 3: lambda1 = 2 > sqrt 2, gap to lambda2 = 0.
        let op = BellOperator::mk(MeasurementFrame::canonical_mk(3).unwrap()).unwrap();
        let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).unwrap());
        let report = degeneracy_check(&profile, 1e-9);
        assert!(report.applicable && report.verdict);
        assert!((report.lambda1 - 2.0).abs() < 1e-12);
        assert!(report.lambda2.abs() < 1e-12);

        // All angles equal: the classical case lambda1 = 1, lemma vacuous.
        let classical =
            MeasurementFrame::planar(&[0.3, 0.3, 0.3], &[0.3, 0.3, 0.3]).unwrap();
        let op = BellOperator::mk(classical).unwrap();
        let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).unwrap());
        let report = degeneracy_check(&profile, 1e-9);
        assert!(!report.applicable);
        assert!(report.verdict);
        assert!((report.lambda1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degeneracy_check_random_violating_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut found = 0;
        while found < 20 {
            let frame = random_planar_frame(&mut rng, 4);
            let op = BellOperator::mk(frame).unwrap();
            let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).unwrap());
            let report = degeneracy_check(&profile, 1e-9);
            if report.applicable {
                found += 1;
                assert!(report.verdict, "gap violated: {report:?}");
            }
        }
    }

    #[test]
    fn p_bar_examples() {
        // Maximal violation: lambda1 = 2^{(n-1)/2}, lambda2 = 0 gives
        // p-bar = 1/sqrt 2.
        for n in 2..=6 {
            let mut lambdas = vec![0.0; 1 << n];
            let top = 2f64.powf((n as f64 - 1.0) / 2.0);
            lambdas[0] = top;
            *lambdas.last_mut().unwrap() = -top;
            let profile = EigenvalueProfile::from_lambdas(n, lambdas).unwrap();
            let p = p_bar(&profile).unwrap();
            assert!((p - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }

        // Limiting case lambda1 exactly at the threshold: p-bar = 1.
        let n = 4;
        let threshold = 2f64.powf(n as f64 / 2.0 - 1.0);
        let mut lambdas = vec![0.0; 1 << n];
        lambdas[0] = threshold;
        lambdas[15] = -threshold;
        let profile = EigenvalueProfile::from_lambdas(n, lambdas).unwrap();
        assert!((p_bar(&profile).unwrap() - 1.0).abs() < 1e-12);

        // Degenerate top eigenvalues are rejected.
        let profile = EigenvalueProfile::from_lambdas(2, vec![1.0, 1.0, -1.0, -1.0]).unwrap();
        assert!(p_bar(&profile).is_err());
    }

    #[test]
    fn p_bar_in_range_on_violating_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut found = 0;
        while found < 30 {
            let n = rng.gen_range(2..=5);
            let frame = random_planar_frame(&mut rng, n);
            let op = BellOperator::mk(frame).unwrap();
            let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).unwrap());
            if profile.lambda(1) > profile.violation_threshold() + 1e-9 {
                found += 1;
                let p = p_bar(&profile).unwrap();
                assert!(p > 0.5 && p <= 1.0 + 1e-12, "p-bar out of range: {p}");
            }
        }
    }

    #[test]
    fn constraint_identity_canonical() {
        // Canonical frame: families give lambda^2 = (4, 0, 0, 0); both sides
        // equal 2.
        let frame = MeasurementFrame::canonical_mk(3).unwrap();
        match mermin3_constraint(&frame, CONSTRAINT_GUARD).unwrap() {
            ConstraintCheck::Evaluated { lhs, rhs } => {
                assert!((lhs - 2.0).abs() < 1e-9);
                assert!((rhs - 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected skip: {other:?}"),
        }
    }

    #[test]
    fn constraint_identity_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut evaluated = 0;
        for _ in 0..200 {
            let frame = random_planar_frame(&mut rng, 3);
            match mermin3_constraint(&frame, CONSTRAINT_GUARD).unwrap() {
                ConstraintCheck::Evaluated { lhs, rhs } => {
                    evaluated += 1;
                    assert!(
                        (lhs - rhs).abs() < 1e-6,
                        "constraint violated: lhs = {lhs}, rhs = {rhs}"
                    );
                }
                ConstraintCheck::Skipped { .. } => {}
            }
        }
        assert!(evaluated > 150, "too many skipped cases: {evaluated}");
    }

    #[test]
    fn constraint_rhs_vanishes_for_equal_first_qubit_angles() {
        let frame = MeasurementFrame::planar(&[0.9, 0.4, 1.7], &[0.9, 2.0, 0.3]).unwrap();
        match mermin3_constraint(&frame, CONSTRAINT_GUARD).unwrap() {
            ConstraintCheck::Evaluated { lhs, rhs } => {
                assert!(rhs.abs() < 1e-12);
                assert!(lhs.abs() < 1e-6);
            }
            ConstraintCheck::Skipped { .. } => {}
        }
    }

    #[test]
    fn constraint_rejects_wrong_qubit_count() {
        let frame = MeasurementFrame::canonical_mk(4).unwrap();
        assert!(mermin3_constraint(&frame, CONSTRAINT_GUARD).is_err());
    }

    #[test]
    fn rigidity_two_unit_eigenvalues_force_all() {
        // Search near configurations with two family eigenvalues close to 1
        // and check the remaining ones are dragged to 1 as well.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut hits = 0;
        for _ in 0..20000 {
            let frame = random_planar_frame(&mut rng, 3);
            let op = BellOperator::mk(frame).unwrap();
            let spectrum = full_spectrum(&op).unwrap();
            let fams: Vec<f64> = ["000", "001", "010", "011"]
                .iter()
                .map(|b| {
                    spectrum
                        .pair(&GhzLabel::from_bitstring(b).unwrap())
                        .lambda
                        .abs()
                })
                .collect();
            let near_one = fams.iter().filter(|l| (**l - 1.0).abs() < 1e-6).count();
            if near_one >= 2 {
                hits += 1;
                for l in &fams {
                    assert!(
                        (l - 1.0).abs() < 1e-4,
                        "rigidity violated: families {fams:?}"
                    );
                }
            }
        }
        // The classical-like region is reachable by random search rarely;
        // seed known configurations to make the test meaningful.
        let classical = MeasurementFrame::planar(&[0.5, 1.0, 2.0], &[0.5, 1.0, 2.0]).unwrap();
        let op = BellOperator::mk(classical).unwrap();
        let spectrum = full_spectrum(&op).unwrap();
        for b in ["000", "001", "010", "011"] {
            let l = spectrum
                .pair(&GhzLabel::from_bitstring(b).unwrap())
                .lambda
                .abs();
            assert!((l - 1.0).abs() < 1e-9);
        }
        let _ = hits;
    }

    #[test]
    fn profile_reflection_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let frame = random_planar_frame(&mut rng, 5);
        let op = BellOperator::mk(frame).unwrap();
        let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).unwrap());
        let l = profile.lambdas();
        let dim = l.len();
        for i in 0..dim {
            assert!((l[i] + l[dim - 1 - i]).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_forms_agree_with_numeric_square() {
        // bn_squared_closed vs hermitian_eig reconstruction of B^2 at n = 4.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let frame = random_planar_frame(&mut rng, 4);
        let (b, _) = mk_matrix_recursive(&frame).unwrap();
        let (vals, vecs) = hermitian_eig(&b).unwrap();
        let mut b2 = ComplexMatrix::zeros(16);
        for (v, vec) in vals.iter().zip(&vecs) {
            b2 = b2.add(&vec.outer(vec).scale(Complex64::new(v * v, 0.0)));
        }
        assert!(bn_squared_closed(&frame).unwrap().max_abs_diff(&b2) < 1e-8);
    }
}
