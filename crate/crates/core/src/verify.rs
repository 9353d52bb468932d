//! Randomized verification suites for the operator identities.
//!
//! Each suite sweeps random frames at the requested qubit counts, records the
//! worst residual it saw, and reports pass/fail against the identity's
//! tolerance. These back the `verify` CLI subcommand; the same checks run in
//! the test suite at fixed seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::identities::{
    anticommutator_value, bn_squared_closed, commutator_closed, degeneracy_check,
    mermin3_constraint, p_bar, trace_b2, ConstraintCheck, EigenvalueProfile, CONSTRAINT_GUARD,
};
use crate::linalg::{Complex64, ComplexMatrix};
use crate::operator::{
    build_matrix, mk_matrix_recursive, BellCoefficients, BellOperator, MeasurementFrame,
};
use crate::optimize::derive_seed;
use crate::spectral::{full_spectrum, reflection_operator};

/// Verdict for one (suite, n) pair.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub identity_name: String,
    pub n: usize,
    pub trials: usize,
    pub max_residual: f64,
    pub skipped: usize,
    pub tolerance: f64,
    pub verdict: bool,
}

/// The suites the CLI accepts.
pub const SUITE_NAMES: &[&str] = &[
    "lemma-square",
    "closed-forms",
    "anticommutator",
    "trace",
    "eq34",
    "lemma5",
    "pbar",
    "mermin3-constraint",
    "symmetry",
];

fn random_planar_frame(rng: &mut impl Rng, n: usize) -> MeasurementFrame {
    let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    let alpha_prime: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    MeasurementFrame::planar(&alpha, &alpha_prime).expect("valid random angles")
}

/// Per-trial outcome: residual, or None when the trial was skipped.
type TrialOutcome = Option<f64>;

fn run_trials<F>(n: usize, trials: usize, seed: u64, trial: F) -> (f64, usize)
where
    F: Fn(&mut ChaCha8Rng) -> TrialOutcome + Sync,
{
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, (n * 100_000 + i) as u64));
            trial(&mut rng)
        })
        .collect();
    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let max_residual = outcomes.into_iter().flatten().fold(0.0, f64::max);
    (max_residual, skipped)
}

/// Runs one named suite over an inclusive n range.
pub fn run_suite(
    name: &str,
    n_min: usize,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<SuiteReport>> {
    if n_min < 2 || n_max < n_min || n_max > crate::linalg::MAX_QUBITS {
        return Err(Error::InvalidInput(format!(
            "bad n range {n_min}..={n_max}"
        )));
    }
    let ns: Vec<usize> = match name {
        // The constraint identity is specific to three qubits.
        "mermin3-constraint" => vec![3],
        _ => (n_min..=n_max).collect(),
    };
    let mut reports = Vec::new();
    for n in ns {
        let report = match name {
            "lemma-square" => suite_lemma_square(n, trials, seed),
            "closed-forms" => suite_closed_forms(n, trials, seed),
            "anticommutator" => suite_anticommutator(n, trials, seed),
            "trace" => suite_trace(n, trials, seed),
            "eq34" => suite_eq34(n, trials, seed),
            "lemma5" => suite_lemma5(n, trials, seed),
            "pbar" => suite_pbar(n, trials, seed),
            "mermin3-constraint" => suite_constraint(n, trials, seed),
            "symmetry" => suite_symmetry(n, trials, seed),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown suite {name:?}; known suites: {}",
                    SUITE_NAMES.join(", ")
                )))
            }
        };
        reports.push(report);
    }
    Ok(reports)
}

/// B_n^2 = B_n'^2.
fn suite_lemma_square(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        let (b, bp) = mk_matrix_recursive(&frame).expect("n >= 2");
        Some(b.matmul(&b).max_abs_diff(&bp.matmul(&bp)))
    });
    report("lemma-square", n, trials, max_residual, skipped, 1e-9)
}

/// Closed forms for B_n^2 and [B_n, B_n'] against direct matrix algebra.
fn suite_closed_forms(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        let (b, bp) = mk_matrix_recursive(&frame).expect("n >= 2");
        let square = bn_squared_closed(&frame)
            .expect("n >= 2")
            .max_abs_diff(&b.matmul(&b));
        let comm = commutator_closed(&frame)
            .expect("n >= 2")
            .max_abs_diff(&b.matmul(&bp).sub(&bp.matmul(&b)));
        Some(square.max(comm))
    });
    report("closed-forms", n, trials, max_residual, skipped, 1e-9)
}

/// {B_n, B_n'} = 2 prod_k (a_k . a_k') times the identity.
fn suite_anticommutator(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        let (b, bp) = mk_matrix_recursive(&frame).expect("n >= 2");
        let anti = b.matmul(&bp).add(&bp.matmul(&b));
        let expected = ComplexMatrix::identity(1 << n)
            .scale(Complex64::new(anticommutator_value(&frame), 0.0));
        Some(anti.max_abs_diff(&expected))
    });
    report("anticommutator", n, trials, max_residual, skipped, 1e-9)
}

/// Tr(B_n^2) = 2^n.
fn suite_trace(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        Some((trace_b2(&frame).expect("n >= 2") - (1u64 << n) as f64).abs())
    });
    report("trace", n, trials, max_residual, skipped, 1e-8)
}

/// Sum of squared eigenvalues over the positive half equals 2^{n-1}.
fn suite_eq34(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        let op = BellOperator::mk(frame).expect("n >= 2");
        let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).expect("planar"));
        Some((profile.half_sum_of_squares() - (1u64 << (n - 1)) as f64).abs())
    });
    report("eq34", n, trials, max_residual, skipped, 1e-8)
}

/// Leading-eigenvalue gap whenever lambda_1 exceeds the violation threshold.
/// Frames below the threshold are counted as skipped.
fn suite_lemma5(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        let op = BellOperator::mk(frame).expect("n >= 2");
        let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).expect("planar"));
        let rep = degeneracy_check(&profile, 1e-9);
        if !rep.applicable {
            return None;
        }
        // Residual: how far the lemma is from being violated (0 when both
        // assertions hold strictly).
        let gap_violation = (-(rep.lambda1 - rep.lambda2)).max(0.0);
        let order_violation = (rep.lambda2 - rep.threshold).max(0.0);
        Some(gap_violation.max(order_violation))
    });
    report("lemma5", n, trials, max_residual, skipped, 1e-9)
}

/// p-bar in (1/2, 1] on frames with a genuine n-qubit violation.
fn suite_pbar(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        let op = BellOperator::mk(frame).expect("n >= 2");
        let profile = EigenvalueProfile::from_spectrum(&full_spectrum(&op).expect("planar"));
        if profile.lambda(1) <= profile.violation_threshold() + 1e-9 {
            return None;
        }
        let p = p_bar(&profile).expect("non-degenerate by lemma 5");
        let below = (0.5 - p).max(0.0);
        let above = (p - 1.0).max(0.0);
        Some(below.max(above))
    });
    report("pbar", n, trials, max_residual, skipped, 1e-9)
}

/// lhs = rhs of the three-qubit eigenvalue constraint, away from the guarded
/// denominator.
fn suite_constraint(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, 3);
        match mermin3_constraint(&frame, CONSTRAINT_GUARD).expect("n = 3") {
            ConstraintCheck::Evaluated { lhs, rhs } => Some((lhs - rhs).abs()),
            ConstraintCheck::Skipped { .. } => None,
        }
    });
    report("mermin3-constraint", n, trials, max_residual, skipped, 1e-6)
}

/// Reflection symmetries: U[k] B U[k] = -B and the double reflection
/// restores B, for random coefficient tables.
fn suite_symmetry(n: usize, trials: usize, seed: u64) -> SuiteReport {
    let (max_residual, skipped) = run_trials(n, trials, seed, |rng| {
        let frame = random_planar_frame(rng, n);
        let beta: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let coeffs = BellCoefficients::new(n, beta).expect("nonzero with probability 1");
        let b = build_matrix(&coeffs, &frame);
        let minus_b = b.scale(Complex64::new(-1.0, 0.0));
        let mut worst = 0.0f64;
        for k in 1..=n {
            let u = reflection_operator(n, k).expect("k in range");
            let conj = u.matmul(&b).matmul(&u);
            worst = worst.max(conj.max_abs_diff(&minus_b));
            let l = rng.gen_range(1..=n);
            let ul = reflection_operator(n, l).expect("l in range");
            let double = ul.matmul(&conj).matmul(&ul);
            worst = worst.max(double.max_abs_diff(&b));
        }
        Some(worst)
    });
    report("symmetry", n, trials, max_residual, skipped, 1e-10)
}

fn report(
    name: &str,
    n: usize,
    trials: usize,
    max_residual: f64,
    skipped: usize,
    tolerance: f64,
) -> SuiteReport {
    SuiteReport {
        identity_name: name.to_string(),
        n,
        trials,
        max_residual,
        skipped,
        tolerance,
        verdict: max_residual <= tolerance,
    }
}
