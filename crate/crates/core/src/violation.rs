//! Violation numerics: the psi_N(phi) family, expectation maximization over
//! measurement directions, the phi sweep with its violation threshold, the
//! three-qubit correlation-tensor bounds, and the reference states for the
//! bounds table.
//!
//! The maximizers are multistart Nelder-Mead searches over spherical angles,
//! deterministic under a base seed: start i draws its initial point from a
//! seed derived from (base, i), and the aggregation is a pure max-reduce, so
//! the reported value is non-decreasing in the number of restarts.

use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, ComplexVector, UnitVector3};
use crate::operator::{
    mk_from_observables, polynomial_from_observables, BellCoefficients, LocalFrame,
    MeasurementFrame,
};
use crate::optimize::{derive_seed, nelder_mead, SimplexOptions};
use crate::state::QuantumState;

/// Which Bell polynomial the maximizer drives.
#[derive(Debug, Clone)]
pub enum OperatorFamily {
    /// The Mermin-Klyshko operator of the state's qubit count.
    MerminKlyshko,
    /// An explicit coefficient table (kept fixed; only angles are optimized).
    General(BellCoefficients),
}

/// Multistart search configuration.
#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    /// Base seed; every derived quantity is deterministic in it.
    pub seed: u64,
    /// Number of random restarts on top of the two seeded starts
    /// (canonical-planar and all-z). Zero selects a per-n default.
    pub restarts: usize,
    /// Simplex options shared by all starts.
    pub simplex: SimplexOptions,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            seed: 0xB311,
            restarts: 0,
            simplex: SimplexOptions::default(),
        }
    }
}

impl OptimizeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn restarts_for(&self, n: usize) -> usize {
        if self.restarts > 0 {
            self.restarts
        } else {
            default_restarts(n)
        }
    }
}

/// Default restart counts: 64 at n = 3, halved per extra qubit, floor 8.
pub fn default_restarts(n: usize) -> usize {
    match n {
        0..=3 => 64,
        4 => 32,
        5 => 16,
        _ => 8,
    }
}

/// Outcome of a violation maximization.
#[derive(Debug, Clone)]
pub struct ViolationResult {
    /// Best expectation found; a certified lower bound on the true maximum.
    pub value: f64,
    /// The measurement frame achieving it (with per-qubit 3D planes).
    pub achieving_frame: MeasurementFrame,
    /// Total simplex starts that contributed to the max-reduce.
    pub restarts_used: usize,
    /// Whether the winning descent met the simplex convergence criterion.
    pub converged: bool,
}

/// The family cos(phi)|0...0> + sin(phi)|1...1>, phi in [0, pi/4].
pub fn psi_family(n: usize, phi: f64) -> Result<QuantumState> {
    if !(0.0..=FRAC_PI_4 + 1e-15).contains(&phi) {
        return Err(Error::InvalidInput(format!(
            "phi = {phi} outside [0, pi/4]"
        )));
    }
    let dim = 1usize << n;
    let mut v = ComplexVector::zeros(dim);
    v.set(0, Complex64::new(phi.cos(), 0.0));
    v.set(dim - 1, Complex64::new(phi.sin(), 0.0));
    QuantumState::pure(n, v)
}

/// The GHZ state (|0^n> + |1^n>)/sqrt 2.
pub fn ghz_state(n: usize) -> QuantumState {
    psi_family(n, FRAC_PI_4).expect("pi/4 is in range")
}

/// Exact two-qubit maximum: S_2(phi) = sqrt(1 + sin^2 2 phi).
pub fn s2_exact(phi: f64) -> f64 {
    (1.0 + (2.0 * phi).sin().powi(2)).sqrt()
}

/// The guessed maximum S_N^(g)(phi) = max(2^{(N-1)/2} sin 2 phi, f_N(phi))
/// with f_N = 1 for even N and cos 2 phi for odd N. Defined for n >= 3.
pub fn s_guess(n: usize, phi: f64) -> f64 {
    assert!(n >= 3, "the guess formula applies for n >= 3");
    let ghz_branch = 2f64.powf((n as f64 - 1.0) / 2.0) * (2.0 * phi).sin();
    let product_branch = if n % 2 == 0 { 1.0 } else { (2.0 * phi).cos() };
    ghz_branch.max(product_branch)
}

/// Eq.-style closed maximization max_chi (A cos chi + B sin chi).
pub fn max_cos_combination(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

// ---------------------------------------------------------------------------
// Direct expectation maximization over 4n spherical angles.
// ---------------------------------------------------------------------------

/// Expectation without re-validating the (fixed, already checked) state.
fn raw_expectation(m: &ComplexMatrix, state: &QuantumState) -> f64 {
    match state.pure_vector() {
        Some(psi) => psi.inner(&m.matvec(psi)).re,
        None => {
            let rho = state.density_matrix();
            let d = m.dim();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..d {
                for k in 0..d {
                    acc += m.get(i, k) * rho.get(k, i);
                }
            }
            acc.re
        }
    }
}

fn directions_from_params(n: usize, x: &[f64]) -> Vec<(UnitVector3, UnitVector3)> {
    (0..n)
        .map(|k| {
            (
                UnitVector3::from_spherical(x[4 * k], x[4 * k + 1]),
                UnitVector3::from_spherical(x[4 * k + 2], x[4 * k + 3]),
            )
        })
        .collect()
}

fn family_matrix(family: &OperatorFamily, n: usize, x: &[f64]) -> ComplexMatrix {
    let observables: Vec<[ComplexMatrix; 2]> = directions_from_params(n, x)
        .iter()
        .map(|(a, ap)| [crate::linalg::pauli(a), crate::linalg::pauli(ap)])
        .collect();
    match family {
        OperatorFamily::MerminKlyshko => {
            mk_from_observables(&observables)
                .expect("n >= 2 checked at entry")
                .0
        }
        OperatorFamily::General(coefficients) => {
            polynomial_from_observables(coefficients, &observables)
        }
    }
}

/// The canonical planar start: a_k = e_x, a_k' = e_y for every qubit.
fn canonical_start(n: usize) -> Vec<f64> {
    let mut x = vec![0.0; 4 * n];
    for k in 0..n {
        x[4 * k] = FRAC_PI_2;
        x[4 * k + 1] = 0.0;
        x[4 * k + 2] = FRAC_PI_2;
        x[4 * k + 3] = FRAC_PI_2;
    }
    x
}

/// The degenerate classical start: every direction along e_z.
fn all_z_start(n: usize) -> Vec<f64> {
    vec![0.0; 4 * n]
}

struct SearchOutcome {
    value: f64,
    x: Vec<f64>,
    converged: bool,
    starts: usize,
}

/// Multistart maximization of an objective over `dim` angles. Start list:
/// the provided seeded starts, then `restarts` random draws. Deterministic
/// in (seed, restarts); the winner is the first index attaining the max.
fn multistart_maximize<F>(
    objective: F,
    dim: usize,
    seeded: &[Vec<f64>],
    restarts: usize,
    seed: u64,
    simplex: &SimplexOptions,
) -> SearchOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let total = seeded.len() + restarts;
    let results: Vec<(f64, Vec<f64>, bool)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start: Vec<f64> = if i < seeded.len() {
                seeded[i].clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, (i - seeded.len()) as u64));
                (0..dim)
                    .map(|j| {
                        if j % 2 == 0 {
                            rng.gen_range(0.0..PI)
                        } else {
                            rng.gen_range(0.0..TAU)
                        }
                    })
                    .collect()
            };
            let first = nelder_mead(|x| -objective(x), &start, simplex);
            // Polish with a fresh, small simplex around the found point.
            let polish_opts = SimplexOptions {
                initial_step: 5e-3,
                ..simplex.clone()
            };
            let polished = nelder_mead(|x| -objective(x), &first.x, &polish_opts);
            if polished.value <= first.value {
                (-polished.value, polished.x, polished.converged)
            } else {
                (-first.value, first.x, first.converged)
            }
        })
        .collect();
    let mut best = 0usize;
    for (i, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = i;
        }
    }
    let (value, x, converged) = results.into_iter().nth(best).expect("non-empty starts");
    SearchOutcome {
        value,
        x,
        converged,
        starts: total,
    }
}

fn maximize_family(
    state: &QuantumState,
    family: &OperatorFamily,
    config: &OptimizeConfig,
    warm: Option<&[f64]>,
) -> Result<SearchOutcome> {
    let n = state.n();
    if let OperatorFamily::General(c) = family {
        if c.n() != n {
            return Err(Error::DimensionMismatch {
                left: c.n(),
                right: n,
            });
        }
    }
    if matches!(family, OperatorFamily::MerminKlyshko) && n < 2 {
        return Err(Error::InvalidInput(format!(
            "MK operators need n >= 2, got {n}"
        )));
    }
    let mut seeded = vec![canonical_start(n), all_z_start(n)];
    if let Some(w) = warm {
        seeded.push(w.to_vec());
    }
    let objective = |x: &[f64]| raw_expectation(&family_matrix(family, n, x), state);
    Ok(multistart_maximize(
        objective,
        4 * n,
        &seeded,
        config.restarts_for(n),
        config.seed,
        &config.simplex,
    ))
}

/// Maximizes <B(a)> over all 2n measurement directions (two spherical angles
/// per direction, 4n parameters). The returned value is a certified lower
/// bound on the true maximum; `converged` reflects the winning descent.
pub fn optimize_expectation(
    state: &QuantumState,
    family: &OperatorFamily,
    config: &OptimizeConfig,
) -> Result<ViolationResult> {
    let outcome = maximize_family(state, family, config, None)?;
    Ok(ViolationResult {
        value: outcome.value,
        achieving_frame: MeasurementFrame::from_directions(&directions_from_params(
            state.n(),
            &outcome.x,
        ))?,
        restarts_used: outcome.starts,
        converged: outcome.converged,
    })
}

// ---------------------------------------------------------------------------
// The phi sweep.
// ---------------------------------------------------------------------------

/// One grid point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub phi: f64,
    pub s_n: f64,
    pub s_guess: f64,
    pub converged: bool,
}

/// Sweep results plus the empirical threshold and guess deviation.
#[derive(Debug, Clone)]
pub struct PhiSweep {
    pub n: usize,
    pub points: Vec<SweepPoint>,
    /// phi where S_N crosses 1, refined by bisection; None if no crossing
    /// is bracketed by the grid.
    pub threshold_phi: Option<f64>,
    /// max over the grid of S_N - S_N^(g).
    pub max_deviation: f64,
    /// phi attaining it.
    pub max_deviation_phi: f64,
}

/// Margin above 1 targeted by the threshold bisection. S_N(phi) sits exactly
/// at 1 on a whole interval for even N, so the crossing of 1 itself is
/// degenerate; aiming slightly above it biases phi_N by under 1e-4.
const THRESHOLD_MARGIN: f64 = 1e-4;

/// Sweeps S_N over a uniform phi grid on [0, pi/4], warm-starting each point
/// from the previous one, and locates the violation threshold phi_N.
pub fn sweep_phi(n: usize, grid_points: usize, config: &OptimizeConfig) -> Result<PhiSweep> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "sweeps cover n >= 3 (n = 2 has the exact closed form), got {n}"
        )));
    }
    if grid_points < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points".into()));
    }
    let family = OperatorFamily::MerminKlyshko;
    let phis: Vec<f64> = (0..grid_points)
        .map(|i| FRAC_PI_4 * i as f64 / (grid_points - 1) as f64)
        .collect();

    let mut points = Vec::with_capacity(grid_points);
    let mut solutions: Vec<Vec<f64>> = Vec::with_capacity(grid_points);
    let mut warm: Option<Vec<f64>> = None;
    for &phi in &phis {
        let state = psi_family(n, phi)?;
        let outcome = maximize_family(&state, &family, config, warm.as_deref())?;
        points.push(SweepPoint {
            phi,
            s_n: outcome.value,
            s_guess: s_guess(n, phi),
            converged: outcome.converged,
        });
        warm = Some(outcome.x.clone());
        solutions.push(outcome.x);
    }

    // Deviation from the guess.
    let (mut max_deviation, mut max_deviation_phi) = (f64::NEG_INFINITY, 0.0);
    for p in &points {
        if p.s_n - p.s_guess > max_deviation {
            max_deviation = p.s_n - p.s_guess;
            max_deviation_phi = p.phi;
        }
    }

    // Threshold: bracket the crossing of 1 + margin on the grid, then bisect.
    let target = 1.0 + THRESHOLD_MARGIN;
    let mut threshold_phi = None;
    for w in 0..points.len() - 1 {
        if points[w].s_n < target && points[w + 1].s_n >= target {
            let (mut lo, mut hi) = (points[w].phi, points[w + 1].phi);
            let mut warm = solutions[w + 1].clone();
            for _ in 0..40 {
                if hi - lo < 1e-5 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let state = psi_family(n, mid)?;
                let outcome = maximize_family(&state, &family, config, Some(&warm))?;
                warm = outcome.x;
                if outcome.value >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            threshold_phi = Some(0.5 * (lo + hi));
            break;
        }
    }

    Ok(PhiSweep {
        n,
        points,
        threshold_phi,
        max_deviation,
        max_deviation_phi,
    })
}

// ---------------------------------------------------------------------------
// Three-qubit correlation tensors and bounds.
// ---------------------------------------------------------------------------

/// The four correlations entering the Mermin-operator decomposition, in the
/// per-qubit frames chosen: t_xxx, t_xyy, t_yxy, t_yyx (first index = qubit 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor3 {
    pub t_xxx: f64,
    pub t_xyy: f64,
    pub t_yxy: f64,
    pub t_yyx: f64,
}

impl CorrelationTensor3 {
    pub fn as_array(&self) -> [f64; 4] {
        [self.t_xxx, self.t_xyy, self.t_yxy, self.t_yyx]
    }

    /// Root-sum-square of the four entries (the upper-bound objective).
    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|t| t * t).sum::<f64>().sqrt()
    }
}

/// Computes the four correlations for a three-qubit state in the given
/// per-qubit frames.
pub fn correlation_tensor(state: &QuantumState, axes: &[LocalFrame]) -> Result<CorrelationTensor3> {
    if state.n() != 3 || axes.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "correlation tensors are three-qubit objects, got n = {} with {} frames",
            state.n(),
            axes.len()
        )));
    }
    let component = |choice: [bool; 3]| -> f64 {
        // choice[k] selects y_hat on qubit k+1. Factor order: qubit 3 first.
        let ops: Vec<ComplexMatrix> = (0..3)
            .rev()
            .map(|k| {
                let axis = if choice[k] {
                    axes[k].y_hat()
                } else {
                    axes[k].x_hat()
                };
                crate::linalg::pauli(&axis)
            })
            .collect();
        let refs: Vec<&ComplexMatrix> = ops.iter().collect();
        let m = crate::linalg::kron_all(&refs).expect("8x8 is within cap");
        raw_expectation(&m, state)
    };
    Ok(CorrelationTensor3 {
        t_xxx: component([false, false, false]),
        t_xyy: component([false, true, true]),
        t_yxy: component([true, false, true]),
        t_yyx: component([true, true, false]),
    })
}

/// Tr(B_3 rho) from the correlation tensor and the four family eigenvalues:
/// the mu-weighted combination with mu_{s1 s2 s3 s4} = (s1 l1 + s2 l2 +
/// s3 l3 + s4 l4)/4.
pub fn mermin3_from_tensor(t: &CorrelationTensor3, lambdas: &[f64; 4]) -> f64 {
    let mu = |signs: [f64; 4]| -> f64 {
        0.25 * signs.iter().zip(lambdas).map(|(s, l)| s * l).sum::<f64>()
    };
    mu([1.0, 1.0, 1.0, 1.0]) * t.t_xxx
        + mu([-1.0, 1.0, 1.0, -1.0]) * t.t_xyy
        + mu([-1.0, 1.0, -1.0, 1.0]) * t.t_yxy
        + mu([-1.0, -1.0, 1.0, 1.0]) * t.t_yyx
}

/// Per-qubit frame from three parameters: two spherical angles pick the
/// plane normal, the third rotates x_hat within the plane.
fn axes_from_params(p: &[f64]) -> LocalFrame {
    let normal = UnitVector3::from_spherical(p[0], p[1]);
    let e = if normal.x().abs() < 0.9 {
        (1.0, 0.0, 0.0)
    } else {
        (0.0, 1.0, 0.0)
    };
    let dot = normal.x() * e.0 + normal.y() * e.1 + normal.z() * e.2;
    let x0 = UnitVector3::normalized(e.0 - dot * normal.x(), e.1 - dot * normal.y(), e.2 - dot * normal.z())
        .expect("completion of a unit normal");
    let y0c = normal.cross(&x0);
    let y0 = UnitVector3::new(y0c[0], y0c[1], y0c[2]).expect("cross of orthonormal pair");
    let (s, c) = p[2].sin_cos();
    let x_hat = UnitVector3::normalized(
        c * x0.x() + s * y0.x(),
        c * x0.y() + s * y0.y(),
        c * x0.z() + s * y0.z(),
    )
    .expect("rotation preserves norm");
    let y_hat = UnitVector3::normalized(
        -s * x0.x() + c * y0.x(),
        -s * x0.y() + c * y0.y(),
        -s * x0.z() + c * y0.z(),
    )
    .expect("rotation preserves norm");
    LocalFrame::new(x_hat, y_hat).expect("rotated pair stays orthonormal")
}

fn frames_from_params(x: &[f64]) -> Vec<LocalFrame> {
    x.chunks_exact(3).map(axes_from_params).collect()
}

/// Frame whose axes are the optimized planes, exposing x_hat/y_hat as the
/// unprimed/primed directions.
fn frame_from_axes(axes: Vec<LocalFrame>) -> MeasurementFrame {
    let n = axes.len();
    MeasurementFrame::with_axes(&vec![0.0; n], &vec![FRAC_PI_2; n], axes)
        .expect("axes are orthonormal by construction")
}

fn bound_search<F>(
    state: &QuantumState,
    config: &OptimizeConfig,
    score: F,
) -> Result<ViolationResult>
where
    F: Fn(&CorrelationTensor3) -> f64 + Sync,
{
    if state.n() != 3 {
        return Err(Error::InvalidInput(format!(
            "the tensor bounds are three-qubit constructions, got n = {}",
            state.n()
        )));
    }
    let objective = |x: &[f64]| {
        let tensor = correlation_tensor(state, &frames_from_params(x))
            .expect("3 frames for 3 qubits");
        score(&tensor)
    };
    // Seeded start: the standard planar frame on every qubit.
    let seeded = vec![vec![0.0; 9]];
    let outcome = multistart_maximize(
        objective,
        9,
        &seeded,
        config.restarts_for(3),
        config.seed,
        &config.simplex,
    );
    Ok(ViolationResult {
        value: outcome.value,
        achieving_frame: frame_from_axes(frames_from_params(&outcome.x)),
        restarts_used: outcome.starts,
        converged: outcome.converged,
    })
}

/// Upper bound S+ = max over frames of sqrt(t_xxx^2 + t_xyy^2 + t_yxy^2 +
/// t_yyx^2); nine frame parameters, three per qubit.
pub fn bound_upper(state: &QuantumState, config: &OptimizeConfig) -> Result<ViolationResult> {
    bound_search(state, config, CorrelationTensor3::norm)
}

/// Lower bound S- = max over frames of |t_xxx - t_xyy - t_yxy - t_yyx| / 2,
/// the value realized by the eigenvalue choice lambda_1 = +-2 (the rest
/// vanishing by the trace rule).
pub fn bound_lower(state: &QuantumState, config: &OptimizeConfig) -> Result<ViolationResult> {
    bound_search(state, config, |t| {
        0.5 * (t.t_xxx - t.t_xyy - t.t_yxy - t.t_yyx).abs()
    })
}

// ---------------------------------------------------------------------------
// Reference states.
// ---------------------------------------------------------------------------

/// The four three-qubit reference states of the bounds table, normalized:
/// the W state, the two W-flavored superpositions, and the biseparable
/// |0>(|00> + |11>).
pub fn table1_states() -> Vec<(&'static str, QuantumState)> {
    let one = Complex64::new(1.0, 0.0);
    let c5 = (PI / 5.0).cos();
    let s5 = (PI / 5.0).sin();
    let w = crate::state::pure_from_kets(
        3,
        &[("011", one), ("101", one), ("110", one)],
    )
    .expect("W state");
    let w_amp = s5 / 3f64.sqrt();
    let w_mix = crate::state::pure_from_kets(
        3,
        &[
            ("000", Complex64::new(c5, 0.0)),
            ("011", Complex64::new(w_amp, 0.0)),
            ("101", Complex64::new(w_amp, 0.0)),
            ("110", Complex64::new(w_amp, 0.0)),
        ],
    )
    .expect("W superposition");
    let asym = crate::state::pure_from_kets(
        3,
        &[
            ("000", Complex64::new(c5 * c5, 0.0)),
            ("001", Complex64::new(c5, 0.0)),
            ("111", Complex64::new(s5, 0.0)),
        ],
    )
    .expect("asymmetric state");
    let biseparable = crate::state::pure_from_kets(3, &[("000", one), ("011", one)])
        .expect("biseparable state");
    vec![
        ("w", w),
        ("w-mix", w_mix),
        ("asym", asym),
        ("biseparable", biseparable),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expectation;
    use crate::operator::BellOperator;

    fn quick_config(restarts: usize) -> OptimizeConfig {
        OptimizeConfig {
            seed: 99,
            restarts,
            simplex: SimplexOptions::default(),
        }
    }

    #[test]
    fn psi_family_examples() {
        let ghz = psi_family(3, FRAC_PI_4).unwrap();
        let v = ghz.pure_vector().unwrap();
        assert!((v.get(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v.get(7).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        let product = psi_family(4, 0.0).unwrap();
        let v = product.pure_vector().unwrap();
        assert!((v.get(0).re - 1.0).abs() < 1e-15);
        assert_eq!(
            v.as_slice().iter().filter(|c| c.norm() > 1e-15).count(),
            1
        );

        // pi/5 = 0.628 < pi/4 = 0.785, so it is a valid phi.
        assert!(psi_family(3, PI / 5.0).is_ok());
        assert!(psi_family(3, PI / 3.0).is_err());
        assert!(psi_family(3, -0.1).is_err());
    }

    #[test]
    fn s2_exact_values() {
        assert!((s2_exact(FRAC_PI_4) - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((s2_exact(0.0) - 1.0).abs() < 1e-15);
        assert!((s2_exact(PI / 8.0) - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn s_guess_values() {
        assert!((s_guess(3, FRAC_PI_4) - 2.0).abs() < 1e-15);
        assert!((s_guess(3, 0.0) - 1.0).abs() < 1e-15);
        assert!((s_guess(4, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn max_cos_combination_matches_grid_search() {
        for &(a, b) in &[(1.0, 2.0), (0.3, -0.7), (-2.0, 0.0)] {
            let grid = (0..20000)
                .map(|i| {
                    let chi = TAU * i as f64 / 20000.0;
                    a * chi.cos() + b * chi.sin()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((max_cos_combination(a, b) - grid).abs() < 1e-6);
        }
    }

    #[test]
    fn ghz_three_reaches_two() {
        let res = optimize_expectation(
            &ghz_state(3),
            &OperatorFamily::MerminKlyshko,
            &quick_config(12),
        )
        .unwrap();
        assert!((res.value - 2.0).abs() < 1e-6, "got {}", res.value);
        // The achieving frame really does produce this expectation.
        let op = BellOperator::mk(res.achieving_frame.clone()).unwrap();
        let check = expectation(op.matrix(), &ghz_state(3)).unwrap();
        assert!((check - res.value).abs() < 1e-9);
    }

    #[test]
    fn s2_curve_spot_checks() {
        let cfg = quick_config(10);
        for &phi in &[0.0, 0.2, 0.5, FRAC_PI_4] {
            let state = psi_family(2, phi).unwrap();
            let res =
                optimize_expectation(&state, &OperatorFamily::MerminKlyshko, &cfg).unwrap();
            assert!(
                (res.value - s2_exact(phi)).abs() < 1e-5,
                "phi = {phi}: {} vs {}",
                res.value,
                s2_exact(phi)
            );
        }
    }

    #[test]
    fn restart_monotonicity() {
        let state = psi_family(3, 0.19).unwrap();
        let mut last = f64::NEG_INFINITY;
        for restarts in [1, 4, 8] {
            let res = optimize_expectation(
                &state,
                &OperatorFamily::MerminKlyshko,
                &quick_config(restarts),
            )
            .unwrap();
            assert!(res.value >= last - 1e-12);
            assert_eq!(res.restarts_used, restarts + 2);
            last = res.value;
        }
    }

    #[test]
    fn correlation_tensor_ghz_canonical() {
        let axes = vec![LocalFrame::standard(); 3];
        let t = correlation_tensor(&ghz_state(3), &axes).unwrap();
        assert!((t.t_xxx - 1.0).abs() < 1e-12);
        assert!((t.t_xyy + 1.0).abs() < 1e-12);
        assert!((t.t_yxy + 1.0).abs() < 1e-12);
        assert!((t.t_yyx + 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_tensor_trivial_states() {
        let axes = vec![LocalFrame::standard(); 3];
        let mixed = QuantumState::maximally_mixed(3);
        let t = correlation_tensor(&mixed, &axes).unwrap();
        for v in t.as_array() {
            assert!(v.abs() < 1e-12);
        }
        let zero = psi_family(3, 0.0).unwrap();
        let t = correlation_tensor(&zero, &axes).unwrap();
        for v in t.as_array() {
            assert!(v.abs() < 1e-12);
        }
        // Wrong qubit count is rejected.
        assert!(correlation_tensor(&ghz_state(2), &axes[..2].to_vec()).is_err());
    }

    #[test]
    fn mermin3_from_tensor_examples() {
        let ghz_tensor = CorrelationTensor3 {
            t_xxx: 1.0,
            t_xyy: -1.0,
            t_yxy: -1.0,
            t_yyx: -1.0,
        };
        assert!((mermin3_from_tensor(&ghz_tensor, &[2.0, 0.0, 0.0, 0.0]) - 2.0).abs() < 1e-15);

        // lambda = (1,1,1,1) collapses onto t_xxx.
        let t = CorrelationTensor3 {
            t_xxx: 0.4,
            t_xyy: 0.3,
            t_yxy: -0.2,
            t_yyx: 0.9,
        };
        assert!((mermin3_from_tensor(&t, &[1.0, 1.0, 1.0, 1.0]) - 0.4).abs() < 1e-15);

        let zero = CorrelationTensor3 {
            t_xxx: 0.0,
            t_xyy: 0.0,
            t_yxy: 0.0,
            t_yyx: 0.0,
        };
        assert_eq!(mermin3_from_tensor(&zero, &[1.0, 2.0, 3.0, 4.0]), 0.0);
    }

    #[test]
    fn mu_decomposition_rebuilds_theta_zero_operator() {
        // Any operator of the form sum_i lambda_i (|Omega_i><Omega_i-bar|
        // + h.c.) over the four families (the theta = 0 eigenbasis) equals
        // the mu-weighted Pauli combination in the standard axes; so
        // mermin3_from_tensor reproduces its expectation on any state.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let families = [0b000usize, 0b100, 0b010, 0b110]; // 000, 001, 010, 011
        for _ in 0..10 {
            let lambdas: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let mut b = ComplexMatrix::zeros(8);
            for (bits, lambda) in families.iter().zip(lambdas) {
                let omega = ComplexVector::basis_state(8, *bits);
                let omega_bar = ComplexVector::basis_state(8, bits ^ 0b111);
                b = b
                    .add(&omega.outer(&omega_bar).scale(Complex64::new(lambda, 0.0)))
                    .add(&omega_bar.outer(&omega).scale(Complex64::new(lambda, 0.0)));
            }
            let axes = vec![LocalFrame::standard(); 3];
            for (name, state) in table1_states() {
                let t = correlation_tensor(&state, &axes).unwrap();
                let via_tensor = mermin3_from_tensor(&t, &lambdas);
                let direct = expectation(&b, &state).unwrap();
                assert!(
                    (via_tensor - direct).abs() < 1e-10,
                    "{name}: {via_tensor} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn bounds_reject_wrong_qubit_count() {
        let cfg = quick_config(2);
        assert!(bound_upper(&ghz_state(2), &cfg).is_err());
        assert!(bound_lower(&ghz_state(4), &cfg).is_err());
    }

    #[test]
    fn ghz_bounds_are_tight() {
        let cfg = quick_config(8);
        let up = bound_upper(&ghz_state(3), &cfg).unwrap();
        let low = bound_lower(&ghz_state(3), &cfg).unwrap();
        assert!((up.value - 2.0).abs() < 1e-6, "S+ = {}", up.value);
        assert!((low.value - 2.0).abs() < 1e-6, "S- = {}", low.value);
    }

    #[test]
    fn table1_state_structure() {
        let states = table1_states();
        assert_eq!(states.len(), 4);
        let w = &states[0].1;
        let v = w.pure_vector().unwrap();
        let amp = 1.0 / 3f64.sqrt();
        for idx in [6usize, 5, 3] {
            assert!((v.get(idx).re - amp).abs() < 1e-12);
        }
        // Biseparable state lives on |000> and |011>.
        let b = &states[3].1;
        let v = b.pure_vector().unwrap();
        assert!((v.get(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v.get(6).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // All normalized.
        for (name, s) in &states {
            if let Some(v) = s.pure_vector() {
                assert!((v.norm() - 1.0).abs() < 1e-12, "{name} not normalized");
            }
        }
    }
}
