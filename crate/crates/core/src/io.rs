//! File formats and deterministic text output.
//!
//! Operator spec files and state files are JSON; tabular output is CSV with
//! '.' decimals and 12 significant digits, so identical runs produce
//! byte-identical files.
//!
//! Bit conventions for external data: bitstrings (beta keys, omega columns)
//! are written with qubit 1 leftmost. State vectors are indexed so that
//! index i corresponds to the ket |b_1 b_2 ... b_n> where b_1 ... b_n is i
//! in binary, qubit 1 most significant; this is the order a human reads
//! |011> in. Internally qubit 1 sits at the least significant bit, so
//! loading reverses the index bits.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, ComplexVector, UnitVector3};
use crate::operator::{BellCoefficients, BellOperator, LocalFrame, MeasurementFrame};
use crate::spectral::SpectralDecomposition;
use crate::state::QuantumState;
use crate::violation::PhiSweep;

/// Formats with `sig` significant digits, trimming trailing zeros, printf
/// %g style: plain decimal for moderate exponents, scientific otherwise.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let formatted = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_str) = formatted.split_once('e').expect("scientific format");
    let exp: i32 = exp_str.parse().expect("valid exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= -4 && (exp as i64) < sig as i64 {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if int_len >= digits.len() {
                out.push_str(&digits);
                out.push_str(&"0".repeat(int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                let frac = digits[int_len..].trim_end_matches('0');
                if !frac.is_empty() {
                    out.push('.');
                    out.push_str(frac);
                }
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp - 1) as usize));
            out.push_str(digits.trim_end_matches('0'));
        }
    } else {
        let trimmed = digits.trim_end_matches('0');
        let (first, rest) = trimmed.split_at(1);
        out.push_str(first);
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}

/// The CSV float convention: 12 significant digits.
pub fn csv_float(x: f64) -> String {
    format_sig(x, 12)
}

// ---------------------------------------------------------------------------
// Operator spec files.
// ---------------------------------------------------------------------------

/// Optional per-qubit plane in an operator spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxesSpec {
    pub x: [f64; 3],
    pub y: [f64; 3],
}

/// JSON schema for an operator: coefficient table keyed by bitstrings
/// (qubit 1 leftmost, missing keys are zero) plus the angle lists, and
/// optionally explicit per-qubit planes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorSpecFile {
    pub n: usize,
    pub beta: BTreeMap<String, f64>,
    pub alpha: Vec<f64>,
    pub alpha_prime: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<AxesSpec>>,
}

impl OperatorSpecFile {
    pub fn to_operator(&self) -> Result<BellOperator> {
        let n = self.n;
        if n == 0 || n > crate::linalg::MAX_QUBITS {
            return Err(Error::Format(format!(
                "field 'n': {n} out of range 1..={}",
                crate::linalg::MAX_QUBITS
            )));
        }
        if self.alpha.len() != n || self.alpha_prime.len() != n {
            return Err(Error::Format(format!(
                "fields 'alpha'/'alpha_prime': expected {n} entries each, got {} and {}",
                self.alpha.len(),
                self.alpha_prime.len()
            )));
        }
        let mut beta = vec![0.0; 1 << n];
        for (key, value) in &self.beta {
            if key.len() != n || key.bytes().any(|b| b != b'0' && b != b'1') {
                return Err(Error::Format(format!(
                    "field 'beta': key {key:?} is not an {n}-bit string"
                )));
            }
            // Qubit 1 is the leftmost character and the lowest index bit.
            let mut s = 0usize;
            for (i, b) in key.bytes().enumerate() {
                if b == b'1' {
                    s |= 1 << i;
                }
            }
            beta[s] = *value;
        }
        let coefficients = BellCoefficients::new(n, beta)
            .map_err(|e| Error::Format(format!("field 'beta': {e}")))?;
        let frame = match &self.axes {
            None => MeasurementFrame::planar(&self.alpha, &self.alpha_prime)?,
            Some(axes) => {
                if axes.len() != n {
                    return Err(Error::Format(format!(
                        "field 'axes': expected {n} entries, got {}",
                        axes.len()
                    )));
                }
                let frames = axes
                    .iter()
                    .map(|a| {
                        LocalFrame::new(
                            UnitVector3::new(a.x[0], a.x[1], a.x[2])?,
                            UnitVector3::new(a.y[0], a.y[1], a.y[2])?,
                        )
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Format(format!("field 'axes': {e}")))?;
                MeasurementFrame::with_axes(&self.alpha, &self.alpha_prime, frames)?
            }
        };
        BellOperator::new(coefficients, frame)
    }

    /// The MK operator at the given planar angles, as a writable spec.
    pub fn mk(n: usize, alpha: &[f64], alpha_prime: &[f64]) -> Result<Self> {
        let coefficients = BellCoefficients::mk(n)?;
        let mut beta = BTreeMap::new();
        for s in 0..1usize << n {
            let value = coefficients.get(s);
            if value != 0.0 {
                let key: String = (0..n)
                    .map(|k| if s >> k & 1 == 1 { '1' } else { '0' })
                    .collect();
                beta.insert(key, value);
            }
        }
        Ok(Self {
            n,
            beta,
            alpha: alpha.to_vec(),
            alpha_prime: alpha_prime.to_vec(),
            axes: None,
        })
    }
}

pub fn load_operator_spec(path: &Path) -> Result<BellOperator> {
    let text = std::fs::read_to_string(path)?;
    let spec: OperatorSpecFile = serde_json::from_str(&text)?;
    spec.to_operator()
}

// ---------------------------------------------------------------------------
// State files.
// ---------------------------------------------------------------------------

/// JSON schema for a state: a pure amplitude list or a density matrix, each
/// entry an [re, im] pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<[f64; 2]>>>,
}

/// Reverses the low n bits of an index (external qubit-1-most-significant
/// order to the internal layout).
fn reverse_bits(index: usize, n: usize) -> usize {
    let mut out = 0usize;
    for k in 0..n {
        if index >> k & 1 == 1 {
            out |= 1 << (n - 1 - k);
        }
    }
    out
}

/// A loaded state plus the normalization defect of the raw input, which the
/// CLI reports as a warning when above 1e-6.
pub struct LoadedState {
    pub state: QuantumState,
    pub normalization_defect: f64,
}

impl StateFile {
    pub fn to_state(&self) -> Result<LoadedState> {
        let n = self.n;
        if n == 0 || n > crate::linalg::MAX_QUBITS {
            return Err(Error::Format(format!(
                "field 'n': {n} out of range 1..={}",
                crate::linalg::MAX_QUBITS
            )));
        }
        let dim = 1usize << n;
        match (&self.amplitudes, &self.rho) {
            (Some(amps), None) => {
                if amps.len() != dim {
                    return Err(Error::Format(format!(
                        "field 'amplitudes': expected {dim} entries, got {}",
                        amps.len()
                    )));
                }
                let mut v = ComplexVector::zeros(dim);
                for (ext, amp) in amps.iter().enumerate() {
                    v.set(reverse_bits(ext, n), Complex64::new(amp[0], amp[1]));
                }
                let (state, defect) = QuantumState::pure_renormalized(n, v)?;
                Ok(LoadedState {
                    state,
                    normalization_defect: defect,
                })
            }
            (None, Some(rows)) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::Format(format!(
                        "field 'rho': expected a {dim}x{dim} matrix"
                    )));
                }
                let mut m = ComplexMatrix::zeros(dim);
                for (i, row) in rows.iter().enumerate() {
                    for (j, entry) in row.iter().enumerate() {
                        m.set(
                            reverse_bits(i, n),
                            reverse_bits(j, n),
                            Complex64::new(entry[0], entry[1]),
                        );
                    }
                }
                let trace = m.trace();
                let defect = (trace.re - 1.0).abs().max(trace.im.abs());
                if trace.re <= 0.0 {
                    return Err(Error::Format(format!(
                        "field 'rho': trace {trace} is not positive"
                    )));
                }
                let state =
                    QuantumState::mixed(n, m.scale(Complex64::new(1.0 / trace.re, 0.0)))?;
                Ok(LoadedState {
                    state,
                    normalization_defect: defect,
                })
            }
            _ => Err(Error::Format(
                "state file needs exactly one of 'amplitudes' or 'rho'".into(),
            )),
        }
    }
}

pub fn load_state(path: &Path) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path)?;
    let file: StateFile = serde_json::from_str(&text)?;
    file.to_state()
}

// ---------------------------------------------------------------------------
// CSV emitters.
// ---------------------------------------------------------------------------

/// Spectrum dump: one row per configuration in basis-index order.
pub fn spectrum_csv(spectrum: &SpectralDecomposition) -> String {
    let mut out = String::from("omega_bits,theta,lambda,f_re,f_im\n");
    for pair in spectrum.pairs() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            pair.label.bitstring(),
            csv_float(pair.theta),
            csv_float(pair.lambda),
            csv_float(pair.f.re),
            csv_float(pair.f.im),
        ));
    }
    out
}

/// One spectrum row for JSON output.
#[derive(Debug, Serialize)]
pub struct SpectrumRow {
    pub omega_bits: String,
    pub theta: f64,
    pub lambda: f64,
    pub f_re: f64,
    pub f_im: f64,
}

pub fn spectrum_rows(spectrum: &SpectralDecomposition) -> Vec<SpectrumRow> {
    spectrum
        .pairs()
        .iter()
        .map(|p| SpectrumRow {
            omega_bits: p.label.bitstring(),
            theta: p.theta,
            lambda: p.lambda,
            f_re: p.f.re,
            f_im: p.f.im,
        })
        .collect()
}

/// Sweep dump plus a trailing summary comment with the threshold and the
/// worst guess deviation.
pub fn sweep_csv(sweep: &PhiSweep) -> String {
    let mut out = String::from("phi,s_n,s_guess,converged\n");
    for p in &sweep.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_float(p.phi),
            csv_float(p.s_n),
            csv_float(p.s_guess),
            p.converged,
        ));
    }
    let threshold = match sweep.threshold_phi {
        Some(phi) => csv_float(phi),
        None => "none".to_string(),
    };
    out.push_str(&format!(
        "# n={} phi_threshold={} max_deviation={} at_phi={}\n",
        sweep.n,
        threshold,
        csv_float(sweep.max_deviation),
        csv_float(sweep.max_deviation_phi),
    ));
    out
}

/// Bounds rows: state name, lower bound, direct optimum, upper bound.
pub fn bounds_csv(rows: &[(String, f64, f64, f64)]) -> String {
    let mut out = String::from("state,s_minus,s_rho,s_plus\n");
    for (name, s_minus, s_rho, s_plus) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            name,
            csv_float(*s_minus),
            csv_float(*s_rho),
            csv_float(*s_plus),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_sig_cases() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(format_sig(-1.5, 12), "-1.5");
        assert_eq!(format_sig(2.0f64.sqrt(), 12), "1.41421356237");
        assert_eq!(format_sig(1e-5, 12), "1e-5");
        assert_eq!(format_sig(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(format_sig(100.0, 12), "100");
        assert_eq!(format_sig(-0.0001, 12), "-0.0001");
        assert_eq!(format_sig(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_sig(f64::INFINITY, 12), "inf");
    }

    #[test]
    fn operator_spec_roundtrip() {
        let spec = OperatorSpecFile::mk(2, &[0.0, 0.0], &[1.5707963267948966, 1.5707963267948966])
            .unwrap();
        let json = serde_json::to_string_pretty(&spec).unwrap();
        let parsed: OperatorSpecFile = serde_json::from_str(&json).unwrap();
        let op = parsed.to_operator().unwrap();
        assert_eq!(op.n(), 2);
        // CHSH table survives the bitstring mapping.
        assert_eq!(op.coefficients().get(0b00), 0.5);
        assert_eq!(op.coefficients().get(0b11), -0.5);
    }

    #[test]
    fn operator_spec_beta_keying() {
        // Key "01" means s_1 = 0, s_2 = 1, i.e. internal index 0b10.
        let mut beta = BTreeMap::new();
        beta.insert("01".to_string(), 1.0);
        let spec = OperatorSpecFile {
            n: 2,
            beta,
            alpha: vec![0.0, 0.0],
            alpha_prime: vec![1.0, 1.0],
            axes: None,
        };
        let op = spec.to_operator().unwrap();
        assert_eq!(op.coefficients().get(0b10), 1.0);
        assert_eq!(op.coefficients().get(0b01), 0.0);
    }

    #[test]
    fn operator_spec_rejects_bad_fields() {
        let mut beta = BTreeMap::new();
        beta.insert("0xz".to_string(), 1.0);
        let spec = OperatorSpecFile {
            n: 3,
            beta,
            alpha: vec![0.0; 3],
            alpha_prime: vec![0.0; 3],
            axes: None,
        };
        assert!(matches!(spec.to_operator(), Err(Error::Format(_))));
    }

    #[test]
    fn state_file_bit_order() {
        // External index 3 = |011> (qubit 1 leftmost) = internal index 6.
        let mut amps = vec![[0.0, 0.0]; 8];
        amps[3] = [1.0, 0.0];
        let file = StateFile {
            n: 3,
            amplitudes: Some(amps),
            rho: None,
        };
        let loaded = file.to_state().unwrap();
        assert!(loaded.normalization_defect < 1e-12);
        let v = loaded.state.pure_vector().unwrap();
        assert!((v.get(6).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_file_renormalizes_with_defect() {
        let file = StateFile {
            n: 1,
            amplitudes: Some(vec![[2.0, 0.0], [0.0, 0.0]]),
            rho: None,
        };
        let loaded = file.to_state().unwrap();
        assert!((loaded.normalization_defect - 3.0).abs() < 1e-12);
        assert!((loaded.state.pure_vector().unwrap().get(0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_file_rho_roundtrip() {
        // Maximally mixed single qubit.
        let file = StateFile {
            n: 1,
            amplitudes: None,
            rho: Some(vec![
                vec![[0.5, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [0.5, 0.0]],
            ]),
        };
        let loaded = file.to_state().unwrap();
        assert!(!loaded.state.is_pure());
        // Both present is rejected.
        let bad = StateFile {
            n: 1,
            amplitudes: Some(vec![[1.0, 0.0], [0.0, 0.0]]),
            rho: Some(vec![
                vec![[1.0, 0.0], [0.0, 0.0]],
                vec![[0.0, 0.0], [0.0, 0.0]],
            ]),
        };
        assert!(bad.to_state().is_err());
    }

    #[test]
    fn spectrum_csv_shape() {
        let op = BellOperator::mk(MeasurementFrame::canonical_mk(2).unwrap()).unwrap();
        let spec = crate::spectral::full_spectrum(&op).unwrap();
        let csv = spectrum_csv(&spec);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "omega_bits,theta,lambda,f_re,f_im");
        assert!(lines[1].starts_with("00,"));
        assert!(lines[4].starts_with("11,"));
    }
}
