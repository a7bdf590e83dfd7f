//! Specification oracles: small dense linear algebra kept independent of
//! the gate-by-gate simulation path. Everything here is built directly from
//! the defining formulas and is only meant for test-scale registers.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::simcore::StateVector;
use crate::stateprep::InputSpec;

/// Oracles operate on at most this many qubits.
pub const ORACLE_MAX_QUBITS: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    TooLarge { n: usize },
    Mismatch,
    Mixed,
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::TooLarge { n } => {
                write!(f, "oracle supports up to {ORACLE_MAX_QUBITS} qubits, got {n}")
            }
            OracleError::Mismatch => write!(f, "dimension mismatch"),
            OracleError::Mixed => write!(f, "state is not expressible here"),
        }
    }
}

/// Dense density matrix over up to [`ORACLE_MAX_QUBITS`] qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_qubits: usize,
    /// Row-major `dim x dim` entries.
    m: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.m[r * self.dim() + c]
    }

    pub fn from_state(state: &StateVector) -> Result<Self, OracleError> {
        let n = state.n_qubits();
        if n > ORACLE_MAX_QUBITS {
            return Err(OracleError::TooLarge { n });
        }
        let dim = 1usize << n;
        let amps = state.amplitudes();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                m[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Ok(DensityMatrix { n_qubits: n, m })
    }

    /// Probabilistic mixture of pure states.
    pub fn from_ensemble(entries: &[(f64, StateVector)]) -> Result<Self, OracleError> {
        let n = entries.first().ok_or(OracleError::Mismatch)?.1.n_qubits();
        let dim = 1usize << n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (p, state) in entries {
            if state.n_qubits() != n {
                return Err(OracleError::Mismatch);
            }
            let pure = DensityMatrix::from_state(state)?;
            for (acc, v) in m.iter_mut().zip(&pure.m) {
                *acc += v * *p;
            }
        }
        Ok(DensityMatrix { n_qubits: n, m })
    }

    /// tr(self . other); real up to rounding for valid density operators.
    pub fn product_trace(&self, other: &DensityMatrix) -> Result<f64, OracleError> {
        if self.n_qubits != other.n_qubits {
            return Err(OracleError::Mismatch);
        }
        let dim = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            for k in 0..dim {
                acc += self.m[r * dim + k] * other.m[k * dim + r];
            }
        }
        Ok(acc.re)
    }

    /// tr(rho^2): 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        self.product_trace(self).expect("same dimensions")
    }
}

/// Dense discrete-Fourier-transform oracle: applies the DFT matrix to the
/// amplitude vector, big-endian index reading on both sides.
pub fn spec_qft(n: usize, input: &[Complex64]) -> Result<Vec<Complex64>, OracleError> {
    if n > ORACLE_MAX_QUBITS {
        return Err(OracleError::TooLarge { n });
    }
    let dim = 1usize << n;
    if input.len() != dim {
        return Err(OracleError::Mismatch);
    }
    let norm = 1.0 / libm::sqrt(dim as f64);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, amp) in input.iter().enumerate() {
            let phase = 2.0 * core::f64::consts::PI * (j as f64) * (k as f64) / dim as f64;
            acc += amp * Complex64::new(libm::cos(phase), libm::sin(phase));
        }
        *slot = acc * norm;
    }
    Ok(out)
}

/// Swap-test zero-outcome probability p0 = (1 + tr(rho1 rho2)) / 2.
pub fn spec_swap_test(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64, OracleError> {
    Ok((1.0 + rho1.product_trace(rho2)?) / 2.0)
}

/// Closed-form amplitudes of a generator specification, constructed
/// directly (no gates); `MaxMix` has no pure closed form.
pub fn input_state_amplitudes(spec: &InputSpec) -> Result<Vec<Complex64>, OracleError> {
    let n = spec.n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(OracleError::TooLarge { n });
    }
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let r = core::f64::consts::FRAC_1_SQRT_2;
    match spec {
        InputSpec::KetX { x, .. } => {
            amps[*x as usize] = Complex64::new(1.0, 0.0);
        }
        InputSpec::CompSup { n, x, theta } => {
            // Branch normalization: anchor at the value whose leading bit
            // is zero.
            let mask = (1u64 << n) - 1;
            let anchor = if (x >> (n - 1)) & 1 == 1 { !x & mask } else { *x };
            amps[anchor as usize] = Complex64::new(r, 0.0);
            amps[(!anchor & mask) as usize] =
                Complex64::new(r * libm::cos(*theta), r * libm::sin(*theta));
        }
        InputSpec::TwoValue { n, x, y, theta } => {
            // Anchor at whichever value has a zero bit at the first
            // differing position.
            let diff = x ^ y;
            let pivot_shift = 63 - diff.leading_zeros() as u64;
            let (u, v) = if (x >> pivot_shift) & 1 == 0 {
                (*x, *y)
            } else {
                (*y, *x)
            };
            let _ = n;
            amps[u as usize] = Complex64::new(r, 0.0);
            amps[v as usize] = Complex64::new(r * libm::cos(*theta), r * libm::sin(*theta));
        }
        InputSpec::Pauli { indices } => {
            amps[0] = Complex64::new(1.0, 0.0);
            // Tensor product assembled msb-first.
            let one = |idx: u8| -> [Complex64; 2] {
                match idx {
                    1 => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                    2 => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                    3 => [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                    4 => [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
                    5 => [Complex64::new(r, 0.0), Complex64::new(0.0, r)],
                    _ => [Complex64::new(r, 0.0), Complex64::new(0.0, -r)],
                }
            };
            let mut acc = vec![Complex64::new(1.0, 0.0)];
            for &idx in indices {
                let q = one(idx);
                let mut next = vec![Complex64::new(0.0, 0.0); acc.len() * 2];
                for (i, a) in acc.iter().enumerate() {
                    next[2 * i] = a * q[0];
                    next[2 * i + 1] = a * q[1];
                }
                acc = next;
            }
            amps = acc;
        }
        InputSpec::MaxMix { .. } => return Err(OracleError::Mixed),
    }
    Ok(amps)
}

/// Grover iteration count used by the benchmark: round((pi/4) sqrt(2^n)).
pub fn grover_iterations(n: usize) -> u32 {
    libm::round(core::f64::consts::FRAC_PI_4 * libm::sqrt((1u64 << n) as f64)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::Gate;

    #[test]
    fn qft_oracle_examples() {
        // n=1, |0>: uniform amplitudes.
        let one = spec_qft(1, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((one[0].re - r).abs() < 1e-12 && (one[1].re - r).abs() < 1e-12);

        // n=2, |01>: fourth roots of unity along row j=1.
        let mut input = vec![Complex64::new(0.0, 0.0); 4];
        input[1] = Complex64::new(1.0, 0.0);
        let out = spec_qft(2, &input).unwrap();
        for (k, a) in out.iter().enumerate() {
            let phase = core::f64::consts::PI * k as f64 / 2.0;
            assert!((a.re - 0.5 * libm::cos(phase)).abs() < 1e-12);
            assert!((a.im - 0.5 * libm::sin(phase)).abs() < 1e-12);
        }
    }

    #[test]
    fn qft_oracle_matches_bitwise_product_form() {
        // The per-qubit product form of the transform, assembled
        // independently, for every classical input at n <= 5.
        for n in 1..=5usize {
            let dim = 1usize << n;
            for j in 0..dim as u64 {
                let mut input = vec![Complex64::new(0.0, 0.0); dim];
                input[j as usize] = Complex64::new(1.0, 0.0);
                let dft = spec_qft(n, &input).unwrap();

                // Qubit k (1-based) carries (|0> + e^{2 pi i 0.j_{n-k+1}..j_n}|1>)/sqrt2.
                let mut product = vec![Complex64::new(1.0, 0.0)];
                let r = core::f64::consts::FRAC_1_SQRT_2;
                for k in 1..=n {
                    let modulus = 1u64 << k;
                    let theta =
                        2.0 * core::f64::consts::PI * ((j % modulus) as f64) / modulus as f64;
                    let q = [
                        Complex64::new(r, 0.0),
                        Complex64::new(r * libm::cos(theta), r * libm::sin(theta)),
                    ];
                    let mut next = vec![Complex64::new(0.0, 0.0); product.len() * 2];
                    for (i, a) in product.iter().enumerate() {
                        next[2 * i] = a * q[0];
                        next[2 * i + 1] = a * q[1];
                    }
                    product = next;
                }
                for (a, b) in dft.iter().zip(&product) {
                    assert!((a - b).norm() < 1e-10, "n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn swap_test_probabilities_from_table() {
        let state = |n: usize, x: u64| {
            crate::stateprep::gen_ket_x(n, x)
                .unwrap()
                .to_state()
                .unwrap()
        };
        let pure = |s: &StateVector| DensityMatrix::from_state(s).unwrap();

        // Orthogonal basis states: p0 = 0.5.
        let p = spec_swap_test(&pure(&state(3, 0b011)), &pure(&state(3, 0b110))).unwrap();
        assert!((p - 0.5).abs() < 1e-12);

        // Identical states: p0 = 1.
        let p = spec_swap_test(&pure(&state(4, 0b1001)), &pure(&state(4, 0b1001))).unwrap();
        assert!((p - 1.0).abs() < 1e-12);

        // |0> vs |+>: p0 = 0.75.
        let mut plus = StateVector::new(1).unwrap();
        plus.apply_gate(&Gate::H, &[0]).unwrap();
        let p = spec_swap_test(&pure(&state(1, 0)), &pure(&plus)).unwrap();
        assert!((p - 0.75).abs() < 1e-12);

        // Maximally mixed qubit vs itself: tr(rho^2) = 1/2, p0 = 0.75.
        let mixed = DensityMatrix::from_ensemble(&[
            (0.5, state(1, 0)),
            (0.5, state(1, 1)),
        ])
        .unwrap();
        let p = spec_swap_test(&mixed, &mixed).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
        assert!((mixed.purity() - 0.5).abs() < 1e-12);

        // |+> vs maximally mixed: p0 = 0.75.
        let p = spec_swap_test(&pure(&plus), &mixed).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_generated_states() {
        // The recipe path and the direct construction agree for every
        // generator over an exhaustive small sweep.
        let mut checked = 0u32;
        for n in 1..=4usize {
            let dim = 1u64 << n;
            for x in 0..dim {
                for theta in [0.0, core::f64::consts::FRAC_PI_2, core::f64::consts::PI] {
                    let spec = InputSpec::CompSup { n, x, theta };
                    let want = input_state_amplitudes(&spec).unwrap();
                    let got = crate::stateprep::gen_comp_sup(n, x, theta)
                        .unwrap()
                        .to_state()
                        .unwrap();
                    for (a, b) in got.amplitudes().iter().zip(&want) {
                        assert!((a - b).norm() < 1e-10, "csup n={n} x={x} theta={theta}");
                    }
                    checked += 1;
                }
                for y in 0..dim {
                    if x == y {
                        continue;
                    }
                    let spec = InputSpec::TwoValue {
                        n,
                        x,
                        y,
                        theta: core::f64::consts::FRAC_PI_2,
                    };
                    let want = input_state_amplitudes(&spec).unwrap();
                    let got = crate::stateprep::gen_two_value(
                        n,
                        x,
                        y,
                        core::f64::consts::FRAC_PI_2,
                    )
                    .unwrap()
                    .to_state()
                    .unwrap();
                    for (a, b) in got.amplitudes().iter().zip(&want) {
                        assert!((a - b).norm() < 1e-10, "twoval n={n} x={x} y={y}");
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked > 300);
    }

    #[test]
    fn pauli_closed_form() {
        let spec = InputSpec::Pauli {
            indices: alloc::vec![1, 3, 6],
        };
        let want = input_state_amplitudes(&spec).unwrap();
        let got = crate::stateprep::gen_pauli(&[1, 3, 6])
            .unwrap()
            .to_state()
            .unwrap();
        for (a, b) in got.amplitudes().iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn grover_iteration_counts() {
        assert_eq!(grover_iterations(4), 3);
        assert_eq!(grover_iterations(1), 1);
    }
}
