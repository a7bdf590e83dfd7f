//! Dense state-vector simulation.
//!
//! Qubit ordering: qubit 0 is the **most significant** bit of any integer
//! reading of a basis state. `new_state(2)` starts in `|00>`, and qubit 0 of
//! basis index `0b10` is 1. Endian adapters live in `qir`.

mod gate;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

pub use gate::{Gate, GateMatrix, MAX_ARITY};
use num_complex::Complex64;

use crate::rng::SplitRng;

/// Dense simulation is capped at this register width (2^16 amplitudes).
pub const MAX_QUBITS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimError {
    TooManyQubits { requested: usize },
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    DuplicateQubit { qubit: usize },
    ArityMismatch { expected: usize, got: usize },
    ControlTargetOverlap { qubit: usize },
    DimensionMismatch { left: usize, right: usize },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::TooManyQubits { requested } => {
                write!(f, "requested {requested} qubits, cap is {MAX_QUBITS}")
            }
            SimError::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit {qubit} out of range for {n_qubits}-qubit state")
            }
            SimError::DuplicateQubit { qubit } => write!(f, "qubit {qubit} listed twice"),
            SimError::ArityMismatch { expected, got } => {
                write!(f, "gate expects {expected} targets, got {got}")
            }
            SimError::ControlTargetOverlap { qubit } => {
                write!(f, "qubit {qubit} used both as control and target")
            }
            SimError::DimensionMismatch { left, right } => {
                write!(f, "state dimensions differ: {left} vs {right} qubits")
            }
        }
    }
}

/// Dense complex amplitude vector over `n` qubits.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// All-zero computational basis state `|0...0>`.
    pub fn new(n_qubits: usize) -> Result<Self, SimError> {
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits {
                requested: n_qubits,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Build a state directly from amplitudes; length must be a power of two
    /// within the cap. Intended for oracles and tests.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::DimensionMismatch {
                left: len,
                right: 0,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits {
                requested: n_qubits,
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, basis: usize) -> Complex64 {
        self.amps[basis]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit_shift(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<(), SimError> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(SimError::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(SimError::DuplicateQubit { qubit: q });
            }
        }
        Ok(())
    }

    /// Apply `gate` to `targets`. Targets are listed most-significant first,
    /// matching the gate matrix convention (`Cnot`: `[control, target]`).
    pub fn apply_gate(&mut self, gate: &Gate, targets: &[usize]) -> Result<(), SimError> {
        self.apply_controlled(gate, &[], &[], targets)
    }

    /// Apply `gate` on the component where every control qubit matches its
    /// polarity; act as identity elsewhere.
    pub fn apply_controlled(
        &mut self,
        gate: &Gate,
        controls: &[usize],
        polarities: &[bool],
        targets: &[usize],
    ) -> Result<(), SimError> {
        if gate.arity() != targets.len() {
            return Err(SimError::ArityMismatch {
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        if controls.len() != polarities.len() {
            return Err(SimError::ArityMismatch {
                expected: controls.len(),
                got: polarities.len(),
            });
        }
        self.check_qubits(targets)?;
        self.check_qubits(controls)?;
        for &c in controls {
            if targets.contains(&c) {
                return Err(SimError::ControlTargetOverlap { qubit: c });
            }
        }

        let k = targets.len();
        let dim = 1usize << k;
        let mat = gate.matrix();

        let mut ctrl_mask = 0usize;
        let mut ctrl_val = 0usize;
        for (&c, &p) in controls.iter().zip(polarities) {
            let bit = 1usize << self.bit_shift(c);
            ctrl_mask |= bit;
            if p {
                ctrl_val |= bit;
            }
        }
        // Bit of basis index toggled by gate-operand bit j (msb first).
        let tbits: Vec<usize> = targets
            .iter()
            .map(|&t| 1usize << self.bit_shift(t))
            .collect();
        let tmask: usize = tbits.iter().sum();

        let size = self.amps.len();
        let mut scratch = [Complex64::new(0.0, 0.0); 8];
        for base in 0..size {
            if base & tmask != 0 || base & ctrl_mask != ctrl_val {
                continue;
            }
            // Gather the 2^k amplitudes of this target-subspace fibre.
            let mut idx = [0usize; 8];
            for (pat, slot) in idx.iter_mut().enumerate().take(dim) {
                let mut ix = base;
                for (j, &tb) in tbits.iter().enumerate() {
                    if pat & (1 << (k - 1 - j)) != 0 {
                        ix |= tb;
                    }
                }
                *slot = ix;
            }
            for (r, s) in scratch.iter_mut().enumerate().take(dim) {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..dim {
                    acc += mat.m[r][c] * self.amps[idx[c]];
                }
                *s = acc;
            }
            for r in 0..dim {
                self.amps[idx[r]] = scratch[r];
            }
        }
        Ok(())
    }

    /// Measure `qubits` in order, collapsing the state. Returns one bit per
    /// qubit. The post-state is the renormalized projection, so repeating
    /// the measurement yields the same bits.
    pub fn measure(&mut self, qubits: &[usize], rng: &mut SplitRng) -> Result<Vec<u8>, SimError> {
        self.check_qubits(qubits)?;
        let mut bits = Vec::with_capacity(qubits.len());
        for &q in qubits {
            let bit_mask = 1usize << self.bit_shift(q);
            let mut p1 = 0.0f64;
            for (i, a) in self.amps.iter().enumerate() {
                if i & bit_mask != 0 {
                    p1 += a.norm_sqr();
                }
            }
            let outcome = rng.chance(p1);
            let keep = if outcome { bit_mask } else { 0 };
            let p = if outcome { p1 } else { 1.0 - p1 };
            let scale = if p > 0.0 { 1.0 / libm::sqrt(p) } else { 0.0 };
            for (i, a) in self.amps.iter_mut().enumerate() {
                if i & bit_mask == keep {
                    *a *= scale;
                } else {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
            bits.push(outcome as u8);
        }
        Ok(bits)
    }

    /// Exact Born probabilities over all `2^k` outcomes of measuring
    /// `qubits`; outcome index reads the listed qubits most-significant
    /// first.
    pub fn exact_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>, SimError> {
        self.check_qubits(qubits)?;
        let k = qubits.len();
        let mut out = vec![0.0f64; 1usize << k];
        for (i, a) in self.amps.iter().enumerate() {
            let mut outcome = 0usize;
            for (j, &q) in qubits.iter().enumerate() {
                if i & (1usize << self.bit_shift(q)) != 0 {
                    outcome |= 1 << (k - 1 - j);
                }
            }
            out[outcome] += a.norm_sqr();
        }
        Ok(out)
    }

    /// `|<self|other>|^2`; 1 iff equal up to global phase.
    pub fn fidelity_with(&self, other: &StateVector) -> Result<f64, SimError> {
        if self.n_qubits != other.n_qubits {
            return Err(SimError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            inner += a.conj() * b;
        }
        Ok(inner.norm_sqr())
    }

    /// Largest per-amplitude deviation from `other`.
    pub fn max_amp_deviation(&self, other: &StateVector) -> Result<f64, SimError> {
        if self.n_qubits != other.n_qubits {
            return Err(SimError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut worst = 0.0f64;
        for (a, b) in self.amps.iter().zip(&other.amps) {
            let d = (a - b).norm();
            if d > worst {
                worst = d;
            }
        }
        Ok(worst)
    }

    /// Plain-text amplitude dump: one line per basis state,
    /// `bitstring real imag`, sorted by bitstring.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            for b in (0..self.n_qubits).rev() {
                out.push(if i & (1 << b) != 0 { '1' } else { '0' });
            }
            let _ = writeln!(out, " {:?} {:?}", a.re, a.im);
        }
        out
    }
}

/// Pack measurement bits (most significant first) into an integer.
pub fn bits_to_u64(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn assert_close(a: Complex64, re: f64, im: f64, tol: f64) {
        assert!(
            (a.re - re).abs() < tol && (a.im - im).abs() < tol,
            "amp {a} != {re}+{im}i"
        );
    }

    #[test]
    fn new_state_examples() {
        let s = StateVector::new(1).unwrap();
        assert_eq!(s.amplitudes().len(), 2);
        assert_close(s.amplitude(0), 1.0, 0.0, 1e-15);
        assert_close(s.amplitude(1), 0.0, 0.0, 1e-15);

        let s = StateVector::new(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert_close(s.amplitude(0), 1.0, 0.0, 1e-15);

        let s = StateVector::new(0).unwrap();
        assert_eq!(s.amplitudes().len(), 1);
        assert_close(s.amplitude(0), 1.0, 0.0, 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(StateVector::new(MAX_QUBITS).is_ok());
        assert!(matches!(
            StateVector::new(MAX_QUBITS + 1),
            Err(SimError::TooManyQubits { .. })
        ));
    }

    #[test]
    fn h_on_zero_gives_plus() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&Gate::H, &[0]).unwrap();
        assert_close(s.amplitude(0), FRAC_1_SQRT_2, 0.0, 1e-15);
        assert_close(s.amplitude(1), FRAC_1_SQRT_2, 0.0, 1e-15);
    }

    #[test]
    fn cnot_on_10_gives_11() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&Gate::X, &[0]).unwrap(); // |10>
        s.apply_gate(&Gate::Cnot, &[0, 1]).unwrap();
        assert_close(s.amplitude(0b11), 1.0, 0.0, 1e-15);
    }

    #[test]
    fn bell_preparation() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&Gate::H, &[0]).unwrap();
        s.apply_gate(&Gate::Cnot, &[0, 1]).unwrap();
        assert_close(s.amplitude(0b00), FRAC_1_SQRT_2, 0.0, 1e-15);
        assert_close(s.amplitude(0b11), FRAC_1_SQRT_2, 0.0, 1e-15);
        assert_close(s.amplitude(0b01), 0.0, 0.0, 1e-15);
        assert_close(s.amplitude(0b10), 0.0, 0.0, 1e-15);
    }

    #[test]
    fn polarity_1001_controls() {
        // Controlled-X controlled by the pattern 1001 (Fig.-7 style).
        let controls = [0usize, 1, 2, 3];
        let pols = [true, false, false, true];

        // Controls in |1001>: target flips.
        let mut s = StateVector::new(5).unwrap();
        s.apply_gate(&Gate::X, &[0]).unwrap();
        s.apply_gate(&Gate::X, &[3]).unwrap();
        s.apply_controlled(&Gate::X, &controls, &pols, &[4]).unwrap();
        assert_close(s.amplitude(0b10011), 1.0, 0.0, 1e-15);

        // Controls in |1101>: identity.
        let mut s = StateVector::new(5).unwrap();
        for q in [0usize, 1, 3] {
            s.apply_gate(&Gate::X, &[q]).unwrap();
        }
        s.apply_controlled(&Gate::X, &controls, &pols, &[4]).unwrap();
        assert_close(s.amplitude(0b11010), 1.0, 0.0, 1e-15);
    }

    #[test]
    fn controlled_r1_inactive_control() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&Gate::H, &[1]).unwrap();
        let before = s.clone();
        s.apply_controlled(&Gate::R1(1.234), &[0], &[true], &[1])
            .unwrap();
        assert!(s.max_amp_deviation(&before).unwrap() < 1e-15);
    }

    #[test]
    fn overlap_is_rejected() {
        let mut s = StateVector::new(2).unwrap();
        let err = s
            .apply_controlled(&Gate::X, &[1], &[true], &[1])
            .unwrap_err();
        assert_eq!(err, SimError::ControlTargetOverlap { qubit: 1 });
    }

    #[test]
    fn measure_basis_state() {
        let mut rng = SplitRng::seed_from(1);
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&Gate::X, &[0]).unwrap();
        assert_eq!(s.measure(&[0], &mut rng).unwrap(), alloc::vec![1]);
    }

    #[test]
    fn measure_plus_is_fair() {
        let mut rng = SplitRng::seed_from(42);
        let mut ones = 0u32;
        for _ in 0..10_000 {
            let mut s = StateVector::new(1).unwrap();
            s.apply_gate(&Gate::H, &[0]).unwrap();
            ones += s.measure(&[0], &mut rng).unwrap()[0] as u32;
        }
        let freq = ones as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.02, "freq {freq}");
    }

    #[test]
    fn entangled_collapse() {
        // Find a seed where measuring qubit 0 of the Bell state yields 1,
        // then check the post-state is |11>.
        for seed in 0..32 {
            let mut rng = SplitRng::seed_from(seed);
            let mut s = StateVector::new(2).unwrap();
            s.apply_gate(&Gate::H, &[0]).unwrap();
            s.apply_gate(&Gate::Cnot, &[0, 1]).unwrap();
            let bits = s.measure(&[0], &mut rng).unwrap();
            if bits[0] == 1 {
                assert_close(s.amplitude(0b11), 1.0, 0.0, 1e-12);
                // Re-measuring gives the same answer.
                assert_eq!(s.measure(&[0], &mut rng).unwrap(), alloc::vec![1]);
                return;
            }
        }
        panic!("no seed produced outcome 1");
    }

    #[test]
    fn exact_distribution_examples() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&Gate::H, &[0]).unwrap();
        let d = s.exact_distribution(&[0]).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-12 && (d[1] - 0.5).abs() < 1e-12);

        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&Gate::H, &[0]).unwrap();
        s.apply_gate(&Gate::Cnot, &[0, 1]).unwrap();
        let d = s.exact_distribution(&[0, 1]).unwrap();
        assert!((d[0b00] - 0.5).abs() < 1e-12);
        assert!((d[0b11] - 0.5).abs() < 1e-12);
        assert!(d[0b01].abs() < 1e-12 && d[0b10].abs() < 1e-12);

        // |10100> reads as 20.
        let mut s = StateVector::new(5).unwrap();
        s.apply_gate(&Gate::X, &[0]).unwrap();
        s.apply_gate(&Gate::X, &[2]).unwrap();
        let d = s.exact_distribution(&[0, 1, 2, 3, 4]).unwrap();
        assert!((d[20] - 1.0).abs() < 1e-12);
        let total: f64 = d.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::new(1).unwrap();
        assert!((zero.fidelity_with(&zero).unwrap() - 1.0).abs() < 1e-15);

        // Global phase is invisible.
        let mut phased = StateVector::new(1).unwrap();
        phased.apply_gate(&Gate::X, &[0]).unwrap();
        phased.apply_gate(&Gate::R1(0.7), &[0]).unwrap();
        phased.apply_gate(&Gate::X, &[0]).unwrap();
        assert!((zero.fidelity_with(&phased).unwrap() - 1.0).abs() < 1e-12);

        let mut plus = StateVector::new(1).unwrap();
        plus.apply_gate(&Gate::H, &[0]).unwrap();
        assert!((zero.fidelity_with(&plus).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn marginals_match_exact_distribution() {
        // Fixed 3-qubit state, 10k seeded shots, frequencies within 0.02.
        let build = || {
            let mut s = StateVector::new(3).unwrap();
            s.apply_gate(&Gate::H, &[0]).unwrap();
            s.apply_gate(&Gate::Cnot, &[0, 1]).unwrap();
            s.apply_gate(&Gate::T, &[1]).unwrap();
            s.apply_gate(&Gate::H, &[2]).unwrap();
            s.apply_gate(&Gate::S, &[2]).unwrap();
            s
        };
        let exact = build().exact_distribution(&[0, 1, 2]).unwrap();
        let mut rng = SplitRng::seed_from(2024);
        let mut counts = [0u32; 8];
        for _ in 0..10_000 {
            let mut s = build();
            let bits = s.measure(&[0, 1, 2], &mut rng).unwrap();
            counts[bits_to_u64(&bits) as usize] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let freq = c as f64 / 10_000.0;
            assert!(
                (freq - exact[i]).abs() < 0.02,
                "outcome {i}: {freq} vs {}",
                exact[i]
            );
        }
    }

    #[test]
    fn identical_seeds_identical_sequences() {
        let run = |seed: u64| {
            let mut rng = SplitRng::seed_from(seed);
            let mut all = Vec::new();
            for _ in 0..50 {
                let mut s = StateVector::new(3).unwrap();
                for q in 0..3 {
                    s.apply_gate(&Gate::H, &[q]).unwrap();
                }
                all.extend(s.measure(&[0, 1, 2], &mut rng).unwrap());
            }
            all
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn dump_format() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&Gate::X, &[1]).unwrap();
        let dump = s.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "00 0.0 0.0");
        assert_eq!(lines[1], "01 1.0 0.0");
    }

    fn arb_gate() -> impl Strategy<Value = (Gate, usize)> {
        // (gate, arity)
        prop_oneof![
            Just((Gate::X, 1)),
            Just((Gate::Y, 1)),
            Just((Gate::Z, 1)),
            Just((Gate::H, 1)),
            Just((Gate::S, 1)),
            Just((Gate::T, 1)),
            (-3.0..3.0f64).prop_map(|t| (Gate::R1(t), 1)),
            (-3.0..3.0f64).prop_map(|t| (Gate::Rz(t), 1)),
            Just((Gate::Cnot, 2)),
            Just((Gate::Swap, 2)),
            Just((Gate::Toffoli, 3)),
            Just((Gate::Cswap, 3)),
        ]
    }

    proptest! {
        #[test]
        fn random_circuits_preserve_norm_and_invert(
            ops in proptest::collection::vec((arb_gate(), 0..1000u32), 1..40),
            n in 3usize..6,
        ) {
            let mut s = StateVector::new(n).unwrap();
            // Scramble a bit so we are not always acting on |0..0>.
            s.apply_gate(&Gate::H, &[0]).unwrap();
            s.apply_gate(&Gate::Cnot, &[0, n - 1]).unwrap();
            let original = s.clone();

            let mut applied = Vec::new();
            for ((gate, arity), pick) in ops {
                let mut targets = Vec::new();
                let mut q = pick as usize % n;
                while targets.len() < arity {
                    if !targets.contains(&q) {
                        targets.push(q);
                    }
                    q = (q + 1) % n;
                }
                s.apply_gate(&gate, &targets).unwrap();
                applied.push((gate, targets));
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);

            for (gate, targets) in applied.iter().rev() {
                s.apply_gate(&gate.inverse(), targets).unwrap();
            }
            prop_assert!(s.max_amp_deviation(&original).unwrap() < 1e-10);
        }
    }
}
