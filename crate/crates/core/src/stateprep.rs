//! Input-state generators and the superposition-cover-all-qubit check.
//!
//! Every generator returns a [`PreparedInput`]: a gate recipe that maps the
//! all-zero state to the described state, together with a canonical
//! description that appears verbatim in reports. Recipes can be replayed on
//! any subset of a larger register, inverted (`unprepare`), or turned into
//! an IR subroutine for use as a generator handle.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::qir::{Expr, Param, Statement, Subroutine};
use crate::rng::SplitRng;
use crate::simcore::{Gate, SimError, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub enum PrepError {
    ValueOutOfRange { value: u64, n: usize },
    EqualValues(u64),
    BadPauliIndex(u8),
    EmptyEnsemble,
    BadWeights,
    NoQubits,
    MixedQubitCounts,
    NotInvertible,
    TargetsMismatch { want: usize, got: usize },
    Sim(SimError),
}

impl fmt::Display for PrepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrepError::ValueOutOfRange { value, n } => {
                write!(f, "value {value} does not fit in {n} qubits")
            }
            PrepError::EqualValues(x) => {
                write!(f, "x and y are both {x}; use a classical state instead")
            }
            PrepError::BadPauliIndex(i) => write!(f, "Pauli state index {i} not in 1..=6"),
            PrepError::EmptyEnsemble => write!(f, "ensemble has no entries"),
            PrepError::BadWeights => write!(f, "ensemble weights must be >= 0 and sum to 1"),
            PrepError::NoQubits => write!(f, "at least one qubit required"),
            PrepError::MixedQubitCounts => write!(f, "inputs have differing qubit counts"),
            PrepError::NotInvertible => write!(f, "this input has no unprepare procedure"),
            PrepError::TargetsMismatch { want, got } => {
                write!(f, "recipe covers {want} qubits, got {got} targets")
            }
            PrepError::Sim(e) => write!(f, "{e}"),
        }
    }
}

impl From<SimError> for PrepError {
    fn from(e: SimError) -> Self {
        PrepError::Sim(e)
    }
}

/// One gate of a preparation recipe; targets are indices into the prepared
/// register (0 = most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub gate: Gate,
    pub targets: Vec<usize>,
}

/// An input value bundled with its generation procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedInput {
    n_qubits: usize,
    description: String,
    recipe: Vec<GateOp>,
    invertible: bool,
}

impl PreparedInput {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Canonical label, e.g. `CI(x=20,n=5)`; appears verbatim in reports.
    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn recipe(&self) -> &[GateOp] {
        &self.recipe
    }

    pub fn invertible(&self) -> bool {
        self.invertible
    }

    /// Append the generation gates onto `state`, with recipe qubit `i`
    /// mapped to `targets[i]`.
    pub fn prepare(&self, state: &mut StateVector, targets: &[usize]) -> Result<(), PrepError> {
        if targets.len() != self.n_qubits {
            return Err(PrepError::TargetsMismatch {
                want: self.n_qubits,
                got: targets.len(),
            });
        }
        for op in &self.recipe {
            let abs: Vec<usize> = op.targets.iter().map(|&t| targets[t]).collect();
            state.apply_gate(&op.gate, &abs)?;
        }
        Ok(())
    }

    /// Apply the inverse recipe; `unprepare . prepare` is the identity.
    pub fn unprepare(&self, state: &mut StateVector, targets: &[usize]) -> Result<(), PrepError> {
        if !self.invertible {
            return Err(PrepError::NotInvertible);
        }
        if targets.len() != self.n_qubits {
            return Err(PrepError::TargetsMismatch {
                want: self.n_qubits,
                got: targets.len(),
            });
        }
        for op in self.recipe.iter().rev() {
            let abs: Vec<usize> = op.targets.iter().map(|&t| targets[t]).collect();
            state.apply_gate(&op.gate.inverse(), &abs)?;
        }
        Ok(())
    }

    /// Materialize the described state on a fresh register.
    pub fn to_state(&self) -> Result<StateVector, PrepError> {
        let mut s = StateVector::new(self.n_qubits)?;
        let targets: Vec<usize> = (0..self.n_qubits).collect();
        self.prepare(&mut s, &targets)?;
        Ok(s)
    }

    /// Express the recipe as an IR subroutine over one qubit-array
    /// parameter, usable as a generator handle.
    pub fn to_subroutine(&self, name: &str) -> Subroutine {
        let body = self
            .recipe
            .iter()
            .map(|op| {
                let targets = op
                    .targets
                    .iter()
                    .map(|&t| crate::qir::QubitRef::at("qs", t as i64))
                    .collect();
                match op.gate {
                    Gate::R1(t) => Statement::Gate {
                        gate: crate::qir::GateSpec::rotation(
                            crate::qir::GateKind::R1,
                            Expr::Float(t),
                        ),
                        targets,
                    },
                    Gate::Rz(t) => Statement::Gate {
                        gate: crate::qir::GateSpec::rotation(
                            crate::qir::GateKind::Rz,
                            Expr::Float(t),
                        ),
                        targets,
                    },
                    g => Statement::Gate {
                        gate: crate::qir::GateSpec::plain(gate_kind(&g)),
                        targets,
                    },
                }
            })
            .collect();
        Subroutine::new(
            name,
            vec![Param::qubits("qs", Some(Expr::Int(self.n_qubits as i64)))],
            &[],
            body,
        )
    }
}

fn gate_kind(g: &Gate) -> crate::qir::GateKind {
    use crate::qir::GateKind as K;
    match g {
        Gate::X => K::X,
        Gate::Y => K::Y,
        Gate::Z => K::Z,
        Gate::H => K::H,
        Gate::S => K::S,
        Gate::Sdg => K::Sdg,
        Gate::T => K::T,
        Gate::Tdg => K::Tdg,
        Gate::R1(_) => K::R1,
        Gate::Rz(_) => K::Rz,
        Gate::Cnot => K::Cnot,
        Gate::Swap => K::Swap,
        Gate::Toffoli => K::Toffoli,
        Gate::Cswap => K::Cswap,
    }
}

fn check_range(n: usize, x: u64) -> Result<(), PrepError> {
    if n >= 64 || x >> n != 0 {
        Err(PrepError::ValueOutOfRange { value: x, n })
    } else {
        Ok(())
    }
}

fn bit(x: u64, n: usize, i: usize) -> bool {
    (x >> (n - 1 - i)) & 1 == 1
}

/// Classical state |x> via X gates on the 1-bits.
pub fn gen_ket_x(n: usize, x: u64) -> Result<PreparedInput, PrepError> {
    check_range(n, x)?;
    let mut recipe = Vec::new();
    for i in 0..n {
        if bit(x, n, i) {
            recipe.push(GateOp {
                gate: Gate::X,
                targets: vec![i],
            });
        }
    }
    Ok(PreparedInput {
        n_qubits: n,
        description: format!("CI(x={x},n={n})"),
        recipe,
        invertible: true,
    })
}

/// Complementary superposition (|x'> + e^{i theta} |!x'>)/sqrt(2), where
/// x' is x or its bitwise negation, normalized so the leading bit of x' is
/// zero.
pub fn gen_comp_sup(n: usize, x: u64, theta: f64) -> Result<PreparedInput, PrepError> {
    if n == 0 {
        return Err(PrepError::NoQubits);
    }
    check_range(n, x)?;
    let xp = if bit(x, n, 0) { !x & ((1 << n) - 1) } else { x };
    let mut recipe = vec![GateOp {
        gate: Gate::H,
        targets: vec![0],
    }];
    if theta != 0.0 {
        recipe.push(GateOp {
            gate: Gate::R1(theta),
            targets: vec![0],
        });
    }
    for i in 1..n {
        if bit(xp, n, i) {
            recipe.push(GateOp {
                gate: Gate::X,
                targets: vec![i],
            });
        }
        recipe.push(GateOp {
            gate: Gate::Cnot,
            targets: vec![0, i],
        });
    }
    Ok(PreparedInput {
        n_qubits: n,
        description: format!("CSI(x={x},n={n},theta={theta})"),
        recipe,
        invertible: true,
    })
}

/// Two-value superposition (|x> + e^{i theta} |y>)/sqrt(2): same bits are
/// set classically, differing bits carry the entangled complementary
/// pattern anchored at the first differing position.
pub fn gen_two_value(n: usize, x: u64, y: u64, theta: f64) -> Result<PreparedInput, PrepError> {
    check_range(n, x)?;
    check_range(n, y)?;
    if x == y {
        return Err(PrepError::EqualValues(x));
    }
    let mut same = Vec::new();
    let mut diff = Vec::new();
    for i in 0..n {
        if bit(x, n, i) == bit(y, n, i) {
            same.push(i);
        } else {
            diff.push(i);
        }
    }
    let mut recipe = Vec::new();
    for &i in &same {
        if bit(x, n, i) {
            recipe.push(GateOp {
                gate: Gate::X,
                targets: vec![i],
            });
        }
    }
    // Normalize the branch so the pivot bit starts at zero, as in the
    // complementary generator.
    let pivot = diff[0];
    let anchor = if bit(x, n, pivot) { y } else { x };
    recipe.push(GateOp {
        gate: Gate::H,
        targets: vec![pivot],
    });
    if theta != 0.0 {
        recipe.push(GateOp {
            gate: Gate::R1(theta),
            targets: vec![pivot],
        });
    }
    for &i in &diff[1..] {
        if bit(anchor, n, i) {
            recipe.push(GateOp {
                gate: Gate::X,
                targets: vec![i],
            });
        }
        recipe.push(GateOp {
            gate: Gate::Cnot,
            targets: vec![pivot, i],
        });
    }
    Ok(PreparedInput {
        n_qubits: n,
        description: format!("RTI(x={x},y={y},n={n},theta={theta})"),
        recipe,
        invertible: true,
    })
}

/// Gate recipe for one Pauli eigenstate, indexed 1..=6 as
/// |0>, |1>, |+>, |->, |+i>, |-i>.
fn single_pauli_ops(index: u8, qubit: usize) -> Result<Vec<GateOp>, PrepError> {
    let seq: &[Gate] = match index {
        1 => &[],
        2 => &[Gate::X],
        3 => &[Gate::H],
        4 => &[Gate::X, Gate::H],
        5 => &[Gate::H, Gate::S],
        6 => &[Gate::H, Gate::Sdg],
        other => return Err(PrepError::BadPauliIndex(other)),
    };
    Ok(seq
        .iter()
        .map(|g| GateOp {
            gate: *g,
            targets: vec![qubit],
        })
        .collect())
}

/// Tensor product of single-qubit Pauli eigenstates.
pub fn gen_pauli(indices: &[u8]) -> Result<PreparedInput, PrepError> {
    if indices.is_empty() {
        return Err(PrepError::NoQubits);
    }
    let mut recipe = Vec::new();
    for (qubit, &index) in indices.iter().enumerate() {
        recipe.extend(single_pauli_ops(index, qubit)?);
    }
    let labels: Vec<String> = indices.iter().map(|i| format!("{i}")).collect();
    Ok(PreparedInput {
        n_qubits: indices.len(),
        description: format!("PAULI({})", labels.join(",")),
        recipe,
        invertible: true,
    })
}

/// Ensemble representation of a mixed state: (probability, generator).
#[derive(Clone, Debug)]
pub struct Ensemble {
    entries: Vec<(f64, PreparedInput)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, PreparedInput)>) -> Result<Self, PrepError> {
        if entries.is_empty() {
            return Err(PrepError::EmptyEnsemble);
        }
        let total: f64 = entries.iter().map(|(p, _)| *p).sum();
        if entries.iter().any(|(p, _)| *p < 0.0) || libm::fabs(total - 1.0) > 1e-12 {
            return Err(PrepError::BadWeights);
        }
        let n = entries[0].1.n_qubits();
        if entries.iter().any(|(_, g)| g.n_qubits() != n) {
            return Err(PrepError::MixedQubitCounts);
        }
        Ok(Ensemble { entries })
    }

    pub fn entries(&self) -> &[(f64, PreparedInput)] {
        &self.entries
    }
}

/// Draw one pure member of the ensemble; repeated draws realize the mixed
/// state in the statistical sense. The result has no unprepare procedure.
pub fn gen_mixed(ensemble: &Ensemble, rng: &mut SplitRng) -> Result<PreparedInput, PrepError> {
    let weights: Vec<f64> = ensemble.entries.iter().map(|(p, _)| *p).collect();
    let idx = rng.pick_weighted(&weights).ok_or(PrepError::BadWeights)?;
    let chosen = &ensemble.entries[idx].1;
    Ok(PreparedInput {
        n_qubits: chosen.n_qubits,
        description: format!("MIX(k={idx},{})", chosen.description),
        recipe: chosen.recipe.clone(),
        invertible: false,
    })
}

/// The random input families used by experiment campaigns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    /// Classical |x>.
    Ci,
    /// Random two-value superposition (|x> + |y>)/sqrt(2).
    Rti,
    /// Complementary superposition (|x> + |!x>)/sqrt(2).
    Csi,
    /// Random Pauli product state.
    Pauli,
}

impl InputKind {
    pub fn name(&self) -> &'static str {
        match self {
            InputKind::Ci => "CI",
            InputKind::Rti => "RTI",
            InputKind::Csi => "CSI",
            InputKind::Pauli => "PAULI",
        }
    }

    pub fn from_name(s: &str) -> Option<InputKind> {
        Some(match s {
            "CI" => InputKind::Ci,
            "RTI" => InputKind::Rti,
            "CSI" => InputKind::Csi,
            "PAULI" => InputKind::Pauli,
            _ => return None,
        })
    }
}

/// Structured description of a generator invocation. This is the form test
/// cases and suite files carry; materializing it (re)runs any sampling, so
/// mixed inputs are redrawn per repetition.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSpec {
    KetX { n: usize, x: u64 },
    CompSup { n: usize, x: u64, theta: f64 },
    TwoValue { n: usize, x: u64, y: u64, theta: f64 },
    Pauli { indices: Vec<u8> },
    /// Maximal mixed state: the uniform ensemble over all basis states.
    MaxMix { n: usize },
}

impl InputSpec {
    pub fn n_qubits(&self) -> usize {
        match self {
            InputSpec::KetX { n, .. }
            | InputSpec::CompSup { n, .. }
            | InputSpec::TwoValue { n, .. }
            | InputSpec::MaxMix { n } => *n,
            InputSpec::Pauli { indices } => indices.len(),
        }
    }

    pub fn materialize(&self, rng: &mut SplitRng) -> Result<PreparedInput, PrepError> {
        match self {
            InputSpec::KetX { n, x } => gen_ket_x(*n, *x),
            InputSpec::CompSup { n, x, theta } => gen_comp_sup(*n, *x, *theta),
            InputSpec::TwoValue { n, x, y, theta } => gen_two_value(*n, *x, *y, *theta),
            InputSpec::Pauli { indices } => gen_pauli(indices),
            InputSpec::MaxMix { n } => {
                // Equivalent to the uniform 2^n-entry ensemble over
                // gen_ket_x without materializing the table.
                check_range(*n, 0)?;
                let x = rng.below(1 << n);
                let inner = gen_ket_x(*n, x)?;
                Ok(PreparedInput {
                    n_qubits: *n,
                    description: format!("MIX(x={x},n={n})"),
                    recipe: inner.recipe,
                    invertible: false,
                })
            }
        }
    }
}

/// Sample a structured input of the given kind over `n` qubits.
pub fn sample_spec(kind: InputKind, n: usize, rng: &mut SplitRng) -> InputSpec {
    debug_assert!(n >= 1);
    match kind {
        InputKind::Ci => InputSpec::KetX {
            n,
            x: rng.below(1 << n),
        },
        InputKind::Rti => {
            let picks = rng.distinct_below(1 << n, 2);
            InputSpec::TwoValue {
                n,
                x: picks[0],
                y: picks[1],
                theta: 0.0,
            }
        }
        InputKind::Csi => InputSpec::CompSup {
            n,
            x: rng.below(1 << n),
            theta: 0.0,
        },
        InputKind::Pauli => InputSpec::Pauli {
            indices: (0..n).map(|_| rng.below(6) as u8 + 1).collect(),
        },
    }
}

/// Sample and materialize in one step.
pub fn sample_input(
    kind: InputKind,
    n: usize,
    rng: &mut SplitRng,
) -> Result<PreparedInput, PrepError> {
    sample_spec(kind, n, rng).materialize(rng)
}

/// Marginal-probability threshold below which an outcome counts as absent.
pub const SCAQ_EPSILON: f64 = 1e-9;

/// Superposition-cover-all-qubit criterion: qubit `k` is covered iff some
/// input shows both outcomes of `k` with probability above the threshold.
/// Returns (pass, uncovered qubit indices).
pub fn scaq_check(inputs: &[StateVector]) -> Result<(bool, Vec<usize>), PrepError> {
    let n = match inputs.first() {
        Some(s) => s.n_qubits(),
        None => return Err(PrepError::NoQubits),
    };
    if inputs.iter().any(|s| s.n_qubits() != n) {
        return Err(PrepError::MixedQubitCounts);
    }
    let mut uncovered = Vec::new();
    for k in 0..n {
        let covered = inputs.iter().any(|s| {
            let d = s.exact_distribution(&[k]).expect("qubit in range");
            d[0] > SCAQ_EPSILON && d[1] > SCAQ_EPSILON
        });
        if !covered {
            uncovered.push(k);
        }
    }
    Ok((uncovered.is_empty(), uncovered))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amp(s: &StateVector, i: usize) -> (f64, f64) {
        let a = s.amplitude(i);
        (a.re, a.im)
    }

    #[test]
    fn ket_x_examples() {
        // n=5, x=20 -> |10100>
        let s = gen_ket_x(5, 20).unwrap().to_state().unwrap();
        assert!((s.amplitude(20).re - 1.0).abs() < 1e-15);

        // x=0: no gates at all.
        assert!(gen_ket_x(3, 0).unwrap().recipe().is_empty());

        // all ones: one X per qubit.
        assert_eq!(gen_ket_x(4, 15).unwrap().recipe().len(), 4);

        assert!(matches!(
            gen_ket_x(3, 8),
            Err(PrepError::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn comp_sup_examples() {
        // n=1, x=0, theta=0 -> |+>
        let s = gen_comp_sup(1, 0, 0.0).unwrap().to_state().unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((amp(&s, 0).0 - r).abs() < 1e-12 && (amp(&s, 1).0 - r).abs() < 1e-12);

        // n=3, x=5 (101): leading bit 1 so the anchor is 010.
        let s = gen_comp_sup(3, 5, 0.0).unwrap().to_state().unwrap();
        assert!((amp(&s, 0b010).0 - r).abs() < 1e-12);
        assert!((amp(&s, 0b101).0 - r).abs() < 1e-12);

        // Phase lands on the complement branch.
        let s = gen_comp_sup(2, 1, core::f64::consts::FRAC_PI_2)
            .unwrap()
            .to_state()
            .unwrap();
        assert!((amp(&s, 0b01).0 - r).abs() < 1e-12);
        assert!((amp(&s, 0b10).1 - r).abs() < 1e-12, "expected i/sqrt2");
    }

    #[test]
    fn two_value_examples() {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        // n=4, x=5, y=12 -> (|0101> + |1100>)/sqrt(2)
        let s = gen_two_value(4, 5, 12, 0.0).unwrap().to_state().unwrap();
        assert!((amp(&s, 5).0 - r).abs() < 1e-12);
        assert!((amp(&s, 12).0 - r).abs() < 1e-12);

        // n=2, x=0, y=3 -> Bell state.
        let s = gen_two_value(2, 0, 3, 0.0).unwrap().to_state().unwrap();
        assert!((amp(&s, 0).0 - r).abs() < 1e-12 && (amp(&s, 3).0 - r).abs() < 1e-12);

        // n=3, x=2, y=3, theta=pi/2 -> (|010> + i|011>)/sqrt(2)
        let s = gen_two_value(3, 2, 3, core::f64::consts::FRAC_PI_2)
            .unwrap()
            .to_state()
            .unwrap();
        assert!((amp(&s, 2).0 - r).abs() < 1e-12);
        assert!((amp(&s, 3).1 - r).abs() < 1e-12);

        assert!(matches!(
            gen_two_value(3, 5, 5, 0.0),
            Err(PrepError::EqualValues(5))
        ));
    }

    #[test]
    fn pauli_examples() {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        // [3] -> |+>
        let s = gen_pauli(&[3]).unwrap().to_state().unwrap();
        assert!((amp(&s, 0).0 - r).abs() < 1e-12 && (amp(&s, 1).0 - r).abs() < 1e-12);

        // [6] -> |-i> = (|0> - i|1>)/sqrt(2)
        let s = gen_pauli(&[6]).unwrap().to_state().unwrap();
        assert!((amp(&s, 0).0 - r).abs() < 1e-12);
        assert!((amp(&s, 1).1 + r).abs() < 1e-12);

        // [1,3] -> |0> tensor |+>
        let s = gen_pauli(&[1, 3]).unwrap().to_state().unwrap();
        assert!((amp(&s, 0).0 - r).abs() < 1e-12 && (amp(&s, 1).0 - r).abs() < 1e-12);
        assert!(amp(&s, 2).0.abs() < 1e-12);

        assert!(matches!(gen_pauli(&[7]), Err(PrepError::BadPauliIndex(7))));
    }

    #[test]
    fn unprepare_round_trips() {
        let mut rng = SplitRng::seed_from(31);
        for _ in 0..50 {
            let n = 1 + rng.below(5) as usize;
            let kind = match rng.below(3) {
                0 => InputKind::Ci,
                1 => InputKind::Rti,
                _ => InputKind::Csi,
            };
            let input = if n == 1 && kind == InputKind::Rti {
                gen_two_value(1, 0, 1, 0.0).unwrap()
            } else {
                sample_input(kind, n, &mut rng).unwrap()
            };
            let mut s = StateVector::new(n).unwrap();
            let targets: Vec<usize> = (0..n).collect();
            input.prepare(&mut s, &targets).unwrap();
            input.unprepare(&mut s, &targets).unwrap();
            let mut m = s;
            let bits = m.measure(&targets, &mut rng).unwrap();
            assert!(bits.iter().all(|&b| b == 0), "{}", input.description());
        }
    }

    #[test]
    fn mixed_state_frequencies() {
        // {(0.5, |0>), (0.5, |1>)}: frequency of |1> is 0.5 +/- 0.02.
        let ens = Ensemble::new(vec![
            (0.5, gen_ket_x(1, 0).unwrap()),
            (0.5, gen_ket_x(1, 1).unwrap()),
        ])
        .unwrap();
        let mut rng = SplitRng::seed_from(77);
        let mut ones = 0u32;
        for _ in 0..10_000 {
            let draw = gen_mixed(&ens, &mut rng).unwrap();
            let mut s = draw.to_state().unwrap();
            ones += s.measure(&[0], &mut rng).unwrap()[0] as u32;
        }
        let freq = ones as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.02, "freq {freq}");

        // Degenerate ensemble always yields its only member.
        let ens = Ensemble::new(vec![(1.0, gen_ket_x(2, 3).unwrap())]).unwrap();
        for _ in 0..20 {
            let s = gen_mixed(&ens, &mut rng).unwrap().to_state().unwrap();
            assert!((s.amplitude(3).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn max_mix_is_uniform() {
        let spec = InputSpec::MaxMix { n: 2 };
        let mut rng = SplitRng::seed_from(5);
        let mut counts = [0u32; 4];
        for _ in 0..10_000 {
            let mut s = spec.materialize(&mut rng).unwrap().to_state().unwrap();
            let bits = s.measure(&[0, 1], &mut rng).unwrap();
            counts[crate::simcore::bits_to_u64(&bits) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / 10_000.0 - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn ensemble_validation() {
        assert!(matches!(
            Ensemble::new(vec![]),
            Err(PrepError::EmptyEnsemble)
        ));
        assert!(matches!(
            Ensemble::new(vec![(0.7, gen_ket_x(1, 0).unwrap())]),
            Err(PrepError::BadWeights)
        ));
    }

    #[test]
    fn sample_ranges() {
        let mut rng = SplitRng::seed_from(9);
        for _ in 0..100 {
            match sample_spec(InputKind::Ci, 3, &mut rng) {
                InputSpec::KetX { x, .. } => assert!(x < 8),
                other => panic!("{other:?}"),
            }
        }
        // n=1 RTI is necessarily (|0> + |1>)/sqrt(2).
        match sample_spec(InputKind::Rti, 1, &mut rng) {
            InputSpec::TwoValue { x, y, .. } => assert!(x != y && x < 2 && y < 2),
            other => panic!("{other:?}"),
        }
        match sample_spec(InputKind::Pauli, 4, &mut rng) {
            InputSpec::Pauli { indices } => {
                assert_eq!(indices.len(), 4);
                assert!(indices.iter().all(|&i| (1..=6).contains(&i)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scaq_example_sets() {
        // Passing set from the three single-axis superpositions.
        let pass_set: Vec<StateVector> = [(0u64, 4u64), (0, 2), (0, 1)]
            .iter()
            .map(|&(x, y)| gen_two_value(3, x, y, 0.0).unwrap().to_state().unwrap())
            .collect();
        let (ok, uncovered) = scaq_check(&pass_set).unwrap();
        assert!(ok && uncovered.is_empty());

        // Failing set: the third qubit is never superposed.
        let fail_set: Vec<StateVector> = [(0u64, 4u64), (0, 2), (0, 6)]
            .iter()
            .map(|&(x, y)| gen_two_value(3, x, y, 0.0).unwrap().to_state().unwrap())
            .collect();
        let (ok, uncovered) = scaq_check(&fail_set).unwrap();
        assert!(!ok);
        assert_eq!(uncovered, vec![2]);

        // A single complementary superposition always passes.
        for x in 0..8 {
            let s = gen_comp_sup(3, x, 0.0).unwrap().to_state().unwrap();
            let (ok, _) = scaq_check(core::slice::from_ref(&s)).unwrap();
            assert!(ok, "CSI x={x}");
        }
    }

    #[test]
    fn csi_qubit_marginals_are_balanced() {
        let s = gen_comp_sup(4, 13, 0.0).unwrap().to_state().unwrap();
        for k in 0..4 {
            let d = s.exact_distribution(&[k]).unwrap();
            assert!((d[0] - 0.5).abs() < 1e-12 && (d[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn descriptions_are_canonical() {
        assert_eq!(gen_ket_x(5, 20).unwrap().description(), "CI(x=20,n=5)");
        assert_eq!(
            gen_comp_sup(5, 13, 0.0).unwrap().description(),
            "CSI(x=13,n=5,theta=0)"
        );
        assert_eq!(
            gen_two_value(4, 5, 12, 0.0).unwrap().description(),
            "RTI(x=5,y=12,n=4,theta=0)"
        );
        assert_eq!(gen_pauli(&[1, 3, 6]).unwrap().description(), "PAULI(1,3,6)");
    }

    #[test]
    fn recipe_as_subroutine_matches_direct_preparation() {
        use crate::qir::{execute, ArgValue, Program};
        let input = gen_two_value(3, 1, 6, 0.5).unwrap();
        let mut prog = Program::new();
        prog.register(input.to_subroutine("Gen")).unwrap();
        let mut rng = SplitRng::seed_from(3);
        let mut via_ir = StateVector::new(3).unwrap();
        execute(
            &prog,
            prog.get("Gen").unwrap(),
            &[ArgValue::Qubits(vec![0, 1, 2])],
            &mut via_ir,
            &mut rng,
        )
        .unwrap();
        let direct = input.to_state().unwrap();
        assert!(via_ir.max_amp_deviation(&direct).unwrap() < 1e-12);
    }
}
