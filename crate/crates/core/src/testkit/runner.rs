//! Executable test cases and the case runner.
//!
//! A test case carries literal classical inputs, *generation procedures*
//! for quantum inputs (never bare state descriptions), expected classical
//! outputs, and *checking procedures* for quantum outputs. The runner
//! executes the target the configured number of repetitions, applying
//! one-sided checks per run and statistical checks over the aggregate.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::checkers::{
    stat_fit, CheckError, CheckVerdict, StatMethod, StatTestConfig, Witness,
};
use crate::qir::{execute, ArgValue, Program, Value};
use crate::rng::SplitRng;
use crate::simcore::{bits_to_u64, Gate, StateVector};
use crate::stateprep::InputSpec;

/// Expected value of a classical output.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalExpectation {
    Eq(Value),
    /// Inclusive integer range membership.
    InRange { lo: i64, hi: i64 },
    /// Numeric value within a tolerance (estimator outputs).
    Near { value: f64, tol: f64 },
    /// Aggregate the integer output over all repetitions and fit the
    /// frequencies to a probability table.
    Distribution { probs: Vec<f64>, alpha: f64 },
}

/// Checking procedure attached to a quantum output variable.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumCheck {
    /// Un-prepare the input recipe of the same-named variable (or of
    /// `source` when the output is named differently) and require all-zero
    /// bits: the output equals the input.
    UnprepInput { source: Option<String> },
    /// Un-prepare the input recipe and require a nonzero measurement (the
    /// output is orthogonal to the input: a detectable change).
    OrthogonalToInput { source: Option<String> },
    /// Un-prepare an explicitly given expected state and require zeros.
    UnprepRecipe(InputSpec),
    /// Measure the variable and compare with a literal integer.
    MeasureEq(u64),
    /// Inverse Fourier product ladder for classical input `j`; requires
    /// zeros.
    QftOut { j: u64 },
    /// Superposed Fourier output (psi_a + psi_b)/sqrt(2): per repetition
    /// invert one branch; across repetitions the all-zero rate must fit
    /// one half.
    QftSup { a: u64, b: u64 },
    /// Aggregate measured outcomes over all repetitions and fit them to a
    /// probability table.
    Distribution { probs: Vec<f64>, alpha: f64 },
    /// Measured value equals `value` in at least `min_rate` of repetitions
    /// ("the result should be K with high probability").
    MeasureMostly { value: u64, min_rate: f64 },
}

/// Inputs + expected outputs + checking procedures + repetition budget.
///
/// Quantum inputs are `(name, generation procedure)` pairs by construction;
/// a case without a generation procedure for some quantum input cannot be
/// expressed.
#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub name: String,
    pub classical_inputs: Vec<(String, Value)>,
    pub quantum_inputs: Vec<(String, InputSpec)>,
    /// Subroutine-typed inputs bound to registered subroutines by name
    /// (oracles, `Upower`-style handles).
    pub subroutine_inputs: Vec<(String, String)>,
    pub expected_classical: Vec<(String, ClassicalExpectation)>,
    pub expected_quantum: Vec<(String, QuantumCheck)>,
    pub repetitions: u32,
}

impl TestCase {
    pub fn classical(&self, name: &str) -> Option<Value> {
        self.classical_inputs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }

    pub fn classical_int(&self, name: &str) -> Option<i64> {
        self.classical(name).and_then(|v| v.as_int())
    }

    pub fn quantum(&self, name: &str) -> Option<&InputSpec> {
        self.quantum_inputs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, s)| s)
    }

    pub fn subroutine(&self, name: &str) -> Option<&str> {
        self.subroutine_inputs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, s)| s.as_str())
    }
}

/// How a case maps onto a concrete register and argument list. Produced by
/// the benchmark catalog (or any other binder) from the case's inputs.
#[derive(Clone, Debug)]
pub struct CaseBinding {
    pub n_total: usize,
    pub args: Vec<ArgValue>,
    /// Register targets of each quantum input variable.
    pub in_targets: BTreeMap<String, Vec<usize>>,
    /// Register targets of each quantum output variable.
    pub out_targets: BTreeMap<String, Vec<usize>>,
}

pub type BindError = String;
pub type Binder<'a> = dyn Fn(&TestCase) -> Result<CaseBinding, BindError> + 'a;

struct Aggregate {
    counts: Vec<u64>,
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// Execute `case` against subroutine `sub_name`: `repetitions` times, a
/// fresh register is allocated, generation procedures run, the program
/// executes, and expectations are evaluated. Runtime faults fail the case
/// with a fault witness.
pub fn run_case(
    prog: &Program,
    sub_name: &str,
    binder: &Binder<'_>,
    case: &TestCase,
    rng: &mut SplitRng,
) -> Result<CheckVerdict, CheckError> {
    let target = format!("{sub_name}/{}", case.name);
    let sub = prog
        .get(sub_name)
        .ok_or_else(|| CheckError::Unsupported(format!("unknown subroutine `{sub_name}`")))?;
    let binding = binder(case).map_err(CheckError::Unsupported)?;

    let mut aggregates: BTreeMap<usize, Aggregate> = BTreeMap::new();
    let mut qftsup_zeros: BTreeMap<usize, u64> = BTreeMap::new();
    let mut mostly_hits: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cls_aggregates: BTreeMap<usize, Vec<u64>> = BTreeMap::new();

    for rep in 0..case.repetitions {
        let mut state = StateVector::new(binding.n_total)?;
        let mut input_desc = String::new();
        let mut prepared: BTreeMap<&str, crate::stateprep::PreparedInput> = BTreeMap::new();
        for (name, spec) in &case.quantum_inputs {
            // Inputs without register targets are fed through subroutine
            // handles registered by the binder; nothing to prepare here.
            let Some(targets) = binding.in_targets.get(name) else {
                continue;
            };
            let input = spec.materialize(rng)?;
            input.prepare(&mut state, targets)?;
            if !input_desc.is_empty() {
                input_desc.push(' ');
            }
            let _ = write!(input_desc, "{name}={}", input.description());
            prepared.insert(name.as_str(), input);
        }

        let result = match execute(prog, sub, &binding.args, &mut state, rng) {
            Ok(r) => r,
            Err(fault) => {
                return Ok(CheckVerdict::fail(
                    "case",
                    &target,
                    rep as u64 + 1,
                    Witness {
                        input: input_desc,
                        observed: format!("runtime fault: {fault}"),
                    },
                ))
            }
        };

        for (cls_idx, (name, expect)) in case.expected_classical.iter().enumerate() {
            let got = match result.classical_outputs.get(name) {
                Some(v) => *v,
                None => {
                    return Ok(CheckVerdict::fail(
                        "case",
                        &target,
                        rep as u64 + 1,
                        Witness {
                            input: input_desc,
                            observed: format!("no classical output `{name}`"),
                        },
                    ))
                }
            };
            let ok = match expect {
                ClassicalExpectation::Eq(v) => got == *v,
                ClassicalExpectation::InRange { lo, hi } => match got {
                    Value::Int(v) => (*lo..=*hi).contains(&v),
                    _ => false,
                },
                ClassicalExpectation::Near { value, tol } => match got.as_f64() {
                    Some(v) => libm::fabs(v - value) <= *tol,
                    None => false,
                },
                ClassicalExpectation::Distribution { probs, .. } => {
                    let counts = cls_aggregates
                        .entry(cls_idx)
                        .or_insert_with(|| vec![0; probs.len()]);
                    match got {
                        Value::Int(v) if (v as usize) < counts.len() && v >= 0 => {
                            counts[v as usize] += 1;
                            true
                        }
                        _ => false,
                    }
                }
            };
            if !ok {
                return Ok(CheckVerdict::fail(
                    "case",
                    &target,
                    rep as u64 + 1,
                    Witness {
                        input: input_desc,
                        observed: format!("{name} = {got}"),
                    },
                ));
            }
        }

        for (check_idx, (name, check)) in case.expected_quantum.iter().enumerate() {
            let targets = binding.out_targets.get(name).ok_or_else(|| {
                CheckError::Unsupported(format!("no binding for quantum output `{name}`"))
            })?;
            let fail = |observed: String| {
                CheckVerdict::fail(
                    "case",
                    &target,
                    rep as u64 + 1,
                    Witness {
                        input: input_desc.clone(),
                        observed,
                    },
                )
            };
            match check {
                QuantumCheck::UnprepInput { source }
                | QuantumCheck::OrthogonalToInput { source } => {
                    let key = source.as_deref().unwrap_or(name.as_str());
                    let input = prepared.get(key).ok_or_else(|| {
                        CheckError::Unsupported(format!(
                            "check on `{name}` refers to a missing input `{key}`"
                        ))
                    })?;
                    input.unprepare(&mut state, targets)?;
                    let bits = state.measure(targets, rng)?;
                    let zero = bits.iter().all(|&b| b == 0);
                    match check {
                        QuantumCheck::UnprepInput { .. } if !zero => {
                            return Ok(fail(bits_string(&bits)))
                        }
                        QuantumCheck::OrthogonalToInput { .. } if zero => {
                            return Ok(fail("output not distinguishable from input".into()))
                        }
                        _ => {}
                    }
                }
                QuantumCheck::UnprepRecipe(spec) => {
                    let expected = spec.materialize(rng)?;
                    expected.unprepare(&mut state, targets)?;
                    let bits = state.measure(targets, rng)?;
                    if bits.iter().any(|&b| b != 0) {
                        return Ok(fail(bits_string(&bits)));
                    }
                }
                QuantumCheck::MeasureEq(v) => {
                    let bits = state.measure(targets, rng)?;
                    let got = bits_to_u64(&bits);
                    if got != *v {
                        return Ok(fail(format!("measured {got}, expected {v}")));
                    }
                }
                QuantumCheck::QftOut { j } => {
                    apply_qft_inverse_on(&mut state, targets, *j)?;
                    let bits = state.measure(targets, rng)?;
                    if bits.iter().any(|&b| b != 0) {
                        return Ok(fail(bits_string(&bits)));
                    }
                }
                QuantumCheck::QftSup { a, b } => {
                    let branch = if rep % 2 == 0 { *a } else { *b };
                    apply_qft_inverse_on(&mut state, targets, branch)?;
                    let bits = state.measure(targets, rng)?;
                    if bits.iter().all(|&x| x == 0) {
                        *qftsup_zeros.entry(check_idx).or_insert(0) += 1;
                    }
                }
                QuantumCheck::Distribution { probs, .. } => {
                    let bits = state.measure(targets, rng)?;
                    let agg = aggregates.entry(check_idx).or_insert_with(|| Aggregate {
                        counts: vec![0; probs.len()],
                    });
                    let outcome = bits_to_u64(&bits) as usize;
                    if outcome >= agg.counts.len() {
                        return Ok(fail(format!("outcome {outcome} outside table")));
                    }
                    agg.counts[outcome] += 1;
                }
                QuantumCheck::MeasureMostly { value, .. } => {
                    let bits = state.measure(targets, rng)?;
                    if bits_to_u64(&bits) == *value {
                        *mostly_hits.entry(check_idx).or_insert(0) += 1;
                    }
                }
            }
        }
    }

    // Aggregated statistical checks.
    for (check_idx, (name, check)) in case.expected_quantum.iter().enumerate() {
        match check {
            QuantumCheck::Distribution { probs, alpha } => {
                let agg = &aggregates[&check_idx];
                let cfg = StatTestConfig {
                    shots: case.repetitions as u64,
                    alpha: *alpha,
                    method: if probs.len() == 2 {
                        StatMethod::ExactBinomial
                    } else {
                        StatMethod::ChiSquare
                    },
                };
                let v = stat_fit(&agg.counts, probs, &cfg, &format!("{target}:{name}"))?;
                if !v.passed {
                    return Ok(v);
                }
            }
            QuantumCheck::QftSup { .. } => {
                let zeros = qftsup_zeros.get(&check_idx).copied().unwrap_or(0);
                let n = case.repetitions as u64;
                let cfg = StatTestConfig {
                    shots: n,
                    alpha: 0.01,
                    method: StatMethod::ExactBinomial,
                };
                let v = stat_fit(
                    &[zeros, n - zeros],
                    &[0.5, 0.5],
                    &cfg,
                    &format!("{target}:{name}"),
                )?;
                if !v.passed {
                    return Ok(v);
                }
            }
            QuantumCheck::MeasureMostly { value, min_rate } => {
                let hits = mostly_hits.get(&check_idx).copied().unwrap_or(0);
                let rate = hits as f64 / case.repetitions as f64;
                if rate < *min_rate {
                    return Ok(CheckVerdict::fail(
                        "case",
                        &target,
                        case.repetitions as u64,
                        Witness {
                            input: format!("{name}"),
                            observed: format!(
                                "value {value} measured in {rate:.3} of runs, need {min_rate}"
                            ),
                        },
                    )
                    .with_statistic(rate, *min_rate));
                }
            }
            _ => {}
        }
    }

    for (cls_idx, (name, expect)) in case.expected_classical.iter().enumerate() {
        if let ClassicalExpectation::Distribution { probs, alpha } = expect {
            let counts = cls_aggregates
                .get(&cls_idx)
                .cloned()
                .unwrap_or_else(|| vec![0; probs.len()]);
            let cfg = StatTestConfig {
                shots: case.repetitions as u64,
                alpha: *alpha,
                method: if probs.len() == 2 {
                    StatMethod::ExactBinomial
                } else {
                    StatMethod::ChiSquare
                },
            };
            let v = stat_fit(&counts, probs, &cfg, &format!("{target}:{name}"))?;
            if !v.passed {
                return Ok(v);
            }
        }
    }

    Ok(CheckVerdict::pass("case", &target, case.repetitions as u64))
}

fn apply_qft_inverse_on(
    state: &mut StateVector,
    targets: &[usize],
    j: u64,
) -> Result<(), crate::simcore::SimError> {
    let n = targets.len();
    for k in 1..=n {
        let modulus = 1u64 << k;
        let theta = 2.0 * core::f64::consts::PI * ((j % modulus) as f64) / modulus as f64;
        state.apply_gate(&Gate::R1(-theta), &[targets[k - 1]])?;
        state.apply_gate(&Gate::H, &[targets[k - 1]])?;
    }
    Ok(())
}

/// Summary of a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// (subroutine, case, witness input, witness observed).
    pub failures: Vec<(String, String, String, String)>,
}

impl SuiteSummary {
    /// `true` only when cases ran and none failed; an empty suite is not a
    /// pass.
    pub fn all_passed(&self) -> bool {
        self.total > 0 && self.failed == 0
    }
}

/// Fold verdicts into a summary; order-independent.
pub fn suite_report(verdicts: &[(String, String, CheckVerdict)]) -> SuiteSummary {
    let mut summary = SuiteSummary {
        total: verdicts.len(),
        passed: 0,
        failed: 0,
        failures: Vec::new(),
    };
    for (sub, case, v) in verdicts {
        if v.passed {
            summary.passed += 1;
        } else {
            summary.failed += 1;
            let w = v.witness();
            summary.failures.push((
                sub.clone(),
                case.clone(),
                w.map(|w| w.input.clone()).unwrap_or_default(),
                w.map(|w| w.observed.clone()).unwrap_or_default(),
            ));
        }
    }
    summary
}

/// CSV report: `subroutine,case,verdict,shots,witness`.
pub fn render_csv(verdicts: &[(String, String, CheckVerdict)]) -> String {
    let mut out = String::from("subroutine,case,verdict,shots,witness\n");
    for (sub, case, v) in verdicts {
        let witness = v
            .witness()
            .map(|w| format!("{} -> {}", w.input, w.observed))
            .unwrap_or_default();
        let quoted = witness.replace('"', "\"\"");
        let _ = writeln!(
            out,
            "{sub},{case},{},{},\"{quoted}\"",
            if v.passed { "pass" } else { "fail" },
            v.shots
        );
    }
    out
}

/// JSON mirror of the CSV report.
pub fn render_json(verdicts: &[(String, String, CheckVerdict)]) -> String {
    let mut out = String::from("[");
    for (i, (sub, case, v)) in verdicts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"subroutine\":\"{}\",\"case\":\"{}\",\"verdict\":{}}}",
            crate::checkers::stat::json_escape(sub),
            crate::checkers::stat::json_escape(case),
            v.to_json()
        );
    }
    out.push(']');
    out
}
