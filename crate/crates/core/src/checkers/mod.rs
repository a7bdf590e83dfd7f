//! Output and relation verification.
//!
//! Transform-based checks are one-sided: a correct state never fails them,
//! and any nonzero measurement is proof of a wrong state. Statistical checks
//! convert repeated runs into goodness-of-fit verdicts. Relation checks
//! (identity, equivalence, variant relations, unitarity) reduce to those two
//! primitives via prepare/run/unprepare plumbing.

pub mod stat;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use stat::{chi_square_sf, exact_binomial_p, ln_gamma, two_sample_chi_square};

use crate::qir::{
    controlled_of, execute, execute_inverse, power_of, ArgValue, Callee, Program, RuntimeFault,
    Statement, Subroutine, VariantError,
};
use crate::rng::SplitRng;
use crate::simcore::{bits_to_u64, Gate, SimError, StateVector, MAX_QUBITS};
use crate::stateprep::{sample_input, InputKind, PrepError, PreparedInput};

/// Witness of a failed check: which input exposed it and what was seen.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub input: String,
    pub observed: String,
}

/// Outcome of one check, with enough evidence to reproduce the judgement.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckVerdict {
    pub passed: bool,
    pub check: String,
    pub target: String,
    pub shots: u64,
    pub statistic: Option<f64>,
    pub threshold: Option<f64>,
    witness: Option<Witness>,
}

impl CheckVerdict {
    pub fn pass(check: &str, target: &str, shots: u64) -> Self {
        CheckVerdict {
            passed: true,
            check: check.into(),
            target: target.into(),
            shots,
            statistic: None,
            threshold: None,
            witness: None,
        }
    }

    /// Failed verdicts always carry a witness.
    pub fn fail(check: &str, target: &str, shots: u64, witness: Witness) -> Self {
        CheckVerdict {
            passed: false,
            check: check.into(),
            target: target.into(),
            shots,
            statistic: None,
            threshold: None,
            witness: Some(witness),
        }
    }

    pub fn with_statistic(mut self, statistic: f64, threshold: f64) -> Self {
        self.statistic = Some(statistic);
        self.threshold = Some(threshold);
        self
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    /// JSON record: {check, target, passed, shots, statistic, witness}.
    pub fn to_json(&self) -> String {
        let statistic = match self.statistic {
            Some(s) => format!("{s:?}"),
            None => "null".into(),
        };
        let witness = match &self.witness {
            Some(w) => format!(
                "{{\"input\":\"{}\",\"observed\":\"{}\"}}",
                stat::json_escape(&w.input),
                stat::json_escape(&w.observed)
            ),
            None => "null".into(),
        };
        format!(
            "{{\"check\":\"{}\",\"target\":\"{}\",\"passed\":{},\"shots\":{},\"statistic\":{},\"witness\":{}}}",
            stat::json_escape(&self.check),
            stat::json_escape(&self.target),
            self.passed,
            self.shots,
            statistic,
            witness
        )
    }
}

/// Infrastructure errors (as opposed to failed verdicts).
#[derive(Debug)]
pub enum CheckError {
    Prep(PrepError),
    Sim(SimError),
    Variant(VariantError),
    Unsupported(String),
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::Prep(e) => write!(f, "{e}"),
            CheckError::Sim(e) => write!(f, "{e}"),
            CheckError::Variant(e) => write!(f, "{e}"),
            CheckError::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl From<PrepError> for CheckError {
    fn from(e: PrepError) -> Self {
        CheckError::Prep(e)
    }
}
impl From<SimError> for CheckError {
    fn from(e: SimError) -> Self {
        CheckError::Sim(e)
    }
}
impl From<VariantError> for CheckError {
    fn from(e: VariantError) -> Self {
        CheckError::Variant(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatMethod {
    ChiSquare,
    ExactBinomial,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatTestConfig {
    pub shots: u64,
    pub alpha: f64,
    pub method: StatMethod,
}

impl Default for StatTestConfig {
    fn default() -> Self {
        StatTestConfig {
            shots: 4096,
            alpha: 0.01,
            method: StatMethod::ChiSquare,
        }
    }
}

/// How to run one trial of a subroutine on a fresh register: geometry, IO
/// mapping, and (possibly randomized) classical arguments.
pub struct TrialPlan {
    /// Name of the subroutine in the program.
    pub sub: String,
    /// Width of the register to allocate.
    pub n_total: usize,
    /// Qubits carrying the sampled input state.
    pub prep: Vec<usize>,
    /// Qubits on which the input is un-prepared after the run (the output
    /// mapping; equals `prep` for in-place transforms).
    pub unprep: Vec<usize>,
    /// Measure the whole register (strict) or only the unprep targets
    /// (subroutines whose scratch qubits end in data-dependent states).
    pub check_all: bool,
    /// Produces the argument list for one trial; qubit arguments index into
    /// the `n_total` register.
    pub args: Box<dyn Fn(&mut SplitRng) -> Vec<ArgValue> + Send + Sync>,
}

impl TrialPlan {
    /// Plan for a subroutine shaped `(n: int, qs: qubit[n])` acting in
    /// place on the whole register.
    pub fn simple(sub: &str, n: usize) -> TrialPlan {
        let all: Vec<usize> = (0..n).collect();
        TrialPlan {
            sub: sub.into(),
            n_total: n,
            prep: all.clone(),
            unprep: all.clone(),
            check_all: true,
            args: Box::new(move |_| {
                vec![ArgValue::Int(n as i64), ArgValue::Qubits(all.clone())]
            }),
        }
    }

    fn measured(&self) -> Vec<usize> {
        if self.check_all {
            (0..self.n_total).collect()
        } else {
            self.unprep.clone()
        }
    }
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

fn fault_witness(input: &str, fault: &RuntimeFault) -> Witness {
    Witness {
        input: input.into(),
        observed: format!("runtime fault: {fault}"),
    }
}

/// Transform-based check: apply the inverse of the expected-output
/// generator, measure every qubit, and pass iff all bits are zero. Any 1 is
/// proof of a wrong state.
pub fn transform_check<F>(
    state: &mut StateVector,
    target: &str,
    inverse_expected: F,
    rng: &mut SplitRng,
) -> Result<CheckVerdict, CheckError>
where
    F: FnOnce(&mut StateVector) -> Result<(), SimError>,
{
    inverse_expected(state)?;
    let all: Vec<usize> = (0..state.n_qubits()).collect();
    let bits = state.measure(&all, rng)?;
    if bits.iter().all(|&b| b == 0) {
        Ok(CheckVerdict::pass("transform", target, 1))
    } else {
        Ok(CheckVerdict::fail(
            "transform",
            target,
            1,
            Witness {
                input: String::new(),
                observed: bits_string(&bits),
            },
        ))
    }
}

/// Per-qubit inverse of the Fourier product state for classical input `j`:
/// on qubit k (1-based) apply R1(-theta_{j,k}) then H, where theta_{j,k} =
/// 2 pi (j mod 2^k) / 2^k. Measuring all zeros certifies the output.
pub fn qft_output_check(
    j: u64,
    n: usize,
    state: &mut StateVector,
    rng: &mut SplitRng,
) -> Result<CheckVerdict, CheckError> {
    if state.n_qubits() != n {
        return Err(CheckError::Unsupported(format!(
            "state has {} qubits, expected {n}",
            state.n_qubits()
        )));
    }
    apply_qft_output_inverse(j, n, state)?;
    let all: Vec<usize> = (0..n).collect();
    let bits = state.measure(&all, rng)?;
    let target = format!("qft(j={j},n={n})");
    if bits.iter().all(|&b| b == 0) {
        Ok(CheckVerdict::pass("qft-output", &target, 1))
    } else {
        Ok(CheckVerdict::fail(
            "qft-output",
            &target,
            1,
            Witness {
                input: format!("j={j}"),
                observed: bits_string(&bits),
            },
        ))
    }
}

/// The inverse-generator rotation ladder used by [`qft_output_check`],
/// exposed for reuse by trigger trials.
pub fn apply_qft_output_inverse(
    j: u64,
    n: usize,
    state: &mut StateVector,
) -> Result<(), SimError> {
    for k in 1..=n {
        let modulus = 1u64 << k;
        let theta = 2.0 * core::f64::consts::PI * ((j % modulus) as f64) / (modulus as f64);
        state.apply_gate(&Gate::R1(-theta), &[k - 1])?;
        state.apply_gate(&Gate::H, &[k - 1])?;
    }
    Ok(())
}

/// Goodness-of-fit of observed outcome counts against an expected
/// probability table.
pub fn stat_fit(
    observed: &[u64],
    expected: &[f64],
    cfg: &StatTestConfig,
    target: &str,
) -> Result<CheckVerdict, CheckError> {
    if observed.len() != expected.len() {
        return Err(CheckError::Unsupported(format!(
            "{} observed bins vs {} expected",
            observed.len(),
            expected.len()
        )));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(CheckError::Unsupported("no observations".into()));
    }
    let sum: f64 = expected.iter().sum();
    if libm::fabs(sum - 1.0) > 1e-9 || expected.iter().any(|&p| p < 0.0) {
        return Err(CheckError::Unsupported(
            "expected probabilities must sum to 1".into(),
        ));
    }
    // An observation in a zero-probability bin is proof of misfit.
    for (i, (&o, &p)) in observed.iter().zip(expected).enumerate() {
        if p == 0.0 && o > 0 {
            return Ok(CheckVerdict::fail(
                "stat-fit",
                target,
                total,
                Witness {
                    input: format!("bin {i}"),
                    observed: format!("{o} observations in a zero-probability bin"),
                },
            ));
        }
    }
    let p_value = match cfg.method {
        StatMethod::ExactBinomial => {
            if observed.len() != 2 {
                return Err(CheckError::Unsupported(
                    "exact binomial requires exactly two outcomes".into(),
                ));
            }
            exact_binomial_p(observed[0], total, expected[0])
        }
        StatMethod::ChiSquare => stat::chi_square_gof(observed, expected).2,
    };
    let verdict = if p_value >= cfg.alpha {
        CheckVerdict::pass("stat-fit", target, total)
    } else {
        CheckVerdict::fail(
            "stat-fit",
            target,
            total,
            Witness {
                input: format!("{observed:?}"),
                observed: format!("p-value {p_value:.6} below alpha {}", cfg.alpha),
            },
        )
    };
    Ok(verdict.with_statistic(p_value, cfg.alpha))
}

/// One prepare/act/unprepare/measure round. The sampled classical arguments
/// are drawn once and handed to `middle`, so a composition (run P, then run
/// inv P) sees identical arguments on both legs. `unprep` gives the qubits
/// the input is inverted on (the subroutine's output mapping), `measured`
/// the qubits required to read zero.
fn run_prepared_trial(
    prog: &Program,
    plan: &TrialPlan,
    input: &PreparedInput,
    unprep: &[usize],
    measured: &[usize],
    rng: &mut SplitRng,
    middle: impl FnOnce(
        &Program,
        &Subroutine,
        &[ArgValue],
        &mut StateVector,
        &mut SplitRng,
    ) -> Result<(), RuntimeFault>,
) -> Result<Result<(), Witness>, CheckError> {
    let sub = prog
        .get(&plan.sub)
        .ok_or_else(|| CheckError::Unsupported(format!("unknown subroutine `{}`", plan.sub)))?;
    let mut state = StateVector::new(plan.n_total)?;
    input.prepare(&mut state, &plan.prep)?;
    let args = (plan.args)(rng);
    if let Err(fault) = middle(prog, sub, &args, &mut state, rng) {
        return Ok(Err(fault_witness(input.description(), &fault)));
    }
    input.unprepare(&mut state, unprep)?;
    let bits = state.measure(measured, rng)?;
    if bits.iter().all(|&b| b == 0) {
        Ok(Ok(()))
    } else {
        Ok(Err(Witness {
            input: input.description().into(),
            observed: bits_string(&bits),
        }))
    }
}

/// Identity checking: prepare a sampled input, run the subroutine,
/// un-prepare, and measure; every trial must land on all-zero bits.
pub fn identity_check(
    prog: &Program,
    plan: &TrialPlan,
    trials: u32,
    kinds: &[InputKind],
    rng: &mut SplitRng,
) -> Result<CheckVerdict, CheckError> {
    let target = plan.sub.clone();
    for t in 0..trials {
        let kind = kinds[t as usize % kinds.len()];
        let input = sample_input(kind, plan.prep.len(), rng)?;
        let outcome = run_prepared_trial(
            prog,
            plan,
            &input,
            &plan.unprep,
            &plan.measured(),
            rng,
            |p, s, a, st, r| execute(p, s, a, st, r).map(|_| ()),
        )?;
        if let Err(witness) = outcome {
            return Ok(CheckVerdict::fail("identity", &target, (t + 1) as u64, witness));
        }
    }
    Ok(CheckVerdict::pass("identity", &target, trials as u64))
}

/// Equivalence of two subroutines with matching signatures. When `p2` is
/// adjointable this reduces to identity checking of `inv(p2) . p1`;
/// otherwise the measured output distributions over shared sampled inputs
/// are compared with a two-sample chi-square at `alpha / inputs`.
pub fn equivalence_check(
    prog: &Program,
    plan1: &TrialPlan,
    plan2: &TrialPlan,
    trials: u32,
    kinds: &[InputKind],
    cfg: &StatTestConfig,
    rng: &mut SplitRng,
) -> Result<CheckVerdict, CheckError> {
    let target = format!("{}={}", plan1.sub, plan2.sub);
    if plan1.n_total != plan2.n_total || plan1.prep != plan2.prep {
        return Err(CheckError::Unsupported(
            "equivalence requires matching signatures".into(),
        ));
    }
    if prog.is_adjointable(&plan2.sub) {
        let p2 = prog
            .get(&plan2.sub)
            .ok_or_else(|| CheckError::Unsupported("unknown subroutine".into()))?;
        for t in 0..trials {
            let kind = kinds[t as usize % kinds.len()];
            let input = sample_input(kind, plan1.prep.len(), rng)?;
            // Matching signatures: one argument draw serves both legs.
            let outcome = run_prepared_trial(
                prog,
                plan1,
                &input,
                &plan1.prep,
                &(0..plan1.n_total).collect::<Vec<_>>(),
                rng,
                |p, s, a, st, r| {
                    execute(p, s, a, st, r)?;
                    execute_inverse(p, p2, a, st, r)
                },
            )?;
            if let Err(witness) = outcome {
                return Ok(CheckVerdict::fail(
                    "equivalence",
                    &target,
                    (t + 1) as u64,
                    witness,
                ));
            }
        }
        return Ok(CheckVerdict::pass("equivalence", &target, trials as u64));
    }

    // Statistical route: shared inputs, measured output distributions.
    let inputs = trials.max(1);
    let per_input_alpha = cfg.alpha / inputs as f64;
    let mut shots_used = 0u64;
    for t in 0..inputs {
        let kind = kinds[t as usize % kinds.len()];
        let input = sample_input(kind, plan1.prep.len(), rng)?;
        let shared_args = (plan1.args)(rng);
        let dim = 1usize << plan1.measured().len();
        let mut counts = [vec![0u64; dim], vec![0u64; dim]];
        for (which, plan) in [plan1, plan2].into_iter().enumerate() {
            let sub = prog
                .get(&plan.sub)
                .ok_or_else(|| CheckError::Unsupported("unknown subroutine".into()))?;
            for _ in 0..cfg.shots {
                let mut state = StateVector::new(plan.n_total)?;
                input.prepare(&mut state, &plan.prep)?;
                let args = shared_args.clone();
                if let Err(fault) = execute(prog, sub, &args, &mut state, rng) {
                    return Ok(CheckVerdict::fail(
                        "equivalence",
                        &target,
                        shots_used,
                        fault_witness(input.description(), &fault),
                    ));
                }
                let bits = state.measure(&plan.measured(), rng)?;
                counts[which][bits_to_u64(&bits) as usize] += 1;
                shots_used += 1;
            }
        }
        let (statistic, _, p) = two_sample_chi_square(&counts[0], &counts[1]);
        if p < per_input_alpha {
            return Ok(CheckVerdict::fail(
                "equivalence",
                &target,
                shots_used,
                Witness {
                    input: input.description().into(),
                    observed: format!("distributions differ (p={p:.6})"),
                },
            )
            .with_statistic(statistic, per_input_alpha));
        }
    }
    Ok(CheckVerdict::pass("equivalence", &target, shots_used))
}

fn stv_input(n: usize, t: u32, rng: &mut SplitRng) -> Result<PreparedInput, CheckError> {
    // Cycle |x>, (|x>+|y>)/sqrt2, (|x>+i|y>)/sqrt2.
    match t % 3 {
        0 => Ok(sample_input(InputKind::Ci, n, rng)?),
        1 => Ok(sample_input(InputKind::Rti, n, rng)?),
        _ => {
            let picks = rng.distinct_below(1u64 << n, 2);
            Ok(crate::stateprep::gen_two_value(
                n,
                picks[0],
                picks[1],
                core::f64::consts::FRAC_PI_2,
            )?)
        }
    }
}

/// Variant relations of an adjointable subroutine: the inverse identity,
/// power identities for k in {-2, -1, 2, 3}, and controlled
/// activation/deactivation. Pass is the conjunction of every sub-check.
pub fn variant_checks(
    prog: &mut Program,
    plan: &TrialPlan,
    trials: u32,
    rng: &mut SplitRng,
) -> Result<CheckVerdict, CheckError> {
    let name = plan.sub.clone();
    if !prog.is_adjointable(&name) {
        return Err(CheckError::Variant(VariantError::NotAdjointable(name)));
    }

    let all: Vec<usize> = (0..plan.n_total).collect();

    // Relation 1: inv(P) . P = I over STV inputs.
    let base = prog.get(&name).cloned().unwrap();
    for t in 0..trials {
        let input = stv_input(plan.prep.len(), t, rng)?;
        let outcome = run_prepared_trial(
            prog,
            plan,
            &input,
            &plan.prep,
            &all,
            rng,
            |p, s, a, st, r| {
                execute(p, s, a, st, r)?;
                execute_inverse(p, &base, a, st, r)
            },
        )?;
        if let Err(w) = outcome {
            return Ok(CheckVerdict::fail("variant-inverse", &name, (t + 1) as u64, w));
        }
    }

    // Relation 2: inv(P)^k . P^k = I (and mirrored for k < 0).
    for k in [-2i32, -1, 2, 3] {
        let pow_name = power_of(prog, &name, k)?;
        let pow = prog.get(&pow_name).cloned().unwrap();
        for t in 0..trials.div_ceil(4) {
            let input = stv_input(plan.prep.len(), t, rng)?;
            let base = base.clone();
            let outcome = run_prepared_trial(
                prog,
                plan,
                &input,
                &plan.prep,
                &all,
                rng,
                |p, _s, a, st, r| {
                    execute(p, &pow, a, st, r)?;
                    for _ in 0..k.unsigned_abs() {
                        if k > 0 {
                            execute_inverse(p, &base, a, st, r)?;
                        } else {
                            execute(p, &base, a, st, r).map(|_| ())?;
                        }
                    }
                    Ok(())
                },
            )?;
            if let Err(w) = outcome {
                return Ok(CheckVerdict::fail(
                    "variant-power",
                    &format!("{name}^{k}"),
                    (t + 1) as u64,
                    w,
                ));
            }
        }
    }

    // Relation 3: controlled activation and deactivation.
    let ctl_name = controlled_of(prog, &name)?;
    let ctl = prog.get(&ctl_name).cloned().unwrap();
    let n_ctl = 1usize;
    if plan.n_total + n_ctl > MAX_QUBITS {
        return Err(CheckError::Unsupported("controlled check exceeds qubit cap".into()));
    }
    let ctl_qubits: Vec<usize> = (plan.n_total..plan.n_total + n_ctl).collect();
    for t in 0..trials.div_ceil(2) {
        let active = t % 2 == 0;
        let input = stv_input(plan.prep.len(), t, rng)?;
        let mut state = StateVector::new(plan.n_total + n_ctl)?;
        input.prepare(&mut state, &plan.prep)?;
        if active {
            for &c in &ctl_qubits {
                state.apply_gate(&Gate::X, &[c])?;
            }
        }
        let mut args = vec![ArgValue::Qubits(ctl_qubits.clone())];
        let base_args = (plan.args)(rng);
        args.extend(base_args.iter().cloned());
        if let Err(fault) = execute(prog, &ctl, &args, &mut state, rng) {
            return Ok(CheckVerdict::fail(
                "variant-controlled",
                &name,
                (t + 1) as u64,
                fault_witness(input.description(), &fault),
            ));
        }
        if active {
            // With all-ones controls the effect is P itself.
            if let Err(fault) = execute_inverse(prog, &base, &base_args, &mut state, rng) {
                return Ok(CheckVerdict::fail(
                    "variant-controlled",
                    &name,
                    (t + 1) as u64,
                    fault_witness(input.description(), &fault),
                ));
            }
            for &c in &ctl_qubits {
                state.apply_gate(&Gate::X, &[c])?;
            }
        }
        input.unprepare(&mut state, &plan.prep)?;
        let measured: Vec<usize> = (0..plan.n_total + n_ctl).collect();
        let bits = state.measure(&measured, rng)?;
        if bits.iter().any(|&b| b != 0) {
            return Ok(CheckVerdict::fail(
                "variant-controlled",
                &name,
                (t + 1) as u64,
                Witness {
                    input: format!(
                        "{} (controls {})",
                        input.description(),
                        if active { "all-one" } else { "zero" }
                    ),
                    observed: bits_string(&bits),
                },
            ));
        }
    }

    Ok(CheckVerdict::pass("variant-relations", &name, trials as u64))
}

fn scan_measurements(prog: &Program, sub: &Subroutine, path: &mut Vec<String>) -> Option<String> {
    fn walk(
        prog: &Program,
        body: &[Statement],
        path: &mut Vec<String>,
    ) -> Option<String> {
        for (i, s) in body.iter().enumerate() {
            path.push(alloc::string::ToString::to_string(&i));
            let hit = match s {
                Statement::MeasureInto { .. } => Some(path.join("/")),
                Statement::Call {
                    callee: Callee::Named(f),
                    ..
                } => {
                    path.push(format!("call:{f}"));
                    let r = prog.get(f).and_then(|sub| {
                        walk(prog, &sub.body, path)
                    });
                    path.pop();
                    r
                }
                Statement::If {
                    then_body,
                    else_body,
                    ..
                } => walk(prog, then_body, path).or_else(|| walk(prog, else_body, path)),
                Statement::For { body, .. } | Statement::RepeatUntil { body, .. } => {
                    walk(prog, body, path)
                }
                Statement::WithinApply { outer, inner } => {
                    walk(prog, outer, path).or_else(|| walk(prog, inner, path))
                }
                Statement::Controlled { inner, .. } => {
                    walk(prog, core::slice::from_ref(inner), path)
                }
                _ => None,
            };
            path.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
    walk(prog, &sub.body, path)
}

/// Unitarity heuristic for transform-type subroutines.
///
/// Static phase: any reachable measurement statement (following named calls
/// and the handles bound by the plan) fails immediately with its site as
/// witness. Dynamic phase: over sampled complementary-superposition inputs,
/// the output purity tr(rho^2) is estimated by running the subroutine
/// independently on two registers and swap-testing them; the check passes
/// iff the estimate stays within 3 standard errors of 1 on every input.
pub fn unitarity_check(
    prog: &Program,
    plan: &TrialPlan,
    trials: u32,
    shots_per_purity: u64,
    rng: &mut SplitRng,
) -> Result<CheckVerdict, CheckError> {
    let name = plan.sub.clone();
    let sub = prog
        .get(&name)
        .ok_or_else(|| CheckError::Unsupported(format!("unknown subroutine `{name}`")))?;

    // Static scan of the subroutine and the handles this plan binds.
    let mut scan_targets = vec![sub.clone()];
    for arg in (plan.args)(&mut rng.split()) {
        if let ArgValue::Sub(h) = arg {
            if let Some(hs) = prog.get(&h) {
                scan_targets.push(hs.clone());
            }
        }
    }
    for target in &scan_targets {
        let mut path = vec![target.name.clone()];
        if let Some(site) = scan_measurements(prog, target, &mut path) {
            return Ok(CheckVerdict::fail(
                "unitarity",
                &name,
                0,
                Witness {
                    input: "static scan".into(),
                    observed: format!("measurement at {site}"),
                },
            ));
        }
    }

    // Dynamic purity estimation via the swap-test pattern.
    let n = plan.n_total;
    if 2 * n + 1 > MAX_QUBITS {
        return Err(CheckError::Unsupported(format!(
            "purity estimation needs {} qubits, cap is {MAX_QUBITS}",
            2 * n + 1
        )));
    }
    let anc = 2 * n;
    for t in 0..trials {
        let input = sample_input(InputKind::Csi, plan.prep.len(), rng)?;
        let args = (plan.args)(rng);
        let shift = |a: &ArgValue, off: usize| match a {
            ArgValue::Qubits(qs) => ArgValue::Qubits(qs.iter().map(|&q| q + off).collect()),
            other => other.clone(),
        };
        let args_a: Vec<ArgValue> = args.iter().map(|a| shift(a, 0)).collect();
        let args_b: Vec<ArgValue> = args.iter().map(|a| shift(a, n)).collect();
        let prep_b: Vec<usize> = plan.prep.iter().map(|&q| q + n).collect();

        let mut zeros = 0u64;
        for _ in 0..shots_per_purity {
            let mut state = StateVector::new(2 * n + 1)?;
            input.prepare(&mut state, &plan.prep)?;
            input.prepare(&mut state, &prep_b)?;
            for (sub_args, label) in [(&args_a, "A"), (&args_b, "B")] {
                if let Err(fault) = execute(prog, sub, sub_args, &mut state, rng) {
                    return Ok(CheckVerdict::fail(
                        "unitarity",
                        &name,
                        0,
                        fault_witness(&format!("{} [{label}]", input.description()), &fault),
                    ));
                }
            }
            state.apply_gate(&Gate::H, &[anc])?;
            for q in 0..n {
                state.apply_gate(&Gate::Cswap, &[anc, q, q + n])?;
            }
            state.apply_gate(&Gate::H, &[anc])?;
            let bits = state.measure(&[anc], rng)?;
            if bits[0] == 0 {
                zeros += 1;
            }
        }
        let p0 = zeros as f64 / shots_per_purity as f64;
        let purity = 2.0 * p0 - 1.0;
        let sigma = 2.0 * libm::sqrt(p0 * (1.0 - p0) / shots_per_purity as f64);
        let bound = 1.0 - 3.0 * sigma - 1e-9;
        if purity < bound {
            return Ok(CheckVerdict::fail(
                "unitarity",
                &name,
                (t as u64 + 1) * shots_per_purity,
                Witness {
                    input: input.description().into(),
                    observed: format!("estimated purity {purity:.4} below {bound:.4}"),
                },
            )
            .with_statistic(purity, bound));
        }
    }
    Ok(CheckVerdict::pass(
        "unitarity",
        &name,
        trials as u64 * shots_per_purity,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qir::{gate, GateKind, Param, QubitRef};

    #[test]
    fn transform_check_examples() {
        let mut rng = SplitRng::seed_from(1);
        // |+> checked with H always passes.
        for _ in 0..50 {
            let mut s = StateVector::new(1).unwrap();
            s.apply_gate(&Gate::H, &[0]).unwrap();
            let v = transform_check(&mut s, "plus", |st| st.apply_gate(&Gate::H, &[0]), &mut rng)
                .unwrap();
            assert!(v.passed);
        }
        // |-> checked with H fails deterministically with witness bit 1.
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&Gate::X, &[0]).unwrap();
        s.apply_gate(&Gate::H, &[0]).unwrap();
        let v = transform_check(&mut s, "minus", |st| st.apply_gate(&Gate::H, &[0]), &mut rng)
            .unwrap();
        assert!(!v.passed);
        assert_eq!(v.witness().unwrap().observed, "1");
        // |0> with the identity passes.
        let mut s = StateVector::new(1).unwrap();
        let v = transform_check(&mut s, "zero", |_| Ok(()), &mut rng).unwrap();
        assert!(v.passed);
    }

    #[test]
    fn stat_fit_examples() {
        let cfg = StatTestConfig::default();
        let v = stat_fit(&[5000, 5000], &[0.5, 0.5], &cfg, "uniform2").unwrap();
        assert!(v.passed);
        let v = stat_fit(&[10000, 0], &[0.5, 0.5], &cfg, "skew").unwrap();
        assert!(!v.passed);
        // Observation in a zero-probability bin fails outright.
        let v = stat_fit(&[9999, 1], &[1.0, 0.0], &cfg, "impossible").unwrap();
        assert!(!v.passed);
        assert!(v.witness().unwrap().observed.contains("zero-probability"));
        // Exact binomial route.
        let cfg = StatTestConfig {
            method: StatMethod::ExactBinomial,
            ..StatTestConfig::default()
        };
        let v = stat_fit(&[512, 488], &[0.5, 0.5], &cfg, "coin").unwrap();
        assert!(v.passed);
    }

    #[test]
    fn verdict_json_shape() {
        let v = CheckVerdict::fail(
            "identity",
            "Foo",
            3,
            Witness {
                input: "CI(x=1,n=1)".into(),
                observed: "01".into(),
            },
        );
        let json = v.to_json();
        assert!(json.contains("\"check\":\"identity\""));
        assert!(json.contains("\"passed\":false"));
        assert!(json.contains("\"observed\":\"01\""));
    }

    #[test]
    fn identity_check_flags_an_x_gate() {
        let mut prog = Program::new();
        prog.register(Subroutine::new(
            "JustX",
            vec![Param::int("n"), Param::qubits("qs", Some(crate::qir::Expr::var("n")))],
            &[],
            vec![gate(GateKind::X, vec![QubitRef::at("qs", 0)])],
        ))
        .unwrap();
        prog.register(Subroutine::new(
            "Nothing",
            vec![Param::int("n"), Param::qubits("qs", Some(crate::qir::Expr::var("n")))],
            &[],
            vec![],
        ))
        .unwrap();
        let mut rng = SplitRng::seed_from(5);
        let v = identity_check(
            &prog,
            &TrialPlan::simple("Nothing", 3),
            25,
            &[InputKind::Ci, InputKind::Rti, InputKind::Csi],
            &mut rng,
        )
        .unwrap();
        assert!(v.passed);
        let v = identity_check(
            &prog,
            &TrialPlan::simple("JustX", 3),
            25,
            &[InputKind::Ci],
            &mut rng,
        )
        .unwrap();
        assert!(!v.passed, "an X gate is not the identity");
    }

    #[test]
    fn qft_check_rejects_wrong_j() {
        // Prepare the QFT product state for j directly from its definition
        // and check it against j and against a wrong j'.
        let n = 3usize;
        let mut rng = SplitRng::seed_from(8);
        for j in 0..(1u64 << n) {
            let build = || {
                let mut s = StateVector::new(n).unwrap();
                for k in 1..=n {
                    let modulus = 1u64 << k;
                    let theta =
                        2.0 * core::f64::consts::PI * ((j % modulus) as f64) / modulus as f64;
                    s.apply_gate(&Gate::H, &[k - 1]).unwrap();
                    s.apply_gate(&Gate::R1(theta), &[k - 1]).unwrap();
                }
                s
            };
            for _ in 0..20 {
                let v = qft_output_check(j, n, &mut build(), &mut rng).unwrap();
                assert!(v.passed, "j={j}");
            }
            // A wrong j is eventually detected.
            let wrong = (j + 1) % (1 << n);
            let mut hits = 0;
            for _ in 0..60 {
                let v = qft_output_check(wrong, n, &mut build(), &mut rng).unwrap();
                if !v.passed {
                    hits += 1;
                }
            }
            assert!(hits > 0, "wrong j'={wrong} never detected for j={j}");
        }
    }
}
