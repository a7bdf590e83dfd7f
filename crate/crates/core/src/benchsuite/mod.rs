//! The benchmark corpus: named subroutines, IO marks, trial plans for
//! relation checking and trigger campaigns, case binders for the suite
//! runner, specification oracles, and the default test suites.

mod builders;
pub mod oracle;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

pub use builders::make_phase_oracle;
pub use oracle::{
    grover_iterations, input_state_amplitudes, spec_qft, spec_swap_test, DensityMatrix,
    OracleError, ORACLE_MAX_QUBITS,
};

use crate::checkers::TrialPlan;
use crate::qir::{ArgValue, Program};
use crate::rng::SplitRng;
use crate::simcore::{StateVector, MAX_QUBITS};
use crate::stateprep::PreparedInput;
use crate::testkit::{
    classify_io_type, parse_io_mark, Binder, CaseBinding, IoMark, IoType, TestCase,
};

/// One benchmark: its subroutine name, IO mark, scale range, and
/// classification.
#[derive(Clone, Debug)]
pub struct BenchmarkEntry {
    pub name: &'static str,
    pub mark_text: &'static str,
    pub io_type: IoType,
    pub adjointable: bool,
    /// Valid range of the scale parameter `n` (register size).
    pub min_n: usize,
    pub max_n: usize,
}

impl BenchmarkEntry {
    pub fn mark(&self) -> IoMark {
        parse_io_mark(self.mark_text).expect("catalog marks are well-formed")
    }
}

const MARKS: &[(&str, &str, usize, usize)] = &[
    ("QRandom", "QRandom : (n) -> (r')", 0, 12),
    ("GenQInt", "GenQInt : (n, x) -> (q:qs')", 1, 12),
    ("GenXPlusY", "GenXPlusY : (n, x, y) -> (q:qs')", 1, 12),
    ("GenMaxSup", "GenMaxSup : (n) -> (q:qs')", 1, 12),
    ("GenMaxMix", "GenMaxMix : (n) -> (q:qs')", 1, 12),
    (
        "SwapTest",
        "SwapTest : (n, sub:q:GenRho1, sub:q:GenRho2) -> (result')",
        1,
        7,
    ),
    ("Purity", "Purity : (n, t, sub:q:GenRho) -> (isPure')", 1, 7),
    (
        "InnerProduct",
        "InnerProduct : (n, t, sub:q:GenRho1, sub:q:GenRho2) -> (est')",
        1,
        7,
    ),
    ("Empty", "Empty : (n, q:qs) -> (q:qs')", 1, 12),
    ("Reverse", "Reverse : (n, q:qs) -> (q:qs')", 1, 12),
    (
        "MultiSWAP",
        "MultiSWAP : (n, q:qs1, q:qs2) -> (q:qs1', q:qs2')",
        1,
        8,
    ),
    (
        "CRk",
        "CRk : (k, q:qctrl, q:qtar) -> (q:qctrl', q:qtar')",
        2,
        2,
    ),
    ("PhaseFlip", "PhaseFlip : (n, q:qs) -> (q:qs')", 1, 12),
    ("Grover", "Grover : (n, sub:q:OracleK) -> (q:qs')", 2, 10),
    ("QFT", "QFT : (n, q:qs) -> (q:qs')", 1, 12),
    ("QAdd", "QAdd : (n, q:qs1, q:qs2) -> (q:qs1', q:qs2')", 1, 8),
    ("Teleport", "Teleport : (q:qsrc) -> (q:qdest')", 3, 3),
    (
        "QPE",
        "QPE : (Nclock, Ntarget, sub:q:Upower, q:target) -> (q:clock'^BE)",
        1,
        12,
    ),
];

/// Build the shared program holding every benchmark and helper.
pub fn build_program() -> Program {
    let mut prog = Program::new();
    builders::register_all(&mut prog).expect("benchmark corpus registers cleanly");
    prog
}

/// All benchmark entries, in catalog order.
pub fn catalog() -> Vec<BenchmarkEntry> {
    let prog = build_program();
    MARKS
        .iter()
        .map(|&(name, mark_text, min_n, max_n)| {
            let mark = parse_io_mark(mark_text).expect("static mark");
            BenchmarkEntry {
                name,
                mark_text,
                io_type: classify_io_type(&mark),
                adjointable: prog.is_adjointable(name),
                min_n,
                max_n,
            }
        })
        .collect()
}

pub fn entry(name: &str) -> Option<BenchmarkEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

/// Geometry + arguments for one trial of a benchmark at scale `n`: used by
/// identity/variant/unitarity checking and by trigger campaigns. The
/// `unprep` side encodes the benchmark's output permutation (`Reverse`
/// reverses, `MultiSWAP` crosses registers, `Teleport` moves the source
/// qubit to the destination).
pub fn trial_plan(name: &str, n: usize) -> Result<TrialPlan, String> {
    let plan = match name {
        "Empty" | "PhaseFlip" | "GenMaxSup" | "QFT" => {
            let all: Vec<usize> = (0..n).collect();
            TrialPlan {
                sub: name.into(),
                n_total: n,
                prep: all.clone(),
                unprep: all.clone(),
                check_all: true,
                args: Box::new(move |_| {
                    vec![ArgValue::Int(n as i64), ArgValue::Qubits(all.clone())]
                }),
            }
        }
        "Reverse" => {
            let all: Vec<usize> = (0..n).collect();
            let reversed: Vec<usize> = all.iter().rev().copied().collect();
            TrialPlan {
                sub: name.into(),
                n_total: n,
                prep: all.clone(),
                unprep: reversed,
                check_all: true,
                args: Box::new(move |_| {
                    vec![ArgValue::Int(n as i64), ArgValue::Qubits(all.clone())]
                }),
            }
        }
        "MultiSWAP" => {
            let first: Vec<usize> = (0..n).collect();
            let second: Vec<usize> = (n..2 * n).collect();
            let prep: Vec<usize> = (0..2 * n).collect();
            let unprep: Vec<usize> = second.iter().chain(&first).copied().collect();
            TrialPlan {
                sub: name.into(),
                n_total: 2 * n,
                prep,
                unprep,
                check_all: true,
                args: Box::new(move |_| {
                    vec![
                        ArgValue::Int(n as i64),
                        ArgValue::Qubits((0..n).collect()),
                        ArgValue::Qubits((n..2 * n).collect()),
                    ]
                }),
            }
        }
        "CRk" => TrialPlan {
            sub: name.into(),
            n_total: 2,
            prep: vec![0, 1],
            unprep: vec![0, 1],
            check_all: true,
            args: Box::new(|rng| {
                vec![
                    ArgValue::Int(rng.below(4) as i64),
                    ArgValue::Qubits(vec![0]),
                    ArgValue::Qubits(vec![1]),
                ]
            }),
        },
        "GenQInt" => TrialPlan {
            sub: name.into(),
            n_total: n,
            prep: (0..n).collect(),
            unprep: (0..n).collect(),
            check_all: true,
            args: Box::new(move |rng| {
                vec![
                    ArgValue::Int(n as i64),
                    ArgValue::Int(rng.below(1 << n) as i64),
                    ArgValue::Qubits((0..n).collect()),
                ]
            }),
        },
        "GenXPlusY" => TrialPlan {
            sub: name.into(),
            n_total: n,
            prep: (0..n).collect(),
            unprep: (0..n).collect(),
            check_all: true,
            args: Box::new(move |rng| {
                vec![
                    ArgValue::Int(n as i64),
                    ArgValue::Int(rng.below(1 << n) as i64),
                    ArgValue::Int(rng.below(1 << n) as i64),
                    ArgValue::Qubits((0..n).collect()),
                ]
            }),
        },
        "QAdd" => {
            let prep: Vec<usize> = (0..2 * n).collect();
            TrialPlan {
                sub: name.into(),
                n_total: 2 * n,
                prep: prep.clone(),
                unprep: prep,
                check_all: true,
                args: Box::new(move |_| {
                    vec![
                        ArgValue::Int(n as i64),
                        ArgValue::Qubits((0..n).collect()),
                        ArgValue::Qubits((n..2 * n).collect()),
                    ]
                }),
            }
        }
        "Teleport" => TrialPlan {
            sub: name.into(),
            n_total: 3,
            prep: vec![0],
            unprep: vec![2],
            check_all: false,
            args: Box::new(|_| vec![ArgValue::Qubits(vec![0, 1, 2])]),
        },
        other => return Err(format!("no trial plan for `{other}`")),
    };
    if plan.n_total > MAX_QUBITS {
        return Err(format!("scale {n} exceeds the simulator cap"));
    }
    Ok(plan)
}

/// Benchmarks supported by trigger-rate experiment campaigns.
pub const EXPERIMENT_BENCHMARKS: &[&str] =
    &["Empty", "Reverse", "MultiSWAP", "CRk", "QFT", "Teleport"];

/// Register the subroutines a test case needs beyond the static corpus:
/// generator handles for quantum inputs of detect-type benchmarks and
/// phase oracles for Grover. Idempotent.
pub fn prepare_case(prog: &mut Program, sub_name: &str, case: &TestCase) -> Result<(), String> {
    if matches!(sub_name, "SwapTest" | "Purity" | "InnerProduct") {
        for (var, spec) in &case.quantum_inputs {
            let name = handle_sub_name(sub_name, &case.name, var);
            if prog.contains(&name) {
                continue;
            }
            let sub = match spec {
                crate::stateprep::InputSpec::MaxMix { n } => {
                    // Wrap the measuring generator so each invocation
                    // redraws a sample of the mixed state.
                    crate::qir::Subroutine::new(
                        &name,
                        vec![crate::qir::Param::qubits(
                            "qs",
                            Some(crate::qir::Expr::Int(*n as i64)),
                        )],
                        &[],
                        vec![crate::qir::call(
                            "GenMaxMix",
                            vec![
                                crate::qir::Arg::Classical(crate::qir::Expr::Int(*n as i64)),
                                crate::qir::Arg::Qubits(crate::qir::QubitSlice::whole("qs")),
                            ],
                        )],
                    )
                }
                pure => {
                    let mut rng = SplitRng::seed_from(0);
                    let input = pure.materialize(&mut rng).map_err(|e| format!("{e}"))?;
                    input.to_subroutine(&name)
                }
            };
            prog.register(sub).map_err(|e| format!("{e}"))?;
        }
    }
    if sub_name == "Grover" {
        let n = case.classical_int("n").ok_or("Grover case needs n")? as usize;
        let k = case.classical_int("k").ok_or("Grover case needs k")? as u64;
        make_phase_oracle(prog, n, k).map_err(|e| format!("{e}"))?;
    }
    Ok(())
}

fn handle_sub_name(sub: &str, case: &str, var: &str) -> String {
    format!("CaseGen.{sub}.{case}.{var}")
}

/// Binder mapping a benchmark's test cases onto registers and arguments.
pub fn case_binder(name: &'static str) -> Box<Binder<'static>> {
    Box::new(move |case: &TestCase| bind_case(name, case))
}

fn need_n(case: &TestCase) -> Result<usize, String> {
    case.classical_int("n")
        .map(|v| v as usize)
        .ok_or_else(|| "case needs classical input n".to_string())
}

fn bind_case(name: &str, case: &TestCase) -> Result<CaseBinding, String> {
    let mut b = CaseBinding {
        n_total: 0,
        args: Vec::new(),
        in_targets: Default::default(),
        out_targets: Default::default(),
    };
    match name {
        "QRandom" | "GenMaxSup" | "GenMaxMix" => {
            let n = need_n(case)?;
            b.n_total = n;
            b.args = vec![ArgValue::Int(n as i64), ArgValue::Qubits((0..n).collect())];
            b.out_targets.insert("qs".into(), (0..n).collect());
        }
        "GenQInt" => {
            let n = need_n(case)?;
            let x = case.classical_int("x").ok_or("GenQInt case needs x")?;
            b.n_total = n;
            b.args = vec![
                ArgValue::Int(n as i64),
                ArgValue::Int(x),
                ArgValue::Qubits((0..n).collect()),
            ];
            b.out_targets.insert("qs".into(), (0..n).collect());
        }
        "GenXPlusY" => {
            let n = need_n(case)?;
            let x = case.classical_int("x").ok_or("case needs x")?;
            let y = case.classical_int("y").ok_or("case needs y")?;
            b.n_total = n;
            b.args = vec![
                ArgValue::Int(n as i64),
                ArgValue::Int(x),
                ArgValue::Int(y),
                ArgValue::Qubits((0..n).collect()),
            ];
            b.out_targets.insert("qs".into(), (0..n).collect());
        }
        "SwapTest" | "Purity" | "InnerProduct" => {
            let n = need_n(case)?;
            b.n_total = 2 * n + 1;
            let anc = vec![0usize];
            let a: Vec<usize> = (1..=n).collect();
            let bb: Vec<usize> = (n + 1..=2 * n).collect();
            let expected_inputs = if name == "Purity" { 1 } else { 2 };
            if case.quantum_inputs.len() != expected_inputs {
                return Err(format!("{name} takes exactly {expected_inputs} rho inputs"));
            }
            let mut args = vec![ArgValue::Int(n as i64)];
            if name != "SwapTest" {
                let t = case.classical_int("t").ok_or("case needs t")?;
                args.push(ArgValue::Int(t));
            }
            args.push(ArgValue::Qubits(anc));
            args.push(ArgValue::Qubits(a));
            args.push(ArgValue::Qubits(bb));
            // Quantum inputs feed through generator handles registered by
            // prepare_case, in declaration order.
            for (var, _) in &case.quantum_inputs {
                args.push(ArgValue::Sub(handle_sub_name(name, &case.name, var)));
            }
            b.args = args;
        }
        "Empty" | "Reverse" | "PhaseFlip" | "QFT" => {
            let n = need_n(case)?;
            b.n_total = n;
            b.args = vec![ArgValue::Int(n as i64), ArgValue::Qubits((0..n).collect())];
            b.in_targets.insert("qs".into(), (0..n).collect());
            b.out_targets.insert("qs".into(), (0..n).collect());
        }
        "MultiSWAP" | "QAdd" => {
            let n = need_n(case)?;
            b.n_total = 2 * n;
            let r1: Vec<usize> = (0..n).collect();
            let r2: Vec<usize> = (n..2 * n).collect();
            b.args = vec![
                ArgValue::Int(n as i64),
                ArgValue::Qubits(r1.clone()),
                ArgValue::Qubits(r2.clone()),
            ];
            b.in_targets.insert("qs1".into(), r1.clone());
            b.in_targets.insert("qs2".into(), r2.clone());
            b.out_targets.insert("qs1".into(), r1);
            b.out_targets.insert("qs2".into(), r2);
        }
        "CRk" => {
            let k = case.classical_int("k").ok_or("CRk case needs k")?;
            b.n_total = 2;
            b.args = vec![
                ArgValue::Int(k),
                ArgValue::Qubits(vec![0]),
                ArgValue::Qubits(vec![1]),
            ];
            b.in_targets.insert("qctrl".into(), vec![0]);
            b.in_targets.insert("qtar".into(), vec![1]);
            b.out_targets.insert("qctrl".into(), vec![0]);
            b.out_targets.insert("qtar".into(), vec![1]);
        }
        "Grover" => {
            let n = need_n(case)?;
            let k = case.classical_int("k").ok_or("Grover case needs k")? as u64;
            b.n_total = n;
            b.args = vec![
                ArgValue::Int(n as i64),
                ArgValue::Int(grover_iterations(n) as i64),
                ArgValue::Qubits((0..n).collect()),
                ArgValue::Sub(format!("PhaseOracle_{n}_{k}")),
            ];
            b.out_targets.insert("qs".into(), (0..n).collect());
        }
        "Teleport" => {
            b.n_total = 3;
            b.args = vec![ArgValue::Qubits(vec![0, 1, 2])];
            b.in_targets.insert("qsrc".into(), vec![0]);
            b.out_targets.insert("qdest".into(), vec![2]);
        }
        "QPE" => {
            let nclock =
                case.classical_int("nclock").ok_or("QPE case needs nclock")? as usize;
            let ntarget =
                case.classical_int("ntarget").ok_or("QPE case needs ntarget")? as usize;
            let upower = case
                .subroutine("upower")
                .ok_or("QPE case needs upower=sub(...)")?;
            b.n_total = nclock + ntarget;
            let clock: Vec<usize> = (0..nclock).collect();
            let target: Vec<usize> = (nclock..nclock + ntarget).collect();
            b.args = vec![
                ArgValue::Int(nclock as i64),
                ArgValue::Int(ntarget as i64),
                ArgValue::Sub(upower.into()),
                ArgValue::Qubits(clock.clone()),
                ArgValue::Qubits(target.clone()),
            ];
            b.in_targets.insert("target".into(), target);
            b.out_targets.insert("clock".into(), clock);
        }
        other => return Err(format!("no case binder for `{other}`")),
    }
    if b.n_total > MAX_QUBITS {
        return Err("case exceeds the simulator cap".into());
    }
    Ok(b)
}

/// Run the QPE benchmark once and return the exact Born distribution of
/// the clock register (big-endian outcomes).
pub fn qpe_clock_distribution(
    prog: &Program,
    nclock: usize,
    ntarget: usize,
    upower: &str,
    target_input: &PreparedInput,
    rng: &mut SplitRng,
) -> Result<Vec<f64>, String> {
    let mut state = StateVector::new(nclock + ntarget).map_err(|e| format!("{e}"))?;
    let target: Vec<usize> = (nclock..nclock + ntarget).collect();
    target_input
        .prepare(&mut state, &target)
        .map_err(|e| format!("{e}"))?;
    let clock: Vec<usize> = (0..nclock).collect();
    let args = vec![
        ArgValue::Int(nclock as i64),
        ArgValue::Int(ntarget as i64),
        ArgValue::Sub(upower.into()),
        ArgValue::Qubits(clock.clone()),
        ArgValue::Qubits(target),
    ];
    let sub = prog.get("QPE").ok_or("QPE not registered")?;
    crate::qir::execute(prog, sub, &args, &mut state, rng).map_err(|e| format!("{e}"))?;
    state
        .exact_distribution(&clock)
        .map_err(|e| format!("{e}"))
}

/// Default Table-style suite for a benchmark, in the suite-file format.
pub fn default_suite_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "QRandom" => {
            "subroutine QRandom\nmark QRandom : (n) -> (r')\npartition n = zero | positive\ncase zero n=0 expect r=0 reps=8\ncase five n=5 expect r=range(0,31) reps=64\n"
        }
        "GenQInt" => {
            "subroutine GenQInt\nmark GenQInt : (n, x) -> (q:qs')\ncase allzero n=5 x=0 expect qs'=measure(0) reps=20\ncase value n=6 x=23 expect qs'=measure(23) reps=20\n"
        }
        "GenXPlusY" => {
            "subroutine GenXPlusY\nmark GenXPlusY : (n, x, y) -> (q:qs')\npartition xy = equal | distinct\ncase equal n=5 x=20 y=20 expect qs'=measure(20) reps=20\ncase distinct n=4 x=5 y=12 expect qs'=unprep(twoval(4,5,12,0.0)) reps=50\n"
        }
        "GenMaxSup" => {
            "subroutine GenMaxSup\nmark GenMaxSup : (n) -> (q:qs')\ncase one n=1 expect qs'=unprep(csup(1,0,0.0)) reps=20\ncase five n=5 expect qs'=unprep(pauli(3,3,3,3,3)) reps=50\n"
        }
        "GenMaxMix" => {
            "subroutine GenMaxMix\nmark GenMaxMix : (n) -> (q:qs')\ncase two n=2 expect m=dist(0:0.25,1:0.25,2:0.25,3:0.25) reps=2048\n"
        }
        "SwapTest" => {
            "subroutine SwapTest\nmark SwapTest : (n, sub:q:GenRho1, sub:q:GenRho2) -> (result')\npartition rho = classical | superposed | mixed\ncase orthogonal n=3 rho1=ketx(3,3) rho2=ketx(3,6) expect result=dist(0:0.5,1:0.5) reps=2000\ncase identical n=4 rho1=ketx(4,9) rho2=ketx(4,9) expect result=dist(0:1.0) reps=400\ncase zero_plus n=1 rho1=ketx(1,0) rho2=pauli(3) expect result=dist(0:0.75,1:0.25) reps=2000\ncase mixed_mixed n=1 rho1=maxmix(1) rho2=maxmix(1) expect result=dist(0:0.75,1:0.25) reps=2000\ncase plus_mixed n=1 rho1=pauli(3) rho2=maxmix(1) expect result=dist(0:0.75,1:0.25) reps=2000\n"
        }
        "Purity" => {
            "subroutine Purity\nmark Purity : (n, t, sub:q:GenRho) -> (isPure')\npartition rho = classical | superposed | mixed\ncase classical n=4 t=100 rho=ketx(4,5) expect is_pure=true reps=5\ncase bell n=2 t=100 rho=twoval(2,0,3,0.0) expect is_pure=true reps=5\ncase mixed n=1 t=100 rho=maxmix(1) expect is_pure=false reps=5\n"
        }
        "InnerProduct" => {
            "subroutine InnerProduct\nmark InnerProduct : (n, t, sub:q:GenRho1, sub:q:GenRho2) -> (est')\ncase orthogonal n=4 t=400 rho1=ketx(4,3) rho2=ketx(4,10) expect est=near(0.0,0.2) reps=3\ncase identical n=4 t=400 rho1=ketx(4,9) rho2=ketx(4,9) expect est=near(1.0,0.2) reps=3\ncase zero_plus n=1 t=400 rho1=ketx(1,0) rho2=pauli(3) expect est=near(0.5,0.2) reps=3\ncase mixed n=1 t=400 rho1=maxmix(1) rho2=maxmix(1) expect est=near(0.5,0.2) reps=3\n"
        }
        "Empty" => {
            "subroutine Empty\nmark Empty : (n, q:qs) -> (q:qs')\ncase classical n=3 qs=ketx(3,5) expect qs'=unprep_input reps=20\ncase superposed n=3 qs=csup(3,5,0.0) expect qs'=unprep_input reps=50\ncase pauli n=2 qs=pauli(5,4) expect qs'=unprep_input reps=50\n"
        }
        "Reverse" => {
            "subroutine Reverse\nmark Reverse : (n, q:qs) -> (q:qs')\npartition n = one | odd | even\ncase one n=1 qs=ketx(1,1) expect qs'=measure(1) reps=10\ncase odd n=5 qs=ketx(5,25) expect qs'=measure(19) reps=10\ncase even n=6 qs=ketx(6,19) expect qs'=measure(50) reps=10\n"
        }
        "MultiSWAP" => {
            "subroutine MultiSWAP\nmark MultiSWAP : (n, q:qs1, q:qs2) -> (q:qs1', q:qs2')\ncase product n=2 qs1=pauli(5,3) qs2=pauli(2,6) expect qs1'=unprep(pauli(2,6)) qs2'=unprep(pauli(5,3)) reps=50\ncase classical n=3 qs1=ketx(3,5) qs2=ketx(3,2) expect qs1'=measure(2) qs2'=measure(5) reps=10\n"
        }
        "CRk" => {
            "subroutine CRk\nmark CRk : (k, q:qctrl, q:qtar) -> (q:qctrl', q:qtar')\npartition c = zero | one\ncase inactive k=2 qctrl=ketx(1,0) qtar=pauli(3) expect qctrl'=measure(0) qtar'=unprep_input reps=50\ncase active k=1 qctrl=ketx(1,1) qtar=pauli(3) expect qctrl'=measure(1) qtar'=unprep(pauli(5)) reps=50\n"
        }
        "PhaseFlip" => {
            "subroutine PhaseFlip\nmark PhaseFlip : (n, q:qs) -> (q:qs')\npartition qs = zero | positive | zero_pos_sup | pos_pos_sup\ncase zero1 n=1 qs=ketx(1,0) expect qs'=unprep_input reps=20\ncase one1 n=1 qs=ketx(1,1) expect qs'=unprep_input reps=20\ncase plus n=1 qs=pauli(3) expect qs'=orthogonal reps=20\ncase zero5 n=5 qs=ketx(5,0) expect qs'=unprep_input reps=20\ncase value5 n=5 qs=ketx(5,13) expect qs'=unprep_input reps=20\ncase type3 n=5 qs=twoval(5,0,25,0.0) expect qs'=orthogonal reps=20\ncase type4 n=4 qs=twoval(4,6,9,0.0) expect qs'=unprep_input reps=20\n"
        }
        "Grover" => {
            "subroutine Grover\nmark Grover : (n, sub:q:OracleK) -> (q:qs')\ncase find11 n=4 k=11 expect qs'=mostly(11,0.9) reps=100\ncase find3 n=4 k=3 expect qs'=mostly(3,0.9) reps=100\n"
        }
        "QFT" => {
            "subroutine QFT\nmark QFT : (n, q:qs) -> (q:qs')\npartition n = 1 | 2 | big\npartition qs = C | S\ncase n1c n=1 qs=ketx(1,0) expect qs'=qftout(0) reps=20\ncase n1s n=1 qs=pauli(5) expect qs'=unprep(pauli(6)) reps=50\ncase n2c n=2 qs=ketx(2,1) expect qs'=qftout(1) reps=20\ncase n2s n=2 qs=twoval(2,0,3,0.0) expect qs'=qftsup(0,3) reps=400\ncase bigc n=7 qs=ketx(7,89) expect qs'=qftout(89) reps=20\ncase bigs n=6 qs=twoval(6,45,18,0.0) expect qs'=qftsup(45,18) reps=400\n"
        }
        "QAdd" => {
            "subroutine QAdd\nmark QAdd : (n, q:qs1, q:qs2) -> (q:qs1', q:qs2')\npartition sum = fits | overflow\ncase fits n=4 qs1=ketx(4,3) qs2=ketx(4,6) expect qs1'=measure(3) qs2'=measure(9) reps=10\ncase overflow n=4 qs1=ketx(4,12) qs2=ketx(4,9) expect qs1'=measure(12) qs2'=measure(5) reps=10\n"
        }
        "Teleport" => {
            "subroutine Teleport\nmark Teleport : (q:qsrc) -> (q:qdest')\ncase one qsrc=ketx(1,1) expect qdest'=measure(1) reps=20\ncase plus_i qsrc=pauli(5) expect qdest'=unprep_input(qsrc) reps=50\ncase minus qsrc=pauli(4) expect qdest'=unprep_input(qsrc) reps=50\n"
        }
        "QPE" => {
            "subroutine QPE\nmark QPE : (Nclock, Ntarget, sub:q:Upower, q:target) -> (q:clock'^BE)\npartition target = eigenstate | superposed\ncase x_minus nclock=3 ntarget=1 upower=sub(XPow) target=pauli(4) expect clock'=measure(4) reps=100\ncase h_zero nclock=3 ntarget=1 upower=sub(HPow) target=ketx(1,0) expect clock'=dist(0:0.8535533905932737,4:0.14644660940672624) reps=4096\ncase cssdg nclock=3 ntarget=3 upower=sub(CSSdgPow) target=ketx(3,5) expect clock'=measure(6) reps=100\ncase cssdg_sup nclock=3 ntarget=3 upower=sub(CSSdgPow) target=twoval(3,5,6,0.0) expect clock'=dist(2:0.5,6:0.5) reps=2000\ncase rz nclock=7 ntarget=2 upower=sub(CRzPow) target=ketx(2,2) expect clock'=mostly(107,0.6) reps=300\n"
        }
        _ => return None,
    })
}

/// Parsed default suite of a benchmark.
pub fn default_suite(name: &str) -> Option<crate::testkit::SuiteDoc> {
    let text = default_suite_text(name)?;
    let docs = crate::testkit::parse_suite(text).expect("default suites parse");
    docs.into_iter().next()
}

/// Run a benchmark's case end to end: register whatever it needs, then
/// dispatch to the case runner.
pub fn run_suite_case(
    prog: &mut Program,
    sub_name: &str,
    case: &TestCase,
    rng: &mut SplitRng,
) -> Result<crate::checkers::CheckVerdict, String> {
    prepare_case(prog, sub_name, case)?;
    let owned: String = sub_name.into();
    let binder: Box<Binder<'_>> = Box::new(move |c: &TestCase| bind_case(&owned, c));
    crate::testkit::run_case(prog, sub_name, &binder, case, rng).map_err(|e| format!("{e}"))
}
