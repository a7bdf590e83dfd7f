//! Suite definition files: one document per subroutine holding the IO mark
//! string, partition labels, and the case list. Quantum inputs reference
//! the state generators by name:
//!
//! ```text
//! # default QFT suite
//! subroutine QFT
//! mark QFT : (n, q:qs) -> (q:qs')
//! partition n = 1 | 2 | big
//! partition qs = C | S
//! case n1c n=1 qs=ketx(1,0) expect qs'=qftout(0) reps=50
//! case n2s n=2 qs=twoval(2,0,3,0.0) expect qs'=qftsup(0,3) reps=400
//! ```
//!
//! Generators: `ketx(n,x)`, `csup(n,x,theta)`, `twoval(n,x,y,theta)`,
//! `pauli(i,...)`, `maxmix(n)`. Output checks: `unprep_input`,
//! `orthogonal`, `unprep(GEN)`, `measure(v)`, `qftout(j)`, `qftsup(a,b)`,
//! `dist(outcome:prob,...)`, and for classical outputs a literal or
//! `range(lo,hi)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::qir::Value;
use crate::stateprep::InputSpec;

use super::combine::Partition;
use super::runner::{ClassicalExpectation, QuantumCheck, TestCase};

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteDoc {
    pub subroutine: String,
    pub mark: Option<String>,
    pub partitions: Vec<Partition>,
    pub cases: Vec<TestCase>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "suite file line {}: {}", self.line, self.message)
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, SuiteError> {
    Err(SuiteError {
        line,
        message: message.into(),
    })
}

/// `name(arg,arg,...)` -> (name, args); the args keep their text form.
fn split_call(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    let close = s.rfind(')')?;
    if close != s.len() - 1 || close < open {
        return None;
    }
    let name = &s[..open];
    let inner = &s[open + 1..close];
    let args = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Some((name, args))
}

fn parse_u64(line: usize, s: &str) -> Result<u64, SuiteError> {
    s.parse::<u64>()
        .map_err(|_| SuiteError {
            line,
            message: format!("expected an unsigned integer, got `{s}`"),
        })
}

fn parse_usize(line: usize, s: &str) -> Result<usize, SuiteError> {
    s.parse::<usize>().map_err(|_| SuiteError {
        line,
        message: format!("expected a size, got `{s}`"),
    })
}

fn parse_f64(line: usize, s: &str) -> Result<f64, SuiteError> {
    s.parse::<f64>().map_err(|_| SuiteError {
        line,
        message: format!("expected a number, got `{s}`"),
    })
}

fn parse_generator(line: usize, s: &str) -> Result<InputSpec, SuiteError> {
    let Some((name, args)) = split_call(s) else {
        return err(line, format!("expected a generator call, got `{s}`"));
    };
    let want = |n: usize| -> Result<(), SuiteError> {
        if args.len() == n {
            Ok(())
        } else {
            err(line, format!("`{name}` takes {n} arguments"))
        }
    };
    match name {
        "ketx" => {
            want(2)?;
            Ok(InputSpec::KetX {
                n: parse_usize(line, args[0])?,
                x: parse_u64(line, args[1])?,
            })
        }
        "csup" => {
            want(3)?;
            Ok(InputSpec::CompSup {
                n: parse_usize(line, args[0])?,
                x: parse_u64(line, args[1])?,
                theta: parse_f64(line, args[2])?,
            })
        }
        "twoval" => {
            want(4)?;
            Ok(InputSpec::TwoValue {
                n: parse_usize(line, args[0])?,
                x: parse_u64(line, args[1])?,
                y: parse_u64(line, args[2])?,
                theta: parse_f64(line, args[3])?,
            })
        }
        "pauli" => {
            if args.is_empty() {
                return err(line, "`pauli` needs at least one index");
            }
            let indices = args
                .iter()
                .map(|a| parse_u64(line, a).map(|v| v as u8))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(InputSpec::Pauli { indices })
        }
        "maxmix" => {
            want(1)?;
            Ok(InputSpec::MaxMix {
                n: parse_usize(line, args[0])?,
            })
        }
        other => err(line, format!("unknown generator `{other}`")),
    }
}

fn format_generator(spec: &InputSpec) -> String {
    match spec {
        InputSpec::KetX { n, x } => format!("ketx({n},{x})"),
        InputSpec::CompSup { n, x, theta } => format!("csup({n},{x},{theta:?})"),
        InputSpec::TwoValue { n, x, y, theta } => format!("twoval({n},{x},{y},{theta:?})"),
        InputSpec::Pauli { indices } => {
            let parts: Vec<String> = indices.iter().map(|i| format!("{i}")).collect();
            format!("pauli({})", parts.join(","))
        }
        InputSpec::MaxMix { n } => format!("maxmix({n})"),
    }
}

fn parse_check(line: usize, s: &str) -> Result<QuantumCheck, SuiteError> {
    match s {
        "unprep_input" => return Ok(QuantumCheck::UnprepInput { source: None }),
        "orthogonal" => return Ok(QuantumCheck::OrthogonalToInput { source: None }),
        _ => {}
    }
    let Some((name, args)) = split_call(s) else {
        return err(line, format!("unknown output check `{s}`"));
    };
    match name {
        "unprep_input" => {
            if args.len() != 1 {
                return err(line, "`unprep_input` takes one input name");
            }
            Ok(QuantumCheck::UnprepInput {
                source: Some(args[0].into()),
            })
        }
        "orthogonal" => {
            if args.len() != 1 {
                return err(line, "`orthogonal` takes one input name");
            }
            Ok(QuantumCheck::OrthogonalToInput {
                source: Some(args[0].into()),
            })
        }
        "unprep" => {
            // The inner generator keeps its own parentheses; reassemble.
            let inner = &s[7..s.len() - 1];
            Ok(QuantumCheck::UnprepRecipe(parse_generator(line, inner)?))
        }
        "measure" => {
            if args.len() != 1 {
                return err(line, "`measure` takes one value");
            }
            Ok(QuantumCheck::MeasureEq(parse_u64(line, args[0])?))
        }
        "qftout" => {
            if args.len() != 1 {
                return err(line, "`qftout` takes one value");
            }
            Ok(QuantumCheck::QftOut {
                j: parse_u64(line, args[0])?,
            })
        }
        "qftsup" => {
            if args.len() != 2 {
                return err(line, "`qftsup` takes two values");
            }
            Ok(QuantumCheck::QftSup {
                a: parse_u64(line, args[0])?,
                b: parse_u64(line, args[1])?,
            })
        }
        "dist" => Ok(QuantumCheck::Distribution {
            probs: parse_dist_table(line, &args)?,
            alpha: 0.01,
        }),
        "mostly" => {
            if args.len() != 2 {
                return err(line, "`mostly` takes value,min_rate");
            }
            Ok(QuantumCheck::MeasureMostly {
                value: parse_u64(line, args[0])?,
                min_rate: parse_f64(line, args[1])?,
            })
        }
        other => err(line, format!("unknown output check `{other}`")),
    }
}

fn parse_dist_table(line: usize, args: &[&str]) -> Result<Vec<f64>, SuiteError> {
    let mut pairs = Vec::new();
    let mut max_outcome = 0u64;
    for a in args {
        let (k, p) = a.split_once(':').ok_or_else(|| SuiteError {
            line,
            message: format!("`dist` entries are outcome:prob, got `{a}`"),
        })?;
        let k = parse_u64(line, k)?;
        max_outcome = max_outcome.max(k);
        pairs.push((k, parse_f64(line, p)?));
    }
    let mut probs = alloc::vec![0.0; (max_outcome + 1) as usize];
    for (k, p) in pairs {
        probs[k as usize] = p;
    }
    Ok(probs)
}

fn format_check(check: &QuantumCheck) -> String {
    match check {
        QuantumCheck::UnprepInput { source: None } => "unprep_input".into(),
        QuantumCheck::UnprepInput { source: Some(s) } => format!("unprep_input({s})"),
        QuantumCheck::OrthogonalToInput { source: None } => "orthogonal".into(),
        QuantumCheck::OrthogonalToInput { source: Some(s) } => format!("orthogonal({s})"),
        QuantumCheck::UnprepRecipe(spec) => format!("unprep({})", format_generator(spec)),
        QuantumCheck::MeasureEq(v) => format!("measure({v})"),
        QuantumCheck::QftOut { j } => format!("qftout({j})"),
        QuantumCheck::QftSup { a, b } => format!("qftsup({a},{b})"),
        QuantumCheck::Distribution { probs, .. } => format!("dist({})", format_dist(probs)),
        QuantumCheck::MeasureMostly { value, min_rate } => {
            format!("mostly({value},{min_rate:?})")
        }
    }
}

fn format_dist(probs: &[f64]) -> String {
    let entries: Vec<String> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p != 0.0)
        .map(|(k, p)| format!("{k}:{p:?}"))
        .collect();
    entries.join(",")
}

fn parse_classical_expect(
    line: usize,
    token: &str,
    value: &str,
) -> Result<ClassicalExpectation, SuiteError> {
    if let Some((name, args)) = split_call(value) {
        return match name {
            "range" if args.len() == 2 => Ok(ClassicalExpectation::InRange {
                lo: args[0].parse().map_err(|_| SuiteError {
                    line,
                    message: "bad range bound".into(),
                })?,
                hi: args[1].parse().map_err(|_| SuiteError {
                    line,
                    message: "bad range bound".into(),
                })?,
            }),
            "near" if args.len() == 2 => Ok(ClassicalExpectation::Near {
                value: parse_f64(line, args[0])?,
                tol: parse_f64(line, args[1])?,
            }),
            "dist" => Ok(ClassicalExpectation::Distribution {
                probs: parse_dist_table(line, &args)?,
                alpha: 0.01,
            }),
            _ => err(line, format!("bad expectation `{token}`")),
        };
    }
    match parse_value(value) {
        Some(v) => Ok(ClassicalExpectation::Eq(v)),
        None => err(line, format!("bad expectation `{token}`")),
    }
}

fn parse_value(s: &str) -> Option<Value> {
    if let Ok(v) = s.parse::<i64>() {
        return Some(Value::Int(v));
    }
    match s {
        "true" => return Some(Value::Bool(true)),
        "false" => return Some(Value::Bool(false)),
        _ => {}
    }
    if s.contains('.') {
        if let Ok(v) = s.parse::<f64>() {
            return Some(Value::Float(v));
        }
    }
    None
}

fn parse_case(line: usize, rest: &str) -> Result<TestCase, SuiteError> {
    let mut tokens = rest.split_whitespace();
    let name = tokens
        .next()
        .ok_or_else(|| SuiteError {
            line,
            message: "case needs a name".into(),
        })?
        .into();
    let mut case = TestCase {
        name,
        classical_inputs: Vec::new(),
        quantum_inputs: Vec::new(),
        subroutine_inputs: Vec::new(),
        expected_classical: Vec::new(),
        expected_quantum: Vec::new(),
        repetitions: 1,
    };
    let mut in_expect = false;
    for token in tokens {
        if token == "expect" {
            in_expect = true;
            continue;
        }
        let (key, value) = token.split_once('=').ok_or_else(|| SuiteError {
            line,
            message: format!("expected key=value, got `{token}`"),
        })?;
        if key == "reps" {
            case.repetitions = parse_u64(line, value)? as u32;
            continue;
        }
        if !in_expect {
            if let Some((_, args)) = split_call(value).filter(|(n, _)| *n == "sub") {
                if args.len() != 1 {
                    return err(line, "`sub` takes one subroutine name");
                }
                case.subroutine_inputs.push((key.into(), args[0].into()));
            } else if let Some(v) = parse_value(value) {
                case.classical_inputs.push((key.into(), v));
            } else {
                case.quantum_inputs
                    .push((key.into(), parse_generator(line, value)?));
            }
        } else {
            let var = key.strip_suffix('\'').unwrap_or(key);
            if key.ends_with('\'') {
                case.expected_quantum
                    .push((var.into(), parse_check(line, value)?));
            } else {
                case.expected_classical
                    .push((var.into(), parse_classical_expect(line, token, value)?));
            }
        }
    }
    if case.repetitions == 0 {
        return err(line, "reps must be at least 1");
    }
    Ok(case)
}

/// Parse a suite file into its documents.
pub fn parse_suite(src: &str) -> Result<Vec<SuiteDoc>, SuiteError> {
    let mut docs: Vec<SuiteDoc> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "subroutine" => {
                if rest.is_empty() {
                    return err(line_no, "subroutine needs a name");
                }
                docs.push(SuiteDoc {
                    subroutine: rest.into(),
                    mark: None,
                    partitions: Vec::new(),
                    cases: Vec::new(),
                });
            }
            "mark" | "partition" | "case" => {
                let doc = docs.last_mut().ok_or_else(|| SuiteError {
                    line: line_no,
                    message: "content before any `subroutine` line".into(),
                })?;
                match keyword {
                    "mark" => doc.mark = Some(rest.into()),
                    "partition" => {
                        let (var, classes) = rest.split_once('=').ok_or_else(|| SuiteError {
                            line: line_no,
                            message: "partition syntax: VAR = c1 | c2".into(),
                        })?;
                        doc.partitions.push(Partition {
                            variable: var.trim().into(),
                            classes: classes
                                .split('|')
                                .map(|c| String::from(c.trim()))
                                .collect(),
                        });
                    }
                    _ => doc.cases.push(parse_case(line_no, rest)?),
                }
            }
            other => return err(line_no, format!("unknown directive `{other}`")),
        }
    }
    Ok(docs)
}

/// Canonical rendering; `parse_suite(format_suite(docs)) == docs`.
pub fn format_suite(docs: &[SuiteDoc]) -> String {
    let mut out = String::new();
    for (i, doc) in docs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "subroutine {}", doc.subroutine);
        if let Some(mark) = &doc.mark {
            let _ = writeln!(out, "mark {mark}");
        }
        for p in &doc.partitions {
            let _ = writeln!(out, "partition {} = {}", p.variable, p.classes.join(" | "));
        }
        for case in &doc.cases {
            let mut line = format!("case {}", case.name);
            for (k, v) in &case.classical_inputs {
                let _ = write!(line, " {k}={v}");
            }
            for (k, spec) in &case.quantum_inputs {
                let _ = write!(line, " {k}={}", format_generator(spec));
            }
            for (k, sub) in &case.subroutine_inputs {
                let _ = write!(line, " {k}=sub({sub})");
            }
            line.push_str(" expect");
            for (k, e) in &case.expected_classical {
                match e {
                    ClassicalExpectation::Eq(v) => {
                        let _ = write!(line, " {k}={v}");
                    }
                    ClassicalExpectation::InRange { lo, hi } => {
                        let _ = write!(line, " {k}=range({lo},{hi})");
                    }
                    ClassicalExpectation::Near { value, tol } => {
                        let _ = write!(line, " {k}=near({value:?},{tol:?})");
                    }
                    ClassicalExpectation::Distribution { probs, .. } => {
                        let _ = write!(line, " {k}=dist({})", format_dist(probs));
                    }
                }
            }
            for (k, c) in &case.expected_quantum {
                let _ = write!(line, " {k}'={}", format_check(c));
            }
            let _ = write!(line, " reps={}", case.repetitions);
            let _ = writeln!(out, "{line}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# default QFT suite
subroutine QFT
mark QFT : (n, q:qs) -> (q:qs')
partition n = 1 | 2 | big
partition qs = C | S
case n1c n=1 qs=ketx(1,0) expect qs'=qftout(0) reps=50
case n2s n=2 qs=twoval(2,0,3,0.0) expect qs'=qftsup(0,3) reps=400

subroutine QRandom
case small n=5 expect r=range(0,31) reps=64
";

    #[test]
    fn parses_sample() {
        let docs = parse_suite(SAMPLE).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].subroutine, "QFT");
        assert_eq!(docs[0].partitions.len(), 2);
        assert_eq!(docs[0].cases.len(), 2);
        let case = &docs[0].cases[1];
        assert_eq!(case.repetitions, 400);
        assert_eq!(
            case.quantum_inputs[0].1,
            InputSpec::TwoValue {
                n: 2,
                x: 0,
                y: 3,
                theta: 0.0
            }
        );
        assert_eq!(
            case.expected_quantum[0],
            ("qs".into(), QuantumCheck::QftSup { a: 0, b: 3 })
        );
        let qr = &docs[1].cases[0];
        assert_eq!(
            qr.expected_classical[0].1,
            ClassicalExpectation::InRange { lo: 0, hi: 31 }
        );
    }

    #[test]
    fn round_trips() {
        let docs = parse_suite(SAMPLE).unwrap();
        let text = format_suite(&docs);
        let again = parse_suite(&text).unwrap();
        assert_eq!(docs, again);
    }

    #[test]
    fn dist_check_parses_sparse_tables() {
        let src = "subroutine X\ncase c expect clock'=dist(0:0.8536,7:0.1464) reps=100\n";
        let docs = parse_suite(src).unwrap();
        match &docs[0].cases[0].expected_quantum[0].1 {
            QuantumCheck::Distribution { probs, .. } => {
                assert_eq!(probs.len(), 8);
                assert!((probs[0] - 0.8536).abs() < 1e-12);
                assert!((probs[7] - 0.1464).abs() < 1e-12);
                assert_eq!(probs[3], 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_suite("case c expect reps=1\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_suite("subroutine A\nnope x\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_suite("subroutine A\ncase c qs=wat(1) expect reps=1\n").unwrap_err();
        assert!(e.message.contains("unknown generator"));
    }
}
