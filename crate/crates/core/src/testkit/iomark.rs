//! IO marks: the textual signature of a subroutine, distinguishing
//! classical, quantum, and subroutine-typed variables.
//!
//! ASCII rendering: `q:` marks a quantum variable, `sub:` a subroutine
//! parameter, a trailing `'` an output, and `^BE`/`^LE` the endian mode of
//! a multi-qubit integer register:
//!
//! ```text
//! QPE : (Nclock, Ntarget, sub:q:Upower, q:target) -> (q:clock'^BE)
//! ```

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endian {
    Be,
    Le,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedVar {
    pub name: String,
    pub is_quantum: bool,
    pub is_subroutine: bool,
    pub endian: Option<Endian>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IoMark {
    pub program: String,
    pub inputs: Vec<MarkedVar>,
    pub outputs: Vec<MarkedVar>,
}

/// The four IO types; classification follows the benchmark-table usage
/// (generate-quantum = quantum outputs only).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IoType {
    Classical,
    GenerateQuantum,
    DetectQuantum,
    Transform,
}

impl IoType {
    pub fn name(&self) -> &'static str {
        match self {
            IoType::Classical => "classical",
            IoType::GenerateQuantum => "generate-quantum",
            IoType::DetectQuantum => "detect-quantum",
            IoType::Transform => "transform",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for MarkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.position, self.message)
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self
            .src
            .as_bytes()
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> Result<(), MarkError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(MarkError {
                position: self.pos,
                message: format!("expected `{token}`"),
            })
        }
    }

    fn peek(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(token)
    }

    fn ident(&mut self) -> Result<&'a str, MarkError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .as_bytes()
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            Err(MarkError {
                position: start,
                message: "expected an identifier".into(),
            })
        } else {
            Ok(&self.src[start..self.pos])
        }
    }
}

fn parse_var(c: &mut Cursor<'_>, output: bool) -> Result<MarkedVar, MarkError> {
    let mut is_subroutine = false;
    let mut is_quantum = false;
    if c.peek("sub:") {
        c.eat("sub:")?;
        is_subroutine = true;
    }
    if c.peek("q:") {
        c.eat("q:")?;
        is_quantum = true;
    }
    let name = c.ident()?.into();
    let primed = if c.peek("'") {
        c.eat("'")?;
        true
    } else {
        false
    };
    if primed != output {
        return Err(MarkError {
            position: c.pos,
            message: if output {
                "output variables must carry a trailing '".into()
            } else {
                "input variables must not carry a trailing '".into()
            },
        });
    }
    let endian = if c.peek("^BE") {
        c.eat("^BE")?;
        Some(Endian::Be)
    } else if c.peek("^LE") {
        c.eat("^LE")?;
        Some(Endian::Le)
    } else {
        None
    };
    if endian.is_some() && !is_quantum {
        return Err(MarkError {
            position: c.pos,
            message: "endian annotations apply only to quantum variables".into(),
        });
    }
    Ok(MarkedVar {
        name,
        is_quantum,
        is_subroutine,
        endian,
    })
}

fn parse_list(c: &mut Cursor<'_>, output: bool) -> Result<Vec<MarkedVar>, MarkError> {
    c.eat("(")?;
    let mut vars = Vec::new();
    if c.peek(")") {
        c.eat(")")?;
        return Ok(vars);
    }
    loop {
        vars.push(parse_var(c, output)?);
        if c.peek(",") {
            c.eat(",")?;
        } else {
            break;
        }
    }
    c.eat(")")?;
    Ok(vars)
}

pub fn parse_io_mark(text: &str) -> Result<IoMark, MarkError> {
    let mut c = Cursor { src: text, pos: 0 };
    let program = c.ident()?.into();
    c.eat(":")?;
    let inputs = parse_list(&mut c, false)?;
    c.eat("->")?;
    let outputs = parse_list(&mut c, true)?;
    c.skip_ws();
    if c.pos != text.len() {
        return Err(MarkError {
            position: c.pos,
            message: "trailing input after the mark".into(),
        });
    }
    Ok(IoMark {
        program,
        inputs,
        outputs,
    })
}

fn format_var(v: &MarkedVar, output: bool) -> String {
    let mut s = String::new();
    if v.is_subroutine {
        s.push_str("sub:");
    }
    if v.is_quantum {
        s.push_str("q:");
    }
    s.push_str(&v.name);
    if output {
        s.push('\'');
    }
    match v.endian {
        Some(Endian::Be) => s.push_str("^BE"),
        Some(Endian::Le) => s.push_str("^LE"),
        None => {}
    }
    s
}

pub fn format_io_mark(mark: &IoMark) -> String {
    let ins: Vec<String> = mark.inputs.iter().map(|v| format_var(v, false)).collect();
    let outs: Vec<String> = mark.outputs.iter().map(|v| format_var(v, true)).collect();
    format!(
        "{} : ({}) -> ({})",
        mark.program,
        ins.join(", "),
        outs.join(", ")
    )
}

/// Classify by presence of quantum variables on each side.
pub fn classify_io_type(mark: &IoMark) -> IoType {
    let q_in = mark.inputs.iter().any(|v| v.is_quantum);
    let q_out = mark.outputs.iter().any(|v| v.is_quantum);
    match (q_in, q_out) {
        (false, false) => IoType::Classical,
        (false, true) => IoType::GenerateQuantum,
        (true, false) => IoType::DetectQuantum,
        (true, true) => IoType::Transform,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qpe_mark_round_trip() {
        let text = "QPE : (Nclock, Ntarget, sub:q:Upower, q:target) -> (q:clock'^BE)";
        let mark = parse_io_mark(text).unwrap();
        assert_eq!(mark.program, "QPE");
        assert_eq!(mark.inputs.len(), 4);
        assert!(mark.inputs[2].is_subroutine && mark.inputs[2].is_quantum);
        assert_eq!(mark.outputs.len(), 1);
        assert_eq!(mark.outputs[0].endian, Some(Endian::Be));
        assert_eq!(format_io_mark(&mark), text);
        assert_eq!(classify_io_type(&mark), IoType::Transform);
    }

    #[test]
    fn classical_mark() {
        let mark = parse_io_mark("QRandom : (n) -> (r')").unwrap();
        assert_eq!(classify_io_type(&mark), IoType::Classical);
        assert_eq!(format_io_mark(&mark), "QRandom : (n) -> (r')");
    }

    #[test]
    fn generate_and_detect() {
        let mark = parse_io_mark("GenQInt : (n, x) -> (q:qs')").unwrap();
        assert_eq!(classify_io_type(&mark), IoType::GenerateQuantum);
        let mark =
            parse_io_mark("SwapTest : (n, sub:q:GenRho1, sub:q:GenRho2) -> (result')").unwrap();
        assert_eq!(classify_io_type(&mark), IoType::DetectQuantum);
    }

    #[test]
    fn in_out_variable_shares_name() {
        let mark = parse_io_mark("Empty : (n, q:qs) -> (q:qs')").unwrap();
        assert_eq!(mark.inputs[1].name, mark.outputs[0].name);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_io_mark("QFT : (n, q:qs) -> (q:qs)").unwrap_err();
        assert!(err.message.contains("trailing '"), "{err}");
        let err = parse_io_mark("QFT (n) -> (m')").unwrap_err();
        assert_eq!(err.position, 4);
        let err = parse_io_mark("F : (n^BE) -> (m')").unwrap_err();
        assert!(err.message.contains("quantum"), "{err}");
    }

    #[test]
    fn empty_sides_parse() {
        let mark = parse_io_mark("Noop : () -> ()").unwrap();
        assert!(mark.inputs.is_empty() && mark.outputs.is_empty());
        assert_eq!(classify_io_type(&mark), IoType::Classical);
    }
}
