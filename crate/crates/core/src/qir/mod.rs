//! Quantum-program intermediate representation and interpreter.
//!
//! A [`Subroutine`] mixes quantum statements (gates, controlled application,
//! measurement) with classical control flow (`if`, `for`,
//! repeat-until-success) and the within-apply pattern. Subroutines take
//! classical parameters, qubit arrays, and subroutine handles, and live in a
//! [`Program`] registry. Variant generation (inverse / controlled / power /
//! endian reindex) produces new `Subroutine` values; the interpreter in
//! [`interp`] executes against [`crate::simcore::StateVector`].
//!
//! The canonical text form (`qir/1`, see [`text`]) round-trips bit-exactly
//! and is the interchange format for mutant corpora and the CLI.

mod expr;
mod interp;
mod program;
mod text;
mod variants;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub use expr::{infer_type, BinOp, Env, EvalError, Expr, Ty, Value};
pub use interp::{execute, execute_inverse, ArgValue, ExecutionResult, RuntimeFault};
pub use program::{Program, WfError};
pub use text::{parse_program, parse_subroutine, serialize_program, serialize_subroutine};
pub use variants::{
    classical_substitute, controlled_of, inverse_of, power_of, reindex_endian, EndianSide,
    VariantError,
};

/// Shallow parameter signature used for subroutine-handle parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigKind {
    Int,
    Float,
    Bool,
    Qubits,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamKind {
    Int,
    Float,
    Bool,
    /// Qubit array; `len` (when present) is checked against the bound
    /// argument and may reference earlier classical parameters.
    Qubits { len: Option<Expr> },
    /// Subroutine handle with the given signature.
    Sub { sig: Vec<SigKind> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
}

impl Param {
    pub fn int(name: &str) -> Param {
        Param {
            name: name.into(),
            kind: ParamKind::Int,
        }
    }

    pub fn qubits(name: &str, len: Option<Expr>) -> Param {
        Param {
            name: name.into(),
            kind: ParamKind::Qubits { len },
        }
    }

    pub fn handle(name: &str, sig: &[SigKind]) -> Param {
        Param {
            name: name.into(),
            kind: ParamKind::Sub { sig: sig.into() },
        }
    }
}

/// Reference to one qubit of a qubit-array parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitRef {
    pub array: String,
    pub index: Expr,
}

impl QubitRef {
    pub fn new(array: &str, index: Expr) -> QubitRef {
        QubitRef {
            array: array.into(),
            index,
        }
    }

    pub fn at(array: &str, index: i64) -> QubitRef {
        QubitRef::new(array, Expr::Int(index))
    }
}

/// Contiguous slice of a qubit-array parameter used as a call argument.
/// `len: None` means "to the end of the array".
#[derive(Clone, Debug, PartialEq)]
pub struct QubitSlice {
    pub array: String,
    pub start: Expr,
    pub len: Option<Expr>,
}

impl QubitSlice {
    pub fn whole(array: &str) -> QubitSlice {
        QubitSlice {
            array: array.into(),
            start: Expr::Int(0),
            len: None,
        }
    }

    pub fn one(array: &str, index: Expr) -> QubitSlice {
        QubitSlice {
            array: array.into(),
            start: index,
            len: Some(Expr::Int(1)),
        }
    }
}

/// Gate kind carried by IR statements; rotation angles stay symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    R1,
    Rz,
    Cnot,
    Swap,
    Toffoli,
    Cswap,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Swap => 2,
            GateKind::Toffoli | GateKind::Cswap => 3,
            _ => 1,
        }
    }

    pub fn parameterized(&self) -> bool {
        matches!(self, GateKind::R1 | GateKind::Rz)
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::R1 => "r1",
            GateKind::Rz => "rz",
            GateKind::Cnot => "cnot",
            GateKind::Swap => "swap",
            GateKind::Toffoli => "toffoli",
            GateKind::Cswap => "cswap",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        Some(match s {
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "r1" => GateKind::R1,
            "rz" => GateKind::Rz,
            "cnot" => GateKind::Cnot,
            "swap" => GateKind::Swap,
            "toffoli" => GateKind::Toffoli,
            "cswap" => GateKind::Cswap,
            _ => return None,
        })
    }

    /// Kind of the inverse gate; angles are negated separately.
    pub fn inverse(&self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            k => *k,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    /// Rotation angle for `R1`/`Rz`; must be absent otherwise.
    pub angle: Option<Expr>,
}

impl GateSpec {
    pub fn plain(kind: GateKind) -> GateSpec {
        GateSpec { kind, angle: None }
    }

    pub fn rotation(kind: GateKind, angle: Expr) -> GateSpec {
        GateSpec {
            kind,
            angle: Some(angle),
        }
    }

    pub fn inverse(&self) -> GateSpec {
        GateSpec {
            kind: self.kind.inverse(),
            angle: self.angle.clone().map(|a| Expr::Neg(Box::new(a))),
        }
    }
}

/// One control of a controlled statement.
#[derive(Clone, Debug, PartialEq)]
pub enum ControlSel {
    /// A single qubit with the given polarity (`true` = active on |1>).
    Bit { r: QubitRef, pol: bool },
    /// Every qubit of an array, all with polarity 1.
    All { array: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Callee {
    /// A subroutine registered in the program.
    Named(String),
    /// A subroutine-handle parameter of the enclosing subroutine.
    Handle(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Classical(Expr),
    Qubits(QubitSlice),
    /// Passes a handle through: either a handle parameter name of the
    /// caller or the name of a registered subroutine.
    Handle(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Gate {
        gate: GateSpec,
        targets: Vec<QubitRef>,
    },
    Controlled {
        controls: Vec<ControlSel>,
        inner: Box<Statement>,
    },
    Call {
        callee: Callee,
        args: Vec<Arg>,
        /// Caller variables receiving the callee's declared outputs.
        into: Vec<String>,
    },
    MeasureInto {
        var: String,
        qubits: Vec<QubitRef>,
    },
    If {
        cond: Expr,
        then_body: Vec<Statement>,
        else_body: Vec<Statement>,
    },
    For {
        var: String,
        lo: Expr,
        hi: Expr,
        /// Iterate `hi-1` down to `lo` instead of `lo` up to `hi-1`.
        rev: bool,
        body: Vec<Statement>,
    },
    RepeatUntil {
        body: Vec<Statement>,
        until: Expr,
        max_iter: u32,
    },
    WithinApply {
        outer: Vec<Statement>,
        inner: Vec<Statement>,
    },
    Assign {
        var: String,
        expr: Expr,
    },
}

/// Default bound for repeat-until-success loops; exceeding it is a
/// divergence fault rather than a hang.
pub const DEFAULT_MAX_ITER: u32 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct Subroutine {
    pub name: String,
    pub params: Vec<Param>,
    /// Classical environment variables exported to callers.
    pub outputs: Vec<String>,
    pub body: Vec<Statement>,
}

impl Subroutine {
    pub fn new(name: &str, params: Vec<Param>, outputs: &[&str], body: Vec<Statement>) -> Self {
        Subroutine {
            name: name.into(),
            params,
            outputs: outputs.iter().map(|s| String::from(*s)).collect(),
            body,
        }
    }
}

// Builder helpers used by benchmarks, tests, and the mutator.
pub fn gate(kind: GateKind, targets: Vec<QubitRef>) -> Statement {
    Statement::Gate {
        gate: GateSpec::plain(kind),
        targets,
    }
}

pub fn rot(kind: GateKind, angle: Expr, target: QubitRef) -> Statement {
    Statement::Gate {
        gate: GateSpec::rotation(kind, angle),
        targets: alloc::vec![target],
    }
}

pub fn call(name: &str, args: Vec<Arg>) -> Statement {
    Statement::Call {
        callee: Callee::Named(name.into()),
        args,
        into: Vec::new(),
    }
}

pub fn call_into(name: &str, args: Vec<Arg>, into: &[&str]) -> Statement {
    Statement::Call {
        callee: Callee::Named(name.into()),
        args,
        into: into.iter().map(|s| String::from(*s)).collect(),
    }
}

pub fn call_handle(param: &str, args: Vec<Arg>) -> Statement {
    Statement::Call {
        callee: Callee::Handle(param.into()),
        args,
        into: Vec::new(),
    }
}

pub fn measure_into(var: &str, qubits: Vec<QubitRef>) -> Statement {
    Statement::MeasureInto {
        var: var.into(),
        qubits,
    }
}

pub fn if_then(cond: Expr, then_body: Vec<Statement>) -> Statement {
    Statement::If {
        cond,
        then_body,
        else_body: Vec::new(),
    }
}

pub fn if_else(cond: Expr, then_body: Vec<Statement>, else_body: Vec<Statement>) -> Statement {
    Statement::If {
        cond,
        then_body,
        else_body,
    }
}

pub fn for_up(var: &str, lo: Expr, hi: Expr, body: Vec<Statement>) -> Statement {
    Statement::For {
        var: var.into(),
        lo,
        hi,
        rev: false,
        body,
    }
}

pub fn assign(var: &str, expr: Expr) -> Statement {
    Statement::Assign {
        var: var.into(),
        expr,
    }
}

pub fn ctrl_bits(controls: Vec<(QubitRef, bool)>, inner: Statement) -> Statement {
    Statement::Controlled {
        controls: controls
            .into_iter()
            .map(|(r, pol)| ControlSel::Bit { r, pol })
            .collect(),
        inner: Box::new(inner),
    }
}

pub fn ctrl_array(array: &str, inner: Statement) -> Statement {
    Statement::Controlled {
        controls: alloc::vec![ControlSel::All {
            array: array.into()
        }],
        inner: Box::new(inner),
    }
}
