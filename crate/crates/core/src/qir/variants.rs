//! Compile-time variant generation: inverse, controlled, power, endian
//! reindex, and the classical-quantum separation substitute.
//!
//! Variants are distinct `Subroutine` values registered next to their base.
//! Generated names are derived from the base name (`QFT.inv`, `QFT.ctl`,
//! `QFT.pow3`, `QFT.powm2`), and inverting an inverse returns the base.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::program::Program;
use super::{
    Arg, BinOp, Callee, ControlSel, Expr, GateKind, Param, ParamKind, QubitRef, QubitSlice,
    Statement, Subroutine,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VariantError {
    UnknownSub(String),
    NotAdjointable(String),
    NotAQubitArray { sub: String, param: String },
    MissingLength { sub: String, param: String },
    Register(String),
}

impl fmt::Display for VariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantError::UnknownSub(s) => write!(f, "unknown subroutine `{s}`"),
            VariantError::NotAdjointable(s) => write!(f, "`{s}` is not adjointable"),
            VariantError::NotAQubitArray { sub, param } => {
                write!(f, "`{param}` of `{sub}` is not a qubit array")
            }
            VariantError::MissingLength { sub, param } => {
                write!(f, "`{param}` of `{sub}` has no declared length")
            }
            VariantError::Register(m) => write!(f, "variant registration failed: {m}"),
        }
    }
}

/// Ensure the inverse variant of `name` exists; returns its name.
///
/// The inverse body replays classical assignments in order and reverses the
/// quantum statements, swapping each gate for its inverse and each call for
/// a call to the callee's inverse variant (generated recursively).
pub fn inverse_of(prog: &mut Program, name: &str) -> Result<String, VariantError> {
    if let Some(base) = name.strip_suffix(".inv") {
        if prog.contains(base) {
            return Ok(base.into());
        }
    }
    let inv_name = format!("{name}.inv");
    if prog.contains(&inv_name) {
        return Ok(inv_name);
    }
    let sub = prog
        .get(name)
        .cloned()
        .ok_or_else(|| VariantError::UnknownSub(name.into()))?;
    if !prog.is_adjointable(name) {
        return Err(VariantError::NotAdjointable(name.into()));
    }
    let body = invert_body(prog, &sub.body)?;
    let inv = Subroutine {
        name: inv_name.clone(),
        params: sub.params.clone(),
        outputs: sub.outputs.clone(),
        body,
    };
    prog.register(inv)
        .map_err(|e| VariantError::Register(format!("{e}")))?;
    Ok(inv_name)
}

fn invert_body(prog: &mut Program, body: &[Statement]) -> Result<Vec<Statement>, VariantError> {
    let mut out: Vec<Statement> = body
        .iter()
        .filter(|s| matches!(s, Statement::Assign { .. }))
        .cloned()
        .collect();
    for stmt in body.iter().rev() {
        if matches!(stmt, Statement::Assign { .. }) {
            continue;
        }
        out.push(invert_stmt(prog, stmt)?);
    }
    Ok(out)
}

fn invert_stmt(prog: &mut Program, stmt: &Statement) -> Result<Statement, VariantError> {
    Ok(match stmt {
        Statement::Gate { gate, targets } => Statement::Gate {
            gate: gate.inverse(),
            targets: targets.clone(),
        },
        Statement::Controlled { controls, inner } => Statement::Controlled {
            controls: controls.clone(),
            inner: Box::new(invert_stmt(prog, inner)?),
        },
        Statement::Call { callee, args, into } => match callee {
            Callee::Named(f) => Statement::Call {
                callee: Callee::Named(inverse_of(prog, f)?),
                args: args.clone(),
                into: into.clone(),
            },
            Callee::Handle(h) => return Err(VariantError::NotAdjointable(h.clone())),
        },
        Statement::If {
            cond,
            then_body,
            else_body,
        } => Statement::If {
            cond: cond.clone(),
            then_body: invert_body(prog, then_body)?,
            else_body: invert_body(prog, else_body)?,
        },
        Statement::For {
            var,
            lo,
            hi,
            rev,
            body,
        } => Statement::For {
            var: var.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
            rev: !rev,
            body: invert_body(prog, body)?,
        },
        Statement::WithinApply { outer, inner } => Statement::WithinApply {
            outer: outer.clone(),
            inner: invert_body(prog, inner)?,
        },
        Statement::Assign { .. } => unreachable!("assigns filtered by invert_body"),
        Statement::MeasureInto { var, .. } => {
            return Err(VariantError::NotAdjointable(var.clone()))
        }
        Statement::RepeatUntil { .. } => {
            return Err(VariantError::NotAdjointable("repeat-until".into()))
        }
    })
}

/// Ensure the controlled variant of `name` exists; returns its name.
///
/// The variant gains a leading `ctl` qubit-array parameter; with the array
/// in |1...1> it behaves as the base, and as identity on any basis state of
/// the array containing a 0. Classical statements run unconditionally.
pub fn controlled_of(prog: &mut Program, name: &str) -> Result<String, VariantError> {
    let ctl_name = format!("{name}.ctl");
    if prog.contains(&ctl_name) {
        return Ok(ctl_name);
    }
    let sub = prog
        .get(name)
        .cloned()
        .ok_or_else(|| VariantError::UnknownSub(name.into()))?;
    if !prog.is_adjointable(name) {
        return Err(VariantError::NotAdjointable(name.into()));
    }
    let mut ctl_param = String::from("ctl");
    while sub.params.iter().any(|p| p.name == ctl_param) {
        ctl_param.push('_');
    }
    let body = sub
        .body
        .iter()
        .map(|s| lift_controlled(&ctl_param, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut params = vec![Param {
        name: ctl_param,
        kind: ParamKind::Qubits { len: None },
    }];
    params.extend(sub.params.clone());
    let ctl = Subroutine {
        name: ctl_name.clone(),
        params,
        outputs: sub.outputs.clone(),
        body,
    };
    prog.register(ctl)
        .map_err(|e| VariantError::Register(format!("{e}")))?;
    Ok(ctl_name)
}

fn lift_controlled(ctl: &str, stmt: &Statement) -> Result<Statement, VariantError> {
    Ok(match stmt {
        Statement::Gate { .. } => Statement::Controlled {
            controls: vec![ControlSel::All { array: ctl.into() }],
            inner: Box::new(stmt.clone()),
        },
        Statement::Call { callee, args, into } => {
            // Calls keep their own callee; the interpreter threads the
            // control context through dynamically, which also covers
            // handles.
            let _ = (callee, args, into);
            Statement::Controlled {
                controls: vec![ControlSel::All { array: ctl.into() }],
                inner: Box::new(stmt.clone()),
            }
        }
        Statement::Controlled { controls, inner } => {
            let mut cs = vec![ControlSel::All { array: ctl.into() }];
            cs.extend(controls.clone());
            Statement::Controlled {
                controls: cs,
                inner: inner.clone(),
            }
        }
        Statement::If {
            cond,
            then_body,
            else_body,
        } => Statement::If {
            cond: cond.clone(),
            then_body: then_body
                .iter()
                .map(|s| lift_controlled(ctl, s))
                .collect::<Result<Vec<_>, _>>()?,
            else_body: else_body
                .iter()
                .map(|s| lift_controlled(ctl, s))
                .collect::<Result<Vec<_>, _>>()?,
        },
        Statement::For {
            var,
            lo,
            hi,
            rev,
            body,
        } => Statement::For {
            var: var.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
            rev: *rev,
            body: body
                .iter()
                .map(|s| lift_controlled(ctl, s))
                .collect::<Result<Vec<_>, _>>()?,
        },
        // Only V needs the controls: C-(U' V U) = U' (C-V) U.
        Statement::WithinApply { outer, inner } => Statement::WithinApply {
            outer: outer.clone(),
            inner: inner
                .iter()
                .map(|s| lift_controlled(ctl, s))
                .collect::<Result<Vec<_>, _>>()?,
        },
        Statement::Assign { .. } => stmt.clone(),
        Statement::MeasureInto { var, .. } => {
            return Err(VariantError::NotAdjointable(var.clone()))
        }
        Statement::RepeatUntil { .. } => {
            return Err(VariantError::NotAdjointable("repeat-until".into()))
        }
    })
}

/// Ensure the power variant `base^k` exists; returns its name. `k = 0` is
/// the identity, negative `k` applies the inverse `|k|` times.
pub fn power_of(prog: &mut Program, name: &str, k: i32) -> Result<String, VariantError> {
    let pow_name = if k < 0 {
        format!("{name}.powm{}", -(k as i64))
    } else {
        format!("{name}.pow{k}")
    };
    if prog.contains(&pow_name) {
        return Ok(pow_name);
    }
    let sub = prog
        .get(name)
        .cloned()
        .ok_or_else(|| VariantError::UnknownSub(name.into()))?;
    if !prog.is_adjointable(name) {
        return Err(VariantError::NotAdjointable(name.into()));
    }
    let callee = if k < 0 {
        inverse_of(prog, name)?
    } else {
        String::from(name)
    };
    let args: Vec<Arg> = sub
        .params
        .iter()
        .map(|p| match &p.kind {
            ParamKind::Int | ParamKind::Float | ParamKind::Bool => {
                Arg::Classical(Expr::var(&p.name))
            }
            ParamKind::Qubits { .. } => Arg::Qubits(QubitSlice::whole(&p.name)),
            ParamKind::Sub { .. } => Arg::Handle(p.name.clone()),
        })
        .collect();
    let body = (0..k.unsigned_abs())
        .map(|_| Statement::Call {
            callee: Callee::Named(callee.clone()),
            args: args.clone(),
            into: Vec::new(),
        })
        .collect();
    let pow = Subroutine {
        name: pow_name.clone(),
        params: sub.params.clone(),
        outputs: Vec::new(),
        body,
    };
    prog.register(pow)
        .map_err(|e| VariantError::Register(format!("{e}")))?;
    Ok(pow_name)
}

/// Which side of a subroutine an endian reindex applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndianSide {
    /// Reverse the array before the call (flips the input letter).
    Input,
    /// Reverse the array after the call (flips the output letter).
    Output,
    /// Reverse on both sides (BIBO <-> LILO).
    Both,
}

impl EndianSide {
    fn tag(&self) -> &'static str {
        match self {
            EndianSide::Input => "i",
            EndianSide::Output => "o",
            EndianSide::Both => "io",
        }
    }
}

/// Wrap `name` with a qubit-order reversal on `param`, converting between
/// endian modes of that register. Requires a declared length.
pub fn reindex_endian(
    prog: &mut Program,
    name: &str,
    param: &str,
    side: EndianSide,
) -> Result<String, VariantError> {
    let new_name = format!("{name}.rev_{param}_{}", side.tag());
    if prog.contains(&new_name) {
        return Ok(new_name);
    }
    let sub = prog
        .get(name)
        .cloned()
        .ok_or_else(|| VariantError::UnknownSub(name.into()))?;
    let p = sub
        .params
        .iter()
        .find(|p| p.name == param)
        .ok_or_else(|| VariantError::NotAQubitArray {
            sub: name.into(),
            param: param.into(),
        })?;
    let len = match &p.kind {
        ParamKind::Qubits { len: Some(l) } => l.clone(),
        ParamKind::Qubits { len: None } => {
            return Err(VariantError::MissingLength {
                sub: name.into(),
                param: param.into(),
            })
        }
        _ => {
            return Err(VariantError::NotAQubitArray {
                sub: name.into(),
                param: param.into(),
            })
        }
    };

    // for i in 0..len/2 { swap(p[i], p[len-1-i]) }
    let swap_net = Statement::For {
        var: "i".into(),
        lo: Expr::Int(0),
        hi: Expr::bin(BinOp::Div, len.clone(), Expr::Int(2)),
        rev: false,
        body: vec![Statement::Gate {
            gate: super::GateSpec::plain(GateKind::Swap),
            targets: vec![
                QubitRef::new(param, Expr::var("i")),
                QubitRef::new(
                    param,
                    Expr::bin(
                        BinOp::Sub,
                        Expr::bin(BinOp::Sub, len.clone(), Expr::Int(1)),
                        Expr::var("i"),
                    ),
                ),
            ],
        }],
    };
    let args: Vec<Arg> = sub
        .params
        .iter()
        .map(|p| match &p.kind {
            ParamKind::Int | ParamKind::Float | ParamKind::Bool => {
                Arg::Classical(Expr::var(&p.name))
            }
            ParamKind::Qubits { .. } => Arg::Qubits(QubitSlice::whole(&p.name)),
            ParamKind::Sub { .. } => Arg::Handle(p.name.clone()),
        })
        .collect();
    let call = Statement::Call {
        callee: Callee::Named(name.into()),
        args,
        into: Vec::new(),
    };
    let body = match side {
        EndianSide::Input => vec![swap_net, call],
        EndianSide::Output => vec![call, swap_net],
        EndianSide::Both => vec![swap_net.clone(), call, swap_net],
    };
    let wrapped = Subroutine {
        name: new_name.clone(),
        params: sub.params.clone(),
        outputs: Vec::new(),
        body,
    };
    prog.register(wrapped)
        .map_err(|e| VariantError::Register(format!("{e}")))?;
    Ok(new_name)
}

/// Classical-quantum separation: every measurement (and every classical
/// result pulled out of a callee) becomes a fresh classical input parameter,
/// all quantum statements disappear, and the classical control-flow skeleton
/// survives. The result is a pure-classical test double of the original
/// structure.
pub fn classical_substitute(sub: &Subroutine) -> Subroutine {
    let mut params: Vec<Param> = sub
        .params
        .iter()
        .filter(|p| {
            matches!(
                p.kind,
                ParamKind::Int | ParamKind::Float | ParamKind::Bool
            )
        })
        .cloned()
        .collect();
    let mut used: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
    let body = substitute_body(&sub.body, &mut params, &mut used);
    Subroutine {
        name: format!("{}.cls", sub.name),
        params,
        outputs: sub.outputs.clone(),
        body,
    }
}

fn fresh_param(base: &str, params: &mut Vec<Param>, used: &mut Vec<String>) -> String {
    let mut name = format!("set_{base}");
    while used.contains(&name) {
        name.push('_');
    }
    used.push(name.clone());
    params.push(Param {
        name: name.clone(),
        kind: ParamKind::Int,
    });
    name
}

fn substitute_body(
    body: &[Statement],
    params: &mut Vec<Param>,
    used: &mut Vec<String>,
) -> Vec<Statement> {
    let mut out = Vec::new();
    for stmt in body {
        match stmt {
            Statement::Gate { .. } | Statement::Controlled { .. } => {}
            Statement::MeasureInto { var, .. } => {
                let p = fresh_param(var, params, used);
                out.push(Statement::Assign {
                    var: var.clone(),
                    expr: Expr::Var(p),
                });
            }
            Statement::Call { into, .. } => {
                // A call's classical returns are the other channel through
                // which the quantum side feeds the classical side.
                for var in into {
                    let p = fresh_param(var, params, used);
                    out.push(Statement::Assign {
                        var: var.clone(),
                        expr: Expr::Var(p),
                    });
                }
            }
            Statement::If {
                cond,
                then_body,
                else_body,
            } => out.push(Statement::If {
                cond: cond.clone(),
                then_body: substitute_body(then_body, params, used),
                else_body: substitute_body(else_body, params, used),
            }),
            Statement::For {
                var,
                lo,
                hi,
                rev,
                body,
            } => out.push(Statement::For {
                var: var.clone(),
                lo: lo.clone(),
                hi: hi.clone(),
                rev: *rev,
                body: substitute_body(body, params, used),
            }),
            Statement::RepeatUntil {
                body,
                until,
                max_iter,
            } => out.push(Statement::RepeatUntil {
                body: substitute_body(body, params, used),
                until: until.clone(),
                max_iter: *max_iter,
            }),
            Statement::WithinApply { inner, .. } => {
                // The context is purely quantum; only the action can carry
                // measurements worth keeping.
                out.extend(substitute_body(inner, params, used));
            }
            Statement::Assign { .. } => out.push(stmt.clone()),
        }
    }
    out
}
