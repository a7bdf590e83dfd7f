//! Canonical `qir/1` text form.
//!
//! Serialization is deterministic (one statement per line, two-space
//! indents) and parsing inverts it bit-exactly, so serialized subroutines
//! are directly diffable — a single-edit mutant differs from its base in a
//! bounded set of lines.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::sexpr::{parse_all, Sexp};

use super::{
    Arg, BinOp, Callee, ControlSel, Expr, GateKind, GateSpec, Param, ParamKind, QubitRef,
    QubitSlice, SigKind, Statement, Subroutine,
};

pub const HEADER: &str = "qir/1";

// ---------------------------------------------------------------- writing

fn expr_str(e: &Expr) -> String {
    match e {
        Expr::Int(v) => format!("{v}"),
        Expr::Float(v) => format!("{v:?}"),
        Expr::Bool(b) => format!("{b}"),
        Expr::Pi => "pi".into(),
        Expr::Var(v) => v.clone(),
        Expr::Bin(op, a, b) => format!("({} {} {})", op.symbol(), expr_str(a), expr_str(b)),
        Expr::Not(a) => format!("(! {})", expr_str(a)),
        Expr::Neg(a) => format!("(neg {})", expr_str(a)),
        Expr::AsFloat(a) => format!("(float {})", expr_str(a)),
        Expr::Msb(a) => format!("(msb {})", expr_str(a)),
    }
}

fn ref_str(r: &QubitRef) -> String {
    format!("(ref {} {})", r.array, expr_str(&r.index))
}

fn arg_str(a: &Arg) -> String {
    match a {
        Arg::Classical(e) => format!("(c {})", expr_str(e)),
        Arg::Qubits(s) => {
            let len = match &s.len {
                Some(l) => expr_str(l),
                None => "_".into(),
            };
            format!("(q {} {} {})", s.array, expr_str(&s.start), len)
        }
        Arg::Handle(h) => format!("(h {h})"),
    }
}

fn ctrl_str(c: &ControlSel) -> String {
    match c {
        ControlSel::Bit { r, pol } => {
            format!("({} {})", if *pol { "bit1" } else { "bit0" }, ref_str(r))
        }
        ControlSel::All { array } => format!("(all {array})"),
    }
}

fn stmt_line(s: &Statement) -> String {
    match s {
        Statement::Gate { gate, targets } => {
            let mut out = format!("(gate {}", gate.kind.name());
            if let Some(a) = &gate.angle {
                let _ = write!(out, " (angle {})", expr_str(a));
            }
            for t in targets {
                let _ = write!(out, " {}", ref_str(t));
            }
            out.push(')');
            out
        }
        Statement::Controlled { controls, inner } => {
            let cs: Vec<String> = controls.iter().map(ctrl_str).collect();
            format!("(ctrl ({}) {})", cs.join(" "), stmt_line(inner))
        }
        Statement::Call { callee, args, into } => {
            let mut out = match callee {
                Callee::Named(n) => format!("(call {n}"),
                Callee::Handle(h) => format!("(callh {h}"),
            };
            for a in args {
                let _ = write!(out, " {}", arg_str(a));
            }
            if !into.is_empty() {
                let _ = write!(out, " (into {})", into.join(" "));
            }
            out.push(')');
            out
        }
        Statement::MeasureInto { var, qubits } => {
            let mut out = format!("(measure {var}");
            for q in qubits {
                let _ = write!(out, " {}", ref_str(q));
            }
            out.push(')');
            out
        }
        Statement::Assign { var, expr } => format!("(assign {var} {})", expr_str(expr)),
        _ => unreachable!("block statements are written multi-line"),
    }
}

fn write_body(out: &mut String, tag: &str, body: &[Statement], indent: usize) {
    let pad = "  ".repeat(indent);
    if body.is_empty() {
        let _ = write!(out, "{pad}({tag})");
        return;
    }
    let _ = writeln!(out, "{pad}({tag}");
    for (i, s) in body.iter().enumerate() {
        write_stmt(out, s, indent + 1);
        if i + 1 == body.len() {
            out.push(')');
        } else {
            out.push('\n');
        }
    }
}

fn write_stmt(out: &mut String, s: &Statement, indent: usize) {
    let pad = "  ".repeat(indent);
    match s {
        Statement::Gate { .. }
        | Statement::Controlled { .. }
        | Statement::Call { .. }
        | Statement::MeasureInto { .. }
        | Statement::Assign { .. } => {
            let _ = write!(out, "{pad}{}", stmt_line(s));
        }
        Statement::If {
            cond,
            then_body,
            else_body,
        } => {
            let _ = writeln!(out, "{pad}(if {}", expr_str(cond));
            write_body(out, "then", then_body, indent + 1);
            out.push('\n');
            write_body(out, "else", else_body, indent + 1);
            out.push(')');
        }
        Statement::For {
            var,
            lo,
            hi,
            rev,
            body,
        } => {
            let tag = if *rev { "forrev" } else { "for" };
            let _ = writeln!(
                out,
                "{pad}({tag} {var} {} {}",
                expr_str(lo),
                expr_str(hi)
            );
            write_body(out, "body", body, indent + 1);
            out.push(')');
        }
        Statement::RepeatUntil {
            body,
            until,
            max_iter,
        } => {
            let _ = writeln!(out, "{pad}(rus {max_iter} {}", expr_str(until));
            write_body(out, "body", body, indent + 1);
            out.push(')');
        }
        Statement::WithinApply { outer, inner } => {
            let _ = writeln!(out, "{pad}(within");
            write_body(out, "u", outer, indent + 1);
            out.push('\n');
            write_body(out, "v", inner, indent + 1);
            out.push(')');
        }
    }
}

fn param_str(p: &Param) -> String {
    match &p.kind {
        ParamKind::Int => format!("({} int)", p.name),
        ParamKind::Float => format!("({} float)", p.name),
        ParamKind::Bool => format!("({} bool)", p.name),
        ParamKind::Qubits { len: None } => format!("({} qubit)", p.name),
        ParamKind::Qubits { len: Some(l) } => {
            format!("({} qubit (len {}))", p.name, expr_str(l))
        }
        ParamKind::Sub { sig } => {
            let kinds: Vec<&str> = sig
                .iter()
                .map(|k| match k {
                    SigKind::Int => "int",
                    SigKind::Float => "float",
                    SigKind::Bool => "bool",
                    SigKind::Qubits => "qubit",
                })
                .collect();
            format!("({} subh ({}))", p.name, kinds.join(" "))
        }
    }
}

/// Serialize one subroutine (no header line).
pub fn serialize_subroutine(sub: &Subroutine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(sub {}", sub.name);
    let params: Vec<String> = sub.params.iter().map(param_str).collect();
    let _ = writeln!(out, "  (params {})", params.join(" "));
    let _ = writeln!(out, "  (outputs {})", sub.outputs.join(" "));
    write_body(&mut out, "body", &sub.body, 1);
    out.push_str(")\n");
    out
}

/// Serialize a set of subroutines with the `qir/1` header.
pub fn serialize_program(subs: &[&Subroutine]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for sub in subs {
        out.push('\n');
        out.push_str(&serialize_subroutine(sub));
    }
    out
}

// ---------------------------------------------------------------- parsing

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextError(pub String);

impl core::fmt::Display for TextError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "qir text: {}", self.0)
    }
}

fn err<T>(m: impl Into<String>) -> Result<T, TextError> {
    Err(TextError(m.into()))
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn parse_expr(s: &Sexp) -> Result<Expr, TextError> {
    match s {
        Sexp::Atom(a) => {
            if let Ok(v) = a.parse::<i64>() {
                return Ok(Expr::Int(v));
            }
            match a.as_str() {
                "pi" => return Ok(Expr::Pi),
                "true" => return Ok(Expr::Bool(true)),
                "false" => return Ok(Expr::Bool(false)),
                _ => {}
            }
            if a.contains(['.', 'e', 'E']) {
                if let Ok(v) = a.parse::<f64>() {
                    if v.is_finite() {
                        return Ok(Expr::Float(v));
                    }
                }
            }
            if is_ident(a) {
                Ok(Expr::Var(a.clone()))
            } else {
                err(format!("bad expression atom `{a}`"))
            }
        }
        Sexp::List(items) => {
            let head = items
                .first()
                .and_then(|h| h.atom())
                .ok_or_else(|| TextError("empty expression".into()))?;
            match head {
                "!" | "neg" | "float" | "msb" => {
                    if items.len() != 2 {
                        return err(format!("`{head}` takes one operand"));
                    }
                    let inner = alloc::boxed::Box::new(parse_expr(&items[1])?);
                    Ok(match head {
                        "!" => Expr::Not(inner),
                        "neg" => Expr::Neg(inner),
                        "float" => Expr::AsFloat(inner),
                        _ => Expr::Msb(inner),
                    })
                }
                _ => match BinOp::from_symbol(head) {
                    Some(op) => {
                        if items.len() != 3 {
                            return err(format!("`{head}` takes two operands"));
                        }
                        Ok(Expr::bin(op, parse_expr(&items[1])?, parse_expr(&items[2])?))
                    }
                    None => err(format!("unknown operator `{head}`")),
                },
            }
        }
    }
}

fn expect_tagged<'a>(s: &'a Sexp, tag: &str) -> Result<&'a [Sexp], TextError> {
    let items = s
        .list()
        .ok_or_else(|| TextError(format!("expected ({tag} ...)")))?;
    match items.first().and_then(|h| h.atom()) {
        Some(t) if t == tag => Ok(&items[1..]),
        _ => err(format!("expected ({tag} ...)")),
    }
}

fn parse_ref(s: &Sexp) -> Result<QubitRef, TextError> {
    let body = expect_tagged(s, "ref")?;
    if body.len() != 2 {
        return err("(ref ARRAY INDEX)");
    }
    let array = body[0]
        .atom()
        .filter(|a| is_ident(a))
        .ok_or_else(|| TextError("bad array name in ref".into()))?;
    Ok(QubitRef {
        array: array.into(),
        index: parse_expr(&body[1])?,
    })
}

fn parse_arg(s: &Sexp) -> Result<Arg, TextError> {
    let items = s.list().ok_or_else(|| TextError("bad argument".into()))?;
    match items.first().and_then(|h| h.atom()) {
        Some("c") if items.len() == 2 => Ok(Arg::Classical(parse_expr(&items[1])?)),
        Some("q") if items.len() == 4 => {
            let array = items[1]
                .atom()
                .filter(|a| is_ident(a))
                .ok_or_else(|| TextError("bad array in slice".into()))?;
            let len = match items[3].atom() {
                Some("_") => None,
                _ => Some(parse_expr(&items[3])?),
            };
            Ok(Arg::Qubits(QubitSlice {
                array: array.into(),
                start: parse_expr(&items[2])?,
                len,
            }))
        }
        Some("h") if items.len() == 2 => {
            let name = items[1]
                .atom()
                .filter(|a| is_ident(a))
                .ok_or_else(|| TextError("bad handle name".into()))?;
            Ok(Arg::Handle(name.into()))
        }
        _ => err("argument must be (c E), (q A S L) or (h NAME)"),
    }
}

fn parse_body(items: &[Sexp]) -> Result<Vec<Statement>, TextError> {
    items.iter().map(parse_stmt).collect()
}

fn parse_tagged_body<'a>(s: &'a Sexp, tag: &str) -> Result<Vec<Statement>, TextError> {
    parse_body(expect_tagged(s, tag)?)
}

fn parse_stmt(s: &Sexp) -> Result<Statement, TextError> {
    let items = s
        .list()
        .ok_or_else(|| TextError("statement must be a list".into()))?;
    let head = items
        .first()
        .and_then(|h| h.atom())
        .ok_or_else(|| TextError("empty statement".into()))?;
    match head {
        "gate" => {
            if items.len() < 2 {
                return err("(gate KIND ...)");
            }
            let kind_name = items[1]
                .atom()
                .ok_or_else(|| TextError("bad gate kind".into()))?;
            let kind = GateKind::from_name(kind_name)
                .ok_or_else(|| TextError(format!("unknown gate `{kind_name}`")))?;
            let mut angle = None;
            let mut rest = &items[2..];
            if let Some(first) = rest.first() {
                if let Ok(a) = expect_tagged(first, "angle") {
                    if a.len() != 1 {
                        return err("(angle E)");
                    }
                    angle = Some(parse_expr(&a[0])?);
                    rest = &rest[1..];
                }
            }
            let targets = rest.iter().map(parse_ref).collect::<Result<Vec<_>, _>>()?;
            Ok(Statement::Gate {
                gate: GateSpec { kind, angle },
                targets,
            })
        }
        "ctrl" => {
            if items.len() != 3 {
                return err("(ctrl (CONTROLS) STMT)");
            }
            let cs = items[1]
                .list()
                .ok_or_else(|| TextError("bad control list".into()))?;
            let mut controls = Vec::new();
            for c in cs {
                let inner = c.list().ok_or_else(|| TextError("bad control".into()))?;
                match inner.first().and_then(|h| h.atom()) {
                    Some("bit1") | Some("bit0") if inner.len() == 2 => {
                        controls.push(ControlSel::Bit {
                            r: parse_ref(&inner[1])?,
                            pol: inner[0].atom() == Some("bit1"),
                        });
                    }
                    Some("all") if inner.len() == 2 => {
                        let array = inner[1]
                            .atom()
                            .filter(|a| is_ident(a))
                            .ok_or_else(|| TextError("bad control array".into()))?;
                        controls.push(ControlSel::All {
                            array: array.into(),
                        });
                    }
                    _ => return err("control must be (bit1 REF), (bit0 REF) or (all A)"),
                }
            }
            Ok(Statement::Controlled {
                controls,
                inner: alloc::boxed::Box::new(parse_stmt(&items[2])?),
            })
        }
        "call" | "callh" => {
            if items.len() < 2 {
                return err("(call NAME ...)");
            }
            let name = items[1]
                .atom()
                .filter(|a| is_ident(a))
                .ok_or_else(|| TextError("bad callee name".into()))?;
            let mut args = Vec::new();
            let mut into = Vec::new();
            for item in &items[2..] {
                if let Ok(vars) = expect_tagged(item, "into") {
                    for v in vars {
                        let v = v
                            .atom()
                            .filter(|a| is_ident(a))
                            .ok_or_else(|| TextError("bad into variable".into()))?;
                        into.push(String::from(v));
                    }
                } else {
                    args.push(parse_arg(item)?);
                }
            }
            Ok(Statement::Call {
                callee: if head == "call" {
                    Callee::Named(name.into())
                } else {
                    Callee::Handle(name.into())
                },
                args,
                into,
            })
        }
        "measure" => {
            if items.len() < 3 {
                return err("(measure VAR REF...)");
            }
            let var = items[1]
                .atom()
                .filter(|a| is_ident(a))
                .ok_or_else(|| TextError("bad measure variable".into()))?;
            let qubits = items[2..]
                .iter()
                .map(parse_ref)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Statement::MeasureInto {
                var: var.into(),
                qubits,
            })
        }
        "if" => {
            if items.len() != 4 {
                return err("(if COND (then ...) (else ...))");
            }
            Ok(Statement::If {
                cond: parse_expr(&items[1])?,
                then_body: parse_tagged_body(&items[2], "then")?,
                else_body: parse_tagged_body(&items[3], "else")?,
            })
        }
        "for" | "forrev" => {
            if items.len() != 5 {
                return err("(for VAR LO HI (body ...))");
            }
            let var = items[1]
                .atom()
                .filter(|a| is_ident(a))
                .ok_or_else(|| TextError("bad loop variable".into()))?;
            Ok(Statement::For {
                var: var.into(),
                lo: parse_expr(&items[2])?,
                hi: parse_expr(&items[3])?,
                rev: head == "forrev",
                body: parse_tagged_body(&items[4], "body")?,
            })
        }
        "rus" => {
            if items.len() != 4 {
                return err("(rus MAX COND (body ...))");
            }
            let max_iter = items[1]
                .atom()
                .and_then(|a| a.parse::<u32>().ok())
                .ok_or_else(|| TextError("bad rus bound".into()))?;
            Ok(Statement::RepeatUntil {
                until: parse_expr(&items[2])?,
                max_iter,
                body: parse_tagged_body(&items[3], "body")?,
            })
        }
        "within" => {
            if items.len() != 3 {
                return err("(within (u ...) (v ...))");
            }
            Ok(Statement::WithinApply {
                outer: parse_tagged_body(&items[1], "u")?,
                inner: parse_tagged_body(&items[2], "v")?,
            })
        }
        "assign" => {
            if items.len() != 3 {
                return err("(assign VAR EXPR)");
            }
            let var = items[1]
                .atom()
                .filter(|a| is_ident(a))
                .ok_or_else(|| TextError("bad assign variable".into()))?;
            Ok(Statement::Assign {
                var: var.into(),
                expr: parse_expr(&items[2])?,
            })
        }
        _ => err(format!("unknown statement `{head}`")),
    }
}

fn parse_param(s: &Sexp) -> Result<Param, TextError> {
    let items = s.list().ok_or_else(|| TextError("bad parameter".into()))?;
    if items.len() < 2 {
        return err("(NAME KIND ...)");
    }
    let name = items[0]
        .atom()
        .filter(|a| is_ident(a))
        .ok_or_else(|| TextError("bad parameter name".into()))?;
    let kind_name = items[1]
        .atom()
        .ok_or_else(|| TextError("bad parameter kind".into()))?;
    let kind = match kind_name {
        "int" if items.len() == 2 => ParamKind::Int,
        "float" if items.len() == 2 => ParamKind::Float,
        "bool" if items.len() == 2 => ParamKind::Bool,
        "qubit" if items.len() == 2 => ParamKind::Qubits { len: None },
        "qubit" if items.len() == 3 => {
            let l = expect_tagged(&items[2], "len")?;
            if l.len() != 1 {
                return err("(len E)");
            }
            ParamKind::Qubits {
                len: Some(parse_expr(&l[0])?),
            }
        }
        "subh" if items.len() == 3 => {
            let kinds = items[2]
                .list()
                .ok_or_else(|| TextError("bad handle signature".into()))?;
            let sig = kinds
                .iter()
                .map(|k| match k.atom() {
                    Some("int") => Ok(SigKind::Int),
                    Some("float") => Ok(SigKind::Float),
                    Some("bool") => Ok(SigKind::Bool),
                    Some("qubit") => Ok(SigKind::Qubits),
                    _ => err("handle signature entries are int/float/bool/qubit"),
                })
                .collect::<Result<Vec<_>, _>>()?;
            ParamKind::Sub { sig }
        }
        _ => return err(format!("bad parameter kind `{kind_name}`")),
    };
    Ok(Param {
        name: name.into(),
        kind,
    })
}

fn parse_sub_sexp(s: &Sexp) -> Result<Subroutine, TextError> {
    let items = expect_tagged(s, "sub")?;
    if items.len() != 4 {
        return err("(sub NAME (params ...) (outputs ...) (body ...))");
    }
    let name = items[0]
        .atom()
        .filter(|a| is_ident(a))
        .ok_or_else(|| TextError("bad subroutine name".into()))?;
    let params = expect_tagged(&items[1], "params")?
        .iter()
        .map(parse_param)
        .collect::<Result<Vec<_>, _>>()?;
    let outputs = expect_tagged(&items[2], "outputs")?
        .iter()
        .map(|o| {
            o.atom()
                .filter(|a| is_ident(a))
                .map(String::from)
                .ok_or_else(|| TextError("bad output name".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let body = parse_tagged_body(&items[3], "body")?;
    Ok(Subroutine {
        name: name.into(),
        params,
        outputs,
        body,
    })
}

/// Parse one subroutine from its text (no header).
pub fn parse_subroutine(src: &str) -> Result<Subroutine, TextError> {
    let sexps = parse_all(src).map_err(|e| TextError(format!("{e}")))?;
    if sexps.len() != 1 {
        return err("expected exactly one (sub ...) form");
    }
    parse_sub_sexp(&sexps[0])
}

/// Parse a `qir/1` document into its subroutines, in file order.
pub fn parse_program(src: &str) -> Result<Vec<Subroutine>, TextError> {
    let mut lines = src.lines();
    match lines.next().map(str::trim) {
        Some(h) if h == HEADER => {}
        other => {
            return err(format!(
                "missing `{HEADER}` header (found {:?})",
                other.unwrap_or("")
            ))
        }
    }
    let rest: usize = src.find('\n').map(|i| i + 1).unwrap_or(src.len());
    let sexps = parse_all(&src[rest..]).map_err(|e| TextError(format!("{e}")))?;
    sexps.iter().map(parse_sub_sexp).collect()
}
