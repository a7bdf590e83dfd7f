//! Single-edit mutant generation in four kinds — gate (GM), subroutine
//! (SM), classical (CM), and measurement (MM) mutations — plus the
//! single-shot trigger protocol used by experiment campaigns.
//!
//! Every emitted mutant passes the same static well-formedness checks as a
//! hand-written subroutine; ill-formed candidates are discarded before
//! emission. Enumeration is uniform over eligible sites and fully
//! deterministic for a given seed.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::checkers::{apply_qft_output_inverse, CheckError, TrialPlan};
use crate::qir::{
    execute, execute_inverse, parse_program, serialize_subroutine, Arg, BinOp, Callee,
    ControlSel, Expr, GateKind, GateSpec, ParamKind, Program, QubitRef, Statement, Subroutine,
};
use crate::rng::SplitRng;
use crate::simcore::StateVector;
use crate::stateprep::{sample_spec, InputKind, InputSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MutKind {
    Gm,
    Sm,
    Cm,
    Mm,
}

impl MutKind {
    pub fn name(&self) -> &'static str {
        match self {
            MutKind::Gm => "GM",
            MutKind::Sm => "SM",
            MutKind::Cm => "CM",
            MutKind::Mm => "MM",
        }
    }

    pub fn from_name(s: &str) -> Option<MutKind> {
        Some(match s {
            "GM" => MutKind::Gm,
            "SM" => MutKind::Sm,
            "CM" => MutKind::Cm,
            "MM" => MutKind::Mm,
            _ => return None,
        })
    }

    pub const ALL: [MutKind; 4] = [MutKind::Gm, MutKind::Sm, MutKind::Cm, MutKind::Mm];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditKind {
    Add,
    Remove,
    Replace,
}

impl EditKind {
    pub fn name(&self) -> &'static str {
        match self {
            EditKind::Add => "add",
            EditKind::Remove => "remove",
            EditKind::Replace => "replace",
        }
    }
}

/// A single-edit derivative of a subroutine.
#[derive(Clone, Debug)]
pub struct Mutant {
    pub base: String,
    pub kind: MutKind,
    pub edit: EditKind,
    /// Statement path of the edit, e.g. `0.for/2`.
    pub site: String,
    /// Human-readable description of the inserted/replacing element.
    pub payload: String,
    pub program: Subroutine,
}

// ------------------------------------------------------------ body access

/// One descent step: statement index in the current body plus which child
/// body to enter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Then,
    Else,
    ForBody,
    RusBody,
    WithinU,
    WithinV,
}

impl Slot {
    fn name(&self) -> &'static str {
        match self {
            Slot::Then => "then",
            Slot::Else => "else",
            Slot::ForBody => "for",
            Slot::RusBody => "rus",
            Slot::WithinU => "u",
            Slot::WithinV => "v",
        }
    }
}

type BodyPath = Vec<(usize, Slot)>;

fn site_string(path: &BodyPath, idx: usize) -> String {
    let mut out = String::new();
    for (i, slot) in path {
        out.push_str(&format!("{i}.{}/", slot.name()));
    }
    out.push_str(&idx.to_string());
    out
}

fn body_at_mut<'a>(body: &'a mut Vec<Statement>, path: &[(usize, Slot)]) -> &'a mut Vec<Statement> {
    match path.split_first() {
        None => body,
        Some((&(idx, slot), rest)) => {
            let child = match (&mut body[idx], slot) {
                (Statement::If { then_body, .. }, Slot::Then) => then_body,
                (Statement::If { else_body, .. }, Slot::Else) => else_body,
                (Statement::For { body, .. }, Slot::ForBody) => body,
                (Statement::RepeatUntil { body, .. }, Slot::RusBody) => body,
                (Statement::WithinApply { outer, .. }, Slot::WithinU) => outer,
                (Statement::WithinApply { inner, .. }, Slot::WithinV) => inner,
                _ => unreachable!("path desynchronized from body"),
            };
            body_at_mut(child, rest)
        }
    }
}

fn for_each_body(
    body: &[Statement],
    path: &mut BodyPath,
    visit: &mut impl FnMut(&BodyPath, &[Statement]),
) {
    visit(path, body);
    for (i, stmt) in body.iter().enumerate() {
        let mut descend = |slot: Slot, child: &[Statement]| {
            path.push((i, slot));
            for_each_body(child, path, visit);
            path.pop();
        };
        match stmt {
            Statement::If {
                then_body,
                else_body,
                ..
            } => {
                descend(Slot::Then, then_body);
                descend(Slot::Else, else_body);
            }
            Statement::For { body, .. } => descend(Slot::ForBody, body),
            Statement::RepeatUntil { body, .. } => descend(Slot::RusBody, body),
            Statement::WithinApply { outer, inner } => {
                descend(Slot::WithinU, outer);
                descend(Slot::WithinV, inner);
            }
            _ => {}
        }
    }
}

/// Qubit references usable at a body: those written directly in the body's
/// own statements (their variables are in scope throughout the body), with
/// the first qubit parameter's element 0 as a fallback.
fn harvest_refs(sub: &Subroutine, body: &[Statement]) -> Vec<QubitRef> {
    let mut refs = Vec::new();
    let mut push = |r: &QubitRef| {
        if !refs.contains(r) {
            refs.push(r.clone());
        }
    };
    for stmt in body {
        match stmt {
            Statement::Gate { targets, .. } => targets.iter().for_each(&mut push),
            Statement::MeasureInto { qubits, .. } => qubits.iter().for_each(&mut push),
            Statement::Controlled { controls, inner } => {
                for c in controls {
                    if let ControlSel::Bit { r, .. } = c {
                        push(r);
                    }
                }
                if let Statement::Gate { targets, .. } = inner.as_ref() {
                    targets.iter().for_each(&mut push);
                }
            }
            _ => {}
        }
    }
    if refs.is_empty() {
        if let Some(p) = sub
            .params
            .iter()
            .find(|p| matches!(p.kind, ParamKind::Qubits { .. }))
        {
            refs.push(QubitRef::at(&p.name, 0));
        }
    }
    refs
}

// ------------------------------------------------------------- candidates

#[derive(Clone, Debug)]
enum Candidate {
    GmAdd { path: BodyPath, pos: usize, gate: GateKind },
    GmRemove { path: BodyPath, idx: usize },
    GmReplace { path: BodyPath, idx: usize },
    SmAdd { path: BodyPath, pos: usize, from: usize },
    SmRemove { path: BodyPath, idx: usize },
    SmReplace { path: BodyPath, idx: usize },
    CmForBound { path: BodyPath, idx: usize, upper: bool, delta: i64 },
    CmRefIndex { path: BodyPath, idx: usize, slot: usize, delta: i64 },
    CmTargetSwap { path: BodyPath, idx: usize },
    CmCmpFlip { path: BodyPath, idx: usize },
    CmConst { path: BodyPath, idx: usize, occurrence: usize, delta: i64 },
    MmAdd { path: BodyPath, pos: usize },
    MmRemove { path: BodyPath, idx: usize },
}

impl Candidate {
    fn kind(&self) -> MutKind {
        match self {
            Candidate::GmAdd { .. } | Candidate::GmRemove { .. } | Candidate::GmReplace { .. } => {
                MutKind::Gm
            }
            Candidate::SmAdd { .. } | Candidate::SmRemove { .. } | Candidate::SmReplace { .. } => {
                MutKind::Sm
            }
            Candidate::MmAdd { .. } | Candidate::MmRemove { .. } => MutKind::Mm,
            _ => MutKind::Cm,
        }
    }
}

fn gate_of(stmt: &Statement) -> Option<&GateSpec> {
    match stmt {
        Statement::Gate { gate, .. } => Some(gate),
        Statement::Controlled { inner, .. } => gate_of(inner),
        _ => None,
    }
}

fn stmt_exprs(stmt: &Statement) -> Vec<&Expr> {
    let mut out = Vec::new();
    match stmt {
        Statement::Gate { gate, targets } => {
            if let Some(a) = &gate.angle {
                out.push(a);
            }
            out.extend(targets.iter().map(|t| &t.index));
        }
        Statement::Controlled { controls, inner } => {
            for c in controls {
                if let ControlSel::Bit { r, .. } = c {
                    out.push(&r.index);
                }
            }
            out.extend(stmt_exprs(inner));
        }
        Statement::Assign { expr, .. } => out.push(expr),
        Statement::Call { args, .. } => {
            for a in args {
                match a {
                    Arg::Classical(e) => out.push(e),
                    Arg::Qubits(s) => {
                        out.push(&s.start);
                        if let Some(l) = &s.len {
                            out.push(l);
                        }
                    }
                    Arg::Handle(_) => {}
                }
            }
        }
        Statement::If { cond, .. } => out.push(cond),
        Statement::RepeatUntil { until, .. } => out.push(until),
        _ => {}
    }
    out
}

/// Visit the statement's expressions mutably, in the same order as
/// [`stmt_exprs`].
fn for_each_stmt_expr_mut(stmt: &mut Statement, f: &mut impl FnMut(&mut Expr)) {
    match stmt {
        Statement::Gate { gate, targets } => {
            if let Some(a) = &mut gate.angle {
                f(a);
            }
            for t in targets {
                f(&mut t.index);
            }
        }
        Statement::Controlled { controls, inner } => {
            for c in controls.iter_mut() {
                if let ControlSel::Bit { r, .. } = c {
                    f(&mut r.index);
                }
            }
            for_each_stmt_expr_mut(inner, f);
        }
        Statement::Assign { expr, .. } => f(expr),
        Statement::Call { args, .. } => {
            for a in args {
                match a {
                    Arg::Classical(e) => f(e),
                    Arg::Qubits(s) => {
                        f(&mut s.start);
                        if let Some(l) = &mut s.len {
                            f(l);
                        }
                    }
                    Arg::Handle(_) => {}
                }
            }
        }
        Statement::If { cond, .. } => f(cond),
        Statement::RepeatUntil { until, .. } => f(until),
        _ => {}
    }
}

/// Index expressions of every qubit reference in a statement, including
/// controls and the bodies of controlled wrappers, in a stable order.
fn ref_index_count(stmt: &Statement) -> usize {
    match stmt {
        Statement::Gate { targets, .. } => targets.len(),
        Statement::MeasureInto { qubits, .. } => qubits.len(),
        Statement::Controlled { controls, inner } => {
            controls
                .iter()
                .filter(|c| matches!(c, ControlSel::Bit { .. }))
                .count()
                + ref_index_count(inner)
        }
        _ => 0,
    }
}

fn ref_index_mut<'a>(stmt: &'a mut Statement, slot: &mut usize) -> Option<&'a mut Expr> {
    match stmt {
        Statement::Gate { targets, .. } => {
            if *slot < targets.len() {
                return Some(&mut targets[*slot].index);
            }
            *slot -= targets.len();
            None
        }
        Statement::MeasureInto { qubits, .. } => {
            if *slot < qubits.len() {
                return Some(&mut qubits[*slot].index);
            }
            *slot -= qubits.len();
            None
        }
        Statement::Controlled { controls, inner } => {
            for c in controls.iter_mut() {
                if let ControlSel::Bit { r, .. } = c {
                    if *slot == 0 {
                        return Some(&mut r.index);
                    }
                    *slot -= 1;
                }
            }
            ref_index_mut(inner, slot)
        }
        _ => None,
    }
}

fn count_int_literals(e: &Expr) -> usize {
    match e {
        Expr::Int(_) => 1,
        Expr::Bin(_, a, b) => count_int_literals(a) + count_int_literals(b),
        Expr::Not(a) | Expr::Neg(a) | Expr::AsFloat(a) | Expr::Msb(a) => count_int_literals(a),
        _ => 0,
    }
}

fn tweak_int_literal(e: &mut Expr, occurrence: &mut usize, delta: i64) -> bool {
    match e {
        Expr::Int(v) => {
            if *occurrence == 0 {
                *v += delta;
                return true;
            }
            *occurrence -= 1;
            false
        }
        Expr::Bin(_, a, b) => {
            tweak_int_literal(a, occurrence, delta) || tweak_int_literal(b, occurrence, delta)
        }
        Expr::Not(a) | Expr::Neg(a) | Expr::AsFloat(a) | Expr::Msb(a) => {
            tweak_int_literal(a, occurrence, delta)
        }
        _ => false,
    }
}

fn collect_candidates(sub: &Subroutine, prog: &Program) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    for_each_body(&sub.body, &mut path, &mut |path, body| {
        for pos in 0..=body.len() {
            for gate in ONE_QUBIT_POOL {
                out.push(Candidate::GmAdd {
                    path: path.clone(),
                    pos,
                    gate,
                });
            }
            out.push(Candidate::MmAdd {
                path: path.clone(),
                pos,
            });
        }
        let call_sites: Vec<usize> = body
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Statement::Call { .. }))
            .map(|(i, _)| i)
            .collect();
        for (idx, stmt) in body.iter().enumerate() {
            if gate_of(stmt).is_some() {
                out.push(Candidate::GmRemove {
                    path: path.clone(),
                    idx,
                });
                out.push(Candidate::GmReplace {
                    path: path.clone(),
                    idx,
                });
            }
            if let Statement::Gate { targets, .. } = stmt {
                if targets.len() >= 2 {
                    out.push(Candidate::CmTargetSwap {
                        path: path.clone(),
                        idx,
                    });
                }
            }
            for slot in 0..ref_index_count(stmt) {
                for delta in [1, -1] {
                    out.push(Candidate::CmRefIndex {
                        path: path.clone(),
                        idx,
                        slot,
                        delta,
                    });
                }
            }
            if matches!(stmt, Statement::Call { .. }) {
                out.push(Candidate::SmRemove {
                    path: path.clone(),
                    idx,
                });
                if sm_replacement_targets(sub, prog, stmt).next().is_some() {
                    out.push(Candidate::SmReplace {
                        path: path.clone(),
                        idx,
                    });
                }
                for &from in &call_sites {
                    for pos in 0..=body.len() {
                        out.push(Candidate::SmAdd {
                            path: path.clone(),
                            pos,
                            from,
                        });
                    }
                }
            }
            if let Statement::For { .. } = stmt {
                for upper in [false, true] {
                    for delta in [1, -1] {
                        out.push(Candidate::CmForBound {
                            path: path.clone(),
                            idx,
                            upper,
                            delta,
                        });
                    }
                }
            }
            if matches!(stmt, Statement::If { .. } | Statement::RepeatUntil { .. }) {
                out.push(Candidate::CmCmpFlip {
                    path: path.clone(),
                    idx,
                });
            }
            let literal_count: usize = stmt_exprs(stmt).iter().map(|e| count_int_literals(e)).sum();
            for occurrence in 0..literal_count {
                for delta in [1, -1] {
                    out.push(Candidate::CmConst {
                        path: path.clone(),
                        idx,
                        occurrence,
                        delta,
                    });
                }
            }
            if matches!(stmt, Statement::MeasureInto { .. }) {
                out.push(Candidate::MmRemove {
                    path: path.clone(),
                    idx,
                });
            }
        }
    });
    out
}

fn shallow_kinds(sub: &Subroutine) -> Vec<&'static str> {
    sub.params
        .iter()
        .map(|p| match p.kind {
            ParamKind::Int => "int",
            ParamKind::Float => "float",
            ParamKind::Bool => "bool",
            ParamKind::Qubits { .. } => "qubit",
            ParamKind::Sub { .. } => "sub",
        })
        .collect()
}

/// Registered subroutines that can stand in for the callee of `stmt`:
/// identical shallow parameter kinds, not the mutated subroutine itself,
/// not the current callee, and not a generated variant of it.
fn sm_replacement_targets<'a>(
    sub: &'a Subroutine,
    prog: &'a Program,
    stmt: &'a Statement,
) -> impl Iterator<Item = &'a str> {
    let current = match stmt {
        Statement::Call {
            callee: Callee::Named(f),
            ..
        } => Some(f.clone()),
        _ => None,
    };
    let want = current
        .as_ref()
        .and_then(|f| prog.get(f))
        .map(shallow_kinds);
    prog.names().filter(move |name| {
        let (Some(current), Some(want)) = (&current, &want) else {
            return false;
        };
        if name == current || *name == sub.name || name.starts_with(&format!("{current}.")) {
            return false;
        }
        match prog.get(name) {
            Some(target) => shallow_kinds(target) == *want,
            None => false,
        }
    })
}

const ONE_QUBIT_POOL: [GateKind; 8] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
];

fn replace_var_with_zero(e: &mut Expr, var: &str) {
    match e {
        Expr::Var(v) if v == var => *e = Expr::Int(0),
        Expr::Bin(_, a, b) => {
            replace_var_with_zero(a, var);
            replace_var_with_zero(b, var);
        }
        Expr::Not(a) | Expr::Neg(a) | Expr::AsFloat(a) | Expr::Msb(a) => {
            replace_var_with_zero(a, var)
        }
        _ => {}
    }
}

fn rewire_removed_var(body: &mut [Statement], var: &str) {
    for stmt in body.iter_mut() {
        match stmt {
            Statement::Gate { gate, targets } => {
                if let Some(a) = &mut gate.angle {
                    replace_var_with_zero(a, var);
                }
                for t in targets {
                    replace_var_with_zero(&mut t.index, var);
                }
            }
            Statement::Assign { expr, .. } => replace_var_with_zero(expr, var),
            Statement::Call { args, .. } => {
                for a in args {
                    match a {
                        Arg::Classical(e) => replace_var_with_zero(e, var),
                        Arg::Qubits(s) => {
                            replace_var_with_zero(&mut s.start, var);
                            if let Some(l) = &mut s.len {
                                replace_var_with_zero(l, var);
                            }
                        }
                        Arg::Handle(_) => {}
                    }
                }
            }
            Statement::MeasureInto { qubits, .. } => {
                for q in qubits {
                    replace_var_with_zero(&mut q.index, var);
                }
            }
            Statement::Controlled { controls, inner } => {
                for c in controls.iter_mut() {
                    if let ControlSel::Bit { r, .. } = c {
                        replace_var_with_zero(&mut r.index, var);
                    }
                }
                rewire_removed_var(core::slice::from_mut(inner.as_mut()), var);
            }
            Statement::If {
                cond,
                then_body,
                else_body,
            } => {
                replace_var_with_zero(cond, var);
                rewire_removed_var(then_body, var);
                rewire_removed_var(else_body, var);
            }
            Statement::For { lo, hi, body, .. } => {
                replace_var_with_zero(lo, var);
                replace_var_with_zero(hi, var);
                rewire_removed_var(body, var);
            }
            Statement::RepeatUntil { body, until, .. } => {
                rewire_removed_var(body, var);
                replace_var_with_zero(until, var);
            }
            Statement::WithinApply { outer, inner } => {
                rewire_removed_var(outer, var);
                rewire_removed_var(inner, var);
            }
        }
    }
}

fn flip_cmp(e: &mut Expr) -> bool {
    if let Expr::Bin(op, _, _) = e {
        let flipped = match op {
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
            BinOp::Lt => BinOp::Ge,
            BinOp::Le => BinOp::Gt,
            BinOp::Gt => BinOp::Le,
            BinOp::Ge => BinOp::Lt,
            _ => return flip_cmp_inner(e),
        };
        *op = flipped;
        return true;
    }
    false
}

fn flip_cmp_inner(e: &mut Expr) -> bool {
    if let Expr::Bin(_, a, b) = e {
        return flip_cmp(a) || flip_cmp(b);
    }
    false
}

/// Apply a candidate, returning the mutated subroutine and a payload
/// description, or None when the candidate has no effect.
fn apply_candidate(
    sub: &Subroutine,
    prog: &Program,
    cand: &Candidate,
    rng: &mut SplitRng,
    fresh_counter: &mut u32,
) -> Option<(Subroutine, EditKind, String, String)> {
    let mut out = sub.clone();
    match cand {
        Candidate::GmAdd { path, pos, gate } => {
            let refs = {
                let body = body_at_mut(&mut out.body, path);
                harvest_refs(sub, body)
            };
            let target = refs.get(rng.below(refs.len().max(1) as u64) as usize)?.clone();
            let kind = *gate;
            let stmt = Statement::Gate {
                gate: GateSpec::plain(kind),
                targets: vec![target.clone()],
            };
            let body = body_at_mut(&mut out.body, path);
            body.insert(*pos, stmt);
            Some((
                out,
                EditKind::Add,
                site_string(path, *pos),
                format!("gate {}", kind.name()),
            ))
        }
        Candidate::GmRemove { path, idx } => {
            let body = body_at_mut(&mut out.body, path);
            let removed = body.remove(*idx);
            let name = gate_of(&removed)?.kind.name();
            Some((
                out,
                EditKind::Remove,
                site_string(path, *idx),
                format!("gate {name}"),
            ))
        }
        Candidate::GmReplace { path, idx } => {
            let body = body_at_mut(&mut out.body, path);
            fn replace_gate(stmt: &mut Statement, rng: &mut SplitRng) -> Option<String> {
                match stmt {
                    Statement::Gate { gate, .. } => {
                        let new_kind = match gate.kind {
                            GateKind::Cnot => GateKind::Swap,
                            GateKind::Swap => GateKind::Cnot,
                            GateKind::Toffoli => GateKind::Cswap,
                            GateKind::Cswap => GateKind::Toffoli,
                            GateKind::R1 => GateKind::Rz,
                            GateKind::Rz => GateKind::R1,
                            old => loop {
                                let pick = ONE_QUBIT_POOL[rng.below(8) as usize];
                                if pick != old {
                                    break pick;
                                }
                            },
                        };
                        let old = gate.kind.name();
                        gate.kind = new_kind;
                        Some(format!("{old} -> {}", new_kind.name()))
                    }
                    Statement::Controlled { inner, .. } => replace_gate(inner, rng),
                    _ => None,
                }
            }
            let payload = replace_gate(&mut body[*idx], rng)?;
            Some((out, EditKind::Replace, site_string(path, *idx), payload))
        }
        Candidate::SmAdd { path, pos, from } => {
            let body = body_at_mut(&mut out.body, path);
            let copied = body.get(*from)?.clone();
            let payload = match &copied {
                Statement::Call {
                    callee: Callee::Named(f),
                    ..
                } => format!("call {f}"),
                Statement::Call {
                    callee: Callee::Handle(h),
                    ..
                } => format!("callh {h}"),
                _ => return None,
            };
            body.insert(*pos, copied);
            Some((out, EditKind::Add, site_string(path, *pos), payload))
        }
        Candidate::SmRemove { path, idx } => {
            let body = body_at_mut(&mut out.body, path);
            let removed = body.remove(*idx);
            let payload = match &removed {
                Statement::Call {
                    callee: Callee::Named(f),
                    ..
                } => format!("call {f}"),
                Statement::Call {
                    callee: Callee::Handle(h),
                    ..
                } => format!("callh {h}"),
                _ => return None,
            };
            Some((out, EditKind::Remove, site_string(path, *idx), payload))
        }
        Candidate::SmReplace { path, idx } => {
            let (old, alternatives) = {
                let body = body_at_mut(&mut out.body, path);
                let stmt = &body[*idx];
                let alts: Vec<String> = sm_replacement_targets(sub, prog, stmt)
                    .map(String::from)
                    .collect();
                let old = match stmt {
                    Statement::Call {
                        callee: Callee::Named(f),
                        ..
                    } => f.clone(),
                    _ => return None,
                };
                (old, alts)
            };
            if alternatives.is_empty() {
                return None;
            }
            let new = alternatives[rng.below(alternatives.len() as u64) as usize].clone();
            let body = body_at_mut(&mut out.body, path);
            if let Statement::Call { callee, .. } = &mut body[*idx] {
                *callee = Callee::Named(new.clone());
            }
            Some((
                out,
                EditKind::Replace,
                site_string(path, *idx),
                format!("{old} -> {new}"),
            ))
        }
        Candidate::CmForBound {
            path,
            idx,
            upper,
            delta,
        } => {
            let body = body_at_mut(&mut out.body, path);
            if let Statement::For { lo, hi, .. } = &mut body[*idx] {
                let slot = if *upper { hi } else { lo };
                *slot = Expr::bin(BinOp::Add, slot.clone(), Expr::Int(*delta));
                Some((
                    out,
                    EditKind::Replace,
                    site_string(path, *idx),
                    format!(
                        "{} bound {delta:+}",
                        if *upper { "upper" } else { "lower" }
                    ),
                ))
            } else {
                None
            }
        }
        Candidate::CmRefIndex {
            path,
            idx,
            slot,
            delta,
        } => {
            let body = body_at_mut(&mut out.body, path);
            let mut slot = *slot;
            let index = ref_index_mut(&mut body[*idx], &mut slot)?;
            *index = Expr::bin(BinOp::Add, index.clone(), Expr::Int(*delta));
            Some((
                out,
                EditKind::Replace,
                site_string(path, *idx),
                format!("index {delta:+}"),
            ))
        }
        Candidate::CmTargetSwap { path, idx } => {
            let body = body_at_mut(&mut out.body, path);
            if let Statement::Gate { targets, .. } = &mut body[*idx] {
                if targets.len() < 2 {
                    return None;
                }
                targets.swap(0, 1);
                Some((
                    out,
                    EditKind::Replace,
                    site_string(path, *idx),
                    "swap targets".into(),
                ))
            } else {
                None
            }
        }
        Candidate::CmCmpFlip { path, idx } => {
            let body = body_at_mut(&mut out.body, path);
            let cond = match &mut body[*idx] {
                Statement::If { cond, .. } => cond,
                Statement::RepeatUntil { until, .. } => until,
                _ => return None,
            };
            if !flip_cmp(cond) {
                return None;
            }
            Some((
                out,
                EditKind::Replace,
                site_string(path, *idx),
                "comparison flip".into(),
            ))
        }
        Candidate::CmConst {
            path,
            idx,
            occurrence,
            delta,
        } => {
            let body = body_at_mut(&mut out.body, path);
            let mut occ = *occurrence;
            let mut changed = false;
            for_each_stmt_expr_mut(&mut body[*idx], &mut |e| {
                if !changed && tweak_int_literal(e, &mut occ, *delta) {
                    changed = true;
                }
            });
            if !changed {
                return None;
            }
            Some((
                out,
                EditKind::Replace,
                site_string(path, *idx),
                format!("constant {delta:+}"),
            ))
        }
        Candidate::MmAdd { path, pos } => {
            let refs = {
                let body = body_at_mut(&mut out.body, path);
                harvest_refs(sub, body)
            };
            let target = refs.get(rng.below(refs.len().max(1) as u64) as usize)?.clone();
            let var = format!("_mm{}", *fresh_counter);
            *fresh_counter += 1;
            let body = body_at_mut(&mut out.body, path);
            body.insert(
                *pos,
                Statement::MeasureInto {
                    var: var.clone(),
                    qubits: vec![target],
                },
            );
            Some((
                out,
                EditKind::Add,
                site_string(path, *pos),
                format!("measure {var}"),
            ))
        }
        Candidate::MmRemove { path, idx } => {
            let var = {
                let body = body_at_mut(&mut out.body, path);
                match body.remove(*idx) {
                    Statement::MeasureInto { var, .. } => var,
                    _ => return None,
                }
            };
            // Conditions (and any other expression) reading the removed
            // variable now read constant 0, keeping the mutant compilable.
            rewire_removed_var(&mut out.body, &var);
            Some((
                out,
                EditKind::Remove,
                site_string(path, *idx),
                format!("measure {var}"),
            ))
        }
    }
}

/// Enumerate up to `limit_per_kind` well-formed single-edit mutants per
/// requested kind, uniformly over eligible sites. Same seed, same corpus.
pub fn enumerate_mutants(
    prog: &Program,
    base: &str,
    kinds: &[MutKind],
    limit_per_kind: usize,
    rng: &mut SplitRng,
) -> Vec<Mutant> {
    let Some(sub) = prog.get(base) else {
        return Vec::new();
    };
    let all = collect_candidates(sub, prog);
    let mut out = Vec::new();
    let mut fresh_counter = 0u32;
    for &kind in kinds {
        let mut pool: Vec<&Candidate> = all.iter().filter(|c| c.kind() == kind).collect();
        rng.shuffle(&mut pool);
        let mut taken = 0;
        for cand in pool {
            if taken >= limit_per_kind {
                break;
            }
            let Some((mutated, edit, site, payload)) =
                apply_candidate(sub, prog, cand, rng, &mut fresh_counter)
            else {
                continue;
            };
            if mutated == *sub {
                continue;
            }
            // Every emitted mutant must still compile.
            if prog.with_override(mutated.clone()).is_err() {
                continue;
            }
            out.push(Mutant {
                base: base.into(),
                kind,
                edit,
                site,
                payload,
                program: mutated,
            });
            taken += 1;
        }
    }
    out
}

// ---------------------------------------------------------------- trigger

/// One single-shot trigger trial following the campaign protocol: sample
/// one input of `kind`, run the mutated program once, and apply the
/// transform-based check derived from the correct program's expected
/// output. Runtime faults count as triggers.
///
/// For `qft_ci_shortcut` with classical inputs the per-qubit Fourier
/// product inverse is used; otherwise the correct program's inverse (or,
/// for non-adjointable identity-specification programs, nothing) runs
/// before un-preparing the input.
pub fn trigger_trial(
    mutated: &Program,
    pristine: &Program,
    plan: &TrialPlan,
    kind: InputKind,
    qft_ci_shortcut: bool,
    rng: &mut SplitRng,
) -> Result<bool, CheckError> {
    let spec = sample_spec(kind, plan.prep.len(), rng);
    let input = spec.materialize(rng)?;
    let mut state = StateVector::new(plan.n_total)?;
    input.prepare(&mut state, &plan.prep)?;
    let args = (plan.args)(rng);

    let sub = mutated
        .get(&plan.sub)
        .ok_or_else(|| CheckError::Unsupported(format!("unknown subroutine `{}`", plan.sub)))?;
    if execute(mutated, sub, &args, &mut state, rng).is_err() {
        return Ok(true);
    }

    if qft_ci_shortcut && kind == InputKind::Ci {
        if let InputSpec::KetX { x, .. } = spec {
            apply_qft_output_inverse(x, plan.n_total, &mut state)?;
            let all: Vec<usize> = (0..plan.n_total).collect();
            let bits = state.measure(&all, rng)?;
            return Ok(bits.iter().any(|&b| b != 0));
        }
    }

    if pristine.is_adjointable(&plan.sub) {
        let oracle = pristine.get(&plan.sub).unwrap();
        if execute_inverse(pristine, oracle, &args, &mut state, rng).is_err() {
            return Ok(true);
        }
        input.unprepare(&mut state, &plan.prep)?;
        let all: Vec<usize> = (0..plan.n_total).collect();
        let bits = state.measure(&all, rng)?;
        Ok(bits.iter().any(|&b| b != 0))
    } else {
        // Identity-specification oracle: un-prepare on the output mapping.
        input.unprepare(&mut state, &plan.unprep)?;
        let measured: Vec<usize> = if plan.check_all {
            (0..plan.n_total).collect()
        } else {
            plan.unprep.clone()
        };
        let bits = state.measure(&measured, rng)?;
        Ok(bits.iter().any(|&b| b != 0))
    }
}

// ----------------------------------------------------------------- corpus

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Serialize a mutant corpus: a manifest comment line per mutant followed
/// by its IR, under the standard header. Byte-stable for a given corpus.
pub fn render_corpus(mutants: &[Mutant], seed: u64) -> String {
    let mut out = String::from("qir/1\n");
    for m in mutants {
        out.push_str(&format!(
            "\n#mutant {},{},{},{},{},{}\n",
            m.base,
            m.kind.name(),
            m.edit.name(),
            csv_quote(&m.site),
            csv_quote(&m.payload),
            seed
        ));
        out.push_str(&serialize_subroutine(&m.program));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusError(pub String);

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "corpus: {}", self.0)
    }
}

/// Parse a corpus file back into mutants (plus the recorded seed).
pub fn parse_corpus(src: &str) -> Result<(Vec<Mutant>, u64), CorpusError> {
    let mut manifests = Vec::new();
    for line in src.lines() {
        if let Some(rest) = line.strip_prefix("#mutant ") {
            manifests.push(parse_manifest(rest)?);
        }
    }
    let subs = parse_program(src).map_err(|e| CorpusError(format!("{e}")))?;
    if subs.len() != manifests.len() {
        return Err(CorpusError(format!(
            "{} manifest lines but {} subroutines",
            manifests.len(),
            subs.len()
        )));
    }
    let mut seed = 0;
    let mutants = manifests
        .into_iter()
        .zip(subs)
        .map(|((base, kind, edit, site, payload, s), program)| {
            seed = s;
            Mutant {
                base,
                kind,
                edit,
                site,
                payload,
                program,
            }
        })
        .collect();
    Ok((mutants, seed))
}

type ManifestRow = (String, MutKind, EditKind, String, String, u64);

fn parse_manifest(line: &str) -> Result<ManifestRow, CorpusError> {
    // base,kind,edit,"site","payload",seed
    let fields = split_csv(line);
    if fields.len() != 6 {
        return Err(CorpusError(format!("manifest needs 6 fields: {line}")));
    }
    let kind = MutKind::from_name(&fields[1])
        .ok_or_else(|| CorpusError(format!("bad kind {}", fields[1])))?;
    let edit = match fields[2].as_str() {
        "add" => EditKind::Add,
        "remove" => EditKind::Remove,
        "replace" => EditKind::Replace,
        other => return Err(CorpusError(format!("bad edit {other}"))),
    };
    let seed = fields[5]
        .parse::<u64>()
        .map_err(|_| CorpusError("bad seed".into()))?;
    Ok((
        fields[0].clone(),
        kind,
        edit,
        fields[3].clone(),
        fields[4].clone(),
        seed,
    ))
}

fn split_csv(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted => {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    cur.push('"');
                } else {
                    quoted = false;
                }
            }
            '"' => quoted = true,
            ',' if !quoted => {
                fields.push(core::mem::take(&mut cur));
            }
            c => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}
