//! Subroutine registry and static well-formedness checking.
//!
//! Registration order is bottom-up: a subroutine may only call subroutines
//! that are already registered, which also rules out recursion. The checks
//! here (scope, arity, expression types, control/within shape) are the same
//! filter applied to generated mutants, so every emitted mutant compiles.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::expr::{infer_type, Ty};
use super::{
    Arg, Callee, ControlSel, Expr, Param, ParamKind, QubitRef, SigKind, Statement, Subroutine,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfError {
    pub sub: String,
    pub message: String,
}

impl fmt::Display for WfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.sub, self.message)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SubMeta {
    pub output_tys: Vec<Ty>,
    pub adjointable: bool,
}

/// Immutable-after-registration store of subroutines.
#[derive(Clone, Debug, Default)]
pub struct Program {
    subs: BTreeMap<String, Subroutine>,
    meta: BTreeMap<String, SubMeta>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Subroutine> {
        self.subs.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.subs.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.subs.keys().map(|s| s.as_str())
    }

    pub fn is_adjointable(&self, name: &str) -> bool {
        self.meta.get(name).map(|m| m.adjointable).unwrap_or(false)
    }

    pub(crate) fn output_tys(&self, name: &str) -> Option<&[Ty]> {
        self.meta.get(name).map(|m| m.output_tys.as_slice())
    }

    /// Check and insert. Registering a name twice is an error; use
    /// [`Program::override_sub`] to swap in a mutant.
    pub fn register(&mut self, sub: Subroutine) -> Result<(), WfError> {
        if self.subs.contains_key(&sub.name) {
            return Err(WfError {
                sub: sub.name.clone(),
                message: "already registered".into(),
            });
        }
        let meta = self.check(&sub)?;
        self.meta.insert(sub.name.clone(), meta);
        self.subs.insert(sub.name.clone(), sub);
        Ok(())
    }

    /// Replace an existing subroutine (used for mutants); the replacement
    /// must still pass the static checks.
    pub fn override_sub(&mut self, sub: Subroutine) -> Result<(), WfError> {
        let meta = self.check(&sub)?;
        self.meta.insert(sub.name.clone(), meta);
        self.subs.insert(sub.name.clone(), sub);
        Ok(())
    }

    /// Clone of this program with one subroutine swapped out.
    pub fn with_override(&self, sub: Subroutine) -> Result<Program, WfError> {
        let mut p = self.clone();
        p.override_sub(sub)?;
        Ok(p)
    }

    /// Static well-formedness: scope, arity, expression types, and shape
    /// constraints. Does not insert.
    pub(crate) fn check(&self, sub: &Subroutine) -> Result<SubMeta, WfError> {
        let err = |message: String| WfError {
            sub: sub.name.clone(),
            message,
        };

        let mut classical: BTreeMap<String, Ty> = BTreeMap::new();
        let mut qarrays: Vec<String> = Vec::new();
        let mut handles: BTreeMap<String, Vec<SigKind>> = BTreeMap::new();
        for p in &sub.params {
            let dup = classical.contains_key(&p.name)
                || qarrays.contains(&p.name)
                || handles.contains_key(&p.name);
            if dup {
                return Err(err(format!("duplicate parameter `{}`", p.name)));
            }
            match &p.kind {
                ParamKind::Int => {
                    classical.insert(p.name.clone(), Ty::Int);
                }
                ParamKind::Float => {
                    classical.insert(p.name.clone(), Ty::Float);
                }
                ParamKind::Bool => {
                    classical.insert(p.name.clone(), Ty::Bool);
                }
                ParamKind::Qubits { len } => {
                    if let Some(l) = len {
                        match infer_type(l, &classical) {
                            Ok(Ty::Int) => {}
                            Ok(t) => {
                                return Err(err(format!(
                                    "length of `{}` has type {}, expected int",
                                    p.name,
                                    t.name()
                                )))
                            }
                            Err(e) => return Err(err(format!("length of `{}`: {e}", p.name))),
                        }
                    }
                    qarrays.push(p.name.clone());
                }
                ParamKind::Sub { sig } => {
                    handles.insert(p.name.clone(), sig.clone());
                }
            }
        }

        let mut cx = CheckCx {
            prog: self,
            sub_name: &sub.name,
            qarrays: &qarrays,
            handles: &handles,
        };
        let vars = cx.check_body(&sub.body, classical)?;

        let mut output_tys = Vec::new();
        for out in &sub.outputs {
            match vars.get(out) {
                Some(t) => output_tys.push(*t),
                None => {
                    return Err(err(format!(
                        "output `{out}` is not definitely assigned at the end of the body"
                    )))
                }
            }
        }

        let adjointable = self.body_adjointable(sub, &sub.body);
        Ok(SubMeta {
            output_tys,
            adjointable,
        })
    }

    /// A body is adjointable when it is measurement-free, loop-exit-free,
    /// handle-free, all named callees are adjointable, and every assigned
    /// variable has exactly one assignment site whose right-hand side does
    /// not depend on itself. The last restriction is what makes structural
    /// body reversal sound in the presence of classical statements.
    fn body_adjointable(&self, sub: &Subroutine, body: &[Statement]) -> bool {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        count_assigns(body, &mut counts);
        if counts.values().any(|&c| c > 1) {
            return false;
        }
        self.stmts_adjointable(sub, body)
    }

    fn stmts_adjointable(&self, sub: &Subroutine, body: &[Statement]) -> bool {
        body.iter().all(|s| match s {
            Statement::Gate { .. } => true,
            Statement::Controlled { inner, .. } => {
                self.stmts_adjointable(sub, core::slice::from_ref(inner))
            }
            Statement::Call { callee, .. } => match callee {
                Callee::Named(f) => self.is_adjointable(f),
                Callee::Handle(_) => false,
            },
            Statement::MeasureInto { .. } | Statement::RepeatUntil { .. } => false,
            Statement::If {
                then_body,
                else_body,
                ..
            } => {
                self.stmts_adjointable(sub, then_body) && self.stmts_adjointable(sub, else_body)
            }
            Statement::For { body, .. } => self.stmts_adjointable(sub, body),
            Statement::WithinApply { outer, inner } => {
                self.stmts_adjointable(sub, outer) && self.stmts_adjointable(sub, inner)
            }
            Statement::Assign { var, expr } => !expr_mentions(expr, var),
        })
    }
}

fn count_assigns<'a>(body: &'a [Statement], counts: &mut BTreeMap<&'a str, usize>) {
    for s in body {
        match s {
            Statement::Assign { var, .. } => *counts.entry(var).or_insert(0) += 1,
            Statement::If {
                then_body,
                else_body,
                ..
            } => {
                count_assigns(then_body, counts);
                count_assigns(else_body, counts);
            }
            Statement::For { body, .. }
            | Statement::RepeatUntil { body, .. } => count_assigns(body, counts),
            Statement::WithinApply { outer, inner } => {
                count_assigns(outer, counts);
                count_assigns(inner, counts);
            }
            Statement::Controlled { inner, .. } => {
                count_assigns(core::slice::from_ref(inner), counts)
            }
            _ => {}
        }
    }
}

fn expr_mentions(e: &Expr, var: &str) -> bool {
    match e {
        Expr::Var(v) => v == var,
        Expr::Bin(_, a, b) => expr_mentions(a, var) || expr_mentions(b, var),
        Expr::Not(a) | Expr::Neg(a) | Expr::AsFloat(a) | Expr::Msb(a) => expr_mentions(a, var),
        _ => false,
    }
}

struct CheckCx<'a> {
    prog: &'a Program,
    sub_name: &'a str,
    qarrays: &'a [String],
    handles: &'a BTreeMap<String, Vec<SigKind>>,
}

impl CheckCx<'_> {
    fn err(&self, message: String) -> WfError {
        WfError {
            sub: self.sub_name.into(),
            message,
        }
    }

    fn check_ref(&self, r: &QubitRef, vars: &BTreeMap<String, Ty>) -> Result<(), WfError> {
        if !self.qarrays.contains(&r.array) {
            return Err(self.err(format!("`{}` is not a qubit array", r.array)));
        }
        match infer_type(&r.index, vars) {
            Ok(Ty::Int) => Ok(()),
            Ok(t) => Err(self.err(format!(
                "index into `{}` has type {}, expected int",
                r.array,
                t.name()
            ))),
            Err(e) => Err(self.err(format!("index into `{}`: {e}", r.array))),
        }
    }

    fn check_body(
        &mut self,
        body: &[Statement],
        mut vars: BTreeMap<String, Ty>,
    ) -> Result<BTreeMap<String, Ty>, WfError> {
        for stmt in body {
            vars = self.check_stmt(stmt, vars)?;
        }
        Ok(vars)
    }

    fn bind_var(
        &self,
        mut vars: BTreeMap<String, Ty>,
        name: &str,
        ty: Ty,
    ) -> Result<BTreeMap<String, Ty>, WfError> {
        if self.qarrays.contains(&String::from(name)) || self.handles.contains_key(name) {
            return Err(self.err(format!("`{name}` shadows a quantum parameter")));
        }
        match vars.get(name) {
            Some(&old) if old != ty => Err(self.err(format!(
                "`{name}` changes type from {} to {}",
                old.name(),
                ty.name()
            ))),
            _ => {
                vars.insert(name.into(), ty);
                Ok(vars)
            }
        }
    }

    fn check_stmt(
        &mut self,
        stmt: &Statement,
        vars: BTreeMap<String, Ty>,
    ) -> Result<BTreeMap<String, Ty>, WfError> {
        match stmt {
            Statement::Gate { gate, targets } => {
                if gate.kind.arity() != targets.len() {
                    return Err(self.err(format!(
                        "gate {} expects {} targets, got {}",
                        gate.kind.name(),
                        gate.kind.arity(),
                        targets.len()
                    )));
                }
                match (&gate.angle, gate.kind.parameterized()) {
                    (Some(_), false) => {
                        return Err(self.err(format!(
                            "gate {} does not take an angle",
                            gate.kind.name()
                        )))
                    }
                    (None, true) => {
                        return Err(
                            self.err(format!("gate {} requires an angle", gate.kind.name()))
                        )
                    }
                    _ => {}
                }
                if let Some(angle) = &gate.angle {
                    match infer_type(angle, &vars) {
                        Ok(Ty::Bool) => {
                            return Err(self.err("rotation angle has type bool".into()))
                        }
                        Ok(_) => {}
                        Err(e) => return Err(self.err(format!("rotation angle: {e}"))),
                    }
                }
                for t in targets {
                    self.check_ref(t, &vars)?;
                }
                Ok(vars)
            }
            Statement::Controlled { controls, inner } => {
                if controls.is_empty() {
                    return Err(self.err("controlled statement with no controls".into()));
                }
                for c in controls {
                    match c {
                        ControlSel::Bit { r, .. } => self.check_ref(r, &vars)?,
                        ControlSel::All { array } => {
                            if !self.qarrays.contains(array) {
                                return Err(
                                    self.err(format!("`{array}` is not a qubit array"))
                                );
                            }
                        }
                    }
                }
                match inner.as_ref() {
                    Statement::Gate { .. } | Statement::Call { .. } => {
                        self.check_stmt(inner, vars)
                    }
                    _ => Err(self.err(
                        "controlled statement must wrap a gate or a call".into(),
                    )),
                }
            }
            Statement::Call { callee, args, into } => {
                match callee {
                    Callee::Named(f) => {
                        if f == self.sub_name {
                            return Err(self.err("recursive call".into()));
                        }
                        let target = self
                            .prog
                            .get(f)
                            .ok_or_else(|| self.err(format!("unknown subroutine `{f}`")))?;
                        if target.params.len() != args.len() {
                            return Err(self.err(format!(
                                "`{f}` takes {} arguments, got {}",
                                target.params.len(),
                                args.len()
                            )));
                        }
                        for (param, arg) in target.params.iter().zip(args) {
                            self.check_arg(f, param, arg, &vars)?;
                        }
                        let out_tys = self.prog.output_tys(f).unwrap_or(&[]);
                        if !into.is_empty() && into.len() != out_tys.len() {
                            return Err(self.err(format!(
                                "`{f}` exposes {} outputs, `into` binds {}",
                                out_tys.len(),
                                into.len()
                            )));
                        }
                        let mut vars = vars;
                        for (v, t) in into.iter().zip(out_tys) {
                            vars = self.bind_var(vars, v, *t)?;
                        }
                        Ok(vars)
                    }
                    Callee::Handle(h) => {
                        let sig = self
                            .handles
                            .get(h)
                            .ok_or_else(|| self.err(format!("`{h}` is not a handle parameter")))?;
                        if sig.len() != args.len() {
                            return Err(self.err(format!(
                                "handle `{h}` takes {} arguments, got {}",
                                sig.len(),
                                args.len()
                            )));
                        }
                        for (kind, arg) in sig.iter().zip(args) {
                            self.check_sig_arg(h, *kind, arg, &vars)?;
                        }
                        if !into.is_empty() {
                            return Err(self
                                .err(format!("handle call `{h}` cannot bind outputs")));
                        }
                        Ok(vars)
                    }
                }
            }
            Statement::MeasureInto { var, qubits } => {
                if qubits.is_empty() {
                    return Err(self.err("measurement of no qubits".into()));
                }
                for q in qubits {
                    self.check_ref(q, &vars)?;
                }
                self.bind_var(vars, var, Ty::Int)
            }
            Statement::If {
                cond,
                then_body,
                else_body,
            } => {
                match infer_type(cond, &vars) {
                    Ok(Ty::Bool) => {}
                    Ok(t) => {
                        return Err(
                            self.err(format!("if condition has type {}", t.name()))
                        )
                    }
                    Err(e) => return Err(self.err(format!("if condition: {e}"))),
                }
                let t_vars = self.check_body(then_body, vars.clone())?;
                let e_vars = self.check_body(else_body, vars)?;
                // A variable survives the branch only if both sides agree.
                let mut merged = BTreeMap::new();
                for (k, v) in &t_vars {
                    if e_vars.get(k) == Some(v) {
                        merged.insert(k.clone(), *v);
                    }
                }
                Ok(merged)
            }
            Statement::For {
                var, lo, hi, body, ..
            } => {
                for (what, e) in [("lower bound", lo), ("upper bound", hi)] {
                    match infer_type(e, &vars) {
                        Ok(Ty::Int) => {}
                        Ok(t) => {
                            return Err(self.err(format!(
                                "for {what} has type {}, expected int",
                                t.name()
                            )))
                        }
                        Err(e) => return Err(self.err(format!("for {what}: {e}"))),
                    }
                }
                let inner = self.bind_var(vars.clone(), var, Ty::Int)?;
                self.check_body(body, inner)?;
                // Definitions inside a for loop are not definitely assigned
                // afterwards (the loop may run zero times).
                Ok(vars)
            }
            Statement::RepeatUntil {
                body,
                until,
                max_iter,
            } => {
                if *max_iter == 0 {
                    return Err(self.err("repeat-until with max_iter 0".into()));
                }
                // The body runs at least once, so its definitions are live
                // both in the exit condition and afterwards.
                let vars = self.check_body(body, vars)?;
                match infer_type(until, &vars) {
                    Ok(Ty::Bool) => Ok(vars),
                    Ok(t) => Err(self.err(format!(
                        "repeat-until condition has type {}",
                        t.name()
                    ))),
                    Err(e) => Err(self.err(format!("repeat-until condition: {e}"))),
                }
            }
            Statement::WithinApply { outer, inner } => {
                if !self.prog.stmts_adjointable(
                    &Subroutine::new(self.sub_name, Vec::new(), &[], Vec::new()),
                    outer,
                ) {
                    return Err(self
                        .err("within-apply context (U) must be adjointable".into()));
                }
                let vars = self.check_body(outer, vars)?;
                self.check_body(inner, vars)
            }
            Statement::Assign { var, expr } => {
                let ty = infer_type(expr, &vars)
                    .map_err(|e| self.err(format!("assignment to `{var}`: {e}")))?;
                self.bind_var(vars, var, ty)
            }
        }
    }

    fn check_arg(
        &self,
        callee: &str,
        param: &Param,
        arg: &Arg,
        vars: &BTreeMap<String, Ty>,
    ) -> Result<(), WfError> {
        match (&param.kind, arg) {
            (ParamKind::Int, Arg::Classical(e)) => match infer_type(e, vars) {
                Ok(Ty::Int) => Ok(()),
                Ok(t) => Err(self.err(format!(
                    "`{callee}` parameter `{}` expects int, got {}",
                    param.name,
                    t.name()
                ))),
                Err(e) => Err(self.err(format!("argument for `{}`: {e}", param.name))),
            },
            (ParamKind::Float, Arg::Classical(e)) => match infer_type(e, vars) {
                Ok(Ty::Int | Ty::Float) => Ok(()),
                Ok(t) => Err(self.err(format!(
                    "`{callee}` parameter `{}` expects float, got {}",
                    param.name,
                    t.name()
                ))),
                Err(e) => Err(self.err(format!("argument for `{}`: {e}", param.name))),
            },
            (ParamKind::Bool, Arg::Classical(e)) => match infer_type(e, vars) {
                Ok(Ty::Bool) => Ok(()),
                Ok(t) => Err(self.err(format!(
                    "`{callee}` parameter `{}` expects bool, got {}",
                    param.name,
                    t.name()
                ))),
                Err(e) => Err(self.err(format!("argument for `{}`: {e}", param.name))),
            },
            (ParamKind::Qubits { .. }, Arg::Qubits(slice)) => {
                if !self.qarrays.contains(&slice.array) {
                    return Err(self.err(format!("`{}` is not a qubit array", slice.array)));
                }
                for (what, e) in [("start", Some(&slice.start)), ("length", slice.len.as_ref())] {
                    if let Some(e) = e {
                        match infer_type(e, vars) {
                            Ok(Ty::Int) => {}
                            Ok(t) => {
                                return Err(self.err(format!(
                                    "slice {what} has type {}, expected int",
                                    t.name()
                                )))
                            }
                            Err(e) => return Err(self.err(format!("slice {what}: {e}"))),
                        }
                    }
                }
                Ok(())
            }
            (ParamKind::Sub { sig }, Arg::Handle(h)) => {
                if let Some(have) = self.handles.get(h) {
                    if have == sig {
                        Ok(())
                    } else {
                        Err(self.err(format!(
                            "handle `{h}` signature does not match parameter `{}`",
                            param.name
                        )))
                    }
                } else if let Some(target) = self.prog.get(h) {
                    let shallow: Option<Vec<SigKind>> = target
                        .params
                        .iter()
                        .map(|p| match p.kind {
                            ParamKind::Int => Some(SigKind::Int),
                            ParamKind::Float => Some(SigKind::Float),
                            ParamKind::Bool => Some(SigKind::Bool),
                            ParamKind::Qubits { .. } => Some(SigKind::Qubits),
                            ParamKind::Sub { .. } => None,
                        })
                        .collect();
                    match shallow {
                        Some(s) if &s == sig => Ok(()),
                        _ => Err(self.err(format!(
                            "subroutine `{h}` does not match handle signature of `{}`",
                            param.name
                        ))),
                    }
                } else {
                    Err(self.err(format!("unknown handle argument `{h}`")))
                }
            }
            (_, _) => Err(self.err(format!(
                "argument kind mismatch for `{}` of `{callee}`",
                param.name
            ))),
        }
    }

    fn check_sig_arg(
        &self,
        handle: &str,
        kind: SigKind,
        arg: &Arg,
        vars: &BTreeMap<String, Ty>,
    ) -> Result<(), WfError> {
        let ok = match (kind, arg) {
            (SigKind::Int, Arg::Classical(e)) => infer_type(e, vars) == Ok(Ty::Int),
            (SigKind::Float, Arg::Classical(e)) => {
                matches!(infer_type(e, vars), Ok(Ty::Int | Ty::Float))
            }
            (SigKind::Bool, Arg::Classical(e)) => infer_type(e, vars) == Ok(Ty::Bool),
            (SigKind::Qubits, Arg::Qubits(s)) => self.qarrays.contains(&s.array),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(self.err(format!("bad argument for handle `{handle}`")))
        }
    }
}
