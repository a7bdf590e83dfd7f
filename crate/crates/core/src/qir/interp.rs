//! Interpreter: executes a subroutine against a dense state vector.
//!
//! Controlled calls are handled through a control context: while a
//! `Controlled` statement is active every gate reached below it picks up the
//! extra controls, classical statements run untouched, and measurement is a
//! fault. Within-apply and the inverse entry point reverse bodies
//! interpretively, so no registry entries are created during execution.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::rng::SplitRng;
use crate::simcore::{bits_to_u64, Gate, SimError, StateVector};

use super::expr::{Env, EvalError, Value};
use super::program::Program;
use super::{
    Arg, Callee, ControlSel, Expr, GateKind, GateSpec, ParamKind, QubitRef, Statement, Subroutine,
};

const MAX_CALL_DEPTH: usize = 64;

/// Argument bound to a subroutine parameter at execution time.
#[derive(Clone, Debug, PartialEq)]
pub enum ArgValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    /// Absolute qubit indices of the enclosing state.
    Qubits(Vec<usize>),
    /// Name of a registered subroutine bound to a handle parameter.
    Sub(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionResult {
    /// Values of the subroutine's declared outputs.
    pub classical_outputs: BTreeMap<String, Value>,
    /// One entry per executed measurement: (site, bits packed msb-first).
    pub measurement_log: Vec<(String, u64)>,
}

/// Runtime faults. In experiment campaigns a fault counts as a trigger.
#[derive(Clone, Debug, PartialEq)]
pub struct RuntimeFault {
    pub site: String,
    pub kind: FaultKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FaultKind {
    Eval(EvalError),
    Sim(SimError),
    IndexOut {
        array: String,
        index: i64,
        len: usize,
    },
    Divergence {
        max_iter: u32,
    },
    MeasureUnderControl,
    NotAdjointable,
    BadCall(String),
    CallDepth,
}

impl fmt::Display for RuntimeFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let site = if self.site.is_empty() { "<entry>" } else { &self.site };
        match &self.kind {
            FaultKind::Eval(e) => write!(f, "{site}: {e}"),
            FaultKind::Sim(e) => write!(f, "{site}: {e}"),
            FaultKind::IndexOut { array, index, len } => {
                write!(f, "{site}: index {index} out of bounds for `{array}` (len {len})")
            }
            FaultKind::Divergence { max_iter } => {
                write!(f, "{site}: repeat-until exceeded {max_iter} iterations")
            }
            FaultKind::MeasureUnderControl => {
                write!(f, "{site}: measurement inside a controlled context")
            }
            FaultKind::NotAdjointable => {
                write!(f, "{site}: statement cannot be inverted")
            }
            FaultKind::BadCall(m) => write!(f, "{site}: {m}"),
            FaultKind::CallDepth => write!(f, "{site}: call depth exceeded"),
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Frame {
    env: Env,
    qubits: BTreeMap<String, Vec<usize>>,
    handles: BTreeMap<String, String>,
}

struct Interp<'a> {
    prog: &'a Program,
    state: &'a mut StateVector,
    rng: &'a mut SplitRng,
    controls: Vec<(usize, bool)>,
    log: Vec<(String, u64)>,
    site: Vec<String>,
    depth: usize,
}

/// Run `sub` with `args` against `state`.
pub fn execute(
    prog: &Program,
    sub: &Subroutine,
    args: &[ArgValue],
    state: &mut StateVector,
    rng: &mut SplitRng,
) -> Result<ExecutionResult, RuntimeFault> {
    let mut it = Interp {
        prog,
        state,
        rng,
        controls: Vec::new(),
        log: Vec::new(),
        site: Vec::new(),
        depth: 0,
    };
    let mut frame = it.bind(sub, args)?;
    it.exec_body(&mut frame, &sub.body)?;
    let mut outputs = BTreeMap::new();
    for out in &sub.outputs {
        let v = frame.env.get(out).copied().ok_or_else(|| it.fault(
            FaultKind::BadCall(format!("output `{out}` never assigned")),
        ))?;
        outputs.insert(out.clone(), v);
    }
    Ok(ExecutionResult {
        classical_outputs: outputs,
        measurement_log: it.log,
    })
}

/// Run the inverse of an adjointable `sub` interpretively.
pub fn execute_inverse(
    prog: &Program,
    sub: &Subroutine,
    args: &[ArgValue],
    state: &mut StateVector,
    rng: &mut SplitRng,
) -> Result<(), RuntimeFault> {
    let mut it = Interp {
        prog,
        state,
        rng,
        controls: Vec::new(),
        log: Vec::new(),
        site: Vec::new(),
        depth: 0,
    };
    let mut frame = it.bind(sub, args)?;
    it.exec_body_inverse(&mut frame, &sub.body)
}

impl Interp<'_> {
    fn fault(&self, kind: FaultKind) -> RuntimeFault {
        RuntimeFault {
            site: self.site.join("/"),
            kind,
        }
    }

    fn eval(&self, frame: &Frame, e: &Expr) -> Result<Value, RuntimeFault> {
        e.eval(&frame.env).map_err(|err| self.fault(FaultKind::Eval(err)))
    }

    fn eval_int(&self, frame: &Frame, e: &Expr) -> Result<i64, RuntimeFault> {
        match self.eval(frame, e)? {
            Value::Int(v) => Ok(v),
            v => Err(self.fault(FaultKind::Eval(EvalError::TypeMismatch {
                op: "int context".into(),
                got: v.type_name().into(),
            }))),
        }
    }

    fn eval_bool(&self, frame: &Frame, e: &Expr) -> Result<bool, RuntimeFault> {
        match self.eval(frame, e)? {
            Value::Bool(v) => Ok(v),
            v => Err(self.fault(FaultKind::Eval(EvalError::TypeMismatch {
                op: "condition".into(),
                got: v.type_name().into(),
            }))),
        }
    }

    fn eval_angle(&self, frame: &Frame, e: &Expr) -> Result<f64, RuntimeFault> {
        match self.eval(frame, e)? {
            Value::Int(v) => Ok(v as f64),
            Value::Float(v) => Ok(v),
            v => Err(self.fault(FaultKind::Eval(EvalError::TypeMismatch {
                op: "angle".into(),
                got: v.type_name().into(),
            }))),
        }
    }

    fn bind(&mut self, sub: &Subroutine, args: &[ArgValue]) -> Result<Frame, RuntimeFault> {
        if sub.params.len() != args.len() {
            return Err(self.fault(FaultKind::BadCall(format!(
                "`{}` takes {} arguments, got {}",
                sub.name,
                sub.params.len(),
                args.len()
            ))));
        }
        let mut frame = Frame::default();
        let mut seen_qubits: Vec<usize> = Vec::new();
        for (param, arg) in sub.params.iter().zip(args) {
            match (&param.kind, arg) {
                (ParamKind::Int, ArgValue::Int(v)) => {
                    frame.env.insert(param.name.clone(), Value::Int(*v));
                }
                (ParamKind::Float, ArgValue::Float(v)) => {
                    frame.env.insert(param.name.clone(), Value::Float(*v));
                }
                (ParamKind::Float, ArgValue::Int(v)) => {
                    frame.env.insert(param.name.clone(), Value::Float(*v as f64));
                }
                (ParamKind::Bool, ArgValue::Bool(v)) => {
                    frame.env.insert(param.name.clone(), Value::Bool(*v));
                }
                (ParamKind::Qubits { .. }, ArgValue::Qubits(qs)) => {
                    for &q in qs {
                        if q >= self.state.n_qubits() {
                            return Err(self.fault(FaultKind::Sim(SimError::QubitOutOfRange {
                                qubit: q,
                                n_qubits: self.state.n_qubits(),
                            })));
                        }
                        if seen_qubits.contains(&q) {
                            return Err(self.fault(FaultKind::BadCall(format!(
                                "qubit {q} bound twice in call to `{}`",
                                sub.name
                            ))));
                        }
                        seen_qubits.push(q);
                    }
                    frame.qubits.insert(param.name.clone(), qs.clone());
                }
                (ParamKind::Sub { .. }, ArgValue::Sub(name)) => {
                    if !self.prog.contains(name) {
                        return Err(self.fault(FaultKind::BadCall(format!(
                            "handle `{name}` is not registered"
                        ))));
                    }
                    frame.handles.insert(param.name.clone(), name.clone());
                }
                _ => {
                    return Err(self.fault(FaultKind::BadCall(format!(
                        "argument for `{}` of `{}` has the wrong kind",
                        param.name, sub.name
                    ))))
                }
            }
        }
        // Declared length expressions are checked once classical parameters
        // are in scope.
        for param in &sub.params {
            if let ParamKind::Qubits { len: Some(len) } = &param.kind {
                let want = self.eval_int(&frame, len)?;
                let got = frame.qubits[&param.name].len() as i64;
                if want != got {
                    return Err(self.fault(FaultKind::BadCall(format!(
                        "`{}` expects {} qubits for `{}`, got {}",
                        sub.name, want, param.name, got
                    ))));
                }
            }
        }
        Ok(frame)
    }

    fn resolve_ref(&self, frame: &Frame, r: &QubitRef) -> Result<usize, RuntimeFault> {
        let arr = frame.qubits.get(&r.array).ok_or_else(|| {
            self.fault(FaultKind::BadCall(format!("`{}` is not bound", r.array)))
        })?;
        let idx = self.eval_int(frame, &r.index)?;
        if idx < 0 || idx as usize >= arr.len() {
            return Err(self.fault(FaultKind::IndexOut {
                array: r.array.clone(),
                index: idx,
                len: arr.len(),
            }));
        }
        Ok(arr[idx as usize])
    }

    fn resolve_controls(
        &self,
        frame: &Frame,
        controls: &[ControlSel],
    ) -> Result<Vec<(usize, bool)>, RuntimeFault> {
        let mut out = Vec::new();
        for c in controls {
            match c {
                ControlSel::Bit { r, pol } => out.push((self.resolve_ref(frame, r)?, *pol)),
                ControlSel::All { array } => {
                    let arr = frame.qubits.get(array).ok_or_else(|| {
                        self.fault(FaultKind::BadCall(format!("`{array}` is not bound")))
                    })?;
                    out.extend(arr.iter().map(|&q| (q, true)));
                }
            }
        }
        Ok(out)
    }

    fn apply_gate(
        &mut self,
        frame: &Frame,
        spec: &GateSpec,
        targets: &[QubitRef],
        invert: bool,
    ) -> Result<(), RuntimeFault> {
        let mut abs = Vec::with_capacity(targets.len());
        for t in targets {
            abs.push(self.resolve_ref(frame, t)?);
        }
        let angle = match &spec.angle {
            Some(a) => {
                let v = self.eval_angle(frame, a)?;
                Some(if invert { -v } else { v })
            }
            None => None,
        };
        let kind = if invert { spec.kind.inverse() } else { spec.kind };
        let gate = match (kind, angle) {
            (GateKind::X, _) => Gate::X,
            (GateKind::Y, _) => Gate::Y,
            (GateKind::Z, _) => Gate::Z,
            (GateKind::H, _) => Gate::H,
            (GateKind::S, _) => Gate::S,
            (GateKind::Sdg, _) => Gate::Sdg,
            (GateKind::T, _) => Gate::T,
            (GateKind::Tdg, _) => Gate::Tdg,
            (GateKind::R1, Some(t)) => Gate::R1(t),
            (GateKind::Rz, Some(t)) => Gate::Rz(t),
            (GateKind::R1 | GateKind::Rz, None) => {
                return Err(self.fault(FaultKind::BadCall("rotation without angle".into())))
            }
            (GateKind::Cnot, _) => Gate::Cnot,
            (GateKind::Swap, _) => Gate::Swap,
            (GateKind::Toffoli, _) => Gate::Toffoli,
            (GateKind::Cswap, _) => Gate::Cswap,
        };
        let (ctl, pol): (Vec<usize>, Vec<bool>) = self.controls.iter().copied().unzip();
        self.state
            .apply_controlled(&gate, &ctl, &pol, &abs)
            .map_err(|e| self.fault(FaultKind::Sim(e)))
    }

    fn exec_body(&mut self, frame: &mut Frame, body: &[Statement]) -> Result<(), RuntimeFault> {
        for (i, stmt) in body.iter().enumerate() {
            self.site.push(i.to_string());
            let r = self.exec_stmt(frame, stmt);
            self.site.pop();
            r?;
        }
        Ok(())
    }

    fn exec_stmt(&mut self, frame: &mut Frame, stmt: &Statement) -> Result<(), RuntimeFault> {
        match stmt {
            Statement::Gate { gate, targets } => self.apply_gate(frame, gate, targets, false),
            Statement::Controlled { controls, inner } => {
                let extra = self.resolve_controls(frame, controls)?;
                let n = extra.len();
                self.controls.extend(extra);
                self.site.push("ctl".into());
                let r = self.exec_stmt(frame, inner);
                self.site.pop();
                self.controls.truncate(self.controls.len() - n);
                r
            }
            Statement::Call { callee, args, into } => self.exec_call(frame, callee, args, into, false),
            Statement::MeasureInto { var, qubits } => {
                if !self.controls.is_empty() {
                    return Err(self.fault(FaultKind::MeasureUnderControl));
                }
                let mut abs = Vec::with_capacity(qubits.len());
                for q in qubits {
                    abs.push(self.resolve_ref(frame, q)?);
                }
                let bits = self
                    .state
                    .measure(&abs, self.rng)
                    .map_err(|e| self.fault(FaultKind::Sim(e)))?;
                let packed = bits_to_u64(&bits);
                frame.env.insert(var.clone(), Value::Int(packed as i64));
                let site = self.site.join("/");
                self.log.push((site, packed));
                Ok(())
            }
            Statement::If {
                cond,
                then_body,
                else_body,
            } => {
                if self.eval_bool(frame, cond)? {
                    self.site.push("then".into());
                    let r = self.exec_body(frame, then_body);
                    self.site.pop();
                    r
                } else {
                    self.site.push("else".into());
                    let r = self.exec_body(frame, else_body);
                    self.site.pop();
                    r
                }
            }
            Statement::For {
                var,
                lo,
                hi,
                rev,
                body,
            } => {
                let lo = self.eval_int(frame, lo)?;
                let hi = self.eval_int(frame, hi)?;
                let saved = frame.env.get(var).copied();
                let mut run = |it: &mut Self, i: i64| -> Result<(), RuntimeFault> {
                    frame.env.insert(var.clone(), Value::Int(i));
                    it.site.push("for".into());
                    let r = it.exec_body(frame, body);
                    it.site.pop();
                    r
                };
                if *rev {
                    let mut i = hi - 1;
                    while i >= lo {
                        run(self, i)?;
                        i -= 1;
                    }
                } else {
                    let mut i = lo;
                    while i < hi {
                        run(self, i)?;
                        i += 1;
                    }
                }
                match saved {
                    Some(v) => frame.env.insert(var.clone(), v),
                    None => frame.env.remove(var),
                };
                Ok(())
            }
            Statement::RepeatUntil {
                body,
                until,
                max_iter,
            } => {
                for _ in 0..*max_iter {
                    self.site.push("rus".into());
                    let r = self.exec_body(frame, body);
                    self.site.pop();
                    r?;
                    if self.eval_bool(frame, until)? {
                        return Ok(());
                    }
                }
                Err(self.fault(FaultKind::Divergence {
                    max_iter: *max_iter,
                }))
            }
            Statement::WithinApply { outer, inner } => {
                self.site.push("u".into());
                let r = self.exec_body(frame, outer);
                self.site.pop();
                r?;
                self.site.push("v".into());
                let r = self.exec_body(frame, inner);
                self.site.pop();
                r?;
                self.site.push("u-inv".into());
                let r = self.exec_body_inverse(frame, outer);
                self.site.pop();
                r
            }
            Statement::Assign { var, expr } => {
                let v = self.eval(frame, expr)?;
                frame.env.insert(var.clone(), v);
                Ok(())
            }
        }
    }

    fn exec_call(
        &mut self,
        frame: &mut Frame,
        callee: &Callee,
        args: &[Arg],
        into: &[String],
        invert: bool,
    ) -> Result<(), RuntimeFault> {
        if self.depth >= MAX_CALL_DEPTH {
            return Err(self.fault(FaultKind::CallDepth));
        }
        let name = match callee {
            Callee::Named(n) => n.clone(),
            Callee::Handle(h) => frame
                .handles
                .get(h)
                .cloned()
                .ok_or_else(|| self.fault(FaultKind::BadCall(format!("handle `{h}` unbound"))))?,
        };
        let target = self
            .prog
            .get(&name)
            .ok_or_else(|| self.fault(FaultKind::BadCall(format!("unknown subroutine `{name}`"))))?;

        let mut vals = Vec::with_capacity(args.len());
        for arg in args {
            vals.push(match arg {
                Arg::Classical(e) => match self.eval(frame, e)? {
                    Value::Int(v) => ArgValue::Int(v),
                    Value::Float(v) => ArgValue::Float(v),
                    Value::Bool(v) => ArgValue::Bool(v),
                },
                Arg::Qubits(slice) => {
                    let arr = frame.qubits.get(&slice.array).ok_or_else(|| {
                        self.fault(FaultKind::BadCall(format!("`{}` is not bound", slice.array)))
                    })?;
                    let start = self.eval_int(frame, &slice.start)?;
                    let len = match &slice.len {
                        Some(l) => self.eval_int(frame, l)?,
                        None => arr.len() as i64 - start,
                    };
                    if start < 0 || len < 0 || start + len > arr.len() as i64 {
                        return Err(self.fault(FaultKind::IndexOut {
                            array: slice.array.clone(),
                            index: start + len - 1,
                            len: arr.len(),
                        }));
                    }
                    ArgValue::Qubits(arr[start as usize..(start + len) as usize].to_vec())
                }
                Arg::Handle(h) => {
                    if let Some(bound) = frame.handles.get(h) {
                        ArgValue::Sub(bound.clone())
                    } else if self.prog.contains(h) {
                        ArgValue::Sub(h.clone())
                    } else {
                        return Err(self.fault(FaultKind::BadCall(format!(
                            "`{h}` names neither a handle nor a subroutine"
                        ))));
                    }
                }
            });
        }

        self.depth += 1;
        self.site.push(format!("call:{name}"));
        let result = (|| {
            let mut child = self.bind(target, &vals)?;
            if invert {
                self.exec_body_inverse(&mut child, &target.body)?;
            } else {
                self.exec_body(&mut child, &target.body)?;
            }
            Ok(child)
        })();
        self.site.pop();
        self.depth -= 1;
        let child = result?;

        if !into.is_empty() {
            for (local, remote) in into.iter().zip(&target.outputs) {
                let v = child.env.get(remote).copied().ok_or_else(|| {
                    self.fault(FaultKind::BadCall(format!(
                        "`{name}` did not produce output `{remote}`"
                    )))
                })?;
                frame.env.insert(local.clone(), v);
            }
        }
        Ok(())
    }

    /// Execute the inverse of a body: classical assignments replay in their
    /// original order, every other statement runs inverted in reverse
    /// order. Sound for bodies accepted by the adjointability check.
    fn exec_body_inverse(
        &mut self,
        frame: &mut Frame,
        body: &[Statement],
    ) -> Result<(), RuntimeFault> {
        for (i, stmt) in body.iter().enumerate() {
            if let Statement::Assign { .. } = stmt {
                self.site.push(i.to_string());
                let r = self.exec_stmt(frame, stmt);
                self.site.pop();
                r?;
            }
        }
        for (i, stmt) in body.iter().enumerate().rev() {
            if matches!(stmt, Statement::Assign { .. }) {
                continue;
            }
            self.site.push(format!("{i}~"));
            let r = self.exec_stmt_inverse(frame, stmt);
            self.site.pop();
            r?;
        }
        Ok(())
    }

    fn exec_stmt_inverse(
        &mut self,
        frame: &mut Frame,
        stmt: &Statement,
    ) -> Result<(), RuntimeFault> {
        match stmt {
            Statement::Gate { gate, targets } => self.apply_gate(frame, gate, targets, true),
            Statement::Controlled { controls, inner } => {
                let extra = self.resolve_controls(frame, controls)?;
                let n = extra.len();
                self.controls.extend(extra);
                let r = self.exec_stmt_inverse(frame, inner);
                self.controls.truncate(self.controls.len() - n);
                r
            }
            Statement::Call { callee, args, into } => {
                self.exec_call(frame, callee, args, into, true)
            }
            Statement::If {
                cond,
                then_body,
                else_body,
            } => {
                if self.eval_bool(frame, cond)? {
                    self.exec_body_inverse(frame, then_body)
                } else {
                    self.exec_body_inverse(frame, else_body)
                }
            }
            Statement::For {
                var,
                lo,
                hi,
                rev,
                body,
            } => {
                let lo_v = self.eval_int(frame, lo)?;
                let hi_v = self.eval_int(frame, hi)?;
                let saved = frame.env.get(var).copied();
                let mut run = |it: &mut Self, i: i64| -> Result<(), RuntimeFault> {
                    frame.env.insert(var.clone(), Value::Int(i));
                    it.exec_body_inverse(frame, body)
                };
                if *rev {
                    let mut i = lo_v;
                    while i < hi_v {
                        run(self, i)?;
                        i += 1;
                    }
                } else {
                    let mut i = hi_v - 1;
                    while i >= lo_v {
                        run(self, i)?;
                        i -= 1;
                    }
                }
                match saved {
                    Some(v) => frame.env.insert(var.clone(), v),
                    None => frame.env.remove(var),
                };
                Ok(())
            }
            Statement::WithinApply { outer, inner } => {
                self.exec_body(frame, outer)?;
                self.exec_body_inverse(frame, inner)?;
                self.exec_body_inverse(frame, outer)
            }
            Statement::Assign { .. } => Ok(()),
            Statement::MeasureInto { .. } | Statement::RepeatUntil { .. } => {
                Err(self.fault(FaultKind::NotAdjointable))
            }
        }
    }
}
