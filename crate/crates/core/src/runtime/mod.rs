//! Definitional interpreter with contract checking and execution traces.

mod interp;
pub mod trace;
pub mod value;

use std::fmt;

pub use interp::Machine;
pub use trace::{Frame, Snapshot, Trace, TraceMode, TraceStep};
pub use value::{Heap, Object, Value};

use interp::Interrupt;

use crate::syntax::{Location, Program, RoutineId, Type};
use crate::testgen::{Arg, Step, TestCase};

pub const DEFAULT_BUDGET: u64 = 100_000;
const EVAL_BUDGET: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseKind {
    Require,
    Ensure,
    Check,
}

/// A contract clause, named by the routine that declares it and its tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseRef {
    pub routine: RoutineId,
    pub kind: ClauseKind,
    pub tag: String,
}

impl ClauseRef {
    pub fn clause<'p>(&self, program: &'p Program) -> Option<&'p crate::syntax::Clause> {
        let r = program.routine(self.routine);
        match self.kind {
            ClauseKind::Require => r.require.iter().find(|c| c.tag == self.tag),
            ClauseKind::Ensure => r.ensure.iter().find(|c| c.tag == self.tag),
            ClauseKind::Check => r.statements().into_iter().find_map(|s| match &s.kind {
                crate::syntax::StmtKind::Check(c) if c.tag == self.tag => Some(c),
                _ => None,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Precondition,
    Postcondition,
    Check,
    VoidCall,
}

/// A contract violation. `location` is the call site for preconditions, the
/// exit location for postconditions and the statement otherwise; its routine
/// is the one under fix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    pub clause: Option<ClauseRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail(Violation),
    Invalid,
    Timeout,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail(v) => write!(f, "fail({:?} at {})", v.kind, v.location.index),
            Verdict::Invalid => f.write_str("invalid"),
            Verdict::Timeout => f.write_str("timeout"),
        }
    }
}

fn verdict_of(i: Interrupt) -> Verdict {
    match i {
        Interrupt::Violation(v) => Verdict::Fail(v),
        Interrupt::Timeout => Verdict::Timeout,
        Interrupt::Invalid | Interrupt::Undefined => Verdict::Invalid,
    }
}

/// Executes test steps one at a time against a shared heap.
#[derive(Clone)]
pub struct Driver<'p> {
    machine: Machine<'p>,
    vars: Vec<(String, Value)>,
}

impl<'p> Driver<'p> {
    pub fn new(program: &'p Program, budget: u64, mode: TraceMode) -> Driver<'p> {
        Driver {
            machine: Machine::new(program, Heap::default(), budget, mode),
            vars: Vec::new(),
        }
    }

    pub fn var(&self, name: &str) -> Option<Value> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn vars(&self) -> &[(String, Value)] {
        &self.vars
    }

    pub fn heap(&self) -> &Heap {
        &self.machine.heap
    }

    pub fn into_trace(self) -> Trace {
        self.machine.trace
    }

    fn arg_value(&self, arg: &Arg, formal: &Type) -> Option<Value> {
        let v = match arg {
            Arg::Int(n) => Value::Int(*n),
            Arg::Bool(b) => Value::Bool(*b),
            Arg::Void => Value::Void,
            Arg::Var(name) => self.var(name)?,
        };
        let ok = match (v, formal) {
            (Value::Int(_), Type::Integer) | (Value::Bool(_), Type::Boolean) => true,
            (Value::Void, Type::Class(_)) => true,
            (Value::Ref(id), Type::Class(c)) => {
                self.machine.program.classes[self.heap().get(id).class].name == *c
            }
            _ => false,
        };
        ok.then_some(v)
    }

    fn arg_values(&self, id: RoutineId, args: &[Arg]) -> Option<Vec<Value>> {
        let formals = &self.machine.program.routine(id).args;
        if formals.len() != args.len() {
            return None;
        }
        args.iter()
            .zip(formals)
            .map(|(a, f)| self.arg_value(a, &f.ty))
            .collect()
    }

    /// Runs one step. `Err` carries the verdict that ends the test.
    pub fn step(&mut self, step: &Step) -> Result<(), Verdict> {
        let program = self.machine.program;
        match step {
            Step::Create {
                var,
                class,
                creator,
                args,
            } => {
                let id = program
                    .routine_id(class, creator)
                    .ok_or(Verdict::Invalid)?;
                let values = self.arg_values(id, args).ok_or(Verdict::Invalid)?;
                let obj = self
                    .machine
                    .create(class, creator, values, None)
                    .map_err(verdict_of)?;
                match self.vars.iter_mut().find(|(n, _)| n == var) {
                    Some(slot) => slot.1 = obj,
                    None => self.vars.push((var.clone(), obj)),
                }
                Ok(())
            }
            Step::Invoke { var, routine, args } => {
                let Some(Value::Ref(obj)) = self.var(var) else {
                    return Err(Verdict::Invalid);
                };
                let ci = self.heap().get(obj).class;
                let ri = program.classes[ci]
                    .routine_index(routine)
                    .ok_or(Verdict::Invalid)?;
                let id = RoutineId {
                    class: ci,
                    routine: ri,
                };
                let values = self.arg_values(id, args).ok_or(Verdict::Invalid)?;
                self.machine
                    .call(id, Value::Ref(obj), values, None)
                    .map(|_| ())
                    .map_err(verdict_of)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub verdict: Verdict,
    pub trace: Trace,
}

/// Runs a test with full snapshots.
pub fn run_test(program: &Program, test: &TestCase, budget: u64) -> RunResult {
    run_test_with(program, test, budget, TraceMode::Full)
}

pub fn run_test_with(program: &Program, test: &TestCase, budget: u64, mode: TraceMode) -> RunResult {
    let mut driver = Driver::new(program, budget, mode);
    let mut verdict = Verdict::Pass;
    for step in &test.steps {
        if let Err(v) = driver.step(step) {
            verdict = v;
            break;
        }
    }
    RunResult {
        verdict,
        trace: driver.into_trace(),
    }
}

/// Value of `e` in the state recorded at trace step `step`; `None` when the
/// expression cannot be evaluated there. The trace is not modified.
pub fn eval_at(program: &Program, trace: &Trace, step: usize, e: &crate::syntax::Expr) -> Option<Value> {
    let snap = &trace.snapshots[trace.steps.get(step)?.snapshot?];
    eval_in(program, snap, e)
}

pub fn eval_in(program: &Program, snap: &Snapshot, e: &crate::syntax::Expr) -> Option<Value> {
    let mut m = Machine::new(program, snap.heap.clone(), EVAL_BUDGET, TraceMode::Off);
    m.eval(&snap.frame, e, None).ok()
}
