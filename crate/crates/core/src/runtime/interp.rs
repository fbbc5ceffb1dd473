use crate::syntax::*;

use super::trace::{Frame, Snapshot, Trace, TraceMode, TraceStep};
use super::value::{Heap, Value};
use super::{ClauseKind, ClauseRef, Violation, ViolationKind};

const MAX_DEPTH: usize = 100;

/// Why an evaluation stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Interrupt {
    Violation(Violation),
    /// A precondition of a routine called directly by the test driver.
    Invalid,
    Timeout,
    /// Unknown name, type mismatch or an unsupported operation.
    Undefined,
}

type Flow<T> = Result<T, Interrupt>;

/// Executes statements and evaluates expressions over a heap.
#[derive(Clone)]
pub struct Machine<'p> {
    pub(crate) program: &'p Program,
    pub(crate) heap: Heap,
    steps: u64,
    budget: u64,
    depth: usize,
    mode: TraceMode,
    pub(crate) trace: Trace,
}

impl<'p> Machine<'p> {
    pub fn new(program: &'p Program, heap: Heap, budget: u64, mode: TraceMode) -> Machine<'p> {
        Machine {
            program,
            heap,
            steps: 0,
            budget,
            depth: 0,
            mode,
            trace: Trace::default(),
        }
    }

    fn tick(&mut self) -> Flow<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(Interrupt::Timeout)
        } else {
            Ok(())
        }
    }

    fn record(&mut self, frame: &Frame, index: u32) {
        let location = Location {
            routine: frame.routine,
            index,
        };
        let snapshot = match self.mode {
            TraceMode::Off => return,
            TraceMode::Locations => None,
            TraceMode::Full => Some(()),
            TraceMode::Routine(r) => (r == frame.routine).then_some(()),
        }
        .map(|_| {
            self.trace.snapshots.push(Snapshot {
                heap: self.heap.clone(),
                frame: frame.clone(),
            });
            self.trace.snapshots.len() - 1
        });
        self.trace.steps.push(TraceStep { location, snapshot });
    }

    /// Calls routine `id` on `current`. `site` is the caller's location, or
    /// `None` for a call made by the test driver.
    pub(crate) fn call(
        &mut self,
        id: RoutineId,
        current: Value,
        args: Vec<Value>,
        site: Option<Location>,
    ) -> Flow<Option<Value>> {
        if self.depth >= MAX_DEPTH {
            return Err(Interrupt::Timeout);
        }
        self.depth += 1;
        let out = self.call_inner(id, current, args, site);
        self.depth -= 1;
        out
    }

    fn call_inner(
        &mut self,
        id: RoutineId,
        current: Value,
        args: Vec<Value>,
        site: Option<Location>,
    ) -> Flow<Option<Value>> {
        self.tick()?;
        if self.mode != TraceMode::Off {
            self.trace.entered.insert(id);
        }
        let program = self.program;
        let routine = program.routine(id);
        let mut frame = Frame {
            routine: id,
            current,
            args,
            locals: routine
                .locals
                .iter()
                .map(|p| Value::default_for(&p.ty))
                .collect(),
            result: routine.result.as_ref().map(Value::default_for),
        };
        for clause in &routine.require {
            if !self.eval_bool(&frame, &clause.expr, site)? {
                return Err(match site {
                    Some(location) => Interrupt::Violation(Violation {
                        kind: ViolationKind::Precondition,
                        location,
                        clause: Some(ClauseRef {
                            routine: id,
                            kind: ClauseKind::Require,
                            tag: clause.tag.clone(),
                        }),
                    }),
                    None => Interrupt::Invalid,
                });
            }
        }
        self.exec_block(&mut frame, routine.body())?;
        if !routine.ensure.is_empty() {
            let exit = routine.exit_location();
            self.record(&frame, exit);
            let location = Location {
                routine: id,
                index: exit,
            };
            for clause in &routine.ensure {
                if !self.eval_bool(&frame, &clause.expr, Some(location))? {
                    return Err(Interrupt::Violation(Violation {
                        kind: ViolationKind::Postcondition,
                        location,
                        clause: Some(ClauseRef {
                            routine: id,
                            kind: ClauseKind::Ensure,
                            tag: clause.tag.clone(),
                        }),
                    }));
                }
            }
        }
        Ok(frame.result)
    }

    fn exec_block(&mut self, frame: &mut Frame, block: &[Stmt]) -> Flow<()> {
        for stmt in block {
            self.exec(frame, stmt)?;
        }
        Ok(())
    }

    fn exec(&mut self, frame: &mut Frame, stmt: &Stmt) -> Flow<()> {
        let site = Some(Location {
            routine: frame.routine,
            index: stmt.loc,
        });
        if let StmtKind::Loop { init, until, body } = &stmt.kind {
            self.exec_block(frame, init)?;
            loop {
                self.record(frame, stmt.loc);
                self.tick()?;
                if self.eval_bool(frame, until, site)? {
                    return Ok(());
                }
                self.exec_block(frame, body)?;
            }
        }
        self.record(frame, stmt.loc);
        self.tick()?;
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                let v = self.eval(frame, value, site)?;
                self.assign(frame, target, v)
            }
            StmtKind::Call(e) => self.eval_call(frame, e, site).map(|_| ()),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval_bool(frame, cond, site)? {
                    self.exec_block(frame, then_branch)
                } else {
                    self.exec_block(frame, else_branch)
                }
            }
            StmtKind::Check(clause) => {
                if self.eval_bool(frame, &clause.expr, site)? {
                    Ok(())
                } else {
                    Err(Interrupt::Violation(Violation {
                        kind: ViolationKind::Check,
                        location: site.unwrap(),
                        clause: Some(ClauseRef {
                            routine: frame.routine,
                            kind: ClauseKind::Check,
                            tag: clause.tag.clone(),
                        }),
                    }))
                }
            }
            StmtKind::Create {
                target,
                creator,
                args,
            } => {
                let class_name = self
                    .target_type(frame, target)
                    .and_then(|t| t.class_name().map(str::to_string))
                    .ok_or(Interrupt::Undefined)?;
                let args = self.eval_args(frame, args, site)?;
                let obj = self.create(&class_name, creator, args, site)?;
                self.assign(frame, target, obj)
            }
            StmtKind::Loop { .. } => unreachable!(),
        }
    }

    /// Allocates an object of `class` and runs `creator` on it.
    pub(crate) fn create(
        &mut self,
        class: &str,
        creator: &str,
        args: Vec<Value>,
        site: Option<Location>,
    ) -> Flow<Value> {
        let program = self.program;
        let ci = program.class_index(class).ok_or(Interrupt::Undefined)?;
        let decl = &program.classes[ci];
        if !decl.creators.iter().any(|c| c == creator) {
            return Err(Interrupt::Undefined);
        }
        let ri = decl.routine_index(creator).ok_or(Interrupt::Undefined)?;
        let obj = self.heap.alloc(ci, decl);
        self.call(
            RoutineId {
                class: ci,
                routine: ri,
            },
            obj,
            args,
            site,
        )?;
        Ok(obj)
    }

    fn target_type(&self, frame: &Frame, target: &Target) -> Option<Type> {
        let routine = self.program.routine(frame.routine);
        match target {
            Target::Result => routine.result.clone(),
            Target::Name(n) => routine.variable_type(n).cloned().or_else(|| {
                self.program.classes[frame.routine.class]
                    .attribute(n)
                    .map(|a| a.ty.clone())
            }),
        }
    }

    fn assign(&mut self, frame: &mut Frame, target: &Target, v: Value) -> Flow<()> {
        match target {
            Target::Result => {
                let slot = frame.result.as_mut().ok_or(Interrupt::Undefined)?;
                *slot = v;
                Ok(())
            }
            Target::Name(n) => {
                let routine = self.program.routine(frame.routine);
                if let Some(i) = routine.locals.iter().position(|p| &p.name == n) {
                    frame.locals[i] = v;
                    return Ok(());
                }
                let Value::Ref(id) = frame.current else {
                    return Err(Interrupt::Undefined);
                };
                let fi = self.program.classes[self.heap.get(id).class]
                    .attribute_index(n)
                    .ok_or(Interrupt::Undefined)?;
                self.heap.set_field(id, fi, v);
                Ok(())
            }
        }
    }

    fn eval_args(&mut self, frame: &Frame, args: &[Expr], site: Option<Location>) -> Flow<Vec<Value>> {
        args.iter().map(|a| self.eval(frame, a, site)).collect()
    }

    pub(crate) fn eval_bool(&mut self, frame: &Frame, e: &Expr, site: Option<Location>) -> Flow<bool> {
        self.eval(frame, e, site)?.as_bool().ok_or(Interrupt::Undefined)
    }

    fn eval_int(&mut self, frame: &Frame, e: &Expr, site: Option<Location>) -> Flow<i64> {
        self.eval(frame, e, site)?.as_int().ok_or(Interrupt::Undefined)
    }

    pub(crate) fn eval(&mut self, frame: &Frame, e: &Expr, site: Option<Location>) -> Flow<Value> {
        match e {
            Expr::Int(n) => Ok(Value::Int(*n)),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Void => Ok(Value::Void),
            Expr::Current => Ok(frame.current),
            Expr::Result => frame.result.ok_or(Interrupt::Undefined),
            Expr::Var(name) => {
                let routine = self.program.routine(frame.routine);
                if let Some(i) = routine.args.iter().position(|p| &p.name == name) {
                    return frame.args.get(i).copied().ok_or(Interrupt::Undefined);
                }
                routine
                    .locals
                    .iter()
                    .position(|p| &p.name == name)
                    .and_then(|i| frame.locals.get(i).copied())
                    .ok_or(Interrupt::Undefined)
            }
            Expr::Call { .. } => self.eval_call(frame, e, site)?.ok_or(Interrupt::Undefined),
            Expr::Unary(UnOp::Not, inner) => Ok(Value::Bool(!self.eval_bool(frame, inner, site)?)),
            Expr::Unary(UnOp::Neg, inner) => {
                Ok(Value::Int(self.eval_int(frame, inner, site)?.wrapping_neg()))
            }
            Expr::Binary(op, l, r) => match op {
                BinOp::And => Ok(Value::Bool(
                    self.eval_bool(frame, l, site)? && self.eval_bool(frame, r, site)?,
                )),
                BinOp::Or => Ok(Value::Bool(
                    self.eval_bool(frame, l, site)? || self.eval_bool(frame, r, site)?,
                )),
                BinOp::Eq | BinOp::Ne => {
                    let a = self.eval(frame, l, site)?;
                    let b = self.eval(frame, r, site)?;
                    Ok(Value::Bool((a == b) == (*op == BinOp::Eq)))
                }
                _ => {
                    let a = self.eval_int(frame, l, site)?;
                    let b = self.eval_int(frame, r, site)?;
                    Ok(match op {
                        BinOp::Add => Value::Int(a.wrapping_add(b)),
                        BinOp::Sub => Value::Int(a.wrapping_sub(b)),
                        BinOp::Mul => Value::Int(a.wrapping_mul(b)),
                        BinOp::Lt => Value::Bool(a < b),
                        BinOp::Le => Value::Bool(a <= b),
                        BinOp::Gt => Value::Bool(a > b),
                        BinOp::Ge => Value::Bool(a >= b),
                        _ => unreachable!(),
                    })
                }
            },
        }
    }

    /// Attribute read, query call or command call.
    fn eval_call(&mut self, frame: &Frame, e: &Expr, site: Option<Location>) -> Flow<Option<Value>> {
        let Expr::Call {
            target,
            feature,
            args,
        } = e
        else {
            return Err(Interrupt::Undefined);
        };
        let t = self.eval(frame, target, site)?;
        let id = match t {
            Value::Ref(id) => id,
            Value::Void => {
                return Err(match site {
                    Some(location) => Interrupt::Violation(Violation {
                        kind: ViolationKind::VoidCall,
                        location,
                        clause: None,
                    }),
                    None => Interrupt::Invalid,
                })
            }
            _ => return Err(Interrupt::Undefined),
        };
        let ci = self.heap.get(id).class;
        let class = &self.program.classes[ci];
        if let Some(fi) = class.attribute_index(feature) {
            if !args.is_empty() {
                return Err(Interrupt::Undefined);
            }
            return Ok(Some(self.heap.field(id, fi)));
        }
        let ri = class.routine_index(feature).ok_or(Interrupt::Undefined)?;
        if class.routines[ri].args.len() != args.len() {
            return Err(Interrupt::Undefined);
        }
        let values = self.eval_args(frame, args, site)?;
        self.call(
            RoutineId {
                class: ci,
                routine: ri,
            },
            t,
            values,
            site,
        )
    }
}
