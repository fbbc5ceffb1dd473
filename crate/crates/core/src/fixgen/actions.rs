use indexmap::IndexSet;

use crate::syntax::subexpr::{eprox, largest, sub, sub_of_location, sub_with_current};
use crate::syntax::typeck::Scope;
use crate::syntax::*;

/// Command instantiations kept per command when its arguments can be drawn
/// from several expressions.
pub const MAX_CALLS_PER_COMMAND: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    /// `e := d`
    Assignment,
    /// `e.c(...)`
    CommandCall,
    /// The instruction at ℓ with one sub-expression replaced.
    Replacement,
}

impl ActionKind {
    pub fn is_modification(self) -> bool {
        self != ActionKind::Replacement
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Assignment => "assignment",
            ActionKind::CommandCall => "command-call",
            ActionKind::Replacement => "replacement",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixAction {
    pub kind: ActionKind,
    pub snippet: Stmt,
}

impl FixAction {
    pub fn text(&self) -> String {
        stmt_to_inline(&self.snippet)
    }
}

/// Where actions are built: the routine under fix, the location and the
/// violated clause.
#[derive(Clone, Copy)]
pub struct FixContext<'a> {
    pub program: &'a Program,
    pub routine: RoutineId,
    pub location: u32,
    pub clause: &'a Expr,
}

impl<'a> FixContext<'a> {
    pub fn scope(&self) -> Scope<'a> {
        Scope::new(self.program, self.routine)
    }

    pub fn decl(&self) -> &'a RoutineDecl {
        self.program.routine(self.routine)
    }

    /// The statement at the location; `None` at the exit location.
    pub fn stmt(&self) -> Option<&'a Stmt> {
        self.decl().stmt_at(self.location)
    }
}

/// Off-by-one, constant and negation variants of `e`.
pub fn derive_expressions(e: &Expr, ty: &Type) -> Vec<Expr> {
    match ty {
        Type::Boolean => vec![Expr::Bool(true), Expr::Bool(false), Expr::not(e.clone())],
        Type::Integer => vec![
            Expr::Int(0),
            Expr::Int(1),
            Expr::Int(-1),
            Expr::binary(BinOp::Add, e.clone(), Expr::Int(1)),
            Expr::binary(BinOp::Sub, e.clone(), Expr::Int(1)),
        ],
        _ => Vec::new(),
    }
}

fn is_modifiable(scope: &Scope, e: &Expr) -> bool {
    match scope.type_of(e) {
        Ok(t) if t.is_reference() => true,
        Ok(Type::Integer | Type::Boolean) => scope.is_assignable(e),
        _ => false,
    }
}

/// Largest sub-expressions of `p` that some action can modify.
pub fn target_expressions(ctx: &FixContext, p: &Expr) -> Vec<Expr> {
    let scope = ctx.scope();
    let modifiable: Vec<Expr> = sub_with_current(p)
        .into_iter()
        .filter(|e| !e.is_constant() && is_modifiable(&scope, e))
        .collect();
    largest(&modifiable, true)
}

fn as_target(e: &Expr) -> Option<Target> {
    match e {
        Expr::Result => Some(Target::Result),
        Expr::Var(n) => Some(Target::Name(n.clone())),
        Expr::Call {
            target,
            feature,
            args,
        } if **target == Expr::Current && args.is_empty() => Some(Target::Name(feature.clone())),
        _ => None,
    }
}

/// Expressions that may be passed for a formal of type `ty`.
fn argument_choices(ctx: &FixContext, ty: &Type) -> Vec<Expr> {
    let decl = ctx.decl();
    let mut out: IndexSet<Expr> = decl
        .args
        .iter()
        .chain(&decl.locals)
        .filter(|p| p.ty.conforms_to(ty))
        .map(|p| Expr::var(&p.name))
        .collect();
    if decl.result.as_ref().is_some_and(|r| r.conforms_to(ty)) {
        out.insert(Expr::Result);
    }
    match ty {
        Type::Integer => out.extend([Expr::Int(0), Expr::Int(1), Expr::Int(-1)]),
        Type::Boolean => out.extend([Expr::Bool(true), Expr::Bool(false)]),
        Type::Class(_) => {
            out.insert(Expr::Void);
        }
        Type::None => {}
    }
    out.into_iter().collect()
}

fn command_calls(ctx: &FixContext, target: &Expr, class: &ClassDecl) -> Vec<Expr> {
    let class_index = ctx.program.class_index(&class.name);
    let mut out = Vec::new();
    for (ri, cmd) in class.routines.iter().enumerate() {
        if cmd.result.is_some() {
            continue;
        }
        let id = RoutineId {
            class: class_index.unwrap_or(usize::MAX),
            routine: ri,
        };
        if id == ctx.routine {
            continue;
        }
        let choices: Vec<Vec<Expr>> = cmd
            .args
            .iter()
            .map(|f| argument_choices(ctx, &f.ty))
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut calls: Vec<Expr> = Vec::new();
        let mut args = Vec::new();
        product(&choices, &mut args, &mut |a| {
            calls.push(Expr::call(target.clone(), &cmd.name, a.to_vec()))
        });
        if calls.len() > MAX_CALLS_PER_COMMAND {
            let mut ranked: Vec<(usize, Expr)> = calls.into_iter().enumerate().collect();
            ranked.sort_by_key(|(i, c)| (std::cmp::Reverse(eprox(c, ctx.clause)), *i));
            ranked.truncate(MAX_CALLS_PER_COMMAND);
            ranked.sort_by_key(|(i, _)| *i);
            calls = ranked.into_iter().map(|(_, c)| c).collect();
        }
        out.extend(calls);
    }
    out
}

fn product(choices: &[Vec<Expr>], acc: &mut Vec<Expr>, f: &mut impl FnMut(&[Expr])) {
    match choices.split_first() {
        None => f(acc),
        Some((first, rest)) => {
            for c in first {
                acc.push(c.clone());
                product(rest, acc, f);
                acc.pop();
            }
        }
    }
}

/// Assignments of derived values to integer and boolean targets, and
/// command calls on reference targets.
pub fn expression_modifications(ctx: &FixContext, p: &Expr) -> Vec<FixAction> {
    let scope = ctx.scope();
    let mut out = Vec::new();
    for e in target_expressions(ctx, p) {
        let Ok(ty) = scope.type_of(&e) else {
            continue;
        };
        match &ty {
            Type::Integer | Type::Boolean => {
                let Some(target) = as_target(&e) else {
                    continue;
                };
                for d in derive_expressions(&e, &ty) {
                    out.push(FixAction {
                        kind: ActionKind::Assignment,
                        snippet: Stmt::new(StmtKind::Assign {
                            target: target.clone(),
                            value: d,
                        }),
                    });
                }
            }
            Type::Class(name) => {
                let Some(class) = ctx.program.class(name) else {
                    continue;
                };
                for call in command_calls(ctx, &e, class) {
                    out.push(FixAction {
                        kind: ActionKind::CommandCall,
                        snippet: Stmt::new(StmtKind::Call(call)),
                    });
                }
            }
            Type::None => {}
        }
    }
    out
}

/// `stmt` with `from` replaced by `to` in the part its location labels.
pub fn replace_in_location(stmt: &Stmt, from: &Expr, to: &Expr) -> Stmt {
    let mut out = stmt.clone();
    match &mut out.kind {
        StmtKind::If { cond: e, .. } | StmtKind::Loop { until: e, .. } => *e = e.replace(from, to),
        StmtKind::Assign { value, .. } => *value = value.replace(from, to),
        StmtKind::Call(Expr::Call { args, .. }) | StmtKind::Create { args, .. } => {
            for a in args.iter_mut() {
                *a = a.replace(from, to);
            }
        }
        StmtKind::Call(_) | StmtKind::Check(_) => {}
    }
    out
}

/// Sub-expressions of `p` that are largest among those of the same type,
/// for integer and boolean types.
fn largest_per_type(scope: &Scope, p: &Expr) -> Vec<(Expr, Type)> {
    let typed: Vec<(Expr, Type)> = sub(p)
        .into_iter()
        .filter(|e| !e.is_constant())
        .filter_map(|e| scope.type_of(&e).ok().map(|t| (e, t)))
        .collect();
    let mut out = Vec::new();
    for ty in [Type::Boolean, Type::Integer] {
        let of_type: Vec<Expr> = typed
            .iter()
            .filter(|(_, t)| *t == ty)
            .map(|(e, _)| e.clone())
            .collect();
        out.extend(largest(&of_type, false).into_iter().map(|e| (e, ty.clone())));
    }
    out
}

/// The instruction at the location with a largest integer or boolean
/// sub-expression of `p` replaced by each of its derived expressions.
pub fn expression_replacements(ctx: &FixContext, p: &Expr) -> Vec<FixAction> {
    let Some(stmt) = ctx.stmt() else {
        return Vec::new();
    };
    let at_location = sub_of_location(stmt);
    let scope = ctx.scope();
    let mut out = Vec::new();
    for (e, ty) in largest_per_type(&scope, p) {
        if !at_location.contains(&e) {
            continue;
        }
        for d in derive_expressions(&e, &ty) {
            out.push(FixAction {
                kind: ActionKind::Replacement,
                snippet: replace_in_location(stmt, &e, &d),
            });
        }
    }
    out
}
