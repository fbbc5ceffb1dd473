//! Name resolution and type checking.

use std::collections::HashSet;

use super::ast::*;
use super::{Diagnostic, DiagnosticKind};

/// Typing context: a class and, inside routine bodies and contracts, the
/// routine whose arguments and locals are in scope.
#[derive(Clone, Copy)]
pub struct Scope<'a> {
    pub program: &'a Program,
    pub class: &'a ClassDecl,
    pub routine: Option<&'a RoutineDecl>,
}

impl<'a> Scope<'a> {
    pub fn new(program: &'a Program, id: RoutineId) -> Scope<'a> {
        let class = &program.classes[id.class];
        Scope {
            program,
            class,
            routine: Some(&class.routines[id.routine]),
        }
    }

    pub fn current_type(&self) -> Type {
        Type::Class(self.class.name.clone())
    }

    /// Type of a feature `name` applied to an object of type `target`.
    fn feature_type(&self, target: &Type, name: &str, args: &[Expr]) -> Result<Type, String> {
        let class_name = match target {
            Type::Class(c) => c,
            other => return Err(format!("type `{other}` has no feature `{name}`")),
        };
        let class = self
            .program
            .class(class_name)
            .ok_or_else(|| format!("unknown class `{class_name}`"))?;
        if let Some(attr) = class.attribute(name) {
            if !args.is_empty() {
                return Err(format!("attribute `{name}` takes no arguments"));
            }
            return Ok(attr.ty.clone());
        }
        let routine = class
            .routine(name)
            .ok_or_else(|| format!("undeclared identifier `{name}` in class `{class_name}`"))?;
        let result = routine
            .result
            .clone()
            .ok_or_else(|| format!("command `{name}` used as an expression"))?;
        self.check_args(name, &routine.args, args)?;
        Ok(result)
    }

    fn check_args(&self, name: &str, formals: &[Param], actuals: &[Expr]) -> Result<(), String> {
        if formals.len() != actuals.len() {
            return Err(format!(
                "`{name}` expects {} argument(s), got {}",
                formals.len(),
                actuals.len()
            ));
        }
        for (f, a) in formals.iter().zip(actuals) {
            let t = self.type_of(a)?;
            if !t.conforms_to(&f.ty) {
                return Err(format!(
                    "argument `{}` of `{name}` expects {}, got {t}",
                    f.name, f.ty
                ));
            }
        }
        Ok(())
    }

    pub fn type_of(&self, e: &Expr) -> Result<Type, String> {
        match e {
            Expr::Int(_) => Ok(Type::Integer),
            Expr::Bool(_) => Ok(Type::Boolean),
            Expr::Void => Ok(Type::None),
            Expr::Current => Ok(self.current_type()),
            Expr::Result => self
                .routine
                .and_then(|r| r.result.clone())
                .ok_or_else(|| "`Result` used outside a query".to_string()),
            Expr::Var(name) => self
                .routine
                .and_then(|r| r.variable_type(name).cloned())
                .ok_or_else(|| format!("undeclared identifier `{name}`")),
            Expr::Call {
                target,
                feature,
                args,
            } => {
                let t = self.type_of(target)?;
                self.feature_type(&t, feature, args)
            }
            Expr::Unary(UnOp::Not, inner) => {
                self.expect(inner, &Type::Boolean, "operand of `not`")?;
                Ok(Type::Boolean)
            }
            Expr::Unary(UnOp::Neg, inner) => {
                self.expect(inner, &Type::Integer, "operand of unary `-`")?;
                Ok(Type::Integer)
            }
            Expr::Binary(op, l, r) => {
                let lt = self.type_of(l)?;
                let rt = self.type_of(r)?;
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => {
                        both(&lt, &rt, &Type::Integer, op)?;
                        Ok(Type::Integer)
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        both(&lt, &rt, &Type::Integer, op)?;
                        Ok(Type::Boolean)
                    }
                    BinOp::And | BinOp::Or => {
                        both(&lt, &rt, &Type::Boolean, op)?;
                        Ok(Type::Boolean)
                    }
                    BinOp::Eq | BinOp::Ne => {
                        if lt.conforms_to(&rt) || rt.conforms_to(&lt) {
                            Ok(Type::Boolean)
                        } else {
                            Err(format!(
                                "cannot compare {lt} with {rt} using `{}`",
                                op.symbol()
                            ))
                        }
                    }
                }
            }
        }
    }

    fn expect(&self, e: &Expr, ty: &Type, what: &str) -> Result<(), String> {
        let t = self.type_of(e)?;
        if t.conforms_to(ty) {
            Ok(())
        } else {
            Err(format!("{what} must be {ty}, got {t}"))
        }
    }

    /// Type of an assignment target; `None` when it cannot be assigned.
    pub fn target_type(&self, target: &Target) -> Result<Type, String> {
        let routine = self.routine.ok_or("assignment outside a routine")?;
        match target {
            Target::Result => routine
                .result
                .clone()
                .ok_or_else(|| "`Result` used outside a query".to_string()),
            Target::Name(name) => {
                if routine.is_argument(name) {
                    return Err(format!("argument `{name}` is read-only"));
                }
                if let Some(t) = routine.variable_type(name) {
                    return Ok(t.clone());
                }
                self.class
                    .attribute(name)
                    .map(|a| a.ty.clone())
                    .ok_or_else(|| format!("undeclared identifier `{name}`"))
            }
        }
    }

    /// Whether `e` may appear on the left of `:=` in this scope.
    pub fn is_assignable(&self, e: &Expr) -> bool {
        match (e, self.routine) {
            (Expr::Result, Some(r)) => r.result.is_some(),
            (Expr::Var(n), Some(r)) => r.locals.iter().any(|p| &p.name == n),
            (
                Expr::Call {
                    target,
                    feature,
                    args,
                },
                _,
            ) => {
                **target == Expr::Current
                    && args.is_empty()
                    && self.class.attribute(feature).is_some()
            }
            _ => false,
        }
    }

    pub fn check_stmt(&self, stmt: &Stmt) -> Result<(), String> {
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                let tt = self.target_type(target)?;
                let vt = self.type_of(value)?;
                if vt.conforms_to(&tt) {
                    Ok(())
                } else {
                    Err(format!("cannot assign {vt} to target of type {tt}"))
                }
            }
            StmtKind::Call(e) => {
                let Expr::Call {
                    target,
                    feature,
                    args,
                } = e
                else {
                    return Err("instruction is not a call".into());
                };
                let t = self.type_of(target)?;
                let class_name = t
                    .class_name()
                    .ok_or_else(|| format!("type `{t}` has no feature `{feature}`"))?;
                let class = self
                    .program
                    .class(class_name)
                    .ok_or_else(|| format!("unknown class `{class_name}`"))?;
                let routine = class.routine(feature).ok_or_else(|| {
                    format!("undeclared identifier `{feature}` in class `{class_name}`")
                })?;
                if routine.result.is_some() {
                    return Err(format!("query `{feature}` used as an instruction"));
                }
                self.check_args(feature, &routine.args, args)
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expect(cond, &Type::Boolean, "`if` condition")?;
                then_branch
                    .iter()
                    .chain(else_branch)
                    .try_for_each(|s| self.check_stmt(s))
            }
            StmtKind::Loop { init, until, body } => {
                self.expect(until, &Type::Boolean, "`until` condition")?;
                init.iter().chain(body).try_for_each(|s| self.check_stmt(s))
            }
            StmtKind::Check(c) => self.expect(&c.expr, &Type::Boolean, "check clause"),
            StmtKind::Create {
                target,
                creator,
                args,
            } => {
                let tt = self.target_type(target)?;
                let class_name = tt
                    .class_name()
                    .ok_or_else(|| format!("cannot create an object of type {tt}"))?;
                let class = self
                    .program
                    .class(class_name)
                    .ok_or_else(|| format!("unknown class `{class_name}`"))?;
                if !class.creators.contains(creator) {
                    return Err(format!(
                        "`{creator}` is not a creation procedure of `{class_name}`"
                    ));
                }
                let routine = class
                    .routine(creator)
                    .ok_or_else(|| format!("undeclared identifier `{creator}`"))?;
                self.check_args(creator, &routine.args, args)
            }
        }
    }
}

fn both(l: &Type, r: &Type, want: &Type, op: &BinOp) -> Result<(), String> {
    if l == want && r == want {
        Ok(())
    } else {
        Err(format!(
            "operands of `{}` must be {want}, got {l} and {r}",
            op.symbol()
        ))
    }
}

fn type_exists(program: &Program, t: &Type) -> bool {
    match t {
        Type::Class(name) => program.class(name).is_some(),
        _ => true,
    }
}

/// Checks one routine; diagnostics are returned rather than raised.
pub fn check_routine(program: &Program, id: RoutineId) -> Vec<Diagnostic> {
    let scope = Scope::new(program, id);
    let class = scope.class;
    let routine = &class.routines[id.routine];
    let context = format!("{}.{}", class.name, routine.name);
    let mut out = Vec::new();
    let mut push = |kind, message: String| {
        out.push(Diagnostic {
            kind,
            context: context.clone(),
            message,
        })
    };

    let mut names = HashSet::new();
    for p in routine.args.iter().chain(&routine.locals) {
        if !names.insert(p.name.as_str()) {
            push(
                DiagnosticKind::Duplicate,
                format!("duplicate variable `{}`", p.name),
            );
        }
        if class.has_feature(&p.name) {
            push(
                DiagnosticKind::Duplicate,
                format!("variable `{}` clashes with a feature", p.name),
            );
        }
        if !type_exists(program, &p.ty) {
            push(DiagnosticKind::Type, format!("unknown type `{}`", p.ty));
        }
    }
    if let Some(t) = &routine.result {
        if !type_exists(program, t) {
            push(DiagnosticKind::Type, format!("unknown type `{t}`"));
        }
    }
    for (what, clauses) in [("require", &routine.require), ("ensure", &routine.ensure)] {
        let mut tags = HashSet::new();
        for c in clauses.iter() {
            if !tags.insert(c.tag.as_str()) {
                push(
                    DiagnosticKind::Duplicate,
                    format!("duplicate {what} tag `{}`", c.tag),
                );
            }
            match scope.type_of(&c.expr) {
                Ok(Type::Boolean) => {}
                Ok(t) => push(
                    DiagnosticKind::Type,
                    format!("{what} clause `{}` must be BOOLEAN, got {t}", c.tag),
                ),
                Err(m) => push(DiagnosticKind::Type, m),
            }
        }
    }
    for stmt in routine.body() {
        if let Err(m) = scope.check_stmt(stmt) {
            push(DiagnosticKind::Type, m);
        }
    }
    out
}

pub fn check_program(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut class_names = HashSet::new();
    for class in &program.classes {
        let mut push = |kind, message: String| {
            out.push(Diagnostic {
                kind,
                context: class.name.clone(),
                message,
            })
        };
        if matches!(class.name.as_str(), "INTEGER" | "BOOLEAN" | "NONE") {
            push(
                DiagnosticKind::Duplicate,
                format!("class name `{}` is reserved", class.name),
            );
        }
        if !class_names.insert(class.name.as_str()) {
            push(
                DiagnosticKind::Duplicate,
                format!("duplicate class `{}`", class.name),
            );
        }
        let mut features = HashSet::new();
        for name in class
            .attributes
            .iter()
            .map(|a| &a.name)
            .chain(class.routines.iter().map(|r| &r.name))
        {
            if !features.insert(name.as_str()) {
                push(
                    DiagnosticKind::Duplicate,
                    format!("duplicate feature `{name}`"),
                );
            }
        }
        for a in &class.attributes {
            if !type_exists(program, &a.ty) {
                push(DiagnosticKind::Type, format!("unknown type `{}`", a.ty));
            }
        }
        for c in &class.creators {
            match class.routine(c) {
                Some(r) if r.result.is_none() => {}
                Some(_) => push(
                    DiagnosticKind::Type,
                    format!("creation procedure `{c}` must be a command"),
                ),
                None => push(
                    DiagnosticKind::Type,
                    format!("creation procedure `{c}` does not exist"),
                ),
            }
        }
    }
    for id in program.routine_ids().collect::<Vec<_>>() {
        out.extend(check_routine(program, id));
    }
    out
}
