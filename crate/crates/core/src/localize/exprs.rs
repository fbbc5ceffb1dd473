use indexmap::IndexMap;

use crate::runtime::{ClauseKind, ClauseRef};
use crate::syntax::subexpr::{eprox, sub};
use crate::syntax::typeck::Scope;
use crate::syntax::*;

pub const MAX_EXPRESSIONS: usize = 200;

/// Expressions harvested for a routine and a violated clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpressionSet {
    pub routine: RoutineId,
    /// The clause, in the routine's own context.
    pub clause: Expr,
    pub base: IndexMap<Expr, Type>,
    pub unfolded: IndexMap<Expr, Type>,
}

/// Expressions a statement reads or writes at its own location. Command
/// call nodes themselves are not expressions.
pub fn statement_roots(routine: &RoutineDecl, stmt: &Stmt) -> Vec<Expr> {
    match &stmt.kind {
        StmtKind::Assign { target, value } => vec![target.as_expr(&routine.locals), value.clone()],
        StmtKind::Call(Expr::Call { target, args, .. }) => {
            let mut out: Vec<Expr> = args.clone();
            if **target != Expr::Current {
                out.insert(0, (**target).clone());
            }
            out
        }
        StmtKind::Call(e) => vec![e.clone()],
        StmtKind::If { cond, .. } => vec![cond.clone()],
        StmtKind::Loop { until, .. } => vec![until.clone()],
        StmtKind::Check(c) => vec![c.expr.clone()],
        StmtKind::Create { target, args, .. } => {
            let mut out = vec![target.as_expr(&routine.locals)];
            out.extend(args.iter().cloned());
            out
        }
    }
}

/// The violated clause seen from the routine under fix. A precondition is
/// rewritten at the call site: `Current` becomes the call target and the
/// callee's formals become the actual arguments.
pub fn rebase_clause(program: &Program, location: Location, clause: &ClauseRef) -> Option<Expr> {
    let decl = clause.clause(program)?;
    if clause.kind != ClauseKind::Require {
        return Some(decl.expr.clone());
    }
    let callee = program.routine(clause.routine);
    let callee_class = &program.classes[clause.routine.class].name;
    let caller = program.routine(location.routine);
    let scope = Scope::new(program, location.routine);
    let stmt = caller.stmt_at(location.index)?;

    let bind = |target: Expr, args: &[Expr]| {
        let vars: Vec<(String, Expr)> = callee
            .args
            .iter()
            .map(|p| p.name.clone())
            .zip(args.iter().cloned())
            .collect();
        decl.expr.substitute(&target, &vars)
    };

    if let StmtKind::Create {
        target,
        creator,
        args,
    } = &stmt.kind
    {
        let t = target.as_expr(&caller.locals);
        let class_matches = scope
            .type_of(&t)
            .ok()
            .and_then(|ty| ty.class_name().map(|c| c == callee_class))
            .unwrap_or(false);
        if creator == &callee.name && class_matches {
            return Some(bind(t, args));
        }
    }
    let mut roots = statement_roots(caller, stmt);
    if let StmtKind::Call(e) = &stmt.kind {
        roots.insert(0, e.clone());
    }
    for root in &roots {
        let mut found = None;
        root.walk(&mut |e| {
            if found.is_some() {
                return;
            }
            if let Expr::Call {
                target,
                feature,
                args,
            } = e
            {
                let on_callee = scope
                    .type_of(target)
                    .ok()
                    .and_then(|ty| ty.class_name().map(|c| c == callee_class))
                    .unwrap_or(false);
                if feature == &callee.name && on_callee {
                    found = Some(bind((**target).clone(), args));
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    Some(decl.expr.clone())
}

fn add(scope: &Scope, root: &Expr, out: &mut IndexMap<Expr, Type>) {
    for e in sub(root) {
        if e.is_constant() || e == Expr::Current || out.contains_key(&e) {
            continue;
        }
        if let Ok(ty) = scope.type_of(&e) {
            if ty != Type::None {
                out.insert(e, ty);
            }
        }
    }
}

/// Non-constant expressions of the routine body and the clause, plus one
/// level of unfolding through argument-less queries.
pub fn harvest_expressions(program: &Program, routine: RoutineId, clause: &Expr) -> ExpressionSet {
    let scope = Scope::new(program, routine);
    let decl = program.routine(routine);
    let mut base = IndexMap::new();
    for stmt in decl.statements() {
        for root in statement_roots(decl, stmt) {
            add(&scope, &root, &mut base);
        }
    }
    add(&scope, clause, &mut base);

    let mut unfolded = base.clone();
    for (e, ty) in &base {
        let Some(class) = ty.class_name().and_then(|c| program.class(c)) else {
            continue;
        };
        for (q, qty) in class.argumentless_queries() {
            unfolded
                .entry(Expr::call(e.clone(), q, vec![]))
                .or_insert_with(|| qty.clone());
        }
    }
    if unfolded.len() > MAX_EXPRESSIONS {
        let mut ranked: Vec<(usize, usize)> = unfolded
            .keys()
            .enumerate()
            .map(|(i, e)| (i, eprox(e, clause)))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut keep: Vec<usize> = ranked[..MAX_EXPRESSIONS].iter().map(|r| r.0).collect();
        keep.sort_unstable();
        unfolded = keep
            .into_iter()
            .map(|i| {
                let (e, t) = unfolded.get_index(i).unwrap();
                (e.clone(), t.clone())
            })
            .collect();
    }
    ExpressionSet {
        routine,
        clause: clause.clone(),
        base,
        unfolded,
    }
}
