//! Sub-expression sets.
//!
//! Operators count as query calls on their left operand, so the operands of
//! an infix or prefix expression are its sub-expressions. The implicit
//! `Current` receiver of a call is left out of [`sub`]; [`sub_with_current`]
//! keeps it.

use indexmap::IndexSet;

use super::ast::*;

fn collect(e: &Expr, with_current: bool, out: &mut IndexSet<Expr>) {
    if !out.insert(e.clone()) {
        return;
    }
    match e {
        Expr::Call { target, args, .. } => {
            if with_current || **target != Expr::Current {
                collect(target, with_current, out);
            }
            for a in args {
                collect(a, with_current, out);
            }
        }
        Expr::Binary(_, l, r) => {
            collect(l, with_current, out);
            collect(r, with_current, out);
        }
        Expr::Unary(_, inner) => collect(inner, with_current, out),
        _ => {}
    }
}

pub fn sub(e: &Expr) -> IndexSet<Expr> {
    let mut out = IndexSet::new();
    collect(e, false, &mut out);
    out
}

pub fn sub_with_current(e: &Expr) -> IndexSet<Expr> {
    let mut out = IndexSet::new();
    collect(e, true, &mut out);
    out
}

/// `|sub(a) ∩ sub(b)|`
pub fn eprox(a: &Expr, b: &Expr) -> usize {
    let sb = sub(b);
    sub(a).iter().filter(|e| sb.contains(*e)).count()
}

/// The expressions a statement's location reads: its condition, the right
/// side of an assignment, or the arguments of a call or creation.
pub fn sub_of_location(stmt: &Stmt) -> IndexSet<Expr> {
    let mut out = IndexSet::new();
    match &stmt.kind {
        StmtKind::If { cond: b, .. } | StmtKind::Loop { until: b, .. } => {
            collect(b, false, &mut out)
        }
        StmtKind::Assign { value, .. } => collect(value, false, &mut out),
        StmtKind::Call(Expr::Call { args, .. }) | StmtKind::Create { args, .. } => {
            for a in args {
                collect(a, false, &mut out);
            }
        }
        StmtKind::Call(_) | StmtKind::Check(_) => {}
    }
    out
}

/// Elements of `set` not strictly below another element under `e1 ⪯ e2 ⇔
/// e1 ∈ sub(e2)`, keeping the set's order.
pub fn largest(set: &[Expr], with_current: bool) -> Vec<Expr> {
    let subs: Vec<IndexSet<Expr>> = set
        .iter()
        .map(|e| {
            let mut s = IndexSet::new();
            collect(e, with_current, &mut s);
            s
        })
        .collect();
    set.iter()
        .enumerate()
        .filter(|(i, e)| {
            !subs
                .iter()
                .enumerate()
                .any(|(j, s)| j != *i && set[j] != **e && s.contains(*e))
        })
        .map(|(_, e)| e.clone())
        .collect()
}
