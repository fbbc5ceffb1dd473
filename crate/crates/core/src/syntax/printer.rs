//! Pretty-printer. Output re-parses to a structurally identical tree.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

/// Sibling statements that an injected fix occupies: the statement at
/// location `first` and the `len - 1` statements following it in the same
/// block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixSpan {
    pub first: u32,
    pub len: usize,
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(n) => write!(out, "{n}").unwrap(),
        Expr::Bool(true) => out.push_str("True"),
        Expr::Bool(false) => out.push_str("False"),
        Expr::Void => out.push_str("Void"),
        Expr::Current => out.push_str("Current"),
        Expr::Result => out.push_str("Result"),
        Expr::Var(name) => out.push_str(name),
        Expr::Call {
            target,
            feature,
            args,
        } => {
            match target.as_ref() {
                Expr::Current => {}
                t @ (Expr::Var(_) | Expr::Call { .. } | Expr::Result | Expr::Void) => {
                    write_expr(out, t);
                    out.push('.');
                }
                t => {
                    out.push('(');
                    write_expr(out, t);
                    out.push_str(").");
                }
            }
            out.push_str(feature);
            write_args(out, args);
        }
        Expr::Binary(op, l, r) => {
            let prec = op.precedence();
            let left_parens = match l.as_ref() {
                Expr::Binary(lop, _, _) => {
                    lop.precedence() < prec || (op.is_comparison() && lop.is_comparison())
                }
                _ => false,
            };
            let right_parens = matches!(r.as_ref(), Expr::Binary(rop, _, _) if rop.precedence() <= prec);
            write_wrapped(out, l, left_parens);
            write!(out, " {} ", op.symbol()).unwrap();
            write_wrapped(out, r, right_parens);
        }
        Expr::Unary(op, inner) => {
            let wrap = matches!(inner.as_ref(), Expr::Binary(..) | Expr::Unary(..))
                || (*op == UnOp::Neg && matches!(inner.as_ref(), Expr::Int(_)));
            match op {
                UnOp::Not => out.push_str("not "),
                UnOp::Neg => out.push('-'),
            }
            write_wrapped(out, inner, wrap);
        }
    }
}

fn write_wrapped(out: &mut String, e: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_args(out: &mut String, args: &[Expr]) {
    if args.is_empty() {
        return;
    }
    out.push_str(" (");
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

fn target_name(t: &Target) -> &str {
    match t {
        Target::Result => "Result",
        Target::Name(n) => n,
    }
}

fn clause_to_string(c: &Clause) -> String {
    format!("{}: {}", c.tag, expr_to_string(&c.expr))
}

struct Printer {
    out: String,
    mark: Option<FixSpan>,
}

impl Printer {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn block(&mut self, depth: usize, block: &[Stmt]) {
        let mut remaining_in_fix = 0usize;
        for stmt in block {
            if let Some(span) = self.mark {
                if stmt.loc == span.first {
                    self.line(depth, "-- fix");
                    remaining_in_fix = span.len;
                }
            }
            self.stmt(depth, stmt);
            if remaining_in_fix > 0 {
                remaining_in_fix -= 1;
                if remaining_in_fix == 0 {
                    self.line(depth, "-- end fix");
                }
            }
        }
    }

    fn stmt(&mut self, depth: usize, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                let text = format!("{} := {}", target_name(target), expr_to_string(value));
                self.line(depth, &text);
            }
            StmtKind::Call(e) => self.line(depth, &expr_to_string(e)),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.line(depth, &format!("if {} then", expr_to_string(cond)));
                self.block(depth + 1, then_branch);
                if !else_branch.is_empty() {
                    self.line(depth, "else");
                    self.block(depth + 1, else_branch);
                }
                self.line(depth, "end");
            }
            StmtKind::Loop { init, until, body } => {
                self.line(depth, "from");
                self.block(depth + 1, init);
                self.line(depth, "until");
                self.line(depth + 1, &expr_to_string(until));
                self.line(depth, "loop");
                self.block(depth + 1, body);
                self.line(depth, "end");
            }
            StmtKind::Check(c) => {
                self.line(depth, &format!("check {} end", clause_to_string(c)));
            }
            StmtKind::Create {
                target,
                creator,
                args,
            } => {
                let mut text = format!("create {}.{}", target_name(target), creator);
                write_args(&mut text, args);
                self.line(depth, &text);
            }
        }
    }

    fn params(params: &[Param]) -> String {
        params
            .iter()
            .map(|p| format!("{}: {}", p.name, p.ty))
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn routine(&mut self, depth: usize, r: &RoutineDecl) {
        let mut header = r.name.clone();
        if !r.args.is_empty() {
            write!(header, " ({})", Self::params(&r.args)).unwrap();
        }
        if let Some(t) = &r.result {
            write!(header, ": {t}").unwrap();
        }
        self.line(depth, &header);
        if !r.require.is_empty() {
            self.line(depth + 1, "require");
            for c in &r.require {
                self.line(depth + 2, &clause_to_string(c));
            }
        }
        if !r.locals.is_empty() {
            self.line(depth + 1, "local");
            for p in &r.locals {
                self.line(depth + 2, &format!("{}: {}", p.name, p.ty));
            }
        }
        match &r.body {
            Some(body) => {
                self.line(depth + 1, "do");
                self.block(depth + 2, body);
            }
            None => self.line(depth + 1, "deferred"),
        }
        if !r.ensure.is_empty() {
            self.line(depth + 1, "ensure");
            for c in &r.ensure {
                self.line(depth + 2, &clause_to_string(c));
            }
        }
        self.line(depth + 1, "end");
    }

    fn class(&mut self, c: &ClassDecl) {
        self.line(0, &format!("class {}", c.name));
        if !c.creators.is_empty() {
            self.line(0, "create");
            self.line(1, &c.creators.join(", "));
        }
        self.line(0, "feature");
        for a in &c.attributes {
            self.line(1, &format!("{}: {}", a.name, a.ty));
        }
        for r in &c.routines {
            self.out.push('\n');
            self.routine(1, r);
        }
        self.line(0, "end");
    }
}

pub fn print_program(p: &Program) -> String {
    let mut pr = Printer {
        out: String::new(),
        mark: None,
    };
    for (i, c) in p.classes.iter().enumerate() {
        if i > 0 {
            pr.out.push('\n');
        }
        pr.class(c);
    }
    pr.out
}

pub fn print_routine(r: &RoutineDecl) -> String {
    print_routine_marked(r, None)
}

/// Prints a routine, wrapping the statements in `mark` between `-- fix` and
/// `-- end fix` comment lines.
pub fn print_routine_marked(r: &RoutineDecl, mark: Option<FixSpan>) -> String {
    let mut pr = Printer {
        out: String::new(),
        mark,
    };
    pr.routine(0, r);
    pr.out
}

pub fn print_stmt(s: &Stmt) -> String {
    let mut pr = Printer {
        out: String::new(),
        mark: None,
    };
    pr.stmt(0, s);
    pr.out
}

/// Single-line rendering of a statement, for reports and tables.
pub fn stmt_to_inline(s: &Stmt) -> String {
    print_stmt(s)
        .lines()
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(" ")
}
