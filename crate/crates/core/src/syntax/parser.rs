//! Recursive-descent parser for CDL.
//!
//! Bare identifiers are resolved while parsing: names declared as arguments
//! or locals of the enclosing routine become variables, every other name is
//! a feature call on `Current`.

use super::ast::*;
use super::lexer::{tokenize, Pos, Tok, Token};
use super::SyntaxError;

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    scope: Vec<String>,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            tokens: tokenize(src)?,
            pos: 0,
            scope: Vec::new(),
        })
    }

    /// Parser for snippets that live inside `routine`.
    pub fn in_routine(src: &str, routine: &RoutineDecl) -> PResult<Parser> {
        let mut p = Parser::new(src)?;
        p.scope = routine
            .args
            .iter()
            .chain(&routine.locals)
            .map(|p| p.name.clone())
            .collect();
        Ok(p)
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn here(&self) -> Pos {
        self.tokens[self.pos].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError {
            pos: self.here(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        self.error(format!("expected {expected}, found {}", self.peek()))
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Keyword(k) if *k == kw)
    }

    fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if self.is_sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn expect_sym(&mut self, sym: &str) -> PResult<()> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            self.unexpected(&format!("`{sym}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => self.unexpected("identifier"),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    pub fn program(&mut self) -> PResult<Program> {
        let mut classes = Vec::new();
        while !self.at_eof() {
            classes.push(self.class()?);
        }
        if classes.is_empty() {
            return self.error("a program needs at least one class");
        }
        Ok(Program { classes })
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        self.expect_kw("class")?;
        let name = self.ident()?;
        let mut creators = Vec::new();
        if self.eat_kw("create") {
            while let Tok::Ident(_) = self.peek() {
                creators.push(self.ident()?);
                self.eat_sym(",");
            }
        }
        self.expect_kw("feature")?;
        let mut class = ClassDecl {
            name,
            creators,
            attributes: Vec::new(),
            routines: Vec::new(),
        };
        while !self.is_kw("end") {
            self.feature(&mut class)?;
            self.eat_sym(";");
        }
        self.expect_kw("end")?;
        Ok(class)
    }

    fn starts_routine_rest(&self) -> bool {
        ["require", "local", "do", "deferred"]
            .iter()
            .any(|k| self.is_kw(k))
    }

    fn feature(&mut self, class: &mut ClassDecl) -> PResult<()> {
        let name = self.ident()?;
        if self.is_sym(",") {
            let mut names = vec![name];
            while self.eat_sym(",") {
                names.push(self.ident()?);
            }
            self.expect_sym(":")?;
            let ty = self.ty()?;
            for name in names {
                class.attributes.push(Attribute {
                    name,
                    ty: ty.clone(),
                });
            }
            return Ok(());
        }
        let args = if self.eat_sym("(") {
            let params = self.params(")")?;
            self.expect_sym(")")?;
            params
        } else {
            Vec::new()
        };
        let result = if self.eat_sym(":") {
            Some(self.ty()?)
        } else {
            None
        };
        if args.is_empty() && !self.starts_routine_rest() {
            return match result {
                Some(ty) => {
                    class.attributes.push(Attribute { name, ty });
                    Ok(())
                }
                None => self.unexpected("`:` or routine body"),
            };
        }
        let routine = self.routine_rest(name, args, result)?;
        class.routines.push(routine);
        Ok(())
    }

    fn routine_rest(
        &mut self,
        name: String,
        args: Vec<Param>,
        result: Option<Type>,
    ) -> PResult<RoutineDecl> {
        self.scope = args.iter().map(|p| p.name.clone()).collect();
        let require = if self.eat_kw("require") {
            self.clauses("pre")?
        } else {
            Vec::new()
        };
        let locals = if self.eat_kw("local") {
            self.params("do")?
        } else {
            Vec::new()
        };
        self.scope.extend(locals.iter().map(|p| p.name.clone()));
        let body = if self.eat_kw("deferred") {
            None
        } else {
            self.expect_kw("do")?;
            Some(self.stmts()?)
        };
        let ensure = if self.eat_kw("ensure") {
            self.clauses("post")?
        } else {
            Vec::new()
        };
        self.expect_kw("end")?;
        self.scope.clear();
        let mut routine = RoutineDecl {
            name,
            args,
            result,
            require,
            locals,
            body,
            ensure,
        };
        routine.renumber();
        Ok(routine)
    }

    /// `a, b: T; c: U` up to (not including) `stop`.
    fn params(&mut self, stop: &str) -> PResult<Vec<Param>> {
        let mut out = Vec::new();
        loop {
            let at_stop = match self.peek() {
                Tok::Sym(s) => *s == stop,
                Tok::Keyword(k) => *k == stop || *k == "deferred",
                _ => false,
            };
            if at_stop {
                break;
            }
            let mut names = vec![self.ident()?];
            while self.eat_sym(",") {
                names.push(self.ident()?);
            }
            self.expect_sym(":")?;
            let ty = self.ty()?;
            out.extend(names.into_iter().map(|name| Param {
                name,
                ty: ty.clone(),
            }));
            self.eat_sym(";");
        }
        Ok(out)
    }

    fn ty(&mut self) -> PResult<Type> {
        let name = self.ident()?;
        Ok(match name.as_str() {
            "INTEGER" => Type::Integer,
            "BOOLEAN" => Type::Boolean,
            _ => Type::Class(name),
        })
    }

    fn starts_expr(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) | Tok::Int(_) => true,
            Tok::Sym(s) => *s == "(" || *s == "-",
            Tok::Keyword(k) => matches!(
                *k,
                "not" | "True" | "False" | "Void" | "Current" | "Result"
            ),
            Tok::Eof => false,
        }
    }

    fn clauses(&mut self, prefix: &str) -> PResult<Vec<Clause>> {
        let mut out: Vec<Clause> = Vec::new();
        while self.starts_expr() {
            let clause = self.clause(&format!("{prefix}_{}", out.len() + 1))?;
            out.push(clause);
            self.eat_sym(";");
        }
        Ok(out)
    }

    fn clause(&mut self, default_tag: &str) -> PResult<Clause> {
        let tag = match (self.peek().clone(), self.peek_at(1)) {
            (Tok::Ident(name), Tok::Sym(":")) => {
                self.bump();
                self.bump();
                name
            }
            _ => default_tag.to_string(),
        };
        let expr = self.expr()?;
        Ok(Clause { tag, expr })
    }

    pub fn stmts(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            while self.eat_sym(";") {}
            let done = match self.peek() {
                Tok::Keyword(k) => matches!(*k, "end" | "else" | "until" | "loop" | "ensure"),
                Tok::Eof => true,
                _ => false,
            };
            if done {
                return Ok(out);
            }
            out.push(self.stmt()?);
        }
    }

    fn target(&mut self) -> PResult<Target> {
        if self.eat_kw("Result") {
            Ok(Target::Result)
        } else {
            Ok(Target::Name(self.ident()?))
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let kind = if self.eat_kw("if") {
            let cond = self.expr()?;
            self.expect_kw("then")?;
            let then_branch = self.stmts()?;
            let else_branch = if self.eat_kw("else") {
                self.stmts()?
            } else {
                Vec::new()
            };
            self.expect_kw("end")?;
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            }
        } else if self.eat_kw("from") {
            let init = self.stmts()?;
            self.expect_kw("until")?;
            let until = self.expr()?;
            self.expect_kw("loop")?;
            let body = self.stmts()?;
            self.expect_kw("end")?;
            StmtKind::Loop { init, until, body }
        } else if self.eat_kw("check") {
            let clause = self.clause("check")?;
            self.eat_sym(";");
            self.expect_kw("end")?;
            StmtKind::Check(clause)
        } else if self.eat_kw("create") {
            let target = self.target()?;
            self.expect_sym(".")?;
            let creator = self.ident()?;
            let args = self.opt_args()?;
            StmtKind::Create {
                target,
                creator,
                args,
            }
        } else if matches!(self.peek_at(1), Tok::Sym(":=")) {
            let target = self.target()?;
            self.expect_sym(":=")?;
            let value = self.expr()?;
            StmtKind::Assign { target, value }
        } else {
            let pos = self.here();
            let e = self.postfix()?;
            if !matches!(e, Expr::Call { .. }) {
                return Err(SyntaxError {
                    pos,
                    message: "expected an instruction".into(),
                });
            }
            StmtKind::Call(e)
        };
        Ok(Stmt::new(kind))
    }

    fn opt_args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat_sym("(") {
            if !self.is_sym(")") {
                args.push(self.expr()?);
                while self.eat_sym(",") {
                    args.push(self.expr()?);
                }
            }
            self.expect_sym(")")?;
        }
        Ok(args)
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Keyword("or") => BinOp::Or,
            Tok::Keyword("and") => BinOp::And,
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("/=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            if op.is_comparison() {
                if let Some(next) = self.binop() {
                    if next.is_comparison() {
                        return self.error("comparison operators do not associate");
                    }
                }
            }
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            let e = self.unary()?;
            return Ok(Expr::not(e));
        }
        if self.is_sym("-") {
            self.bump();
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                return Ok(Expr::Int(-n));
            }
            let e = self.unary()?;
            return Ok(Expr::Unary(UnOp::Neg, Box::new(e)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat_sym(".") {
            let feature = self.ident()?;
            let args = self.opt_args()?;
            e = Expr::call(e, feature, args);
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Keyword("True") => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Keyword("False") => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Keyword("Void") => {
                self.bump();
                Ok(Expr::Void)
            }
            Tok::Keyword("Current") => {
                self.bump();
                Ok(Expr::Current)
            }
            Tok::Keyword("Result") => {
                self.bump();
                Ok(Expr::Result)
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.scope.contains(&name) && !self.is_sym("(") {
                    Ok(Expr::Var(name))
                } else {
                    let args = self.opt_args()?;
                    Ok(Expr::feature(name, args))
                }
            }
            _ => self.unexpected("expression"),
        }
    }
}
