//! CDL front end: lexing, parsing, type checking and printing.

pub mod ast;
pub mod cfg;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod subexpr;
pub mod typeck;

use std::fmt;

use thiserror::Error;

pub use ast::*;
pub use lexer::Pos;
pub use parser::Parser;
pub use printer::{
    expr_to_string, print_program, print_routine, print_routine_marked, print_stmt, stmt_to_inline,
    FixSpan,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Type,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// Class or `CLASS.routine` the problem was found in.
    pub context: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Type => "type error",
            DiagnosticKind::Duplicate => "duplicate name",
        };
        write!(f, "{kind} in {}: {}", self.context, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{}", join_diagnostics(.0))]
    Semantic(Vec<Diagnostic>),
}

fn join_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses and type-checks a whole program.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut parser = Parser::new(src)?;
    let program = parser.program()?;
    let diagnostics = typeck::check_program(&program);
    if diagnostics.is_empty() {
        Ok(program)
    } else {
        Err(ParseError::Semantic(diagnostics))
    }
}

/// Parses a statement list in the scope of `routine`.
pub fn parse_stmts(src: &str, routine: &RoutineDecl) -> Result<Vec<Stmt>, SyntaxError> {
    let mut parser = Parser::in_routine(src, routine)?;
    let stmts = parser.stmts()?;
    parser.expect_eof()?;
    Ok(stmts)
}

/// Parses an expression in the scope of `routine`.
pub fn parse_expr(src: &str, routine: &RoutineDecl) -> Result<Expr, SyntaxError> {
    let mut parser = Parser::in_routine(src, routine)?;
    let e = parser.expr()?;
    parser.expect_eof()?;
    Ok(e)
}
