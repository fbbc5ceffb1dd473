//! Abstract syntax of CDL programs.
//!
//! Expressions are stored fully resolved: a bare identifier that names a
//! local or an argument becomes [`Expr::Var`], anything else becomes a
//! feature call on the implicit target [`Expr::Current`]. `Current.index`
//! and `index` therefore produce the same tree.

use std::fmt;

/// Primitive and reference types.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Integer,
    Boolean,
    Class(String),
    /// The type of the `Void` literal; conforms to every class type.
    None,
}

impl Type {
    pub fn is_reference(&self) -> bool {
        matches!(self, Type::Class(_) | Type::None)
    }

    /// `self` can be stored where `target` is expected.
    pub fn conforms_to(&self, target: &Type) -> bool {
        match (self, target) {
            (Type::None, Type::Class(_)) => true,
            (a, b) => a == b,
        }
    }

    pub fn class_name(&self) -> Option<&str> {
        match self {
            Type::Class(name) => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Integer => f.write_str("INTEGER"),
            Type::Boolean => f.write_str("BOOLEAN"),
            Type::Class(name) => f.write_str(name),
            Type::None => f.write_str("NONE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Ne => "/=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }

    /// The comparison that holds exactly when `self` does not.
    pub fn complement(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
            BinOp::Lt => BinOp::Ge,
            BinOp::Ge => BinOp::Lt,
            BinOp::Le => BinOp::Gt,
            BinOp::Gt => BinOp::Le,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Void,
    Current,
    Result,
    /// A local variable or a routine argument.
    Var(String),
    /// Attribute read or query call. Unqualified calls target `Current`.
    Call {
        target: Box<Expr>,
        feature: String,
        args: Vec<Expr>,
    },
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    /// Unqualified feature call, i.e. a call on `Current`.
    pub fn feature(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Call {
            target: Box::new(Expr::Current),
            feature: name.into(),
            args,
        }
    }

    pub fn call(target: Expr, name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Call {
            target: Box::new(target),
            feature: name.into(),
            args,
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(e))
    }

    /// Literals and literal-only trees.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Bool(_) | Expr::Void => true,
            Expr::Current | Expr::Result | Expr::Var(_) | Expr::Call { .. } => false,
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
            Expr::Unary(_, e) => e.is_constant(),
        }
    }

    /// Replaces every occurrence of `from` by `to`, outermost first. Replaced
    /// subtrees are not searched again.
    pub fn replace(&self, from: &Expr, to: &Expr) -> Expr {
        if self == from {
            return to.clone();
        }
        match self {
            Expr::Call {
                target,
                feature,
                args,
            } => Expr::Call {
                target: Box::new(target.replace(from, to)),
                feature: feature.clone(),
                args: args.iter().map(|a| a.replace(from, to)).collect(),
            },
            Expr::Binary(op, l, r) => {
                Expr::Binary(*op, Box::new(l.replace(from, to)), Box::new(r.replace(from, to)))
            }
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(e.replace(from, to))),
            other => other.clone(),
        }
    }

    /// Simultaneous substitution of `Current` and of variables.
    pub fn substitute(&self, current: &Expr, vars: &[(String, Expr)]) -> Expr {
        match self {
            Expr::Current => current.clone(),
            Expr::Var(name) => vars
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Expr::Call {
                target,
                feature,
                args,
            } => Expr::Call {
                target: Box::new(target.substitute(current, vars)),
                feature: feature.clone(),
                args: args.iter().map(|a| a.substitute(current, vars)).collect(),
            },
            Expr::Binary(op, l, r) => Expr::Binary(
                *op,
                Box::new(l.substitute(current, vars)),
                Box::new(r.substitute(current, vars)),
            ),
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(e.substitute(current, vars))),
            other => other.clone(),
        }
    }

    /// Visits every node, parents before children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Call { target, args, .. } => {
                target.walk(f);
                for a in args {
                    a.walk(f);
                }
            }
            Expr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::Unary(_, e) => e.walk(f),
            _ => {}
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::printer::expr_to_string(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub tag: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    Result,
    /// Local variable or attribute of `Current`.
    Name(String),
}

impl Target {
    pub fn as_expr(&self, locals: &[Param]) -> Expr {
        match self {
            Target::Result => Expr::Result,
            Target::Name(n) if locals.iter().any(|p| &p.name == n) => Expr::Var(n.clone()),
            Target::Name(n) => Expr::feature(n.clone(), vec![]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stmt {
    /// Pre-order index within the enclosing routine body, starting at 1.
    pub loc: u32,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Assign {
        target: Target,
        value: Expr,
    },
    /// A command call; the expression is always an [`Expr::Call`].
    Call(Expr),
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    Loop {
        init: Vec<Stmt>,
        until: Expr,
        body: Vec<Stmt>,
    },
    Check(Clause),
    Create {
        target: Target,
        creator: String,
        args: Vec<Expr>,
    },
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Stmt {
        Stmt { loc: 0, kind }
    }

    /// Child blocks in pre-order.
    pub fn blocks(&self) -> Vec<&Vec<Stmt>> {
        match &self.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => vec![then_branch, else_branch],
            StmtKind::Loop { init, body, .. } => vec![init, body],
            _ => vec![],
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Vec<Stmt>> {
        match &mut self.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => vec![then_branch, else_branch],
            StmtKind::Loop { init, body, .. } => vec![init, body],
            _ => vec![],
        }
    }

    /// `true` for statements whose location labels a boolean condition.
    pub fn is_condition(&self) -> bool {
        matches!(self.kind, StmtKind::If { .. } | StmtKind::Loop { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub ty: Type,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoutineKind {
    Command,
    Query,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoutineDecl {
    pub name: String,
    pub args: Vec<Param>,
    pub result: Option<Type>,
    pub require: Vec<Clause>,
    pub locals: Vec<Param>,
    /// `None` for deferred routines.
    pub body: Option<Vec<Stmt>>,
    pub ensure: Vec<Clause>,
}

impl RoutineDecl {
    pub fn kind(&self) -> RoutineKind {
        if self.result.is_some() {
            RoutineKind::Query
        } else {
            RoutineKind::Command
        }
    }

    pub fn body(&self) -> &[Stmt] {
        self.body.as_deref().unwrap_or(&[])
    }

    /// Number of statement locations in the body.
    pub fn location_count(&self) -> u32 {
        fn count(block: &[Stmt]) -> u32 {
            block
                .iter()
                .map(|s| 1 + s.blocks().into_iter().map(|b| count(b)).sum::<u32>())
                .sum()
        }
        count(self.body())
    }

    /// Synthetic location at which postconditions are checked.
    pub fn exit_location(&self) -> u32 {
        self.location_count() + 1
    }

    /// Reassigns pre-order locations to every statement of the body.
    pub fn renumber(&mut self) {
        fn go(block: &mut [Stmt], next: &mut u32) {
            for stmt in block {
                stmt.loc = *next;
                *next += 1;
                for b in stmt.blocks_mut() {
                    go(b, next);
                }
            }
        }
        let mut next = 1;
        if let Some(body) = &mut self.body {
            go(body, &mut next);
        }
    }

    pub fn stmt_at(&self, loc: u32) -> Option<&Stmt> {
        fn find(block: &[Stmt], loc: u32) -> Option<&Stmt> {
            for stmt in block {
                if stmt.loc == loc {
                    return Some(stmt);
                }
                for b in stmt.blocks() {
                    if let Some(s) = find(b, loc) {
                        return Some(s);
                    }
                }
            }
            None
        }
        find(self.body(), loc)
    }

    /// All statements of the body in pre-order.
    pub fn statements(&self) -> Vec<&Stmt> {
        fn go<'a>(block: &'a [Stmt], out: &mut Vec<&'a Stmt>) {
            for stmt in block {
                out.push(stmt);
                for b in stmt.blocks() {
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self.body(), &mut out);
        out
    }

    /// Argument and local names (the scope that shadows features).
    pub fn is_local_name(&self, name: &str) -> bool {
        self.args.iter().chain(&self.locals).any(|p| p.name == name)
    }

    pub fn is_argument(&self, name: &str) -> bool {
        self.args.iter().any(|p| p.name == name)
    }

    pub fn variable_type(&self, name: &str) -> Option<&Type> {
        self.args
            .iter()
            .chain(&self.locals)
            .find(|p| p.name == name)
            .map(|p| &p.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    pub name: String,
    pub creators: Vec<String>,
    pub attributes: Vec<Attribute>,
    pub routines: Vec<RoutineDecl>,
}

impl ClassDecl {
    pub fn routine(&self, name: &str) -> Option<&RoutineDecl> {
        self.routines.iter().find(|r| r.name == name)
    }

    pub fn routine_index(&self, name: &str) -> Option<usize> {
        self.routines.iter().position(|r| r.name == name)
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn has_feature(&self, name: &str) -> bool {
        self.attribute(name).is_some() || self.routine(name).is_some()
    }

    /// Attributes and queries callable without arguments.
    pub fn argumentless_queries(&self) -> Vec<(&str, &Type)> {
        let attrs = self.attributes.iter().map(|a| (a.name.as_str(), &a.ty));
        let queries = self
            .routines
            .iter()
            .filter(|r| r.args.is_empty())
            .filter_map(|r| r.result.as_ref().map(|t| (r.name.as_str(), t)));
        attrs.chain(queries).collect()
    }

    pub fn commands(&self) -> impl Iterator<Item = &RoutineDecl> {
        self.routines.iter().filter(|r| r.result.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub classes: Vec<ClassDecl>,
}

/// Index of a routine inside a [`Program`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoutineId {
    pub class: usize,
    pub routine: usize,
}

/// A statement location: routine plus pre-order index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub routine: RoutineId,
    pub index: u32,
}

impl Program {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn routine(&self, id: RoutineId) -> &RoutineDecl {
        &self.classes[id.class].routines[id.routine]
    }

    pub fn routine_mut(&mut self, id: RoutineId) -> &mut RoutineDecl {
        &mut self.classes[id.class].routines[id.routine]
    }

    pub fn routine_id(&self, class: &str, routine: &str) -> Option<RoutineId> {
        let ci = self.class_index(class)?;
        let ri = self.classes[ci].routine_index(routine)?;
        Some(RoutineId {
            class: ci,
            routine: ri,
        })
    }

    /// Finds a routine by bare or `CLASS.routine` name; bare names must be
    /// unambiguous.
    pub fn find_routine(&self, name: &str) -> Option<RoutineId> {
        if let Some((class, routine)) = name.split_once('.') {
            return self.routine_id(class, routine);
        }
        let mut found = None;
        for (ci, class) in self.classes.iter().enumerate() {
            if let Some(ri) = class.routine_index(name) {
                if found.is_some() {
                    return None;
                }
                found = Some(RoutineId {
                    class: ci,
                    routine: ri,
                });
            }
        }
        found
    }

    pub fn routine_name(&self, id: RoutineId) -> String {
        format!(
            "{}.{}",
            self.classes[id.class].name,
            self.classes[id.class].routines[id.routine].name
        )
    }

    pub fn routine_ids(&self) -> impl Iterator<Item = RoutineId> + '_ {
        self.classes.iter().enumerate().flat_map(|(ci, c)| {
            (0..c.routines.len()).map(move |ri| RoutineId {
                class: ci,
                routine: ri,
            })
        })
    }

    /// A copy with one routine replaced.
    pub fn with_routine(&self, id: RoutineId, routine: RoutineDecl) -> Program {
        let mut p = self.clone();
        *p.routine_mut(id) = routine;
        p
    }
}
