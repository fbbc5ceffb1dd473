//! Bundled example programs with pinned generator settings.

use crate::fixgen::FixCandidate;
use crate::localize::complement;
use crate::session::{Session, SessionConfig};
use crate::syntax::{parse_program, parse_stmts, BinOp, Expr, Program, Stmt, StmtKind, UnOp};

#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub seed: u64,
    pub tests: usize,
    /// Faults the pinned run must reproduce, as `routine:loc:clause`.
    pub faults: &'static [&'static str],
    pub expected: &'static [ExpectedFix],
}

/// Statements a proper fix injects at the fault, with accepted variants.
#[derive(Debug, Clone, Copy)]
pub struct ExpectedFix {
    pub fault: &'static str,
    pub patterns: &'static [&'static str],
}

impl CorpusEntry {
    pub fn program(&self) -> Program {
        parse_program(self.source).expect("corpus program parses")
    }

    /// Session settings with the pinned seed and test count.
    pub fn config(&self) -> SessionConfig {
        let mut c = SessionConfig::default();
        c.gen.seed = self.seed;
        c.gen.tests = self.tests;
        c
    }

    pub fn session(&self) -> Session {
        Session::new(format!("{}.cdl", self.name), self.program(), self.config())
    }

    pub fn expected_fix(&self, fault: &str) -> Option<&'static ExpectedFix> {
        self.expected.iter().find(|e| e.fault == fault)
    }
}

pub const SORTED_SET: CorpusEntry = CorpusEntry {
    name: "sorted_set",
    source: include_str!("../corpus/sorted_set.cdl"),
    seed: 1,
    tests: 3000,
    faults: &[
        "SORTED_SET.move_item:9:SORTED_SET.go_i_th.valid_index",
        "SORTED_SET.move_item:10:SORTED_SET.put_left.not_before",
    ],
    expected: &[
        ExpectedFix {
            fault: "SORTED_SET.move_item:9:SORTED_SET.go_i_th.valid_index",
            patterns: &["if idx > index then idx := idx - 1 end ; go_i_th (idx)"],
        },
        ExpectedFix {
            fault: "SORTED_SET.move_item:10:SORTED_SET.put_left.not_before",
            patterns: &[
                "if before then forth end ; put_left (v)",
                "if index = 0 then forth end ; put_left (v)",
            ],
        },
    ],
};

pub const DOC_TABLE: CorpusEntry = CorpusEntry {
    name: "doc_table",
    source: include_str!("../corpus/doc_table.cdl"),
    seed: 1,
    tests: 300,
    faults: &["LATEX_TRANSLATOR.visit_table:3:TABLE.column_count.not_empty"],
    expected: &[ExpectedFix {
        fault: "LATEX_TRANSLATOR.visit_table:3:TABLE.column_count.not_empty",
        patterns: &["if a_table.count > 0 then
            from i := 1 until i > a_table.column_count
            loop s.append (a_table.count) ; i := i + 1 end
        end"],
    }],
};

pub const REGISTRY: CorpusEntry = CorpusEntry {
    name: "registry",
    source: include_str!("../corpus/registry.cdl"),
    seed: 1,
    tests: 200,
    faults: &["REGISTRY.record_last:1:REGISTRY.record.node_exists"],
    expected: &[],
};

pub const ACCOUNT: CorpusEntry = CorpusEntry {
    name: "account",
    source: include_str!("../corpus/account.cdl"),
    seed: 1,
    tests: 200,
    faults: &["ACCOUNT.pay_fee:2:ACCOUNT.withdraw.enough"],
    expected: &[],
};

pub const DOOR: CorpusEntry = CorpusEntry {
    name: "door",
    source: include_str!("../corpus/door.cdl"),
    seed: 1,
    tests: 200,
    faults: &["DOOR.enter:1:DOOR.open.not_locked"],
    expected: &[],
};

pub const COUNTER: CorpusEntry = CorpusEntry {
    name: "counter",
    source: include_str!("../corpus/counter.cdl"),
    seed: 1,
    tests: 200,
    faults: &[],
    expected: &[],
};

pub const UNREACHABLE: CorpusEntry = CorpusEntry {
    name: "unreachable",
    source: include_str!("../corpus/unreachable.cdl"),
    seed: 1,
    tests: 50,
    faults: &[],
    expected: &[],
};

pub const ALL: [CorpusEntry; 7] = [
    SORTED_SET,
    DOC_TABLE,
    REGISTRY,
    ACCOUNT,
    DOOR,
    COUNTER,
    UNREACHABLE,
];

pub fn find(name: &str) -> Option<CorpusEntry> {
    ALL.iter().copied().find(|e| e.name == name)
}

fn normalize_expr(e: &Expr) -> Expr {
    match e {
        Expr::Call {
            target,
            feature,
            args,
        } => Expr::call(
            normalize_expr(target),
            feature,
            args.iter().map(normalize_expr).collect(),
        ),
        Expr::Unary(UnOp::Not, inner) => match inner.as_ref() {
            Expr::Binary(op, ..) if op.is_comparison() => normalize_expr(&complement(inner)),
            Expr::Unary(UnOp::Not, e) => normalize_expr(e),
            _ => Expr::not(normalize_expr(inner)),
        },
        Expr::Unary(op, inner) => Expr::Unary(*op, Box::new(normalize_expr(inner))),
        Expr::Binary(op, l, r) => {
            let (l, r) = (normalize_expr(l), normalize_expr(r));
            match op {
                BinOp::Gt => Expr::binary(BinOp::Lt, r, l),
                BinOp::Ge => Expr::binary(BinOp::Le, r, l),
                BinOp::Eq | BinOp::Ne | BinOp::And | BinOp::Or | BinOp::Add | BinOp::Mul
                    if r.to_string() < l.to_string() =>
                {
                    Expr::binary(*op, r, l)
                }
                _ => Expr::binary(*op, l, r),
            }
        }
        other => other.clone(),
    }
}

/// Canonical form up to mirrored comparisons, operand order of symmetric
/// operators and negated comparisons; locations are cleared.
pub fn normalize_stmts(stmts: &[Stmt]) -> Vec<Stmt> {
    stmts
        .iter()
        .map(|s| {
            let kind = match &s.kind {
                StmtKind::Assign { target, value } => StmtKind::Assign {
                    target: target.clone(),
                    value: normalize_expr(value),
                },
                StmtKind::Call(e) => StmtKind::Call(normalize_expr(e)),
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                } => StmtKind::If {
                    cond: normalize_expr(cond),
                    then_branch: normalize_stmts(then_branch),
                    else_branch: normalize_stmts(else_branch),
                },
                StmtKind::Loop { init, until, body } => StmtKind::Loop {
                    init: normalize_stmts(init),
                    until: normalize_expr(until),
                    body: normalize_stmts(body),
                },
                StmtKind::Check(c) => StmtKind::Check(crate::syntax::Clause {
                    tag: c.tag.clone(),
                    expr: normalize_expr(&c.expr),
                }),
                StmtKind::Create {
                    target,
                    creator,
                    args,
                } => StmtKind::Create {
                    target: target.clone(),
                    creator: creator.clone(),
                    args: args.iter().map(normalize_expr).collect(),
                },
            };
            Stmt::new(kind)
        })
        .collect()
}

/// Whether the statements a candidate injects are equivalent to `pattern`,
/// parsed in the context of the routine under fix.
pub fn fix_matches(program: &Program, candidate: &FixCandidate, pattern: &str) -> bool {
    let decl = program.routine(candidate.fault.routine());
    match parse_stmts(pattern, decl) {
        Ok(expected) => normalize_stmts(candidate.patch()) == normalize_stmts(&expected),
        Err(_) => false,
    }
}

impl ExpectedFix {
    pub fn matched_by(&self, program: &Program, candidate: &FixCandidate) -> bool {
        self.patterns.iter().any(|p| fix_matches(program, candidate, p))
    }
}
