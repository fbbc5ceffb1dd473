use indexmap::IndexMap;

use super::exprs::ExpressionSet;
use crate::syntax::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredicateRule {
    Boolean,
    Voidness,
    Comparison,
    Complement,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Predicate {
    pub expr: Expr,
    pub rule: PredicateRule,
}

/// `not p`, written without a double negation and with comparisons flipped.
pub fn complement(p: &Expr) -> Expr {
    match p {
        Expr::Unary(UnOp::Not, inner) => (**inner).clone(),
        Expr::Binary(op, l, r) if op.is_comparison() => {
            Expr::Binary(op.complement().unwrap(), l.clone(), r.clone())
        }
        _ => Expr::not(p.clone()),
    }
}

pub fn build_predicates(es: &ExpressionSet) -> Vec<Predicate> {
    let mut out: IndexMap<Expr, PredicateRule> = IndexMap::new();
    fn add(out: &mut IndexMap<Expr, PredicateRule>, e: Expr, rule: PredicateRule) {
        out.entry(e).or_insert(rule);
    }
    for (e, ty) in &es.unfolded {
        if *ty == Type::Boolean {
            add(&mut out, e.clone(), PredicateRule::Boolean);
        }
    }
    for (e, ty) in &es.unfolded {
        if ty.is_reference() {
            add(
                &mut out,
                Expr::binary(BinOp::Eq, e.clone(), Expr::Void),
                PredicateRule::Voidness,
            );
        }
    }
    let ints: Vec<&Expr> = es
        .unfolded
        .iter()
        .filter(|(_, t)| **t == Type::Integer)
        .map(|(e, _)| e)
        .collect();
    let zero = Expr::Int(0);
    for &e in &ints {
        let others = ints.iter().copied().filter(|o| *o != e).chain([&zero]);
        for other in others {
            for op in [BinOp::Eq, BinOp::Lt, BinOp::Le] {
                add(
                    &mut out,
                    Expr::binary(op, e.clone(), other.clone()),
                    PredicateRule::Comparison,
                );
            }
        }
    }
    let firsts: Vec<Expr> = out.keys().cloned().collect();
    for p in firsts {
        add(&mut out, complement(&p), PredicateRule::Complement);
    }
    out.into_iter()
        .map(|(expr, rule)| Predicate { expr, rule })
        .collect()
}
