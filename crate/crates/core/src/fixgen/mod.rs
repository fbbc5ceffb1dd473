//! Fixing actions and schema instantiation.

mod actions;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub use actions::{
    derive_expressions, expression_modifications, expression_replacements, replace_in_location,
    target_expressions, ActionKind, FixAction, FixContext, MAX_CALLS_PER_COMMAND,
};

use crate::localize::{complement, Localization, RankedComponent, Rational};
use crate::syntax::typeck::check_routine;
use crate::syntax::*;
use crate::testgen::FaultKey;

pub const DEFAULT_MAX_COMPONENTS: usize = 10;

#[derive(Debug, Error)]
pub enum FixgenError {
    #[error("location {0} does not exist in {1}")]
    NoSuchLocation(u32, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    /// `snippet ; old`
    A,
    /// `if fail then snippet end ; old`
    B,
    /// `if not fail then old end`
    C,
    /// `if fail then snippet else old end`
    D,
}

impl Schema {
    pub const ALL: [Schema; 4] = [Schema::A, Schema::B, Schema::C, Schema::D];

    pub fn letter(self) -> char {
        match self {
            Schema::A => 'a',
            Schema::B => 'b',
            Schema::C => 'c',
            Schema::D => 'd',
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixCandidate {
    pub fault: FaultKey,
    pub component: RankedComponent,
    /// Position of the component in the localization ranking, from 0.
    pub component_rank: usize,
    pub schema: Schema,
    /// `None` for schema a.
    pub fail: Option<Expr>,
    /// `None` for schema c.
    pub action: Option<FixAction>,
    pub routine: RoutineDecl,
    /// Statements of `routine` that replace the instruction at ℓ.
    pub span: FixSpan,
}

impl FixCandidate {
    pub fn fixme(&self) -> &Rational {
        &self.component.scores.fixme
    }

    pub fn snippet_text(&self) -> String {
        self.action.as_ref().map(FixAction::text).unwrap_or_default()
    }

    /// The injected statements.
    pub fn patch(&self) -> &[Stmt] {
        let block = span_block(&self.routine, self.span.first).unwrap_or(&[]);
        let start = block
            .iter()
            .position(|s| s.loc == self.span.first)
            .unwrap_or(block.len());
        &block[start..(start + self.span.len).min(block.len())]
    }

    pub fn patch_text(&self) -> String {
        self.patch()
            .iter()
            .map(stmt_to_inline)
            .collect::<Vec<_>>()
            .join(" ; ")
    }

    pub fn program(&self, base: &Program) -> Program {
        base.with_routine(self.fault.routine(), self.routine.clone())
    }
}

/// The block that holds the statement at `loc`.
fn span_block(routine: &RoutineDecl, loc: u32) -> Option<&[Stmt]> {
    fn find(block: &[Stmt], loc: u32) -> Option<&[Stmt]> {
        if block.iter().any(|s| s.loc == loc) {
            return Some(block);
        }
        block
            .iter()
            .flat_map(|s| s.blocks())
            .find_map(|b| find(b, loc))
    }
    find(routine.body(), loc)
}

/// Replaces the statement at `loc` by `with`, or appends `with` to the body
/// when `loc` is the exit location. The result is renumbered.
pub fn patch_routine(routine: &RoutineDecl, loc: u32, with: Vec<Stmt>) -> Option<RoutineDecl> {
    fn splice(block: &mut Vec<Stmt>, loc: u32, with: &mut Option<Vec<Stmt>>) -> bool {
        if let Some(i) = block.iter().position(|s| s.loc == loc) {
            block.splice(i..=i, with.take().unwrap());
            return true;
        }
        block
            .iter_mut()
            .any(|s| s.blocks_mut().into_iter().any(|b| splice(b, loc, with)))
    }
    let mut out = routine.clone();
    if loc == routine.exit_location() {
        out.body.get_or_insert_with(Vec::new).extend(with);
    } else {
        let body = out.body.as_mut()?;
        if !splice(body, loc, &mut Some(with)) {
            return None;
        }
    }
    out.renumber();
    Some(out)
}

/// `p` when the component's value is true, its complement otherwise.
pub fn fail_predicate(component: &RankedComponent) -> Expr {
    if component.component.value {
        component.predicate.clone()
    } else {
        complement(&component.predicate)
    }
}

fn if_stmt(cond: Expr, then_branch: Vec<Stmt>, else_branch: Vec<Stmt>) -> Stmt {
    Stmt::new(StmtKind::If {
        cond,
        then_branch,
        else_branch,
    })
}

fn schema_body(schema: Schema, fail: &Expr, snippet: Option<&Stmt>, old: Option<&Stmt>) -> Option<Vec<Stmt>> {
    let old = old.cloned();
    let snippet = snippet.cloned();
    Some(match schema {
        Schema::A => [snippet?].into_iter().chain(old).collect(),
        Schema::B => [if_stmt(fail.clone(), vec![snippet?], vec![])]
            .into_iter()
            .chain(old)
            .collect(),
        Schema::C => vec![if_stmt(complement(fail), vec![old?], vec![])],
        Schema::D => vec![if_stmt(fail.clone(), vec![snippet?], vec![old?])],
    })
}

/// Candidates of one component, unchecked and in (schema, snippet) order.
fn component_candidates(
    program: &Program,
    fault: &FaultKey,
    component: &RankedComponent,
    rank: usize,
    actions: &[FixAction],
) -> Vec<FixCandidate> {
    let id = fault.routine();
    let decl = program.routine(id);
    let loc = component.component.location;
    let old = decl.stmt_at(loc);
    let fail = fail_predicate(component);
    let mut sorted: Vec<&FixAction> = actions.iter().collect();
    sorted.sort_by_cached_key(|a| a.text());
    let mut out = Vec::new();
    for schema in Schema::ALL {
        if old.is_none() && matches!(schema, Schema::C | Schema::D) {
            continue;
        }
        let snippets: Vec<Option<&FixAction>> = match schema {
            Schema::C => vec![None],
            Schema::A => sorted
                .iter()
                .filter(|a| a.kind.is_modification())
                .map(|a| Some(*a))
                .collect(),
            Schema::B | Schema::D => sorted.iter().map(|a| Some(*a)).collect(),
        };
        for action in snippets {
            let Some(body) = schema_body(schema, &fail, action.map(|a| &a.snippet), old) else {
                continue;
            };
            let len = body.len();
            let Some(routine) = patch_routine(decl, loc, body) else {
                continue;
            };
            out.push(FixCandidate {
                fault: fault.clone(),
                component: component.clone(),
                component_rank: rank,
                schema,
                fail: (schema != Schema::A).then(|| fail.clone()),
                action: action.cloned(),
                routine,
                span: FixSpan { first: loc, len },
            });
        }
    }
    out
}

/// All actions for a component: modifications, then replacements.
pub fn component_actions(program: &Program, fault: &FaultKey, clause: &Expr, component: &RankedComponent) -> Vec<FixAction> {
    let ctx = FixContext {
        program,
        routine: fault.routine(),
        location: component.component.location,
        clause,
    };
    let mut out = expression_modifications(&ctx, &component.predicate);
    out.extend(expression_replacements(&ctx, &component.predicate));
    out
}

#[derive(Debug, Clone, Default)]
pub struct Candidates {
    pub candidates: Vec<FixCandidate>,
    /// Patched routines that failed to type-check.
    pub ill_typed: usize,
    /// Candidates equal to an earlier one.
    pub duplicates: usize,
    pub components_used: usize,
}

/// Instantiates every schema with the actions of one component. Candidates
/// that do not type-check or repeat a routine already in `seen` are dropped.
pub fn instantiate_candidates(
    program: &Program,
    fault: &FaultKey,
    component: &RankedComponent,
    rank: usize,
    actions: &[FixAction],
    seen: &mut HashSet<RoutineDecl>,
    out: &mut Candidates,
) {
    let id = fault.routine();
    for c in component_candidates(program, fault, component, rank, actions) {
        if seen.contains(&c.routine) {
            out.duplicates += 1;
            continue;
        }
        let patched = program.with_routine(id, c.routine.clone());
        if !check_routine(&patched, id).is_empty() {
            out.ill_typed += 1;
            continue;
        }
        seen.insert(c.routine.clone());
        out.candidates.push(c);
    }
}

/// Candidates for the `max_components` best components of a localization.
pub fn generate_candidates(
    program: &Program,
    loc: &Localization,
    max_components: usize,
) -> Result<Candidates, FixgenError> {
    let decl = program.routine(loc.routine);
    let mut seen: HashSet<RoutineDecl> = HashSet::from([decl.clone()]);
    let mut out = Candidates::default();
    for (rank, component) in loc.ranked.iter().take(max_components).enumerate() {
        let l = component.component.location;
        if decl.stmt_at(l).is_none() && l != decl.exit_location() {
            return Err(FixgenError::NoSuchLocation(l, program.routine_name(loc.routine)));
        }
        let actions = component_actions(program, &loc.fault, &loc.clause, component);
        instantiate_candidates(program, &loc.fault, component, rank, &actions, &mut seen, &mut out);
        out.components_used += 1;
    }
    Ok(out)
}
