//! State-component localization: expressions, predicates, components and
//! their fixme ranking.

mod exprs;
mod predicates;
mod scores;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use rayon::prelude::*;
use thiserror::Error;

pub use exprs::{harvest_expressions, rebase_clause, statement_roots, ExpressionSet, MAX_EXPRESSIONS};
pub use predicates::{build_predicates, complement, Predicate, PredicateRule};
pub use scores::{
    control_dependence, dynamic_score, expression_dependence, fixme_score, parse_rational, ratio,
    to_f64, Rational, ScoreConfig, ScoreRecord,
};

use crate::runtime::{eval_in, run_test_with, TraceMode, Value, DEFAULT_BUDGET};
use crate::syntax::cfg::build_cfg;
use crate::syntax::subexpr::eprox;
use crate::syntax::{expr_to_string, Expr, Program, RoutineId};
use crate::testgen::{FaultInputs, FaultKey, TestCase};

#[derive(Debug, Error)]
pub enum LocalizeError {
    #[error("fault {0} is a call on a void target and names no contract clause")]
    NoClause(String),
    #[error("clause of fault {0} not found in the program")]
    MissingClause(String),
    #[error("invalid score parameters: need 0 < alpha < 1, 0 < beta < 1, gamma >= 0")]
    BadScores,
    #[error("could not start worker threads: {0}")]
    Threads(String),
}

/// `⟨ℓ, p, v⟩`, with the predicate given by its index in the predicate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub location: u32,
    pub predicate: usize,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedComponent {
    pub component: Component,
    pub predicate: Expr,
    pub passing: usize,
    pub failing: usize,
    pub scores: ScoreRecord,
}

impl RankedComponent {
    pub fn predicate_text(&self) -> String {
        expr_to_string(&self.predicate)
    }
}

#[derive(Debug, Clone)]
pub struct LocalizeConfig {
    pub scores: ScoreConfig,
    pub budget: u64,
    pub jobs: usize,
}

impl Default for LocalizeConfig {
    fn default() -> LocalizeConfig {
        LocalizeConfig {
            scores: ScoreConfig::default(),
            budget: DEFAULT_BUDGET,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Localization {
    pub fault: FaultKey,
    pub routine: RoutineId,
    /// The violated clause as seen from the routine under fix.
    pub clause: Expr,
    pub expressions: ExpressionSet,
    pub predicates: Vec<Predicate>,
    /// Components with at least one failing test, best first.
    pub ranked: Vec<RankedComponent>,
    pub passing_tests: usize,
    pub failing_tests: usize,
    pub warnings: Vec<String>,
}

/// Runs `f` over `items` on `jobs` threads, keeping input order.
pub(crate) fn parallel_map<T, U, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<U>, String>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if jobs <= 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| e.to_string())?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

/// The set of components one test defines.
pub fn test_components(
    program: &Program,
    routine: RoutineId,
    predicates: &[Expr],
    test: &TestCase,
    budget: u64,
) -> BTreeSet<Component> {
    let trace = run_test_with(program, test, budget, TraceMode::Routine(routine)).trace;
    let mut out = BTreeSet::new();
    for step in trace.steps_in(routine) {
        let location = trace.steps[step].location.index;
        let snap = &trace.snapshots[trace.steps[step].snapshot.unwrap()];
        for (i, p) in predicates.iter().enumerate() {
            if let Some(Value::Bool(value)) = eval_in(program, snap, p) {
                out.insert(Component {
                    location,
                    predicate: i,
                    value,
                });
            }
        }
    }
    out
}

/// Counts, for every component, the passing and failing tests defining it.
pub fn collect_components(
    program: &Program,
    routine: RoutineId,
    predicates: &[Expr],
    passing: &[TestCase],
    failing: &[TestCase],
    budget: u64,
    jobs: usize,
) -> Result<BTreeMap<Component, (usize, usize)>, LocalizeError> {
    let tests: Vec<(&TestCase, bool)> = passing
        .iter()
        .map(|t| (t, false))
        .chain(failing.iter().map(|t| (t, true)))
        .collect();
    let sets = parallel_map(&tests, jobs, |(t, _)| {
        test_components(program, routine, predicates, t, budget)
    })
    .map_err(LocalizeError::Threads)?;
    let mut counts: BTreeMap<Component, (usize, usize)> = BTreeMap::new();
    for ((_, failed), set) in tests.iter().zip(sets) {
        for c in set {
            let entry = counts.entry(c).or_default();
            if *failed {
                entry.1 += 1;
            } else {
                entry.0 += 1;
            }
        }
    }
    Ok(counts)
}

/// Total order used for ranking: fixme, dyn and cdep descending, then
/// predicate text, location and value.
pub fn rank_order(a: &RankedComponent, b: &RankedComponent) -> std::cmp::Ordering {
    b.scores
        .fixme
        .cmp(&a.scores.fixme)
        .then_with(|| b.scores.dyn_score.cmp(&a.scores.dyn_score))
        .then_with(|| b.scores.cdep.cmp(&a.scores.cdep))
        .then_with(|| a.predicate_text().cmp(&b.predicate_text()))
        .then_with(|| a.component.location.cmp(&b.component.location))
        .then_with(|| a.component.value.cmp(&b.component.value))
}

/// Scores the counted components of a fault and sorts them. Components no
/// failing test defines are dropped.
pub fn rank_components(
    program: &Program,
    fault: &FaultKey,
    clause: &Expr,
    predicates: &[Expr],
    counts: &BTreeMap<Component, (usize, usize)>,
    cfg: &ScoreConfig,
) -> Vec<RankedComponent> {
    let cfg_graph = build_cfg(program.routine(fault.routine()));
    let j = fault.location.index;
    let proximity: Vec<usize> = predicates.iter().map(|p| eprox(p, clause)).collect();
    let max = proximity.iter().copied().max().unwrap_or(0);
    let mut cdeps: BTreeMap<u32, Rational> = BTreeMap::new();
    let mut ranked: Vec<RankedComponent> = counts
        .iter()
        .filter(|(_, (_, f))| *f > 0)
        .map(|(c, &(p, f))| {
            let cdep = cdeps
                .entry(c.location)
                .or_insert_with(|| control_dependence(&cfg_graph, c.location, j))
                .clone();
            let edep = expression_dependence(proximity[c.predicate], max);
            let dyn_score = dynamic_score(p, f, cfg);
            let fixme = fixme_score(&edep, &cdep, &dyn_score);
            RankedComponent {
                component: *c,
                predicate: predicates[c.predicate].clone(),
                passing: p,
                failing: f,
                scores: ScoreRecord {
                    cdep,
                    edep,
                    dyn_score,
                    fixme,
                },
            }
        })
        .collect();
    ranked.sort_by(rank_order);
    ranked
}

/// Full localization for one fault.
pub fn localize(
    program: &Program,
    inputs: &FaultInputs,
    cfg: &LocalizeConfig,
) -> Result<Localization, LocalizeError> {
    if !cfg.scores.is_valid() {
        return Err(LocalizeError::BadScores);
    }
    let fault = &inputs.fault;
    let name = fault.display(program).to_string();
    let Some(clause_ref) = &fault.clause else {
        return Err(LocalizeError::NoClause(name));
    };
    let clause = rebase_clause(program, fault.location, clause_ref)
        .ok_or_else(|| LocalizeError::MissingClause(name.clone()))?;
    let routine = fault.routine();
    let expressions = harvest_expressions(program, routine, &clause);
    let predicates = build_predicates(&expressions);
    let exprs: Vec<Expr> = predicates.iter().map(|p| p.expr.clone()).collect();
    let counts = collect_components(
        program,
        routine,
        &exprs,
        &inputs.passing,
        &inputs.failing,
        cfg.budget,
        cfg.jobs,
    )?;
    let ranked = rank_components(program, fault, &clause, &exprs, &counts, &cfg.scores);
    let mut warnings = Vec::new();
    if inputs.passing.is_empty() {
        warnings.push(format!(
            "no passing test executes {}; dyn uses #p = 0",
            program.routine_name(routine)
        ));
    }
    if expressions.unfolded.len() >= MAX_EXPRESSIONS {
        warnings.push(format!("expression set capped at {MAX_EXPRESSIONS}"));
    }
    Ok(Localization {
        fault: fault.clone(),
        routine,
        clause,
        expressions,
        predicates,
        ranked,
        passing_tests: inputs.passing.len(),
        failing_tests: inputs.failing.len(),
        warnings,
    })
}

/// Tab-separated component table, best first.
pub fn localization_tsv(loc: &Localization) -> String {
    let mut out = String::from("loc\tpredicate\tvalue\t#p\t#f\tcdep\tedep\tdyn\tfixme\n");
    for c in &loc.ranked {
        let s = &c.scores;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            c.component.location,
            c.predicate_text(),
            if c.component.value { "True" } else { "False" },
            c.passing,
            c.failing,
            to_f64(&s.cdep),
            to_f64(&s.edep),
            to_f64(&s.dyn_score),
            to_f64(&s.fixme),
        )
        .unwrap();
    }
    out
}
