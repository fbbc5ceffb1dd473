//! Candidate validation against the fault's tests, and fix reports.

use std::fmt::Write;

use serde::Serialize;
use similar::TextDiff;
use thiserror::Error;

use crate::fixgen::{Candidates, FixCandidate};
use crate::localize::{parallel_map, to_f64, Localization};
use crate::runtime::{run_test_with, TraceMode, Verdict};
use crate::syntax::{expr_to_string, print_routine, print_routine_marked, Program};
use crate::testgen::{FaultInputs, TestCase};

pub const DEFAULT_TOP: usize = 15;

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("could not start worker threads: {0}")]
    Threads(String),
    #[error("could not serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationVerdict {
    /// Index of the candidate in generation order.
    pub candidate: usize,
    pub passed_failing: usize,
    pub passed_passing: usize,
    pub valid: bool,
    /// Verdicts of the failing tests, then of the passing tests.
    pub outcomes: Vec<Verdict>,
}

/// Replays every test of the fault on the patched program. The candidate is
/// valid when all of them pass.
pub fn validate_candidate(
    program: &Program,
    candidate: &FixCandidate,
    index: usize,
    passing: &[TestCase],
    failing: &[TestCase],
    budget: u64,
) -> ValidationVerdict {
    let patched = candidate.program(program);
    let run = |t: &TestCase| run_test_with(&patched, t, budget, TraceMode::Off).verdict;
    let outcomes: Vec<Verdict> = failing.iter().chain(passing).map(run).collect();
    let (f, p) = outcomes.split_at(failing.len());
    let passed_failing = f.iter().filter(|v| **v == Verdict::Pass).count();
    let passed_passing = p.iter().filter(|v| **v == Verdict::Pass).count();
    ValidationVerdict {
        candidate: index,
        passed_failing,
        passed_passing,
        valid: passed_failing == failing.len() && passed_passing == passing.len(),
        outcomes,
    }
}

pub fn validate_all(
    program: &Program,
    candidates: &[FixCandidate],
    inputs: &FaultInputs,
    budget: u64,
    jobs: usize,
) -> Result<Vec<ValidationVerdict>, ValidateError> {
    let indexed: Vec<(usize, &FixCandidate)> = candidates.iter().enumerate().collect();
    parallel_map(&indexed, jobs, |(i, c)| {
        validate_candidate(program, c, *i, &inputs.passing, &inputs.failing, budget)
    })
    .map_err(ValidateError::Threads)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineStats {
    pub passing_tests: usize,
    pub failing_tests: usize,
    pub predicates: usize,
    pub components: usize,
    pub components_used: usize,
    pub candidates: usize,
    pub ill_typed: usize,
    pub duplicates: usize,
    pub valid: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixReport {
    pub fault: String,
    pub clause: String,
    pub routine_name: String,
    /// Settings of the session, logged for reproducibility.
    pub header: Vec<(String, String)>,
    pub stats: PipelineStats,
    pub fixes: Vec<FixCandidate>,
    pub original: String,
    pub notes: Vec<String>,
}

impl FixReport {
    pub fn is_empty(&self) -> bool {
        self.fixes.is_empty()
    }
}

/// Valid candidates ordered by the fixme of their component, then component
/// rank, schema letter and snippet text.
pub fn rank_valid(candidates: &[FixCandidate], verdicts: &[ValidationVerdict]) -> Vec<FixCandidate> {
    let mut valid: Vec<&FixCandidate> = verdicts
        .iter()
        .filter(|v| v.valid)
        .map(|v| &candidates[v.candidate])
        .collect();
    valid.sort_by(|a, b| {
        b.fixme()
            .cmp(a.fixme())
            .then(a.component_rank.cmp(&b.component_rank))
            .then(a.schema.cmp(&b.schema))
            .then_with(|| a.snippet_text().cmp(&b.snippet_text()))
            .then_with(|| a.patch_text().cmp(&b.patch_text()))
    });
    valid.into_iter().cloned().collect()
}

pub fn rank_and_report(
    program: &Program,
    loc: &Localization,
    generated: &Candidates,
    verdicts: &[ValidationVerdict],
    top: usize,
    header: Vec<(String, String)>,
) -> FixReport {
    let ranked = rank_valid(&generated.candidates, verdicts);
    let mut notes = vec![
        "schema a is instantiated with modification snippets only".to_string(),
        "fixes of equal score are ordered by component rank, schema letter, then snippet text"
            .to_string(),
    ];
    notes.extend(loc.warnings.iter().cloned());
    if ranked.len() > top {
        notes.push(format!(
            "{} valid fixes, reporting the top {top}",
            ranked.len()
        ));
    }
    if ranked.is_empty() {
        notes.push("no candidate passes all tests".to_string());
    }
    let stats = PipelineStats {
        passing_tests: loc.passing_tests,
        failing_tests: loc.failing_tests,
        predicates: loc.predicates.len(),
        components: loc.ranked.len(),
        components_used: generated.components_used,
        candidates: generated.candidates.len(),
        ill_typed: generated.ill_typed,
        duplicates: generated.duplicates,
        valid: ranked.len(),
    };
    FixReport {
        fault: loc.fault.display(program).to_string(),
        clause: expr_to_string(&loc.clause),
        routine_name: program.routine_name(loc.routine),
        header,
        stats,
        fixes: ranked.into_iter().take(top).collect(),
        original: print_routine(program.routine(loc.routine)),
        notes,
    }
}

fn component_text(c: &FixCandidate) -> String {
    format!(
        "<{}, {}, {}>",
        c.component.component.location,
        c.component.predicate_text(),
        if c.component.component.value { "True" } else { "False" }
    )
}

pub fn unified_patch(report: &FixReport, fix: &FixCandidate) -> String {
    let patched = print_routine(&fix.routine);
    TextDiff::from_lines(&report.original, &patched)
        .unified_diff()
        .context_radius(3)
        .header(
            &format!("a/{}", report.routine_name),
            &format!("b/{}", report.routine_name),
        )
        .to_string()
}

pub fn report_text(report: &FixReport) -> String {
    let mut out = String::new();
    let s = &report.stats;
    writeln!(out, "fault: {}", report.fault).unwrap();
    writeln!(out, "clause: {}", report.clause).unwrap();
    for (k, v) in &report.header {
        writeln!(out, "{k} = {v}").unwrap();
    }
    writeln!(out, "tests: {} passing, {} failing", s.passing_tests, s.failing_tests).unwrap();
    writeln!(
        out,
        "components: {} ranked from {} predicates, {} used",
        s.components, s.predicates, s.components_used
    )
    .unwrap();
    writeln!(
        out,
        "candidates: {} validated ({} ill-typed and {} duplicates dropped), {} valid",
        s.candidates, s.ill_typed, s.duplicates, s.valid
    )
    .unwrap();
    for n in &report.notes {
        writeln!(out, "note: {n}").unwrap();
    }
    for (i, fix) in report.fixes.iter().enumerate() {
        writeln!(out).unwrap();
        writeln!(
            out,
            "fix {}: fixme {:.6}, schema {}, component {}",
            i + 1,
            to_f64(fix.fixme()),
            fix.schema,
            component_text(fix)
        )
        .unwrap();
        if let Some(a) = &fix.action {
            writeln!(out, "  action: {} `{}`", a.kind.name(), a.text()).unwrap();
        }
        for line in print_routine_marked(&fix.routine, Some(fix.span)).lines() {
            writeln!(out, "  {line}").unwrap();
        }
    }
    out
}

#[derive(Serialize)]
struct FixRecord<'a> {
    fault: &'a str,
    rank: usize,
    fixme: String,
    fixme_value: f64,
    schema: String,
    component: ComponentRecord,
    fail: Option<String>,
    action: Option<&'static str>,
    snippet: Option<String>,
    patch: String,
}

#[derive(Serialize)]
struct ComponentRecord {
    location: u32,
    predicate: String,
    value: bool,
}

/// One JSON object per reported fix.
pub fn report_jsonl(report: &FixReport) -> Result<String, ValidateError> {
    let mut out = String::new();
    for (i, fix) in report.fixes.iter().enumerate() {
        let record = FixRecord {
            fault: &report.fault,
            rank: i + 1,
            fixme: fix.fixme().to_string(),
            fixme_value: to_f64(fix.fixme()),
            schema: fix.schema.to_string(),
            component: ComponentRecord {
                location: fix.component.component.location,
                predicate: fix.component.predicate_text(),
                value: fix.component.component.value,
            },
            fail: fix.fail.as_ref().map(expr_to_string),
            action: fix.action.as_ref().map(|a| a.kind.name()),
            snippet: fix.action.as_ref().map(|a| a.text()),
            patch: unified_patch(report, fix),
        };
        out.push_str(&serde_json::to_string(&record)?);
        out.push('\n');
    }
    Ok(out)
}
