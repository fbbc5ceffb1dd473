//! Random test generation, suite files and fault classification.

mod case;
mod gen;
mod suite;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use case::{Arg, Step, TestCase};
pub use gen::{generate_suite, GenConfig, DEFAULT_INT_POOL};
pub use suite::{read_suite, write_suite};

use crate::runtime::{run_test_with, ClauseKind, ClauseRef, TraceMode, Verdict, Violation};
use crate::syntax::{Location, Program, RoutineId};

pub const MAX_PASSING: usize = 25;
pub const MAX_FAILING: usize = 11;

#[derive(Debug, Error)]
pub enum TestgenError {
    #[error("no class of the program has a creation procedure")]
    NoCreatableClass,
    #[error("suite line {line}: {message}")]
    Suite { line: usize, message: String },
}

/// Identity of a fault: where the violation is raised and which clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultKey {
    pub location: Location,
    /// `None` for calls on a void target.
    pub clause: Option<ClauseRef>,
}

impl FaultKey {
    pub fn of(v: &Violation) -> FaultKey {
        FaultKey {
            location: v.location,
            clause: v.clause.clone(),
        }
    }

    /// The routine under fix.
    pub fn routine(&self) -> RoutineId {
        self.location.routine
    }

    pub fn clause_name(&self, program: &Program) -> String {
        match &self.clause {
            Some(c) => format!("{}.{}", program.routine_name(c.routine), c.tag),
            None => "!void".to_string(),
        }
    }

    pub fn display<'a>(&'a self, program: &'a Program) -> FaultKeyDisplay<'a> {
        FaultKeyDisplay { key: self, program }
    }

    /// Matches `[CLASS.]routine:loc:[[CLASS.]routine.]tag`.
    pub fn matches(&self, program: &Program, spec: &str) -> bool {
        let parts: Vec<&str> = spec.split(':').collect();
        let [routine, loc, clause] = parts.as_slice() else {
            return false;
        };
        if program.find_routine(routine) != Some(self.routine()) {
            return false;
        }
        if loc.parse::<u32>().ok() != Some(self.location.index) {
            return false;
        }
        match (&self.clause, clause.rsplit_once('.')) {
            (None, _) => *clause == "!void",
            (Some(c), None) => c.tag == *clause,
            (Some(c), Some((owner, tag))) => {
                c.tag == tag && program.find_routine(owner) == Some(c.routine)
            }
        }
    }

    /// Rebuilds a key from its textual parts, inferring the clause kind from
    /// the location.
    pub fn resolve(program: &Program, routine: &str, loc: u32, clause: &str) -> Option<FaultKey> {
        let r = program.find_routine(routine)?;
        let location = Location {
            routine: r,
            index: loc,
        };
        if clause == "!void" {
            return Some(FaultKey {
                location,
                clause: None,
            });
        }
        let (owner, tag) = clause.rsplit_once('.')?;
        let owner = program.find_routine(owner)?;
        let decl = program.routine(owner);
        let kind = if owner == r && loc == decl.exit_location() {
            ClauseKind::Ensure
        } else if owner == r
            && matches!(decl.stmt_at(loc).map(|s| &s.kind),
                Some(crate::syntax::StmtKind::Check(c)) if c.tag == tag)
        {
            ClauseKind::Check
        } else {
            ClauseKind::Require
        };
        let clause = ClauseRef {
            routine: owner,
            kind,
            tag: tag.to_string(),
        };
        clause.clause(program)?;
        Some(FaultKey {
            location,
            clause: Some(clause),
        })
    }
}

pub struct FaultKeyDisplay<'a> {
    key: &'a FaultKey,
    program: &'a Program,
}

impl fmt::Display for FaultKeyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}",
            self.program.routine_name(self.key.routine()),
            self.key.location.index,
            self.key.clause_name(self.program)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteEntry {
    pub test: TestCase,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TestSuite {
    pub seed: Option<u64>,
    pub entries: Vec<SuiteEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteStats {
    pub passing: usize,
    pub failing: usize,
    pub invalid: usize,
    pub timeout: usize,
}

impl TestSuite {
    /// Indices of passing tests.
    pub fn passing(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| self.entries[i].verdict == Verdict::Pass)
            .collect()
    }

    /// Failing tests grouped by fault, in test order.
    pub fn faults(&self) -> BTreeMap<FaultKey, Vec<usize>> {
        let mut out: BTreeMap<FaultKey, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            if let Verdict::Fail(v) = &e.verdict {
                out.entry(FaultKey::of(v)).or_default().push(i);
            }
        }
        out
    }

    pub fn stats(&self) -> SuiteStats {
        let mut s = SuiteStats::default();
        for e in &self.entries {
            match e.verdict {
                Verdict::Pass => s.passing += 1,
                Verdict::Fail(_) => s.failing += 1,
                Verdict::Invalid => s.invalid += 1,
                Verdict::Timeout => s.timeout += 1,
            }
        }
        s
    }

    /// Finds a fault by its textual form.
    pub fn find_fault(&self, program: &Program, spec: &str) -> Option<FaultKey> {
        self.faults()
            .into_keys()
            .find(|k| k.matches(program, spec))
    }
}

/// Tests for one fault: passing tests that execute the routine under fix and
/// the failing tests of the fault, both capped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultInputs {
    pub fault: FaultKey,
    pub passing: Vec<TestCase>,
    pub failing: Vec<TestCase>,
}

pub fn select_fault_inputs(
    program: &Program,
    suite: &TestSuite,
    fault: &FaultKey,
    budget: u64,
) -> FaultInputs {
    let r = fault.routine();
    let passing = suite
        .passing()
        .into_iter()
        .map(|i| &suite.entries[i].test)
        .filter(|t| {
            run_test_with(program, t, budget, TraceMode::Locations)
                .trace
                .entered
                .contains(&r)
        })
        .take(MAX_PASSING)
        .cloned()
        .collect();
    let failing = suite
        .faults()
        .get(fault)
        .map(|ids| {
            ids.iter()
                .take(MAX_FAILING)
                .map(|&i| suite.entries[i].test.clone())
                .collect()
        })
        .unwrap_or_default();
    FaultInputs {
        fault: fault.clone(),
        passing,
        failing,
    }
}
