//! Line-oriented suite files.
//!
//! ```text
//! -- seed 7
//! test 0 { create v1: SORTED_SET.make ; create v2: ELEMENT.make(1) ; v1.extend(v2) }
//! verdict pass
//! test 1 { ... }
//! verdict fail SORTED_SET.move_item 9 SORTED_SET.go_i_th.valid_index
//! ```

use std::fmt::Write;

use super::case::{Arg, Step, TestCase};
use super::{FaultKey, SuiteEntry, TestSuite, TestgenError};
use crate::runtime::{ClauseKind, Verdict, Violation, ViolationKind};
use crate::syntax::Program;

pub fn write_suite(program: &Program, suite: &TestSuite) -> String {
    let mut out = String::new();
    if let Some(seed) = suite.seed {
        writeln!(out, "-- seed {seed}").unwrap();
    }
    for e in &suite.entries {
        writeln!(out, "{}", e.test).unwrap();
        let verdict = match &e.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Invalid => "invalid".to_string(),
            Verdict::Timeout => "timeout".to_string(),
            Verdict::Fail(v) => {
                let key = FaultKey::of(v);
                format!(
                    "fail {} {} {}",
                    program.routine_name(key.routine()),
                    key.location.index,
                    key.clause_name(program)
                )
            }
        };
        writeln!(out, "verdict {verdict}").unwrap();
    }
    out
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, TestgenError> {
    Err(TestgenError::Suite {
        line,
        message: message.into(),
    })
}

fn parse_arg(s: &str) -> Arg {
    match s {
        "True" => Arg::Bool(true),
        "False" => Arg::Bool(false),
        "Void" => Arg::Void,
        _ => match s.parse::<i64>() {
            Ok(n) => Arg::Int(n),
            Err(_) => Arg::Var(s.to_string()),
        },
    }
}

/// Splits `name(a, b)` into the name and its arguments.
fn parse_call(s: &str) -> Option<(&str, Vec<Arg>)> {
    match s.split_once('(') {
        None => Some((s.trim(), Vec::new())),
        Some((name, rest)) => {
            let inner = rest.trim().strip_suffix(')')?;
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(|a| parse_arg(a.trim())).collect()
            };
            Some((name.trim(), args))
        }
    }
}

fn parse_step(s: &str) -> Option<Step> {
    if let Some(rest) = s.strip_prefix("create ") {
        let (var, rest) = rest.split_once(':')?;
        let (class, call) = rest.trim().split_once('.')?;
        let (creator, args) = parse_call(call)?;
        return Some(Step::Create {
            var: var.trim().to_string(),
            class: class.to_string(),
            creator: creator.to_string(),
            args,
        });
    }
    let (var, call) = s.split_once('.')?;
    let (routine, args) = parse_call(call)?;
    Some(Step::Invoke {
        var: var.trim().to_string(),
        routine: routine.to_string(),
        args,
    })
}

fn parse_test(line: &str, n: usize, seed: Option<u64>) -> Result<TestCase, TestgenError> {
    let rest = line.strip_prefix("test ").unwrap();
    let Some((id, body)) = rest.split_once('{') else {
        return err(n, "expected `{`");
    };
    let Ok(id) = id.trim().parse::<u32>() else {
        return err(n, "bad test id");
    };
    let Some(body) = body.trim().strip_suffix('}') else {
        return err(n, "expected `}`");
    };
    let mut steps = Vec::new();
    for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        match parse_step(part) {
            Some(s) => steps.push(s),
            None => return err(n, format!("bad step `{part}`")),
        }
    }
    Ok(TestCase { id, steps, seed })
}

fn parse_verdict(program: &Program, text: &str, n: usize) -> Result<Verdict, TestgenError> {
    let words: Vec<&str> = text.split_whitespace().collect();
    match words.as_slice() {
        ["pass"] => Ok(Verdict::Pass),
        ["invalid"] => Ok(Verdict::Invalid),
        ["timeout"] => Ok(Verdict::Timeout),
        ["fail", routine, loc, clause] => {
            let Ok(loc) = loc.parse::<u32>() else {
                return err(n, "bad location");
            };
            let Some(key) = FaultKey::resolve(program, routine, loc, clause) else {
                return err(n, format!("unknown fault `{routine} {loc} {clause}`"));
            };
            let kind = match key.clause.as_ref().map(|c| c.kind) {
                None => ViolationKind::VoidCall,
                Some(ClauseKind::Require) => ViolationKind::Precondition,
                Some(ClauseKind::Ensure) => ViolationKind::Postcondition,
                Some(ClauseKind::Check) => ViolationKind::Check,
            };
            Ok(Verdict::Fail(Violation {
                kind,
                location: key.location,
                clause: key.clause,
            }))
        }
        _ => err(n, format!("bad verdict `{text}`")),
    }
}

pub fn read_suite(program: &Program, text: &str) -> Result<TestSuite, TestgenError> {
    let mut suite = TestSuite::default();
    let mut pending: Option<TestCase> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix("--") {
            if let Some(seed) = c.trim().strip_prefix("seed ") {
                suite.seed = seed.trim().parse().ok();
            }
            continue;
        }
        if line.starts_with("test ") {
            if pending.is_some() {
                return err(n, "test without verdict");
            }
            pending = Some(parse_test(line, n, suite.seed)?);
        } else if let Some(v) = line.strip_prefix("verdict ") {
            let Some(test) = pending.take() else {
                return err(n, "verdict without test");
            };
            let verdict = parse_verdict(program, v, n)?;
            suite.entries.push(SuiteEntry { test, verdict });
        } else {
            return err(n, format!("unexpected `{line}`"));
        }
    }
    if pending.is_some() {
        return err(text.lines().count(), "test without verdict");
    }
    Ok(suite)
}
