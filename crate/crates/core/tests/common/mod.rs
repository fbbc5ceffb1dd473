#![allow(dead_code)]

use confix::corpus::{self, CorpusEntry};
use confix::localize::Localization;
use confix::session::FixOutcome;
use confix::syntax::{parse_program, Location, Program, RoutineId};
use confix::testgen::{read_suite, FaultInputs, FaultKey, TestCase, TestSuite};

pub const GO_I_TH: &str = "SORTED_SET.move_item:9:SORTED_SET.go_i_th.valid_index";
pub const PUT_LEFT: &str = "SORTED_SET.move_item:10:SORTED_SET.put_left.not_before";
pub const VISIT_TABLE: &str = "LATEX_TRANSLATOR.visit_table:3:TABLE.column_count.not_empty";

/// A sorted set holding two elements, `a` (key 1) then `b` (key 2).
pub const TWO_ELEMENTS: &str = "create s: SORTED_SET.make ; create a: ELEMENT.make(1) ; \
     create b: ELEMENT.make(2) ; s.extend(a) ; s.extend(b)";

pub fn sorted_set() -> Program {
    corpus::SORTED_SET.program()
}

pub fn parse(src: &str) -> Program {
    parse_program(src).unwrap_or_else(|e| panic!("{e}"))
}

pub fn rid(program: &Program, name: &str) -> RoutineId {
    program
        .find_routine(name)
        .unwrap_or_else(|| panic!("no routine {name}"))
}

pub fn at(program: &Program, routine: &str, index: u32) -> Location {
    Location {
        routine: rid(program, routine),
        index,
    }
}

pub fn suite(entry: CorpusEntry) -> TestSuite {
    entry.session().suite().unwrap()
}

pub fn fault(entry: CorpusEntry, spec: &str) -> (TestSuite, FaultKey) {
    let s = suite(entry);
    let program = entry.program();
    let key = s
        .find_fault(&program, spec)
        .unwrap_or_else(|| panic!("fault {spec} not reproduced"));
    (s, key)
}

pub fn localization(entry: CorpusEntry, spec: &str) -> (FaultInputs, Localization) {
    let (s, key) = fault(entry, spec);
    entry.session().localize(&s, &key).unwrap()
}

pub fn fix(entry: CorpusEntry, spec: &str) -> FixOutcome {
    let (s, key) = fault(entry, spec);
    entry.session().fix(&s, &key).unwrap()
}

/// A test written in suite syntax.
pub fn test_case(program: &Program, body: &str) -> TestCase {
    let text = format!("test 0 {{ {body} }}\nverdict pass\n");
    read_suite(program, &text).unwrap().entries.remove(0).test
}
