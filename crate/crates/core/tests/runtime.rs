mod common;

use common::*;
use confix::runtime::*;
use confix::syntax::{parse_expr, Expr};
use confix::testgen::FaultKey;

#[test]
fn move_item_past_the_end_violates_go_i_th() {
    let p = sorted_set();
    let t = test_case(&p, &format!("{TWO_ELEMENTS} ; s.start ; s.forth ; s.forth ; s.move_item(a)"));
    let r = run_test(&p, &t, DEFAULT_BUDGET);
    let Verdict::Fail(v) = &r.verdict else {
        panic!("{}", r.verdict)
    };
    assert_eq!(v.kind, ViolationKind::Precondition);
    assert_eq!(FaultKey::of(v).display(&p).to_string(), GO_I_TH);
}

#[test]
fn move_item_before_the_start_violates_put_left() {
    let p = sorted_set();
    let t = test_case(&p, &format!("{TWO_ELEMENTS} ; s.move_item(b)"));
    let Verdict::Fail(v) = run_test(&p, &t, DEFAULT_BUDGET).verdict else {
        panic!("expected a failure")
    };
    assert_eq!(FaultKey::of(&v).display(&p).to_string(), PUT_LEFT);
}

#[test]
fn move_item_inside_the_list_passes() {
    let p = sorted_set();
    let t = test_case(&p, &format!("{TWO_ELEMENTS} ; s.start ; s.forth ; s.move_item(a)"));
    let r = run_test(&p, &t, DEFAULT_BUDGET);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.trace.entered.contains(&rid(&p, "move_item")));
}

#[test]
fn driver_precondition_makes_test_invalid() {
    let p = sorted_set();
    let t = test_case(&p, "create s: SORTED_SET.make ; s.forth ; s.forth ; s.forth ; s.forth");
    // `forth` is allowed until the cursor is after the last position.
    assert_eq!(run_test(&p, &t, DEFAULT_BUDGET).verdict, Verdict::Invalid);
    let t = test_case(&p, "create s: SORTED_SET.make ; s.go_i_th(5)");
    assert_eq!(run_test(&p, &t, DEFAULT_BUDGET).verdict, Verdict::Invalid);
}

const SMALL: &str = "
class C
create
    make
feature
    n: INTEGER
    other: C

    make
        do
            n := 0
        end

    bump
        do
            n := n + 1
        ensure
            grew: n > 1
        end

    set (k: INTEGER)
        do
            n := k
        end

    probe
        do
            check small: n < 3 end
        end

    poke
        do
            other.make
        end

    spin
        do
            from until False loop n := n + 1 end
        end

    deep
        do
            deep
        end

    wrap
        do
            n := 9223372036854775807
            n := n + 1
        end

    guarded: BOOLEAN
        do
            Result := other /= Void and other.n = 0
        end

    either: BOOLEAN
        do
            Result := other = Void or other.n = 0
        end
end
";

#[test]
fn postcondition_fails_at_exit_location() {
    let p = parse(SMALL);
    let t = test_case(&p, "create c: C.make ; c.bump");
    let Verdict::Fail(v) = run_test(&p, &t, DEFAULT_BUDGET).verdict else {
        panic!()
    };
    assert_eq!(v.kind, ViolationKind::Postcondition);
    assert_eq!(v.location, at(&p, "bump", 2));
    assert_eq!(v.clause.unwrap().tag, "grew");
}

#[test]
fn check_fails_at_its_statement() {
    let p = parse(SMALL);
    let t = test_case(&p, "create c: C.make ; c.probe");
    assert_eq!(run_test(&p, &t, DEFAULT_BUDGET).verdict, Verdict::Pass);
    let t = test_case(&p, "create c: C.make ; c.set(5) ; c.probe");
    let Verdict::Fail(v) = run_test(&p, &t, DEFAULT_BUDGET).verdict else {
        panic!()
    };
    assert_eq!(v.kind, ViolationKind::Check);
    assert_eq!(v.location, at(&p, "probe", 1));
}

#[test]
fn call_on_void_target_is_a_fault_without_clause() {
    let p = parse(SMALL);
    let t = test_case(&p, "create c: C.make ; c.poke");
    let Verdict::Fail(v) = run_test(&p, &t, DEFAULT_BUDGET).verdict else {
        panic!()
    };
    assert_eq!(v.kind, ViolationKind::VoidCall);
    assert_eq!(v.location, at(&p, "poke", 1));
    assert_eq!(v.clause, None);
    assert_eq!(FaultKey::of(&v).display(&p).to_string(), "C.poke:1:!void");
}

#[test]
fn void_target_from_the_driver_is_invalid() {
    let p = parse(SMALL);
    let t = test_case(&p, "c.make");
    assert_eq!(run_test(&p, &t, DEFAULT_BUDGET).verdict, Verdict::Invalid);
}

#[test]
fn endless_loops_and_recursion_time_out() {
    let p = parse(SMALL);
    for call in ["spin", "deep"] {
        let t = test_case(&p, &format!("create c: C.make ; c.{call}"));
        assert_eq!(run_test_with(&p, &t, 10_000, TraceMode::Off).verdict, Verdict::Timeout, "{call}");
    }
}

#[test]
fn arithmetic_wraps() {
    let p = parse(SMALL);
    let t = test_case(&p, "create c: C.make ; c.wrap");
    let mut d = Driver::new(&p, DEFAULT_BUDGET, TraceMode::Off);
    for s in &t.steps {
        d.step(s).unwrap();
    }
    let Some(Value::Ref(obj)) = d.var("c") else {
        panic!()
    };
    assert_eq!(d.heap().field(obj, 0), Value::Int(i64::MIN));
}

#[test]
fn boolean_operators_short_circuit() {
    let p = parse(SMALL);
    // Both queries would call a feature on Void without short-circuiting.
    let t = test_case(&p, "create c: C.make ; c.guarded ; c.either");
    assert_eq!(run_test(&p, &t, DEFAULT_BUDGET).verdict, Verdict::Pass);
}

#[test]
fn loops_record_their_location_at_every_test() {
    let p = sorted_set();
    let t = test_case(&p, &format!("{TWO_ELEMENTS} ; s.start ; s.forth ; s.move_item(b)"));
    let r = run_test(&p, &t, DEFAULT_BUDGET);
    assert_eq!(r.verdict, Verdict::Pass);
    let mi = rid(&p, "move_item");
    let locs: Vec<u32> = r
        .trace
        .locations()
        .filter(|l| l.routine == mi)
        .map(|l| l.index)
        .collect();
    // b is the second element: one pass through the body, then exit.
    assert_eq!(locs, [1, 3, 2, 4, 5, 6, 2, 4, 5, 2, 7, 8, 9, 10]);
}

#[test]
fn snapshots_evaluate_expressions_in_place() {
    let p = sorted_set();
    let t = test_case(&p, &format!("{TWO_ELEMENTS} ; s.start ; s.forth ; s.forth ; s.move_item(a)"));
    let mi = rid(&p, "move_item");
    let r = run_test_with(&p, &t, DEFAULT_BUDGET, TraceMode::Routine(mi));
    let decl = p.routine(mi);
    let e = |s: &str| parse_expr(s, decl).unwrap();
    let steps: Vec<usize> = r.trace.steps_in(mi).collect();
    let last = *steps.last().unwrap();
    assert_eq!(r.trace.steps[last].location.index, 9);
    assert_eq!(eval_at(&p, &r.trace, last, &e("idx")), Some(Value::Int(3)));
    assert_eq!(eval_at(&p, &r.trace, last, &e("count")), Some(Value::Int(1)));
    assert_eq!(eval_at(&p, &r.trace, last, &e("idx > index")), Some(Value::Bool(true)));
    assert_eq!(eval_at(&p, &r.trace, last, &e("v = Void")), Some(Value::Bool(false)));
    // Commands have no Result, and evaluation leaves the trace alone.
    let before = r.trace.clone();
    assert_eq!(eval_at(&p, &r.trace, last, &Expr::Result), None);
    assert_eq!(eval_at(&p, &r.trace, last, &e("count + idx")), Some(Value::Int(4)));
    assert_eq!(r.trace, before);
    // Other routines carry no snapshot in this mode.
    assert!(r
        .trace
        .steps
        .iter()
        .filter(|s| s.location.routine != mi)
        .all(|s| s.snapshot.is_none()));
}
