mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use common::*;
use confix::corpus;
use confix::localize::*;
use confix::syntax::cfg::build_cfg;
use confix::syntax::subexpr::eprox;
use confix::syntax::{expr_to_string, parse_expr, Expr, Program};
use confix::testgen::FaultKey;
use proptest::prelude::*;

const BEFORE: &str = "
class CURSOR
create
    make
feature
    index: INTEGER

    make
        do
            index := 0
        end

    before: BOOLEAN
        do
            Result := (index = 0)
        end
end
";

fn before_program() -> (Program, Expr) {
    let p = parse(BEFORE);
    let clause = parse_expr("index > 1", p.routine(rid(&p, "before"))).unwrap();
    (p, clause)
}

fn texts<'a>(es: impl IntoIterator<Item = &'a Expr>) -> BTreeSet<String> {
    es.into_iter().map(expr_to_string).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn expressions_of_before() {
    let (p, clause) = before_program();
    let es = harvest_expressions(&p, rid(&p, "before"), &clause);
    let want = set(&["Result", "index", "index = 0", "index > 1"]);
    assert_eq!(texts(es.base.keys()), want);
    // All members are primitive, so unfolding adds nothing.
    assert_eq!(texts(es.unfolded.keys()), want);
}

#[test]
fn predicates_of_before() {
    let (p, clause) = before_program();
    let es = harvest_expressions(&p, rid(&p, "before"), &clause);
    let preds = build_predicates(&es);
    let got = texts(preds.iter().map(|p| &p.expr));
    // `index ~ 0` for all six comparisons, and of `index ~ 1` the two that
    // come from the clause and its complement.
    let want = set(&[
        "Result",
        "not Result",
        "index = 0",
        "index /= 0",
        "index < 0",
        "index >= 0",
        "index <= 0",
        "index > 0",
        "index > 1",
        "index <= 1",
    ]);
    assert_eq!(got, want);
    assert_eq!(preds.len(), want.len());
    let rule = |t: &str| preds.iter().find(|p| expr_to_string(&p.expr) == t).unwrap().rule;
    assert_eq!(rule("index = 0"), PredicateRule::Boolean);
    assert_eq!(rule("index < 0"), PredicateRule::Comparison);
    assert_eq!(rule("index > 0"), PredicateRule::Complement);
}

#[test]
fn voidness_and_integer_pairs() {
    let p = sorted_set();
    let mi = rid(&p, "move_item");
    let clause = parse_expr("0 <= idx and idx <= count + 1", p.routine(mi)).unwrap();
    let es = harvest_expressions(&p, mi, &clause);
    let preds = build_predicates(&es);
    let got = texts(preds.iter().map(|p| &p.expr));
    for t in ["v = Void", "v /= Void", "idx < index", "index <= idx", "idx = 0", "idx /= 0", "found", "not found"] {
        assert!(got.contains(t), "missing {t}");
    }
    // Never compares an expression with itself.
    for pr in &preds {
        if let Expr::Binary(_, l, r) = &pr.expr {
            assert_ne!(l, r, "{}", expr_to_string(&pr.expr));
        }
    }
    assert!(preds.iter().all(|p| !matches!(p.expr, Expr::Int(_) | Expr::Bool(_))));
}

#[test]
fn edep_in_before() {
    let (p, clause) = before_program();
    let es = harvest_expressions(&p, rid(&p, "before"), &clause);
    let preds: Vec<Expr> = build_predicates(&es).into_iter().map(|p| p.expr).collect();
    let max = preds.iter().map(|q| eprox(q, &clause)).max().unwrap();
    assert_eq!(max, 3);
    let d = |t: &str| {
        let e = parse_expr(t, p.routine(rid(&p, "before"))).unwrap();
        expression_dependence(eprox(&e, &clause), max)
    };
    assert_eq!(d("index = 0"), ratio(1, 3));
    assert_eq!(d("index > 1"), ratio(1, 1));
    assert_eq!(d("Result"), ratio(0, 1));

    // With `index = 0` as the clause, the bare `index` shares one of three.
    let c0 = parse_expr("index = 0", p.routine(rid(&p, "before"))).unwrap();
    assert_eq!(expression_dependence(eprox(&Expr::feature("index", vec![]), &c0), eprox(&c0, &c0)), ratio(1, 3));
    assert_eq!(expression_dependence(3, 0), ratio(0, 1));
}

#[test]
fn control_dependence_in_move_item() {
    let p = sorted_set();
    let cfg = build_cfg(p.routine(rid(&p, "move_item")));
    assert_eq!(control_dependence(&cfg, 9, 9), ratio(1, 1));
    assert_eq!(control_dependence(&cfg, 10, 9), ratio(0, 1));
    // Longest distance to 9 is from the assignment at 1: 1, 3, 2, 7, 8, 9.
    assert_eq!(control_dependence(&cfg, 1, 9), ratio(0, 1));
    assert_eq!(control_dependence(&cfg, 8, 9), ratio(4, 5));
    assert_eq!(control_dependence(&cfg, 4, 8), ratio(0, 1));
    let single = parse("class A feature n: INTEGER f do n := 1 end end");
    let c = build_cfg(single.routine(rid(&single, "f")));
    assert_eq!(control_dependence(&c, 1, 1), ratio(1, 1));
}

/// Partial sums `Σ_{i≤n} α^i` for n up to `max`.
fn alpha_sums(alpha: &Rational, max: usize) -> Vec<Rational> {
    let mut sums = vec![ratio(0, 1)];
    let mut power = ratio(1, 1);
    for _ in 0..max {
        power = power * alpha;
        sums.push(sums.last().unwrap() + &power);
    }
    sums
}

/// `γ + Σ_{i≤#f} α^i − β Σ_{i≤#p} α^i`
fn dyn_series(p: usize, f: usize, cfg: &ScoreConfig) -> Rational {
    let sums = alpha_sums(&cfg.alpha, p.max(f));
    series_with(&sums, p, f, cfg)
}

fn series_with(sums: &[Rational], p: usize, f: usize, cfg: &ScoreConfig) -> Rational {
    &cfg.gamma + &sums[f] - &cfg.beta * &sums[p]
}

#[test]
fn dyn_matches_series_on_grid() {
    let cfg = ScoreConfig::default();
    let sums = alpha_sums(&cfg.alpha, 50);
    let (lo, hi) = (ratio(2, 3), ratio(3, 2));
    for p in 0..=50 {
        for f in 0..=50 {
            let d = dynamic_score(p, f, &cfg);
            assert_eq!(d, series_with(&sums, p, f, &cfg), "({p}, {f})");
            assert!(d >= lo && d < hi, "({p}, {f})");
        }
    }
    assert_eq!(dynamic_score(0, 0, &cfg), ratio(1, 1));
    assert_eq!(dynamic_score(0, 1, &cfg), ratio(4, 3));
}

#[test]
fn dyn_is_monotone() {
    let cfg = ScoreConfig::default();
    for n in 0..20 {
        for m in 0..20 {
            assert!(dynamic_score(n, m + 1, &cfg) > dynamic_score(n, m, &cfg));
            assert!(dynamic_score(n + 1, m, &cfg) < dynamic_score(n, m, &cfg));
        }
    }
}

#[test]
fn dyn_can_be_negative_when_alpha_plus_beta_exceeds_one() {
    let cfg = ScoreConfig {
        alpha: ratio(1, 2),
        beta: ratio(9, 10),
        gamma: ratio(0, 1),
    };
    assert!(cfg.is_valid());
    // 1/2 − 9/10 · (1 − 2^−10) < 0
    assert!(dynamic_score(10, 1, &cfg) < ratio(0, 1));
    assert_eq!(dynamic_score(10, 1, &cfg), dyn_series(10, 1, &cfg));
}

#[test]
fn fixme_examples() {
    let x = ratio(2, 7);
    assert_eq!(fixme_score(&x, &x, &x), x);
    assert_eq!(fixme_score(&ratio(1, 1), &ratio(1, 1), &ratio(3, 2)), ratio(9, 8));
    assert_eq!(fixme_score(&ratio(0, 1), &ratio(1, 1), &ratio(1, 1)), ratio(0, 1));
    assert_eq!(fixme_score(&ratio(1, 1), &ratio(0, 1), &ratio(1, 1)), ratio(0, 1));
}

fn arb_unit() -> impl Strategy<Value = Rational> {
    (1i64..1000, 1i64..1000).prop_map(|(a, b)| ratio(a.min(b), a.max(b) + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dyn_positive_with_a_failing_test(
        alpha in arb_unit(),
        beta in arb_unit(),
        gamma in (0i64..100, 1i64..50).prop_map(|(n, d)| ratio(n, d)),
        p in 0usize..60,
        f in 1usize..60,
    ) {
        let cfg = ScoreConfig { alpha, beta, gamma };
        prop_assert!(cfg.is_valid());
        let d = dynamic_score(p, f, &cfg);
        prop_assert_eq!(&d, &dyn_series(p, f, &cfg));
        // Positivity needs the passing weights to stay below the first
        // failing one: β·α/(1−α) ≤ α + γ, which α + β ≤ 1 guarantees.
        if &cfg.alpha + &cfg.beta <= ratio(1, 1) {
            prop_assert!(d > ratio(0, 1));
        }
    }

    #[test]
    fn fixme_lies_between_its_inputs(e in arb_unit(), c in arb_unit(), d in arb_unit()) {
        let h = fixme_score(&e, &c, &d);
        let lo = e.clone().min(c.clone()).min(d.clone());
        let hi = e.max(c).max(d);
        prop_assert!(lo <= h && h <= hi);
    }

    #[test]
    fn ranking_follows_dyn(p1 in 0usize..30, f1 in 1usize..30, p2 in 0usize..30, f2 in 1usize..30) {
        let (r1, r2) = rank_pair((p1, f1), (p2, f2));
        let cfg = ScoreConfig::default();
        let (d1, d2) = (dynamic_score(p1, f1, &cfg), dynamic_score(p2, f2, &cfg));
        prop_assert_eq!(r1 < r2, d1 > d2 || (d1 == d2 && r1 < r2));
        if f1 > f2 && p1 == p2 {
            prop_assert!(r1 < r2);
        }
        if p1 < p2 && f1 == f2 {
            prop_assert!(r1 < r2);
        }
    }
}

/// Ranks two components that differ only in their counts, returning their
/// positions.
fn rank_pair(first: (usize, usize), second: (usize, usize)) -> (usize, usize) {
    static SITE: OnceLock<(Program, FaultKey, Expr)> = OnceLock::new();
    let (p, key, clause) = SITE.get_or_init(|| {
        let p = sorted_set();
        let (_, key) = fault(corpus::SORTED_SET, GO_I_TH);
        let clause = rebase_clause(&p, key.location, key.clause.as_ref().unwrap()).unwrap();
        (p, key, clause)
    });
    let preds = vec![parse_expr("idx > count", p.routine(rid(p, "move_item"))).unwrap()];
    let comp = |value| Component {
        location: 9,
        predicate: 0,
        value,
    };
    let counts = BTreeMap::from([(comp(true), first), (comp(false), second)]);
    let ranked = rank_components(p, key, clause, &preds, &counts, &ScoreConfig::default());
    let pos = |v| ranked.iter().position(|r| r.component.value == v).unwrap();
    (pos(true), pos(false))
}

#[test]
fn more_failures_rank_higher() {
    assert_eq!(rank_pair((2, 3), (2, 1)), (0, 1));
    assert_eq!(rank_pair((2, 1), (2, 3)), (1, 0));
    assert_eq!(rank_pair((1, 2), (4, 2)), (0, 1));
}

#[test]
fn components_without_failures_are_dropped() {
    let p = sorted_set();
    let (_, key) = fault(corpus::SORTED_SET, GO_I_TH);
    let clause = rebase_clause(&p, key.location, key.clause.as_ref().unwrap()).unwrap();
    let preds = vec![parse_expr("idx > count", p.routine(rid(&p, "move_item"))).unwrap()];
    let c = |location| Component {
        location,
        predicate: 0,
        value: true,
    };
    let counts = BTreeMap::from([(c(8), (3, 0)), (c(9), (3, 2)), (c(10), (1, 5))]);
    let ranked = rank_components(&p, &key, &clause, &preds, &counts, &ScoreConfig::default());
    let locs: Vec<u32> = ranked.iter().map(|r| r.component.location).collect();
    // Location 10 cannot reach the call at 9, so its fixme is 0.
    assert_eq!(locs, [9, 10]);
    assert_eq!(ranked[1].scores.fixme, ratio(0, 1));
}

#[test]
fn rebased_precondition_of_go_i_th() {
    let p = sorted_set();
    let (_, key) = fault(corpus::SORTED_SET, GO_I_TH);
    let clause = rebase_clause(&p, key.location, key.clause.as_ref().unwrap()).unwrap();
    assert_eq!(expr_to_string(&clause), "0 <= idx and idx <= count + 1");
}

#[test]
fn every_test_reaching_remove_sees_a_non_void_argument() {
    let p = sorted_set();
    let mi = rid(&p, "move_item");
    let preds = vec![parse_expr("v = Void", p.routine(mi)).unwrap()];
    let (inputs, _) = localization(corpus::SORTED_SET, PUT_LEFT);
    for t in inputs.passing.iter().chain(&inputs.failing) {
        let comps = test_components(&p, mi, &preds, t, confix::runtime::DEFAULT_BUDGET);
        let at8: Vec<&Component> = comps.iter().filter(|c| c.location == 8).collect();
        assert_eq!(at8.len(), 1, "{t}");
        assert!(!at8[0].value);
    }
}

#[test]
fn one_test_can_define_both_values() {
    let p = sorted_set();
    let mi = rid(&p, "move_item");
    let preds = vec![parse_expr("found", p.routine(mi)).unwrap()];
    let t = test_case(&p, &format!("{TWO_ELEMENTS} ; s.start ; s.forth ; s.move_item(b)"));
    let comps = test_components(&p, mi, &preds, &t, confix::runtime::DEFAULT_BUDGET);
    let at2: BTreeSet<bool> = comps.iter().filter(|c| c.location == 2).map(|c| c.value).collect();
    assert_eq!(at2, BTreeSet::from([false, true]));
}

#[test]
fn put_left_fault_is_characterized_by_before() {
    let (_, loc) = localization(corpus::SORTED_SET, PUT_LEFT);
    let top: Vec<String> = loc
        .ranked
        .iter()
        .take(10)
        .map(|r| format!("{} {}", r.predicate_text(), r.component.value))
        .collect();
    assert!(
        top.iter().any(|t| t == "before true" || t == "index = 0 true" || t == "not before false"),
        "{top:?}"
    );
}

#[test]
fn ranking_is_sorted_and_deterministic() {
    let (inputs, a) = localization(corpus::SORTED_SET, GO_I_TH);
    let p = sorted_set();
    let cfg = LocalizeConfig {
        jobs: 4,
        ..LocalizeConfig::default()
    };
    let b = localize(&p, &inputs, &cfg).unwrap();
    assert_eq!(a.ranked, b.ranked);
    assert_eq!(localization_tsv(&a), localization_tsv(&b));
    for w in a.ranked.windows(2) {
        assert!(rank_order(&w[0], &w[1]).is_lt());
    }
    assert!(a.ranked.iter().all(|r| r.failing > 0));
    let zero = ratio(0, 1);
    let one = ratio(1, 1);
    for r in &a.ranked {
        let s = &r.scores;
        assert!(s.edep >= zero && s.edep <= one && s.cdep >= zero && s.cdep <= one);
    }
}

#[test]
fn empty_passing_set_warns() {
    let p = sorted_set();
    let (mut inputs, _) = localization(corpus::SORTED_SET, GO_I_TH);
    inputs.passing.clear();
    let loc = localize(&p, &inputs, &LocalizeConfig::default()).unwrap();
    assert!(loc.warnings.iter().any(|w| w.contains("#p = 0")), "{:?}", loc.warnings);
    assert!(!loc.ranked.is_empty());
}

#[test]
fn void_call_faults_are_not_localized() {
    let p = parse(
        "class C create make feature other: C make do end poke do other.make end end",
    );
    let t = test_case(&p, "create c: C.make ; c.poke");
    let confix::runtime::Verdict::Fail(v) = confix::runtime::run_test(&p, &t, 1000).verdict else {
        panic!()
    };
    let inputs = confix::testgen::FaultInputs {
        fault: confix::testgen::FaultKey::of(&v),
        passing: vec![],
        failing: vec![t],
    };
    assert!(matches!(
        localize(&p, &inputs, &LocalizeConfig::default()),
        Err(LocalizeError::NoClause(_))
    ));
}
