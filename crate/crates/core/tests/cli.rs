use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use confix::corpus;
use confix::session::SessionConfig;

fn corpus_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn confix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn corpus_configs_match_the_pinned_entries() {
    for entry in corpus::ALL {
        let text = fs::read_to_string(corpus_file(&format!("{}.conf", entry.name))).unwrap();
        let mut c = SessionConfig::default();
        c.apply_file_text(&text).unwrap();
        assert_eq!((c.gen.seed, c.gen.tests), (entry.seed, entry.tests), "{}", entry.name);
    }
}

#[test]
fn test_lists_faults_and_writes_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let o = confix(&[
        "test",
        path(&corpus_file("sorted_set.cdl")),
        "--config",
        path(&corpus_file("sorted_set.conf")),
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("3000 tests: "), "{out}");
    for f in corpus::SORTED_SET.faults {
        assert!(out.contains(&format!("{f}\t")), "{out}");
    }
    let suite = fs::read_to_string(dir.path().join("sorted_set.suite")).unwrap();
    assert!(suite.contains("verdict"));
}

#[test]
fn fault_free_program_lists_no_faults() {
    let o = confix(&["test", path(&corpus_file("counter.cdl"))]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains(" 0 failing"), "{out}");
    assert_eq!(out.lines().count(), 1, "{out}");
}

#[test]
fn missing_file_is_an_error() {
    let o = confix(&["test", "/nonexistent/prog.cdl"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: /nonexistent/prog.cdl"), "{}", stderr(&o));
}

#[test]
fn type_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.cdl");
    fs::write(&f, "class C feature f do x := 1 end end").unwrap();
    let o = confix(&["test", path(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`x`"), "{}", stderr(&o));
}

#[test]
fn bad_flags_are_rejected() {
    let o = confix(&["fix", path(&corpus_file("door.cdl")), "--alpha", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = confix(&["fix", path(&corpus_file("door.cdl")), "--alpha", "3/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("0 < alpha < 1"), "{}", stderr(&o));
}

#[test]
fn localize_prints_the_component_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = confix(&[
        "localize",
        path(&corpus_file("sorted_set.cdl")),
        "--config",
        path(&corpus_file("sorted_set.conf")),
        "--fault",
        "move_item:10:not_before",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("loc\tpredicate\tvalue\t#p\t#f\tcdep\tedep\tdyn\tfixme\n"));
    assert_eq!(out, fs::read_to_string(dir.path().join("sorted_set.localize.tsv")).unwrap());
}

#[test]
fn unknown_and_ambiguous_faults() {
    let file = corpus_file("sorted_set.cdl");
    let conf = corpus_file("sorted_set.conf");
    let o = confix(&["localize", path(&file), "--config", path(&conf), "--fault", "move_item:3:nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not found"), "{}", stderr(&o));
    let o = confix(&["localize", path(&file), "--config", path(&conf)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("several faults"), "{}", stderr(&o));
}

#[test]
fn fix_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = confix(&["fix", path(&corpus_file("door.cdl")), "--out", path(dir.path()), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("door.fix.txt")).unwrap();
    assert_eq!(stdout(&o), text);
    assert!(text.contains("fix 1: "));
    let jsonl = fs::read_to_string(dir.path().join("door.fix.jsonl")).unwrap();
    assert!(jsonl.lines().count() >= 1);
    assert!(text.contains("seed = 1\ntests = 300\n"), "{text}");
}

#[test]
fn nothing_to_fix_exits_three() {
    let o = confix(&["fix", path(&corpus_file("counter.cdl"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no failing test"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, "tests = 40  # few\n-- a comment\nseed = 9\n").unwrap();
    let o = confix(&["test", path(&corpus_file("door.cdl")), "--config", path(&conf), "--tests", "12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("12 tests: "), "{}", stdout(&o));
    fs::write(&conf, "tests 40\n").unwrap();
    let o = confix(&["test", path(&corpus_file("door.cdl")), "--config", path(&conf)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("config line 1"), "{}", stderr(&o));
}

#[test]
fn saved_suites_replay_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = corpus_file("account.cdl");
    let o = confix(&["test", path(&file), "--out", path(dir.path())]);
    assert!(o.status.success());
    let suite = dir.path().join("account.suite");
    let generated = confix(&["fix", path(&file)]);
    let replayed = confix(&["fix", path(&file), "--suite", path(&suite)]);
    assert_eq!(generated.status.code(), Some(0));
    assert_eq!(replayed.status.code(), Some(0));
    let strip = |s: String| -> String {
        s.lines()
            .filter(|l| !l.starts_with("seed =") && !l.starts_with("tests =") && !l.starts_with("max_steps =") && !l.starts_with("suite ="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(stdout(&generated)), strip(stdout(&replayed)));
}
