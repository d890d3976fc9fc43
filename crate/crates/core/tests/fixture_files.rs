use clonesmith::fixtures::{self, Source};
use clonesmith::verify::{run_criterion, verify_fixture_suite, verify_fixtures, AcceptanceOptions, FixtureSet};
use clonesmith::{Error, TernaryOp};

fn exported() -> (tempfile::TempDir, FixtureSet) {
    let dir = tempfile::tempdir().unwrap();
    FixtureSet::bundled().export_dir(dir.path()).unwrap();
    let set = FixtureSet::load_dir(dir.path()).unwrap();
    (dir, set)
}

/// Rewrites one fixture file with a single entry moved to another value.
fn flip(dir: &std::path::Path, name: &str, triple: [u8; 3]) {
    let path = dir.join(format!("{name}.json"));
    let op = TernaryOp::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let n = op.size();
    let mut table = op.table().to_vec();
    let i = (triple[0] as usize * n + triple[1] as usize) * n + triple[2] as usize;
    table[i] = (table[i] + 1) % n as u8;
    let bad = TernaryOp::new(op.universe().clone(), table).unwrap();
    std::fs::write(path, bad.to_json()).unwrap();
}

#[test]
fn bundled_suite_passes() {
    let report = verify_fixture_suite();
    assert!(report.passed(), "{report}");
    for table in ["Table 1", "Table 2", "Table 3"] {
        assert!(report.items.iter().any(|i| i.table == table));
    }
}

#[test]
fn export_and_reload_are_byte_identical() {
    let (dir, set) = exported();
    for (a, b) in set.fixtures().iter().zip(fixtures::all()) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.op.table(), b.op.table(), "{}", a.name);
        assert_eq!(a.op.universe().labels(), b.op.universe().labels());
        let text = std::fs::read_to_string(dir.path().join(format!("{}.json", a.name))).unwrap();
        assert_eq!(text.trim_end(), b.op.to_json());
    }
    assert!(verify_fixtures(&set).passed());
}

#[test]
fn missing_file_is_reported_as_missing() {
    let (dir, _) = exported();
    std::fs::remove_file(dir.path().join("g3_1_1b.json")).unwrap();
    match FixtureSet::load_dir(dir.path()) {
        Err(Error::FixtureMissing(p)) => assert!(p.ends_with("g3_1_1b.json")),
        other => panic!("expected a missing fixture, got {other:?}"),
    }
}

#[test]
fn corrupted_f1_fails_under_table_3() {
    let (dir, _) = exported();
    let u = fixtures::five_universe();
    let t = ["1b", "1", "2b"].map(|l| u.parse_element(l).unwrap());
    flip(dir.path(), "f1", t);
    let set = FixtureSet::load_dir(dir.path()).unwrap();
    let report = verify_fixtures(&set);
    assert!(!report.passed());
    let failures: Vec<_> = report.failures().collect();
    assert!(failures.iter().all(|i| i.table == "Table 3"), "{report}");
    assert!(failures.iter().any(|i| i.row == "f1" && i.detail.contains("(1b,1,2b)")), "{report}");
    let c4 = run_criterion(4, &set, &AcceptanceOptions::default());
    assert!(!c4.passed);
    assert!(c4.detail.contains("Table 3"));
}

#[test]
fn corrupted_table2_row_is_named() {
    let (dir, _) = exported();
    // value at (1,2,3) of M2 in labels 1..4
    flip(dir.path(), "M2", [0, 1, 2]);
    let report = verify_fixtures(&FixtureSet::load_dir(dir.path()).unwrap());
    let failures: Vec<_> = report.failures().collect();
    assert!(!failures.is_empty());
    assert!(failures.iter().all(|i| i.table == "Table 2" && i.row == "M2"), "{report}");
}

#[test]
fn garbage_file_is_an_error() {
    let (dir, _) = exported();
    std::fs::write(dir.path().join("m1.json"), "{\"size\": 3").unwrap();
    assert!(matches!(FixtureSet::load_dir(dir.path()), Err(Error::InvalidTable(_))));
}

#[test]
fn every_fixture_is_majority() {
    for f in fixtures::all() {
        assert!(f.op.is_majority(), "{}", f.name);
    }
    assert_eq!(fixtures::by_source(Source::Table1).len(), 12);
    assert_eq!(fixtures::by_source(Source::Table2).len(), 12);
    assert_eq!(fixtures::by_source(Source::Table3).len(), 26);
}
