use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clonesmith::canon::{canonical_form, CanonMode};
use clonesmith::closure::{minimality_check, screen_minimality, ClosureOptions, Screen};
use clonesmith::fixtures;
use clonesmith::search::{
    candidate_from_index, index_of_candidate, read_catalog, run_search, CandidateSpace, DedupMode, SearchConfig,
    SearchOutcome, SymmetryMode,
};
use clonesmith::{Error, Universe};

fn classes(out: &SearchOutcome) -> BTreeSet<(Vec<u8>, usize, usize)> {
    out.records.iter().map(|r| (r.canonical.clone(), r.majority_count, r.closure_size)).collect()
}

fn three_all() -> SearchConfig {
    SearchConfig::full(3, SymmetryMode::All).unwrap()
}

#[test]
fn canonical_first_finds_every_class_at_three() {
    let post_hoc = run_search(&three_all()).unwrap();
    let mut pruned = three_all();
    pruned.dedup = DedupMode::CanonicalFirst;
    let pruned = run_search(&pruned).unwrap();
    assert_eq!(classes(&post_hoc), classes(&pruned));
    assert!(pruned.checked < post_hoc.checked);
    let counts: BTreeSet<usize> = post_hoc.records.iter().map(|r| r.majority_count).collect();
    assert_eq!(counts, BTreeSet::from([1, 3, 8]));
}

#[test]
fn table1_is_exactly_the_minimal_candidates() {
    // every minimal candidate lies in the relabel orbit of a listed function
    let space = CandidateSpace::new(3, SymmetryMode::All).unwrap();
    let numeric = Universe::numeric(3).unwrap().shared();
    let listed: BTreeSet<Vec<u8>> = fixtures::by_source(fixtures::Source::Table1)
        .iter()
        .map(|f| canonical_form(&f.op.with_universe(numeric.clone()).unwrap(), CanonMode::RelabelOnly).op.into_table())
        .collect();
    let mut minimal = 0;
    for i in 0..729 {
        let op = space.decode(i).unwrap();
        if let Screen::Minimal { .. } = screen_minimality(&op, ClosureOptions::default()).unwrap() {
            assert!(minimality_check(&op).unwrap().minimal, "index {i}");
            minimal += 1;
            assert!(listed.contains(canonical_form(&op, CanonMode::RelabelOnly).op.table()), "index {i}");
        }
    }
    assert_eq!(minimal, 30);
}

#[test]
fn worker_count_and_partitioning_do_not_matter() {
    let one = run_search(&three_all().with_workers(1)).unwrap();
    let three = run_search(&three_all().with_workers(3)).unwrap();
    assert_eq!(one.records, three.records);

    let left = run_search(&three_all().with_range(0, 300)).unwrap();
    let right = run_search(&three_all().with_range(300, 729)).unwrap();
    let mut merged = classes(&left);
    merged.extend(classes(&right));
    assert_eq!(merged, classes(&one));
}

#[test]
fn resume_after_stop_reproduces_a_straight_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ckpt.json");
    let base = SearchConfig::full(4, SymmetryMode::Cyclic).unwrap().with_range(20_000, 32_000);
    let straight = run_search(&base.clone().with_workers(2)).unwrap();

    let mut first = base.clone().with_workers(1).with_checkpoint(&path);
    first.stop_after = Some(5_000);
    let partial = run_search(&first).unwrap();
    assert!(!partial.complete);
    assert!(path.exists());
    let resumed = run_search(&base.clone().with_workers(3).with_checkpoint(&path)).unwrap();
    assert!(resumed.complete);
    assert_eq!(resumed.records, straight.records);
    assert_eq!(resumed.undecided, straight.undecided);
    assert_eq!(resumed.next_index, "32000");
}

#[test]
fn corrupt_checkpoints_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ckpt.json");
    let base = SearchConfig::full(3, SymmetryMode::All).unwrap().with_checkpoint(&path);
    let mut first = base.clone();
    first.stop_after = Some(200);
    run_search(&first).unwrap();
    let good = std::fs::read_to_string(&path).unwrap();

    let truncated = &good[..good.len() / 2];
    std::fs::write(&path, truncated).unwrap();
    match run_search(&base) {
        Err(Error::CorruptCheckpoint { offset, .. }) => assert!(offset <= truncated.len()),
        other => panic!("expected a corrupt checkpoint, got {other:?}"),
    }

    std::fs::write(&path, good.replace("\"n\":3", "\"n\":4")).unwrap();
    assert!(matches!(run_search(&base), Err(Error::CorruptCheckpoint { .. })));

    let v: serde_json::Value = serde_json::from_str(&good).unwrap();
    let mut bad = v.clone();
    bad["next_index"] = "99999".into();
    std::fs::write(&path, bad.to_string()).unwrap();
    assert!(matches!(run_search(&base), Err(Error::CorruptCheckpoint { .. })));

    let mut bad = v;
    bad["hits"] = serde_json::json!([{"index": "x"}]);
    std::fs::write(&path, bad.to_string()).unwrap();
    assert!(matches!(run_search(&base), Err(Error::CorruptCheckpoint { .. })));

    // the untouched file still resumes
    std::fs::write(&path, &good).unwrap();
    assert!(run_search(&base).unwrap().complete);
}

#[test]
fn hits_reverify_with_the_full_check() {
    let out = run_search(&SearchConfig::full(4, SymmetryMode::Cyclic).unwrap().with_range(0, 12_000)).unwrap();
    assert!(!out.records.is_empty());
    for r in &out.records {
        let op = r.canonical_op(4).unwrap();
        let report = minimality_check(&op).unwrap();
        assert!(report.minimal, "{}", r.index);
        assert_eq!(report.majority_count, r.majority_count);
        assert_eq!(report.closure_size, r.closure_size);
        assert_eq!(r.conservative, op.is_conservative());
        assert!(![2, 4].contains(&r.majority_count));
    }
}

#[test]
fn four_element_indices_round_trip() {
    let space = CandidateSpace::new(4, SymmetryMode::Cyclic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let i = rng.gen_range(0..65_536u64);
        let op = space.decode(i).unwrap();
        assert!(op.is_majority() && op.is_cyclically_symmetric());
        assert_eq!(space.encode_u64(&op), Some(i));
        assert_eq!(candidate_from_index(4, SymmetryMode::Cyclic, &BigUint::from(i)).unwrap(), op);
    }
}

#[test]
fn m1_is_the_all_first_element_index() {
    // the label "1" is element 0, so both digits of m1 are zero
    let m1 = fixtures::get("m1").unwrap().with_universe(Universe::numeric(3).unwrap().shared()).unwrap();
    assert_eq!(index_of_candidate(SymmetryMode::Cyclic, &m1).unwrap(), BigUint::from(0u32));
    assert_eq!(index_of_candidate(SymmetryMode::All, &m1).unwrap(), BigUint::from(0u32));
    let m3 = fixtures::get("m3").unwrap().with_universe(Universe::numeric(3).unwrap().shared()).unwrap();
    // value 3 on the first orbit, 1 on the second
    assert_eq!(index_of_candidate(SymmetryMode::Cyclic, &m3).unwrap(), BigUint::from(2u32 * 3));
}

#[test]
fn f1_singleton_range() {
    let f1 = fixtures::get("f1").unwrap().with_universe(Universe::numeric(5).unwrap().shared()).unwrap();
    let index = index_of_candidate(SymmetryMode::Cyclic, &f1).unwrap();
    assert_eq!(index.to_string(), "24031079019712");
    let i: u64 = index.try_into().unwrap();
    let out = run_search(&SearchConfig::full(5, SymmetryMode::Cyclic).unwrap().with_range(i, i + 1)).unwrap();
    assert_eq!(out.records.len(), 1);
    assert_eq!(out.records[0].majority_count, 26);
    assert_eq!(out.records[0].closure_size, 29);
    assert!(!out.records[0].conservative);
}

#[test]
fn catalog_round_trip() {
    let out = run_search(&three_all()).unwrap();
    let mut buf = Vec::new();
    out.write_catalog(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), out.records.len());
    assert_eq!(read_catalog(&text).unwrap(), out.records);
}

#[test]
fn invalid_configurations() {
    assert!(run_search(&three_all().with_range(5, 4)).is_err());
    assert!(run_search(&three_all().with_range(0, 730)).is_err());
    assert!(run_search(&three_all().with_workers(0)).is_err());
}
