//! Re-derivation of the published tables and the reproduction checks.
//!
//! [`verify_fixtures`] recomputes everything the bundled tables claim and
//! reports each check against the table and row it concerns. The
//! [`run_criterion`] family runs the larger reproduction checks, including
//! the exhaustive searches.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canon::{are_isomorphic, CanonMode, Canonicalizer};
use crate::closure::{closure_of, majority_members, minimality_check, restriction_homomorphism};
use crate::error::{Error, Result};
use crate::fixtures::{self, Fixture, Source};
use crate::op::{triples, TernaryOp, VarPerm};
use crate::relations::{constrain_values, generate_invariant_pairs, intersect, preserves_relation, Orientation, PartialOp};
use crate::search::{index_of_candidate, run_search, SearchConfig, SearchOutcome, SymmetryMode};
use crate::star::{d_op, star_decompose, star_extend};
use crate::term::{cyclic_shift_set, terms_with_nodes, D1Algebra, D1Class, Term, DEFAULT_SHIFT_BUDGET};
use crate::universe::Universe;

/// Terms over `f1` for `g1^{u,v}`, keyed by `(u, v)`.
pub const G1_TERMS: [(&str, &str, &str); 4] = [
    ("1", "1", "d(x2,d(x2,x1,x3),d(x1,x2,x3))"),
    ("1", "1b", "d(x1,x2,d(x2,x1,x3))"),
    ("1b", "1", "d(x3,x2,d(x2,d(x2,x1,x3),d(x1,x2,x3)))"),
    ("1b", "1b", "d(x3,x2,d(x1,x2,d(x2,x1,x3)))"),
];

/// The composition recovering `f1` from any `g1^{u,v}`.
pub const RECOVERY_TERM: &str = "d(d(x2,x1,x3),d(x1,x3,x2),d(x3,x2,x1))";

pub const THETA_SEEDS: [(&str, &str); 3] = [("0", "0"), ("1", "1b"), ("2", "2b")];
pub const THETA_PAIRS: [(&str, &str); 5] = [("0", "0"), ("1", "1"), ("1", "1b"), ("2", "2"), ("2", "2b")];
pub const RHO_SEEDS: [(&str, &str); 3] = [("2", "0"), ("1", "1b"), ("0", "2b")];
pub const RHO_PAIRS: [(&str, &str); 7] =
    [("0", "2b"), ("1", "1"), ("1", "1b"), ("1", "2"), ("2", "0"), ("2", "1"), ("2", "2")];

/// Admissible values of `h(0,1b,2b)` given `(h(0,1,2), h(2,1,0))`.
pub const FOUR_CASES: [((&str, &str), &[&str]); 4] = [
    (("2", "2"), &["2"]),
    (("2", "1"), &["2"]),
    (("1", "2"), &["1"]),
    (("1", "1"), &["1", "1b"]),
];

/// The bundled fixtures, or a copy read back from exported files.
#[derive(Clone, Debug)]
pub struct FixtureSet {
    fixtures: Vec<Fixture>,
}

impl FixtureSet {
    pub fn bundled() -> Self {
        FixtureSet { fixtures: fixtures::all().to_vec() }
    }

    /// Reads `<name>.json` for every bundled fixture name.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut out = Vec::new();
        for f in fixtures::all() {
            let path = dir.join(format!("{}.json", f.name));
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    return Err(Error::FixtureMissing(path.display().to_string()))
                }
                Err(e) => return Err(e.into()),
            };
            let op = TernaryOp::from_json(&text)
                .map_err(|e| Error::InvalidTable(format!("{}: {e}", path.display())))?;
            out.push(Fixture { name: f.name.clone(), source: f.source, op });
        }
        Ok(FixtureSet { fixtures: out })
    }

    /// Writes one `<name>.json` per fixture and returns the paths.
    pub fn export_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for f in &self.fixtures {
            let path = dir.join(format!("{}.json", f.name));
            std::fs::write(&path, f.op.to_json() + "\n")?;
            paths.push(path);
        }
        Ok(paths)
    }

    pub fn fixtures(&self) -> &[Fixture] {
        &self.fixtures
    }

    pub fn fixture(&self, name: &str) -> Result<&Fixture> {
        let name = if name == "d1" { "m2" } else { name };
        self.fixtures.iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownFixture(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Result<&TernaryOp> {
        Ok(&self.fixture(name)?.op)
    }

    pub fn by_source(&self, source: Source) -> Vec<&Fixture> {
        self.fixtures.iter().filter(|f| f.source == source).collect()
    }
}

/// One verified claim.
#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub table: String,
    pub row: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub items: Vec<CheckItem>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.passed)
    }

    fn push(&mut self, table: &str, row: impl Into<String>, name: impl Into<String>, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.items.push(CheckItem { table: table.into(), row: row.into(), name: name.into(), passed, detail });
    }
}

impl fmt::Display for CheckItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{status} {} / {}: {}", self.table, self.row, self.name)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.items.len(), failed)
    }
}

fn triple_label(u: &Universe, t: [u8; 3]) -> String {
    format!("({},{},{})", u.label(t[0]), u.label(t[1]), u.label(t[2]))
}

/// First triple where two tables differ.
fn first_difference(a: &TernaryOp, b: &TernaryOp) -> Option<[u8; 3]> {
    triples(a.size()).find(|&t| a.eval(t) != b.eval(t))
}

fn check_eq(expected: &TernaryOp, found: &TernaryOp) -> Result<String, String> {
    if expected.size() != found.size() {
        return Err(format!("size {} instead of {}", found.size(), expected.size()));
    }
    match first_difference(expected, found) {
        None => Ok(String::new()),
        Some(t) => {
            let u = expected.universe();
            Err(format!(
                "row {}: expected {}, found {}",
                triple_label(u, t),
                u.label(expected.eval(t)),
                u.label(found.eval(t))
            ))
        }
    }
}

fn table_set<'a>(ops: impl IntoIterator<Item = &'a TernaryOp>) -> BTreeSet<Vec<u8>> {
    ops.into_iter().map(|o| o.table().to_vec()).collect()
}

fn label_pairs(u: &Arc<Universe>, pairs: &[(&str, &str)]) -> Result<Vec<(u8, u8)>> {
    pairs.iter().map(|(a, b)| Ok((u.parse_element(a)?, u.parse_element(b)?))).collect()
}

/// Runs every fixture check on the bundled tables.
pub fn verify_fixture_suite() -> SuiteReport {
    verify_fixtures(&FixtureSet::bundled())
}

pub fn verify_fixtures(set: &FixtureSet) -> SuiteReport {
    let mut report = SuiteReport::default();
    check_integrity(set, &mut report);
    if let Err(e) = check_table1(set, &mut report) {
        report.push("Table 1", "-", "closures", Err(e.to_string()));
    }
    if let Err(e) = check_table2(set, &mut report) {
        report.push("Table 2", "-", "restrictions", Err(e.to_string()));
    }
    if let Err(e) = check_table3(set, &mut report) {
        report.push("Table 3", "-", "closure of f1", Err(e.to_string()));
    }
    if let Err(e) = check_identities(set, &mut report) {
        report.push("Table 3", "-", "composition identities", Err(e.to_string()));
    }
    if let Err(e) = check_relations(set, &mut report) {
        report.push("Table 3", "-", "invariant relations", Err(e.to_string()));
    }
    report
}

fn check_integrity(set: &FixtureSet, report: &mut SuiteReport) {
    for (f, bundled) in set.fixtures.iter().zip(fixtures::all()) {
        let table = f.source.name();
        let majority = match triples(f.op.size()).find(|&t| {
            let [a, b, c] = t;
            let want = if a == b || a == c { Some(a) } else if b == c { Some(b) } else { None };
            want.is_some_and(|w| f.op.eval(t) != w)
        }) {
            None => Ok(String::new()),
            Some(t) => Err(format!("not a majority operation at row {}", triple_label(f.op.universe(), t))),
        };
        report.push(table, &f.name, "majority operation", majority);
        report.push(table, &f.name, "matches the bundled table", check_eq(&bundled.op, &f.op));
    }
}

fn check_table1(set: &FixtureSet, report: &mut SuiteReport) -> Result<()> {
    for (name, members, majority) in [("m1", 4, 1), ("m2", 6, 3), ("m3", 11, 8)] {
        let c = closure_of(set.get(name)?)?;
        let m = c.len() - 3;
        let outcome = if (c.len(), m) == (members, majority) {
            Ok(format!("members {members}, majority {majority}"))
        } else {
            Err(format!("members {}, majority {m}; expected {members}, {majority}", c.len()))
        };
        report.push("Table 1", name, "closure size", outcome);
    }

    let u = fixtures::three_universe();
    let ds = [d_op(u.clone(), 1)?, d_op(u.clone(), 2)?, d_op(u, 3)?];
    for (name, d) in ["m2", "d2", "d3"].iter().zip(&ds) {
        report.push("Table 1", *name, "equals d_i", check_eq(d, set.get(name)?));
    }
    let m2_majority = majority_members(&closure_of(set.get("m2")?)?);
    let outcome = if table_set(m2_majority.members()) == table_set(&ds) {
        Ok(String::new())
    } else {
        Err("majority part of [m2] is not {d1, d2, d3}".into())
    };
    report.push("Table 1", "m2", "[m2] = {d1, d2, d3}", outcome);

    let block: Vec<&Fixture> = set.by_source(Source::Table1).into_iter().filter(|f| f.name.starts_with("m3")).collect();
    let m3_majority = majority_members(&closure_of(set.get("m3")?)?);
    let found = table_set(m3_majority.members());
    for f in &block {
        let outcome = if found.contains(f.op.table()) { Ok(String::new()) } else { Err("not in [m3]".into()) };
        report.push("Table 1", &f.name, "member of [m3]", outcome);
    }
    let outcome = if found == table_set(block.iter().map(|f| &f.op)) {
        Ok(String::new())
    } else {
        Err(format!("[m3] has {} majority members, the block lists {}", found.len(), block.len()))
    };
    report.push("Table 1", "m3", "[m3] equals the m3 block", outcome);
    Ok(())
}

/// Restriction of a four-element fixture to `{2,3,4}` on the labels `1,2,3`.
fn restrict_to_three(op: &TernaryOp) -> Result<TernaryOp> {
    op.restrict(&[1, 2, 3])?.with_universe(fixtures::three_universe())
}

fn check_table2(set: &FixtureSet, report: &mut SuiteReport) -> Result<()> {
    let table1 = set.by_source(Source::Table1);
    for f in set.by_source(Source::Table2) {
        let r = match restrict_to_three(&f.op) {
            Ok(r) => r,
            Err(e) => {
                report.push("Table 2", &f.name, "restriction to {2,3,4}", Err(e.to_string()));
                continue;
            }
        };
        let mut iso = None;
        for t in &table1 {
            if are_isomorphic(&r, &t.op, CanonMode::RelabelOnly)?.is_some() {
                iso = Some(t.name.clone());
                break;
            }
        }
        let outcome = iso.map(|n| format!("isomorphic to {n}")).ok_or_else(|| "no Table 1 match".to_string());
        report.push("Table 2", &f.name, "restriction isomorphic to a Table 1 operation", outcome);

        let full = closure_of(&f.op)?;
        let outcome = match restriction_homomorphism(&full, &[1, 2, 3]) {
            Err(e) => Err(e.to_string()),
            Ok(map) => {
                let target = closure_of(&r)?;
                let image = table_set(map.image.members());
                if !map.is_injective() {
                    Err(format!("{} members restrict to {} operations", full.len(), map.image.len()))
                } else if image != table_set(target.members()) {
                    Err(format!("image has {} members, the restricted clone {}", image.len(), target.len()))
                } else {
                    Ok(format!("{} members", full.len()))
                }
            }
        };
        report.push("Table 2", &f.name, "restriction is a clone isomorphism", outcome);
    }
    Ok(())
}

fn check_table3(set: &FixtureSet, report: &mut SuiteReport) -> Result<()> {
    let u = fixtures::five_universe();
    let f1 = set.get("f1")?;
    for (t, v) in [(["0", "1", "2"], "1"), (["2", "1", "0"], "2"), (["1b", "1", "2b"], "1b")] {
        let triple = [u.parse_element(t[0])?, u.parse_element(t[1])?, u.parse_element(t[2])?];
        let got = u.label(f1.eval(triple));
        let outcome = if got == v { Ok(String::new()) } else { Err(format!("value {got}, expected {v}")) };
        report.push("Table 3", format!("f1 {}", triple_label(&u, triple)), "listed value", outcome);
    }

    let members = majority_members(&closure_of(f1)?);
    let found = table_set(members.members());
    let listed = set.by_source(Source::Table3);
    for f in &listed {
        let outcome = if found.contains(f.op.table()) { Ok(String::new()) } else { Err("not in [f1]".into()) };
        report.push("Table 3", &f.name, "member of [f1]", outcome);
    }
    let listed_set = table_set(listed.iter().map(|f| &f.op));
    let outcome = if found == listed_set && found.len() == 26 {
        Ok("26 majority operations".into())
    } else {
        Err(format!("[f1] has {} majority members, {} listed, {} shared", found.len(), listed_set.len(), found.intersection(&listed_set).count()))
    };
    report.push("Table 3", "all", "majority part of [f1] equals the table", outcome);
    Ok(())
}

fn parse_term(s: &str) -> Result<Term> {
    s.parse()
}

fn check_identities(set: &FixtureSet, report: &mut SuiteReport) -> Result<()> {
    let f1 = set.get("f1")?;
    let recovery = parse_term(RECOVERY_TERM)?;
    for (u, v, term) in G1_TERMS {
        let name = fixtures::g_name(1, u, v);
        let g = set.get(&name)?;
        report.push("Table 3", &name, format!("{term} over f1"), check_eq(g, &parse_term(term)?.eval(f1)));
        report.push("Table 3", &name, "recovers f1", check_eq(f1, &recovery.eval(g)));
    }

    // f2 and the other g_i are variable permutations of f1 and g1
    let perm_of = |a: &TernaryOp, b: &TernaryOp| VarPerm::ALL.iter().find(|&&p| a.permute_vars(p) == *b).copied();
    let outcome = perm_of(f1, set.get("f2")?).map(|p| format!("{p:?}")).ok_or("no variable permutation".to_string());
    report.push("Table 3", "f2", "variable permutation of f1", outcome);
    for i in 2..=6 {
        for u in fixtures::UV_VALUES {
            for v in fixtures::UV_VALUES {
                let g1 = set.get(&fixtures::g_name(1, u, v))?;
                let name = fixtures::g_name(i, u, v);
                let outcome = perm_of(g1, set.get(&name)?)
                    .map(|p| format!("{p:?}"))
                    .ok_or("no variable permutation".to_string());
                report.push("Table 3", &name, "variable permutation of g1", outcome);
            }
        }
    }
    Ok(())
}

fn check_relations(set: &FixtureSet, report: &mut SuiteReport) -> Result<()> {
    let u = fixtures::five_universe();
    let f1 = set.get("f1")?;
    for (name, seeds, pairs) in [("theta", &THETA_SEEDS[..], &THETA_PAIRS[..]), ("rho", &RHO_SEEDS[..], &RHO_PAIRS[..])] {
        let rel = generate_invariant_pairs(f1, &label_pairs(&u, seeds)?)?;
        let expected: BTreeSet<(u8, u8)> = label_pairs(&u, pairs)?.into_iter().collect();
        let got: BTreeSet<(u8, u8)> = rel.pairs().collect();
        let outcome = if got == expected {
            Ok(format!("{} pairs", got.len()))
        } else {
            let show = |s: &BTreeSet<(u8, u8)>| {
                s.iter().map(|&(a, b)| format!("({},{})", u.label(a), u.label(b))).collect::<Vec<_>>().join(" ")
            };
            Err(format!("generated {}", show(&got)))
        };
        report.push("Table 3", name, "invariant relation generated by f1", outcome);
        for f in set.by_source(Source::Table3) {
            if !preserves_relation(&f.op, &rel) {
                report.push("Table 3", &f.name, format!("preserves {name}"), Err("relation not preserved".into()));
            }
        }
    }
    Ok(())
}

/// Settings for the acceptance criteria that run searches.
#[derive(Clone, Debug)]
pub struct AcceptanceOptions {
    pub workers: usize,
    /// Width of the five-element slice around `f1`.
    pub slice_width: u64,
    /// Closure bound used in the five-element slice.
    pub slice_bound: usize,
    /// Directory for search checkpoints.
    pub work_dir: PathBuf,
    pub seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions {
            workers: 4,
            slice_width: 1_000_000,
            slice_bound: 500,
            work_dir: std::env::temp_dir().join(format!("clonesmith-acceptance-{}", std::process::id())),
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} criterion {:>2}: {} [{:.2?}", self.id, self.title, self.elapsed)?;
        if let Some(l) = self.limit {
            write!(f, " / limit {l:?}")?;
        }
        write!(f, "] {}", self.detail)
    }
}

pub const CRITERIA: [(u8, &str, Option<u64>); 11] = [
    (1, "three-element closures have 1, 3 and 8 majority operations", Some(1)),
    (2, "exhaustive three-element search", Some(30)),
    (3, "four-element generators and their restrictions", Some(10)),
    (4, "[f1] has the 26 listed majority operations and is minimal", Some(60)),
    (5, "invariant relations and the four-case value table", Some(5)),
    (6, "composition identities for g1 and the recovery of f1", Some(1)),
    (7, "star extension of f1: 78 majority operations, subdirect structure", Some(600)),
    (8, "star extensions of m1 and m3", Some(30)),
    (9, "cyclic shifts of terms over d1", Some(30)),
    (10, "four-element cyclically symmetric sweep", Some(900)),
    (11, "five-element slice around f1 with checkpoint resume", None),
];

/// Runs one criterion; errors become failures.
pub fn run_criterion(id: u8, set: &FixtureSet, options: &AcceptanceOptions) -> CriterionOutcome {
    let (_, title, limit) = CRITERIA.iter().copied().find(|c| c.0 == id).unwrap_or((id, "unknown criterion", None));
    let limit = limit.map(Duration::from_secs);
    let start = Instant::now();
    let result = match id {
        1 => criterion1(set),
        2 => criterion2(set),
        3 => criterion3(set),
        4 => criterion4(set),
        5 => criterion5(set),
        6 => criterion6(set),
        7 => criterion7(set),
        8 => criterion8(set),
        9 => criterion9(options),
        10 => criterion10(set, options),
        11 => criterion11(set, options),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(l) = limit {
        if passed && elapsed > l {
            passed = false;
            detail = format!("{detail}; exceeded the time limit");
        }
    }
    CriterionOutcome { id, title, passed, detail, elapsed, limit }
}

pub fn run_all(set: &FixtureSet, options: &AcceptanceOptions) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| run_criterion(c.0, set, options)).collect()
}

type Check = std::result::Result<String, String>;

fn e<E: fmt::Display>(err: E) -> String {
    err.to_string()
}

fn in_table(table: &'static str) -> impl Fn(Error) -> String {
    move |err| format!("{table}: {err}")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Failing items of the suite that belong to `table`.
fn suite_section(report: &SuiteReport, table: &str, filter: impl Fn(&CheckItem) -> bool) -> Check {
    let bad: Vec<String> =
        report.items.iter().filter(|i| i.table == table && filter(i) && !i.passed).map(|i| i.to_string()).collect();
    if bad.is_empty() {
        Ok(String::new())
    } else {
        Err(bad.join("; "))
    }
}

fn criterion1(set: &FixtureSet) -> Check {
    let mut report = SuiteReport::default();
    check_table1(set, &mut report).map_err(in_table("Table 1"))?;
    suite_section(&report, "Table 1", |_| true)?;
    Ok("majority counts 1, 3, 8; [m2] = {d1,d2,d3}; [m3] = m3 block".into())
}

fn canonical_table(c: &Canonicalizer, op: &TernaryOp) -> Vec<u8> {
    c.canonical_form(op, CanonMode::RelabelAndVarperm).op.into_table()
}

fn criterion2(set: &FixtureSet) -> Check {
    let config = SearchConfig::full(3, SymmetryMode::All).map_err(e)?.with_workers(1);
    let out = run_search(&config).map_err(e)?;
    ensure(out.complete && out.undecided.is_empty(), || "search incomplete or undecided candidates".into())?;
    let counts: BTreeSet<usize> = out.records.iter().map(|r| r.majority_count).collect();
    ensure(counts == BTreeSet::from([1, 3, 8]), || format!("majority counts {counts:?}"))?;
    let canon = Canonicalizer::new(3);
    let hits: BTreeSet<Vec<u8>> = out.records.iter().map(|r| r.canonical.clone()).collect();
    let listed: BTreeSet<Vec<u8>> =
        set.by_source(Source::Table1).iter().map(|f| canonical_table(&canon, &f.op)).collect();
    for f in set.by_source(Source::Table1) {
        ensure(hits.contains(&canonical_table(&canon, &f.op)), || format!("Table 1 row {} is not among the hits", f.name))?;
    }
    ensure(hits == listed, || format!("{} hit classes, {} listed classes", hits.len(), listed.len()))?;
    let per: Vec<usize> = out.records.iter().map(|r| r.majority_count).collect();
    Ok(format!("{} classes with majority counts {per:?}", out.records.len()))
}

fn criterion3(set: &FixtureSet) -> Check {
    for f in set.by_source(Source::Table2) {
        let report = minimality_check(&f.op).map_err(e)?;
        ensure(report.minimal, || format!("Table 2 row {} is not minimal", f.name))?;
        let r = restrict_to_three(&f.op).map_err(e)?;
        ensure(minimality_check(&r).map_err(e)?.minimal, || format!("restriction of {} is not minimal", f.name))?;
    }
    let mut report = SuiteReport::default();
    check_table2(set, &mut report).map_err(in_table("Table 2"))?;
    suite_section(&report, "Table 2", |_| true)?;
    Ok("12 minimal generators, restrictions are clone isomorphisms".into())
}

fn criterion4(set: &FixtureSet) -> Check {
    let mut report = SuiteReport::default();
    check_table3(set, &mut report).map_err(in_table("Table 3"))?;
    suite_section(&report, "Table 3", |_| true)?;
    let m = minimality_check(set.get("f1").map_err(e)?).map_err(e)?;
    ensure(m.minimal, || "f1 is not minimal".into())?;
    Ok(format!("closure {}, majority {}, minimal", m.closure_size, m.majority_count))
}

fn criterion5(set: &FixtureSet) -> Check {
    let mut report = SuiteReport::default();
    check_relations(set, &mut report).map_err(in_table("Table 3"))?;
    suite_section(&report, "Table 3", |_| true)?;

    let u = fixtures::five_universe();
    let f1 = set.get("f1").map_err(e)?;
    let p = |s: &str| u.parse_element(s).map_err(e);
    let theta = generate_invariant_pairs(f1, &label_pairs(&u, &THETA_SEEDS).map_err(e)?).map_err(e)?;
    let rho = generate_invariant_pairs(f1, &label_pairs(&u, &RHO_SEEDS).map_err(e)?).map_err(e)?;
    let first = [p("0")?, p("1")?, p("2")?];
    let reversed = [p("2")?, p("1")?, p("0")?];
    let query = [p("0")?, p("1b")?, p("2b")?];

    let admissible = |h: &PartialOp| -> std::result::Result<Vec<u8>, String> {
        let a = constrain_values(h, &theta, query, first, Orientation::KnownLeft).map_err(e)?;
        let b = constrain_values(h, &rho, query, reversed, Orientation::KnownLeft).map_err(e)?;
        let mut v = intersect(&[a, b]);
        v.sort_unstable();
        Ok(v)
    };
    let mut table: BTreeMap<(u8, u8), Vec<u8>> = BTreeMap::new();
    for ((a, b), values) in FOUR_CASES {
        let mut h = PartialOp::unknown(u.clone());
        h.set(first, p(a)?);
        h.set(reversed, p(b)?);
        let mut want: Vec<u8> = values.iter().map(|v| p(v)).collect::<std::result::Result<_, _>>()?;
        want.sort_unstable();
        let got = admissible(&h)?;
        ensure(got == want, || format!("case ({a},{b}): admissible {got:?}, expected {want:?}"))?;
        table.insert((p(a)?, p(b)?), got);
    }
    // every member falls into one of the cases and respects it
    let mut seen_in_11 = BTreeSet::new();
    for f in set.by_source(Source::Table3) {
        let key = (f.op.eval(first), f.op.eval(reversed));
        let allowed = table.get(&key).ok_or_else(|| format!("{} has (h(0,1,2), h(2,1,0)) outside the four cases", f.name))?;
        let v = f.op.eval(query);
        ensure(allowed.contains(&v), || format!("{} takes the inadmissible value {}", f.name, u.label(v)))?;
        if key == (p("1")?, p("1")?) {
            seen_in_11.insert(v);
        }
    }
    ensure(seen_in_11.len() == 2, || "case (1,1) does not realise both 1 and 1b".into())?;
    Ok("theta 5 pairs, rho 7 pairs, four cases reproduced".into())
}

fn criterion6(set: &FixtureSet) -> Check {
    let mut report = SuiteReport::default();
    check_identities(set, &mut report).map_err(in_table("Table 3"))?;
    suite_section(&report, "Table 3", |i| i.row.starts_with("g1_"))?;
    Ok("4 composition identities, 4 recoveries".into())
}

fn criterion7(set: &FixtureSet) -> Check {
    let f1 = set.get("f1").map_err(e)?;
    let star = star_extend(f1, 1).map_err(e)?;
    let m = minimality_check(&star).map_err(e)?;
    ensure(m.majority_count == 78, || format!("majority count {}", m.majority_count))?;
    ensure(m.minimal, || "f1* is not minimal".into())?;

    let closure = closure_of(&star).map_err(e)?;
    let base_majority = majority_members(&closure_of(f1).map_err(e)?);
    let base = fixtures::five_universe();
    let mut pairs = HashSet::new();
    for h in majority_members(&closure).members() {
        let (b, i) = star_decompose(h, &base).map_err(e)?;
        ensure(base_majority.contains(&b), || "a decomposed base operation lies outside [f1]".into())?;
        pairs.insert((b.into_table(), i));
    }
    ensure(pairs.len() == 78, || format!("decomposition hits {} of 78 pairs", pairs.len()))?;

    let on_base = restriction_homomorphism(&closure, &[0, 1, 2, 3, 4]).map_err(e)?;
    let target = closure_of(f1).map_err(e)?;
    ensure(table_set(on_base.image.members()) == table_set(target.members()), || {
        format!("restriction to the base set has {} images, [f1] has {}", on_base.image.len(), target.len())
    })?;
    let through_star = [0u8, 1, 5];
    let on_star = restriction_homomorphism(&closure, &through_star).map_err(e)?;
    let d1 = star.restrict(&through_star).map_err(e)?;
    let d_clone = closure_of(&d1).map_err(e)?;
    let u3 = d1.universe().clone();
    let ds = [d_op(u3.clone(), 1).map_err(e)?, d_op(u3.clone(), 2).map_err(e)?, d_op(u3, 3).map_err(e)?];
    ensure(table_set(majority_members(&d_clone).members()) == table_set(&ds), || {
        "restriction through the star is not [d1]".into()
    })?;
    ensure(table_set(on_star.image.members()) == table_set(d_clone.members()), || {
        format!("restriction through the star has {} images, [d1] has {}", on_star.image.len(), d_clone.len())
    })?;
    let joint: HashSet<(usize, usize)> = on_base.map.iter().copied().zip(on_star.map.iter().copied()).collect();
    ensure(joint.len() == closure.len(), || "kernels intersect nontrivially".into())?;
    Ok(format!(
        "closure {}, majority 78, minimal; images {} and {}",
        closure.len(),
        on_base.image.len(),
        on_star.image.len()
    ))
}

fn criterion8(set: &FixtureSet) -> Check {
    let mut parts = Vec::new();
    for (name, expected) in [("m1", 3), ("m3", 24)] {
        let s = star_extend(set.get(name).map_err(e)?, 1).map_err(e)?;
        let m = minimality_check(&s).map_err(e)?;
        ensure(m.minimal && m.majority_count == expected, || {
            format!("{name}*: minimal {}, majority {}, expected {expected}", m.minimal, m.majority_count)
        })?;
        parts.push(format!("{name}* majority {expected}"));
    }
    Ok(parts.join(", "))
}

fn random_term(rng: &mut ChaCha8Rng, nodes: usize) -> Term {
    if nodes == 0 {
        return Term::var(rng.gen_range(1..=3));
    }
    let rest = nodes - 1;
    let a = rng.gen_range(0..=rest);
    let b = rng.gen_range(0..=rest - a);
    let c = rest - a - b;
    let mut kids = [random_term(rng, a), random_term(rng, b), random_term(rng, c)];
    // spread the larger subterms over all positions
    let r = rng.gen_range(0..3);
    kids.rotate_left(r);
    let [x, y, z] = kids;
    Term::node(x, y, z)
}

fn criterion9(options: &AcceptanceOptions) -> Check {
    let alg = D1Algebra::three();
    let mut exhaustive = 0;
    for nodes in 1..=2 {
        for t in terms_with_nodes(nodes) {
            if let D1Class::Projection(_) = alg.classify(&t).map_err(e)? {
                continue;
            }
            let mut covered = BTreeSet::new();
            for s in cyclic_shift_set(&t, DEFAULT_SHIFT_BUDGET).map_err(e)? {
                if let D1Class::D(i) = alg.classify(&s).map_err(e)? {
                    covered.insert(i);
                }
            }
            ensure(covered.len() == 3, || format!("CS({t}) only reaches {covered:?}"))?;
            exhaustive += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut random = 0;
    while random < 200 {
        let nodes = rng.gen_range(1..=6);
        let t = random_term(&mut rng, nodes);
        if let D1Class::Projection(_) = alg.classify(&t).map_err(e)? {
            continue;
        }
        let triple = crate::term::constructive_shift_triple(&t).map_err(e)?;
        let shifts: HashSet<Term> = cyclic_shift_set(&t, DEFAULT_SHIFT_BUDGET).map_err(e)?.into_iter().collect();
        for (i, s) in triple.iter().enumerate() {
            ensure(shifts.contains(s), || format!("{s} is not a cyclic shift of {t}"))?;
            let class = alg.classify(s).map_err(e)?;
            ensure(class == D1Class::D(i as u8 + 1), || format!("{s} evaluates to {class}, expected d{}", i + 1))?;
        }
        random += 1;
    }
    Ok(format!("{exhaustive} small terms, {random} random terms"))
}

fn comparable(out: &SearchOutcome) -> (Vec<crate::search::SearchRecord>, Vec<String>) {
    (out.records.clone(), out.undecided.clone())
}

fn fresh_checkpoint(options: &AcceptanceOptions, name: &str) -> std::result::Result<PathBuf, String> {
    std::fs::create_dir_all(&options.work_dir).map_err(e)?;
    let path = options.work_dir.join(name);
    if path.exists() {
        std::fs::remove_file(&path).map_err(e)?;
    }
    Ok(path)
}

/// A straight run plus a stopped-and-resumed run with different worker counts.
fn run_with_resume(
    base: &SearchConfig,
    options: &AcceptanceOptions,
    name: &str,
    stop_after: u64,
) -> std::result::Result<(SearchOutcome, SearchOutcome), String> {
    let straight = run_search(&base.clone().with_workers(options.workers)).map_err(e)?;
    let path = fresh_checkpoint(options, name)?;
    let first_workers = options.workers.max(2) - 1;
    let mut first = base.clone().with_workers(first_workers).with_checkpoint(&path);
    first.stop_after = Some(stop_after);
    let partial = run_search(&first).map_err(e)?;
    ensure(!partial.complete, || "the interrupted run finished early".into())?;
    let resumed = run_search(&base.clone().with_workers(options.workers + 1).with_checkpoint(&path)).map_err(e)?;
    let _ = std::fs::remove_file(&path);
    Ok((straight, resumed))
}

fn criterion10(set: &FixtureSet, options: &AcceptanceOptions) -> Check {
    let base = SearchConfig::full(4, SymmetryMode::Cyclic).map_err(e)?;
    let start = Instant::now();
    let (straight, resumed) = run_with_resume(&base, options, "n4.checkpoint.json", 30_000)?;
    let first_run = start.elapsed();
    let single = run_search(&base.clone().with_workers(1)).map_err(e)?;
    ensure(straight.complete && straight.undecided.is_empty(), || "undecided candidates in the sweep".into())?;
    ensure(comparable(&straight) == comparable(&single), || "worker counts disagree".into())?;
    ensure(comparable(&straight) == comparable(&resumed), || "resumed run disagrees".into())?;

    let canon = Canonicalizer::new(4);
    let table2: Vec<(String, Vec<u8>)> =
        set.by_source(Source::Table2).iter().map(|f| (f.name.clone(), canonical_table(&canon, &f.op))).collect();
    let mut matched = BTreeSet::new();
    for r in &straight.records {
        ensure(r.majority_count != 2 && r.majority_count != 4, || {
            format!("hit {} has majority count {}", r.index, r.majority_count)
        })?;
        if !r.conservative {
            let name = table2
                .iter()
                .find(|(_, c)| *c == r.canonical)
                .map(|(n, _)| n.clone())
                .ok_or_else(|| format!("non-conservative hit {} matches no Table 2 operation", r.index))?;
            matched.insert(name);
        }
    }
    let counts: BTreeSet<usize> = straight.records.iter().map(|r| r.majority_count).collect();
    let non_conservative = straight.records.iter().filter(|r| !r.conservative).count();
    Ok(format!(
        "{} classes, {non_conservative} non-conservative (matching {}), majority counts {counts:?}; first pass {first_run:.1?}",
        straight.records.len(),
        matched.into_iter().collect::<Vec<_>>().join(", ")
    ))
}

fn criterion11(set: &FixtureSet, options: &AcceptanceOptions) -> Check {
    let f1 = set.get("f1").map_err(e)?;
    let numeric = f1.with_universe(Universe::numeric(5).map_err(e)?.shared()).map_err(e)?;
    let index: u64 = index_of_candidate(SymmetryMode::Cyclic, &numeric)
        .map_err(e)?
        .try_into()
        .map_err(|_| "index of f1 exceeds 64 bits".to_string())?;

    let mut single = SearchConfig::full(5, SymmetryMode::Cyclic).map_err(e)?.with_range(index, index + 1);
    single.closure_bound = options.slice_bound;
    let one = run_search(&single).map_err(e)?;
    ensure(one.records.len() == 1 && one.records[0].majority_count == 26, || {
        format!("singleton range at {index} gave {:?}", one.records.iter().map(|r| r.majority_count).collect::<Vec<_>>())
    })?;

    let half = options.slice_width / 2;
    let (lo, hi) = (index.saturating_sub(half), index.saturating_sub(half) + options.slice_width);
    let mut base = SearchConfig::full(5, SymmetryMode::Cyclic).map_err(e)?.with_range(lo, hi);
    base.closure_bound = options.slice_bound;
    let (straight, resumed) = run_with_resume(&base, options, "n5.checkpoint.json", options.slice_width * 2 / 5)?;
    ensure(straight.complete, || "slice incomplete".into())?;
    ensure(comparable(&straight) == comparable(&resumed), || "resumed run disagrees".into())?;
    ensure(straight.records.iter().any(|r| r.canonical == one.records[0].canonical), || "f1 missing from the slice".into())?;

    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for r in &straight.records {
        *histogram.entry(r.majority_count).or_default() += 1;
    }
    Ok(format!(
        "f1 at index {index}; slice {lo}..{hi}: {} classes, majority counts {histogram:?}, {} undecided at bound {}",
        straight.records.len(),
        straight.undecided.len(),
        options.slice_bound
    ))
}
