//! Independent brute-force implementations checked against the library.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;

use clonesmith::closure::{closure_of, generates, majority_members, minimality_check};
use clonesmith::fixtures::{self, five_universe, Source};
use clonesmith::relations::clone_contains;
use clonesmith::search::{candidate_count, CandidateSpace, SymmetryMode};
use clonesmith::{generate_invariant_pairs, star_extend, TernaryOp};

/// Fixpoint of all compositions `m0(m1, m2, m3)` over the current set.
fn naive_closure(n: usize, gens: &[&[u8]]) -> BTreeSet<Vec<u8>> {
    let cells = n * n * n;
    let mut set: BTreeSet<Vec<u8>> = (0..3)
        .map(|i| {
            (0..cells)
                .map(|idx| [idx / (n * n), (idx / n) % n, idx % n][i] as u8)
                .collect()
        })
        .collect();
    set.extend(gens.iter().map(|g| g.to_vec()));
    loop {
        let members: Vec<Vec<u8>> = set.iter().cloned().collect();
        let mut grown = false;
        for o in &members {
            for a in &members {
                for b in &members {
                    for c in &members {
                        let t: Vec<u8> = (0..cells)
                            .map(|i| o[(a[i] as usize * n + b[i] as usize) * n + c[i] as usize])
                            .collect();
                        grown |= set.insert(t);
                    }
                }
            }
        }
        if !grown {
            return set;
        }
    }
}

fn is_majority_table(n: usize, t: &[u8]) -> bool {
    (0..n).all(|a| {
        (0..n).all(|b| {
            let a8 = a as u8;
            t[(a * n + a) * n + b] == a8 && t[(a * n + b) * n + a] == a8 && t[(b * n + a) * n + a] == a8
        })
    })
}

fn naive_majority(n: usize, set: &BTreeSet<Vec<u8>>) -> BTreeSet<Vec<u8>> {
    set.iter().filter(|t| is_majority_table(n, t)).cloned().collect()
}

fn tables(ops: &[TernaryOp]) -> BTreeSet<Vec<u8>> {
    ops.iter().map(|o| o.table().to_vec()).collect()
}

#[test]
fn closures_match_the_naive_fixpoint() {
    for name in ["m1", "m2", "d2", "d3", "m3", "M1", "M2", "M3", "M3_5", "f1"] {
        let op = fixtures::get(name).unwrap();
        let naive = naive_closure(op.size(), &[op.table()]);
        let fast = closure_of(op).unwrap();
        assert_eq!(tables(fast.members()), naive, "{name}");
    }
}

#[test]
fn published_majority_counts() {
    for (name, count) in [("m1", 1), ("m2", 3), ("m3", 8), ("f1", 26)] {
        let op = fixtures::get(name).unwrap();
        assert_eq!(naive_majority(op.size(), &naive_closure(op.size(), &[op.table()])).len(), count, "{name}");
    }
}

#[test]
fn star_extensions_triple_the_count() {
    for (name, count) in [("m1", 3), ("m3", 24)] {
        let s = star_extend(fixtures::get(name).unwrap(), 1).unwrap();
        let naive = naive_majority(s.size(), &naive_closure(s.size(), &[s.table()]));
        assert_eq!(naive.len(), count, "{name}*");
        assert_eq!(tables(majority_members(&closure_of(&s).unwrap()).members()), naive);
    }
}

/// Projections closed under `h` applied coordinatewise, or `None` past `cap`.
fn naive_clone(n: usize, h: &[u8], cap: usize) -> Option<HashSet<Vec<u8>>> {
    let cells = n * n * n;
    let mut members: Vec<Vec<u8>> = (0..3)
        .map(|i| (0..cells).map(|idx| [idx / (n * n), (idx / n) % n, idx % n][i] as u8).collect())
        .collect();
    let mut set: HashSet<Vec<u8>> = members.iter().cloned().collect();
    loop {
        let mut fresh = Vec::new();
        for a in &members {
            for b in &members {
                for c in &members {
                    let t: Vec<u8> =
                        (0..cells).map(|i| h[(a[i] as usize * n + b[i] as usize) * n + c[i] as usize]).collect();
                    if set.insert(t.clone()) {
                        fresh.push(t);
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Some(set);
        }
        if set.len() > cap {
            return None;
        }
        members.extend(fresh);
    }
}

/// Minimal iff every majority member regenerates `f`.
fn naive_minimal(op: &TernaryOp) -> bool {
    let n = op.size();
    let members = naive_majority(n, &naive_closure(n, &[op.table()]));
    members.iter().all(|h| naive_clone(n, h, usize::MAX).unwrap().contains(op.table()))
}

#[test]
fn minimality_agrees_with_naive_generation() {
    for f in fixtures::by_source(Source::Table1).into_iter().chain(fixtures::by_source(Source::Table2)) {
        assert!(naive_minimal(&f.op), "{}", f.name);
        assert!(minimality_check(&f.op).unwrap().minimal, "{}", f.name);
    }
    assert!(naive_minimal(fixtures::get("f1").unwrap()));
}

#[test]
fn clone_membership_on_three_elements() {
    // every pair (h, f) of majority operations on three elements with [h] small
    let space = CandidateSpace::new(3, SymmetryMode::All).unwrap();
    let ops: Vec<TernaryOp> = (0..729).map(|i| space.decode(i).unwrap()).collect();
    let mut generators = 0;
    let mut positive = 0;
    for h in &ops {
        let Some(c) = naive_clone(3, h.table(), 60) else { continue };
        generators += 1;
        for f in &ops {
            let expected = c.contains(f.table());
            assert_eq!(clone_contains(h, f).unwrap(), expected, "{:?} in [{:?}]", f.table(), h.table());
            positive += expected as usize;
        }
    }
    assert_eq!(generators, 189);
    assert!(positive > generators);
}

#[test]
fn clone_membership_on_the_five_element_fixtures() {
    let f1 = fixtures::get("f1").unwrap();
    let members = majority_members(&closure_of(f1).unwrap());
    for h in members.members() {
        assert!(clone_contains(h, f1).unwrap());
        assert!(generates(h, f1).unwrap());
    }
    let m3_like = fixtures::get("M3").unwrap();
    for f in fixtures::by_source(Source::Table2) {
        assert_eq!(clone_contains(m3_like, &f.op).unwrap(), generates(m3_like, &f.op).unwrap(), "{}", f.name);
    }
}

/// Smallest relation containing the seeds and closed under `f` coordinatewise.
fn naive_relation(f: &TernaryOp, seeds: &[(u8, u8)]) -> BTreeSet<(u8, u8)> {
    let mut rel: BTreeSet<(u8, u8)> = seeds.iter().copied().collect();
    loop {
        let pairs: Vec<(u8, u8)> = rel.iter().copied().collect();
        let mut grown = false;
        for p in &pairs {
            for q in &pairs {
                for r in &pairs {
                    grown |= rel.insert((f.eval([p.0, q.0, r.0]), f.eval([p.1, q.1, r.1])));
                }
            }
        }
        if !grown {
            return rel;
        }
    }
}

#[test]
fn invariant_relations_match_the_naive_fixpoint() {
    let u = five_universe();
    let f1 = fixtures::get("f1").unwrap();
    let p = |a: &str, b: &str| (u.parse_element(a).unwrap(), u.parse_element(b).unwrap());
    let theta_seeds = [p("0", "0"), p("1", "1b"), p("2", "2b")];
    let rho_seeds = [p("2", "0"), p("1", "1b"), p("0", "2b")];
    for (seeds, size) in [(&theta_seeds, 5), (&rho_seeds, 7)] {
        let naive = naive_relation(f1, seeds);
        assert_eq!(naive.len(), size);
        let fast: BTreeSet<(u8, u8)> = generate_invariant_pairs(f1, seeds).unwrap().pairs().collect();
        assert_eq!(fast, naive);
    }
}

#[test]
fn candidate_counts_follow_the_orbit_count() {
    for n in 2..=6usize {
        let distinct = n * (n - 1) * (n - 2);
        let base = BigUint::from(n);
        assert_eq!(candidate_count(n, SymmetryMode::Cyclic).unwrap(), base.pow(distinct as u32 / 3), "n={n}");
        assert_eq!(candidate_count(n, SymmetryMode::All).unwrap(), base.pow(distinct as u32), "n={n}");
    }
    assert_eq!(candidate_count(5, SymmetryMode::Cyclic).unwrap().to_string(), "95367431640625");
}
