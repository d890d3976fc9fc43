//! Binary relations invariant under a ternary operation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::op::TernaryOp;
use crate::universe::Universe;

/// A set of ordered pairs, stored as one bit row per left element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryRelation {
    universe: Arc<Universe>,
    rows: Vec<u16>,
}

impl fmt::Debug for BinaryRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = &self.universe;
        let pairs: Vec<String> =
            self.pairs().map(|(a, b)| format!("({},{})", u.label(a), u.label(b))).collect();
        write!(f, "{{{}}}", pairs.join(","))
    }
}

impl BinaryRelation {
    pub fn empty(universe: Arc<Universe>) -> Self {
        let n = universe.size();
        BinaryRelation { universe, rows: vec![0; n] }
    }

    pub fn diagonal(universe: Arc<Universe>) -> Self {
        let mut r = Self::empty(universe);
        for a in 0..r.size() as u8 {
            r.insert(a, a);
        }
        r
    }

    pub fn from_pairs(universe: Arc<Universe>, pairs: impl IntoIterator<Item = (u8, u8)>) -> Result<Self> {
        let mut r = Self::empty(universe);
        for (a, b) in pairs {
            if !(r.universe.contains(a) && r.universe.contains(b)) {
                return Err(Error::InvalidSubset(format!("pair ({a},{b}) outside the universe")));
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    /// Pairs given by labels, e.g. `[("1", "1b")]`.
    pub fn from_labels<'a>(universe: Arc<Universe>, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let parsed = pairs
            .into_iter()
            .map(|(a, b)| Ok((universe.parse_element(a)?, universe.parse_element(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(universe, parsed)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.size()
    }

    pub fn contains(&self, a: u8, b: u8) -> bool {
        self.rows[a as usize] >> b & 1 == 1
    }

    /// Returns whether the pair was new.
    pub fn insert(&mut self, a: u8, b: u8) -> bool {
        let was = self.contains(a, b);
        self.rows[a as usize] |= 1 << b;
        !was
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        let n = self.size() as u8;
        (0..n).flat_map(move |a| (0..n).filter(move |&b| self.contains(a, b)).map(move |b| (a, b)))
    }

    /// `{b : (a, b) ∈ R}`.
    pub fn right_of(&self, a: u8) -> Vec<u8> {
        (0..self.size() as u8).filter(|&b| self.contains(a, b)).collect()
    }

    /// `{a : (a, b) ∈ R}`.
    pub fn left_of(&self, b: u8) -> Vec<u8> {
        (0..self.size() as u8).filter(|&a| self.contains(a, b)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RelationRepr { pairs: self.pairs().map(|(a, b)| [a, b]).collect() }).unwrap()
    }

    pub fn from_json(universe: Arc<Universe>, s: &str) -> Result<Self> {
        let repr: RelationRepr = serde_json::from_str(s)?;
        Self::from_pairs(universe, repr.pairs.into_iter().map(|[a, b]| (a, b)))
    }
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    pairs: Vec<[u8; 2]>,
}

/// The least relation containing `seeds` that is closed under `f` applied
/// componentwise.
pub fn generate_invariant_pairs(f: &TernaryOp, seeds: &[(u8, u8)]) -> Result<BinaryRelation> {
    let mut rel = BinaryRelation::from_pairs(f.universe().clone(), seeds.iter().copied())?;
    let mut list: Vec<(u8, u8)> = rel.pairs().collect();
    let mut done = 0;
    while done < list.len() {
        let len = list.len();
        for i in 0..len {
            for j in 0..len {
                let both_old = i < done && j < done;
                for k in 0..len {
                    if both_old && k < done {
                        continue;
                    }
                    let (a, b, c) = (list[i], list[j], list[k]);
                    let pair = (f.get(a.0, b.0, c.0), f.get(a.1, b.1, c.1));
                    if rel.insert(pair.0, pair.1) {
                        list.push(pair);
                    }
                }
            }
        }
        done = len;
    }
    Ok(rel)
}

pub fn preserves_relation(op: &TernaryOp, rel: &BinaryRelation) -> bool {
    let pairs: Vec<(u8, u8)> = rel.pairs().collect();
    pairs.iter().all(|a| {
        pairs
            .iter()
            .all(|b| pairs.iter().all(|c| rel.contains(op.get(a.0, b.0, c.0), op.get(a.1, b.1, c.1))))
    })
}

/// Whether `f ∈ [h]` for a majority operation `h`.
///
/// By the Baker–Pixley theorem an operation lies in a clone with a majority
/// operation iff it preserves every subuniverse of the square. For ternary `f`
/// this means `f(p, q, r) ∈ Sg_h{p, q, r}` for all pairs `p, q, r`. Both
/// operations are majority operations, so only three distinct pairs matter,
/// and a set and its transpose give the same condition.
pub fn clone_contains(h: &TernaryOp, f: &TernaryOp) -> Result<bool> {
    if !h.same_universe(f) {
        return Err(Error::UniverseMismatch);
    }
    if !h.is_majority() || !f.is_majority() {
        return Err(Error::NotMajority);
    }
    let n = h.size();
    let (ht, ft) = (h.table(), f.table());
    let at = |t: &[u8], a: u8, b: u8, c: u8| t[(a as usize * n + b as usize) * n + c as usize];

    // subsets generated by three elements
    for a in 0..n as u8 {
        for b in a + 1..n as u8 {
            for c in b + 1..n as u8 {
                let key = [a, b, c];
                let Some(missing) = outside(key, |x, y, z| at(ft, x, y, z)) else { continue };
                let mut set: u16 = (1 << a) | (1 << b) | (1 << c);
                let found = subalgebra(&key, &missing, |x, y, z| at(ht, x, y, z), |x| {
                    let new = set & (1 << x) == 0;
                    set |= 1 << x;
                    new
                });
                if !found {
                    return Ok(false);
                }
            }
        }
    }

    // subuniverses of the square generated by three pairs
    let n2 = n * n;
    let fst: Vec<u8> = (0..n2).map(|p| (p / n) as u8).collect();
    let snd: Vec<u8> = (0..n2).map(|p| (p % n) as u8).collect();
    let swap: Vec<u8> = (0..n2).map(|p| ((p % n) * n + p / n) as u8).collect();
    let apply = |t: &[u8], p: u8, q: u8, r: u8| -> u8 {
        let (p, q, r) = (p as usize, q as usize, r as usize);
        at(t, fst[p], fst[q], fst[r]) * n as u8 + at(t, snd[p], snd[q], snd[r])
    };
    // h on pairs as a lookup table while that stays small
    let h2: Vec<u8> = if n2 <= 36 {
        let mut t = Vec::with_capacity(n2 * n2 * n2);
        for p in 0..n2 as u8 {
            for q in 0..n2 as u8 {
                for r in 0..n2 as u8 {
                    t.push(apply(ht, p, q, r));
                }
            }
        }
        t
    } else {
        Vec::new()
    };
    let happ = |p: u8, q: u8, r: u8| -> u8 {
        if h2.is_empty() {
            apply(ht, p, q, r)
        } else {
            h2[(p as usize * n2 + q as usize) * n2 + r as usize]
        }
    };
    let bit = |set: &[u64; 3], x: u8| set[x as usize / 64] & (1 << (x % 64)) != 0;
    let add = |set: &mut [u64; 3], x: u8| set[x as usize / 64] |= 1 << (x % 64);
    for p in 0..n2 as u8 {
        for q in p + 1..n2 as u8 {
            for r in q + 1..n2 as u8 {
                let (ps, qs, rs) = (p as usize, q as usize, r as usize);
                // a shared coordinate reduces to the subset case above
                if fst[ps] == fst[qs] && fst[qs] == fst[rs] || snd[ps] == snd[qs] && snd[qs] == snd[rs] {
                    continue;
                }
                let mut transposed = [swap[ps], swap[qs], swap[rs]];
                transposed.sort_unstable();
                if transposed < [p, q, r] {
                    continue;
                }
                let key = [p, q, r];
                let Some(missing) = outside(key, |x, y, z| apply(ft, x, y, z)) else { continue };
                let mut step = [0u64; 3];
                for [x, y, z] in PERMS {
                    add(&mut step, happ(key[x], key[y], key[z]));
                }
                if missing.iter().flatten().all(|&t| bit(&step, t)) {
                    continue;
                }
                let mut set = [0u64; 3];
                key.iter().for_each(|&x| add(&mut set, x));
                let found = subalgebra(&key, &missing, happ, |x| {
                    let new = !bit(&set, x);
                    add(&mut set, x);
                    new
                });
                if !found {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Values of `op` on the orderings of `key` that fall outside `key`, if any.
fn outside(key: [u8; 3], op: impl Fn(u8, u8, u8) -> u8) -> Option<[Option<u8>; 6]> {
    let mut out = [None; 6];
    let mut any = false;
    for (slot, [x, y, z]) in out.iter_mut().zip(PERMS) {
        let t = op(key[x], key[y], key[z]);
        if !key.contains(&t) {
            *slot = Some(t);
            any = true;
        }
    }
    any.then_some(out)
}

/// Generates from the distinct elements `gens` under a majority operation
/// `op` until every value in `targets` has appeared, reporting whether they
/// all did. `insert` records an element and reports whether it was new.
fn subalgebra(
    gens: &[u8],
    targets: &[Option<u8>],
    op: impl Fn(u8, u8, u8) -> u8,
    mut insert: impl FnMut(u8) -> bool,
) -> bool {
    let mut pending: Vec<u8> = targets.iter().flatten().copied().collect();
    pending.sort_unstable();
    pending.dedup();
    let mut elems = gens.to_vec();
    let mut done = 0;
    while done < elems.len() {
        let len = elems.len();
        for i in 0..len {
            for j in 0..len {
                if j == i {
                    continue;
                }
                let both_old = i < done && j < done;
                for k in 0..len {
                    if k == i || k == j || both_old && k < done {
                        continue;
                    }
                    let x = op(elems[i], elems[j], elems[k]);
                    if insert(x) {
                        elems.push(x);
                        pending.retain(|&t| t != x);
                        if pending.is_empty() {
                            return true;
                        }
                    }
                }
            }
        }
        done = len;
    }
    pending.is_empty()
}

/// Which side of the relation holds the known value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `(known, candidate) ∈ R`.
    KnownLeft,
    /// `(candidate, known) ∈ R`.
    KnownRight,
}

/// An operation known on some triples only.
#[derive(Clone, Debug)]
pub struct PartialOp {
    universe: Arc<Universe>,
    values: Vec<Option<u8>>,
}

impl PartialOp {
    pub fn unknown(universe: Arc<Universe>) -> Self {
        let n = universe.size();
        PartialOp { universe, values: vec![None; n * n * n] }
    }

    pub fn set(&mut self, t: [u8; 3], v: u8) {
        let n = self.universe.size();
        self.values[crate::op::index(n, t[0], t[1], t[2])] = Some(v);
    }

    pub fn get(&self, t: [u8; 3]) -> Option<u8> {
        let n = self.universe.size();
        self.values[crate::op::index(n, t[0], t[1], t[2])]
    }
}

impl From<&TernaryOp> for PartialOp {
    fn from(op: &TernaryOp) -> Self {
        PartialOp { universe: op.universe().clone(), values: op.table().iter().map(|&v| Some(v)).collect() }
    }
}

/// Values admissible for `h(query)` given `h(linked)` and the relation
/// `h(linked) R h(query)` (or the reverse orientation). An empty result
/// means the constraints are contradictory.
pub fn constrain_values(
    h: &PartialOp,
    rel: &BinaryRelation,
    query: [u8; 3],
    linked: [u8; 3],
    orientation: Orientation,
) -> Result<Vec<u8>> {
    if !query.iter().all(|&e| rel.universe.contains(e)) {
        return Err(Error::InvalidSubset(format!("query triple {query:?} outside the universe")));
    }
    let known = h
        .get(linked)
        .ok_or_else(|| Error::InvalidTable(format!("value at linked triple {linked:?} is unknown")))?;
    Ok(match orientation {
        Orientation::KnownLeft => rel.right_of(known),
        Orientation::KnownRight => rel.left_of(known),
    })
}

/// Intersection of several admissible-value sets.
pub fn intersect(sets: &[Vec<u8>]) -> Vec<u8> {
    let Some((first, rest)) = sets.split_first() else {
        return Vec::new();
    };
    first.iter().copied().filter(|v| rest.iter().all(|s| s.contains(v))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, five_universe};

    fn pairs(labels: &[(&str, &str)]) -> Vec<(u8, u8)> {
        let u = five_universe();
        labels.iter().map(|(a, b)| (u.parse_element(a).unwrap(), u.parse_element(b).unwrap())).collect()
    }

    #[test]
    fn theta_and_rho() {
        let f1 = fixtures::get("f1").unwrap();
        let theta = generate_invariant_pairs(f1, &pairs(&[("0", "0"), ("1", "1b"), ("2", "2b")])).unwrap();
        let expect = BinaryRelation::from_pairs(
            five_universe(),
            pairs(&[("0", "0"), ("1", "1"), ("1", "1b"), ("2", "2"), ("2", "2b")]),
        )
        .unwrap();
        assert_eq!(theta, expect);
        let rho = generate_invariant_pairs(f1, &pairs(&[("2", "0"), ("1", "1b"), ("0", "2b")])).unwrap();
        assert_eq!(rho.len(), 7);
        assert!(preserves_relation(f1, &theta));
        assert!(preserves_relation(f1, &rho));
    }

    #[test]
    fn diagonal_is_invariant() {
        for f in fixtures::all().iter().take(30) {
            let diag = BinaryRelation::diagonal(f.op.universe().clone());
            let seeds: Vec<_> = diag.pairs().collect();
            assert_eq!(generate_invariant_pairs(&f.op, &seeds).unwrap(), diag);
        }
    }

    #[test]
    fn projection_preserves_everything() {
        let p = TernaryOp::projection(five_universe(), 1).unwrap();
        let r = BinaryRelation::from_pairs(five_universe(), pairs(&[("0", "2"), ("1b", "1")])).unwrap();
        assert!(preserves_relation(&p, &r));
    }

    #[test]
    fn empty_row_gives_nothing() {
        let f1 = fixtures::get("f1").unwrap();
        let h = PartialOp::from(f1);
        let empty = BinaryRelation::empty(five_universe());
        assert!(constrain_values(&h, &empty, [0, 3, 4], [0, 1, 2], Orientation::KnownLeft).unwrap().is_empty());
        assert!(constrain_values(&PartialOp::unknown(five_universe()), &empty, [0, 3, 4], [0, 1, 2], Orientation::KnownLeft).is_err());
    }

    #[test]
    fn json_export() {
        let r = BinaryRelation::from_pairs(five_universe(), [(0, 4), (1, 1)]).unwrap();
        assert_eq!(r.to_json(), r#"{"pairs":[[0,4],[1,1]]}"#);
        assert_eq!(BinaryRelation::from_json(five_universe(), &r.to_json()).unwrap(), r);
        assert!(BinaryRelation::from_pairs(five_universe(), [(0, 5)]).is_err());
    }
}
