//! Ternary operations stored as dense lookup tables.
//!
//! The value `f(a, b, c)` lives at index `(a·n + b)·n + c`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::universe::{Relabeling, Universe};

#[inline]
pub fn index(n: usize, a: u8, b: u8, c: u8) -> usize {
    (a as usize * n + b as usize) * n + c as usize
}

/// All triples of `0..n` in table order.
pub fn triples(n: usize) -> impl Iterator<Item = [u8; 3]> {
    let n = n as u8;
    (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| [a, b, c])))
}

/// The element that occurs at least twice in a triple with a repetition.
#[inline]
pub fn repeated_element([a, b, c]: [u8; 3]) -> Option<u8> {
    if a == b || a == c {
        Some(a)
    } else if b == c {
        Some(b)
    } else {
        None
    }
}

/// A permutation of the three argument positions.
///
/// Applying `[p0, p1, p2]` to `f` yields `(a0, a1, a2) ↦ f(a_p0, a_p1, a_p2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u8; 3]", into = "[u8; 3]")]
pub struct VarPerm([u8; 3]);

impl TryFrom<[u8; 3]> for VarPerm {
    type Error = Error;

    fn try_from(p: [u8; 3]) -> Result<Self> {
        VarPerm::new(p)
    }
}

impl From<VarPerm> for [u8; 3] {
    fn from(p: VarPerm) -> Self {
        p.0
    }
}

impl VarPerm {
    pub const IDENTITY: VarPerm = VarPerm([0, 1, 2]);
    /// `(x1, x2, x3) ↦ (x2, x3, x1)`.
    pub const ROTATE: VarPerm = VarPerm([1, 2, 0]);
    /// The six permutations, identity first, in lexicographic order.
    pub const ALL: [VarPerm; 6] = [
        VarPerm([0, 1, 2]),
        VarPerm([0, 2, 1]),
        VarPerm([1, 0, 2]),
        VarPerm([1, 2, 0]),
        VarPerm([2, 0, 1]),
        VarPerm([2, 1, 0]),
    ];

    pub fn new(p: [u8; 3]) -> Result<Self> {
        let mut sorted = p;
        sorted.sort_unstable();
        if sorted != [0, 1, 2] {
            return Err(Error::NotBijective(format!("variable permutation {p:?}")));
        }
        Ok(VarPerm(p))
    }

    pub fn positions(self) -> [u8; 3] {
        self.0
    }

    #[inline]
    pub fn apply(self, args: [u8; 3]) -> [u8; 3] {
        [args[self.0[0] as usize], args[self.0[1] as usize], args[self.0[2] as usize]]
    }

    /// The permutation `q` with `permute(permute(f, self), other) = permute(f, q)`.
    pub fn then(self, other: VarPerm) -> VarPerm {
        VarPerm(self.apply(other.0))
    }

    pub fn inverse(self) -> VarPerm {
        let mut inv = [0u8; 3];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        VarPerm(inv)
    }
}

/// A ternary operation on a finite universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TernaryOp {
    universe: Arc<Universe>,
    table: Vec<u8>,
}

impl fmt::Debug for TernaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryOp(n={}, {:?})", self.size(), self.table)
    }
}

impl TernaryOp {
    pub fn new(universe: Arc<Universe>, table: Vec<u8>) -> Result<Self> {
        let n = universe.size();
        if table.len() != n * n * n {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, got {}",
                n * n * n,
                table.len()
            )));
        }
        if let Some(pos) = table.iter().position(|&v| v as usize >= n) {
            return Err(Error::InvalidTable(format!(
                "entry {} at position {pos} is outside the universe",
                table[pos]
            )));
        }
        Ok(TernaryOp { universe, table })
    }

    /// Builds the table from a function of the argument triple.
    pub fn from_fn(universe: Arc<Universe>, mut f: impl FnMut([u8; 3]) -> u8) -> Result<Self> {
        let n = universe.size();
        let table = triples(n).map(&mut f).collect();
        Self::new(universe, table)
    }

    /// Majority-forced on triples with a repetition; `f` supplies the rest.
    pub fn majority_from_fn(
        universe: Arc<Universe>,
        mut f: impl FnMut([u8; 3]) -> u8,
    ) -> Result<Self> {
        Self::from_fn(universe, |t| repeated_element(t).unwrap_or_else(|| f(t)))
    }

    pub(crate) fn from_raw(universe: Arc<Universe>, table: Vec<u8>) -> Self {
        debug_assert_eq!(table.len(), universe.size().pow(3));
        TernaryOp { universe, table }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.size()
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u8> {
        self.table
    }

    #[inline]
    pub fn get(&self, a: u8, b: u8, c: u8) -> u8 {
        self.table[index(self.size(), a, b, c)]
    }

    #[inline]
    pub fn eval(&self, [a, b, c]: [u8; 3]) -> u8 {
        self.get(a, b, c)
    }

    /// Same universe by value (pointer equality is only a shortcut).
    pub fn same_universe(&self, other: &TernaryOp) -> bool {
        Arc::ptr_eq(&self.universe, &other.universe) || self.universe == other.universe
    }

    /// The `i`-th projection, `i` in `1..=3`.
    pub fn projection(universe: Arc<Universe>, i: usize) -> Result<Self> {
        if !(1..=3).contains(&i) {
            return Err(Error::InvalidTable(format!("projection index {i} not in 1..=3")));
        }
        Ok(Self::from_raw(universe.clone(), projection_table(universe.size(), i - 1)))
    }

    pub fn is_majority(&self) -> bool {
        let n = self.size() as u8;
        (0..n).all(|a| {
            (0..n).all(|b| self.get(a, a, b) == a && self.get(a, b, a) == a && self.get(b, a, a) == a)
        })
    }

    pub fn is_cyclically_symmetric(&self) -> bool {
        triples(self.size()).all(|[a, b, c]| self.get(a, b, c) == self.get(b, c, a))
    }

    pub fn is_conservative(&self) -> bool {
        triples(self.size()).all(|t| t.contains(&self.eval(t)))
    }

    /// `outer(g1, g2, g3)` computed pointwise.
    pub fn compose(outer: &TernaryOp, g1: &TernaryOp, g2: &TernaryOp, g3: &TernaryOp) -> Result<Self> {
        if !(outer.same_universe(g1) && outer.same_universe(g2) && outer.same_universe(g3)) {
            return Err(Error::UniverseMismatch);
        }
        let mut out = vec![0u8; outer.table.len()];
        compose_into(outer.size(), &outer.table, &g1.table, &g2.table, &g3.table, &mut out);
        Ok(Self::from_raw(outer.universe.clone(), out))
    }

    pub fn permute_vars(&self, perm: VarPerm) -> Self {
        let n = self.size();
        let table = triples(n).map(|t| self.eval(perm.apply(t))).collect();
        Self::from_raw(self.universe.clone(), table)
    }

    /// Conjugate by a base-set bijection: `σ(f(σ⁻¹a, σ⁻¹b, σ⁻¹c))`.
    pub fn relabel(&self, sigma: &Relabeling) -> Result<Self> {
        if sigma.size() != self.size() {
            return Err(Error::UniverseMismatch);
        }
        let inv = sigma.inverse();
        let table = triples(self.size())
            .map(|[a, b, c]| sigma.apply(self.get(inv.apply(a), inv.apply(b), inv.apply(c))))
            .collect();
        Ok(Self::from_raw(self.universe.clone(), table))
    }

    pub fn preserves_subset(&self, subset: &[u8]) -> Result<bool> {
        let mask = subset_mask(self.size(), subset)?;
        Ok(self.subset_violation(mask).is_none())
    }

    fn subset_violation(&self, mask: u32) -> Option<([u8; 3], u8)> {
        let members: Vec<u8> = (0..self.size() as u8).filter(|&e| mask >> e & 1 == 1).collect();
        for &a in &members {
            for &b in &members {
                for &c in &members {
                    let v = self.get(a, b, c);
                    if mask >> v & 1 == 0 {
                        return Some(([a, b, c], v));
                    }
                }
            }
        }
        None
    }

    /// The restriction to `subset`, re-indexed in the order given.
    pub fn restrict(&self, subset: &[u8]) -> Result<Self> {
        let mask = subset_mask(self.size(), subset)?;
        if let Some((triple, value)) = self.subset_violation(mask) {
            return Err(Error::SubsetNotPreserved { triple, value });
        }
        let universe = Arc::new(self.universe.sub_universe(subset)?);
        let mut position = [0u8; 32];
        for (i, &e) in subset.iter().enumerate() {
            position[e as usize] = i as u8;
        }
        let table = triples(subset.len())
            .map(|[i, j, k]| {
                position[self.get(subset[i as usize], subset[j as usize], subset[k as usize]) as usize]
            })
            .collect();
        Ok(Self::from_raw(universe, table))
    }

    /// Same table over a different universe of the same size.
    pub fn with_universe(&self, universe: Arc<Universe>) -> Result<Self> {
        if universe.size() != self.size() {
            return Err(Error::UniverseMismatch);
        }
        Ok(Self::from_raw(universe, self.table.clone()))
    }

    /// Values on the pairwise-distinct triples, in table order.
    pub fn distinct_values(&self) -> Vec<u8> {
        triples(self.size())
            .filter(|&t| repeated_element(t).is_none())
            .map(|t| self.eval(t))
            .collect()
    }
}

pub(crate) fn projection_table(n: usize, i: usize) -> Vec<u8> {
    triples(n).map(|t| t[i]).collect()
}

/// Validates a subset and returns it as a bit mask.
pub(crate) fn subset_mask(n: usize, subset: &[u8]) -> Result<u32> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset("empty subset".into()));
    }
    let mut mask = 0u32;
    for &e in subset {
        if e as usize >= n {
            return Err(Error::InvalidSubset(format!("element {e} outside universe of size {n}")));
        }
        if mask >> e & 1 == 1 {
            return Err(Error::InvalidSubset(format!("element {e} listed twice")));
        }
        mask |= 1 << e;
    }
    Ok(mask)
}

/// Pointwise `out[i] = outer(g1[i], g2[i], g3[i])`.
#[inline]
pub fn compose_into(n: usize, outer: &[u8], g1: &[u8], g2: &[u8], g3: &[u8], out: &mut [u8]) {
    for (((o, &a), &b), &c) in out.iter_mut().zip(g1).zip(g2).zip(g3) {
        *o = outer[(a as usize * n + b as usize) * n + c as usize];
    }
}

#[derive(Serialize, Deserialize)]
struct OpRepr {
    size: usize,
    labels: Vec<String>,
    table: Vec<u8>,
}

impl Serialize for TernaryOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OpRepr {
            size: self.size(),
            labels: self.universe.labels().to_vec(),
            table: self.table.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TernaryOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = OpRepr::deserialize(d)?;
        if repr.size != repr.labels.len() {
            return Err(D::Error::custom(format!(
                "size {} does not match {} labels",
                repr.size,
                repr.labels.len()
            )));
        }
        let universe = Universe::new(repr.labels).map_err(D::Error::custom)?;
        TernaryOp::new(Arc::new(universe), repr.table).map_err(D::Error::custom)
    }
}

impl TernaryOp {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: usize) -> Arc<Universe> {
        Universe::numeric(n).unwrap().shared()
    }

    #[test]
    fn projections() {
        let p1 = TernaryOp::projection(u(3), 1).unwrap();
        assert_eq!(p1.get(1, 2, 0), 1);
        let p3 = TernaryOp::projection(u(3), 3).unwrap();
        assert_eq!(p3.get(0, 1, 2), 2);
        let p2 = TernaryOp::projection(u(5), 2).unwrap();
        assert_eq!(p2.get(4, 0, 3), 0);
        assert!(TernaryOp::projection(u(3), 0).is_err());
        assert!(TernaryOp::projection(u(3), 4).is_err());
    }

    #[test]
    fn projection_is_not_majority() {
        for n in 2..5 {
            assert!(!TernaryOp::projection(u(n), 1).unwrap().is_majority());
        }
        // the single operation on one element is everything at once
        let p = TernaryOp::projection(u(1), 1).unwrap();
        assert!(p.is_majority());
        assert_eq!(p, TernaryOp::projection(u(1), 3).unwrap());
    }

    #[test]
    fn table_validation() {
        assert!(TernaryOp::new(u(2), vec![0; 7]).is_err());
        assert!(TernaryOp::new(u(2), vec![0, 0, 0, 0, 0, 0, 0, 2]).is_err());
        assert!(TernaryOp::new(u(2), vec![0; 8]).is_ok());
    }

    #[test]
    fn compose_rejects_mixed_universes() {
        let a = TernaryOp::projection(u(3), 1).unwrap();
        let b = TernaryOp::projection(u(4), 1).unwrap();
        assert!(matches!(TernaryOp::compose(&a, &a, &a, &b), Err(Error::UniverseMismatch)));
        let other_labels = Universe::new(["x", "y", "z"]).unwrap().shared();
        let c = TernaryOp::projection(other_labels, 1).unwrap();
        assert!(TernaryOp::compose(&a, &c, &a, &a).is_err());
    }

    #[test]
    fn var_perm_algebra() {
        for p in VarPerm::ALL {
            assert_eq!(p.then(p.inverse()), VarPerm::IDENTITY);
            for q in VarPerm::ALL {
                let t = [7, 8, 9];
                // permute by p then by q
                let f = |args: [u8; 3]| args[0] as u32 * 100 + args[1] as u32 * 10 + args[2] as u32;
                let g = |args: [u8; 3]| f(p.apply(args));
                let h = |args: [u8; 3]| g(q.apply(args));
                assert_eq!(h(t), f(p.then(q).apply(t)));
            }
        }
        assert!(VarPerm::new([0, 0, 1]).is_err());
    }

    #[test]
    fn subset_checks() {
        let p = TernaryOp::projection(u(4), 2).unwrap();
        assert!(p.preserves_subset(&[1, 3]).unwrap());
        assert!(p.preserves_subset(&[]).is_err());
        assert!(p.preserves_subset(&[4]).is_err());
        assert!(p.preserves_subset(&[1, 1]).is_err());
        let constant = TernaryOp::from_fn(u(3), |_| 0).unwrap();
        let err = constant.restrict(&[1, 2]).unwrap_err();
        assert!(matches!(err, Error::SubsetNotPreserved { triple: [1, 1, 1], value: 0 }));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let f = TernaryOp::majority_from_fn(u(3), |t| t[2]).unwrap();
        let s = f.to_json();
        assert!(s.starts_with(r#"{"size":3,"labels":["0","1","2"],"table":["#));
        let g = TernaryOp::from_json(&s).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.to_json(), s);
        assert!(TernaryOp::from_json(r#"{"size":2,"labels":["0","1"],"table":[0]}"#).is_err());
    }
}
