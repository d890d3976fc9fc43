//! Canonical forms under base-set relabeling and variable permutation.
//!
//! The canonical form is the lexicographically least table in the orbit.
//! Candidates are compared entry by entry and abandoned at the first entry
//! that exceeds the current best.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::op::{triples, TernaryOp, VarPerm};
use crate::universe::{all_permutations, Relabeling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CanonMode {
    RelabelOnly,
    #[default]
    RelabelAndVarperm,
}

impl CanonMode {
    fn perms(self) -> &'static [VarPerm] {
        match self {
            CanonMode::RelabelOnly => &VarPerm::ALL[..1],
            CanonMode::RelabelAndVarperm => &VarPerm::ALL,
        }
    }
}

/// Canonical table plus a witness with
/// `canonical = permute_vars(relabel(op, sigma), perm)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub op: TernaryOp,
    pub sigma: Relabeling,
    pub perm: VarPerm,
}

/// Precomputed orbit machinery for one universe size.
pub struct Canonicalizer {
    n: usize,
    /// (sigma, sigma inverse) pairs in lexicographic order of sigma
    relabelings: Vec<(Vec<u8>, Vec<u8>)>,
    triples: Vec<[u8; 3]>,
}

impl Canonicalizer {
    pub fn new(n: usize) -> Self {
        let relabelings = all_permutations(n)
            .into_iter()
            .map(|s| {
                let mut inv = vec![0u8; n];
                for (i, &x) in s.iter().enumerate() {
                    inv[x as usize] = i as u8;
                }
                (s, inv)
            })
            .collect();
        Canonicalizer { n, relabelings, triples: triples(n).collect() }
    }

    #[inline]
    fn entry(&self, table: &[u8], sigma: &[u8], inv: &[u8], perm: VarPerm, t: [u8; 3]) -> u8 {
        let [a, b, c] = perm.apply(t);
        let n = self.n;
        sigma[table[(inv[a as usize] as usize * n + inv[b as usize] as usize) * n + inv[c as usize] as usize] as usize]
    }

    /// Compares the transformed table against `best`.
    fn compare(&self, table: &[u8], sigma: &[u8], inv: &[u8], perm: VarPerm, best: &[u8]) -> Ordering {
        for (t, &b) in self.triples.iter().zip(best) {
            match self.entry(table, sigma, inv, perm, *t).cmp(&b) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    fn transform(&self, table: &[u8], sigma: &[u8], inv: &[u8], perm: VarPerm) -> Vec<u8> {
        self.triples.iter().map(|&t| self.entry(table, sigma, inv, perm, t)).collect()
    }

    pub fn canonical_form(&self, op: &TernaryOp, mode: CanonMode) -> Canonical {
        assert_eq!(op.size(), self.n, "canonicalizer built for another size");
        let table = op.table();
        let mut best = table.to_vec();
        let mut witness = (0usize, VarPerm::IDENTITY);
        for (si, (sigma, inv)) in self.relabelings.iter().enumerate() {
            for &perm in mode.perms() {
                if self.compare(table, sigma, inv, perm, &best) == Ordering::Less {
                    best = self.transform(table, sigma, inv, perm);
                    witness = (si, perm);
                }
            }
        }
        // the identity comes first, so ties keep the earliest witness
        Canonical {
            op: TernaryOp::new(op.universe().clone(), best).expect("orbit preserves validity"),
            sigma: Relabeling::new(self.relabelings[witness.0].0.clone()).unwrap(),
            perm: witness.1,
        }
    }

    /// Whether `op` is already the least table of its orbit.
    pub fn is_canonical(&self, op: &TernaryOp, mode: CanonMode) -> bool {
        let table = op.table();
        self.relabelings.iter().all(|(sigma, inv)| {
            mode.perms().iter().all(|&perm| self.compare(table, sigma, inv, perm, table) != Ordering::Less)
        })
    }
}

pub fn canonical_form(op: &TernaryOp, mode: CanonMode) -> Canonical {
    Canonicalizer::new(op.size()).canonical_form(op, mode)
}

/// A witness `(sigma, perm)` with `permute_vars(relabel(a, sigma), perm) = b`
/// when both tables lie in one orbit. Labels are ignored.
pub fn are_isomorphic(a: &TernaryOp, b: &TernaryOp, mode: CanonMode) -> Result<Option<(Relabeling, VarPerm)>> {
    if a.size() != b.size() {
        return Err(Error::UniverseMismatch);
    }
    let canon = Canonicalizer::new(a.size());
    let ca = canon.canonical_form(a, mode);
    let cb = canon.canonical_form(b, mode);
    if ca.op.table() != cb.op.table() {
        return Ok(None);
    }
    let sigma = cb.sigma.inverse().compose(&ca.sigma);
    let perm = ca.perm.then(cb.perm.inverse());
    debug_assert_eq!(apply_witness(a, &sigma, perm).table(), b.table());
    Ok(Some((sigma, perm)))
}

/// `permute_vars(relabel(op, sigma), perm)`.
pub fn apply_witness(op: &TernaryOp, sigma: &Relabeling, perm: VarPerm) -> TernaryOp {
    op.relabel(sigma).expect("relabeling fits").permute_vars(perm)
}
