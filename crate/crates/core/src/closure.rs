//! Ternary parts of clones as unitary Menger algebras.
//!
//! The ternary term functions of `(A; F)` are the least set of ternary
//! operations that contains the three projections and is closed under
//! `g(t1, t2, t3)` for every basic operation `g ∈ F`. That set is already
//! closed under general Menger composition, so the worklist below only uses
//! generators as outer operations and never rescans a triple of old members.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::op::{compose_into, projection_table, TernaryOp, VarPerm};
use crate::term::Term;
use crate::universe::Universe;

/// Default cap on closure size.
pub const DEFAULT_CLOSURE_BOUND: usize = 10_000;

/// Environment variable overriding [`DEFAULT_CLOSURE_BOUND`].
pub const CLOSURE_BOUND_ENV: &str = "CLONESMITH_CLOSURE_BOUND";

/// The closure bound from the environment, or the default.
pub fn closure_bound_from_env() -> usize {
    std::env::var(CLOSURE_BOUND_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CLOSURE_BOUND)
}

/// How a member was first produced: a projection or `gens[g](m_i, m_j, m_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Projection(u8),
    Compose { generator: u32, args: [u32; 3] },
}

/// Order in which candidate triples are scanned. Only insertion order depends on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScanOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Clone, Copy, Debug)]
pub struct ClosureOptions {
    pub bound: usize,
    pub scan: ScanOrder,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions { bound: DEFAULT_CLOSURE_BOUND, scan: ScanOrder::Forward }
    }
}

impl ClosureOptions {
    pub fn with_bound(bound: usize) -> Self {
        ClosureOptions { bound, ..Default::default() }
    }
}

/// A deduplicated set of ternary operations on one universe.
#[derive(Clone, Debug)]
pub struct OpSet {
    universe: Arc<Universe>,
    members: Vec<TernaryOp>,
    closed: bool,
    generators: Vec<TernaryOp>,
    provenance: Vec<Provenance>,
}

impl PartialEq for OpSet {
    /// Set equality: same universe and the same members in any order.
    fn eq(&self, other: &Self) -> bool {
        if self.universe != other.universe || self.len() != other.len() {
            return false;
        }
        let mut a: Vec<&[u8]> = self.members.iter().map(|m| m.table()).collect();
        let mut b: Vec<&[u8]> = other.members.iter().map(|m| m.table()).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

impl OpSet {
    /// An unclosed set; duplicates are dropped, first occurrence wins.
    pub fn new(universe: Arc<Universe>, ops: impl IntoIterator<Item = TernaryOp>) -> Result<Self> {
        let mut members: Vec<TernaryOp> = Vec::new();
        for op in ops {
            if op.universe() != &universe {
                return Err(Error::UniverseMismatch);
            }
            if !members.contains(&op) {
                members.push(op);
            }
        }
        Ok(OpSet { universe, members, closed: false, generators: Vec::new(), provenance: Vec::new() })
    }

    pub fn from_ops(ops: impl IntoIterator<Item = TernaryOp>) -> Result<Self> {
        let ops: Vec<TernaryOp> = ops.into_iter().collect();
        let universe = ops
            .first()
            .ok_or_else(|| Error::InvalidTable("empty generator set".into()))?
            .universe()
            .clone();
        Self::new(universe, ops)
    }

    pub fn singleton(op: &TernaryOp) -> Self {
        OpSet {
            universe: op.universe().clone(),
            members: vec![op.clone()],
            closed: false,
            generators: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn members(&self) -> &[TernaryOp] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// The generators a closed set was computed from.
    pub fn generators(&self) -> &[TernaryOp] {
        &self.generators
    }

    pub fn contains(&self, op: &TernaryOp) -> bool {
        self.position(op).is_some()
    }

    pub fn position(&self, op: &TernaryOp) -> Option<usize> {
        self.members.iter().position(|m| m == op)
    }

    /// Indices of the three projections, if present.
    pub fn projection_indices(&self) -> Option<[usize; 3]> {
        let n = self.universe.size();
        let mut out = [0; 3];
        for (i, slot) in out.iter_mut().enumerate() {
            let p = projection_table(n, i);
            *slot = self.members.iter().position(|m| m.table() == p.as_slice())?;
        }
        Some(out)
    }

    /// A term over the generator symbols producing member `index`.
    ///
    /// Only available for closed sets built by [`ternary_closure`] from a
    /// single generator; the term uses `d` for that generator.
    pub fn witness_term(&self, index: usize) -> Option<Term> {
        if self.generators.len() != 1 || self.provenance.len() != self.members.len() {
            return None;
        }
        witness_from_provenance(&self.provenance, index)
    }

    /// How each member was first produced, when known.
    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }
}

fn witness_from_provenance(prov: &[Provenance], index: usize) -> Option<Term> {
    Some(match prov.get(index)? {
        Provenance::Projection(i) => Term::var(*i as usize + 1),
        Provenance::Compose { args, .. } => Term::node(
            witness_from_provenance(prov, args[0] as usize)?,
            witness_from_provenance(prov, args[1] as usize)?,
            witness_from_provenance(prov, args[2] as usize)?,
        ),
    })
}

/// Result of a closure run that may stop early once a target shows up.
struct RawClosure {
    tables: Vec<Vec<u8>>,
    provenance: Vec<Provenance>,
    hit: Option<usize>,
}

fn raw_closure(
    n: usize,
    gens: &[&[u8]],
    options: ClosureOptions,
    visit: &mut dyn FnMut(usize, &[u8]) -> bool,
) -> Result<RawClosure> {
    let mut tables: Vec<Vec<u8>> = Vec::new();
    let mut provenance = Vec::new();
    let mut index: FxHashMap<Vec<u8>, u32> = FxHashMap::default();
    for i in 0..3 {
        let p = projection_table(n, i);
        if index.insert(p.clone(), i as u32).is_none() {
            tables.push(p);
            provenance.push(Provenance::Projection(i as u8));
        }
    }
    // on one element the three projections coincide
    for (pos, t) in tables.iter().enumerate() {
        if visit(pos, t) {
            return Ok(RawClosure { tables, provenance, hit: Some(pos) });
        }
    }

    let shape: Vec<(bool, bool)> = gens
        .iter()
        .map(|t| {
            let op = TernaryOp::from_raw(Arc::new(Universe::numeric(n).expect("valid size")), t.to_vec());
            (op.is_majority(), op.is_majority() && op.is_cyclically_symmetric())
        })
        .collect();
    let mut buf = vec![0u8; n * n * n];
    let mut prefix = vec![0usize; n * n * n];
    let mut done = 0usize;
    while done < tables.len() {
        let len = tables.len();
        let order: Vec<usize> = match options.scan {
            ScanOrder::Forward => (0..len).collect(),
            ScanOrder::Reverse => (0..len).rev().collect(),
        };
        for (g, gen) in gens.iter().enumerate() {
            let (majority, cyclic) = shape[g];
            for &i in &order {
                for &j in &order {
                    if majority && i == j {
                        continue;
                    }
                    let both_old = i < done && j < done;
                    // row offsets into the outer table shared by every k
                    for ((o, &a), &b) in prefix.iter_mut().zip(&tables[i]).zip(&tables[j]) {
                        *o = (a as usize * n + b as usize) * n;
                    }
                    for &k in &order {
                        if both_old && k < done {
                            continue;
                        }
                        // a majority outer op returns the repeated argument, and a
                        // cyclic one gives the same result on rotated arguments
                        if majority && (k == i || k == j) || cyclic && (j < i || k < i) {
                            continue;
                        }
                        for ((o, &p), &c) in buf.iter_mut().zip(&prefix).zip(&tables[k]) {
                            *o = gen[p + c as usize];
                        }
                        if index.contains_key(buf.as_slice()) {
                            continue;
                        }
                        let pos = tables.len();
                        if pos >= options.bound {
                            return Err(Error::ClosureBoundExceeded { bound: options.bound, partial: pos });
                        }
                        index.insert(buf.clone(), pos as u32);
                        tables.push(buf.clone());
                        provenance.push(Provenance::Compose {
                            generator: g as u32,
                            args: [i as u32, j as u32, k as u32],
                        });
                        if visit(pos, &buf) {
                            return Ok(RawClosure { tables, provenance, hit: Some(pos) });
                        }
                    }
                }
            }
        }
        done = len;
    }
    Ok(RawClosure { tables, provenance, hit: None })
}

/// The ternary part of the clone generated by `generators`.
pub fn ternary_closure(generators: &OpSet) -> Result<OpSet> {
    ternary_closure_with(generators, ClosureOptions::default())
}

pub fn ternary_closure_with(generators: &OpSet, options: ClosureOptions) -> Result<OpSet> {
    if generators.is_empty() {
        return Err(Error::InvalidTable("empty generator set".into()));
    }
    let n = generators.universe.size();
    let gens: Vec<&[u8]> = generators.members.iter().map(|m| m.table()).collect();
    let raw = raw_closure(n, &gens, options, &mut |_, _| false)?;
    let universe = generators.universe.clone();
    Ok(OpSet {
        members: raw.tables.into_iter().map(|t| TernaryOp::from_raw(universe.clone(), t)).collect(),
        universe,
        closed: true,
        generators: generators.members.clone(),
        provenance: raw.provenance,
    })
}

/// Convenience wrapper for a single generator.
pub fn closure_of(op: &TernaryOp) -> Result<OpSet> {
    ternary_closure(&OpSet::singleton(op))
}

pub fn majority_members(s: &OpSet) -> OpSet {
    OpSet {
        universe: s.universe.clone(),
        members: s.members.iter().filter(|m| m.is_majority()).cloned().collect(),
        closed: false,
        generators: Vec::new(),
        provenance: Vec::new(),
    }
}

/// Whether `target ∈ [h]`, stopping as soon as it appears.
pub fn generates(h: &TernaryOp, target: &TernaryOp) -> Result<bool> {
    generates_with(h, target, ClosureOptions::default())
}

pub fn generates_with(h: &TernaryOp, target: &TernaryOp, options: ClosureOptions) -> Result<bool> {
    Ok(generation_witness(h, target, options)?.is_some())
}

/// A term `t` with `t` over `h` equal to `target`, if one exists.
pub fn generation_witness(h: &TernaryOp, target: &TernaryOp, options: ClosureOptions) -> Result<Option<Term>> {
    if !h.same_universe(target) {
        return Err(Error::UniverseMismatch);
    }
    let raw = raw_closure(h.size(), &[h.table()], options, &mut |_, t| t == target.table())?;
    Ok(raw.hit.and_then(|i| witness_from_provenance(&raw.provenance, i)))
}

/// Outcome of the majority minimality test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub generator: TernaryOp,
    pub minimal: bool,
    pub closure_size: usize,
    pub majority_count: usize,
    /// A majority member that does not generate the input.
    pub counterexample: Option<TernaryOp>,
    /// For each class of majority members up to variable permutation: the
    /// representative and a term over it that yields the input.
    pub regeneration_witnesses: Option<Vec<RegenerationWitness>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegenerationWitness {
    pub member: TernaryOp,
    pub term: String,
}

#[derive(Clone, Copy, Debug)]
pub struct MinimalityOptions {
    pub closure: ClosureOptions,
    pub witnesses: bool,
}

impl Default for MinimalityOptions {
    fn default() -> Self {
        MinimalityOptions { closure: ClosureOptions::default(), witnesses: false }
    }
}

/// The smallest table among the six variable permutations.
pub fn var_perm_key(op: &TernaryOp) -> Vec<u8> {
    VarPerm::ALL.iter().map(|&p| op.permute_vars(p).into_table()).min().unwrap()
}

/// Decides whether `[f]` is a minimal clone for a majority operation `f`.
pub fn minimality_check(f: &TernaryOp) -> Result<MinimalityReport> {
    minimality_check_with(f, MinimalityOptions::default())
}

pub fn minimality_check_with(f: &TernaryOp, options: MinimalityOptions) -> Result<MinimalityReport> {
    if f.size() < 2 {
        return Err(Error::TrivialUniverse);
    }
    if !f.is_majority() {
        return Err(Error::NotMajority);
    }
    let closure = ternary_closure_with(&OpSet::singleton(f), options.closure)?;
    let proj = closure.projection_indices().expect("closure contains projections");
    let mut majority = Vec::new();
    for (i, m) in closure.members.iter().enumerate() {
        if proj.contains(&i) {
            continue;
        }
        if !m.is_majority() {
            return Err(Error::Consistency(format!(
                "non-projection member {i} of a majority clone is not a majority operation"
            )));
        }
        majority.push(m);
    }

    // [h∘σ] = [h], so one representative per variable-permutation class suffices
    let mut seen = std::collections::HashSet::new();
    let reps: Vec<&TernaryOp> = majority.iter().copied().filter(|m| seen.insert(var_perm_key(m))).collect();

    let check = |h: &&TernaryOp| -> Result<Option<Term>> { generation_witness(h, f, options.closure) };
    let outcomes: Vec<Result<Option<Term>>> = if options.witnesses {
        crate::parallel::map(&reps, check)
    } else {
        // stop at the first failure
        match crate::parallel::find_first(&reps, |h| !matches!(check(h), Ok(Some(_)))) {
            None => Vec::new(),
            Some(i) => {
                let outcome = check(&reps[i]);
                let counterexample = match outcome {
                    Ok(None) => reps[i].clone(),
                    Ok(Some(_)) => unreachable!("generation check is deterministic"),
                    Err(e) => return Err(e),
                };
                return Ok(MinimalityReport {
                    generator: f.clone(),
                    minimal: false,
                    closure_size: closure.len(),
                    majority_count: majority.len(),
                    counterexample: Some(counterexample),
                    regeneration_witnesses: None,
                });
            }
        }
    };

    let mut witnesses = Vec::new();
    let mut counterexample = None;
    for (h, outcome) in reps.iter().zip(outcomes) {
        match outcome? {
            Some(term) => witnesses.push(RegenerationWitness { member: (*h).clone(), term: term.to_string() }),
            None => {
                counterexample = Some((*h).clone());
                break;
            }
        }
    }
    Ok(MinimalityReport {
        generator: f.clone(),
        minimal: counterexample.is_none(),
        closure_size: closure.len(),
        majority_count: majority.len(),
        regeneration_witnesses: (options.witnesses && counterexample.is_none()).then_some(witnesses),
        counterexample,
    })
}

/// Verdict of [`screen_minimality`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Screen {
    Minimal { closure_size: usize, majority_count: usize },
    /// A majority member `h` with `f ∉ [h]`.
    Refuted(TernaryOp),
}

/// Decides minimality like [`minimality_check`], but tests `f ∈ [h]` through
/// binary invariant relations and does so while `[f]` is still being built,
/// so that most non-minimal inputs stop after a few members.
pub fn screen_minimality(f: &TernaryOp, options: ClosureOptions) -> Result<Screen> {
    if f.size() < 2 {
        return Err(Error::TrivialUniverse);
    }
    if !f.is_majority() {
        return Err(Error::NotMajority);
    }
    let universe = f.universe().clone();
    let mut seen = HashSet::new();
    seen.insert(var_perm_key(f));
    let mut failure: Option<Result<TernaryOp>> = None;
    let mut majority_count = 0;
    let mut visit = |pos: usize, t: &[u8]| -> bool {
        if pos < 3 {
            return false;
        }
        let h = TernaryOp::from_raw(universe.clone(), t.to_vec());
        if !h.is_majority() {
            failure = Some(Err(Error::Consistency(format!(
                "non-projection member {pos} of a majority clone is not a majority operation"
            ))));
            return true;
        }
        majority_count += 1;
        if !seen.insert(var_perm_key(&h)) {
            return false;
        }
        match crate::relations::clone_contains(&h, f) {
            Ok(true) => false,
            Ok(false) => {
                failure = Some(Ok(h));
                true
            }
            Err(e) => {
                failure = Some(Err(e));
                true
            }
        }
    };
    let raw = raw_closure(f.size(), &[f.table()], options, &mut visit)?;
    match failure {
        Some(Ok(h)) => Ok(Screen::Refuted(h)),
        Some(Err(e)) => Err(e),
        None => Ok(Screen::Minimal { closure_size: raw.tables.len(), majority_count }),
    }
}

/// Largest closed set for which a full composition table is built.
pub const MENGER_TABLE_LIMIT: usize = 96;

/// The quaternary composition of a closed set over member indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MengerTable {
    size: usize,
    projections: [usize; 3],
    entries: Vec<u16>,
}

impl MengerTable {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn projections(&self) -> [usize; 3] {
        self.projections
    }

    /// Index of `m_outer(m_a, m_b, m_c)`.
    #[inline]
    pub fn compose(&self, outer: usize, a: usize, b: usize, c: usize) -> usize {
        let k = self.size;
        self.entries[((outer * k + a) * k + b) * k + c] as usize
    }

    /// Lexicographically least table over relabelings of the non-projection
    /// indices, projections pinned to `0, 1, 2`. Only for sets of at most 12.
    pub fn canonical_key(&self) -> Option<Vec<u16>> {
        let k = self.size;
        if k > 12 {
            return None;
        }
        let others: Vec<usize> = (0..k).filter(|i| !self.projections.contains(i)).collect();
        let mut best: Option<Vec<u16>> = None;
        for perm in crate::universe::all_permutations(others.len()) {
            // new index -> old index
            let mut old_of = self.projections.to_vec();
            old_of.extend(perm.iter().map(|&p| others[p as usize]));
            let mut new_of = vec![0u16; k];
            for (new, &old) in old_of.iter().enumerate() {
                new_of[old] = new as u16;
            }
            let mut candidate = Vec::with_capacity(k.pow(4));
            let mut worse = false;
            let mut decided = best.is_none();
            'outer: for o in 0..k {
                for a in 0..k {
                    for b in 0..k {
                        for c in 0..k {
                            let v = new_of[self.compose(old_of[o], old_of[a], old_of[b], old_of[c])];
                            if !decided {
                                let pos = candidate.len();
                                let cur = best.as_ref().unwrap()[pos];
                                if v > cur {
                                    worse = true;
                                    break 'outer;
                                }
                                if v < cur {
                                    decided = true;
                                }
                            }
                            candidate.push(v);
                        }
                    }
                }
            }
            if !worse && decided {
                best = Some(candidate);
            }
        }
        best
    }
}

/// Builds the composition table of a closed set produced by [`ternary_closure`].
pub fn menger_table(s: &OpSet) -> Result<MengerTable> {
    if !s.closed {
        return Err(Error::InvalidTable("menger table needs a closed set".into()));
    }
    let k = s.len();
    if k > MENGER_TABLE_LIMIT {
        return Err(Error::InvalidTable(format!(
            "{k} members exceed the composition-table limit {MENGER_TABLE_LIMIT}"
        )));
    }
    let projections = s.projection_indices().expect("closed set contains projections");
    let index: HashMap<&[u8], usize> = s.members.iter().enumerate().map(|(i, m)| (m.table(), i)).collect();
    let n = s.universe.size();
    let k3 = k * k * k;
    let mut entries = vec![0u16; k * k3];

    if s.provenance.len() == k {
        // generator layers: gen(a, b, c) by direct composition
        let mut layers: Vec<Vec<u16>> = Vec::with_capacity(s.generators.len());
        let mut buf = vec![0u8; n * n * n];
        for g in &s.generators {
            let mut layer = vec![0u16; k3];
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        compose_into(n, g.table(), s.members[a].table(), s.members[b].table(), s.members[c].table(), &mut buf);
                        layer[(a * k + b) * k + c] = *index
                            .get(buf.as_slice())
                            .ok_or_else(|| Error::Consistency("closed set is not closed".into()))?
                            as u16;
                    }
                }
            }
            layers.push(layer);
        }
        // m = gen(m1, m2, m3)  ⇒  m(x) = gen(m1(x), m2(x), m3(x)); parents precede children
        for o in 0..k {
            match s.provenance[o] {
                Provenance::Projection(p) => {
                    for a in 0..k {
                        for b in 0..k {
                            for c in 0..k {
                                entries[o * k3 + (a * k + b) * k + c] = [a, b, c][p as usize] as u16;
                            }
                        }
                    }
                }
                Provenance::Compose { generator, args } => {
                    let layer = &layers[generator as usize];
                    let [p1, p2, p3] = args.map(|x| x as usize * k3);
                    for x in 0..k3 {
                        let (u, v, w) =
                            (entries[p1 + x] as usize, entries[p2 + x] as usize, entries[p3 + x] as usize);
                        entries[o * k3 + x] = layer[(u * k + v) * k + w];
                    }
                }
            }
        }
    } else {
        let mut buf = vec![0u8; n * n * n];
        for o in 0..k {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        let m = &s.members;
                        compose_into(n, m[o].table(), m[a].table(), m[b].table(), m[c].table(), &mut buf);
                        entries[o * k3 + (a * k + b) * k + c] = *index
                            .get(buf.as_slice())
                            .ok_or_else(|| Error::Consistency("set is not closed".into()))?
                            as u16;
                    }
                }
            }
        }
    }
    Ok(MengerTable { size: k, projections, entries })
}

/// Restriction of a closed set to a subuniverse, with the member-index map.
#[derive(Clone, Debug)]
pub struct RestrictionMap {
    /// The distinct restrictions, in first-occurrence order, as a closed set.
    pub image: OpSet,
    /// `map[i]` is the index in `image` of the restriction of member `i`.
    pub map: Vec<usize>,
}

impl RestrictionMap {
    pub fn is_injective(&self) -> bool {
        self.image.len() == self.map.len()
    }
}

/// Restricts every member of a closed set to `subset` and checks that the
/// resulting index map is a homomorphism of Menger algebras.
pub fn restriction_homomorphism(s: &OpSet, subset: &[u8]) -> Result<RestrictionMap> {
    if !s.closed {
        return Err(Error::InvalidTable("restriction needs a closed set".into()));
    }
    let mut image_members: Vec<TernaryOp> = Vec::new();
    let mut map = Vec::with_capacity(s.len());
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    for (i, m) in s.members.iter().enumerate() {
        let r = m
            .restrict(subset)
            .map_err(|e| Error::MemberViolatesSubset { index: i, source: Box::new(e) })?;
        let next = image_members.len();
        let slot = *index.entry(r.table().to_vec()).or_insert(next);
        if slot == next {
            image_members.push(r);
        }
        map.push(slot);
    }
    let universe = image_members[0].universe().clone();
    let generators = s
        .generators
        .iter()
        .map(|g| g.restrict(subset))
        .collect::<Result<Vec<_>>>()?;
    let image = OpSet { universe, members: image_members, closed: true, generators, provenance: Vec::new() };

    // homomorphism on the nullary part
    let src_proj = s.projection_indices().expect("closed set contains projections");
    let dst_proj = image
        .projection_indices()
        .ok_or_else(|| Error::Consistency("image lost a projection".into()))?;
    for i in 0..3 {
        if map[src_proj[i]] != dst_proj[i] {
            return Err(Error::Consistency(format!("projection {} does not map to a projection", i + 1)));
        }
    }
    // the image must itself be closed and the map must respect composition
    check_homomorphism(s, &image, &map)?;
    Ok(RestrictionMap { image, map })
}

fn check_homomorphism(src: &OpSet, dst: &OpSet, map: &[usize]) -> Result<()> {
    let k = src.len();
    let dst_index: HashMap<&[u8], usize> = dst.members.iter().enumerate().map(|(i, m)| (m.table(), i)).collect();
    let n = dst.universe.size();
    let mut buf = vec![0u8; n * n * n];
    if k <= MENGER_TABLE_LIMIT {
        let table = menger_table(src)?;
        // compose in the image and compare with the image of the composite
        for o in 0..k {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        let d = &dst.members;
                        compose_into(n, d[map[o]].table(), d[map[a]].table(), d[map[b]].table(), d[map[c]].table(), &mut buf);
                        let got = dst_index.get(buf.as_slice()).copied();
                        if got != Some(map[table.compose(o, a, b, c)]) {
                            return Err(Error::NotHomomorphic { outer: o, inner: [a, b, c] });
                        }
                    }
                }
            }
        }
        return Ok(());
    }
    Err(Error::InvalidTable(format!("{k} members exceed the composition-table limit {MENGER_TABLE_LIMIT}")))
}
