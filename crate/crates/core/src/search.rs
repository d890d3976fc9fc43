//! Exhaustive, resumable search over majority operations.
//!
//! A majority operation is fixed on triples with a repeated entry, so a
//! candidate is determined by its values on pairwise distinct triples. In
//! cyclic mode one value is chosen per rotation orbit, in all mode one per
//! triple. The candidate index is the base-`n` number whose digits are these
//! values, most significant digit first.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::canon::{CanonMode, Canonicalizer};
use crate::closure::{screen_minimality, ClosureOptions, Screen, DEFAULT_CLOSURE_BOUND};
use crate::error::{Error, Result};
use crate::op::{index, repeated_element, triples, TernaryOp};
use crate::universe::Universe;

/// Candidates between two checkpoint writes, at most.
pub const CHECKPOINT_EVERY: u64 = 10_000;
/// Seconds between two checkpoint writes, at most.
pub const CHECKPOINT_INTERVAL: Duration = Duration::from_secs(30);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryMode {
    Cyclic,
    All,
}

impl SymmetryMode {
    pub fn name(self) -> &'static str {
        match self {
            SymmetryMode::Cyclic => "cyclic",
            SymmetryMode::All => "all",
        }
    }
}

/// Rotation orbits of pairwise distinct triples.
#[derive(Clone, Debug)]
pub struct OrbitIndexing {
    n: usize,
    orbits: Vec<[[u8; 3]; 3]>,
}

impl OrbitIndexing {
    pub fn new(n: usize) -> Self {
        let orbits = triples(n)
            .filter(|&t| repeated_element(t).is_none())
            .filter(|&[a, b, c]| a < b && a < c)
            .map(|[a, b, c]| [[a, b, c], [b, c, a], [c, a, b]])
            .collect();
        OrbitIndexing { n, orbits }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn orbits(&self) -> &[[[u8; 3]; 3]] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

/// Number of candidates for `n` and `mode`.
pub fn candidate_count(n: usize, mode: SymmetryMode) -> Result<BigUint> {
    let space = CandidateSpace::new(n, mode)?;
    Ok(BigUint::from(n).pow(space.cells.len() as u32))
}

/// The table positions sharing each digit, in digit order.
#[derive(Clone, Debug)]
pub struct CandidateSpace {
    n: usize,
    mode: SymmetryMode,
    universe: Arc<Universe>,
    cells: Vec<Vec<usize>>,
    base: Vec<u8>,
    /// `n^cells` when it fits in 64 bits
    count: Option<u64>,
}

impl CandidateSpace {
    pub fn new(n: usize, mode: SymmetryMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("universe size {n} is below 2")));
        }
        let universe = Universe::numeric(n)?.shared();
        let cells: Vec<Vec<usize>> = match mode {
            SymmetryMode::Cyclic => OrbitIndexing::new(n)
                .orbits
                .iter()
                .map(|orbit| orbit.iter().map(|&[a, b, c]| index(n, a, b, c)).collect())
                .collect(),
            SymmetryMode::All => triples(n)
                .filter(|&t| repeated_element(t).is_none())
                .map(|[a, b, c]| vec![index(n, a, b, c)])
                .collect(),
        };
        let mut base = vec![0u8; n * n * n];
        for t in triples(n) {
            if let Some(x) = repeated_element(t) {
                base[index(n, t[0], t[1], t[2])] = x;
            }
        }
        let count = (n as u64).checked_pow(cells.len() as u32);
        Ok(CandidateSpace { n, mode, universe, cells, base, count })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> SymmetryMode {
        self.mode
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn digits(&self) -> usize {
        self.cells.len()
    }

    pub fn count(&self) -> BigUint {
        BigUint::from(self.n).pow(self.cells.len() as u32)
    }

    /// The count when it fits in a `u64`.
    pub fn count_u64(&self) -> Option<u64> {
        self.count
    }

    fn out_of_range(&self, index: impl ToString) -> Error {
        Error::IndexOutOfRange { index: index.to_string(), count: self.count().to_string() }
    }

    /// Writes candidate `idx` into `table`, which must have length `n³`.
    pub fn decode_into(&self, mut idx: u64, table: &mut [u8]) -> Result<()> {
        if self.count.is_some_and(|c| idx >= c) {
            return Err(self.out_of_range(idx));
        }
        table.copy_from_slice(&self.base);
        let n = self.n as u64;
        for cell in self.cells.iter().rev() {
            let v = (idx % n) as u8;
            idx /= n;
            for &p in cell {
                table[p] = v;
            }
        }
        Ok(())
    }

    pub fn decode(&self, idx: u64) -> Result<TernaryOp> {
        let mut table = vec![0u8; self.n * self.n * self.n];
        self.decode_into(idx, &mut table)?;
        Ok(TernaryOp::from_raw(self.universe.clone(), table))
    }

    pub fn decode_big(&self, idx: &BigUint) -> Result<TernaryOp> {
        if *idx >= self.count() {
            return Err(self.out_of_range(idx));
        }
        let digits = idx.to_radix_le(self.n as u32);
        let mut table = self.base.clone();
        for (k, cell) in self.cells.iter().rev().enumerate() {
            let v = digits.get(k).copied().unwrap_or(0);
            for &p in cell {
                table[p] = v;
            }
        }
        Ok(TernaryOp::from_raw(self.universe.clone(), table))
    }

    /// The index of `op`, or `None` when `op` is not a candidate of this space.
    pub fn encode(&self, op: &TernaryOp) -> Option<BigUint> {
        if op.size() != self.n || !op.is_majority() {
            return None;
        }
        let t = op.table();
        let mut digits = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let v = t[cell[0]];
            if cell.iter().any(|&p| t[p] != v) {
                return None;
            }
            digits.push(v);
        }
        digits.reverse();
        Some(BigUint::from_radix_le(&digits, self.n as u32).unwrap_or_default())
    }

    pub fn encode_u64(&self, op: &TernaryOp) -> Option<u64> {
        self.encode(op).and_then(|b| u64::try_from(b).ok())
    }
}

/// Decodes candidate `index` of the `n`, `mode` space.
pub fn candidate_from_index(n: usize, mode: SymmetryMode, index: &BigUint) -> Result<TernaryOp> {
    CandidateSpace::new(n, mode)?.decode_big(index)
}

/// Inverse of [`candidate_from_index`]; the operation is read over `0..n`.
pub fn index_of_candidate(mode: SymmetryMode, op: &TernaryOp) -> Result<BigUint> {
    let space = CandidateSpace::new(op.size(), mode)?;
    space.encode(op).ok_or_else(|| {
        Error::InvalidConfig(format!("operation is not a {} majority candidate", mode.name()))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupMode {
    /// Check every candidate and merge hits by canonical form.
    #[default]
    PostHoc,
    /// Only check candidates that are their own canonical form.
    CanonicalFirst,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n: usize,
    pub mode: SymmetryMode,
    pub lo: u64,
    pub hi: u64,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub closure_bound: usize,
    pub dedup: DedupMode,
    pub skip_conservative: bool,
    /// Stop after this many candidates of the current run, leaving a checkpoint.
    pub stop_after: Option<u64>,
}

impl SearchConfig {
    /// The whole space with default settings.
    pub fn full(n: usize, mode: SymmetryMode) -> Result<Self> {
        let space = CandidateSpace::new(n, mode)?;
        let hi = space.count_u64().ok_or_else(|| {
            Error::InvalidConfig(format!("{} candidates do not fit in a 64-bit range", space.count()))
        })?;
        Ok(SearchConfig {
            n,
            mode,
            lo: 0,
            hi,
            workers: 1,
            checkpoint: None,
            closure_bound: DEFAULT_CLOSURE_BOUND,
            dedup: DedupMode::PostHoc,
            skip_conservative: false,
            stop_after: None,
        })
    }

    pub fn with_range(mut self, lo: u64, hi: u64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    fn validate(&self, space: &CandidateSpace) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::InvalidConfig(format!("empty range {}..{}", self.lo, self.hi)));
        }
        if let Some(c) = space.count_u64() {
            if self.hi > c {
                return Err(Error::InvalidConfig(format!("range end {} exceeds the candidate count {c}", self.hi)));
            }
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("worker count must be positive".into()));
        }
        Ok(())
    }
}

/// A minimal-clone generator found by the search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    /// Smallest index in the searched range whose candidate has this canonical form.
    pub index: String,
    pub canonical: Vec<u8>,
    pub majority_count: usize,
    pub closure_size: usize,
    pub conservative: bool,
    pub cyclic: bool,
}

impl SearchRecord {
    pub fn index_u64(&self) -> Option<u64> {
        self.index.parse().ok()
    }

    pub fn canonical_op(&self, n: usize) -> Result<TernaryOp> {
        TernaryOp::new(Universe::numeric(n)?.shared(), self.canonical.clone())
    }
}

/// Everything a finished (or stopped) run produced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Hits ordered by canonical table.
    pub records: Vec<SearchRecord>,
    /// Indices whose closure exceeded the bound, so minimality is undecided.
    pub undecided: Vec<String>,
    /// First index not yet processed.
    pub next_index: String,
    pub complete: bool,
    /// Candidates that reached the minimality check during this invocation.
    pub checked: u64,
}

impl SearchOutcome {
    pub fn write_catalog(&self, mut out: impl std::io::Write) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn read_catalog(text: &str) -> Result<Vec<SearchRecord>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    n: usize,
    mode: SymmetryMode,
    lo: String,
    hi: String,
    next_index: String,
    hits: Vec<SearchRecord>,
    #[serde(default)]
    undecided: Vec<String>,
}

fn corrupt(offset: usize, msg: impl Into<String>) -> Error {
    Error::CorruptCheckpoint { offset, msg: msg.into() }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let before: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    before + column.saturating_sub(1)
}

fn load_checkpoint(path: &Path, config: &SearchConfig) -> Result<Option<Checkpoint>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let cp: Checkpoint =
        serde_json::from_str(&text).map_err(|e| corrupt(byte_offset(&text, e.line(), e.column()), e.to_string()))?;
    let field = |name: &str| text.find(&format!("\"{name}\"")).unwrap_or(0);
    if cp.n != config.n || cp.mode != config.mode {
        return Err(corrupt(field("n"), format!("checkpoint is for n={} {}", cp.n, cp.mode.name())));
    }
    if cp.lo != config.lo.to_string() || cp.hi != config.hi.to_string() {
        return Err(corrupt(field("lo"), format!("checkpoint covers {}..{}", cp.lo, cp.hi)));
    }
    let next: u64 = cp.next_index.parse().map_err(|_| corrupt(field("next_index"), "next_index is not a decimal"))?;
    if next < config.lo || next > config.hi {
        return Err(corrupt(field("next_index"), format!("next_index {next} outside the range")));
    }
    let size = config.n * config.n * config.n;
    for (i, h) in cp.hits.iter().enumerate() {
        let ok = h.index.parse::<u64>().is_ok_and(|x| x >= config.lo && x < next)
            && h.canonical.len() == size
            && h.canonical.iter().all(|&v| (v as usize) < config.n)
            && h.majority_count >= 1;
        if !ok {
            return Err(corrupt(field("hits"), format!("hit {i} is malformed")));
        }
    }
    Ok(Some(cp))
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Per-candidate outcome.
enum Verdict {
    Skipped,
    NotMinimal,
    Undecided,
    Hit(SearchRecord),
}

struct Worker<'a> {
    space: &'a CandidateSpace,
    canon: &'a Canonicalizer,
    config: &'a SearchConfig,
}

impl Worker<'_> {
    fn examine(&self, idx: u64) -> Result<Verdict> {
        let op = self.space.decode(idx)?;
        if self.config.skip_conservative && op.is_conservative() {
            return Ok(Verdict::Skipped);
        }
        if self.config.dedup == DedupMode::CanonicalFirst && !self.canon.is_canonical(&op, CanonMode::RelabelAndVarperm)
        {
            return Ok(Verdict::Skipped);
        }
        let (closure_size, majority_count) =
            match screen_minimality(&op, ClosureOptions::with_bound(self.config.closure_bound)) {
                Ok(Screen::Minimal { closure_size, majority_count }) => (closure_size, majority_count),
                Ok(Screen::Refuted(_)) => return Ok(Verdict::NotMinimal),
                Err(Error::ClosureBoundExceeded { .. }) => return Ok(Verdict::Undecided),
                Err(e) => return Err(e),
            };
        let canonical = self.canon.canonical_form(&op, CanonMode::RelabelAndVarperm).op;
        Ok(Verdict::Hit(SearchRecord {
            index: idx.to_string(),
            canonical: canonical.into_table(),
            majority_count,
            closure_size,
            conservative: op.is_conservative(),
            cyclic: op.is_cyclically_symmetric(),
        }))
    }

    fn run(&self, lo: u64, hi: u64) -> Result<(Vec<SearchRecord>, Vec<u64>, u64)> {
        let mut hits = Vec::new();
        let mut undecided = Vec::new();
        let mut checked = 0;
        for idx in lo..hi {
            match self.examine(idx)? {
                Verdict::Skipped => {}
                Verdict::NotMinimal => checked += 1,
                Verdict::Undecided => {
                    checked += 1;
                    undecided.push(idx)
                }
                Verdict::Hit(r) => {
                    checked += 1;
                    hits.push(r)
                }
            }
        }
        Ok((hits, undecided, checked))
    }
}

/// Keeps one record per canonical table, the one with the smallest index.
#[derive(Default)]
struct Collector {
    hits: BTreeMap<Vec<u8>, SearchRecord>,
    undecided: Vec<u64>,
}

impl Collector {
    fn add(&mut self, r: SearchRecord) {
        let idx = r.index_u64().unwrap_or(u64::MAX);
        match self.hits.get(&r.canonical) {
            Some(old) if old.index_u64().unwrap_or(u64::MAX) <= idx => {}
            _ => {
                self.hits.insert(r.canonical.clone(), r);
            }
        }
    }

    fn records(&self) -> Vec<SearchRecord> {
        self.hits.values().cloned().collect()
    }

    fn undecided(&self) -> Vec<String> {
        let mut u = self.undecided.clone();
        u.sort_unstable();
        u.iter().map(u64::to_string).collect()
    }
}

/// Splits `lo..hi` into `parts` contiguous ranges of near-equal length.
pub fn split_range(lo: u64, hi: u64, parts: usize) -> Vec<(u64, u64)> {
    let parts = parts.max(1) as u64;
    let len = hi - lo;
    (0..parts)
        .map(|k| (lo + len * k / parts, lo + len * (k + 1) / parts))
        .filter(|(a, b)| a < b)
        .collect()
}

/// Runs the search described by `config`, resuming from its checkpoint if present.
pub fn run_search(config: &SearchConfig) -> Result<SearchOutcome> {
    let space = CandidateSpace::new(config.n, config.mode)?;
    config.validate(&space)?;
    let canon = Canonicalizer::new(config.n);
    let worker = Worker { space: &space, canon: &canon, config };

    let mut collector = Collector::default();
    let mut next = config.lo;
    if let Some(path) = &config.checkpoint {
        if let Some(cp) = load_checkpoint(path, config)? {
            next = cp.next_index.parse().expect("validated on load");
            for h in cp.hits {
                collector.add(h);
            }
            collector.undecided = cp.undecided.iter().filter_map(|s| s.parse().ok()).collect();
        }
    }

    let save = |collector: &Collector, next: u64| -> Result<()> {
        let Some(path) = &config.checkpoint else { return Ok(()) };
        let cp = Checkpoint {
            n: config.n,
            mode: config.mode,
            lo: config.lo.to_string(),
            hi: config.hi.to_string(),
            next_index: next.to_string(),
            hits: collector.records(),
            undecided: collector.undecided(),
        };
        write_atomic(path, &serde_json::to_vec(&cp)?)
    };

    let batch = (config.workers as u64 * 16).max(64);
    let stop = config.stop_after.map(|s| next.saturating_add(s).min(config.hi)).unwrap_or(config.hi);
    let mut checked = 0;
    let mut since_save = 0u64;
    let mut last_save = Instant::now();
    crate::parallel::with_workers(config.workers, || -> Result<()> {
        while next < stop {
            let end = (next + batch).min(stop);
            let ranges = split_range(next, end, config.workers);
            let parts = crate::parallel::map_ranges(&ranges, |a, b| worker.run(a, b));
            for part in parts {
                let (hits, undecided, c) = part?;
                hits.into_iter().for_each(|h| collector.add(h));
                collector.undecided.extend(undecided);
                checked += c;
            }
            since_save += end - next;
            next = end;
            if since_save >= CHECKPOINT_EVERY || last_save.elapsed() >= CHECKPOINT_INTERVAL {
                save(&collector, next)?;
                since_save = 0;
                last_save = Instant::now();
            }
        }
        Ok(())
    })?;
    save(&collector, next)?;

    Ok(SearchOutcome {
        records: collector.records(),
        undecided: collector.undecided(),
        next_index: next.to_string(),
        complete: next == config.hi,
        checked,
    })
}
