use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use clonesmith::canon::{canonical_form, CanonMode};
use clonesmith::closure::{
    majority_members, minimality_check_with, restriction_homomorphism, ternary_closure_with, ClosureOptions,
    MinimalityOptions, OpSet, CLOSURE_BOUND_ENV, DEFAULT_CLOSURE_BOUND,
};
use clonesmith::search::{run_search, DedupMode, SearchConfig, SymmetryMode};
use clonesmith::star::star_extend;
use clonesmith::term::{classify_over_d1, constructive_shift_triple, cyclic_shift_set, DEFAULT_SHIFT_BUDGET};
use clonesmith::verify::{run_criterion, verify_fixtures, AcceptanceOptions, FixtureSet, CRITERIA};

/// `println!` that exits quietly when the reader has gone away.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("failed printing to stdout: {e}");
        }
    }};
}
use clonesmith::{fixtures, generate_invariant_pairs, Error, TernaryOp, Term, Universe};

#[derive(Parser)]
#[command(name = "clonesmith", version, about = "Clone computations with ternary majority operations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct OpSource {
    /// Name of a bundled fixture
    #[arg(long, conflicts_with = "op", required_unless_present = "op")]
    fixture: Option<String>,
    /// Operation table as JSON
    #[arg(long)]
    op: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest closure computed before giving up
    #[arg(long, env = CLOSURE_BOUND_ENV, default_value_t = DEFAULT_CLOSURE_BOUND)]
    closure_bound: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Size and majority part of the clone generated by an operation
    Closure {
        #[command(flatten)]
        source: OpSource,
        #[command(flatten)]
        common: Common,
        /// List every member with a term producing it
        #[arg(long)]
        members: bool,
    },
    /// Decide whether a majority operation generates a minimal clone
    Minimal {
        #[command(flatten)]
        source: OpSource,
        #[command(flatten)]
        common: Common,
        /// Print a regenerating term for each majority member class
        #[arg(long)]
        witnesses: bool,
    },
    /// Search cyclically symmetric (or all) majority operations for minimal clones
    Search {
        /// Size of the base set
        #[arg(long)]
        n: usize,
        /// Only cyclically symmetric candidates
        #[arg(long)]
        cyclic: bool,
        /// Candidate index range LO..HI (half open)
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        skip_conservative: bool,
        #[arg(long)]
        canonical_first: bool,
        /// Stop after this many candidates, leaving the checkpoint behind
        #[arg(long)]
        stop_after: Option<u64>,
        /// Write the hits as JSON lines
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// One-point extension acting as d_i on every triple through the new point
    Star {
        #[command(flatten)]
        source: OpSource,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Restrict an operation to a preserved subset
    Restrict {
        #[command(flatten)]
        source: OpSource,
        /// Comma-separated element labels
        #[arg(long)]
        subset: String,
        /// Also check the restriction map on the generated clone
        #[arg(long)]
        clone: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Canonical form under relabeling and variable permutation
    Canon {
        #[command(flatten)]
        source: OpSource,
        /// Relabel the base set only
        #[arg(long)]
        relabel_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest invariant binary relation containing seed pairs
    Relpairs {
        #[command(flatten)]
        source: OpSource,
        /// Pairs as a:b separated by commas, e.g. 0:0,1:1b
        #[arg(long)]
        seeds: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a term over d(x1,x2,x3) = the given operation
    TermEval {
        #[command(flatten)]
        source: OpSource,
        #[arg(long)]
        term: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cyclic shifts of a term evaluating to d1, d2 and d3 over ({1,2,3}; d1)
    TermShift {
        #[arg(long)]
        term: String,
        /// List the whole set of cyclic shifts with their classes
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Re-derive the bundled tables and run the reproduction checks
    VerifyPaper {
        /// Read fixtures from exported files instead of the bundled tables
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Comma-separated criterion numbers (default: all)
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        /// Width of the five-element slice around f1
        #[arg(long, default_value_t = 1_000_000)]
        slice_width: u64,
        /// Closure bound inside the five-element slice
        #[arg(long, default_value_t = 500)]
        slice_bound: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Bundled fixtures
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    /// Write every fixture as <name>.json
    Export { dir: PathBuf },
    /// List fixture names with their table and size
    List,
}

/// Exit status with a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Consistency(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(source: &OpSource) -> Result<TernaryOp, Failure> {
    match (&source.fixture, &source.op) {
        (Some(name), _) => Ok(fixtures::get(name)?.clone()),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            TernaryOp::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        (None, None) => Err(usage("either --fixture or --op is required")),
    }
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn options(common: &Common) -> ClosureOptions {
    ClosureOptions::with_bound(common.closure_bound)
}

fn table_text(op: &TernaryOp) -> String {
    let u = op.universe();
    op.table().iter().map(|&v| u.label(v)).collect::<Vec<_>>().join(" ")
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Closure { source, common, members } => closure(&load(&source)?, &common, members),
        Command::Minimal { source, common, witnesses } => minimal(&load(&source)?, &common, witnesses),
        Command::Search {
            n,
            cyclic,
            range,
            jobs,
            checkpoint,
            skip_conservative,
            canonical_first,
            stop_after,
            catalog,
            common,
        } => {
            let mode = if cyclic { SymmetryMode::Cyclic } else { SymmetryMode::All };
            let mut config = SearchConfig::full(n, mode)?.with_workers(jobs);
            if let Some(r) = range {
                let (lo, hi) = parse_range(&r)?;
                config = config.with_range(lo, hi);
            }
            if let Some(p) = checkpoint {
                config = config.with_checkpoint(p);
            }
            config.closure_bound = common.closure_bound;
            config.skip_conservative = skip_conservative;
            config.dedup = if canonical_first { DedupMode::CanonicalFirst } else { DedupMode::PostHoc };
            config.stop_after = stop_after;
            search(&config, catalog.as_deref(), common.format)
        }
        Command::Star { source, i, common } => {
            let s = star_extend(&load(&source)?, i)?;
            emit_op(&s, common.format);
            Ok(0)
        }
        Command::Restrict { source, subset, clone, common } => restrict(&load(&source)?, &subset, clone, &common),
        Command::Canon { source, relabel_only, common } => {
            let mode = if relabel_only { CanonMode::RelabelOnly } else { CanonMode::RelabelAndVarperm };
            let c = canonical_form(&load(&source)?, mode);
            let perm: [u8; 3] = c.perm.into();
            match common.format {
                Format::Json => print_json(&json!({ "op": c.op, "sigma": c.sigma.as_slice(), "perm": perm })),
                Format::Text => {
                    out!("canonical: {}", table_text(&c.op));
                    out!("sigma: {:?}", c.sigma.as_slice());
                    out!("perm: {perm:?}");
                }
            }
            Ok(0)
        }
        Command::Relpairs { source, seeds, common } => {
            let op = load(&source)?;
            let u = op.universe().clone();
            let mut pairs = Vec::new();
            for item in seeds.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (a, b) = item.split_once(':').ok_or_else(|| usage(format!("seed {item:?} is not a:b")))?;
                pairs.push((u.parse_element(a.trim())?, u.parse_element(b.trim())?));
            }
            let rel = generate_invariant_pairs(&op, &pairs)?;
            let labeled: Vec<(String, String)> =
                rel.pairs().map(|(a, b)| (u.label(a).to_string(), u.label(b).to_string())).collect();
            match common.format {
                Format::Json => print_json(&json!({ "size": labeled.len(), "pairs": labeled })),
                Format::Text => {
                    out!("pairs: {}", labeled.len());
                    for (a, b) in labeled {
                        out!("({a},{b})");
                    }
                }
            }
            Ok(0)
        }
        Command::TermEval { source, term, common } => {
            let op = load(&source)?;
            let t: Term = term.parse()?;
            emit_op(&t.eval(&op), common.format);
            Ok(0)
        }
        Command::TermShift { term, all, common } => term_shift(&term, all, common.format),
        Command::VerifyPaper { fixtures, only, jobs, slice_width, slice_bound, format } => {
            let mut opts = AcceptanceOptions { workers: jobs.max(1), slice_width, slice_bound, ..Default::default() };
            if let Ok(dir) = std::env::var("CLONESMITH_WORK_DIR") {
                opts.work_dir = dir.into();
            }
            verify_paper(fixtures.as_deref(), only.as_deref(), &opts, format)
        }
        Command::Fixtures { action } => match action {
            FixtureAction::Export { dir } => {
                let paths = FixtureSet::bundled().export_dir(&dir)?;
                out!("wrote {} fixtures to {}", paths.len(), dir.display());
                Ok(0)
            }
            FixtureAction::List => {
                for f in fixtures::all() {
                    out!("{:<10} {:<8} n={}", f.name, f.source.name(), f.op.size());
                }
                Ok(0)
            }
        },
    }
}

fn emit_op(op: &TernaryOp, format: Format) {
    match format {
        Format::Json => out!("{}", op.to_json()),
        Format::Text => {
            out!("labels: {}", op.universe().labels().join(" "));
            out!("table: {}", table_text(op));
        }
    }
}

fn closure(op: &TernaryOp, common: &Common, members: bool) -> Outcome {
    let c = ternary_closure_with(&OpSet::singleton(op), options(common))?;
    let majority = majority_members(&c).len();
    let listing: Vec<Value> = if members {
        c.members()
            .iter()
            .enumerate()
            .map(|(i, m)| {
                json!({
                    "term": c.witness_term(i).map(|t| t.to_string()),
                    "majority": m.is_majority(),
                    "table": m.table(),
                })
            })
            .collect()
    } else {
        Vec::new()
    };
    match common.format {
        Format::Json => {
            let mut v = json!({ "members": c.len(), "majority": majority });
            if members {
                v["listing"] = Value::Array(listing);
            }
            print_json(&v);
        }
        Format::Text => {
            out!("members: {}, majority: {majority}", c.len());
            for (i, m) in c.members().iter().enumerate() {
                if !members {
                    break;
                }
                let term = c.witness_term(i).map(|t| t.to_string()).unwrap_or_default();
                out!("{i:>4} {term:<40} {}", table_text(m));
            }
        }
    }
    Ok(0)
}

fn minimal(op: &TernaryOp, common: &Common, witnesses: bool) -> Outcome {
    let report = minimality_check_with(op, MinimalityOptions { closure: options(common), witnesses })?;
    match common.format {
        Format::Json => print_json(&json!({
            "minimal": report.minimal,
            "closure_size": report.closure_size,
            "majority_count": report.majority_count,
            "counterexample": report.counterexample,
            "witnesses": report.regeneration_witnesses,
        })),
        Format::Text => {
            out!("minimal: {}", if report.minimal { "yes" } else { "no" });
            out!("members: {}, majority: {}", report.closure_size, report.majority_count);
            if let Some(c) = &report.counterexample {
                out!("counterexample: {}", c.to_json());
            }
            for w in report.regeneration_witnesses.iter().flatten() {
                out!("{} <- {}", w.term, table_text(&w.member));
            }
        }
    }
    Ok(if report.minimal { 0 } else { 1 })
}

fn parse_range(s: &str) -> Result<(u64, u64), Failure> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| usage(format!("range {s:?} is not LO..HI")))?;
    let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| usage(format!("range {s:?}: {e}")));
    Ok((parse(lo)?, parse(hi)?))
}

fn search(config: &SearchConfig, catalog: Option<&Path>, format: Format) -> Outcome {
    let out = run_search(config)?;
    if let Some(path) = catalog {
        let file = std::fs::File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        out.write_catalog(std::io::BufWriter::new(file))?;
    }
    match format {
        Format::Json => print_json(&serde_json::to_value(&out).expect("outcome serializes")),
        Format::Text => {
            for r in &out.records {
                out!(
                    "index {} majority {} closure {} {} {}",
                    r.index,
                    r.majority_count,
                    r.closure_size,
                    if r.conservative { "conservative" } else { "non-conservative" },
                    r.canonical.iter().map(|v| v.to_string()).collect::<String>()
                );
            }
            out!(
                "checked: {}, hits: {}, undecided: {}, next: {}, complete: {}",
                out.checked,
                out.records.len(),
                out.undecided.len(),
                out.next_index,
                out.complete
            );
        }
    }
    Ok(0)
}

fn restrict(op: &TernaryOp, subset: &str, clone: bool, common: &Common) -> Outcome {
    let u = op.universe();
    let elems: Vec<u8> = subset
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|l| u.parse_element(l))
        .collect::<Result<_, _>>()?;
    let r = op.restrict(&elems)?;
    let mut summary = None;
    if clone {
        let full = ternary_closure_with(&OpSet::singleton(op), options(common))?;
        let map = restriction_homomorphism(&full, &elems)?;
        summary = Some((full.len(), map.image.len(), map.is_injective()));
    }
    match common.format {
        Format::Json => {
            let mut v = json!({ "op": r });
            if let Some((from, to, injective)) = summary {
                v["clone"] = json!({ "members": from, "image": to, "injective": injective });
            }
            print_json(&v);
        }
        Format::Text => {
            emit_op(&r, Format::Text);
            if let Some((from, to, injective)) = summary {
                out!("clone: {from} members onto {to}, injective: {injective}");
            }
        }
    }
    Ok(0)
}

fn term_shift(term: &str, all: bool, format: Format) -> Outcome {
    let t: Term = term.parse()?;
    let three = Universe::one_based(3)?.shared();
    let triple = constructive_shift_triple(&t)?;
    let listing = if all {
        let mut v = Vec::new();
        for s in cyclic_shift_set(&t, DEFAULT_SHIFT_BUDGET)? {
            let class = classify_over_d1(&s, three.clone())?;
            v.push((s.to_string(), class.to_string()));
        }
        v
    } else {
        Vec::new()
    };
    match format {
        Format::Json => {
            let shifts: Vec<String> = triple.iter().map(|s| s.to_string()).collect();
            print_json(&json!({ "shifts": shifts, "all": listing }));
        }
        Format::Text => {
            for (i, s) in triple.iter().enumerate() {
                out!("d{}: {s}", i + 1);
            }
            for (s, class) in listing {
                out!("{class}: {s}");
            }
        }
    }
    Ok(0)
}

fn verify_paper(dir: Option<&Path>, only: Option<&str>, opts: &AcceptanceOptions, format: Format) -> Outcome {
    let set = match dir {
        Some(d) => FixtureSet::load_dir(d)?,
        None => FixtureSet::bundled(),
    };
    let ids: Vec<u8> = match only {
        None => CRITERIA.iter().map(|c| c.0).collect(),
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse::<u8>().map_err(|e| usage(format!("criterion {s:?}: {e}"))))
            .collect::<Result<_, _>>()?,
    };
    let report = verify_fixtures(&set);
    let mut outcomes = Vec::new();
    for id in ids {
        let o = run_criterion(id, &set, opts);
        if format == Format::Text {
            out!("{o}");
        }
        outcomes.push(o);
    }
    let passed = report.passed() && outcomes.iter().all(|o| o.passed);
    match format {
        Format::Json => print_json(&json!({
            "passed": passed,
            "fixture_failures": report.failures().collect::<Vec<_>>(),
            "fixture_checks": report.items.len(),
            "criteria": outcomes,
        })),
        Format::Text => {
            let failed: Vec<_> = report.failures().collect();
            out!("fixture checks: {}, failed: {}", report.items.len(), failed.len());
            for item in failed {
                out!("{item}");
            }
            let bad: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
            if bad.is_empty() && report.passed() {
                out!("all checks passed");
            } else if !bad.is_empty() {
                out!("failing criteria: {}", bad.join(", "));
            }
        }
    }
    Ok(if passed { 0 } else { 1 })
}
