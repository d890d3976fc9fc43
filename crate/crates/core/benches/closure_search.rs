//! Parallel against sequential execution.
//!
//! `cargo bench` measures the rayon build with one worker and with all
//! cores; `cargo bench --no-default-features` measures the sequential
//! fallback under the same names.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use clonesmith::closure::minimality_check;
use clonesmith::parallel;
use clonesmith::search::{run_search, SearchConfig, SymmetryMode};
use clonesmith::{closure_of, fixtures, star_extend};

fn backend() -> &'static str {
    if parallel::is_parallel() {
        "rayon"
    } else {
        "sequential"
    }
}

fn worker_counts() -> Vec<usize> {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if parallel::is_parallel() && cores > 1 {
        vec![1, cores]
    } else {
        vec![1]
    }
}

fn closures(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("closure/{}", backend()));
    for name in ["m3", "M3", "f1"] {
        let op = fixtures::get(name).unwrap();
        g.bench_function(name, |b| b.iter(|| closure_of(op).unwrap().len()));
    }
    let star = star_extend(fixtures::get("f1").unwrap(), 1).unwrap();
    g.bench_function("f1_star", |b| b.iter(|| closure_of(&star).unwrap().len()));
    g.finish();
}

fn minimality(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("minimality/{}", backend()));
    g.sample_size(10);
    let f1 = fixtures::get("f1").unwrap();
    for workers in worker_counts() {
        g.bench_with_input(BenchmarkId::new("f1", workers), &workers, |b, &w| {
            b.iter(|| parallel::with_workers(w, || minimality_check(f1).unwrap().minimal))
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group(format!("search/{}", backend()));
    g.sample_size(10);
    let base = SearchConfig::full(4, SymmetryMode::Cyclic).unwrap().with_range(0, 4_096);
    for workers in worker_counts() {
        let config = base.clone().with_workers(workers);
        g.bench_with_input(BenchmarkId::new("n4_cyclic_4096", workers), &config, |b, cfg| {
            b.iter(|| run_search(cfg).unwrap().records.len())
        });
    }
    let all3 = SearchConfig::full(3, SymmetryMode::All).unwrap();
    g.bench_function("n3_all", |b| b.iter(|| run_search(&all3).unwrap().records.len()));
    g.finish();
}

criterion_group!(benches, closures, minimality, search);
criterion_main!(benches);
