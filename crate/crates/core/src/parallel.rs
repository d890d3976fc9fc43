//! Data-parallel helpers. With the `parallel` feature these run on rayon;
//! without it they are plain sequential loops with identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `items.iter().map(f).collect()`, order preserved.
#[cfg(feature = "parallel")]
pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Index of the first item satisfying `pred`.
#[cfg(feature = "parallel")]
pub fn find_first<T: Sync>(items: &[T], pred: impl Fn(&T) -> bool + Sync + Send) -> Option<usize> {
    items.par_iter().position_first(pred)
}

#[cfg(not(feature = "parallel"))]
pub fn find_first<T: Sync>(items: &[T], pred: impl Fn(&T) -> bool + Sync + Send) -> Option<usize> {
    items.iter().position(pred)
}

/// Runs `f` on each index range, in parallel when enabled, results in range order.
#[cfg(feature = "parallel")]
pub fn map_ranges<R: Send>(ranges: &[(u64, u64)], f: impl Fn(u64, u64) -> R + Sync + Send) -> Vec<R> {
    ranges.par_iter().map(|&(lo, hi)| f(lo, hi)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ranges<R: Send>(ranges: &[(u64, u64)], f: impl Fn(u64, u64) -> R + Sync + Send) -> Vec<R> {
    ranges.iter().map(|&(lo, hi)| f(lo, hi)).collect()
}

/// Runs `work` inside a pool of `threads` workers (a no-op wrapper when sequential).
#[cfg(feature = "parallel")]
pub fn with_workers<R: Send>(threads: usize, work: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R: Send>(_threads: usize, work: impl FnOnce() -> R + Send) -> R {
    work()
}

pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_preserve_order() {
        let v: Vec<u32> = (0..100).collect();
        assert_eq!(map(&v, |x| x * 2), (0..100).map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(find_first(&v, |&x| x > 40 && x % 7 == 0), Some(42));
        assert_eq!(find_first(&v, |&x| x > 1000), None);
        let r = with_workers(3, || map_ranges(&[(0, 2), (2, 5)], |a, b| b - a));
        assert_eq!(r, vec![2, 3]);
    }
}
