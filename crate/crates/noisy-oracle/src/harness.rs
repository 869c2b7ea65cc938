//! Trial fan-out. Each trial is identified by its index and derives its own
//! random stream, and results come back in index order, so output does not
//! depend on the number of workers.

use rayon::prelude::*;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NOISY_ORACLE_THREADS";

pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f(0) … f(trials − 1)` on the worker pool and returns the results
/// in index order, or the error of the lowest failing index.
pub fn map_trials<T, E, F>(trials: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    let workers = worker_count();
    if workers == 1 {
        return (0..trials).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let results: Vec<Result<T, E>> = pool.install(|| (0..trials).into_par_iter().map(f).collect());
    results.into_iter().collect()
}

/// Splits `0..trials` into fixed-size chunks, runs `f` on each chunk in
/// parallel and returns the per-chunk results in order.
pub fn map_chunks<T, E, F>(trials: u64, chunk: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(std::ops::Range<u64>) -> Result<T, E> + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = trials.div_ceil(chunk);
    map_trials(count, |c| f(c * chunk..((c + 1) * chunk).min(trials)))
}
