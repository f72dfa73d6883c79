//! Data-parallel helpers.
//!
//! With the `parallel` feature the maps below fan out over the current rayon
//! pool; otherwise, or when the pool has a single thread, they run as plain
//! sequential iterators. Output order always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of threads the helpers will use from the calling context.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current_threads() > 1 && items.len() > 1 {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Like [`map`] but short-circuits on the first error in input order.
pub fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current_threads() > 1 && items.len() > 1 {
        // Collect everything first so the reported error is the earliest
        // one by position, matching the sequential path.
        let results: Vec<Result<R, E>> = items.par_iter().map(f).collect();
        return results.into_iter().collect();
    }
    items.iter().map(f).collect()
}

/// Runs `op` with at most `workers` threads. `workers == 1` forces the
/// sequential code path.
pub fn with_workers<R, F>(workers: usize, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
        {
            Ok(pool) => pool.install(op),
            Err(e) => {
                log::warn!("could not build a {workers}-thread pool ({e}); using the global pool");
                op()
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        op()
    }
}
