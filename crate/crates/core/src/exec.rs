//! Ordered data-parallel maps with a sequential fallback.
//!
//! With the `parallel` feature (default) the maps run on rayon; without it
//! they run sequentially. Results are collected in input order and any
//! reductions downstream fold that ordered Vec sequentially, so the outcome
//! is bit-identical in both modes and at any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`], kept unconditionally for benchmarks
/// comparing the two paths.
pub fn map_indexed_seq<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

/// Runs `f` inside a rayon pool of `jobs` threads; `None` uses the global
/// pool. Without the `parallel` feature `jobs` is ignored and `f` runs on the
/// calling thread.
pub fn with_jobs<R, F>(jobs: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match jobs {
            Some(k) if k >= 1 => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .expect("rayon pool")
                .install(f),
            _ => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        f()
    }
}
