//! Deterministic parallel maps.
//!
//! Work is split by sample index and results are collected in index order;
//! all reductions happen afterwards on a single thread. Output therefore
//! does not depend on the worker count.

use rayon::prelude::*;

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "ZSL_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parallelism {
    threads: usize,
}

impl Parallelism {
    /// Reads `ZSL_THREADS`, falling back to the machine's parallelism.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            });
        Self { threads }
    }

    pub fn fixed(threads: usize) -> Self {
        Self {
            threads: threads.max(1),
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map_indexed<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        if self.threads == 1 {
            return (0..n).map(f).collect();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
        {
            Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
            Err(_) => (0..n).map(f).collect(),
        }
    }
}

impl Default for Parallelism {
    fn default() -> Self {
        Self::from_env()
    }
}
