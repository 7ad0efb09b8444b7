//! Data-parallel execution of independent work items.
//!
//! Every parallel call site in this crate derives per-item RNG streams from
//! the item index, so results are identical for any worker count. With the
//! `parallel` feature disabled the executor always runs sequentially.

#[cfg(feature = "parallel")]
use std::sync::Arc;

#[derive(Clone, Default)]
pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor").field("workers", &self.workers()).finish()
    }
}

impl Executor {
    pub fn sequential() -> Self {
        Self::default()
    }

    /// Executor backed by a dedicated pool of `workers` threads. `workers <= 1`
    /// (or a build without the `parallel` feature) yields the sequential executor.
    pub fn with_workers(workers: usize) -> Self {
        #[cfg(feature = "parallel")]
        {
            if workers > 1 {
                if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                    return Self { pool: Some(Arc::new(pool)) };
                }
            }
        }
        let _ = workers;
        Self::sequential()
    }

    pub fn workers(&self) -> usize {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.current_num_threads();
        }
        1
    }

    /// Maps `f` over `0..n`, preserving order.
    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| (0..n).into_par_iter().map(&f).collect());
        }
        (0..n).map(f).collect()
    }
}
