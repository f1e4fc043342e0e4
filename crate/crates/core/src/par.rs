//! Replicate-level data parallelism.
//!
//! With the `parallel` feature, [`Execution::Parallel`] maps on the global
//! rayon pool and [`Execution::Threads`] on a dedicated one; without it every
//! execution is sequential. Results are always returned in index order, so
//! outputs never depend on the thread count.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
    /// Parallel on a pool of this many workers.
    Threads(usize),
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Execution::Sequential
    }

    /// `f(0..n)` collected in index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        match self {
            Execution::Sequential => {}
            Execution::Parallel => {
                use rayon::prelude::*;
                return (0..n).into_par_iter().map(f).collect();
            }
            Execution::Threads(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads.max(1))
                    .build()
                    .expect("thread pool");
                return pool.install(|| Execution::Parallel.map_indexed(n, f));
            }
        }
        (0..n).map(f).collect()
    }
}
