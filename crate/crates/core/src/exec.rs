//! Sequential / data-parallel execution of independent work items.
//!
//! Every sweep in the crate (hole centers, Monte Carlo samples, drive
//! grids) goes through [`Execution::map`], which always returns results in
//! input order. Aggregations are then folded sequentially over that vector,
//! so results are bit-identical whichever variant ran them.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool. Only available with the `parallel` feature.
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Execution::Parallel;
        #[cfg(not(feature = "parallel"))]
        return Execution::Sequential;
    }
}

impl Execution {
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
        }
    }

    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Calls `f(row, chunk)` on consecutive `row_len` chunks of `data`.
    pub fn for_each_row<T, F>(self, data: &mut [T], row_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            Execution::Sequential => data.chunks_mut(row_len).enumerate().for_each(|(i, c)| f(i, c)),
            #[cfg(feature = "parallel")]
            Execution::Parallel => data.par_chunks_mut(row_len).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }

    pub fn is_parallel(self) -> bool {
        self != Execution::Sequential
    }
}
