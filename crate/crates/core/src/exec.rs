//! Execution strategy for the data-parallel loops.
//!
//! Every parallel loop in the crate splits its index range into chunks of a
//! fixed size ([`CHUNK`]) that does not depend on the thread count. Each chunk
//! is reduced with pairwise summation and the chunk results are combined with
//! pairwise summation in index order, so sequential and parallel runs produce
//! bit-identical floating-point results.

use std::ops::Range;

/// Chunk length used by every partitioned loop.
pub const CHUNK: usize = 1 << 14;

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise falls back
    /// to sequential execution.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Whether this strategy actually runs on the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `0..n` in chunks of `chunk` indices, returning one result
    /// per chunk in index order.
    pub fn map_chunks<T, F>(self, n: usize, chunk: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let count = n.div_ceil(chunk);
        let range_of = |c: usize| c * chunk..((c + 1) * chunk).min(n);
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(|c| f(range_of(c))).collect();
        }
        (0..count).map(|c| f(range_of(c))).collect()
    }

    /// Maps `f` over the items of a slice, preserving order.
    pub fn map_items<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Deterministic sum of `f(i)` for `i` in `0..n`.
    pub fn sum_indexed<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let partials = self.map_chunks(n, CHUNK, |r| {
            let vals: Vec<f64> = r.map(&f).collect();
            pairwise_sum(&vals)
        });
        pairwise_sum(&partials)
    }
}

/// Pairwise (tree) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Chunked pairwise sum of a slice; identical to [`Exec::sum_indexed`] over the
/// same values.
pub fn chunked_sum(xs: &[f64]) -> f64 {
    let partials: Vec<f64> = xs.chunks(CHUNK).map(pairwise_sum).collect();
    pairwise_sum(&partials)
}
