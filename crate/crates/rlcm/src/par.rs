//! Deterministic data-parallelism shim.
//!
//! Heavy computations in this crate (signed subset sums, kernel block
//! assembly, batch verdicts) decompose into independent work items indexed by
//! `0..n`. This module maps those items to results — on a rayon pool when the
//! `parallel` feature is enabled, on the current thread otherwise — and hands
//! back a `Vec` in index order. Every *reduction* over the results happens
//! sequentially in index order at the call site, so the two execution modes
//! produce bit-identical floating point output; only wall-clock time differs.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluate `f` on each index in `0..n` and collect results in index order.
///
/// Runs on the rayon pool when the `parallel` feature is enabled; otherwise
/// falls back to [`map_indexed_seq`]. The output is identical either way.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(n, f)
    }
}

/// Sequential reference implementation of [`map_indexed`], always available.
///
/// Benchmarks call this directly to compare the two execution modes in a
/// single build; tests use it to assert bit-identical output.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        // A reduction that is sensitive to evaluation order if results were
        // combined nondeterministically; collecting in index order and
        // folding sequentially must give the same bits both ways.
        let f = |i: usize| ((i as f64) * 0.1).sin() / ((i + 1) as f64);
        let a: f64 = map_indexed(1000, f).into_iter().sum();
        let b: f64 = map_indexed_seq(1000, f).into_iter().sum();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
