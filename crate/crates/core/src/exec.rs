//! Chunked evaluation with a fixed reduction order.
//!
//! Work is split into fixed-size chunks and the per-chunk results are
//! returned in chunk order, so any reduction performed by the caller is
//! bit-identical between the sequential and the parallel path.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled and
    /// falls back to [`ExecMode::Sequential`] otherwise.
    #[default]
    Parallel,
}

impl ExecMode {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Splits `0..len` into chunks of `chunk` items and maps `f` over them.
pub fn map_chunks<T, F>(mode: ExecMode, len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let range = move |i: usize| (i * chunk)..((i + 1) * chunk).min(len);
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n_chunks).into_par_iter().map(|i| f(range(i))).collect()
        }
        _ => (0..n_chunks).map(|i| f(range(i))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        let seq = map_chunks(ExecMode::Sequential, 10, 3, |r| r);
        assert_eq!(seq, vec![0..3, 3..6, 6..9, 9..10]);
        let par = map_chunks(ExecMode::Parallel, 10, 3, |r| r);
        assert_eq!(seq, par);
        assert!(map_chunks(ExecMode::Parallel, 0, 4, |r| r).is_empty());
    }
}
