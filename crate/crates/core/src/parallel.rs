//! Chunked execution of Monte Carlo loops.
//!
//! Work is cut into fixed-size chunks; chunk `k` always draws from substream
//! `k` of the caller's root stream and results are combined in chunk order.
//! The outcome is therefore bit-identical whatever the worker count, and
//! identical between the sequential and rayon paths.

use crate::rng::RandomStream;

/// Samples per chunk.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
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

fn chunk_bounds(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK)).map(|k| (k * CHUNK, CHUNK.min(n - k * CHUNK))).collect()
}

/// Runs `f(rng, len)` over every chunk of `n` items and returns the per-chunk
/// results in chunk order.
pub fn map_chunks<T, F>(n: usize, root: &RandomStream, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream, usize) -> T + Sync + Send,
{
    let bounds = chunk_bounds(n);
    let run = |k: usize, len: usize| {
        let mut rng = root.substream(k as u64);
        f(&mut rng, len)
    };
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            bounds.par_iter().enumerate().map(|(k, &(_, len))| run(k, len)).collect()
        }
        _ => bounds.iter().enumerate().map(|(k, &(_, len))| run(k, len)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn chunking_covers_everything() {
        let b = chunk_bounds(10_000);
        assert_eq!(b.iter().map(|x| x.1).sum::<usize>(), 10_000);
        assert_eq!(b.len(), 3);
        assert!(chunk_bounds(0).is_empty());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let root = RandomStream::new(5, 9);
        let f = |rng: &mut RandomStream, len: usize| (0..len).map(|_| rng.next_u32() as u64).sum::<u64>();
        let a = map_chunks(20_000, &root, Exec::Sequential, f);
        let b = map_chunks(20_000, &root, Exec::Parallel, f);
        assert_eq!(a, b);
    }
}
