//! Switch between rayon and plain sequential loops.
//!
//! With the `parallel` feature (default) the helpers run on the current
//! rayon pool; without it they compile to ordinary iterator loops with
//! identical results. Per-element work is deterministic and index-addressed,
//! so outputs are bit-identical across thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements a fine-grained kernel is not worth splitting.
#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 4096;

/// Fills `out[i] = f(i)` for every index; used for per-edge/per-node kernels.
#[cfg(feature = "parallel")]
pub(crate) fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    out.par_iter_mut()
        .enumerate()
        .with_min_len(MIN_CHUNK)
        .for_each(|(i, slot)| *slot = f(i));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

/// Maps `f` over `0..len` into a vector in index order; used for coarse
/// independent units (trials, restarts, grid points, basis rows).
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}
