//! Data-parallel map over an index range plus deterministic reduction.
//!
//! Every hot loop in this crate (quadrature nodes, basis states, tensor
//! grids) maps an index to a value and sums the results. The map runs on
//! rayon when the `parallel` feature is enabled and the range is large
//! enough to pay for it; the reduction is always the same index-ordered
//! pairwise tree, so sums are bit-identical across runs, thread counts,
//! and with the feature disabled.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many items rayon overhead dominates; stay sequential.
const PAR_THRESHOLD: usize = 512;

/// Pairwise summation below this length falls back to a straight fold.
const PAIRWISE_BASE: usize = 16;

/// Sequential indexed map; always available.
pub fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Rayon indexed map. Collection preserves index order.
#[cfg(feature = "parallel")]
pub fn map_collect_par<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Indexed map using rayon when available and worthwhile.
#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if n >= PAR_THRESHOLD {
        map_collect_par(n, f)
    } else {
        map_collect_seq(n, f)
    }
}

/// Indexed map, sequential build.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_collect_seq(n, f)
}

/// Index-ordered pairwise sum. The tree shape depends only on the slice
/// length, which keeps the rounding pattern reproducible.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BASE {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum over complex values, same tree as [`pairwise_sum`].
pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_BASE {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// Map `0..n` and pairwise-sum the results.
pub fn map_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    pairwise_sum(&map_collect(n, f))
}

/// Complex variant of [`map_sum`].
pub fn map_sum_complex<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    pairwise_sum_complex(&map_collect(n, f))
}
