//! Execution backend for the check loops.
//!
//! Every scan in this crate walks an index space `0..n` where index order is
//! semantically meaningful (the first failing index is the reported witness).
//! `find_map_first` returns the match with the smallest index whether it runs
//! on one thread or many, so verdicts do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn find_map_first<R, F>(n: u64, f: F) -> Option<R>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    (0..n).into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_map_first<R, F>(n: u64, f: F) -> Option<R>
where
    F: Fn(u64) -> Option<R>,
{
    (0..n).find_map(f)
}

/// Map the index space and collect in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_collect<R, F>(n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<R, F>(n: u64, f: F) -> Vec<R>
where
    F: Fn(u64) -> R,
{
    (0..n).map(f).collect()
}
