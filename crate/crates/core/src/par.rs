//! Trial fan-out. With the `parallel` feature trials run on the rayon pool;
//! without it, or with [`Backend::Sequential`], they run in index order.
//! Either way each trial sees only its own index, so results are identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    Parallel,
}

impl Default for Backend {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Backend::Parallel
        } else {
            Backend::Sequential
        }
    }
}

pub fn map_indexed<T, F>(backend: Backend, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match backend {
        #[cfg(feature = "parallel")]
        Backend::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// True if `pred` holds for some index. The parallel path may stop at any
/// witness, so callers must not depend on which one is found.
pub fn any_indexed<F>(backend: Backend, n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    match backend {
        #[cfg(feature = "parallel")]
        Backend::Parallel => (0..n).into_par_iter().any(pred),
        _ => (0..n).any(pred),
    }
}
