//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature disabled, [`Mode::Parallel`] runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Sequential,
    Parallel,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

/// First `Some` in index order, regardless of evaluation order.
pub fn find_first<T, R, F>(mode: Mode, items: &[T], f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Mode::Parallel {
        return items.par_iter().find_map_first(f);
    }
    let _ = mode;
    items.iter().find_map(f)
}

/// Like [`find_first`] over the index range `0..n`.
pub fn find_first_index<R, F>(mode: Mode, n: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Mode::Parallel {
        return (0..n).into_par_iter().find_map_first(f);
    }
    let _ = mode;
    (0..n).find_map(f)
}

/// Order-preserving map.
pub fn map<T, R, F>(mode: Mode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Mode::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Order-preserving filter.
pub fn filter<T, F>(mode: Mode, items: Vec<T>, f: F) -> Vec<T>
where
    T: Send + Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Mode::Parallel {
        return items.into_par_iter().filter(|x| f(x)).collect();
    }
    let _ = mode;
    items.into_iter().filter(|x| f(x)).collect()
}
