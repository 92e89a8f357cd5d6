//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) the helpers fan out over the rayon
//! pool; without it, or inside [`with_execution`] with
//! [`Execution::Sequential`], they run as plain iterators on the calling
//! thread. Results are always returned in input order so reductions stay
//! bit-stable regardless of thread count.

use std::cell::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

thread_local! {
    static MODE: Cell<Execution> = const { Cell::new(Execution::Parallel) };
}

/// Run `f` with the given execution mode on the current thread.
pub fn with_execution<R>(mode: Execution, f: impl FnOnce() -> R) -> R {
    let prev = MODE.with(|m| m.replace(mode));
    struct Restore(Execution);
    impl Drop for Restore {
        fn drop(&mut self) {
            MODE.with(|m| m.set(self.0));
        }
    }
    let _restore = Restore(prev);
    f()
}

/// The mode in effect for calls made from this thread.
pub fn current() -> Execution {
    if cfg!(feature = "parallel") {
        MODE.with(|m| m.get())
    } else {
        Execution::Sequential
    }
}

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current() == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Map `f` over a slice, collecting results in order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current() == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Fallible variant of [`map_range`]; returns the first error in index order.
pub fn try_map_range<R, E, F>(n: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_range(n, f).into_iter().collect()
}
