//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it, or with [`Parallelism::Sequential`], they run inline.

/// Runtime choice between the rayon path and the sequential fallback.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// True when work will actually be dispatched to rayon.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

pub fn sort_unstable<T: Ord + Send>(v: &mut [T], mode: Parallelism) {
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::slice::ParallelSliceMut;
        v.par_sort_unstable();
        return;
    }
    let _ = mode;
    v.sort_unstable();
}

pub fn sort_unstable_by_key<T, K, F>(v: &mut [T], key: F, mode: Parallelism)
where
    T: Send,
    K: Ord,
    F: Fn(&T) -> K + Sync,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::slice::ParallelSliceMut;
        v.par_sort_unstable_by_key(key);
        return;
    }
    let _ = mode;
    v.sort_unstable_by_key(key);
}

pub fn join<A, B, RA, RB>(a: A, b: B, mode: Parallelism) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return rayon::join(a, b);
    }
    let _ = mode;
    (a(), b())
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F, mode: Parallelism) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Builds three values, possibly concurrently.
pub fn join3<A, B, C, RA, RB, RC>(a: A, b: B, c: C, mode: Parallelism) -> (RA, RB, RC)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    C: FnOnce() -> RC + Send,
    RA: Send,
    RB: Send,
    RC: Send,
{
    let (ra, (rb, rc)) = join(a, || join(b, c, mode), mode);
    (ra, rb, rc)
}
