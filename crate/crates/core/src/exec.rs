//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper returns results in index order, so callers that reduce over
//! the output sequentially get bitwise-identical results in either mode.

/// How independent work items (Monte Carlo trials, table cells) are run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when built with the `parallel` feature, otherwise sequential.
    #[default]
    Parallel,
}

pub fn is_parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// `(0..count).map(f)` collected in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(exec: Execution, count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Sequential => (0..count).map(f).collect(),
        Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(_exec: Execution, count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..count).map(f).collect()
}

/// `items.iter().map(f)` collected in input order.
#[cfg(feature = "parallel")]
pub fn map_slice<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => items.par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F>(_exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let seq = map_indexed(Execution::Sequential, 1000, |i| i * i);
        let par = map_indexed(Execution::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
        let items: Vec<u32> = (0..100).collect();
        assert_eq!(
            map_slice(Execution::Parallel, &items, |x| x + 1),
            map_slice(Execution::Sequential, &items, |x| x + 1)
        );
    }
}
