//! Order-preserving map over a work list, parallel when the `parallel`
//! feature is enabled.
//!
//! Every sweep in this crate funnels through [`map_collect`] so that the
//! parallel and sequential builds produce bit-identical output: results are
//! collected in input order and any reduction happens afterwards,
//! sequentially. [`map_collect_seq`] is always available so benchmarks can
//! compare the two paths within one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving input order in the output.
///
/// Runs on the rayon pool when the `parallel` feature is on, otherwise
/// falls back to [`map_collect_seq`].
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Sequential fallback used when built with `--no-default-features`.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    map_collect_seq(items, f)
}

/// Sequential map, always available (benchmark baseline).
pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let items: Vec<u64> = (0..257).collect();
        let f = |x: &u64| (*x as f64).sqrt().sin();
        let a = map_collect(&items, f);
        let b = map_collect_seq(&items, f);
        assert_eq!(a, b, "order or values differ between parallel and sequential map");
    }
}
