//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper collects results into an index-ordered `Vec` and leaves the
//! reduction to the caller, so parallel and sequential runs produce identical
//! output. With the `parallel` feature disabled everything runs on the calling
//! thread. With it enabled, [`set_sequential`] forces the sequential path at
//! runtime (used by the benches to compare both).

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force (or release) the sequential code path for all helpers.
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

/// Whether the helpers currently dispatch to rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() && n > 1 {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() && items.len() > 1 {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Maximum of `f(i)` over `0..n`, ties resolved to the lowest index.
/// NaN values are ignored. Returns `None` when no finite value exists.
pub fn argmax_range<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64> + Sync + Send,
{
    let vals = map_range(n, f);
    first_max(vals.into_iter())
}

pub(crate) fn first_max<I: Iterator<Item = Option<f64>>>(it: I) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in it.enumerate() {
        let Some(v) = v else { continue };
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// Pairwise (cascade) summation; deterministic and more accurate than a fold.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        let vals = [1.0, 3.0, 2.0, 3.0];
        let got = argmax_range(4, |i| Some(vals[i]));
        assert_eq!(got, Some((1, 3.0)));
    }

    #[test]
    fn argmax_skips_missing_and_nan() {
        let got = argmax_range(3, |i| match i {
            0 => None,
            1 => Some(f64::NAN),
            _ => Some(-1.0),
        });
        assert_eq!(got, Some((2, -1.0)));
        assert_eq!(argmax_range(2, |_| None), None);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 49_995_000.0);
    }

    #[test]
    fn sequential_switch_gives_same_result() {
        let par = map_range(513, |i| (i as f64).sqrt());
        set_sequential(true);
        let seq = map_range(513, |i| (i as f64).sqrt());
        set_sequential(false);
        assert_eq!(par, seq);
    }
}
