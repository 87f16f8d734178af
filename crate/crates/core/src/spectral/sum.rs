//! Deterministic reductions.
//!
//! Split points depend only on the length, so the result is bit-identical
//! for any number of worker threads.

const LEAF: usize = 512;
const PARALLEL_ABOVE: usize = 1 << 15;

/// Pairwise sum of `f(0) + ... + f(len - 1)`.
pub fn pairwise_sum_by<F>(len: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    sum_range(0, len, f)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), &|i| values[i])
}

fn sum_range<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let len = hi - lo;
    if len <= LEAF {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        return acc;
    }
    let mid = lo + len / 2;
    let (a, b) = if len > PARALLEL_ABOVE {
        rayon::join(|| sum_range(lo, mid, f), || sum_range(mid, hi, f))
    } else {
        (sum_range(lo, mid, f), sum_range(mid, hi, f))
    };
    a + b
}

/// Maximum of `f` over `0..len`; `0.0` for an empty range. NaN propagates.
pub fn max_by<F>(len: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).reduce(
        || 0.0,
        |a, b| {
            if a.is_nan() || b.is_nan() {
                f64::NAN
            } else {
                a.max(b)
            }
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_integer_sum() {
        let n = 100_003;
        let s = pairwise_sum_by(n, &|i| i as f64);
        assert_eq!(s, (n as f64 - 1.0) * n as f64 / 2.0);
    }

    #[test]
    fn independent_of_thread_count() {
        let values: Vec<f64> = (0..200_000).map(|i| ((i as f64) * 0.37).sin()).collect();
        let a = pairwise_sum(&values);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| pairwise_sum(&values));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn max_handles_empty_and_nan() {
        assert_eq!(max_by(0, &|_| 1.0), 0.0);
        assert_eq!(max_by(3, &|i| i as f64), 2.0);
        assert!(max_by(3, &|i| if i == 1 { f64::NAN } else { 1.0 }).is_nan());
    }
}
