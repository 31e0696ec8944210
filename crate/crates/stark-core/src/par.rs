//! Deterministic data-parallel primitives.
//!
//! Reductions over grid buffers run on a fixed-shape pairwise tree: the
//! buffer is cut into fixed-size chunks, each chunk is summed pairwise,
//! and the ordered chunk partials are combined pairwise again. The tree
//! depends only on the buffer length, never on the thread count, so sums
//! are bit-identical with and without the `parallel` feature.

use num_complex::Complex64;

/// Chunk length for grid reductions. Fixed so the reduction tree (and
/// therefore the floating-point rounding pattern) never depends on the
/// scheduler.
pub const CHUNK: usize = 4096;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

fn pairwise<T, F>(vals: &[T], add: &F, zero: T) -> T
where
    T: Copy,
    F: Fn(T, T) -> T,
{
    match vals.len() {
        0 => zero,
        1 => vals[0],
        n => {
            let mid = n / 2;
            add(
                pairwise(&vals[..mid], add, zero),
                pairwise(&vals[mid..], add, zero),
            )
        }
    }
}

fn chunk_partials<T, F>(n: usize, per_chunk: F) -> Vec<T>
where
    T: Copy + Send,
    F: Fn(usize, usize) -> T + Sync,
{
    let n_chunks = n.div_ceil(CHUNK);
    let bounds = |c: usize| {
        let lo = c * CHUNK;
        (lo, (lo + CHUNK).min(n))
    };
    #[cfg(feature = "parallel")]
    {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let (lo, hi) = bounds(c);
                per_chunk(lo, hi)
            })
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks)
            .map(|c| {
                let (lo, hi) = bounds(c);
                per_chunk(lo, hi)
            })
            .collect()
    }
}

fn sum_chunk_f64(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        sum_chunk_f64(&xs[..mid]) + sum_chunk_f64(&xs[mid..])
    }
}

fn sum_chunk_c64(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 32 {
        let mut s = Complex64::new(0.0, 0.0);
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        sum_chunk_c64(&xs[..mid]) + sum_chunk_c64(&xs[mid..])
    }
}

/// Pairwise sum of a real slice.
pub fn sum_f64(xs: &[f64]) -> f64 {
    let partials = chunk_partials(xs.len(), |lo, hi| sum_chunk_f64(&xs[lo..hi]));
    pairwise(&partials, &|a, b| a + b, 0.0)
}

/// Pairwise sum of `f(i)` over `0..n`. The closure is evaluated once per
/// index in chunk order.
pub fn sum_indexed_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials = chunk_partials(n, |lo, hi| {
        let vals: Vec<f64> = (lo..hi).map(&f).collect();
        sum_chunk_f64(&vals)
    });
    pairwise(&partials, &|a, b| a + b, 0.0)
}

/// Pairwise sum of a complex slice.
pub fn sum_c64(xs: &[Complex64]) -> Complex64 {
    let partials = chunk_partials(xs.len(), |lo, hi| sum_chunk_c64(&xs[lo..hi]));
    pairwise(&partials, &|a, b| a + b, Complex64::new(0.0, 0.0))
}

/// Pairwise sum of `conj(a_i) * b_i`.
pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let partials = chunk_partials(a.len(), |lo, hi| {
        let vals: Vec<Complex64> = (lo..hi).map(|i| a[i].conj() * b[i]).collect();
        sum_chunk_c64(&vals)
    });
    pairwise(&partials, &|x, y| x + y, Complex64::new(0.0, 0.0))
}

/// Pairwise sum of `|a_i|^2`.
pub fn norm_sq(a: &[Complex64]) -> f64 {
    let partials = chunk_partials(a.len(), |lo, hi| {
        let vals: Vec<f64> = (lo..hi).map(|i| a[i].norm_sqr()).collect();
        sum_chunk_f64(&vals)
    });
    pairwise(&partials, &|x, y| x + y, 0.0)
}

/// Ordered parallel map over independent jobs.
pub fn map_jobs<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// In-place transform of disjoint fixed-size chunks; `f` receives the chunk
/// start offset. Pointwise, so scheduling cannot affect the result.
pub fn for_each_chunk_mut<F>(buf: &mut [Complex64], f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        buf.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| f(c * CHUNK, chunk));
    }
    #[cfg(not(feature = "parallel"))]
    {
        buf.chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| f(c * CHUNK, chunk));
    }
}

/// Sequential reference implementations used by the benchmark suite to
/// compare against the (possibly parallel) defaults above. Always compiled.
pub mod seq {
    use super::*;

    pub fn sum_f64(xs: &[f64]) -> f64 {
        let n_chunks = xs.len().div_ceil(CHUNK);
        let partials: Vec<f64> = (0..n_chunks)
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(xs.len());
                super::sum_chunk_f64(&xs[lo..hi])
            })
            .collect();
        super::pairwise(&partials, &|a, b| a + b, 0.0)
    }

    pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let n_chunks = a.len().div_ceil(CHUNK);
        let partials: Vec<Complex64> = (0..n_chunks)
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(a.len());
                let vals: Vec<Complex64> = (lo..hi).map(|i| a[i].conj() * b[i]).collect();
                super::sum_chunk_c64(&vals)
            })
            .collect();
        super::pairwise(&partials, &|x, y| x + y, Complex64::new(0.0, 0.0))
    }

    pub fn norm_sq(a: &[Complex64]) -> f64 {
        let n_chunks = a.len().div_ceil(CHUNK);
        let partials: Vec<f64> = (0..n_chunks)
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(a.len());
                let vals: Vec<f64> = (lo..hi).map(|i| a[i].norm_sqr()).collect();
                super::sum_chunk_f64(&vals)
            })
            .collect();
        super::pairwise(&partials, &|x, y| x + y, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_sequential_fallback_bitwise() {
        let xs: Vec<f64> = (0..100_000)
            .map(|i| ((i as f64) * 0.7133).sin() * 1e3)
            .collect();
        assert_eq!(sum_f64(&xs).to_bits(), seq::sum_f64(&xs).to_bits());

        let a: Vec<Complex64> = (0..50_000)
            .map(|i| Complex64::new((i as f64).cos(), (i as f64 * 0.3).sin()))
            .collect();
        let b: Vec<Complex64> = (0..50_000)
            .map(|i| Complex64::new((i as f64 * 1.7).sin(), (i as f64 * 0.9).cos()))
            .collect();
        let p = dot_conj(&a, &b);
        let s = seq::dot_conj(&a, &b);
        assert_eq!(p.re.to_bits(), s.re.to_bits());
        assert_eq!(p.im.to_bits(), s.im.to_bits());
        assert_eq!(norm_sq(&a).to_bits(), seq::norm_sq(&a).to_bits());
    }

    #[test]
    fn sums_are_accurate() {
        let xs = vec![0.1f64; 1_000_001];
        assert!((sum_f64(&xs) - 100_000.1).abs() < 1e-9);
    }
}
