//! Compensated summation with a worker-count independent reduction order.

use rayon::prelude::*;

/// Neumaier (improved Kahan) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.c
    }
}

pub const CHUNK: usize = 2048;

/// Σ f(i) for i in 0..n, evaluated in fixed chunks of [`CHUNK`] indices.
///
/// Each chunk is summed sequentially and the chunk totals are combined in
/// index order, so the result is bit-identical for any thread pool size.
/// The first error (lowest chunk index) is returned.
pub fn chunked_sum<E, F>(n: u64, f: F) -> Result<f64, E>
where
    E: Send,
    F: Fn(u64) -> Result<f64, E> + Sync,
{
    let chunks = n.div_ceil(CHUNK as u64);
    let partial: Vec<Result<f64, E>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Neumaier::default();
            let end = ((c + 1) * CHUNK as u64).min(n);
            for i in c * CHUNK as u64..end {
                acc.add(f(i)?);
            }
            Ok(acc.total())
        })
        .collect();
    let mut acc = Neumaier::default();
    for p in partial {
        acc.add(p?);
    }
    Ok(acc.total())
}

/// Like [`chunked_sum`] but each chunk is handed its whole index range, for
/// generators that are cheaper to advance sequentially.
pub fn chunked_sum_ranges<E, F>(n: u64, f: F) -> Result<f64, E>
where
    E: Send,
    F: Fn(u64, u64, &mut Neumaier) -> Result<(), E> + Sync,
{
    let chunks = n.div_ceil(CHUNK as u64);
    let partial: Vec<Result<f64, E>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Neumaier::default();
            let start = c * CHUNK as u64;
            let end = ((c + 1) * CHUNK as u64).min(n);
            f(start, end - start, &mut acc)?;
            Ok(acc.total())
        })
        .collect();
    let mut acc = Neumaier::default();
    for p in partial {
        acc.add(p?);
    }
    Ok(acc.total())
}
