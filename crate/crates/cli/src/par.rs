//! Index-range parallelism whose results never depend on the worker count.
//!
//! Work `0..len` is cut into fixed chunks (their size depends only on `len`),
//! workers take chunks round-robin, and results are merged by chunk index.

use std::sync::atomic::{AtomicU64, Ordering};

/// Chunk size as a function of the range alone.
fn chunk_len(len: u64) -> u64 {
    (len / 256).clamp(1, 4096)
}

fn chunks(len: u64) -> impl Iterator<Item = std::ops::Range<u64>> {
    let c = chunk_len(len);
    (0..len.div_ceil(c)).map(move |i| i * c..((i + 1) * c).min(len))
}

/// Maps every chunk with `f` and returns the results in chunk order.
pub fn map_chunks<T, F>(len: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync,
{
    let ranges: Vec<_> = chunks(len).collect();
    if jobs <= 1 || ranges.len() <= 1 {
        return ranges.into_iter().map(f).collect();
    }
    let mut parts: Vec<(usize, T)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let (f, ranges) = (&f, &ranges);
                s.spawn(move || ranges.iter().enumerate().skip(w).step_by(jobs).map(|(i, r)| (i, f(r.clone()))).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    parts.sort_by_key(|(i, _)| *i);
    parts.into_iter().map(|(_, t)| t).collect()
}

/// Maps every index and returns the results in index order.
pub fn map_indices<T, F>(len: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    map_chunks(len, jobs, |r| r.map(&f).collect::<Vec<_>>()).into_iter().flatten().collect()
}

/// The least index for which `f` yields `Some`, with its value.
///
/// Workers skip chunks that start past the best index found so far, so the
/// search stops early without changing the answer.
pub fn find_first<T, F>(len: u64, jobs: usize, f: F) -> Option<(u64, T)>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> Option<(u64, T)> + Sync,
{
    let best = AtomicU64::new(u64::MAX);
    let found = map_chunks(len, jobs, |r| {
        if r.start > best.load(Ordering::Relaxed) {
            return None;
        }
        let hit = f(r)?;
        best.fetch_min(hit.0, Ordering::Relaxed);
        Some(hit)
    });
    found.into_iter().flatten().min_by_key(|(i, _)| *i)
}

/// Like [`find_first`] for fallible work: the first error or hit by index wins.
pub fn try_find_first<T, E, F>(len: u64, jobs: usize, f: F) -> Result<Option<(u64, T)>, E>
where
    T: Send,
    E: Send,
    F: Fn(std::ops::Range<u64>) -> Result<Option<(u64, T)>, E> + Sync,
{
    let outcome = find_first(len, jobs, |r| {
        let start = r.start;
        match f(r) {
            Ok(Some((i, t))) => Some((i, Ok(t))),
            Ok(None) => None,
            Err(e) => Some((start, Err(e))),
        }
    });
    match outcome {
        None => Ok(None),
        Some((i, Ok(t))) => Ok(Some((i, t))),
        Some((_, Err(e))) => Err(e),
    }
}
