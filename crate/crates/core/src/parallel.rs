//! Order-preserving parallel map over scoped threads.
//!
//! Results always come back in input order regardless of worker scheduling,
//! which keeps downstream file writes and aggregation byte-identical across
//! `--jobs` settings.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

/// The number of logical cores, falling back to 1 when unknown.
pub fn default_jobs() -> usize {
    thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
}

/// Applies `f` to every item on up to `jobs` worker threads and returns the
/// outputs in input order. `jobs` of 0 or 1 runs inline on the caller.
pub fn map_ordered<I, O, F>(items: Vec<I>, jobs: usize, f: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    // One slot per item: workers claim indices from a shared counter, take
    // the input out of its slot, and park the output in the matching slot.
    let inputs: Vec<Mutex<Option<I>>> = items.into_iter().map(|i| Mutex::new(Some(i))).collect();
    let outputs: Vec<Mutex<Option<O>>> = inputs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let f = &f;
    thread::scope(|scope| {
        for _ in 0..jobs.min(inputs.len()) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                let Some(slot) = inputs.get(index) else {
                    break;
                };
                let item = slot
                    .lock()
                    .expect("input slot poisoned")
                    .take()
                    .expect("each index is claimed once");
                let output = f(item);
                *outputs[index].lock().expect("output slot poisoned") = Some(output);
            });
        }
    });
    outputs
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("output slot poisoned")
                .expect("worker filled every claimed slot")
        })
        .collect()
}
