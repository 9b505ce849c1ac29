//! Timing and memory harness for the pipeline.
//!
//! Peak memory is only measured when the binary installs
//! [`CountingAllocator`] as its global allocator; otherwise it reads zero.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::Diagram;
use crate::delaunay::{self, Cloud, TriangulationError};
use crate::forest::{self, SweepStats};
use crate::geom::Point2;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

/// System allocator that tracks live and peak heap bytes.
pub struct CountingAllocator;

unsafe impl GlobalAlloc for CountingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            record_alloc(layout.size());
        }
        p
    }

    unsafe fn alloc_zeroed(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc_zeroed(layout);
        if !p.is_null() {
            record_alloc(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                record_alloc(new_size - layout.size());
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

fn record_alloc(size: usize) {
    let now = CURRENT.fetch_add(size, Ordering::Relaxed) + size;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

/// Live heap bytes seen by [`CountingAllocator`].
pub fn current_bytes() -> usize {
    CURRENT.load(Ordering::Relaxed)
}

/// Highest live heap bytes since the last [`reset_peak`].
pub fn peak_bytes() -> usize {
    PEAK.load(Ordering::Relaxed)
}

pub fn reset_peak() {
    PEAK.store(CURRENT.load(Ordering::Relaxed), Ordering::Relaxed);
}

/// `n` points drawn uniformly from the unit square.
pub fn uniform_cloud(n: usize, seed: u64) -> Cloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n).map(|_| Point2::new(rng.gen(), rng.gen())).collect();
    Cloud::new(pts).expect("finite coordinates")
}

/// Wall-clock seconds per pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub triangulate: f64,
    pub sort: f64,
    pub sweep: f64,
    pub total: f64,
}

/// Runs the pipeline once, timing each stage.
pub fn timed_pipeline(cloud: &Cloud) -> Result<(Diagram, SweepStats, StageTimings), TriangulationError> {
    let start = Instant::now();
    let tri = delaunay::triangulate(cloud)?;
    let t1 = Instant::now();
    let order = delaunay::edges_sorted_desc(&tri);
    let t2 = Instant::now();
    let outcome = forest::sweep(&tri, &order);
    let t3 = Instant::now();
    let (triangulate, sort, sweep) =
        ((t1 - start).as_secs_f64(), (t2 - t1).as_secs_f64(), (t3 - t2).as_secs_f64());
    // rounding to f64 must not let the stages add up to more than the total
    let total = (t3 - start).as_secs_f64().max(triangulate + sort + sweep);
    let timings = StageTimings { triangulate, sort, sweep, total };
    Ok((outcome.diagram, outcome.stats, timings))
}

/// One line of the scaling table. Times are medians over the repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub timings: StageTimings,
    /// `total / (n log2 n)` in nanoseconds.
    pub ns_per_n_log_n: f64,
    /// Heap high-water mark of one run above the live bytes before it,
    /// or zero without [`CountingAllocator`].
    pub peak_bytes: usize,
}

/// Times the pipeline on uniform clouds of the given sizes.
pub fn scaling_table(sizes: &[usize], repeats: usize, seed: u64) -> Vec<BenchRow> {
    let repeats = repeats.max(1);
    sizes
        .iter()
        .map(|&n| {
            let mut runs = Vec::with_capacity(repeats);
            let mut peak = 0;
            for r in 0..repeats {
                let cloud = uniform_cloud(n, seed.wrapping_add(r as u64));
                reset_peak();
                let before = current_bytes();
                let (_, _, t) = timed_pipeline(&cloud).expect("uniform clouds are not degenerate");
                peak = peak.max(peak_bytes().saturating_sub(before));
                runs.push(t);
            }
            let timings = StageTimings {
                triangulate: median(runs.iter().map(|t| t.triangulate)),
                sort: median(runs.iter().map(|t| t.sort)),
                sweep: median(runs.iter().map(|t| t.sweep)),
                total: median(runs.iter().map(|t| t.total)),
            };
            let n_log_n = n as f64 * (n as f64).log2();
            BenchRow { n, timings, ns_per_n_log_n: timings.total * 1e9 / n_log_n, peak_bytes: peak }
        })
        .collect()
}

/// Sizes `10^3, 10^4, ...` up to `max_n`.
pub fn default_sizes(max_n: usize) -> Vec<usize> {
    std::iter::successors(Some(1000usize), |&n| n.checked_mul(10)).take_while(|&n| n <= max_n).collect()
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
