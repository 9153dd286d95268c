//! Contiguous vertex-range partitioning by expected out-edge load, and the
//! confidence bound on the heaviest worker's realized load.
//!
//! The cumulative load `C(u) = sum_{w < u} load(w)` is never materialized.
//! Both [`locate_boundary`] and [`cumulative_load`] walk the `n`-ary digit
//! tree from the root, where a node at depth `d` carries mass equal to the
//! product of `u[digit]` along its path, so each query costs `O(k * n)`.

use std::ops::Range;

use thiserror::Error;

use crate::initiator::{vertex_count, InitiatorError, Marginals};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error(transparent)]
    Initiator(#[from] InitiatorError),
    #[error("worker count must be between 1 and the vertex count {n_vertices}, got {workers}")]
    WorkerCount { workers: usize, n_vertices: u64 },
    #[error("confidence level must lie strictly between 0 and 1, got {0}")]
    Alpha(f64),
    #[error("imbalance bound needs at least 2 workers, got {0}")]
    TooFewWorkers(usize),
    #[error("expected edge count must be positive and finite, got {0}")]
    EdgeCount(f64),
}

/// Per-worker half-open vertex ranges tiling `[0, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTable {
    pub n_workers: usize,
    pub ranges: Vec<Range<u64>>,
    /// Sum of vertex loads inside each range.
    pub expected_mass: Vec<f64>,
}

impl PartitionTable {
    pub fn n_vertices(&self) -> u64 {
        self.ranges.last().map_or(0, |r| r.end)
    }

    /// Checks that the ranges are contiguous and start at zero.
    pub fn is_tiling(&self, n_vertices: u64) -> bool {
        let mut next = 0;
        for r in &self.ranges {
            if r.start != next || r.end < r.start {
                return false;
            }
            next = r.end;
        }
        next == n_vertices && self.ranges.len() == self.n_workers
    }
}

/// Vertex `u` whose cumulative-load interval `[C(u), C(u+1))` contains `r`.
///
/// `r` is clamped to `[0, 1]`; `r = 1` (or any value past the rounded total)
/// lands on the last vertex.
pub fn locate_boundary(marg: &Marginals, k: u32, r: f64) -> u64 {
    let n = marg.n();
    let r = r.clamp(0.0, 1.0);
    let mut base = 0.0;
    let mut range = 1.0;
    let mut id = 0u64;
    for _ in 0..k {
        let mut digit = n - 1;
        for (d, &share) in marg.u().iter().enumerate().take(n - 1) {
            let child = range * share;
            if r < base + child {
                digit = d;
                break;
            }
            base += child;
        }
        range *= marg.u()[digit];
        id = id * n as u64 + digit as u64;
    }
    id
}

/// `C(u)`, the total load of vertices `0..u`. `u = N` gives exactly 1.
///
/// Accumulates in the same order as [`locate_boundary`], so
/// `cumulative_load(locate_boundary(r)) <= r` holds bit-for-bit.
pub fn cumulative_load(marg: &Marginals, k: u32, u: u64) -> f64 {
    let n = marg.n() as u64;
    let total = vertex_count(marg.n(), k).unwrap_or(u64::MAX);
    if u >= total {
        return 1.0;
    }
    let mut divisor = total / n;
    let mut base = 0.0;
    let mut range = 1.0;
    for _ in 0..k {
        let digit = ((u / divisor) % n) as usize;
        for &share in &marg.u()[..digit] {
            base += range * share;
        }
        range *= marg.u()[digit];
        divisor = (divisor / n).max(1);
    }
    base
}

/// Splits `[0, N)` into `n_workers` contiguous ranges, each carrying about
/// `1 / n_workers` of the expected load. Worker `w` owns
/// `[locate_boundary(w / W), locate_boundary((w + 1) / W))`; the outer ends
/// are pinned to `0` and `N`. A single heavy vertex may leave some ranges
/// empty.
pub fn compute_partition(
    marg: &Marginals,
    k: u32,
    n_workers: usize,
) -> Result<PartitionTable, PartitionError> {
    let n_vertices = vertex_count(marg.n(), k)?;
    if n_workers == 0 || n_workers as u64 > n_vertices {
        return Err(PartitionError::WorkerCount {
            workers: n_workers,
            n_vertices,
        });
    }
    let mut bounds: Vec<u64> = (0..=n_workers)
        .map(|w| locate_boundary(marg, k, w as f64 / n_workers as f64))
        .collect();
    bounds[0] = 0;
    bounds[n_workers] = n_vertices;
    let cumulative: Vec<f64> = bounds
        .iter()
        .map(|&b| cumulative_load(marg, k, b))
        .collect();
    Ok(PartitionTable {
        n_workers,
        ranges: bounds.windows(2).map(|w| w[0]..w[1]).collect(),
        expected_mass: cumulative.windows(2).map(|c| c[1] - c[0]).collect(),
    })
}

/// Equal-count split, used as the baseline the load-aware split is compared
/// against.
pub fn uniform_partition(
    marg: &Marginals,
    k: u32,
    n_workers: usize,
) -> Result<PartitionTable, PartitionError> {
    let n_vertices = vertex_count(marg.n(), k)?;
    if n_workers == 0 || n_workers as u64 > n_vertices {
        return Err(PartitionError::WorkerCount {
            workers: n_workers,
            n_vertices,
        });
    }
    let bound = |w: usize| (n_vertices as u128 * w as u128 / n_workers as u128) as u64;
    let ranges: Vec<Range<u64>> = (0..n_workers).map(|w| bound(w)..bound(w + 1)).collect();
    let expected_mass = ranges
        .iter()
        .map(|r| cumulative_load(marg, k, r.end) - cumulative_load(marg, k, r.start))
        .collect();
    Ok(PartitionTable {
        n_workers,
        ranges,
        expected_mass,
    })
}

/// Confidence bound on the heaviest worker: with confidence `alpha` the
/// maximum load stays within `[per_worker_mean, per_worker_mean + delta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImbalanceBound {
    pub per_worker_mean: f64,
    pub delta: f64,
    pub alpha: f64,
}

impl ImbalanceBound {
    pub fn upper(&self) -> f64 {
        self.per_worker_mean + self.delta
    }
}

/// `delta = sqrt(2E / W) * sqrt(ln W + |ln |ln(1 - alpha)||)` with natural
/// logarithms.
pub fn imbalance_bound(
    expected_edges: f64,
    n_workers: usize,
    alpha: f64,
) -> Result<ImbalanceBound, PartitionError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(PartitionError::Alpha(alpha));
    }
    if n_workers < 2 {
        return Err(PartitionError::TooFewWorkers(n_workers));
    }
    if !(expected_edges > 0.0 && expected_edges.is_finite()) {
        return Err(PartitionError::EdgeCount(expected_edges));
    }
    let w = n_workers as f64;
    let per_worker_mean = expected_edges / w;
    let spread = w.ln() + (1.0 - alpha).ln().abs().ln().abs();
    Ok(ImbalanceBound {
        per_worker_mean,
        delta: (2.0 * per_worker_mean).sqrt() * spread.sqrt(),
        alpha,
    })
}
