//! In-process BSP-style driver for PSKG.
//!
//! The spec is broadcast once to every worker, each worker generates the
//! out-edges of its own vertex range from per-vertex streams, and the
//! per-worker buffers are merged after the join. Workers share nothing
//! mutable and never talk to each other.

use std::ops::Range;
use std::thread;

use thiserror::Error;

use crate::generator::{
    append_vertex_edges, skg_equiv_generate, skg_generate, EdgeList, GenerateError, RandomStream,
};
use crate::initiator::{GraphSpec, InitiatorError, Marginals, Model};
use crate::partition::{compute_partition, uniform_partition, PartitionError, PartitionTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Initiator(#[from] InitiatorError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("worker {worker} emitted edge ({src}, {dst}) outside its source range {range:?}")]
    SourceOutsideRange {
        worker: usize,
        src: u64,
        dst: u64,
        range: Range<u64>,
    },
    #[error("source ranges of workers {a} and {b} overlap")]
    OverlappingRanges { a: usize, b: usize },
    #[error("worker thread panicked")]
    WorkerPanicked,
}

/// How vertex ranges are assigned to workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitStrategy {
    /// Equal expected out-edge load per worker.
    #[default]
    Balanced,
    /// Equal vertex count per worker.
    Uniform,
}

/// Everything a worker needs: its id, its vertex range and the broadcast
/// configuration.
#[derive(Debug, Clone)]
pub struct WorkerTask<'a> {
    pub worker_id: usize,
    pub range: Range<u64>,
    pub spec: &'a GraphSpec,
    pub marginals: &'a Marginals,
}

impl WorkerTask<'_> {
    /// Generates every out-edge of the task's vertices in canonical order.
    pub fn run(&self) -> Result<WorkerOutput, GenerateError> {
        let mut edges = Vec::new();
        for u in self.range.clone() {
            append_vertex_edges(
                self.marginals,
                self.spec.k,
                self.spec.expected_edges,
                self.spec.seed,
                u,
                &mut edges,
            )?;
        }
        Ok(WorkerOutput {
            worker_id: self.worker_id,
            range: self.range.clone(),
            edges,
        })
    }
}

/// A worker's output buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerOutput {
    pub worker_id: usize,
    pub range: Range<u64>,
    pub edges: Vec<(u64, u64)>,
}

/// Worker ranges for `spec` under `strategy`. The worker count is capped at
/// the vertex count.
pub fn plan_workers(
    spec: &GraphSpec,
    marginals: &Marginals,
    strategy: SplitStrategy,
) -> Result<PartitionTable, RunError> {
    let workers = (spec.workers as u64).min(spec.vertex_count()) as usize;
    let table = match strategy {
        SplitStrategy::Balanced => compute_partition(marginals, spec.k, workers)?,
        SplitStrategy::Uniform => uniform_partition(marginals, spec.k, workers)?,
    };
    Ok(table)
}

/// Generates the graph described by `spec` with load-balanced workers.
pub fn run_generation(spec: &GraphSpec) -> Result<EdgeList, RunError> {
    run_generation_with(spec, SplitStrategy::Balanced)
}

/// Generates the graph described by `spec`.
///
/// PSKG output is the concatenation, in vertex order, of every vertex's
/// edges drawn from its own stream, so it does not depend on the worker
/// count or the split. The edge-centric models run on one sequential stream.
pub fn run_generation_with(
    spec: &GraphSpec,
    strategy: SplitStrategy,
) -> Result<EdgeList, RunError> {
    spec.validate()?;
    match spec.model {
        Model::Skg => Ok(skg_generate(spec, &mut RandomStream::sequential(spec.seed))),
        Model::SkgEquiv => Ok(skg_equiv_generate(
            spec,
            &mut RandomStream::sequential(spec.seed),
        )?),
        Model::Pskg => {
            let marginals = spec.initiator.marginals()?;
            let table = plan_workers(spec, &marginals, strategy)?;
            let tasks: Vec<WorkerTask<'_>> = table
                .ranges
                .iter()
                .enumerate()
                .map(|(worker_id, range)| WorkerTask {
                    worker_id,
                    range: range.clone(),
                    spec,
                    marginals: &marginals,
                })
                .collect();
            let outputs = if tasks.len() == 1 {
                vec![tasks[0].run()?]
            } else {
                thread::scope(|scope| {
                    let handles: Vec<_> = tasks
                        .iter()
                        .map(|task| scope.spawn(move || task.run()))
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| match h.join() {
                            Ok(out) => out.map_err(RunError::from),
                            Err(_) => Err(RunError::WorkerPanicked),
                        })
                        .collect::<Result<Vec<_>, _>>()
                })?
            };
            let mut graph = merge_edge_outputs(outputs)?;
            graph.n_vertices = spec.vertex_count();
            Ok(graph)
        }
    }
}

/// Merges per-worker buffers into one edge list ordered by source, keeping
/// each source's generation order. Parts may arrive in any order; they are
/// placed by their ranges, which must not overlap.
pub fn merge_edge_outputs(mut parts: Vec<WorkerOutput>) -> Result<EdgeList, RunError> {
    parts.sort_by_key(|p| (p.range.start, p.worker_id));
    for pair in parts.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if !a.range.is_empty() && !b.range.is_empty() && b.range.start < a.range.end {
            return Err(RunError::OverlappingRanges {
                a: a.worker_id,
                b: b.worker_id,
            });
        }
    }
    for part in &parts {
        if let Some(&(src, dst)) = part.edges.iter().find(|(s, _)| !part.range.contains(s)) {
            return Err(RunError::SourceOutsideRange {
                worker: part.worker_id,
                src,
                dst,
                range: part.range.clone(),
            });
        }
    }
    let n_vertices = parts.iter().map(|p| p.range.end).max().unwrap_or(0);
    let total = parts.iter().map(|p| p.edges.len()).sum();
    let mut edges = Vec::with_capacity(total);
    for part in parts {
        edges.extend(part.edges);
    }
    Ok(EdgeList::new(n_vertices, edges))
}
