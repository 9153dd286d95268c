//! Stochastic Kronecker graph generation.
//!
//! Three generators produce the same edge distribution: the edge-centric
//! SKG, its source-then-destination equivalent, and PSKG, where every vertex
//! independently draws a Poisson out-degree and needs no coordination with
//! other vertices. Around them sit a load-balanced vertex partitioner, an
//! in-process parallel runner, and the graph patterns used to check that the
//! generators agree.
//!
//! ```
//! use pskg::{run_generation, GraphSpec, InitiatorMatrix, Model};
//!
//! let p = InitiatorMatrix::parse_inline("0.4532,0.2622;0.2622,0.0225").unwrap();
//! let spec = GraphSpec::new(p, 12, 11400.0, 1, Model::Pskg, 4).unwrap();
//! let g = run_generation(&spec).unwrap();
//! assert_eq!(g.n_vertices, 4096);
//! ```

pub mod analysis;
pub mod generator;
pub mod initiator;
pub mod io;
pub mod partition;
pub mod runner;

pub use generator::{
    derive_vertex_stream, pskg_vertex_edges, sample_poisson, skg_equiv_generate, skg_generate,
    vertex_load, EdgeList, GenerateError, RandomStream,
};
pub use initiator::{
    derive_marginals, kron_power_dense, kron_power_vector, GraphSpec, InitiatorError,
    InitiatorMatrix, Marginals, Model,
};
pub use partition::{
    compute_partition, cumulative_load, imbalance_bound, locate_boundary, ImbalanceBound,
    PartitionError, PartitionTable,
};
pub use runner::{
    merge_edge_outputs, run_generation, run_generation_with, RunError, SplitStrategy,
};
