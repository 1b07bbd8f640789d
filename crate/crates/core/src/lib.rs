//! Grow-and-destroy scale-free networks.
//!
//! The crate builds random graphs in two phases. A growth phase starts from
//! a small seed ring and attaches each new node to `m` existing nodes,
//! picking targets by degree (popularity) or by fitness-weighted degree,
//! with a per-node coin choosing between the two rules. A destruction phase
//! then removes a fraction of the nodes under one of three attack rules
//! (central, peripheral, general). The remaining modules measure the
//! surviving topology (degree distribution and its power-law exponent,
//! clustering, cluster sizes) and drive parameter sweeps over ensembles.
//!
//! Everything stochastic takes an explicit RNG; a single `u64` seed
//! reproduces a run bit-for-bit.

pub mod attack;
pub mod error;
pub mod generate;
pub mod graph;
pub mod metrics;
pub mod rng;
pub mod sample;
pub mod stats;
pub mod sweep;

pub use attack::{
    apply_attack, apply_attack_with, removal_weights, AttackKind, AttackSpec, RemovalSchedule,
};
pub use error::{Error, GraphError, Result};
pub use generate::{attachment_weights, build_seed_ring, grow, grow_with, GenerationParams, ModeDraw};
pub use graph::{connected_components, ComponentLabeling, Graph, NodeId};
pub use metrics::{
    average_clustering, average_degree, cluster_size_distribution, collapse_degree_distribution,
    compute_metrics, degree_distribution, fit_power_law, giant_fraction, ks_distance, log_binned,
    ClusterSizes, DegreeHistogram, MetricsConfig, MetricsReport, PowerLawFit,
};
pub use rng::{replica_seed, rng_from_seed, splitmix64, RngStream};
pub use sample::{sample_targets, FenwickSampler};
pub use sweep::{
    direction_grids, direction_report, range_check, read_results_csv, run_single, run_sweep,
    CellFailure, CellParams, Direction, DirectionReport, ExportFlags, InputAxis, OutputMetric,
    RangeBand, RangeEntry, RangeReport, ResultRow, RunConfig, SweepGrid, SweepOutcome,
};
