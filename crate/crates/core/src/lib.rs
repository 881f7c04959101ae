//! Maximum out-components of temporal networks.
//!
//! * [`matrix`]: exact streaming component matrix, forward and reversed.
//! * [`sketch`]: HyperLogLog sketches and the sketched matrix variants.
//! * [`event_graph`]: event-graph + HyperLogLog baseline.
//! * [`hashing`] and [`fusion`]: compression onto super-nodes with a
//!   4-universal hash family and fusion of the per-hash components.
//! * [`generator`] and [`oracle`]: synthetic networks and brute-force truth.
//! * [`metrics`]: size distributions and the Earth-Mover distance.

pub mod bits;
pub mod error;
pub mod event_graph;
pub mod fusion;
pub mod generator;
pub mod hashing;
pub mod matrix;
pub mod metrics;
pub mod network;
pub mod oracle;
pub mod sketch;
pub mod sparse;

pub use bits::NodeSet;
pub use error::{Error, Result};
pub use event_graph::{eg_out_component_sizes, EgEstimate, EventGraph};
pub use fusion::{compress, fuse_with_maps, fused_out_components, fused_size_distribution, FusedEstimate, FusionOptions, HashedNetwork};
pub use generator::{generate, GeneratorConfig};
pub use hashing::{HashFamily, HashFunction, SuperNodeMap};
pub use matrix::{ComponentMatrix, Orientation};
pub use metrics::{accuracy, emd, summarize, SizeDistribution, Summary};
pub use network::{adjacent, load_events, Event, NodeId, TemporalNetwork};
pub use oracle::{all_components_oracle, si_oracle};
pub use sketch::{run_hll_average, run_hll_distribution, CardinalitySketch, SketchBank};
