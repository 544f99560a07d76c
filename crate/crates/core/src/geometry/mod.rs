//! Partition of Ω into cells, hole placement and the layer census.

mod census;
mod partition;
mod placement;

pub use census::{layer_census, LayerCensus, LayerEntry};
pub use partition::{partition_domain, partition_domain_with, Cell, CellPartition, PartitionMode};
pub use placement::{min_pair_distance, place_holes, BodySpec, Hole, ScattererSet};
