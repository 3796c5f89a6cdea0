//! Dependency-graph analysis and generalization bounds for learning binary
//! relations from pairwise examples.
//!
//! A pairwise training set is represented as a graph on the instances
//! ([`graph`]); its dependency structure is the line graph, partitioned into
//! independent classes by proper edge coloring ([`coloring`]). Subsampling
//! regimes live in [`labeler`], synthetic relation data in [`relations`], a
//! regularized pairwise classifier in [`learner`], and every closed-form risk
//! bound in [`bounds`].

/// Crate version, embedded in experiment artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bounds;
pub mod coloring;
pub mod graph;
pub mod labeler;
pub mod learner;
pub mod matching;
pub mod relations;
pub mod rng;

pub use coloring::{dependency_partition, edge_coloring, DependencyPartition};
pub use graph::{
    read_edge_list, write_edge_list, EffectiveSize, GraphError, LineGraph, TrainingGraph,
};
pub use labeler::{
    er_sample, regular_sample, sample_pairs, star_sample, LabelerSpec, LabelerVariant,
};
pub use matching::{maximum_matching, prune_to_regular, PruneReport};
pub use relations::{
    build_dataset, pair_feature_map, relation_label, sample_instances, FeatureMode, Instance,
    InstanceDist, PairDataset, RelationSpec,
};
