//! Synthetic instances, ground-truth relations and pair feature maps.
//!
//! Instances live in the unit ball so every feature mode has an exact,
//! certified norm bound `B`: 2 for the symmetric absolute difference and the
//! antisymmetric difference, 1 for the elementwise product. The two relation
//! families are an equivalence (nearest canonical center) and a total order
//! (projection onto a direction), each reflexive and respectively symmetric
//! or antisymmetric.

use crate::graph::{GraphError, TrainingGraph};
use crate::rng::rng_from_seed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RelationsError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("feature dimensions differ: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("graph has {graph_n} vertices but {instances} instances were given")]
    SizeMismatch { graph_n: usize, instances: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad dataset directory: {0}")]
    BadDirectory(String),
}

/// A feature vector scaled into the Euclidean unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    features: Vec<f64>,
}

impl Instance {
    /// Validates entries and rescales onto the unit sphere when the norm
    /// exceeds 1; points already inside the ball are kept exactly.
    pub fn new(features: Vec<f64>) -> Result<Self, RelationsError> {
        if features.is_empty() {
            return Err(RelationsError::BadParams("empty feature vector".into()));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(RelationsError::BadParams("non-finite feature".into()));
        }
        let norm = norm(&features);
        let features = if norm > 1.0 {
            features.iter().map(|x| x / norm).collect()
        } else {
            features
        };
        Ok(Self { features })
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Instance distribution over the unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceDist {
    /// Equal-weight mixture of `clusters` isotropic Gaussians centered at
    /// [`canonical_centers`]. `spread` is the per-coordinate deviation.
    GaussianMixture { clusters: usize, spread: f64 },
    /// Uniform on the cube `[-1/sqrt(d), 1/sqrt(d)]^d` (inside the ball).
    UniformCube,
}

/// Deterministic mixture centers: for `d = 1` evenly spaced in `[-1, 1]`,
/// otherwise evenly spaced on the unit circle of the first two coordinates.
pub fn canonical_centers(clusters: usize, d: usize) -> Vec<Vec<f64>> {
    (0..clusters)
        .map(|c| {
            let mut center = vec![0.0; d];
            if d == 1 {
                center[0] = if clusters == 1 {
                    0.0
                } else {
                    -1.0 + 2.0 * c as f64 / (clusters - 1) as f64
                };
            } else {
                let theta = 2.0 * std::f64::consts::PI * c as f64 / clusters as f64;
                center[0] = theta.cos();
                center[1] = theta.sin();
            }
            center
        })
        .collect()
}

/// Draws `n` i.i.d. instances of dimension `d`. A sample needs at least two
/// instances to form a pair.
pub fn sample_instances(
    dist: &InstanceDist,
    n: usize,
    d: usize,
    seed: u64,
) -> Result<Vec<Instance>, RelationsError> {
    if n < 2 || d < 1 {
        return Err(RelationsError::BadParams(format!(
            "need n >= 2 and d >= 1, got n = {n}, d = {d}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| draw_instance(dist, d, &mut rng)).collect()
}

/// One draw from the distribution; exposed so risk estimators can sample
/// fresh pairs from the same stream.
pub fn draw_instance(
    dist: &InstanceDist,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Instance, RelationsError> {
    match dist {
        InstanceDist::GaussianMixture { clusters, spread } => {
            if *clusters == 0 {
                return Err(RelationsError::BadParams("clusters must be >= 1".into()));
            }
            if !spread.is_finite() || *spread < 0.0 {
                return Err(RelationsError::BadParams("spread must be >= 0".into()));
            }
            let centers = canonical_centers(*clusters, d);
            let which = rng.gen_range(0..*clusters);
            let features: Vec<f64> = centers[which]
                .iter()
                .map(|&c| c + spread * standard_normal(rng))
                .collect();
            Instance::new(features)
        }
        InstanceDist::UniformCube => {
            let half = 1.0 / (d as f64).sqrt();
            let features: Vec<f64> = (0..d).map(|_| rng.gen_range(-half..=half)).collect();
            Instance::new(features)
        }
    }
}

/// Box-Muller; two uniforms per normal keeps the stream layout obvious.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Ground-truth relation: either an equivalence (same nearest center) or a
/// total order (score comparison along a direction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RelationSpec {
    Equivalence { centers: Vec<Vec<f64>> },
    TotalOrder { direction: Vec<f64> },
}

impl RelationSpec {
    /// Equivalence induced by the canonical centers of a mixture.
    pub fn equivalence_from_mixture(clusters: usize, d: usize) -> Self {
        RelationSpec::Equivalence {
            centers: canonical_centers(clusters, d),
        }
    }

    /// Total order along the first coordinate axis.
    pub fn order_along_first_axis(d: usize) -> Self {
        let mut direction = vec![0.0; d];
        direction[0] = 1.0;
        RelationSpec::TotalOrder { direction }
    }

    /// Cluster id of an instance: nearest center, lowest index on ties.
    pub fn cluster_of(&self, x: &Instance) -> Option<usize> {
        match self {
            RelationSpec::Equivalence { centers } => {
                let mut best = (f64::INFINITY, 0usize);
                for (idx, c) in centers.iter().enumerate() {
                    let d2: f64 = c
                        .iter()
                        .zip(x.features())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d2 < best.0 {
                        best = (d2, idx);
                    }
                }
                Some(best.1)
            }
            RelationSpec::TotalOrder { .. } => None,
        }
    }
}

/// Evaluates the relation on an ordered pair: +1 when it holds, -1 otherwise.
///
/// Equivalence holds when both instances have the same cluster; the total
/// order holds when `score(x) <= score(x')`, so ties are labeled +1 in both
/// directions, consistent with reflexivity.
pub fn relation_label(rel: &RelationSpec, x: &Instance, x_prime: &Instance) -> i8 {
    match rel {
        RelationSpec::Equivalence { .. } => {
            if rel.cluster_of(x) == rel.cluster_of(x_prime) {
                1
            } else {
                -1
            }
        }
        RelationSpec::TotalOrder { direction } => {
            if dot(direction, x.features()) <= dot(direction, x_prime.features()) {
                1
            } else {
                -1
            }
        }
    }
}

/// How an ordered pair is embedded for the linear learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureMode {
    /// `|x - x'|` elementwise; symmetric, `B = 2`.
    SymmetricAbsdiff,
    /// `x * x'` elementwise; symmetric, `B = 1`.
    SymmetricProduct,
    /// `x - x'`; antisymmetric, `B = 2`.
    AntisymmetricDiff,
}

impl FeatureMode {
    /// Exact bound on the pair-feature norm for unit-ball instances.
    pub fn norm_bound(self) -> f64 {
        match self {
            FeatureMode::SymmetricAbsdiff => 2.0,
            FeatureMode::SymmetricProduct => 1.0,
            FeatureMode::AntisymmetricDiff => 2.0,
        }
    }
}

/// Pair feature map for the ordered pair `(x, x')`.
pub fn pair_feature_map(
    x: &Instance,
    x_prime: &Instance,
    mode: FeatureMode,
) -> Result<Vec<f64>, RelationsError> {
    if x.dim() != x_prime.dim() {
        return Err(RelationsError::DimMismatch {
            left: x.dim(),
            right: x_prime.dim(),
        });
    }
    let a = x.features();
    let b = x_prime.features();
    let phi = match mode {
        FeatureMode::SymmetricAbsdiff => a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect(),
        FeatureMode::SymmetricProduct => a.iter().zip(b).map(|(x, y)| x * y).collect(),
        FeatureMode::AntisymmetricDiff => a.iter().zip(b).map(|(x, y)| x - y).collect(),
    };
    Ok(phi)
}

/// A labeled pairwise training set: instances, the training graph, per-edge
/// labels, and the cached pair features in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub instances: Vec<Instance>,
    pub graph: TrainingGraph,
    pub labels: Vec<i8>,
    pub feature_mode: FeatureMode,
    pub norm_bound: f64,
    features: Vec<f64>, // m x dim, row-major
    dim: usize,
}

impl PairDataset {
    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Pair features of edge `e`, computed on the orientation that was
    /// labeled.
    pub fn feature_row(&self, e: usize) -> &[f64] {
        &self.features[e * self.dim..(e + 1) * self.dim]
    }

    /// Trace of the linear-kernel Gram matrix: the sum of squared pair-feature
    /// norms. At most `m * B^2` by the norm bound.
    pub fn gram_trace(&self) -> f64 {
        self.features.iter().map(|x| x * x).sum()
    }
}

/// Labels every edge of `g` by re-evaluating the relation on the ordered pair
/// that was labeled, and caches the pair features.
pub fn build_dataset(
    instances: Vec<Instance>,
    graph: TrainingGraph,
    rel: &RelationSpec,
    mode: FeatureMode,
) -> Result<PairDataset, RelationsError> {
    if graph.n() != instances.len() {
        return Err(RelationsError::SizeMismatch {
            graph_n: graph.n(),
            instances: instances.len(),
        });
    }
    let dim = instances.first().map(Instance::dim).unwrap_or(0);
    if instances.iter().any(|x| x.dim() != dim) {
        return Err(RelationsError::BadParams(
            "instances have mixed dimensions".into(),
        ));
    }
    let mut labels = Vec::with_capacity(graph.m());
    let mut features = Vec::with_capacity(graph.m() * dim);
    for e in 0..graph.m() {
        let (a, b) = graph.labeled_pair(e);
        labels.push(relation_label(rel, &instances[a], &instances[b]));
        features.extend(pair_feature_map(&instances[a], &instances[b], mode)?);
    }
    Ok(PairDataset {
        norm_bound: mode.norm_bound(),
        instances,
        graph,
        labels,
        feature_mode: mode,
        features,
        dim,
    })
}

#[derive(Serialize, Deserialize)]
struct DatasetMeta {
    feature_mode: FeatureMode,
    norm_bound: f64,
    relation: RelationSpec,
    /// Edge indices (in the sorted edges.txt order) whose labeled orientation
    /// was the reverse of the normalized `i < j` pair. The edge-list format
    /// itself is orientation-free.
    reversed_edges: Vec<usize>,
}

impl PairDataset {
    /// Writes `instances.csv`, `edges.txt` and `meta.json` into `dir`.
    pub fn save_dir(&self, rel: &RelationSpec, dir: &Path) -> Result<(), RelationsError> {
        std::fs::create_dir_all(dir)?;
        let mut csv = String::new();
        for inst in &self.instances {
            let row: Vec<String> = inst.features().iter().map(|x| format!("{x}")).collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        std::fs::write(dir.join("instances.csv"), csv)?;

        // Re-sort edges (with their labels and orientations) into the order
        // the writer emits, so all three files agree positionally.
        let mut order: Vec<usize> = (0..self.graph.m()).collect();
        order.sort_unstable_by_key(|&e| self.graph.edges()[e]);
        let oriented: Vec<(usize, usize)> =
            order.iter().map(|&e| self.graph.labeled_pair(e)).collect();
        let labels: Vec<i8> = order.iter().map(|&e| self.labels[e]).collect();
        let sorted_graph = TrainingGraph::from_edge_list(self.graph.n(), &oriented)?;
        std::fs::write(
            dir.join("edges.txt"),
            crate::graph::write_edge_list(&sorted_graph, Some(&labels)),
        )?;

        let reversed_edges: Vec<usize> = oriented
            .iter()
            .enumerate()
            .filter_map(|(e, &(a, b))| (a > b).then_some(e))
            .collect();
        let meta = DatasetMeta {
            feature_mode: self.feature_mode,
            norm_bound: self.norm_bound,
            relation: rel.clone(),
            reversed_edges,
        };
        std::fs::write(
            dir.join("meta.json"),
            serde_json::to_string_pretty(&meta)
                .map_err(|e| RelationsError::BadDirectory(format!("meta serialization: {e}")))?,
        )?;
        Ok(())
    }

    /// Reads a directory written by [`PairDataset::save_dir`], rebuilding the
    /// dataset and verifying the stored labels against a re-evaluation of the
    /// relation.
    pub fn load_dir(dir: &Path) -> Result<(PairDataset, RelationSpec), RelationsError> {
        let meta: DatasetMeta =
            serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json"))?)
                .map_err(|e| RelationsError::BadDirectory(format!("meta.json: {e}")))?;
        let mut instances = Vec::new();
        for (lineno, line) in std::fs::read_to_string(dir.join("instances.csv"))?
            .lines()
            .enumerate()
        {
            if line.trim().is_empty() {
                continue;
            }
            let features: Result<Vec<f64>, _> = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect();
            let features = features.map_err(|e| {
                RelationsError::BadDirectory(format!("instances.csv line {}: {e}", lineno + 1))
            })?;
            instances.push(Instance::new(features)?);
        }
        let (graph, labels) =
            crate::graph::read_edge_list(&std::fs::read_to_string(dir.join("edges.txt"))?)?;
        let stored = labels
            .ok_or_else(|| RelationsError::BadDirectory("edges.txt carries no labels".into()))?;
        // Restore labeled orientations recorded in the metadata.
        let mut pairs: Vec<(usize, usize)> = graph.edges().to_vec();
        for &e in &meta.reversed_edges {
            if e >= pairs.len() {
                return Err(RelationsError::BadDirectory(format!(
                    "reversed edge index {e} out of range"
                )));
            }
            pairs[e] = (pairs[e].1, pairs[e].0);
        }
        let graph = TrainingGraph::from_edge_list(graph.n(), &pairs)?;
        let dataset = build_dataset(instances, graph, &meta.relation, meta.feature_mode)?;
        if dataset.labels != stored {
            return Err(RelationsError::BadDirectory(
                "stored labels disagree with relation re-evaluation".into(),
            ));
        }
        Ok((dataset, meta.relation))
    }
}
