//! Subsampling regimes: which pairs get labeled.
//!
//! A labeler decides *which* pairs of instances to label while never seeing
//! the instance values, so the sampled pattern is just a graph on the
//! indices. The variants cover the canonical regimes: the complete graph,
//! the adversarial star (one instance in every example), the benign regular
//! graph, and the agnostic uniform draw over all graphs with exactly `m`
//! edges.

use crate::graph::{GraphError, TrainingGraph};
use crate::rng::rng_from_seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LabelerError {
    #[error("requested {m} pairs but only {available} are available")]
    TooManyPairs { m: usize, available: usize },
    #[error("no {k}-regular graph on {n} vertices exists (n*k is odd)")]
    ParityError { n: usize, k: usize },
    #[error("regular degree {k} must satisfy 1 <= k < n = {n}")]
    DegreeTooLarge { k: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Declarative description of a subsampling regime.
///
/// Serializes to `{"variant": ..., "n": ..., "k"?, "m"?, "seed"?, "edges"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct LabelerSpec {
    pub n: usize,
    pub variant: LabelerVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LabelerVariant {
    /// All `n(n-1)/2` pairs.
    Complete,
    /// Vertex 0 joined to vertices `1..=m`.
    Star { m: usize },
    /// Circulant k-regular graph.
    Regular { k: usize },
    /// Uniform draw over all graphs with exactly `m` edges.
    UniformWithoutReplacement { m: usize, seed: u64 },
    /// A fixed edge list.
    Explicit { edges: Vec<(usize, usize)> },
}

/// Flat serde representation, the on-disk JSON schema.
#[derive(Serialize, Deserialize)]
struct SpecRepr {
    variant: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize)>>,
}

impl TryFrom<SpecRepr> for LabelerSpec {
    type Error = String;

    fn try_from(r: SpecRepr) -> Result<Self, String> {
        let need = |field: Option<usize>, name: &str| {
            field.ok_or_else(|| format!("variant {:?} requires field {:?}", r.variant, name))
        };
        let variant = match r.variant.as_str() {
            "complete" => LabelerVariant::Complete,
            "star" => LabelerVariant::Star { m: need(r.m, "m")? },
            "regular" => LabelerVariant::Regular { k: need(r.k, "k")? },
            "uniform-without-replacement" => LabelerVariant::UniformWithoutReplacement {
                m: need(r.m, "m")?,
                seed: r
                    .seed
                    .ok_or("variant \"uniform-without-replacement\" requires field \"seed\"")?,
            },
            "explicit" => LabelerVariant::Explicit {
                edges: r
                    .edges
                    .ok_or("variant \"explicit\" requires field \"edges\"")?,
            },
            other => return Err(format!("unknown labeler variant {:?}", other)),
        };
        Ok(LabelerSpec { n: r.n, variant })
    }
}

impl From<LabelerSpec> for SpecRepr {
    fn from(s: LabelerSpec) -> SpecRepr {
        let (variant, k, m, seed, edges) = match s.variant {
            LabelerVariant::Complete => ("complete", None, None, None, None),
            LabelerVariant::Star { m } => ("star", None, Some(m), None, None),
            LabelerVariant::Regular { k } => ("regular", Some(k), None, None, None),
            LabelerVariant::UniformWithoutReplacement { m, seed } => (
                "uniform-without-replacement",
                None,
                Some(m),
                Some(seed),
                None,
            ),
            LabelerVariant::Explicit { edges } => ("explicit", None, None, None, Some(edges)),
        };
        SpecRepr {
            variant: variant.to_string(),
            n: s.n,
            k,
            m,
            seed,
            edges,
        }
    }
}

/// Realizes a labeler spec as a training graph. Deterministic given the spec
/// (the uniform variant carries its own seed).
pub fn sample_pairs(spec: &LabelerSpec) -> Result<TrainingGraph, LabelerError> {
    let n = spec.n;
    match &spec.variant {
        LabelerVariant::Complete => {
            let mut pairs = Vec::with_capacity(pair_count(n));
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
            Ok(TrainingGraph::from_edge_list(n, &pairs)?)
        }
        LabelerVariant::Star { m } => star_sample(n, *m),
        LabelerVariant::Regular { k } => regular_sample(n, *k),
        LabelerVariant::UniformWithoutReplacement { m, seed } => er_sample(n, *m, *seed),
        LabelerVariant::Explicit { edges } => Ok(TrainingGraph::from_edge_list(n, edges)?),
    }
}

/// Number of unordered pairs `C(n, 2)`.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Ranks the pair `(i, j)`, `i < j`, into `[0, C(n,2))` in row-major order of
/// the upper triangle. The inverse is [`unrank_pair`]; both sides are pinned
/// so edge files are reproducible across implementations.
pub fn rank_pair(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`rank_pair`].
pub fn unrank_pair(n: usize, rank: usize) -> (usize, usize) {
    debug_assert!(rank < pair_count(n));
    // Row start for vertex i is i*n - i*(i+1)/2; solve approximately by the
    // quadratic formula, then correct by at most a step or two.
    let nf = n as f64;
    let rf = rank as f64;
    let mut i = ((2.0 * nf - 1.0 - ((2.0 * nf - 1.0).powi(2) - 8.0 * rf).max(0.0).sqrt()) / 2.0)
        .floor() as usize;
    i = i.min(n - 2);
    while rank_pair(n, i, i + 1) > rank {
        i -= 1;
    }
    while i + 1 < n - 1 && rank_pair(n, i + 1, i + 2) <= rank {
        i += 1;
    }
    let j = rank - rank_pair(n, i, i + 1) + i + 1;
    (i, j)
}

/// Uniform draw over all graphs on `n` vertices with exactly `m` edges.
///
/// Samples `m` distinct pair ranks without replacement: rejection when the
/// request is sparse, a partial shuffle of all ranks when dense. Either way
/// every m-subset of pairs is equally likely. Edges come out sorted.
pub fn er_sample(n: usize, m: usize, seed: u64) -> Result<TrainingGraph, LabelerError> {
    let total = pair_count(n);
    if m > total {
        return Err(LabelerError::TooManyPairs {
            m,
            available: total,
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut ranks: Vec<usize> = if 2 * m <= total {
        let mut chosen = std::collections::HashSet::with_capacity(m);
        while chosen.len() < m {
            chosen.insert(rng.gen_range(0..total));
        }
        chosen.into_iter().collect()
    } else {
        let mut all: Vec<usize> = (0..total).collect();
        for i in 0..m {
            let j = rng.gen_range(i..total);
            all.swap(i, j);
        }
        all.truncate(m);
        all
    };
    ranks.sort_unstable();
    let pairs: Vec<(usize, usize)> = ranks.into_iter().map(|r| unrank_pair(n, r)).collect();
    Ok(TrainingGraph::from_edge_list(n, &pairs)?)
}

/// Circulant k-regular graph on `n` vertices: vertex `i` is joined to
/// `i +- 1, ..., i +- floor(k/2)` modulo `n`, plus the diameter offset `n/2`
/// when `k` is odd (which requires `n` even). `m = n*k/2`, `rho = k`.
pub fn regular_sample(n: usize, k: usize) -> Result<TrainingGraph, LabelerError> {
    if k == 0 || k >= n {
        return Err(LabelerError::DegreeTooLarge { k, n });
    }
    if n * k % 2 != 0 {
        return Err(LabelerError::ParityError { n, k });
    }
    let mut pairs = Vec::with_capacity(n * k / 2);
    for offset in 1..=(k / 2) {
        for i in 0..n {
            let j = (i + offset) % n;
            if i < j {
                pairs.push((i, j));
            } else {
                pairs.push((j, i));
            }
        }
    }
    if k % 2 == 1 {
        // k odd forces n even; the diameter offset contributes exactly one
        // edge per vertex.
        let half = n / 2;
        for i in 0..half {
            pairs.push((i, i + half));
        }
    }
    Ok(TrainingGraph::from_edge_list(n, &pairs)?)
}

/// Star: vertex 0 joined to `1..=m`, so one instance appears in every
/// example and `rho = m`.
pub fn star_sample(n: usize, m: usize) -> Result<TrainingGraph, LabelerError> {
    if m > n - 1 {
        return Err(LabelerError::TooManyPairs {
            m,
            available: n - 1,
        });
    }
    let pairs: Vec<(usize, usize)> = (1..=m).map(|j| (0, j)).collect();
    Ok(TrainingGraph::from_edge_list(n, &pairs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_unrank_is_a_bijection() {
        for n in 2..=12 {
            for rank in 0..pair_count(n) {
                let (i, j) = unrank_pair(n, rank);
                assert!(i < j && j < n);
                assert_eq!(rank_pair(n, i, j), rank);
            }
        }
        // row boundaries at a larger n, where the float inversion is coarsest
        let n = 5_000;
        for i in [0, 1, 997, 2_498, 4_997, 4_998] {
            for j in [i + 1, n - 1] {
                if i < j {
                    let rank = rank_pair(n, i, j);
                    assert_eq!(unrank_pair(n, rank), (i, j));
                }
            }
        }
    }

    #[test]
    fn complete_spec_yields_all_pairs() {
        let spec = LabelerSpec {
            n: 4,
            variant: LabelerVariant::Complete,
        };
        let g = sample_pairs(&spec).unwrap();
        assert_eq!(g.m(), 6);
    }

    #[test]
    fn explicit_spec_yields_given_edge() {
        let spec = LabelerSpec {
            n: 3,
            variant: LabelerVariant::Explicit {
                edges: vec![(0, 1)],
            },
        };
        let g = sample_pairs(&spec).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn er_zero_edges_is_empty() {
        let g = er_sample(5, 0, 9).unwrap();
        assert_eq!(g.m(), 0);
        assert_eq!(g.n(), 5);
    }

    #[test]
    fn er_full_m_gives_complete_graph() {
        for seed in [0, 1, 77] {
            let g = er_sample(5, 10, seed).unwrap();
            assert_eq!(g.m(), 10);
        }
    }

    #[test]
    fn er_rejects_too_many() {
        assert_eq!(
            er_sample(3, 4, 0).unwrap_err(),
            LabelerError::TooManyPairs { m: 4, available: 3 }
        );
    }

    #[test]
    fn er_is_deterministic_given_seed() {
        let a = er_sample(30, 60, 123).unwrap();
        let b = er_sample(30, 60, 123).unwrap();
        assert_eq!(a, b);
        let c = er_sample(30, 60, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn regular_sample_cycle() {
        let g = regular_sample(6, 2).unwrap();
        assert_eq!(g.m(), 6);
        assert!(g.degree_sequence().iter().all(|&d| d == 2));
    }

    #[test]
    fn regular_sample_parity_error() {
        assert_eq!(
            regular_sample(5, 3).unwrap_err(),
            LabelerError::ParityError { n: 5, k: 3 }
        );
    }

    #[test]
    fn regular_sample_k3_n4_is_complete() {
        let g = regular_sample(4, 3).unwrap();
        assert_eq!(g.m(), 6);
        assert!(g.degree_sequence().iter().all(|&d| d == 3));
    }

    #[test]
    fn regular_sample_odd_k_larger() {
        let g = regular_sample(8, 5).unwrap();
        assert_eq!(g.m(), 20);
        assert!(g.degree_sequence().iter().all(|&d| d == 5));
        assert_eq!(g.effective_training_size().unwrap().ratio, 4.0);
    }

    #[test]
    fn star_sample_degrees() {
        let g = star_sample(5, 4).unwrap();
        assert_eq!(g.degree_sequence(), vec![4, 1, 1, 1, 1]);
        let single = star_sample(2, 1).unwrap();
        assert_eq!(single.m(), 1);
        assert_eq!(
            star_sample(5, 5).unwrap_err(),
            LabelerError::TooManyPairs { m: 5, available: 4 }
        );
    }

    #[test]
    fn spec_json_round_trip() {
        let specs = vec![
            LabelerSpec {
                n: 4,
                variant: LabelerVariant::Complete,
            },
            LabelerSpec {
                n: 9,
                variant: LabelerVariant::Star { m: 3 },
            },
            LabelerSpec {
                n: 8,
                variant: LabelerVariant::Regular { k: 3 },
            },
            LabelerSpec {
                n: 10,
                variant: LabelerVariant::UniformWithoutReplacement { m: 12, seed: 7 },
            },
            LabelerSpec {
                n: 3,
                variant: LabelerVariant::Explicit {
                    edges: vec![(0, 2)],
                },
            },
        ];
        for spec in specs {
            let json = serde_json::to_string(&spec).unwrap();
            let back: LabelerSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back);
        }
        let parsed: LabelerSpec =
            serde_json::from_str(r#"{"variant":"star","n":6,"m":2}"#).unwrap();
        assert_eq!(parsed.variant, LabelerVariant::Star { m: 2 });
        assert!(serde_json::from_str::<LabelerSpec>(r#"{"variant":"star","n":6}"#).is_err());
        assert!(serde_json::from_str::<LabelerSpec>(r#"{"variant":"popular","n":6}"#).is_err());
    }
}
