//! The training graph: instances as vertices, labeled pairs as edges.
//!
//! A pairwise training set is a graph `G` on the instance indices. Two
//! examples are dependent exactly when their edges share an endpoint, so the
//! dependency structure of the training set is the line graph of `G`. The
//! maximum degree of `G` is the maximum instance frequency `rho`, the quantity
//! every generalization bound in [`crate::bounds`] is driven by.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("self-loop at vertex {index}: reflexive pairs carry no information")]
    SelfLoop { index: usize },
    #[error("duplicate edge ({i}, {j}): one example per pair")]
    DuplicateEdge { i: usize, j: usize },
    #[error("operation requires at least one edge")]
    EmptyGraph,
    #[error("n must be at least 1")]
    NoVertices,
    #[error("edge list parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Undirected simple graph over instance indices `0..n`.
///
/// Edges are normalized to `i < j`; the orientation in which a pair was
/// originally labeled is kept per edge so antisymmetric relations can be
/// re-evaluated on the ordered pair that was actually shown to the labeler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// `true` for edge `e` when the labeled pair was `(j, i)` rather than the
    /// normalized `(i, j)`.
    reversed: Vec<bool>,
}

impl TrainingGraph {
    /// Builds a validated graph from raw index pairs.
    ///
    /// Pairs are normalized to `i < j` with the original orientation recorded.
    /// Rejects out-of-range indices, self-loops and duplicate pairs (in either
    /// orientation: the converse of a labeled pair is inferred, never stored).
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut edges = Vec::with_capacity(pairs.len());
        let mut reversed = Vec::with_capacity(pairs.len());
        let mut seen = std::collections::HashSet::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for index in [a, b] {
                if index >= n {
                    return Err(GraphError::IndexOutOfRange { index, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { index: a });
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(GraphError::DuplicateEdge { i, j });
            }
            edges.push((i, j));
            reversed.push(a > b);
        }
        Ok(Self { n, edges, reversed })
    }

    /// Number of instances (vertices).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of training examples (edges).
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Normalized edges, `i < j`, in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Endpoints of edge `e` in the orientation the pair was labeled.
    pub fn labeled_pair(&self, e: usize) -> (usize, usize) {
        let (i, j) = self.edges[e];
        if self.reversed[e] {
            (j, i)
        } else {
            (i, j)
        }
    }

    /// Per-vertex degrees; their sum is exactly `2m` (handshaking).
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Maximum instance frequency `rho`: the maximum degree, 0 when edgeless.
    pub fn max_instance_frequency(&self) -> usize {
        self.degree_sequence().into_iter().max().unwrap_or(0)
    }

    /// Edge indices incident to each vertex, ascending within each list.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            inc[i].push(e);
            inc[j].push(e);
        }
        inc
    }

    /// Effective training size `m / rho` with its ingredients.
    ///
    /// For any regular graph this equals `n / 2`, the optimum over all graphs
    /// with the same degree sum.
    pub fn effective_training_size(&self) -> Result<EffectiveSize, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let m = self.m();
        let rho = self.max_instance_frequency();
        Ok(EffectiveSize {
            m,
            rho,
            n: self.n,
            ratio: m as f64 / rho as f64,
            mean_degree: 2.0 * m as f64 / self.n as f64,
        })
    }

    /// Line graph of `G`: one node per edge, adjacency = shared endpoint.
    ///
    /// Every independent set of the result is a matching of `G`, i.e. a set of
    /// mutually independent training examples.
    pub fn line_graph(&self) -> Result<LineGraph, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut adj = vec![Vec::new(); self.edges.len()];
        for incident in self.incidence() {
            // Two simple-graph edges share at most one endpoint, so each
            // adjacent pair is produced at exactly one vertex.
            for (a, &e1) in incident.iter().enumerate() {
                for &e2 in &incident[a + 1..] {
                    adj[e1].push(e2);
                    adj[e2].push(e1);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(LineGraph { adj })
    }
}

/// `m / rho` plus the quantities it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSize {
    pub m: usize,
    pub rho: usize,
    pub n: usize,
    pub ratio: f64,
    pub mean_degree: f64,
}

/// Dependency structure of the training set: the line graph of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineGraph {
    adj: Vec<Vec<usize>>,
}

impl LineGraph {
    /// Number of nodes (= number of source edges).
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Edge indices adjacent to edge-node `e`.
    pub fn neighbors(&self, e: usize) -> &[usize] {
        &self.adj[e]
    }

    pub fn degree(&self, e: usize) -> usize {
        self.adj[e].len()
    }
}

/// Reads the edge-list text format: one edge per line, `i j` or `i j y` with
/// `y` in `{-1, +1}`, 0-based indices, `#` comments. A comment of the exact
/// form `# n <count>` pins the vertex count; otherwise `n` is the largest
/// index plus one. Returns optional per-edge labels when any line carries one.
pub fn read_edge_list(text: &str) -> Result<(TrainingGraph, Option<Vec<i8>>), GraphError> {
    let mut pairs = Vec::new();
    let mut labels: Vec<Option<i8>> = Vec::new();
    let mut n_directive: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let toks: Vec<&str> = comment.split_whitespace().collect();
            if toks.len() == 2 && toks[0] == "n" {
                if let Ok(v) = toks[1].parse::<usize>() {
                    n_directive = Some(v);
                }
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(GraphError::Parse {
                line: lineno + 1,
                reason: format!("expected 'i j' or 'i j y', got {:?}", line),
            });
        }
        let parse_idx = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line: lineno + 1,
                reason: format!("bad vertex index {:?}", s),
            })
        };
        let i = parse_idx(toks[0])?;
        let j = parse_idx(toks[1])?;
        let label = if toks.len() == 3 {
            Some(match toks[2] {
                "1" | "+1" => 1i8,
                "-1" => -1i8,
                other => {
                    return Err(GraphError::Parse {
                        line: lineno + 1,
                        reason: format!("label must be -1 or +1, got {:?}", other),
                    })
                }
            })
        } else {
            None
        };
        pairs.push((i, j));
        labels.push(label);
    }
    let max_idx = pairs.iter().map(|&(i, j)| i.max(j)).max();
    let n = match (n_directive, max_idx) {
        (Some(n), _) => n,
        (None, Some(mx)) => mx + 1,
        (None, None) => {
            return Err(GraphError::Parse {
                line: 0,
                reason: "no edges and no '# n <count>' directive".into(),
            })
        }
    };
    let graph = TrainingGraph::from_edge_list(n, &pairs)?;
    let labels = if labels.iter().all(Option::is_none) {
        None
    } else if labels.iter().all(Option::is_some) {
        Some(labels.into_iter().map(Option::unwrap).collect())
    } else {
        return Err(GraphError::Parse {
            line: 0,
            reason: "either all or no edges must carry labels".into(),
        });
    };
    Ok((graph, labels))
}

/// Writes the edge-list text format; edges are emitted sorted by `(i, j)`.
///
/// `labels`, when given, must be per-edge in the graph's edge order and is
/// reordered together with the edges.
pub fn write_edge_list(graph: &TrainingGraph, labels: Option<&[i8]>) -> String {
    let mut order: Vec<usize> = (0..graph.m()).collect();
    order.sort_unstable_by_key(|&e| graph.edges()[e]);
    let mut out = String::new();
    let _ = writeln!(out, "# n {}", graph.n());
    for e in order {
        let (i, j) = graph.edges()[e];
        match labels {
            Some(ls) => {
                let _ = writeln!(out, "{} {} {:+}", i, j, ls[e]);
            }
            None => {
                let _ = writeln!(out, "{} {}", i, j);
            }
        }
    }
    out
}
