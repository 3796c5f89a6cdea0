//! Matchings and pruning to a regular subgraph.
//!
//! Pruning a training graph to a k-regular subgraph trades examples for a
//! better effective training size `m / rho`. The exact problem is NP-hard for
//! general k; here k = 1 is solved exactly via maximum matching and k >= 2 by
//! a peel-and-trim heuristic whose output is always verified to be k-regular
//! on its surviving vertices.

use crate::graph::{GraphError, TrainingGraph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PruneError {
    #[error("k must be at least 1")]
    ZeroDegree,
    #[error("requested degree {k} exceeds the maximum degree {max_degree}")]
    InfeasibleDegree { k: usize, max_degree: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What pruning kept and discarded. Vertex indices are those of the input
/// graph; isolated vertices stay in the index space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneReport {
    /// Vertices with degree exactly `k` in the pruned graph.
    pub surviving_vertices: Vec<usize>,
    /// Edges of the input graph that were removed.
    pub discarded_edges: Vec<(usize, usize)>,
    /// True when every vertex of the input graph survived, i.e. the result is
    /// a k-factor.
    pub spanning: bool,
}

/// Maximum matching via Edmonds' blossom algorithm.
///
/// Returns `mate[v] = Some(u)` for matched pairs. Deterministic: free
/// vertices are tried in index order and neighbor scans are ordered, so ties
/// resolve toward lower indices.
pub fn maximum_matching(g: &TrainingGraph) -> Vec<Option<usize>> {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in g.edges() {
        adj[i].push(j);
        adj[j].push(i);
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    const NONE: usize = usize::MAX;
    let mut mate = vec![NONE; n];
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut in_queue = vec![false; n];
    let mut in_blossom = vec![false; n];

    // Least common ancestor of the bases of v and w in the alternating tree.
    let lca = |v: usize, w: usize, parent: &[usize], base: &[usize], mate: &[usize]| -> usize {
        let mut mark = vec![false; n];
        let mut x = v;
        loop {
            x = base[x];
            mark[x] = true;
            if mate[x] == NONE {
                break;
            }
            x = parent[mate[x]];
        }
        let mut y = w;
        loop {
            y = base[y];
            if mark[y] {
                return y;
            }
            y = parent[mate[y]];
        }
    };

    // Walks from v up to blossom base b, marking blossom membership and
    // setting parents so the contracted cycle can be traversed both ways.
    #[allow(clippy::too_many_arguments)]
    fn mark_path(
        mut v: usize,
        b: usize,
        mut child: usize,
        parent: &mut [usize],
        base: &mut [usize],
        mate: &[usize],
        in_blossom: &mut [bool],
    ) {
        while base[v] != b {
            in_blossom[base[v]] = true;
            in_blossom[base[mate[v]]] = true;
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    }

    let find_augmenting_path = |root: usize,
                                mate: &mut Vec<usize>,
                                parent: &mut Vec<usize>,
                                base: &mut Vec<usize>,
                                in_queue: &mut Vec<bool>,
                                in_blossom: &mut Vec<bool>|
     -> usize {
        for v in 0..n {
            parent[v] = NONE;
            base[v] = v;
            in_queue[v] = false;
        }
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(root);
        in_queue[root] = true;
        while let Some(v) = queue.pop_front() {
            for &to in &adj[v] {
                if base[v] == base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                    // Odd cycle: contract the blossom rooted at the LCA.
                    let b = lca(v, to, parent, base, mate);
                    in_blossom.iter_mut().for_each(|x| *x = false);
                    mark_path(v, b, to, parent, base, mate, in_blossom);
                    mark_path(to, b, v, parent, base, mate, in_blossom);
                    for x in 0..n {
                        if in_blossom[base[x]] {
                            base[x] = b;
                            if !in_queue[x] {
                                in_queue[x] = true;
                                queue.push_back(x);
                            }
                        }
                    }
                } else if parent[to] == NONE {
                    parent[to] = v;
                    if mate[to] == NONE {
                        return to; // augmenting path found
                    }
                    in_queue[mate[to]] = true;
                    queue.push_back(mate[to]);
                }
            }
        }
        NONE
    };

    for root in 0..n {
        if mate[root] != NONE {
            continue;
        }
        let endpoint = find_augmenting_path(
            root,
            &mut mate,
            &mut parent,
            &mut base,
            &mut in_queue,
            &mut in_blossom,
        );
        // Flip matched/unmatched edges along the path back to the root.
        let mut v = endpoint;
        while v != NONE {
            let pv = parent[v];
            let ppv = if pv == NONE { NONE } else { mate[pv] };
            mate[v] = pv;
            if pv != NONE {
                mate[pv] = v;
            }
            v = ppv;
        }
    }

    mate.into_iter()
        .map(|m| if m == NONE { None } else { Some(m) })
        .collect()
}

/// Prunes `g` to a subgraph in which every surviving vertex has degree
/// exactly `k`.
///
/// `k = 1` keeps a maximum matching (exact). `k >= 2` peels vertices of
/// degree below `k` and trims excess edges until all degrees are `0` or `k`;
/// this is a heuristic, so the result being spanning is reported, not
/// guaranteed. The post-condition (all surviving degrees equal `k`) always
/// holds; the result may be empty when no k-regular subgraph exists.
pub fn prune_to_regular(
    g: &TrainingGraph,
    k: usize,
) -> Result<(TrainingGraph, PruneReport), PruneError> {
    if k == 0 {
        return Err(PruneError::ZeroDegree);
    }
    let max_degree = g.max_instance_frequency();
    if k > max_degree {
        return Err(PruneError::InfeasibleDegree { k, max_degree });
    }

    let kept: Vec<bool> = if k == 1 {
        let mate = maximum_matching(g);
        g.edges().iter().map(|&(i, j)| mate[i] == Some(j)).collect()
    } else {
        peel_and_trim(g, k)
    };

    let kept_edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .zip(&kept)
        .filter_map(|(&e, &keep)| keep.then_some(e))
        .collect();
    let discarded_edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .zip(&kept)
        .filter_map(|(&e, &keep)| (!keep).then_some(e))
        .collect();
    let pruned = TrainingGraph::from_edge_list(g.n(), &kept_edges)?;
    let degrees = pruned.degree_sequence();
    debug_assert!(degrees.iter().all(|&d| d == 0 || d == k));
    let surviving_vertices: Vec<usize> = degrees
        .iter()
        .enumerate()
        .filter_map(|(v, &d)| (d == k).then_some(v))
        .collect();
    let spanning = surviving_vertices.len() == g.n();
    Ok((
        pruned,
        PruneReport {
            surviving_vertices,
            discarded_edges,
            spanning,
        },
    ))
}

/// Alternately removes edges at vertices that can no longer reach degree k
/// (peel) and at vertices above degree k (trim) until every degree is 0 or k.
/// Ties break toward the lowest vertex / neighbor index.
fn peel_and_trim(g: &TrainingGraph, k: usize) -> Vec<bool> {
    let m = g.m();
    let mut kept = vec![true; m];
    let mut deg = g.degree_sequence();
    let incidence = g.incidence();

    let drop_edge = |e: usize, kept: &mut Vec<bool>, deg: &mut Vec<usize>| {
        kept[e] = false;
        let (i, j) = g.edges()[e];
        deg[i] -= 1;
        deg[j] -= 1;
    };

    loop {
        // Peel: a vertex with 0 < deg < k cannot be k-regular; empty it.
        let mut peeled = true;
        while peeled {
            peeled = false;
            for v in 0..g.n() {
                if deg[v] > 0 && deg[v] < k {
                    for &e in &incidence[v] {
                        if kept[e] {
                            drop_edge(e, &mut kept, &mut deg);
                        }
                    }
                    peeled = true;
                }
            }
        }
        // Trim: remove one edge between two over-degree vertices if possible,
        // otherwise any edge at the lowest over-degree vertex.
        let over = (0..g.n()).find(|&v| deg[v] > k);
        let Some(v) = over else { break };
        let candidate = incidence[v]
            .iter()
            .copied()
            .filter(|&e| kept[e])
            .find(|&e| {
                let (i, j) = g.edges()[e];
                let other = if i == v { j } else { i };
                deg[other] > k
            })
            .or_else(|| incidence[v].iter().copied().find(|&e| kept[e]));
        drop_edge(
            candidate.expect("over-degree vertex has an edge"),
            &mut kept,
            &mut deg,
        );
    }
    kept
}
