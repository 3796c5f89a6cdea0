//! Proper edge coloring of the training graph.
//!
//! A proper edge coloring of `G` is a proper vertex coloring of its line
//! graph, so the color classes partition the training set into groups of
//! mutually independent examples (each class is a matching). The Misra-Gries
//! construction guarantees at most `max_degree + 1` colors in polynomial time,
//! which makes the `rho + 1` chromatic bound constructive.

use crate::graph::{GraphError, TrainingGraph};
use serde::{Deserialize, Serialize};

/// A proper edge coloring: `color_of[e]` is the color of edge `e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyPartition {
    pub color_of: Vec<usize>,
    pub num_colors: usize,
}

impl DependencyPartition {
    /// Color classes as explicit edge-index sets, ascending within each class.
    /// Classes are disjoint, cover all edges, and each is a matching.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (e, &c) in self.color_of.iter().enumerate() {
            classes[c].push(e);
        }
        classes
    }

    /// Checks properness against the source graph: no two edges sharing a
    /// vertex may have the same color.
    pub fn is_proper(&self, graph: &TrainingGraph) -> bool {
        if self.color_of.len() != graph.m() {
            return false;
        }
        for incident in graph.incidence() {
            let mut seen = std::collections::HashSet::new();
            for &e in &incident {
                if !seen.insert(self.color_of[e]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Colors the edges of `g` with at most `max_degree + 1` colors (Misra-Gries).
///
/// Deterministic: edges are processed in index order and the lowest free
/// color always wins.
pub fn edge_coloring(g: &TrainingGraph) -> Result<DependencyPartition, GraphError> {
    if g.m() == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut mg = MisraGries::new(g);
    mg.run();
    let color_of: Vec<usize> = mg.color.into_iter().map(Option::unwrap).collect();
    let num_colors = color_of.iter().max().unwrap() + 1;
    let partition = DependencyPartition {
        color_of,
        num_colors,
    };
    debug_assert!(partition.is_proper(g));
    debug_assert!(num_colors <= g.max_instance_frequency() + 1);
    Ok(partition)
}

/// Color classes of [`edge_coloring`] as explicit sets.
pub fn dependency_partition(g: &TrainingGraph) -> Result<Vec<Vec<usize>>, GraphError> {
    Ok(edge_coloring(g)?.classes())
}

struct MisraGries<'a> {
    g: &'a TrainingGraph,
    /// Incident edge ids per vertex, ascending.
    incident: Vec<Vec<usize>>,
    /// Assigned color per edge.
    color: Vec<Option<usize>>,
    /// `at[v][c]` = edge at `v` carrying color `c`, if any. Width is
    /// `max_degree + 1`, the full palette.
    at: Vec<Vec<Option<usize>>>,
}

impl<'a> MisraGries<'a> {
    fn new(g: &'a TrainingGraph) -> Self {
        let incident = g.incidence();
        let palette = incident.iter().map(Vec::len).max().unwrap_or(0) + 1;
        MisraGries {
            g,
            incident,
            color: vec![None; g.m()],
            at: vec![vec![None; palette]; g.n()],
        }
    }

    fn other_endpoint(&self, e: usize, v: usize) -> usize {
        let (i, j) = self.g.edges()[e];
        if i == v {
            j
        } else {
            i
        }
    }

    fn free_color(&self, v: usize) -> usize {
        // deg(v) <= palette - 1, so a free color always exists.
        self.at[v].iter().position(Option::is_none).unwrap()
    }

    fn is_free(&self, v: usize, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    /// Recolors a set of distinct edges atomically: all old colors are
    /// cleared before any new one is written, so edges exchanging colors at
    /// a shared vertex never clobber each other's table slots.
    fn batch_recolor(&mut self, assignments: &[(usize, usize)]) {
        for &(e, _) in assignments {
            if let Some(old) = self.color[e] {
                let (i, j) = self.g.edges()[e];
                self.at[i][old] = None;
                self.at[j][old] = None;
                self.color[e] = None;
            }
        }
        for &(e, c) in assignments {
            let (i, j) = self.g.edges()[e];
            self.color[e] = Some(c);
            self.at[i][c] = Some(e);
            self.at[j][c] = Some(e);
        }
    }

    /// Maximal fan of `u` starting with edge `e0 = (u, v0)`: a sequence of
    /// distinct colored edges at `u` where each edge's color is free at the
    /// previous fan vertex. Returns the fan's edges.
    fn maximal_fan(&self, u: usize, e0: usize, v0: usize) -> Vec<usize> {
        let mut fan = vec![e0];
        let mut last_vertex = v0;
        let mut used = vec![false; self.incident[u].len()];
        loop {
            let mut extended = false;
            for (idx, &e) in self.incident[u].iter().enumerate() {
                if used[idx] || e == e0 {
                    continue;
                }
                if let Some(c) = self.color[e] {
                    if self.is_free(last_vertex, c) {
                        used[idx] = true;
                        fan.push(e);
                        last_vertex = self.other_endpoint(e, u);
                        extended = true;
                        break;
                    }
                }
            }
            if !extended {
                return fan;
            }
        }
    }

    /// Longest path from `u` whose edge colors alternate `c, d, c, ...`
    /// starting with `c`. Colors are proper, so the path is unique.
    fn alternating_path(&self, u: usize, c: usize, d: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut vertex = u;
        let mut want = c;
        while let Some(e) = self.at[vertex][want] {
            path.push(e);
            vertex = self.other_endpoint(e, vertex);
            want = if want == c { d } else { c };
        }
        path
    }

    fn invert_path(&mut self, path: &[usize], c: usize, d: usize) {
        let flips: Vec<(usize, usize)> = path
            .iter()
            .map(|&e| {
                let old = self.color[e].unwrap();
                (e, if old == c { d } else { c })
            })
            .collect();
        self.batch_recolor(&flips);
    }

    fn run(&mut self) {
        for e in 0..self.g.m() {
            let (u, v) = self.g.edges()[e];
            let fan = self.maximal_fan(u, e, v);
            let c = self.free_color(u);
            let last_vertex = self.other_endpoint(*fan.last().unwrap(), u);
            let d = self.free_color(last_vertex);
            // Invert the cd path from u so that d becomes free at u.
            let path = self.alternating_path(u, d, c);
            self.invert_path(&path, c, d);
            // First fan prefix whose tip now has d free; rotate it.
            let mut w = 0;
            for (idx, &fe) in fan.iter().enumerate() {
                let tip = self.other_endpoint(fe, u);
                if self.is_free(tip, d) {
                    w = idx;
                    break;
                }
            }
            let mut rotation: Vec<(usize, usize)> = (1..=w)
                .map(|idx| (fan[idx - 1], self.color[fan[idx]].unwrap()))
                .collect();
            rotation.push((fan[w], d));
            self.batch_recolor(&rotation);
        }
    }
}
