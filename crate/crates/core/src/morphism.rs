//! Monotone, color-preserving maps between graphs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Vertices go to vertices, each half-edge to a (possibly empty) path of
/// target half-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    pub source: Arc<Graph>,
    pub target: Arc<Graph>,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Vec<usize>>,
}

impl GraphMorphism {
    pub fn new(
        source: Graph,
        target: Graph,
        vertex_map: Vec<usize>,
        edge_map: Vec<Vec<usize>>,
    ) -> Self {
        Self::from_arcs(Arc::new(source), Arc::new(target), vertex_map, edge_map)
    }

    pub fn from_arcs(
        source: Arc<Graph>,
        target: Arc<Graph>,
        vertex_map: Vec<usize>,
        edge_map: Vec<Vec<usize>>,
    ) -> Self {
        GraphMorphism {
            source,
            target,
            vertex_map,
            edge_map,
        }
    }

    /// A combinatorial morphism given by one target half-edge per source half-edge.
    pub fn combinatorial(
        source: Arc<Graph>,
        target: Arc<Graph>,
        vertex_map: Vec<usize>,
        half: Vec<usize>,
    ) -> Self {
        let edge_map = half.into_iter().map(|h| vec![h]).collect();
        Self::from_arcs(source, target, vertex_map, edge_map)
    }

    pub fn identity(g: Arc<Graph>) -> Self {
        let vmap = (0..g.vertex_count).collect();
        let emap = (0..g.half_edge_count()).map(|e| vec![e]).collect();
        Self::from_arcs(g.clone(), g, vmap, emap)
    }

    pub fn violations(&self) -> Vec<String> {
        let (s, t) = (&*self.source, &*self.target);
        let mut out = Vec::new();
        if self.vertex_map.len() != s.vertex_count {
            out.push(format!(
                "vertex map has {} entries for {} vertices",
                self.vertex_map.len(),
                s.vertex_count
            ));
            return out;
        }
        if self.edge_map.len() != s.half_edge_count() {
            out.push(format!(
                "edge map has {} entries for {} half-edges",
                self.edge_map.len(),
                s.half_edge_count()
            ));
            return out;
        }
        for (v, &w) in self.vertex_map.iter().enumerate() {
            if w >= t.vertex_count {
                out.push(format!("vertex {v} maps to undeclared vertex {w}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for e in 0..s.half_edge_count() {
            let p = &self.edge_map[e];
            if p.iter().any(|&h| h >= t.half_edge_count()) {
                out.push(format!("half-edge {e} maps to an undeclared half-edge"));
                continue;
            }
            let start = self.vertex_map[s.origin(e)];
            let end = self.vertex_map[s.target(e)];
            if p.is_empty() {
                if start != end {
                    out.push(format!(
                        "half-edge {e} maps to the empty path between distinct vertices"
                    ));
                }
            } else {
                if t.origin(p[0]) != start || t.target(*p.last().unwrap()) != end {
                    out.push(format!("path of half-edge {e} has wrong endpoints"));
                }
                if p.windows(2).any(|w| t.target(w[0]) != t.origin(w[1])) {
                    out.push(format!("image of half-edge {e} is not a path"));
                }
                if p.iter().any(|&h| t.color[h] != s.color[e]) {
                    out.push(format!("image of half-edge {e} changes color"));
                }
            }
            let rev: Vec<usize> = p.iter().rev().map(|&h| t.inv(h)).collect();
            if self.edge_map[s.inv(e)] != rev {
                out.push(format!(
                    "half-edge {e} and its reverse have non-reverse images"
                ));
            }
        }
        out
    }

    pub fn is_combinatorial(&self) -> bool {
        self.edge_map.iter().all(|p| p.len() == 1)
    }

    /// Image half-edge of a combinatorial morphism.
    #[inline]
    pub fn image(&self, e: usize) -> usize {
        self.edge_map[e][0]
    }

    pub fn images(&self) -> Result<Vec<usize>> {
        if !self.is_combinatorial() {
            return Err(Error::NotCombinatorial);
        }
        Ok(self.edge_map.iter().map(|p| p[0]).collect())
    }

    /// Combinatorial and locally injective.
    pub fn is_immersion(&self) -> bool {
        if !self.is_combinatorial() {
            return false;
        }
        let s = &*self.source;
        let mut seen = std::collections::HashSet::new();
        (0..s.half_edge_count()).all(|e| seen.insert((s.origin(e), self.image(e))))
    }

    /// Combinatorial with injective vertex and edge maps.
    pub fn is_subgraph_embedding(&self) -> bool {
        if !self.is_combinatorial() {
            return false;
        }
        let mut vs = self.vertex_map.clone();
        vs.sort_unstable();
        let vdup = vs.windows(2).any(|w| w[0] == w[1]);
        let mut es: Vec<usize> = self.edge_map.iter().map(|p| p[0]).collect();
        es.sort_unstable();
        let edup = es.windows(2).any(|w| w[0] == w[1]);
        !vdup && !edup
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GraphMorphism) -> GraphMorphism {
        let vmap = self
            .vertex_map
            .iter()
            .map(|&v| other.vertex_map[v])
            .collect();
        let emap = self
            .edge_map
            .iter()
            .map(|p| {
                p.iter()
                    .flat_map(|&h| other.edge_map[h].iter().copied())
                    .collect()
            })
            .collect();
        GraphMorphism::from_arcs(self.source.clone(), other.target.clone(), vmap, emap)
    }

    /// Same map with a different (structurally equal) target handle.
    pub fn retarget(mut self, target: Arc<Graph>) -> Self {
        self.target = target;
        self
    }
}
