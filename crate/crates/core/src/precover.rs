//! Precovers (combinatorial immersions) and fiber products.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fold;
use crate::graph::Graph;
use crate::iso::{self, Isomorphism};
use crate::morphism::GraphMorphism;

#[derive(Clone, Debug)]
pub struct Precover {
    pub map: GraphMorphism,
    pub basepoint: Option<usize>,
}

impl Precover {
    pub fn new(map: GraphMorphism) -> Result<Self> {
        if !map.is_combinatorial() {
            return Err(Error::NotCombinatorial);
        }
        if !map.is_immersion() {
            return Err(Error::InvalidMorphism("not locally injective".into()));
        }
        Ok(Precover {
            map,
            basepoint: None,
        })
    }

    pub fn based(map: GraphMorphism, basepoint: usize) -> Result<Self> {
        let mut p = Self::new(map)?;
        if basepoint >= p.graph().vertex_count {
            return Err(Error::InvalidArgument(format!("no vertex {basepoint}")));
        }
        p.basepoint = Some(basepoint);
        Ok(p)
    }

    /// Skips the immersion check. For maps known to be immersions.
    pub(crate) fn trusted(map: GraphMorphism) -> Self {
        debug_assert!(map.is_immersion());
        Precover {
            map,
            basepoint: None,
        }
    }

    pub fn identity(g: Arc<Graph>) -> Self {
        Precover::trusted(GraphMorphism::identity(g))
    }

    pub fn graph(&self) -> &Graph {
        &self.map.source
    }

    pub fn target(&self) -> &Arc<Graph> {
        &self.map.target
    }

    /// Image half-edges, the labels used for isomorphism over the target.
    pub fn labels(&self) -> Vec<u64> {
        self.map.edge_map.iter().map(|p| p[0] as u64).collect()
    }

    pub fn rank(&self) -> Result<i64> {
        self.graph().euler_rank()
    }

    /// Unbased isomorphism commuting with the maps to the common target.
    pub fn isomorphism_over(&self, other: &Precover) -> Option<Isomorphism> {
        if self.target() != other.target() {
            return None;
        }
        iso::isomorphism(self.graph(), &self.labels(), other.graph(), &other.labels())
    }

    pub fn invariant(&self) -> u64 {
        iso::invariant(self.graph(), &self.labels())
    }

    /// Postcomposes with a combinatorial map of the target.
    pub fn push(&self, f: &GraphMorphism) -> Result<Precover> {
        let map = self.map.then(f);
        let p = Precover::new(map)?;
        Ok(Precover {
            basepoint: self.basepoint,
            ..p
        })
    }

    /// Restricts to the unbased core, dropping tree parts.
    pub fn core_unbased(&self) -> (Precover, GraphMorphism) {
        let (_, inc) = fold::core_unbased(self.graph());
        let p = Precover::trusted(inc.then(&self.map));
        (p, inc)
    }

    /// Based core. Requires a basepoint.
    pub fn core_based(&self) -> Result<(Precover, GraphMorphism)> {
        let bp = self
            .basepoint
            .ok_or_else(|| Error::InvalidArgument("precover has no basepoint".into()))?;
        let (_, nbp, inc) = fold::core_based(self.graph(), bp);
        let mut p = Precover::trusted(inc.then(&self.map));
        p.basepoint = Some(nbp);
        Ok((p, inc))
    }

    /// Connected components with their inclusions.
    pub fn components(&self) -> Vec<(Precover, GraphMorphism)> {
        self.graph()
            .connected_components()
            .into_iter()
            .map(|(_, inc)| {
                let bp = self
                    .basepoint
                    .and_then(|b| inc.vertex_map.iter().position(|&x| x == b));
                let mut p = Precover::trusted(inc.then(&self.map));
                p.basepoint = bp;
                (p, inc)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub graph: Arc<Graph>,
    /// Vertex pairs, indexed by product vertex.
    pub vertex_pairs: Vec<(usize, usize)>,
    pub proj1: GraphMorphism,
    pub proj2: GraphMorphism,
    pub immersion: Precover,
}

/// Y₁ ⊗_X Y₂. When both inputs are based over a common image vertex, the
/// result is based at the pair of basepoints.
pub fn fiber_product(p1: &Precover, p2: &Precover) -> Result<FiberProduct> {
    if p1.target() != p2.target() {
        return Err(Error::TargetMismatch);
    }
    let (m1, m2) = (&p1.map, &p2.map);
    let (g1, g2) = (p1.graph(), p2.graph());
    let x = &**p1.target();

    let mut by_image: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..g2.vertex_count {
        by_image.entry(m2.vertex_map[v]).or_default().push(v);
    }
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertex_pairs = Vec::new();
    for v1 in 0..g1.vertex_count {
        if let Some(vs) = by_image.get(&m1.vertex_map[v1]) {
            for &v2 in vs {
                index.insert((v1, v2), vertex_pairs.len());
                vertex_pairs.push((v1, v2));
            }
        }
    }

    let mut halves2: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in 0..g2.half_edge_count() {
        halves2.entry(m2.image(e)).or_default().push(e);
    }
    let mut g = Graph::new(vertex_pairs.len());
    let mut h1 = Vec::new();
    let mut h2 = Vec::new();
    let mut hx = Vec::new();
    for e1 in 0..g1.half_edge_count() {
        let h = m1.image(e1);
        if h > x.inv(h) {
            continue;
        }
        let Some(es) = halves2.get(&h) else { continue };
        for &e2 in es {
            let from = index[&(g1.origin(e1), g2.origin(e2))];
            let to = index[&(g1.target(e1), g2.target(e2))];
            g.add_edge(from, to, g1.color[e1]);
            h1.extend([e1, g1.inv(e1)]);
            h2.extend([e2, g2.inv(e2)]);
            hx.extend([h, x.inv(h)]);
        }
    }
    let g = Arc::new(g);
    let v1: Vec<usize> = vertex_pairs.iter().map(|p| p.0).collect();
    let v2: Vec<usize> = vertex_pairs.iter().map(|p| p.1).collect();
    let vx: Vec<usize> = v1.iter().map(|&v| m1.vertex_map[v]).collect();
    let proj1 = GraphMorphism::combinatorial(g.clone(), m1.source.clone(), v1, h1);
    let proj2 = GraphMorphism::combinatorial(g.clone(), m2.source.clone(), v2, h2);
    let mut immersion = Precover::trusted(GraphMorphism::combinatorial(
        g.clone(),
        p1.target().clone(),
        vx,
        hx,
    ));
    if let (Some(b1), Some(b2)) = (p1.basepoint, p2.basepoint) {
        immersion.basepoint = index.get(&(b1, b2)).copied();
    }
    Ok(FiberProduct {
        graph: g,
        vertex_pairs,
        proj1,
        proj2,
        immersion,
    })
}
