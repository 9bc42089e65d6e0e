//! Graphs of graphs with monochrome cycles, and the σ/β machinery on an
//! edge graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fold::{self, Reduced};
use crate::graph::{ColorLengthTable, Graph};
use crate::morphism::GraphMorphism;
use crate::precover::Precover;

#[derive(Clone, Debug)]
pub struct GraphOfGraphs {
    /// Γ. Edge orbit `k` is half-edges `2k` (the `+` side) and `2k + 1`.
    pub gamma: Graph,
    pub vertex_graphs: Vec<Arc<Graph>>,
    /// One graph per Γ edge orbit.
    pub edge_graphs: Vec<Arc<Graph>>,
    /// φ_h for every Γ half-edge h, from the edge graph of h to the vertex
    /// graph at τ(h).
    pub attaching: Vec<GraphMorphism>,
    /// Optional automorphism of the first edge graph (the π-rotation).
    pub beta: Option<GraphMorphism>,
    pub lengths: ColorLengthTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Shape {
    /// Two vertices with equal vertex graphs, one edge, φ₋ = φ₊ ∘ β.
    Double,
    /// One vertex and one loop.
    Hnn,
}

impl GraphOfGraphs {
    /// The index-2 double `A ∗_C A` of an amalgam with `[B:C] = 2`.
    pub fn double(
        xa: Arc<Graph>,
        xc: Arc<Graph>,
        phi: GraphMorphism,
        beta: GraphMorphism,
        lengths: ColorLengthTable,
    ) -> Self {
        let mut gamma = Graph::new(2);
        gamma.add_edge(0, 1, 0);
        let phi_minus = beta.then(&phi);
        GraphOfGraphs {
            gamma,
            vertex_graphs: vec![xa.clone(), xa],
            edge_graphs: vec![xc],
            attaching: vec![phi.clone(), phi_minus],
            beta: Some(beta),
            lengths,
        }
    }

    pub fn hnn(
        xa: Arc<Graph>,
        xb: Arc<Graph>,
        phi1: GraphMorphism,
        phi2: GraphMorphism,
        lengths: ColorLengthTable,
    ) -> Self {
        let mut gamma = Graph::new(1);
        gamma.add_edge(0, 0, 0);
        GraphOfGraphs {
            gamma,
            vertex_graphs: vec![xa],
            edge_graphs: vec![xb],
            attaching: vec![phi1, phi2],
            beta: None,
            lengths,
        }
    }

    pub fn shape(&self) -> Result<Shape> {
        let g = &self.gamma;
        if g.edge_count() != 1 {
            return Err(Error::Shape(format!(
                "Γ has {} edges, expected 1",
                g.edge_count()
            )));
        }
        match g.vertex_count {
            1 => Ok(Shape::Hnn),
            2 if self.beta.is_some() && self.vertex_graphs[0] == self.vertex_graphs[1] => {
                Ok(Shape::Double)
            }
            2 => Err(Error::Shape(
                "two-vertex Γ needs equal vertex graphs and a β automorphism".into(),
            )),
            n => Err(Error::Shape(format!("Γ has {n} vertices"))),
        }
    }
}

/// All violations of well-formedness and of the three defining conditions.
pub fn validate_gog(g: &GraphOfGraphs) -> Vec<String> {
    let mut out = Vec::new();
    for v in g.gamma.validate() {
        out.push(format!("Γ: {v}"));
    }
    if !out.is_empty() {
        return out;
    }
    if g.vertex_graphs.len() != g.gamma.vertex_count {
        out.push(format!(
            "{} vertex graphs for {} vertices of Γ",
            g.vertex_graphs.len(),
            g.gamma.vertex_count
        ));
    }
    if g.edge_graphs.len() != g.gamma.edge_count() {
        out.push(format!(
            "{} edge graphs for {} edges of Γ",
            g.edge_graphs.len(),
            g.gamma.edge_count()
        ));
    }
    if g.attaching.len() != g.gamma.half_edge_count() {
        out.push(format!(
            "{} attaching maps for {} half-edges of Γ",
            g.attaching.len(),
            g.gamma.half_edge_count()
        ));
    }
    if !out.is_empty() {
        return out;
    }
    for (i, x) in g.vertex_graphs.iter().enumerate() {
        for v in x.validate() {
            out.push(format!("vertex graph {i}: {v}"));
        }
        for v in x.monochrome_violations() {
            out.push(format!("vertex graph {i}: {v}"));
        }
    }
    for (i, x) in g.edge_graphs.iter().enumerate() {
        for v in x.validate() {
            out.push(format!("edge graph {i}: {v}"));
        }
        for v in x.monochrome_violations() {
            out.push(format!("edge graph {i}: {v}"));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for l in g.lengths.values() {
        if *l == 0 {
            out.push("length table has a zero entry".into());
        }
    }
    let mut all_colors = BTreeSet::new();
    for x in g.vertex_graphs.iter().chain(g.edge_graphs.iter()) {
        all_colors.extend(x.colors());
    }
    for c in all_colors {
        if !g.lengths.contains_key(&c) {
            out.push(format!("color {c} has no entry in the length table"));
        }
    }
    // Observed image lengths per color, over all attaching maps.
    let mut seen: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
    for h in 0..g.gamma.half_edge_count() {
        let phi = &g.attaching[h];
        let (src, tgt) = (&g.edge_graphs[h / 2], &g.vertex_graphs[g.gamma.target(h)]);
        if *phi.source != **src || *phi.target != **tgt {
            out.push(format!(
                "attaching map {h} has the wrong source or target graph"
            ));
            continue;
        }
        let v = phi.violations();
        if !v.is_empty() {
            out.push(format!("attaching map {h}: {}", v.join("; ")));
            continue;
        }
        let red = match fold::reduce(phi) {
            Ok(r) => r,
            Err(e) => {
                out.push(format!("attaching map {h}: {e}"));
                continue;
            }
        };
        for cyc in src.monochrome_cycles() {
            let c = src.color[cyc[0]];
            match image_cycle_length(&red, &cyc) {
                Some(l) => {
                    seen.entry(c).or_default().insert(l);
                }
                None => out.push(format!(
                    "attaching map {h}: a color {c} cycle does not map onto an embedded cycle"
                )),
            }
        }
    }
    for (c, ls) in seen {
        let Some(&want) = g.lengths.get(&c) else {
            continue;
        };
        let bad: Vec<usize> = ls.iter().copied().filter(|&l| l != want).collect();
        if !bad.is_empty() {
            out.push(format!(
                "color {c} cycles factor through cycles of length {bad:?} but the table says {want}"
            ));
        }
    }
    if let Some(beta) = &g.beta {
        let bad = beta_violations(beta, &g.edge_graphs[0]);
        let twisted =
            bad.is_empty() && g.gamma.vertex_count == 2 && *beta.target == *g.attaching[0].source;
        for v in bad {
            out.push(format!("β: {v}"));
        }
        if twisted && beta.then(&g.attaching[0]) != g.attaching[1] {
            out.push("attaching map 1 is not attaching map 0 after β".into());
        }
    }
    out
}

// Length of σ(Z) when it is an embedded cycle, traversed once.
fn image_cycle_length(red: &Reduced, cyc: &[usize]) -> Option<usize> {
    let path: Vec<usize> = cyc
        .iter()
        .flat_map(|&e| red.sigma.edge_map[e].iter().copied())
        .collect();
    let g = &*red.sigma.target;
    let path = crate::words::reduce(g, &path);
    if path.is_empty() {
        return None;
    }
    // Cyclic reduction.
    let (mut i, mut j) = (0, path.len() - 1);
    while i < j && path[j] == g.inv(path[i]) {
        i += 1;
        j -= 1;
    }
    let core = &path[i..=j];
    // Embedded: distinct vertices and a single traversal.
    let mut verts: Vec<usize> = core.iter().map(|&h| g.target(h)).collect();
    verts.sort_unstable();
    verts.dedup();
    if verts.len() != core.len() {
        return None;
    }
    Some(core.len())
}

fn beta_violations(beta: &GraphMorphism, xc: &Arc<Graph>) -> Vec<String> {
    let mut out = Vec::new();
    if *beta.source != **xc || *beta.target != **xc {
        out.push("must be a map of the first edge graph to itself".into());
        return out;
    }
    out.extend(beta.violations());
    if !out.is_empty() {
        return out;
    }
    if !beta.is_subgraph_embedding() {
        out.push("not a combinatorial bijection".into());
        return out;
    }
    let sq = beta.then(beta);
    if sq != GraphMorphism::identity(xc.clone()) {
        out.push("does not square to the identity".into());
    }
    out
}

/// The fixed factorization X_C → X̄_C → X_A of one attaching map.
#[derive(Clone, Debug)]
pub struct SigmaExtension {
    pub xc: Arc<Graph>,
    pub xbar: Arc<Graph>,
    /// σ: X_C → X̄_C.
    pub sigma: GraphMorphism,
    /// ι: X̄_C → X_A.
    pub iota: GraphMorphism,
}

impl SigmaExtension {
    pub fn new(phi: &GraphMorphism) -> Result<Self> {
        let red = fold::reduce(phi)?;
        if red.loops_deleted > 0 {
            return Err(Error::Validation(vec![
                "σ collapses a loop of the edge graph".into(),
            ]));
        }
        Ok(SigmaExtension {
            xc: phi.source.clone(),
            xbar: red.sigma.target.clone(),
            sigma: red.sigma,
            iota: red.immersion,
        })
    }

    /// X̄_C as a precover of itself.
    pub fn base(&self) -> Precover {
        Precover::identity(self.xbar.clone())
    }
}

/// Ȳ → X̄_C for a precover Y → X_C, along with σ_Y: Y → Ȳ.
pub fn sigma_push(ext: &SigmaExtension, p: &Precover) -> Result<(Precover, GraphMorphism)> {
    if **p.target() != *ext.xc {
        return Err(Error::TargetMismatch);
    }
    push_along(&ext.sigma, p)
}

/// Factors `Y → S → S̄` and returns the immersion part with σ_Y. Refuses
/// to delete loops.
pub fn push_along(sigma: &GraphMorphism, p: &Precover) -> Result<(Precover, GraphMorphism)> {
    let red = fold::reduce(&p.map.then(sigma))?;
    if red.loops_deleted > 0 {
        return Err(Error::Validation(vec![
            "σ collapses a loop of a precover".into()
        ]));
    }
    let mut q = Precover::new(red.immersion)?;
    q.basepoint = p.basepoint.map(|b| red.sigma.vertex_map[b]);
    Ok((q, red.sigma))
}

pub fn sigma_pull(ext: &SigmaExtension, q: &Precover) -> Result<Precover> {
    if **q.target() != *ext.xbar {
        return Err(Error::TargetMismatch);
    }
    pull_along(&ext.sigma, q)
}

/// Given a monotone `σ: S → S̄` and a precover `q: Ȳ → S̄`, builds the
/// precover `Y → S` with vertices `(ȳ, s)` over a common point of S̄, and
/// returns its unbased core (or the based core when q is based).
pub fn pull_along(sigma: &GraphMorphism, q: &Precover) -> Result<Precover> {
    let s = &*sigma.source;
    let ybar = q.graph();
    let mut over: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..s.vertex_count {
        over.entry(sigma.vertex_map[v]).or_default().push(v);
    }
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    for y in 0..ybar.vertex_count {
        if let Some(vs) = over.get(&q.map.vertex_map[y]) {
            for &v in vs {
                index.insert((y, v), pairs.len());
                pairs.push((y, v));
            }
        }
    }
    let mut g = Graph::new(pairs.len());
    let mut half = Vec::new();
    let yout = ybar.outgoing();
    for f in s.edge_reps() {
        let path = &sigma.edge_map[f];
        let start_img = sigma.vertex_map[s.origin(f)];
        for y0 in 0..ybar.vertex_count {
            if q.map.vertex_map[y0] != start_img {
                continue;
            }
            // Lift the σ-image of f from y0.
            let mut y = y0;
            let mut ok = true;
            for &h in path {
                match yout[y].iter().find(|&&e| q.map.image(e) == h) {
                    Some(&e) => y = ybar.target(e),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let from = index[&(y0, s.origin(f))];
            let to = index[&(y, s.target(f))];
            g.add_edge(from, to, s.color[f]);
            half.push(f);
            half.push(s.inv(f));
        }
    }
    let vmap: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let m = GraphMorphism::combinatorial(Arc::new(g), sigma.source.clone(), vmap, half);
    let mut p = Precover::new(m)?;
    match q.basepoint {
        Some(b) => {
            let img = q.map.vertex_map[b];
            let v = over[&img][0];
            p.basepoint = Some(index[&(b, v)]);
            Ok(p.core_based()?.0)
        }
        None => Ok(p.core_unbased().0),
    }
}

/// Postcomposes a precover of the first edge graph with β.
pub fn beta_twist(g: &GraphOfGraphs, p: &Precover) -> Result<Precover> {
    let beta = g
        .beta
        .as_ref()
        .ok_or_else(|| Error::Shape("no β recorded".into()))?;
    if **p.target() != *beta.source {
        return Err(Error::TargetMismatch);
    }
    p.push(beta)
}
