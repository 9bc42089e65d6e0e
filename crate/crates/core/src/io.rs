//! JSON interchange for graphs, morphisms, precovers and graphs of graphs.
//!
//! A graph is `{"vertices": [id, ...], "edges": [{"id", "from", "to",
//! "color"}, ...], "basepoint"?}`. Each listed edge is an involution orbit;
//! `"<id>+"` names the half-edge pointing at `to` and `"<id>-"` its reverse.
//! Ids are strings or integers. A map between graphs is
//! `{"vertex_map": {src: tgt}, "edge_map": {edge: ["<id>±", ...]}}`, where an
//! edge maps to a (possibly empty) path of target half-edges.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gog::GraphOfGraphs;
use crate::graph::{Color, Graph};
use crate::morphism::GraphMorphism;
use crate::precover::Precover;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Id {
    Int(u64),
    Str(String),
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Id::Int(i) => write!(f, "{i}"),
            Id::Str(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: Id,
    pub from: Id,
    pub to: Id,
    pub color: Color,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<Id>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Id>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub vertex_map: BTreeMap<String, Id>,
    pub edge_map: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub source: GraphDoc,
    pub target: GraphDoc,
    #[serde(flatten)]
    pub map: MapDoc,
}

/// `{gamma, vertex_graphs, edge_graphs, attaching, beta?, lengths}`. Vertex
/// graphs are keyed by Γ vertex id, edge graphs by Γ edge id, attaching maps
/// by Γ half-edge (`"<id>+"` maps into the vertex graph at `to`). β, when
/// present, is an automorphism of the first edge graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GogDoc {
    pub gamma: GraphDoc,
    pub vertex_graphs: BTreeMap<String, GraphDoc>,
    pub edge_graphs: BTreeMap<String, GraphDoc>,
    pub attaching: BTreeMap<String, MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<MapDoc>,
    pub lengths: BTreeMap<Color, usize>,
}

/// A parsed graph with the ids it was written with.
#[derive(Clone, Debug)]
pub struct Named {
    pub graph: Arc<Graph>,
    pub vertex_ids: Vec<String>,
    pub edge_ids: Vec<String>,
    pub basepoint: Option<usize>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl Named {
    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown vertex {id:?}")))
    }

    /// Edge orbit index of an edge id.
    pub fn edge(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown edge {id:?}")))
    }

    /// Half-edge of a `"<id>+"` or `"<id>-"` reference.
    pub fn half_edge(&self, r: &str) -> Result<usize> {
        let (id, sign) = if let Some(id) = r.strip_suffix('+') {
            (id, 0)
        } else if let Some(id) = r.strip_suffix('-') {
            (id, 1)
        } else {
            return Err(Error::Parse(format!(
                "half-edge reference {r:?} must end in '+' or '-'"
            )));
        };
        Ok(2 * self.edge(id)? + sign)
    }

    pub fn half_edge_name(&self, h: usize) -> String {
        format!(
            "{}{}",
            self.edge_ids[h / 2],
            if h.is_multiple_of(2) { '+' } else { '-' }
        )
    }

    /// Names a graph with its dense indices.
    pub fn plain(g: Arc<Graph>) -> Named {
        let vertex_ids: Vec<String> = (0..g.vertex_count).map(|v| v.to_string()).collect();
        let edge_ids: Vec<String> = (0..g.edge_count()).map(|e| format!("e{e}")).collect();
        Named {
            vertex_index: vertex_ids
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect(),
            edge_index: edge_ids
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect(),
            vertex_ids,
            edge_ids,
            graph: g,
            basepoint: None,
        }
    }
}

fn json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn graph_from_doc(doc: &GraphDoc) -> Result<Named> {
    let mut vertex_index = HashMap::new();
    let mut vertex_ids = Vec::new();
    for v in &doc.vertices {
        let s = v.to_string();
        if vertex_index.insert(s.clone(), vertex_ids.len()).is_some() {
            return Err(Error::Parse(format!("duplicate vertex id {s:?}")));
        }
        vertex_ids.push(s);
    }
    let mut g = Graph::new(vertex_ids.len());
    let mut edge_index = HashMap::new();
    let mut edge_ids = Vec::new();
    for e in &doc.edges {
        let s = e.id.to_string();
        let find = |v: &Id| {
            vertex_index.get(&v.to_string()).copied().ok_or_else(|| {
                Error::Parse(format!("edge {s:?}: unknown vertex {:?}", v.to_string()))
            })
        };
        let (from, to) = (find(&e.from)?, find(&e.to)?);
        if edge_index.insert(s.clone(), edge_ids.len()).is_some() {
            return Err(Error::Parse(format!("duplicate edge id {s:?}")));
        }
        g.add_edge(from, to, e.color);
        edge_ids.push(s);
    }
    let v = g.validate();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let basepoint = match &doc.basepoint {
        Some(b) => Some(
            vertex_index
                .get(&b.to_string())
                .copied()
                .ok_or_else(|| Error::Parse(format!("unknown basepoint {:?}", b.to_string())))?,
        ),
        None => None,
    };
    Ok(Named {
        graph: Arc::new(g),
        vertex_ids,
        edge_ids,
        basepoint,
        vertex_index,
        edge_index,
    })
}

pub fn parse_graph(text: &str) -> Result<Named> {
    graph_from_doc(&json("graph", text)?)
}

pub fn graph_to_doc(n: &Named) -> GraphDoc {
    let g = &n.graph;
    GraphDoc {
        vertices: n.vertex_ids.iter().map(|s| Id::Str(s.clone())).collect(),
        edges: (0..g.edge_count())
            .map(|k| EdgeDoc {
                id: Id::Str(n.edge_ids[k].clone()),
                from: Id::Str(n.vertex_ids[g.origin(2 * k)].clone()),
                to: Id::Str(n.vertex_ids[g.target(2 * k)].clone()),
                color: g.color[2 * k],
            })
            .collect(),
        basepoint: n.basepoint.map(|b| Id::Str(n.vertex_ids[b].clone())),
    }
}

/// Dense-id form: vertices are integers, edge `k` is `e<k>`.
pub fn plain_graph_doc(g: &Graph, basepoint: Option<usize>) -> GraphDoc {
    GraphDoc {
        vertices: (0..g.vertex_count as u64).map(Id::Int).collect(),
        edges: (0..g.edge_count())
            .map(|k| EdgeDoc {
                id: Id::Str(format!("e{k}")),
                from: Id::Int(g.origin(2 * k) as u64),
                to: Id::Int(g.target(2 * k) as u64),
                color: g.color[2 * k],
            })
            .collect(),
        basepoint: basepoint.map(|b| Id::Int(b as u64)),
    }
}

/// Builds and checks a morphism between two named graphs.
pub fn map_from_doc(doc: &MapDoc, source: &Named, target: &Named) -> Result<GraphMorphism> {
    let s = &source.graph;
    let mut vertex_map = vec![usize::MAX; s.vertex_count];
    for (k, v) in &doc.vertex_map {
        vertex_map[source.vertex(k)?] = target.vertex(&v.to_string())?;
    }
    if let Some(v) = vertex_map.iter().position(|&x| x == usize::MAX) {
        return Err(Error::Parse(format!(
            "vertex_map: no image for vertex {:?}",
            source.vertex_ids[v]
        )));
    }
    let mut edge_map = vec![None; s.half_edge_count()];
    for (k, path) in &doc.edge_map {
        let e = 2 * source.edge(k)?;
        let p: Vec<usize> = path
            .iter()
            .map(|r| target.half_edge(r))
            .collect::<Result<_>>()?;
        let back = p.iter().rev().map(|&h| target.graph.inv(h)).collect();
        edge_map[e] = Some(p);
        edge_map[e + 1] = Some(back);
    }
    let edge_map: Vec<Vec<usize>> = edge_map
        .into_iter()
        .enumerate()
        .map(|(h, p)| {
            p.ok_or_else(|| {
                Error::Parse(format!(
                    "edge_map: no image for edge {:?}",
                    source.edge_ids[h / 2]
                ))
            })
        })
        .collect::<Result<_>>()?;
    let m = GraphMorphism::from_arcs(
        source.graph.clone(),
        target.graph.clone(),
        vertex_map,
        edge_map,
    );
    let v = m.violations();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    Ok(m)
}

pub fn map_to_doc(m: &GraphMorphism, source: &Named, target: &Named) -> MapDoc {
    let s = &m.source;
    MapDoc {
        vertex_map: (0..s.vertex_count)
            .map(|v| {
                (
                    source.vertex_ids[v].clone(),
                    Id::Str(target.vertex_ids[m.vertex_map[v]].clone()),
                )
            })
            .collect(),
        edge_map: (0..s.edge_count())
            .map(|k| {
                (
                    source.edge_ids[k].clone(),
                    m.edge_map[2 * k]
                        .iter()
                        .map(|&h| target.half_edge_name(h))
                        .collect(),
                )
            })
            .collect(),
    }
}

pub struct ParsedMorphism {
    pub source: Named,
    pub target: Named,
    pub morphism: GraphMorphism,
}

pub fn parse_morphism(text: &str) -> Result<ParsedMorphism> {
    let doc: MorphismDoc = json("morphism", text)?;
    let source = graph_from_doc(&doc.source)?;
    let target = graph_from_doc(&doc.target)?;
    let morphism = map_from_doc(&doc.map, &source, &target)?;
    Ok(ParsedMorphism {
        source,
        target,
        morphism,
    })
}

pub fn morphism_doc(m: &GraphMorphism, source: &Named, target: &Named) -> MorphismDoc {
    MorphismDoc {
        source: graph_to_doc(source),
        target: graph_to_doc(target),
        map: map_to_doc(m, source, target),
    }
}

/// A precover file is a morphism file whose map is an immersion. The
/// source basepoint, if any, is kept.
pub fn parse_precover(text: &str) -> Result<(ParsedMorphism, Precover)> {
    let pm = parse_morphism(text)?;
    let mut p = Precover::new(pm.morphism.clone())?;
    p.basepoint = pm.source.basepoint;
    Ok((pm, p))
}

pub fn gog_from_doc(doc: &GogDoc) -> Result<GraphOfGraphs> {
    let gamma = graph_from_doc(&doc.gamma).map_err(|e| context("gamma", e))?;
    let lookup = |map: &BTreeMap<String, GraphDoc>, key: &str, what: &str| -> Result<Named> {
        let d = map
            .get(key)
            .ok_or_else(|| Error::Parse(format!("{what}: no graph for {key:?}")))?;
        graph_from_doc(d).map_err(|e| context(&format!("{what} {key:?}"), e))
    };
    for k in doc.vertex_graphs.keys() {
        gamma.vertex(k).map_err(|e| context("vertex_graphs", e))?;
    }
    for k in doc.edge_graphs.keys() {
        gamma.edge(k).map_err(|e| context("edge_graphs", e))?;
    }
    for k in doc.attaching.keys() {
        gamma.half_edge(k).map_err(|e| context("attaching", e))?;
    }
    let vertex_graphs: Vec<Named> = gamma
        .vertex_ids
        .iter()
        .map(|v| lookup(&doc.vertex_graphs, v, "vertex_graphs"))
        .collect::<Result<_>>()?;
    let edge_graphs: Vec<Named> = gamma
        .edge_ids
        .iter()
        .map(|e| lookup(&doc.edge_graphs, e, "edge_graphs"))
        .collect::<Result<_>>()?;
    let g = &gamma.graph;
    let mut attaching = Vec::new();
    for h in 0..g.half_edge_count() {
        let name = gamma.half_edge_name(h);
        let m = doc
            .attaching
            .get(&name)
            .ok_or_else(|| Error::Parse(format!("attaching: no map for {name:?}")))?;
        let phi = map_from_doc(m, &edge_graphs[h / 2], &vertex_graphs[g.target(h)])
            .map_err(|e| context(&format!("attaching {name:?}"), e))?;
        attaching.push(phi);
    }
    let beta = match &doc.beta {
        Some(m) => {
            let xe = edge_graphs
                .first()
                .ok_or_else(|| Error::Parse("beta given but Γ has no edges".into()))?;
            Some(map_from_doc(m, xe, xe).map_err(|e| context("beta", e))?)
        }
        None => None,
    };
    Ok(GraphOfGraphs {
        gamma: (**g).clone(),
        vertex_graphs: vertex_graphs.into_iter().map(|n| n.graph).collect(),
        edge_graphs: edge_graphs.into_iter().map(|n| n.graph).collect(),
        attaching,
        beta,
        lengths: doc.lengths.clone(),
    })
}

fn context(what: &str, e: Error) -> Error {
    match e {
        Error::Parse(s) => Error::Parse(format!("{what}: {s}")),
        Error::Validation(v) => {
            Error::Validation(v.into_iter().map(|s| format!("{what}: {s}")).collect())
        }
        other => other,
    }
}

pub fn parse_gog(text: &str) -> Result<GraphOfGraphs> {
    gog_from_doc(&json("graph of graphs", text)?)
}

/// Serializes a graph of graphs with dense ids: Γ vertices `0, 1, ...`,
/// Γ edges `e0, e1, ...`.
pub fn gog_to_doc(g: &GraphOfGraphs) -> GogDoc {
    let gamma = Named::plain(Arc::new(g.gamma.clone()));
    let vs: Vec<Named> = g
        .vertex_graphs
        .iter()
        .map(|x| Named::plain(x.clone()))
        .collect();
    let es: Vec<Named> = g
        .edge_graphs
        .iter()
        .map(|x| Named::plain(x.clone()))
        .collect();
    GogDoc {
        gamma: graph_to_doc(&gamma),
        vertex_graphs: vs
            .iter()
            .enumerate()
            .map(|(i, n)| (gamma.vertex_ids[i].clone(), graph_to_doc(n)))
            .collect(),
        edge_graphs: es
            .iter()
            .enumerate()
            .map(|(i, n)| (gamma.edge_ids[i].clone(), graph_to_doc(n)))
            .collect(),
        attaching: g
            .attaching
            .iter()
            .enumerate()
            .map(|(h, m)| {
                (
                    gamma.half_edge_name(h),
                    map_to_doc(m, &es[h / 2], &vs[g.gamma.target(h)]),
                )
            })
            .collect(),
        beta: g.beta.as_ref().map(|b| map_to_doc(b, &es[0], &es[0])),
        lengths: g.lengths.clone(),
    }
}

/// A precover as `{graph, basepoint?, target, vertex_map, edge_map}` with
/// dense ids on both sides.
#[derive(Clone, Debug, Serialize)]
pub struct PrecoverDoc {
    pub source: GraphDoc,
    pub target: GraphDoc,
    #[serde(flatten)]
    pub map: MapDoc,
}

pub fn precover_doc(p: &Precover) -> PrecoverDoc {
    let s = Named::plain(p.map.source.clone());
    let t = Named::plain(p.map.target.clone());
    PrecoverDoc {
        source: plain_graph_doc(p.graph(), p.basepoint),
        target: plain_graph_doc(p.target(), None),
        map: map_to_doc(&p.map, &s, &t),
    }
}
