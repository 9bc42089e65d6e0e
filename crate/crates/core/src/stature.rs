//! Iteration of path-stabilizer catalogs and the finite stature criteria.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gog::{self, validate_gog, GraphOfGraphs, Shape, SigmaExtension};
use crate::graph::{ColorLengthTable, Graph};
use crate::iso::{self, Isomorphism};
use crate::morphism::GraphMorphism;
use crate::precover::{fiber_product, Precover};
use crate::topology::{self, Pi1Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub left: usize,
    pub right: usize,
    /// Right factor went through pull, β and push.
    pub twisted: bool,
    /// Attaching maps used on the left and right (HNN only).
    pub attaching: Option<(u8, u8)>,
}

#[derive(Clone, Debug)]
pub struct Class {
    /// Precover of the base graph: X̄_C for doubles, X_B for HNN shapes.
    pub precover: Precover,
    pub invariant: u64,
    pub rank: i64,
    pub provenance: Option<Provenance>,
    /// Distinct projections to previous-depth classes, one per way the class
    /// arose: (parent index, map from this class's graph to the parent's).
    pub parent_maps: Vec<(usize, GraphMorphism)>,
    pub instances: usize,
}

#[derive(Clone, Debug)]
pub struct LevelCatalog {
    pub depth: usize,
    pub classes: Vec<Class>,
    /// Number of classes after forgetting the map to the base graph and
    /// keeping only the map to the vertex graph.
    pub classes_over_vertex_graph: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Criterion {
    /// Every depth-2 class equals the depth-1 class.
    NormalShortcut,
    /// Every class at some depth has a simply connected capped complex.
    SimplyConnected,
    /// Every depth-(k+2) to depth-k projection is a subgraph embedding.
    Embedding,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    FiniteStature {
        criterion: Criterion,
        stabilization_depth: usize,
        total_classes: usize,
    },
    Inconclusive {
        max_depth: usize,
        reason: String,
    },
    ValidationFailure {
        violations: Vec<String>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub depth: usize,
    pub classes: usize,
    pub classes_over_vertex_graph: usize,
    /// Rank to number of classes.
    pub ranks: BTreeMap<i64, usize>,
    pub max_vertices: usize,
    pub simply_connected: Pi1Counts,
    pub embedding: Option<bool>,
    pub normal_shortcut: Option<bool>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Pi1Counts {
    pub trivial: usize,
    pub non_trivial: usize,
    pub unknown: usize,
}

/// A composite projection from a depth-(k+2) class to a depth-k class.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingWitness {
    pub depth: usize,
    pub class: usize,
    pub via: usize,
    pub onto: usize,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pi1Certificate {
    pub depth: usize,
    pub class: usize,
    pub generators: usize,
    pub relators: usize,
    pub cosets: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatureReport {
    pub schema: &'static str,
    pub subject: String,
    pub shape: Option<Shape>,
    pub verdict: Verdict,
    pub criteria_at_stop: Vec<Criterion>,
    pub levels: Vec<LevelSummary>,
    pub embedding_witnesses: Vec<EmbeddingWitness>,
    pub pi1_certificates: Vec<Pi1Certificate>,
    pub monochrome_violations: Vec<String>,
    pub budget: usize,
    pub max_depth: usize,
    pub annotation: Option<String>,
}

pub const REPORT_SCHEMA: &str = "artin-stature/report/v1";
pub const DEFAULT_MAX_DEPTH: usize = 8;
pub const DEFAULT_CLASS_CAP: usize = 20_000;

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub max_depth: usize,
    pub budget: usize,
    /// Stop with Inconclusive when a depth has more classes than this.
    pub class_cap: usize,
    /// Keep iterating this many depths after a criterion first fires.
    pub extra_depths: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_depth: DEFAULT_MAX_DEPTH,
            budget: topology::DEFAULT_BUDGET,
            class_cap: DEFAULT_CLASS_CAP,
            extra_depths: 0,
        }
    }
}

enum Mode {
    Double {
        ext: SigmaExtension,
        beta: GraphMorphism,
    },
    Hnn {
        xb: Arc<Graph>,
        phi: [GraphMorphism; 2],
    },
}

/// Engine state for one graph of graphs.
pub struct Engine {
    mode: Mode,
    pub lengths: ColorLengthTable,
    pub levels: Vec<LevelCatalog>,
}

struct Candidate {
    precover: Precover,
    parent: usize,
    parent_map: GraphMorphism,
    provenance: Provenance,
}

impl Engine {
    pub fn new(g: &GraphOfGraphs) -> Result<Engine> {
        let v = validate_gog(g);
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        let mode = match g.shape()? {
            Shape::Double => Mode::Double {
                ext: SigmaExtension::new(&g.attaching[0])?,
                beta: g.beta.clone().unwrap(),
            },
            Shape::Hnn => Mode::Hnn {
                xb: g.edge_graphs[0].clone(),
                phi: [g.attaching[0].clone(), g.attaching[1].clone()],
            },
        };
        Ok(Engine {
            mode,
            lengths: g.lengths.clone(),
            levels: Vec::new(),
        })
    }

    /// Graph all classes are precovers of.
    pub fn base(&self) -> &Arc<Graph> {
        match &self.mode {
            Mode::Double { ext, .. } => &ext.xbar,
            Mode::Hnn { xb, .. } => xb,
        }
    }

    pub fn extension(&self) -> Option<&SigmaExtension> {
        match &self.mode {
            Mode::Double { ext, .. } => Some(ext),
            Mode::Hnn { .. } => None,
        }
    }

    /// The class as a precover of the vertex graph.
    pub fn over_vertex_graph(&self, p: &Precover) -> Result<Precover> {
        match &self.mode {
            Mode::Double { ext, .. } => p.push(&ext.iota),
            Mode::Hnn { phi, .. } => Ok(gog::push_along(&phi[0], p)?.0),
        }
    }

    pub fn level_one(&mut self) -> Result<&LevelCatalog> {
        let base = Precover::identity(self.base().clone());
        let class = Class {
            invariant: base.invariant(),
            rank: base.rank()?,
            precover: base,
            provenance: None,
            parent_maps: Vec::new(),
            instances: 1,
        };
        self.levels = vec![self.finish_level(1, vec![class])?];
        Ok(&self.levels[0])
    }

    fn finish_level(&self, depth: usize, classes: Vec<Class>) -> Result<LevelCatalog> {
        let mut over: Vec<(u64, Precover)> = Vec::new();
        for c in &classes {
            let p = self.over_vertex_graph(&c.precover)?;
            let inv = p.invariant();
            if !over
                .iter()
                .any(|(i, q)| *i == inv && p.isomorphism_over(q).is_some())
            {
                over.push((inv, p));
            }
        }
        Ok(LevelCatalog {
            depth,
            classes,
            classes_over_vertex_graph: over.len(),
        })
    }

    /// Right factors over the vertex graph for the next step.
    fn candidates(&self, prev: &LevelCatalog, depth: usize) -> Result<Vec<Candidate>> {
        match &self.mode {
            Mode::Double { ext, beta } => {
                let twisted = depth % 2 == 1;
                let lefts: Vec<Precover> = prev
                    .classes
                    .iter()
                    .map(|c| c.precover.push(&ext.iota))
                    .collect::<Result<_>>()?;
                let rights: Vec<Precover> = if twisted {
                    prev.classes
                        .iter()
                        .map(|c| {
                            let pulled = gog::sigma_pull(ext, &c.precover)?;
                            let turned = pulled.push(beta)?;
                            let (pushed, _) = gog::sigma_push(ext, &turned)?;
                            pushed.push(&ext.iota)
                        })
                        .collect::<Result<_>>()?
                } else {
                    lefts.clone()
                };
                let n = prev.classes.len();
                let pairs: Vec<(usize, usize)> =
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
                let out: Vec<Vec<Candidate>> = pairs
                    .par_iter()
                    .map(|&(i, j)| {
                        let fp = fiber_product(&lefts[i], &rights[j])?;
                        let over_base =
                            Precover::trusted(fp.proj1.then(&prev.classes[i].precover.map));
                        Ok(split(&over_base, &fp.proj1)
                            .into_iter()
                            .map(|(precover, parent_map)| Candidate {
                                precover,
                                parent: i,
                                parent_map,
                                provenance: Provenance {
                                    left: i,
                                    right: j,
                                    twisted,
                                    attaching: None,
                                },
                            })
                            .collect())
                    })
                    .collect::<Result<_>>()?;
                Ok(out.into_iter().flatten().collect())
            }
            Mode::Hnn { phi, .. } => {
                // Each class pushed along both attaching maps.
                let pushed: Vec<[(Precover, GraphMorphism); 2]> = prev
                    .classes
                    .iter()
                    .map(|c| {
                        Ok([
                            gog::push_along(&phi[0], &c.precover)?,
                            gog::push_along(&phi[1], &c.precover)?,
                        ])
                    })
                    .collect::<Result<_>>()?;
                let n = prev.classes.len();
                let mut jobs = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        for s in 0..2u8 {
                            for t in 0..2u8 {
                                jobs.push((i, j, s, t));
                            }
                        }
                    }
                }
                let out: Vec<Vec<Candidate>> = jobs
                    .par_iter()
                    .map(|&(i, j, s, t)| {
                        let (left, sigma) = &pushed[i][s as usize];
                        let right = &pushed[j][t as usize].0;
                        let fp = fiber_product(left, right)?;
                        let over_left = Precover::trusted(fp.proj1.clone());
                        let mut res = Vec::new();
                        for (comp, _) in over_left.components() {
                            let (core, _) = comp.core_unbased();
                            if core.graph().vertex_count == 0 || core.rank()? <= 0 {
                                continue;
                            }
                            // Back to a precover of the class graph, then of X_B.
                            let pulled = gog::pull_along(sigma, &core)?;
                            if pulled.graph().vertex_count == 0 || pulled.rank()? <= 0 {
                                continue;
                            }
                            let precover =
                                Precover::trusted(pulled.map.then(&prev.classes[i].precover.map));
                            res.push(Candidate {
                                precover,
                                parent: i,
                                parent_map: pulled.map,
                                provenance: Provenance {
                                    left: i,
                                    right: j,
                                    twisted: false,
                                    attaching: Some((s, t)),
                                },
                            });
                        }
                        Ok(res)
                    })
                    .collect::<Result<_>>()?;
                Ok(out.into_iter().flatten().collect())
            }
        }
    }

    /// Computes the next depth from the last one.
    pub fn step(&mut self) -> Result<&LevelCatalog> {
        let prev = self
            .levels
            .last()
            .ok_or_else(|| Error::InvalidArgument("step before level one".into()))?;
        let depth = prev.depth + 1;
        let cands = self.candidates(prev, depth)?;
        let mut classes: Vec<Class> = Vec::new();
        let mut index = iso::InvariantIndex::default();
        for c in cands {
            let inv = c.precover.invariant();
            let found = index.candidates(inv).iter().find_map(|&k| {
                c.precover
                    .isomorphism_over(&classes[k].precover)
                    .map(|m| (k, m))
            });
            match found {
                Some((k, m)) => {
                    let map = iso_morphism(
                        &m.inverse(),
                        &classes[k].precover.map.source,
                        &c.precover.map.source,
                    )
                    .then(&c.parent_map);
                    let cl = &mut classes[k];
                    cl.instances += 1;
                    if !cl
                        .parent_maps
                        .iter()
                        .any(|(p, q)| *p == c.parent && same_map(q, &map))
                    {
                        cl.parent_maps.push((c.parent, map));
                    }
                }
                None => {
                    index.insert(inv, classes.len());
                    classes.push(Class {
                        invariant: inv,
                        rank: c.precover.rank()?,
                        provenance: Some(c.provenance),
                        parent_maps: vec![(c.parent, c.parent_map)],
                        precover: c.precover,
                        instances: 1,
                    });
                }
            }
        }
        let level = self.finish_level(depth, classes)?;
        self.levels.push(level);
        Ok(self.levels.last().unwrap())
    }

    /// Criterion (a) at depth 2.
    pub fn normal_shortcut(&self) -> Option<bool> {
        let (one, two) = (self.levels.first()?, self.levels.get(1)?);
        let base = &one.classes[0].precover;
        Some(
            !two.classes.is_empty()
                && two
                    .classes
                    .iter()
                    .all(|c| c.precover.isomorphism_over(base).is_some()),
        )
    }

    /// Criterion (c) at `depth` (k + 2); on success returns the witnesses.
    pub fn embedding(
        &self,
        depth: usize,
    ) -> Option<std::result::Result<Vec<EmbeddingWitness>, ()>> {
        if depth < 3 || depth > self.levels.len() {
            return None;
        }
        let (top, mid) = (&self.levels[depth - 1], &self.levels[depth - 2]);
        let mut witnesses = Vec::new();
        for (ci, c) in top.classes.iter().enumerate() {
            for (pi, m1) in &c.parent_maps {
                for (gi, m2) in &mid.classes[*pi].parent_maps {
                    let m = m1.then(m2);
                    if !m.is_subgraph_embedding() {
                        return Some(Err(()));
                    }
                    witnesses.push(EmbeddingWitness {
                        depth,
                        class: ci,
                        via: *pi,
                        onto: *gi,
                        vertex_map: m.vertex_map.clone(),
                        edge_map: m.edge_map.iter().map(|p| p[0]).collect(),
                    });
                }
            }
        }
        Some(Ok(witnesses))
    }

    /// Monochrome-cycle and length violations among the classes of a depth.
    pub fn soundness(&self, depth: usize) -> Vec<String> {
        let mut out = Vec::new();
        for (i, c) in self.levels[depth - 1].classes.iter().enumerate() {
            let g = c.precover.graph();
            for v in g
                .monochrome_violations()
                .into_iter()
                .chain(g.length_violations(&self.lengths))
            {
                out.push(format!("depth {depth} class {i}: {v}"));
            }
        }
        out
    }

    /// π₁ verdicts for all classes at a depth.
    pub fn pi1(&self, depth: usize, budget: usize) -> Result<Vec<topology::Pi1Verdict>> {
        self.levels[depth - 1]
            .classes
            .par_iter()
            .map(|c| {
                let cx = topology::build_complex(c.precover.graph(), &self.lengths)?;
                topology::simply_connected(&cx, budget)
            })
            .collect()
    }
}

fn same_map(a: &GraphMorphism, b: &GraphMorphism) -> bool {
    a.vertex_map == b.vertex_map && a.edge_map == b.edge_map
}

fn iso_morphism(m: &Isomorphism, src: &Arc<Graph>, tgt: &Arc<Graph>) -> GraphMorphism {
    GraphMorphism::combinatorial(
        src.clone(),
        tgt.clone(),
        m.vertex_map.clone(),
        m.half_edge_map.clone(),
    )
}

/// Components of a precover, cut to unbased cores of positive rank, with
/// maps to the graph that `proj` lands in.
fn split(p: &Precover, proj: &GraphMorphism) -> Vec<(Precover, GraphMorphism)> {
    let mut out = Vec::new();
    for (comp, inc) in p.components() {
        let (core, inc2) = comp.core_unbased();
        if core.graph().vertex_count == 0 || core.graph().euler_rank().map_or(true, |r| r <= 0) {
            continue;
        }
        let to_parent = inc2.then(&inc).then(proj);
        out.push((core, to_parent));
    }
    out
}

/// Runs the iteration and assembles a report.
pub fn iterate(g: &GraphOfGraphs, subject: &str, cfg: &EngineConfig) -> StatureReport {
    let mut report = StatureReport {
        schema: REPORT_SCHEMA,
        subject: subject.to_string(),
        shape: g.shape().ok(),
        verdict: Verdict::Inconclusive {
            max_depth: cfg.max_depth,
            reason: String::new(),
        },
        criteria_at_stop: Vec::new(),
        levels: Vec::new(),
        embedding_witnesses: Vec::new(),
        pi1_certificates: Vec::new(),
        monochrome_violations: Vec::new(),
        budget: cfg.budget,
        max_depth: cfg.max_depth,
        annotation: None,
    };
    let mut engine = match Engine::new(g) {
        Ok(e) => e,
        Err(Error::Validation(v)) => {
            report.verdict = Verdict::ValidationFailure { violations: v };
            return report;
        }
        Err(e) => {
            report.verdict = Verdict::ValidationFailure {
                violations: vec![e.to_string()],
            };
            return report;
        }
    };
    match run(&mut engine, cfg, &mut report) {
        Ok(()) => {}
        Err(e) => {
            report.verdict = Verdict::ValidationFailure {
                violations: vec![e.to_string()],
            };
        }
    }
    if matches!(report.verdict, Verdict::FiniteStature { .. }) {
        report.annotation =
            Some("residually finite by Huang–Wise Thm 1.3 (cited, not computed)".into());
    }
    report
}

fn run(engine: &mut Engine, cfg: &EngineConfig, report: &mut StatureReport) -> Result<()> {
    let mut stop: Option<(usize, Criterion)> = None;
    for depth in 1..=cfg.max_depth {
        if depth == 1 {
            engine.level_one()?;
        } else {
            engine.step()?;
        }
        let level = &engine.levels[depth - 1];
        let violations = engine.soundness(depth);
        report
            .monochrome_violations
            .extend(violations.iter().cloned());
        let mut ranks = BTreeMap::new();
        for c in &level.classes {
            *ranks.entry(c.rank).or_insert(0) += 1;
        }
        let verdicts = if violations.is_empty() {
            engine.pi1(depth, cfg.budget)?
        } else {
            Vec::new()
        };
        let mut counts = Pi1Counts::default();
        for v in &verdicts {
            match v.status {
                Pi1Status::Trivial => counts.trivial += 1,
                Pi1Status::NonTrivial => counts.non_trivial += 1,
                Pi1Status::Unknown => counts.unknown += 1,
            }
        }
        let normal = if depth == 2 {
            engine.normal_shortcut()
        } else {
            None
        };
        let embedding = engine.embedding(depth);
        report.levels.push(LevelSummary {
            depth,
            classes: level.classes.len(),
            classes_over_vertex_graph: level.classes_over_vertex_graph,
            ranks,
            max_vertices: level
                .classes
                .iter()
                .map(|c| c.precover.graph().vertex_count)
                .max()
                .unwrap_or(0),
            simply_connected: counts,
            embedding: embedding.as_ref().map(|e| e.is_ok()),
            normal_shortcut: normal,
        });
        if !violations.is_empty() {
            report.verdict = Verdict::ValidationFailure { violations };
            return Ok(());
        }

        let mut fired = Vec::new();
        if normal == Some(true) {
            fired.push(Criterion::NormalShortcut);
        }
        let sc = !level.classes.is_empty() && counts.trivial == level.classes.len();
        if sc {
            fired.push(Criterion::SimplyConnected);
        }
        if let Some(Ok(w)) = &embedding {
            fired.push(Criterion::Embedding);
            if stop.is_none() {
                report.embedding_witnesses = w.clone();
            }
        }
        if level.classes.is_empty() {
            // No path stabilizer of positive rank survives.
            fired.push(Criterion::SimplyConnected);
        }
        if stop.is_none() && !fired.is_empty() {
            fired.sort();
            fired.dedup();
            let total = engine.levels.iter().map(|l| l.classes.len()).sum();
            stop = Some((depth, fired[0]));
            report.verdict = Verdict::FiniteStature {
                criterion: fired[0],
                stabilization_depth: depth,
                total_classes: total,
            };
            if fired.contains(&Criterion::SimplyConnected) {
                report.pi1_certificates = verdicts
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let cx = topology::build_complex(
                            level.classes[i].precover.graph(),
                            &engine.lengths,
                        )?;
                        let p = topology::presentation(&cx)?;
                        Ok(Pi1Certificate {
                            depth,
                            class: i,
                            generators: p.generators,
                            relators: p.relators.len(),
                            cosets: v.cosets,
                        })
                    })
                    .collect::<Result<_>>()?;
            }
            report.criteria_at_stop = fired;
        }
        if let Some((d, _)) = stop {
            if depth >= d + cfg.extra_depths {
                return Ok(());
            }
        }
        if level.classes.len() > cfg.class_cap {
            report.verdict = Verdict::Inconclusive {
                max_depth: cfg.max_depth,
                reason: format!(
                    "depth {depth} has {} classes, above the cap {}",
                    level.classes.len(),
                    cfg.class_cap
                ),
            };
            return Ok(());
        }
    }
    if stop.is_none() {
        report.verdict = Verdict::Inconclusive {
            max_depth: cfg.max_depth,
            reason: format!("no criterion held up to depth {}", cfg.max_depth),
        };
    }
    Ok(())
}
