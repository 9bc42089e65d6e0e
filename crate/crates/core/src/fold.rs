//! Stallings folding, factorization of monotone maps, and cores.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::morphism::GraphMorphism;

/// Result of folding a combinatorial morphism `m: Y -> X`.
#[derive(Clone, Debug)]
pub struct Folded {
    /// Folded graph Ȳ.
    pub graph: Arc<Graph>,
    /// Ȳ -> X, an immersion.
    pub immersion: GraphMorphism,
    /// Y -> Ȳ.
    pub projection: GraphMorphism,
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

struct Folder<'a> {
    g: &'a Graph,
    image: Vec<usize>,
    verts: UnionFind,
    halves: UnionFind,
    // Per vertex root: image half-edge -> some outgoing half-edge.
    maps: Vec<HashMap<usize, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder<'_> {
    fn merge_vertices(&mut self, u: usize, v: usize) {
        let (mut ru, mut rv) = (self.verts.find(u), self.verts.find(v));
        if ru == rv {
            return;
        }
        if self.verts.size[ru] < self.verts.size[rv] {
            std::mem::swap(&mut ru, &mut rv);
        }
        self.verts.parent[rv] = ru;
        self.verts.size[ru] += self.verts.size[rv];
        let small = std::mem::take(&mut self.maps[rv]);
        for (img, h) in small {
            match self.maps[ru].get(&img) {
                Some(&h2) => self.pending.push((h, h2)),
                None => {
                    self.maps[ru].insert(img, h);
                }
            }
        }
    }

    fn merge_edges(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.halves.find(a), self.halves.find(b));
        if ra == rb {
            return;
        }
        self.halves.parent[rb] = ra;
        let (ia, ib) = (
            self.halves.find(self.g.inv(a)),
            self.halves.find(self.g.inv(b)),
        );
        if ia != ib {
            self.halves.parent[ib] = ia;
        }
        self.merge_vertices(self.g.origin(a), self.g.origin(b));
        self.merge_vertices(self.g.target(a), self.g.target(b));
    }

    fn insert(&mut self, e: usize) {
        let r = self.verts.find(self.g.origin(e));
        let img = self.image[e];
        match self.maps[r].get(&img) {
            Some(&f) => self.pending.push((e, f)),
            None => {
                self.maps[r].insert(img, e);
            }
        }
    }
}

/// Folds a combinatorial morphism to an immersion. With `seed`, half-edges
/// and pending identifications are processed in a shuffled order.
pub fn fold_seeded(m: &GraphMorphism, seed: Option<u64>) -> Result<Folded> {
    let image = m.images()?;
    let g = &*m.source;
    let mut f = Folder {
        g,
        image,
        verts: UnionFind::new(g.vertex_count),
        halves: UnionFind::new(g.half_edge_count()),
        maps: vec![HashMap::new(); g.vertex_count],
        pending: Vec::new(),
    };
    let mut order: Vec<usize> = (0..g.half_edge_count()).collect();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    if let Some(r) = rng.as_mut() {
        order.shuffle(r);
    }
    for e in order {
        f.insert(e);
    }
    while !f.pending.is_empty() {
        let i = match rng.as_mut() {
            Some(r) => r.gen_range(0..f.pending.len()),
            None => f.pending.len() - 1,
        };
        let (a, b) = f.pending.swap_remove(i);
        f.merge_edges(a, b);
    }

    let mut vid = vec![usize::MAX; g.vertex_count];
    let mut out = Graph::new(0);
    let mut vimg = Vec::new();
    for v in 0..g.vertex_count {
        let r = f.verts.find(v);
        if vid[r] == usize::MAX {
            vid[r] = out.add_vertex();
            vimg.push(m.vertex_map[v]);
        }
        vid[v] = vid[r];
    }
    let mut hid = vec![usize::MAX; g.half_edge_count()];
    let mut himg = Vec::new();
    for e in 0..g.half_edge_count() {
        let r = f.halves.find(e);
        if hid[r] == usize::MAX {
            let ri = f.halves.find(g.inv(e));
            let n = out.add_edge(vid[g.origin(e)], vid[g.target(e)], g.color[e]);
            hid[r] = n;
            hid[ri] = n + 1;
            himg.push(f.image[e]);
            himg.push(m.target.inv(f.image[e]));
        }
        hid[e] = hid[r];
    }
    let out = Arc::new(out);
    let projection = GraphMorphism::combinatorial(
        m.source.clone(),
        out.clone(),
        vid,
        (0..g.half_edge_count())
            .map(|e| hid[f.halves.find(e)])
            .collect(),
    );
    let immersion = GraphMorphism::combinatorial(out.clone(), m.target.clone(), vimg, himg);
    Ok(Folded {
        graph: out,
        immersion,
        projection,
    })
}

pub fn fold(m: &GraphMorphism) -> Result<Folded> {
    fold_seeded(m, None)
}

/// Identifies two half-edges with a common origin and image: one fold.
pub fn single_fold(g: &Graph, a: usize, b: usize) -> Result<(Graph, GraphMorphism)> {
    if g.origin(a) != g.origin(b) || a == b || g.inv(a) == b {
        return Err(Error::InvalidArgument(format!(
            "half-edges {a} and {b} cannot be folded"
        )));
    }
    let (ta, tb) = (g.target(a), g.target(b));
    let (keep, gone) = (ta.min(tb), ta.max(tb));
    let vmap: Vec<usize> = (0..g.vertex_count)
        .map(|v| {
            let v = if v == gone { keep } else { v };
            if v > gone && keep != gone {
                v - 1
            } else {
                v
            }
        })
        .collect();
    let mut out = Graph::new(if keep == gone {
        g.vertex_count
    } else {
        g.vertex_count - 1
    });
    let mut edge_map = vec![Vec::new(); g.half_edge_count()];
    for r in g.edge_reps() {
        if r == b || r == g.inv(b) {
            continue;
        }
        let n = out.add_edge(vmap[g.origin(r)], vmap[g.target(r)], g.color[r]);
        edge_map[r] = vec![n];
        edge_map[g.inv(r)] = vec![n + 1];
    }
    edge_map[b] = edge_map[a].clone();
    edge_map[g.inv(b)] = edge_map[g.inv(a)].clone();
    let m = GraphMorphism::new(g.clone(), out.clone(), vmap, edge_map);
    Ok((out, m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveKind {
    /// Collapse of a constant edge. A constant loop cannot be collapsed
    /// homotopically and is deleted instead, with `loop_deleted` set.
    Collapse {
        half_edge: usize,
        loop_deleted: bool,
    },
    Subdivision {
        half_edge: usize,
        pieces: usize,
    },
    Fold {
        a: usize,
        b: usize,
    },
}

/// One elementary move: `map` goes from the previous intermediate graph to
/// the next one (`map.target`).
#[derive(Clone, Debug)]
pub struct Move {
    pub kind: MoveKind,
    pub map: GraphMorphism,
}

#[derive(Clone, Debug)]
pub struct Factorization {
    pub moves: Vec<Move>,
    pub immersion: GraphMorphism,
}

impl Factorization {
    /// Y -> Ȳ.
    pub fn sigma(&self, source: Arc<Graph>) -> GraphMorphism {
        self.moves
            .iter()
            .fold(GraphMorphism::identity(source), |acc, mv| acc.then(&mv.map))
    }

    pub fn collapsed_loop(&self) -> bool {
        self.moves.iter().any(|m| {
            matches!(
                m.kind,
                MoveKind::Collapse {
                    loop_deleted: true,
                    ..
                }
            )
        })
    }
}

fn delete_edge(g: &Graph, e: usize) -> (Graph, GraphMorphism) {
    let mut out = Graph::new(g.vertex_count);
    let mut edge_map = vec![Vec::new(); g.half_edge_count()];
    for r in g.edge_reps() {
        if r == e || r == g.inv(e) {
            continue;
        }
        let n = out.add_edge(g.origin(r), g.target(r), g.color[r]);
        edge_map[r] = vec![n];
        edge_map[g.inv(r)] = vec![n + 1];
    }
    let m = GraphMorphism::new(
        g.clone(),
        out.clone(),
        (0..g.vertex_count).collect(),
        edge_map,
    );
    (out, m)
}

/// Factors a monotone map as constant-edge collapses, then subdivisions,
/// then single folds, followed by an immersion.
pub fn factorize(m: &GraphMorphism) -> Result<Factorization> {
    let v = m.violations();
    if !v.is_empty() {
        return Err(Error::InvalidMorphism(v.join("; ")));
    }
    let mut moves = Vec::new();
    // `cur` is the remaining map from the current intermediate graph to X.
    let mut cur = m.clone();
    loop {
        let g = cur.source.clone();
        let Some(e) = g.edge_reps().find(|&e| cur.edge_map[e].is_empty()) else {
            break;
        };
        let loop_deleted = g.is_loop(e);
        let (_, step) = if loop_deleted {
            delete_edge(&g, e)
        } else {
            g.collapse_edge(e)?
        };
        cur = descend(&cur, &step);
        moves.push(Move {
            kind: MoveKind::Collapse {
                half_edge: e,
                loop_deleted,
            },
            map: step,
        });
    }
    loop {
        let g = cur.source.clone();
        let Some(e) = g.edge_reps().find(|&e| cur.edge_map[e].len() > 1) else {
            break;
        };
        let k = cur.edge_map[e].len();
        let (_, step) = g.subdivide_edge(e, k)?;
        let mut edge_map = vec![Vec::new(); step.target.half_edge_count()];
        let mut vertex_map = vec![0; step.target.vertex_count];
        for x in 0..g.vertex_count {
            vertex_map[step.vertex_map[x]] = cur.vertex_map[x];
        }
        for x in 0..g.half_edge_count() {
            let img = &step.edge_map[x];
            for (i, &h) in img.iter().enumerate() {
                let t = cur.edge_map[x][i];
                edge_map[h] = vec![t];
                vertex_map[step.target.target(h)] = cur.target.target(t);
            }
        }
        cur = GraphMorphism::from_arcs(
            step.target.clone(),
            cur.target.clone(),
            vertex_map,
            edge_map,
        );
        moves.push(Move {
            kind: MoveKind::Subdivision {
                half_edge: e,
                pieces: k,
            },
            map: step,
        });
    }
    loop {
        let g = cur.source.clone();
        let out = g.outgoing();
        let mut pair = None;
        'search: for v in 0..g.vertex_count {
            let mut seen: HashMap<usize, usize> = HashMap::new();
            for &e in &out[v] {
                if let Some(&f) = seen.get(&cur.image(e)) {
                    pair = Some((f, e));
                    break 'search;
                }
                seen.insert(cur.image(e), e);
            }
        }
        let Some((a, b)) = pair else { break };
        let (_, step) = single_fold(&g, a, b)?;
        cur = descend(&cur, &step);
        moves.push(Move {
            kind: MoveKind::Fold { a, b },
            map: step,
        });
    }
    Ok(Factorization {
        moves,
        immersion: cur,
    })
}

// Given `cur: G -> X` and a quotient-like `step: G -> G'` that is surjective
// and either deletes or collapses edges, returns the induced `G' -> X`.
fn descend(cur: &GraphMorphism, step: &GraphMorphism) -> GraphMorphism {
    let t = &step.target;
    let mut vertex_map = vec![0; t.vertex_count];
    for (x, &y) in step.vertex_map.iter().enumerate() {
        vertex_map[y] = cur.vertex_map[x];
    }
    let mut edge_map = vec![Vec::new(); t.half_edge_count()];
    for (x, p) in step.edge_map.iter().enumerate() {
        if p.len() == 1 {
            edge_map[p[0]] = cur.edge_map[x].clone();
        }
    }
    GraphMorphism::from_arcs(
        step.target.clone(),
        cur.target.clone(),
        vertex_map,
        edge_map,
    )
}

/// Fast factorization without recorded moves: returns σ: Y -> Ȳ, the
/// immersion Ȳ -> X, and the number of constant loops deleted.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub sigma: GraphMorphism,
    pub immersion: GraphMorphism,
    pub loops_deleted: usize,
}

pub fn reduce(m: &GraphMorphism) -> Result<Reduced> {
    let g = &*m.source;
    // Collapse constant edges with a union-find over vertices.
    let mut uf = UnionFind::new(g.vertex_count);
    let mut loops_deleted = 0;
    for e in g.edge_reps() {
        if m.edge_map[e].is_empty() {
            let (a, b) = (uf.find(g.origin(e)), uf.find(g.target(e)));
            if a == b {
                loops_deleted += 1;
            } else {
                uf.parent[b] = a;
            }
        }
    }
    let mut vid = vec![usize::MAX; g.vertex_count];
    let mut exp = Graph::new(0);
    let mut vimg = Vec::new();
    for v in 0..g.vertex_count {
        let r = uf.find(v);
        if vid[r] == usize::MAX {
            vid[r] = exp.add_vertex();
            vimg.push(m.vertex_map[v]);
        }
        vid[v] = vid[r];
    }
    // Subdivide along image paths.
    let mut himg = Vec::new();
    let mut pieces: Vec<Vec<usize>> = vec![Vec::new(); g.half_edge_count()];
    for e in g.edge_reps() {
        let p = &m.edge_map[e];
        if p.is_empty() {
            continue;
        }
        let mut prev = vid[g.origin(e)];
        let mut path = Vec::with_capacity(p.len());
        for (i, &h) in p.iter().enumerate() {
            let next = if i + 1 == p.len() {
                vid[g.target(e)]
            } else {
                let n = exp.add_vertex();
                vimg.push(m.target.target(h));
                n
            };
            let n = exp.add_edge(prev, next, g.color[e]);
            himg.push(h);
            himg.push(m.target.inv(h));
            path.push(n);
            prev = next;
        }
        pieces[g.inv(e)] = path.iter().rev().map(|&h| exp.inv(h)).collect();
        pieces[e] = path;
    }
    let exp = Arc::new(exp);
    let comb = GraphMorphism::combinatorial(exp.clone(), m.target.clone(), vimg, himg);
    let folded = fold(&comb)?;
    let sigma = GraphMorphism::from_arcs(
        m.source.clone(),
        folded.graph.clone(),
        (0..g.vertex_count)
            .map(|v| folded.projection.vertex_map[vid[v]])
            .collect(),
        pieces
            .iter()
            .map(|p| p.iter().map(|&h| folded.projection.image(h)).collect())
            .collect(),
    );
    Ok(Reduced {
        sigma,
        immersion: folded.immersion,
        loops_deleted,
    })
}

fn prune(g: &Graph, keep: Option<usize>) -> (Vec<bool>, Vec<bool>) {
    let mut alive_v = vec![true; g.vertex_count];
    let mut alive_h = vec![true; g.half_edge_count()];
    let mut deg = g.degree();
    let out = g.outgoing();
    let mut stack: Vec<usize> = (0..g.vertex_count)
        .filter(|&v| deg[v] <= 1 && Some(v) != keep)
        .collect();
    while let Some(v) = stack.pop() {
        if !alive_v[v] {
            continue;
        }
        alive_v[v] = false;
        for &e in &out[v] {
            if !alive_h[e] {
                continue;
            }
            alive_h[e] = false;
            alive_h[g.inv(e)] = false;
            let w = g.target(e);
            deg[w] -= 1;
            if alive_v[w] && deg[w] <= 1 && Some(w) != keep {
                stack.push(w);
            }
        }
    }
    (alive_v, alive_h)
}

fn restrict(g: &Graph, alive_v: &[bool], alive_h: &[bool]) -> (Graph, GraphMorphism) {
    let verts: Vec<usize> = (0..g.vertex_count).filter(|&v| alive_v[v]).collect();
    let edges: Vec<usize> = g.edge_reps().filter(|&e| alive_h[e]).collect();
    g.induced(&verts, &edges)
}

/// Unbased core: repeatedly removes vertices of valence at most one. Tree
/// components vanish entirely.
pub fn core_unbased(g: &Graph) -> (Graph, GraphMorphism) {
    let (v, h) = prune(g, None);
    restrict(g, &v, &h)
}

/// Based core of the component containing `basepoint`. Returns the core, its
/// basepoint and its inclusion into `g`.
pub fn core_based(g: &Graph, basepoint: usize) -> (Graph, usize, GraphMorphism) {
    let (label, _) = g.component_labels();
    let (mut v, mut h) = prune(g, Some(basepoint));
    for x in 0..g.vertex_count {
        if label[x] != label[basepoint] {
            v[x] = false;
        }
    }
    for e in 0..g.half_edge_count() {
        if label[g.target(e)] != label[basepoint] {
            h[e] = false;
        }
    }
    let (c, inc) = restrict(g, &v, &h);
    let bp = inc.vertex_map.iter().position(|&x| x == basepoint).unwrap();
    (c, bp, inc)
}
