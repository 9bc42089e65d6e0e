//! Label-preserving graph isomorphism: color refinement, then backtracking.
//!
//! Half-edge labels are arbitrary integers that an isomorphism must preserve.
//! Plain color isomorphism uses the colors as labels; isomorphism of precovers
//! over a fixed target uses the image half-edges.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex_map: Vec<usize>,
    pub half_edge_map: Vec<usize>,
}

impl Isomorphism {
    pub fn inverse(&self) -> Isomorphism {
        let mut v = vec![0; self.vertex_map.len()];
        for (a, &b) in self.vertex_map.iter().enumerate() {
            v[b] = a;
        }
        let mut h = vec![0; self.half_edge_map.len()];
        for (a, &b) in self.half_edge_map.iter().enumerate() {
            h[b] = a;
        }
        Isomorphism {
            vertex_map: v,
            half_edge_map: h,
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Isomorphism) -> Isomorphism {
        Isomorphism {
            vertex_map: self
                .vertex_map
                .iter()
                .map(|&v| other.vertex_map[v])
                .collect(),
            half_edge_map: self
                .half_edge_map
                .iter()
                .map(|&e| other.half_edge_map[e])
                .collect(),
        }
    }

    /// True iff this is a label-preserving isomorphism g1 → g2.
    pub fn verify(&self, g1: &Graph, l1: &[u64], g2: &Graph, l2: &[u64]) -> bool {
        if self.vertex_map.len() != g1.vertex_count
            || self.half_edge_map.len() != g1.half_edge_count()
            || g1.vertex_count != g2.vertex_count
            || g1.half_edge_count() != g2.half_edge_count()
        {
            return false;
        }
        let mut vs = self.vertex_map.clone();
        vs.sort_unstable();
        if vs.iter().enumerate().any(|(i, &v)| i != v) {
            return false;
        }
        let mut hs = self.half_edge_map.clone();
        hs.sort_unstable();
        if hs.iter().enumerate().any(|(i, &h)| i != h) {
            return false;
        }
        (0..g1.half_edge_count()).all(|e| {
            let f = self.half_edge_map[e];
            l1[e] == l2[f]
                && g1.color[e] == g2.color[f]
                && self.half_edge_map[g1.inv(e)] == g2.inv(f)
                && self.vertex_map[g1.target(e)] == g2.target(f)
        })
    }
}

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

fn full_labels(g: &Graph, l: &[u64]) -> Vec<u64> {
    (0..g.half_edge_count())
        .map(|e| hash_of(&(l[e], g.color[e], g.is_loop(e))))
        .collect()
}

/// Stable vertex classes by iterated refinement over the given graphs taken
/// together, so that class ids are comparable between them.
fn refine(graphs: &[(&Graph, &[u64])]) -> Vec<Vec<u64>> {
    let outs: Vec<Vec<Vec<usize>>> = graphs.iter().map(|(g, _)| g.outgoing()).collect();
    let labels: Vec<Vec<u64>> = graphs.iter().map(|(g, l)| full_labels(g, l)).collect();
    let mut cls: Vec<Vec<u64>> = graphs
        .iter()
        .enumerate()
        .map(|(i, (g, _))| {
            (0..g.vertex_count)
                .map(|v| {
                    let mut s: Vec<u64> = outs[i][v].iter().map(|&e| labels[i][e]).collect();
                    s.sort_unstable();
                    hash_of(&s)
                })
                .collect()
        })
        .collect();
    let count = |c: &Vec<Vec<u64>>| {
        let mut all: Vec<u64> = c.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    let mut n = count(&cls);
    loop {
        let next: Vec<Vec<u64>> = graphs
            .iter()
            .enumerate()
            .map(|(i, (g, _))| {
                (0..g.vertex_count)
                    .map(|v| {
                        let mut s: Vec<(u64, u64)> = outs[i][v]
                            .iter()
                            .map(|&e| (labels[i][e], cls[i][g.target(e)]))
                            .collect();
                        s.sort_unstable();
                        hash_of(&(cls[i][v], s))
                    })
                    .collect()
            })
            .collect();
        let m = count(&next);
        cls = next;
        if m == n {
            return cls;
        }
        n = m;
    }
}

/// Isomorphism invariant of a labeled graph; equal graphs give equal values.
pub fn invariant(g: &Graph, l: &[u64]) -> u64 {
    let cls = refine(&[(g, l)]).pop().unwrap();
    let mut hist = cls;
    hist.sort_unstable();
    hash_of(&(g.vertex_count, g.half_edge_count(), hist))
}

struct Search<'a> {
    g1: &'a Graph,
    g2: &'a Graph,
    l1: Vec<u64>,
    l2: Vec<u64>,
    c1: Vec<u64>,
    c2: Vec<u64>,
    out1: Vec<Vec<usize>>,
    out2: Vec<Vec<usize>>,
    vm: Vec<usize>,
    vinv: Vec<usize>,
    hm: Vec<usize>,
    hinv: Vec<usize>,
    mapped_order: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl Search<'_> {
    fn solve(&mut self) -> bool {
        // Find a mapped vertex with an unmapped outgoing half-edge.
        let mut pick = None;
        for &v in &self.mapped_order {
            if let Some(&e) = self.out1[v].iter().find(|&&e| self.hm[e] == NONE) {
                pick = Some((v, e));
                break;
            }
        }
        match pick {
            Some((v, e)) => {
                let w = self.vm[v];
                let t1 = self.g1.target(e);
                let cands: Vec<usize> = self.out2[w]
                    .iter()
                    .copied()
                    .filter(|&f| {
                        let t2 = self.g2.target(f);
                        self.hinv[f] == NONE
                            && self.l1[e] == self.l2[f]
                            && self.l1[self.g1.inv(e)] == self.l2[self.g2.inv(f)]
                            && self.c1[t1] == self.c2[t2]
                            && (self.vm[t1] == NONE || self.vm[t1] == t2)
                            && (self.vinv[t2] == NONE || self.vinv[t2] == t1)
                            && self.g1.is_loop(e) == self.g2.is_loop(f)
                    })
                    .collect();
                for f in cands {
                    let (ei, fi) = (self.g1.inv(e), self.g2.inv(f));
                    if self.hinv[fi] != NONE || self.hm[ei] != NONE {
                        continue;
                    }
                    let t1 = self.g1.target(e);
                    let t2 = self.g2.target(f);
                    let new_vertex = self.vm[t1] == NONE;
                    self.hm[e] = f;
                    self.hinv[f] = e;
                    self.hm[ei] = fi;
                    self.hinv[fi] = ei;
                    if new_vertex {
                        self.vm[t1] = t2;
                        self.vinv[t2] = t1;
                        self.mapped_order.push(t1);
                    }
                    if self.solve() {
                        return true;
                    }
                    if new_vertex {
                        self.vm[t1] = NONE;
                        self.vinv[t2] = NONE;
                        self.mapped_order.pop();
                    }
                    self.hm[e] = NONE;
                    self.hinv[f] = NONE;
                    self.hm[ei] = NONE;
                    self.hinv[fi] = NONE;
                }
                false
            }
            None => {
                let Some(v) = (0..self.g1.vertex_count).find(|&v| self.vm[v] == NONE) else {
                    return true;
                };
                let cands: Vec<usize> = (0..self.g2.vertex_count)
                    .filter(|&w| self.vinv[w] == NONE && self.c2[w] == self.c1[v])
                    .collect();
                for w in cands {
                    self.vm[v] = w;
                    self.vinv[w] = v;
                    self.mapped_order.push(v);
                    if self.solve() {
                        return true;
                    }
                    self.vm[v] = NONE;
                    self.vinv[w] = NONE;
                    self.mapped_order.pop();
                }
                false
            }
        }
    }
}

/// Finds a label-preserving isomorphism g1 → g2 (colors are always preserved).
/// Deterministic for fixed inputs.
pub fn isomorphism(g1: &Graph, l1: &[u64], g2: &Graph, l2: &[u64]) -> Option<Isomorphism> {
    if g1.vertex_count != g2.vertex_count || g1.half_edge_count() != g2.half_edge_count() {
        return None;
    }
    let mut cls = refine(&[(g1, l1), (g2, l2)]);
    let c2 = cls.pop().unwrap();
    let c1 = cls.pop().unwrap();
    let mut h1 = c1.clone();
    let mut h2 = c2.clone();
    h1.sort_unstable();
    h2.sort_unstable();
    if h1 != h2 {
        return None;
    }
    let mut s = Search {
        g1,
        g2,
        l1: full_labels(g1, l1),
        l2: full_labels(g2, l2),
        c1,
        c2,
        out1: g1.outgoing(),
        out2: g2.outgoing(),
        vm: vec![NONE; g1.vertex_count],
        vinv: vec![NONE; g2.vertex_count],
        hm: vec![NONE; g1.half_edge_count()],
        hinv: vec![NONE; g2.half_edge_count()],
        mapped_order: Vec::new(),
    };
    if s.solve() {
        Some(Isomorphism {
            vertex_map: s.vm,
            half_edge_map: s.hm,
        })
    } else {
        None
    }
}

/// Color-preserving isomorphism of plain colored graphs.
pub fn color_isomorphic(g1: &Graph, g2: &Graph) -> Option<Isomorphism> {
    let l1: Vec<u64> = g1.color.iter().map(|&c| c as u64).collect();
    let l2: Vec<u64> = g2.color.iter().map(|&c| c as u64).collect();
    isomorphism(g1, &l1, g2, &l2)
}

/// Buckets items by invariant so repeated lookups only compare likely matches.
#[derive(Default, Debug, Clone)]
pub struct InvariantIndex {
    buckets: HashMap<u64, Vec<usize>>,
}

impl InvariantIndex {
    pub fn candidates(&self, inv: u64) -> &[usize] {
        self.buckets.get(&inv).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn insert(&mut self, inv: u64, id: usize) {
        self.buckets.entry(inv).or_default().push(id);
    }
}
