//! Finite colored graphs in half-edge form.
//!
//! A half-edge `e` points at `endpoint[e]` and its reverse is `involution[e]`.
//! An edge is an involution orbit. Vertex and half-edge ids are dense indices.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::morphism::GraphMorphism;

pub type Color = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub vertex_count: usize,
    /// τ: the vertex a half-edge points at.
    pub endpoint: Vec<usize>,
    /// The map e ↦ ē.
    pub involution: Vec<usize>,
    pub color: Vec<Color>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasedGraph {
    pub graph: Graph,
    pub basepoint: usize,
}

/// Color id to cycle length ℓ_i.
pub type ColorLengthTable = std::collections::BTreeMap<Color, usize>;

impl Graph {
    pub fn new(vertex_count: usize) -> Self {
        Graph {
            vertex_count,
            endpoint: Vec::new(),
            involution: Vec::new(),
            color: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    /// Adds an edge `from -> to` and returns the half-edge pointing at `to`.
    /// Its reverse is the returned id plus one.
    pub fn add_edge(&mut self, from: usize, to: usize, color: Color) -> usize {
        let e = self.endpoint.len();
        self.endpoint.push(to);
        self.endpoint.push(from);
        self.involution.push(e + 1);
        self.involution.push(e);
        self.color.push(color);
        self.color.push(color);
        e
    }

    pub fn half_edge_count(&self) -> usize {
        self.endpoint.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoint.len() / 2
    }

    #[inline]
    pub fn inv(&self, e: usize) -> usize {
        self.involution[e]
    }

    #[inline]
    pub fn target(&self, e: usize) -> usize {
        self.endpoint[e]
    }

    #[inline]
    pub fn origin(&self, e: usize) -> usize {
        self.endpoint[self.involution[e]]
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.target(e) == self.origin(e)
    }

    /// One representative half-edge per orbit (the smaller id).
    pub fn edge_reps(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.half_edge_count()).filter(move |&e| e < self.involution[e])
    }

    /// Half-edges starting at each vertex, in increasing id order.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertex_count];
        for e in 0..self.half_edge_count() {
            out[self.origin(e)].push(e);
        }
        out
    }

    pub fn degree(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for &v in &self.endpoint {
            d[v] += 1;
        }
        d
    }

    pub fn colors(&self) -> Vec<Color> {
        let mut c = self.color.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let h = self.endpoint.len();
        if self.involution.len() != h {
            out.push(format!(
                "involution has {} entries but there are {} half-edges",
                self.involution.len(),
                h
            ));
        }
        if self.color.len() != h {
            out.push(format!(
                "color has {} entries but there are {} half-edges",
                self.color.len(),
                h
            ));
        }
        for (e, &v) in self.endpoint.iter().enumerate() {
            if v >= self.vertex_count {
                out.push(format!(
                    "endpoint of half-edge {e} is undeclared vertex {v}"
                ));
            }
        }
        for (e, &f) in self.involution.iter().enumerate() {
            if f >= h {
                out.push(format!(
                    "involution maps half-edge {e} to undeclared half-edge {f}"
                ));
            } else if f == e {
                out.push(format!("involution has fixed point {e}"));
            } else if self.involution.get(f) != Some(&e) {
                out.push(format!("involution is not of order 2 at half-edge {e}"));
            } else if e < f {
                if let (Some(a), Some(b)) = (self.color.get(e), self.color.get(f)) {
                    if a != b {
                        out.push(format!(
                            "color differs on the orbit {{{e}, {f}}}: {a} vs {b}"
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count <= 1 || self.component_labels().1 == 1
    }

    /// Component label per vertex, plus the number of components.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let out = self.outgoing();
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut n = 0;
        for s in 0..self.vertex_count {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = n;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &e in &out[v] {
                    let w = self.target(e);
                    if label[w] == usize::MAX {
                        label[w] = n;
                        queue.push_back(w);
                    }
                }
            }
            n += 1;
        }
        (label, n)
    }

    pub fn euler_rank(&self) -> Result<i64> {
        if !self.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok(self.edge_count() as i64 - self.vertex_count as i64 + 1)
    }

    /// Connected components with their inclusion morphisms into `self`.
    pub fn connected_components(&self) -> Vec<(Graph, GraphMorphism)> {
        let (label, n) = self.component_labels();
        (0..n)
            .map(|c| {
                let verts: Vec<usize> = (0..self.vertex_count).filter(|&v| label[v] == c).collect();
                let edges: Vec<usize> = self
                    .edge_reps()
                    .filter(|&e| label[self.target(e)] == c)
                    .collect();
                self.induced(&verts, &edges)
            })
            .collect()
    }

    /// Subgraph on the listed vertices and edge orbits (given by any half-edge),
    /// with its inclusion.
    pub fn induced(&self, verts: &[usize], edges: &[usize]) -> (Graph, GraphMorphism) {
        let mut new_id = vec![usize::MAX; self.vertex_count];
        for (i, &v) in verts.iter().enumerate() {
            new_id[v] = i;
        }
        let mut g = Graph::new(verts.len());
        let mut half_map = Vec::with_capacity(edges.len() * 2);
        for &e in edges {
            let f = self.inv(e);
            g.add_edge(
                new_id[self.origin(e)],
                new_id[self.target(e)],
                self.color[e],
            );
            half_map.push(vec![e]);
            half_map.push(vec![f]);
        }
        let m = GraphMorphism::new(g.clone(), self.clone(), verts.to_vec(), half_map);
        (g, m)
    }

    /// Replaces the edge of `e` by a path of `k` edges. Returns the new graph
    /// and the monotone map from `self` to it.
    pub fn subdivide_edge(&self, e: usize, k: usize) -> Result<(Graph, GraphMorphism)> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "subdivision needs k >= 2, got {k}"
            )));
        }
        if e >= self.half_edge_count() {
            return Err(Error::InvalidArgument(format!("no half-edge {e}")));
        }
        let mut g = Graph::new(self.vertex_count);
        let mut edge_map = vec![Vec::new(); self.half_edge_count()];
        for r in self.edge_reps() {
            if r == e || r == self.inv(e) {
                continue;
            }
            let n = g.add_edge(self.origin(r), self.target(r), self.color[r]);
            edge_map[r] = vec![n];
            edge_map[self.inv(r)] = vec![n + 1];
        }
        let mut prev = self.origin(e);
        let mut path = Vec::with_capacity(k);
        for i in 0..k {
            let next = if i + 1 == k {
                self.target(e)
            } else {
                g.add_vertex()
            };
            path.push(g.add_edge(prev, next, self.color[e]));
            prev = next;
        }
        let rev: Vec<usize> = path.iter().rev().map(|&h| g.inv(h)).collect();
        edge_map[self.inv(e)] = rev;
        edge_map[e] = path;
        let vmap = (0..self.vertex_count).collect();
        let m = GraphMorphism::new(self.clone(), g.clone(), vmap, edge_map);
        Ok((g, m))
    }

    /// Collapses the edge of `e` to a point. Loops are refused.
    pub fn collapse_edge(&self, e: usize) -> Result<(Graph, GraphMorphism)> {
        if e >= self.half_edge_count() {
            return Err(Error::InvalidArgument(format!("no half-edge {e}")));
        }
        if self.is_loop(e) {
            return Err(Error::LoopCollapse);
        }
        let (keep, gone) = (self.origin(e), self.target(e));
        let vmap: Vec<usize> = (0..self.vertex_count)
            .map(|v| {
                let v = if v == gone { keep } else { v };
                if v > gone {
                    v - 1
                } else {
                    v
                }
            })
            .collect();
        let mut g = Graph::new(self.vertex_count - 1);
        let mut edge_map = vec![Vec::new(); self.half_edge_count()];
        for r in self.edge_reps() {
            if r == e || r == self.inv(e) {
                continue;
            }
            let n = g.add_edge(vmap[self.origin(r)], vmap[self.target(r)], self.color[r]);
            edge_map[r] = vec![n];
            edge_map[self.inv(r)] = vec![n + 1];
        }
        let m = GraphMorphism::new(self.clone(), g.clone(), vmap, edge_map);
        Ok((g, m))
    }

    /// Disjoint union; the second graph's ids are shifted.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        let (dv, dh) = (self.vertex_count, self.half_edge_count());
        g.vertex_count += other.vertex_count;
        g.endpoint.extend(other.endpoint.iter().map(|v| v + dv));
        g.involution.extend(other.involution.iter().map(|e| e + dh));
        g.color.extend(other.color.iter().copied());
        g
    }

    /// Rose with one loop per listed color, at a single vertex.
    pub fn rose(colors: &[Color]) -> Graph {
        let mut g = Graph::new(1);
        for &c in colors {
            g.add_edge(0, 0, c);
        }
        g
    }

    /// Directed cycle of length `n` in one color.
    pub fn cycle(n: usize, color: Color) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, color);
        }
        g
    }

    /// Checks that every color class is a disjoint union of embedded cycles.
    /// Returns one message per offending color.
    pub fn monochrome_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in self.colors() {
            let mut deg = vec![0usize; self.vertex_count];
            for e in 0..self.half_edge_count() {
                if self.color[e] == c {
                    deg[self.target(e)] += 1;
                }
            }
            let bad: Vec<usize> = (0..self.vertex_count)
                .filter(|&v| deg[v] != 0 && deg[v] != 2)
                .collect();
            if !bad.is_empty() {
                out.push(format!(
                    "color {c} subgraph is not a union of cycles (vertices {bad:?} have color degree other than 0 or 2)"
                ));
            }
        }
        out
    }

    /// Monochrome cycles as closed half-edge paths. Assumes every color class
    /// has degree 0 or 2 at each vertex. Each cycle starts at its smallest
    /// half-edge and follows that direction.
    pub fn monochrome_cycles(&self) -> Vec<Vec<usize>> {
        let out = self.outgoing();
        let mut seen = vec![false; self.half_edge_count()];
        let mut cycles = Vec::new();
        for s in 0..self.half_edge_count() {
            if seen[s] || seen[self.inv(s)] {
                continue;
            }
            let c = self.color[s];
            let mut cyc = Vec::new();
            let mut e = s;
            loop {
                seen[e] = true;
                seen[self.inv(e)] = true;
                cyc.push(e);
                let v = self.target(e);
                let back = self.inv(e);
                let next = out[v]
                    .iter()
                    .copied()
                    .find(|&f| self.color[f] == c && f != back && !seen[f]);
                match next {
                    Some(f) => e = f,
                    None => break,
                }
            }
            cycles.push(cyc);
        }
        cycles
    }

    /// Checks lengths of monochrome cycles against the table.
    pub fn length_violations(&self, lengths: &ColorLengthTable) -> Vec<String> {
        let mut out = Vec::new();
        for cyc in self.monochrome_cycles() {
            let c = self.color[cyc[0]];
            match lengths.get(&c) {
                None => out.push(format!("color {c} has no entry in the length table")),
                Some(&l) if l != cyc.len() => out.push(format!(
                    "color {c} cycle through half-edge {} has length {} but the table says {l}",
                    cyc[0],
                    cyc.len()
                )),
                _ => {}
            }
        }
        out.sort();
        out.dedup();
        out
    }
}
