//! Words as half-edge paths in a target graph, and subgroup graphs.
//!
//! On a rose, half-edge `2i` reads generator `i` and `2i + 1` its inverse.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fold;
use crate::graph::Graph;
use crate::morphism::GraphMorphism;
use crate::precover::Precover;

pub type Word = Vec<usize>;

/// Free reduction: cancels adjacent `e ē`.
pub fn reduce(x: &Graph, w: &[usize]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &h in w {
        if out.last() == Some(&x.inv(h)) {
            out.pop();
        } else {
            out.push(h);
        }
    }
    out
}

pub fn inverse(x: &Graph, w: &[usize]) -> Word {
    w.iter().rev().map(|&h| x.inv(h)).collect()
}

pub fn concat(x: &Graph, parts: &[&[usize]]) -> Word {
    let all: Word = parts.iter().flat_map(|p| p.iter().copied()).collect();
    reduce(x, &all)
}

/// `a⁻¹ w a`.
pub fn conjugate(x: &Graph, w: &[usize], a: &[usize]) -> Word {
    concat(x, &[&inverse(x, a), w, a])
}

pub fn is_closed_at(x: &Graph, w: &[usize], base: usize) -> bool {
    let mut v = base;
    for &h in w {
        if x.origin(h) != v {
            return false;
        }
        v = x.target(h);
    }
    v == base
}

/// Stallings graph of the subgroup generated by closed words at `base`:
/// a bouquet of subdivided petals, folded, then cut to the based core.
pub fn subgroup_graph(x: &Arc<Graph>, base: usize, gens: &[Word]) -> Result<Precover> {
    let mut g = Graph::new(1);
    let mut vmap = vec![base];
    let mut half = Vec::new();
    for w in gens {
        if !is_closed_at(x, w, base) {
            return Err(Error::InvalidArgument(
                "generator is not a closed path at the base vertex".into(),
            ));
        }
        let w = reduce(x, w);
        let mut prev = 0;
        for (i, &h) in w.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                vmap.push(x.target(h));
                g.add_vertex()
            };
            g.add_edge(prev, next, x.color[h]);
            half.push(h);
            half.push(x.inv(h));
            prev = next;
        }
    }
    let m = GraphMorphism::combinatorial(Arc::new(g), x.clone(), vmap, half);
    let folded = fold::fold(&m)?;
    let bp = folded.projection.vertex_map[0];
    let p = Precover::based(folded.immersion, bp)?;
    Ok(p.core_based()?.0)
}

/// Reads `w` from the basepoint; true iff it lifts to a closed path.
pub fn accepts(p: &Precover, w: &[usize]) -> bool {
    let Some(mut v) = p.basepoint else {
        return false;
    };
    let g = p.graph();
    let out = g.outgoing();
    for &h in w {
        match out[v].iter().find(|&&e| p.map.image(e) == h) {
            Some(&e) => v = g.target(e),
            None => return false,
        }
    }
    Some(v) == p.basepoint
}

/// Lifts `w` from vertex `v`; returns the lifted half-edges if it lifts.
pub fn lift(p: &Precover, v: usize, w: &[usize]) -> Option<Vec<usize>> {
    let g = p.graph();
    let out = g.outgoing();
    let mut cur = v;
    let mut path = Vec::with_capacity(w.len());
    for &h in w {
        let &e = out[cur].iter().find(|&&e| p.map.image(e) == h)?;
        path.push(e);
        cur = g.target(e);
    }
    Some(path)
}

/// Free basis read off a spanning tree at the basepoint, as target words.
pub fn basis(p: &Precover) -> Result<Vec<Word>> {
    let bp = p
        .basepoint
        .ok_or_else(|| Error::InvalidArgument("precover has no basepoint".into()))?;
    let g = p.graph();
    let paths = tree_paths(g, bp);
    let x = &**p.target();
    let mut out = Vec::new();
    for e in g.edge_reps() {
        let (Some(a), Some(b)) = (&paths.0[g.origin(e)], &paths.0[g.target(e)]) else {
            continue;
        };
        if paths.1[g.target(e)] == Some(e) || paths.1[g.origin(e)] == Some(g.inv(e)) {
            continue;
        }
        let img = |q: &[usize]| q.iter().map(|&h| p.map.image(h)).collect::<Word>();
        let w = concat(x, &[&img(a), &[p.map.image(e)], &inverse(x, &img(b))]);
        out.push(w);
    }
    Ok(out)
}

/// BFS tree from `root`: the tree path to each vertex and its tree half-edge.
pub fn tree_paths(g: &Graph, root: usize) -> (Vec<Option<Vec<usize>>>, Vec<Option<usize>>) {
    let out = g.outgoing();
    let mut path: Vec<Option<Vec<usize>>> = vec![None; g.vertex_count];
    let mut via = vec![None; g.vertex_count];
    path[root] = Some(Vec::new());
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &e in &out[v] {
            let w = g.target(e);
            if path[w].is_none() {
                let mut p = path[v].clone().unwrap();
                p.push(e);
                path[w] = Some(p);
                via[w] = Some(e);
                queue.push_back(w);
            }
        }
    }
    (path, via)
}

/// Uniform random reduced word of the given length on a rose.
pub fn random_reduced<R: Rng>(x: &Graph, len: usize, rng: &mut R) -> Word {
    let n = x.half_edge_count();
    let mut w: Word = Vec::with_capacity(len);
    while w.len() < len {
        let h = rng.gen_range(0..n);
        if w.last() != Some(&x.inv(h)) {
            w.push(h);
        }
    }
    w
}

/// All reduced words of length at most `len` on a rose.
pub fn all_reduced(x: &Graph, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for h in 0..x.half_edge_count() {
                if w.last() != Some(&x.inv(h)) {
                    let mut v: Word = w.clone();
                    v.push(h);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
