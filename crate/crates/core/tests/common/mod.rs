//! Random inputs and oracles shared by the property suites and the
//! acceptance runner. Every check takes a seed and returns `Err(reason)` on
//! the first disagreement.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stature::fold::{core_based, core_unbased, fold, fold_seeded};
use stature::iso::color_isomorphic;
use stature::precover::fiber_product;
use stature::topology::{build_complex, homology_h1, simply_connected, Pi1Status, DEFAULT_BUDGET};
use stature::words::{self, Word};
use stature::{ColorLengthTable, Graph, GraphMorphism, Precover};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rose(rank: usize) -> Arc<Graph> {
    let colors: Vec<u32> = (0..rank as u32).collect();
    Arc::new(Graph::rose(&colors))
}

/// Random graph, connected when asked: a random spanning tree plus extra edges.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    max_extra: usize,
    colors: u32,
    connected: bool,
) -> Graph {
    let n = rng.gen_range(1..=max_vertices);
    let mut g = Graph::new(n);
    if connected {
        for v in 1..n {
            let u = rng.gen_range(0..v);
            let (a, b) = if rng.gen() { (u, v) } else { (v, u) };
            g.add_edge(a, b, rng.gen_range(0..colors));
        }
    }
    for _ in 0..rng.gen_range(0..=max_extra) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        g.add_edge(a, b, rng.gen_range(0..colors));
    }
    g
}

/// A combinatorial map onto a rose: each edge goes to the loop of its color,
/// in a random direction.
pub fn random_map_to_rose(
    rng: &mut ChaCha8Rng,
    x: &Arc<Graph>,
    max_vertices: usize,
    max_extra: usize,
) -> GraphMorphism {
    let colors = x.edge_count() as u32;
    let g = random_graph(rng, max_vertices, max_extra, colors, true);
    let mut half = vec![0; g.half_edge_count()];
    for e in g.edge_reps() {
        let loop_half = 2 * g.color[e] as usize + rng.gen_range(0..2);
        half[e] = loop_half;
        half[g.inv(e)] = x.inv(loop_half);
    }
    GraphMorphism::combinatorial(
        Arc::new(g.clone()),
        x.clone(),
        vec![0; g.vertex_count],
        half,
    )
}

pub fn random_generators(
    rng: &mut ChaCha8Rng,
    x: &Graph,
    count: usize,
    max_len: usize,
) -> Vec<Word> {
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            words::random_reduced(x, len, rng)
        })
        .collect()
}

/// Half prefix P(u): the first ⌈|u|/2⌉ letters.
fn half(u: &[usize]) -> &[usize] {
    &u[..u.len().div_ceil(2)]
}

/// Nielsen reduction by elementary moves, without any graph folding.
///
/// Length-reducing moves give N1: `|xy| >= max(|x|, |y|)` for distinct
/// `x, y` in `U ∪ U⁻¹`. The remaining danger is an even-length `x = pt`
/// with `p` a prefix of some other `y` and `t⁻¹` a prefix of some other `z`:
/// then `x` can cancel completely in `y⁻¹ x z`. Whichever of `y`, `z`
/// carries the larger half is rewritten to carry the smaller one. Total
/// length is unchanged, one half prefix gets lexicographically smaller and
/// no other half prefix moves, so the loop terminates.
pub fn nielsen_reduce(x: &Graph, gens: &[Word]) -> Vec<Word> {
    let mut u: Vec<Word> = gens
        .iter()
        .map(|g| words::reduce(x, g))
        .filter(|g| !g.is_empty())
        .collect();
    let signed = |u: &[Word], i: usize, s: bool| {
        if s {
            u[i].clone()
        } else {
            words::inverse(x, &u[i])
        }
    };
    'outer: loop {
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i == j {
                    continue;
                }
                for (si, sj) in [(true, true), (true, false), (false, true), (false, false)] {
                    let xy = words::concat(x, &[&signed(&u, i, si), &signed(&u, j, sj)]);
                    if xy.len() < u[j].len() {
                        // Replace the generator of y by xy.
                        if xy.is_empty() {
                            u.remove(j);
                        } else {
                            u[j] = xy;
                        }
                        continue 'outer;
                    }
                }
            }
        }
        let all: Vec<(usize, bool, Word)> = (0..u.len())
            .flat_map(|i| {
                [
                    (i, true, u[i].clone()),
                    (i, false, words::inverse(x, &u[i])),
                ]
            })
            .collect();
        for (i, _, xw) in &all {
            if xw.len() % 2 != 0 {
                continue;
            }
            let xinv = words::inverse(x, xw);
            let (p, q) = (half(xw), half(&xinv));
            let starts = |pre: &[usize]| {
                all.iter()
                    .find(|(j, _, w)| j != i && w.starts_with(pre))
                    .map(|(j, sj, _)| (*j, *sj))
            };
            if let (Some((jy, sy)), Some((jz, sz))) = (starts(p), starts(q)) {
                if q < p {
                    // y = p s becomes x⁻¹ y = t⁻¹ s.
                    let y = signed(&u, jy, sy);
                    let y2 = words::concat(x, &[&xinv, &y]);
                    u[jy] = if sy { y2 } else { words::inverse(x, &y2) };
                } else {
                    // z = t⁻¹ r becomes x z = p r.
                    let z = signed(&u, jz, sz);
                    let z2 = words::concat(x, &[xw, &z]);
                    u[jz] = if sz { z2 } else { words::inverse(x, &z2) };
                }
                continue 'outer;
            }
        }
        return u;
    }
}

/// Membership oracle that never folds: the reduced products of at most
/// `len` factors from a Nielsen-reduced generating set and its inverses.
/// Every factor keeps a letter in such a product, so this is complete for
/// words of length at most `len`, and a partial product is never longer than
/// the final word plus half a factor.
pub fn product_closure(x: &Graph, gens: &[Word], len: usize) -> HashSet<Word> {
    let u = nielsen_reduce(x, gens);
    let mut letters: Vec<Word> = u.clone();
    letters.extend(u.iter().map(|g| words::inverse(x, g)));
    let n = u.len();
    let slack = u.iter().map(|g| g.len() / 2).max().unwrap_or(0);
    let mut found = HashSet::from([Vec::new()]);
    // Depth-first over factor sequences with an in-place reduced prefix.
    fn go(
        x: &Graph,
        letters: &[Word],
        n: usize,
        prefix: &mut Word,
        last: Option<usize>,
        factors: usize,
        len: usize,
        slack: usize,
        found: &mut HashSet<Word>,
    ) {
        if factors == len {
            return;
        }
        for (k, l) in letters.iter().enumerate() {
            if last.is_some_and(|j| (j + n) % (2 * n) == k) {
                continue;
            }
            let mut popped = Vec::new();
            let mut pushed = 0;
            for &h in l {
                if pushed == 0 && prefix.last() == Some(&x.inv(h)) {
                    popped.push(prefix.pop().unwrap());
                } else {
                    prefix.push(h);
                    pushed += 1;
                }
            }
            if prefix.len() <= len + slack {
                if prefix.len() <= len {
                    found.insert(prefix.clone());
                }
                go(
                    x,
                    letters,
                    n,
                    prefix,
                    Some(k),
                    factors + 1,
                    len,
                    slack,
                    found,
                );
            }
            prefix.truncate(prefix.len() - pushed);
            prefix.extend(popped.into_iter().rev());
        }
    }
    go(
        x,
        &letters,
        n,
        &mut Vec::new(),
        None,
        0,
        len,
        slack,
        &mut found,
    );
    found
}

/// All reduced words of length at most `len` read as closed paths at the
/// basepoint, found by walking the graph. Dead branches are never expanded.
pub fn accepted_words(p: &Precover, len: usize) -> HashSet<Word> {
    let g = p.graph();
    let out = g.outgoing();
    let bp = p.basepoint.expect("based");
    let mut found = HashSet::new();
    let mut stack: Vec<(usize, Word)> = vec![(bp, Vec::new())];
    let x = p.target();
    while let Some((v, w)) = stack.pop() {
        if v == bp {
            found.insert(w.clone());
        }
        if w.len() == len {
            continue;
        }
        for &e in &out[v] {
            let h = p.map.image(e);
            if w.last() == Some(&x.inv(h)) {
                continue;
            }
            let mut next = w.clone();
            next.push(h);
            stack.push((g.target(e), next));
        }
    }
    found
}

fn describe(w: &Word) -> String {
    format!("{w:?}")
}

/// Compares the folded subgroup graph with the product oracle.
pub fn fold_membership(seed: u64) -> Check {
    let mut r = rng(seed);
    let x = rose(3);
    let count = r.gen_range(1..=3);
    let gens = random_generators(&mut r, &x, count, 6);
    let core = words::subgroup_graph(&x, 0, &gens).map_err(|e| e.to_string())?;
    let by_graph = accepted_words(&core, 8);
    let by_products = product_closure(&x, &gens, 8);
    if by_graph != by_products {
        let extra = by_graph.symmetric_difference(&by_products).next().unwrap();
        return Err(format!(
            "seed {seed}, generators {gens:?}: disagree on {}",
            describe(extra)
        ));
    }
    Ok(())
}

/// The based component of a fiber product accepts exactly the words lying
/// in both subgroups.
pub fn fiber_product_intersection(seed: u64) -> Check {
    let mut r = rng(seed);
    let x = rose(if seed.is_multiple_of(2) { 2 } else { 3 });
    let (c1, c2) = (r.gen_range(1..=3), r.gen_range(1..=3));
    let g1 = random_generators(&mut r, &x, c1, 6);
    let g2 = random_generators(&mut r, &x, c2, 6);
    let h1 = words::subgroup_graph(&x, 0, &g1).map_err(|e| e.to_string())?;
    let h2 = words::subgroup_graph(&x, 0, &g2).map_err(|e| e.to_string())?;
    let fp = fiber_product(&h1, &h2).map_err(|e| e.to_string())?;
    let based = fp.immersion.core_based().map_err(|e| e.to_string())?.0;
    let by_graph = accepted_words(&based, 8);
    let o1 = product_closure(&x, &g1, 8);
    let o2 = product_closure(&x, &g2, 8);
    let both: HashSet<Word> = o1.intersection(&o2).cloned().collect();
    if by_graph != both {
        let extra = by_graph.symmetric_difference(&both).next().unwrap();
        return Err(format!(
            "seed {seed}, H={g1:?}, K={g2:?}: disagree on {}",
            describe(extra)
        ));
    }
    Ok(())
}

fn same_as_map(f: &GraphMorphism, m: &GraphMorphism) -> bool {
    f.vertex_map == m.vertex_map && f.edge_map == m.edge_map
}

/// Twenty shuffled fold orders give precovers isomorphic over the target.
pub fn fold_confluence(seed: u64) -> Check {
    let mut r = rng(seed);
    let x = rose(3);
    let m = random_map_to_rose(&mut r, &x, 8, 12);
    let base = fold(&m).map_err(|e| e.to_string())?;
    let base_p = Precover::new(base.immersion.clone()).map_err(|e| e.to_string())?;
    for shuffle in 0..20 {
        let f = fold_seeded(&m, Some(seed.wrapping_mul(1000).wrapping_add(shuffle)))
            .map_err(|e| e.to_string())?;
        if !f.immersion.is_immersion() {
            return Err(format!("seed {seed}/{shuffle}: not an immersion"));
        }
        if !same_as_map(&f.projection.then(&f.immersion), &m) {
            return Err(format!(
                "seed {seed}/{shuffle}: folded ∘ projection differs from the input"
            ));
        }
        let p = Precover::new(f.immersion.clone()).map_err(|e| e.to_string())?;
        if color_isomorphic(&f.graph, &base.graph).is_none()
            || p.isomorphism_over(&base_p).is_none()
        {
            return Err(format!("seed {seed}/{shuffle}: fold orders disagree"));
        }
    }
    Ok(())
}

/// Cores of cores are the cores, based and unbased.
pub fn core_idempotence(seed: u64) -> Check {
    let mut r = rng(seed);
    let x = rose(3);
    let m = random_map_to_rose(&mut r, &x, 10, 8);
    let f = fold(&m).map_err(|e| e.to_string())?;
    let mut p = Precover::new(f.immersion).map_err(|e| e.to_string())?;
    p.basepoint = Some(r.gen_range(0..p.graph().vertex_count));
    let (c1, _) = p.core_based().map_err(|e| e.to_string())?;
    let (c2, _) = c1.core_based().map_err(|e| e.to_string())?;
    if c1.graph() != c2.graph() || c1.basepoint != c2.basepoint || c1.labels() != c2.labels() {
        return Err(format!("seed {seed}: based core is not idempotent"));
    }
    let (u1, _) = p.core_unbased();
    let (u2, _) = u1.core_unbased();
    if u1.graph() != u2.graph() || u1.labels() != u2.labels() {
        return Err(format!("seed {seed}: unbased core is not idempotent"));
    }
    let g = p.graph();
    let (raw, _) = core_unbased(g);
    let (raw2, _) = core_unbased(&raw);
    if raw != raw2 {
        return Err(format!("seed {seed}: graph core is not idempotent"));
    }
    let (rb, bp, _) = core_based(g, p.basepoint.unwrap());
    let (rb2, bp2, _) = core_based(&rb, bp);
    if rb != rb2 || bp != bp2 {
        return Err(format!("seed {seed}: based graph core is not idempotent"));
    }
    Ok(())
}

/// Colored cycles through a common vertex with one disk each.
pub fn wedge_of_capped_cycles(seed: u64) -> Check {
    let mut r = rng(seed);
    let petals = r.gen_range(1..=5);
    let mut lengths = ColorLengthTable::new();
    let mut g = Graph::new(1);
    for c in 0..petals as u32 {
        let len = r.gen_range(1..=6);
        lengths.insert(c, len);
        let mut prev = 0;
        for i in 0..len {
            let next = if i + 1 == len { 0 } else { g.add_vertex() };
            g.add_edge(prev, next, c);
            prev = next;
        }
    }
    let c = build_complex(&g, &lengths).map_err(|e| e.to_string())?;
    let v = simply_connected(&c, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    if v.status != Pi1Status::Trivial {
        return Err(format!("seed {seed}: {petals} petals gave {:?}", v.status));
    }
    Ok(())
}

/// Rank of an integer matrix over Q by fraction-free Gaussian elimination
/// in i128. Independent of the Smith normal form code.
pub fn rational_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let (f, g) = (a[rank][c], a[i][c]);
                for k in 0..cols {
                    a[i][k] = a[i][k] * f - a[rank][k] * g;
                }
                let d = a[i].iter().fold(0i128, |acc, &x| gcd(acc, x));
                if d > 1 {
                    a[i].iter_mut().for_each(|x| *x /= d);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Random connected union of monochrome cycles: cycles of random colors
/// glued at random existing vertices, sometimes sharing two vertices.
pub fn random_cycle_complex_graph(r: &mut ChaCha8Rng, lengths: &ColorLengthTable) -> Graph {
    let mut g = Graph::new(1);
    let cycles = r.gen_range(1..=6);
    let colors: Vec<u32> = lengths.keys().copied().collect();
    let mut used: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for _ in 0..cycles {
        let c = *colors.choose(r).unwrap();
        let len = lengths[&c];
        // Anchor at vertices with no edge of this color yet.
        let free: Vec<usize> = (0..g.vertex_count)
            .filter(|v| !used.get(v).is_some_and(|cs| cs.contains(&c)))
            .collect();
        if free.is_empty() {
            continue;
        }
        let mut verts = vec![*free.choose(r).unwrap()];
        for i in 1..len {
            // Occasionally reuse a vertex to create extra homology.
            let reuse: Vec<usize> = free
                .iter()
                .copied()
                .filter(|v| !verts.contains(v))
                .collect();
            if i == len / 2 && len > 2 && !reuse.is_empty() && r.gen_bool(0.4) {
                verts.push(*reuse.choose(r).unwrap());
            } else {
                verts.push(g.add_vertex());
            }
        }
        for i in 0..len {
            g.add_edge(verts[i], verts[(i + 1) % len], c);
        }
        for v in verts {
            used.entry(v).or_default().push(c);
        }
    }
    g
}

/// H_1 from the Smith normal form has the Betti number predicted by the
/// rank of the boundary matrix over Q.
pub fn homology_matches_rational_rank(seed: u64) -> Check {
    let mut r = rng(seed);
    let mut lengths = ColorLengthTable::new();
    for c in 0..3 {
        lengths.insert(c, r.gen_range(1..=5));
    }
    let g = random_cycle_complex_graph(&mut r, &lengths);
    let c = build_complex(&g, &lengths).map_err(|e| format!("seed {seed}: {e}"))?;
    let (betti, _) = homology_h1(&c).map_err(|e| e.to_string())?;
    // Boundary matrix straight from the skeleton: rows are disks, columns
    // are edge orbits. H_1 rank = rank(Z_1) - rank(B_1).
    let reps: Vec<usize> = g.edge_reps().collect();
    let rows: Vec<Vec<i64>> = c
        .disks
        .iter()
        .map(|d| {
            let mut row = vec![0i64; reps.len()];
            for &h in d {
                match reps.iter().position(|&e| e == h) {
                    Some(i) => row[i] += 1,
                    None => row[reps.iter().position(|&e| e == g.inv(h)).unwrap()] -= 1,
                }
            }
            row
        })
        .collect();
    let cycle_rank = g.edge_count() - g.vertex_count + 1;
    let expected = cycle_rank - rational_rank(&rows);
    if betti != expected {
        return Err(format!(
            "seed {seed}: SNF Betti {betti}, rational oracle {expected}"
        ));
    }
    Ok(())
}
