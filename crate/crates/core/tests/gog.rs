mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use stature::artin::{make_preset, ArtinPreset, Labels};
use stature::gog::{beta_twist, sigma_pull, sigma_push, validate_gog, SigmaExtension};
use stature::precover::fiber_product;
use stature::words::{self, tree_paths, Word};
use stature::{Graph, GraphMorphism, Precover};

fn preset(m: u32, n: u32, p: u32) -> ArtinPreset {
    make_preset(Labels::finite(m, n, p)).unwrap()
}

/// A random closed path at `v`: a non-backtracking walk, then back along
/// the BFS tree.
fn random_loop(r: &mut ChaCha8Rng, x: &Graph, v: usize, steps: usize) -> Word {
    let out = x.outgoing();
    let mut w: Word = Vec::new();
    let mut cur = v;
    for _ in 0..steps {
        let choices: Vec<usize> = out[cur]
            .iter()
            .copied()
            .filter(|&h| w.last() != Some(&x.inv(h)))
            .collect();
        let Some(&h) = choices.choose(r) else { break };
        w.push(h);
        cur = x.target(h);
    }
    let (paths, _) = tree_paths(x, v);
    let back = words::inverse(x, paths[cur].as_ref().unwrap());
    words::concat(x, &[&w, &back])
}

fn random_core(r: &mut ChaCha8Rng, xc: &Arc<Graph>) -> Option<Precover> {
    let v = r.gen_range(0..xc.vertex_count);
    let count = r.gen_range(1..=3);
    let gens: Vec<Word> = (0..count)
        .map(|_| {
            let steps = r.gen_range(1..=12);
            random_loop(r, xc, v, steps)
        })
        .collect();
    let p = words::subgroup_graph(xc, v, &gens).ok()?;
    (p.graph().edge_count() > 0).then_some(p)
}

/// Union of whole monochrome cycles of X_C, as an included subgraph.
fn random_cycle_union(r: &mut ChaCha8Rng, xc: &Arc<Graph>) -> Precover {
    let cycles = xc.monochrome_cycles();
    let mut edges: Vec<usize> = Vec::new();
    for c in cycles {
        if r.gen_bool(0.4) {
            edges.extend(c);
        }
    }
    if edges.is_empty() {
        edges.extend(xc.monochrome_cycles()[0].iter().copied());
    }
    let mut verts: Vec<usize> = edges
        .iter()
        .flat_map(|&h| [xc.origin(h), xc.target(h)])
        .collect();
    verts.sort_unstable();
    verts.dedup();
    let (_, inc) = xc.induced(&verts, &edges);
    Precover::new(inc.retarget(xc.clone())).unwrap()
}

const PRESETS: [(u32, u32, u32); 4] = [(3, 3, 3), (5, 5, 5), (3, 4, 4), (4, 5, 5)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn sigma_keeps_rank(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (m, n, p) = *PRESETS.choose(&mut r).unwrap();
        let pre = preset(m, n, p);
        let ext = SigmaExtension::new(&pre.data.attaching[0]).unwrap();
        if let Some(y) = random_core(&mut r, &ext.xc) {
            let (ybar, sig) = sigma_push(&ext, &y).unwrap();
            prop_assert_eq!(y.rank().unwrap(), ybar.rank().unwrap());
            // The square commutes.
            let left = sig.then(&ybar.map).then(&ext.iota);
            let right = y.map.then(&ext.sigma).then(&ext.iota);
            prop_assert_eq!(left.vertex_map, right.vertex_map);
        }
    }

    #[test]
    fn pull_then_push_is_identity(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (m, n, p) = *PRESETS.choose(&mut r).unwrap();
        let pre = preset(m, n, p);
        let ext = SigmaExtension::new(&pre.data.attaching[0]).unwrap();
        if let Some(y) = random_core(&mut r, &ext.xc) {
            let (ybar, _) = sigma_push(&ext, &y).unwrap();
            let (core, _) = ybar.core_unbased();
            let up = sigma_pull(&ext, &core).unwrap();
            let (down, _) = sigma_push(&ext, &up).unwrap();
            prop_assert!(down.isomorphism_over(&core).is_some());
        }
    }

    #[test]
    fn pushed_cycle_unions_have_the_table_lengths(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (m, n, p) = *PRESETS.choose(&mut r).unwrap();
        let pre = preset(m, n, p);
        let ext = SigmaExtension::new(&pre.data.attaching[0]).unwrap();
        let a = random_cycle_union(&mut r, &ext.xc);
        let b = random_cycle_union(&mut r, &ext.xc);
        let fp = fiber_product(&a, &b).unwrap();
        prop_assert!(fp.graph.monochrome_violations().is_empty());
        for (comp, _) in fp.immersion.components() {
            let (ybar, _) = sigma_push(&ext, &comp).unwrap();
            prop_assert!(ybar.graph().monochrome_violations().is_empty());
            prop_assert!(ybar.graph().length_violations(&pre.data.lengths).is_empty());
        }
    }
}

#[test]
fn presets_validate() {
    for (m, n, p) in PRESETS
        .iter()
        .copied()
        .chain([(5, 4, 4), (3, 3, 5), (5, 5, 7)])
    {
        let pre = preset(m, n, p);
        assert!(validate_gog(&pre.data).is_empty(), "{m},{n},{p}");
    }
}

#[test]
fn broken_length_table_gives_one_violation() {
    let mut g = preset(5, 5, 5).data;
    *g.lengths.get_mut(&1).unwrap() += 1;
    let v = validate_gog(&g);
    assert_eq!(v.len(), 1, "{v:?}");
}

#[test]
fn a_path_where_a_cycle_should_be() {
    let mut g = preset(3, 3, 3).data;
    // Drop one edge of color 0 from X_C.
    let xc = &*g.edge_graphs[0];
    let victim = xc.edge_reps().find(|&e| xc.color[e] == 0).unwrap();
    let keep: Vec<usize> = xc.edge_reps().filter(|&e| e != victim).collect();
    let verts: Vec<usize> = (0..xc.vertex_count).collect();
    let (smaller, inc) = xc.induced(&verts, &keep);
    let smaller = Arc::new(smaller);
    let restrict = |phi: &GraphMorphism| {
        GraphMorphism::from_arcs(
            smaller.clone(),
            phi.target.clone(),
            phi.vertex_map.clone(),
            {
                inc.edge_map
                    .iter()
                    .map(|p| phi.edge_map[p[0]].clone())
                    .collect()
            },
        )
    };
    g.attaching = g.attaching.iter().map(restrict).collect();
    g.edge_graphs[0] = smaller.clone();
    g.beta = None;
    let v = validate_gog(&g);
    assert!(v.iter().any(|s| s.contains("not a union of")), "{v:?}");
}

#[test]
fn base_cases() {
    let pre = preset(5, 5, 5);
    let ext = SigmaExtension::new(&pre.data.attaching[0]).unwrap();
    let (xbar, _) = sigma_push(&ext, &Precover::identity(ext.xc.clone())).unwrap();
    assert!(xbar.isomorphism_over(&ext.base()).is_some());
    let up = sigma_pull(&ext, &ext.base()).unwrap();
    assert!(up
        .isomorphism_over(&Precover::identity(ext.xc.clone()))
        .is_some());
}

#[test]
fn beta_twist_properties() {
    let pre = preset(5, 5, 5);
    let g = &pre.data;
    let beta = g.beta.as_ref().unwrap();
    let xc = g.edge_graphs[0].clone();
    // Order two and color preserving.
    assert_eq!(beta.then(beta), GraphMorphism::identity(xc.clone()));
    assert!((0..xc.half_edge_count()).all(|e| xc.color[e] == xc.color[beta.image(e)]));
    let whole = Precover::identity(xc.clone());
    assert!(beta_twist(g, &whole)
        .unwrap()
        .isomorphism_over(&whole)
        .is_some());

    let mut r = common::rng(3);
    let mut asymmetric = 0;
    for _ in 0..20 {
        let Some(y) = random_core(&mut r, &xc) else {
            continue;
        };
        let twice = beta_twist(g, &beta_twist(g, &y).unwrap()).unwrap();
        assert!(twice.isomorphism_over(&y).is_some());
        let once = beta_twist(g, &y).unwrap();
        if once.isomorphism_over(&y).is_none() {
            asymmetric += 1;
            assert!(stature::iso::color_isomorphic(once.graph(), y.graph()).is_some());
        }
    }
    assert!(asymmetric > 0, "no core without β symmetry found");
}

#[test]
fn twisting_matches_folding_the_twisted_generators() {
    let pre = preset(5, 5, 5);
    let g = &pre.data;
    let beta = g.beta.as_ref().unwrap();
    let xc = g.edge_graphs[0].clone();
    let mut r = common::rng(11);
    for _ in 0..20 {
        let v = r.gen_range(0..xc.vertex_count);
        let count = r.gen_range(1..=3);
        let gens: Vec<Word> = (0..count)
            .map(|_| random_loop(&mut r, &xc, v, 10))
            .collect();
        let h = words::subgroup_graph(&xc, v, &gens).unwrap();
        let twisted = beta_twist(g, &h).unwrap();
        let moved: Vec<Word> = gens
            .iter()
            .map(|w| w.iter().map(|&e| beta.image(e)).collect())
            .collect();
        let direct = words::subgroup_graph(&xc, beta.vertex_map[v], &moved).unwrap();
        assert!(twisted.isomorphism_over(&direct).is_some());
        assert_eq!(
            twisted.basepoint.map(|b| twisted.map.vertex_map[b]),
            Some(beta.vertex_map[v])
        );
    }
}
