mod common;

use std::sync::Arc;

use proptest::prelude::*;

use stature::fold::{factorize, fold, reduce};
use stature::iso::color_isomorphic;
use stature::precover::fiber_product;
use stature::{Graph, GraphMorphism, Precover};

fn ok(c: common::Check) -> Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fold_order_does_not_matter(seed in any::<u64>()) {
        ok(common::fold_confluence(seed))?;
    }

    #[test]
    fn folded_core_matches_products(seed in any::<u64>()) {
        ok(common::fold_membership(seed))?;
    }

    #[test]
    fn fiber_product_is_intersection(seed in any::<u64>()) {
        ok(common::fiber_product_intersection(seed))?;
    }

    #[test]
    fn core_is_idempotent(seed in any::<u64>()) {
        ok(common::core_idempotence(seed))?;
    }

    #[test]
    fn fiber_product_is_symmetric(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::rose(2);
        let a = Precover::new(fold(&common::random_map_to_rose(&mut r, &x, 6, 6)).unwrap().immersion).unwrap();
        let b = Precover::new(fold(&common::random_map_to_rose(&mut r, &x, 6, 6)).unwrap().immersion).unwrap();
        let ab = fiber_product(&a, &b).unwrap();
        let ba = fiber_product(&b, &a).unwrap();
        prop_assert!(ab.graph.vertex_count <= a.graph().vertex_count * b.graph().vertex_count);
        prop_assert!(ab.immersion.isomorphism_over(&ba.immersion).is_some());
        // The swap itself is a witness.
        for (i, &(u, v)) in ab.vertex_pairs.iter().enumerate() {
            let j = ba.vertex_pairs.iter().position(|&p| p == (v, u)).unwrap();
            prop_assert_eq!(ab.proj1.vertex_map[i], ba.proj2.vertex_map[j]);
        }
        prop_assert!(ab.immersion.map.is_immersion());
    }

    #[test]
    fn reduction_keeps_rank_when_no_loop_collapses(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::rose(3);
        let m = common::random_map_to_rose(&mut r, &x, 8, 8);
        let red = reduce(&m).unwrap();
        let before = m.source.euler_rank().unwrap();
        let after = red.immersion.source.euler_rank().unwrap();
        // Folding is surjective on π1 and can only lower the rank.
        prop_assert!(after <= before);
        prop_assert!(red.sigma.then(&red.immersion).vertex_map == m.vertex_map);
    }
}

#[test]
fn immersion_examples() {
    let x = common::rose(1);
    assert!(GraphMorphism::identity(x.clone()).is_immersion());
    // Two edges leaving one vertex onto the same loop.
    let mut g = Graph::new(3);
    g.add_edge(0, 1, 0);
    g.add_edge(0, 2, 0);
    let m = GraphMorphism::combinatorial(Arc::new(g), x.clone(), vec![0; 3], vec![0, 1, 0, 1]);
    assert!(!m.is_immersion());
    // The tripod folds to a single edge.
    let f = fold(&m).unwrap();
    assert_eq!((f.graph.vertex_count, f.graph.edge_count()), (2, 1));
    assert!(f.immersion.is_immersion());
    let sub = Graph::cycle(1, 0).subdivide_edge(0, 2).unwrap().1;
    assert!(!sub.is_immersion());
}

#[test]
fn immersion_folds_to_itself() {
    let x = common::rose(1);
    let c = Arc::new(Graph::cycle(3, 0));
    let m = GraphMorphism::combinatorial(c.clone(), x, vec![0; 3], vec![0, 1, 0, 1, 0, 1]);
    let f = fold(&m).unwrap();
    assert_eq!(*f.graph, *c);
    assert_eq!(f.projection, GraphMorphism::identity(c));
}

#[test]
fn factorize_examples() {
    let x = common::rose(1);
    // Already an immersion: no moves.
    let id = GraphMorphism::identity(x.clone());
    let fz = factorize(&id).unwrap();
    assert!(fz.moves.is_empty());
    assert_eq!(fz.immersion.edge_map, id.edge_map);

    // One edge onto a path of length 2.
    let mut path2 = Graph::new(3);
    path2.add_edge(0, 1, 0);
    path2.add_edge(1, 2, 0);
    let mut one = Graph::new(2);
    one.add_edge(0, 1, 0);
    let m = GraphMorphism::new(one, path2, vec![0, 2], vec![vec![0, 2], vec![3, 1]]);
    let fz = factorize(&m).unwrap();
    assert_eq!(fz.moves.len(), 1);
    assert!(fz.immersion.is_immersion());

    // Collapse one non-loop edge and wrap another round the loop.
    let mut g = Graph::new(2);
    g.add_edge(0, 1, 0);
    g.add_edge(1, 1, 0);
    let m = GraphMorphism::new(
        g,
        (*x).clone(),
        vec![0, 0],
        vec![vec![], vec![], vec![0], vec![1]],
    );
    let fz = factorize(&m).unwrap();
    assert!(fz.immersion.is_immersion());
    let composite = fz.sigma(m.source.clone()).then(&fz.immersion);
    for e in 0..m.source.half_edge_count() {
        assert_eq!(composite.edge_map[e], m.edge_map[e], "half-edge {e}");
    }
    assert_eq!(composite.vertex_map, m.vertex_map);
    assert!(!fz.collapsed_loop());
}

#[test]
fn core_examples() {
    let x = common::rose(2);
    // A loop of color 0 at the basepoint with a dangling edge of color 1.
    let mut g = Graph::new(2);
    g.add_edge(0, 0, 0);
    g.add_edge(0, 1, 1);
    let m = GraphMorphism::combinatorial(Arc::new(g), x.clone(), vec![0, 0], vec![0, 1, 2, 3]);
    let p = Precover::based(m, 0).unwrap();
    let (c, _) = p.core_based().unwrap();
    assert_eq!((c.graph().vertex_count, c.graph().edge_count()), (1, 1));
    // A wedge through the basepoint is its own core.
    let rose = Precover::based(GraphMorphism::identity(x), 0).unwrap();
    let (c, _) = rose.core_based().unwrap();
    assert_eq!(c.graph(), rose.graph());
}

#[test]
fn cycle_covers_multiply() {
    let x = common::rose(1);
    let cover = |n: usize| {
        let c = Arc::new(Graph::cycle(n, 0));
        let half = (0..n).flat_map(|_| [0, 1]).collect();
        Precover::new(GraphMorphism::combinatorial(c, x.clone(), vec![0; n], half)).unwrap()
    };
    let fp = fiber_product(&cover(2), &cover(3)).unwrap();
    assert_eq!(fp.immersion.components().len(), 1);
    assert!(color_isomorphic(&fp.graph, &Graph::cycle(6, 0)).is_some());
    // Against the identity precover the product is the other factor.
    let id = Precover::identity(x.clone());
    let fp = fiber_product(&cover(4), &id).unwrap();
    assert!(fp.immersion.isomorphism_over(&cover(4)).is_some());
}

#[test]
fn subgraph_embeddings() {
    let c3 = Arc::new(Graph::cycle(3, 0));
    assert!(GraphMorphism::identity(c3.clone()).is_subgraph_embedding());
    let mut bigger = Graph::cycle(3, 0);
    bigger.add_edge(0, 0, 1);
    let inc = GraphMorphism::combinatorial(c3, Arc::new(bigger), vec![0, 1, 2], (0..6).collect());
    assert!(inc.is_subgraph_embedding());
    let x = common::rose(1);
    let mut g = Graph::new(3);
    g.add_edge(0, 1, 0);
    g.add_edge(0, 2, 0);
    let m = GraphMorphism::combinatorial(Arc::new(g), x, vec![0; 3], vec![0, 1, 0, 1]);
    assert!(!fold(&m).unwrap().projection.is_subgraph_embedding());
}

#[test]
fn fiber_products_need_a_common_target() {
    let a = Precover::identity(common::rose(1));
    let b = Precover::identity(common::rose(2));
    assert!(fiber_product(&a, &b).is_err());
}
