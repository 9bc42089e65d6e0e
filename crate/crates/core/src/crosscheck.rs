//! Independent check of the depth catalogs: path stabilizers computed as
//! explicit intersections of conjugated subgroups of the vertex group.
//!
//! Subgroups are lists of closed words on the vertex graph X_A (a rose).
//! `K_1 = C`, `K_2k = K_{2k-1} ∩ (K'_{2k-1})^a` and
//! `K_{2k+1} = K_2k ∩ (β_*(K'_2k))^a`, where the primed factors are drawn
//! independently and `a` ranges over a ball of A. β_* is the action of the
//! twisting element: lift to X_C, apply β, conjugate back along a fixed path.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gog::{sigma_pull, GraphOfGraphs, Shape, SigmaExtension};
use crate::graph::Graph;
use crate::morphism::GraphMorphism;
use crate::precover::{fiber_product, Precover};
use crate::stature::Engine;
use crate::words::{self, Word};

/// Radius of the ball of A the conjugators are drawn from.
pub const BALL_RADIUS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    /// Conjugators in the order they were used, as words on X_A.
    pub conjugators: Vec<Word>,
    pub rank: i64,
    /// Index of the matching class at this depth, if any.
    pub class: Option<usize>,
    /// The intersection is trivial, so there is nothing to find.
    pub vacuous: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub depth: usize,
    pub seed: u64,
    pub samples: Vec<Sample>,
    pub misses: usize,
    pub passed: bool,
}

/// The algebraic data of a double: C as words on X_A and β_*.
pub struct Algebra {
    pub xa: Arc<Graph>,
    pub ext: SigmaExtension,
    phi: GraphMorphism,
    beta: GraphMorphism,
    /// Basepoint of X̄_C; the loops of C are read there.
    pub xbar_base: usize,
    pub c_gens: Vec<Word>,
}

impl Algebra {
    pub fn new(g: &GraphOfGraphs) -> Result<Algebra> {
        if g.shape()? != Shape::Double {
            return Err(Error::Shape(
                "crosscheck needs a double with a twisting involution".into(),
            ));
        }
        let phi = g.attaching[0].clone();
        let beta = g
            .beta
            .clone()
            .ok_or_else(|| Error::Shape("no β recorded".into()))?;
        let ext = SigmaExtension::new(&phi)?;
        let xa = ext.iota.target.clone();
        if xa.vertex_count != 1 {
            return Err(Error::Shape("vertex graph is not a rose".into()));
        }
        let xbar_base = ext.sigma.vertex_map[0];
        let mut c = ext.base();
        c.basepoint = Some(xbar_base);
        let c_gens = words::basis(&c.push(&ext.iota)?)?;
        Ok(Algebra {
            xa,
            ext,
            phi,
            beta,
            xbar_base,
            c_gens,
        })
    }

    fn graph_of(&self, gens: &[Word]) -> Result<Precover> {
        words::subgroup_graph(&self.xa, 0, gens)
    }

    /// Basis of the intersection of two subgroups of A.
    pub fn intersect(&self, h: &[Word], k: &[Word]) -> Result<Vec<Word>> {
        let fp = fiber_product(&self.graph_of(h)?, &self.graph_of(k)?)?;
        let (core, _) = fp.immersion.core_based()?;
        words::basis(&core)
    }

    /// `a⁻¹ K a`.
    pub fn conjugate(&self, k: &[Word], a: &[usize]) -> Vec<Word> {
        k.iter().map(|w| words::conjugate(&self.xa, w, a)).collect()
    }

    /// β_* on a subgroup of C, as words on X_A.
    pub fn twist(&self, k: &[Word]) -> Result<Vec<Word>> {
        // K as a based precover of X̄_C: the based part of K ⊗ C.
        let c = Precover::based(self.ext.iota.clone(), self.xbar_base)?;
        let fp = fiber_product(&self.graph_of(k)?, &c)?;
        let bp = fp
            .immersion
            .basepoint
            .ok_or_else(|| Error::InvalidArgument("no common basepoint".into()))?;
        let kbar = Precover::based(fp.proj2.clone(), bp)?.core_based()?.0;
        let y = sigma_pull(&self.ext, &kbar)?;
        let ybase = y.map.vertex_map[y.basepoint.unwrap()];
        let xc = &*self.ext.xc;
        let target = self.beta.vertex_map[ybase];
        let (paths, _) = words::tree_paths(xc, ybase);
        let p = paths[target].clone().ok_or(Error::NotConnected)?;
        let p_inv = words::inverse(xc, &p);
        let mut out = Vec::new();
        for w in words::basis(&y)? {
            let turned: Word = w.iter().map(|&h| self.beta.image(h)).collect();
            let loop_c = words::concat(xc, &[&p, &turned, &p_inv]);
            let image: Word = loop_c
                .iter()
                .flat_map(|&h| self.phi.edge_map[h].iter().copied())
                .collect();
            out.push(words::reduce(&self.xa, &image));
        }
        Ok(out)
    }

    fn random_conjugator(&self, rng: &mut ChaCha8Rng) -> Word {
        let len = rng.gen_range(0..=BALL_RADIUS);
        words::random_reduced(&self.xa, len, rng)
    }

    /// One random `K_depth` with the conjugators used to build it.
    pub fn sample(&self, depth: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<Word>, Vec<Word>)> {
        if depth <= 1 {
            return Ok((self.c_gens.clone(), Vec::new()));
        }
        let (k, mut used) = self.sample(depth - 1, rng)?;
        let (k2, used2) = self.sample(depth - 1, rng)?;
        let a = self.random_conjugator(rng);
        let other = if depth % 2 == 1 { self.twist(&k2)? } else { k2 };
        let result = self.intersect(&k, &self.conjugate(&other, &a))?;
        used.extend(used2);
        used.push(a);
        Ok((result, used))
    }
}

/// Draws `samples` random path stabilizers of length `depth` and looks each
/// up in the engine's depth catalog over X_A. Trivial ones count as found.
pub fn k_ell_crosscheck(
    g: &GraphOfGraphs,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<CrosscheckReport> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let alg = Algebra::new(g)?;
    let mut engine = Engine::new(g)?;
    engine.level_one()?;
    for _ in 1..depth {
        engine.step()?;
    }
    let level = &engine.levels[depth - 1];
    let over: Vec<(u64, Precover)> = level
        .classes
        .iter()
        .map(|c| {
            let p = engine.over_vertex_graph(&c.precover)?;
            Ok((p.invariant(), p))
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..samples {
        let (k, conjugators) = alg.sample(depth, &mut rng)?;
        let (core, _) = alg.graph_of(&k)?.core_unbased();
        let rank = if core.graph().vertex_count == 0 {
            0
        } else {
            core.rank()?
        };
        let vacuous = rank <= 0;
        let class = if vacuous {
            None
        } else {
            let inv = core.invariant();
            over.iter()
                .position(|(i, p)| *i == inv && core.isomorphism_over(p).is_some())
        };
        out.push(Sample {
            conjugators,
            rank,
            class,
            vacuous,
        });
    }
    let misses = out
        .iter()
        .filter(|s| !s.vacuous && s.class.is_none())
        .count();
    Ok(CrosscheckReport {
        depth,
        seed,
        samples: out,
        misses,
        passed: misses == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin::{make_preset, Labels};

    fn alg(m: u32, n: u32, p: u32) -> Algebra {
        Algebra::new(&make_preset(Labels::finite(m, n, p)).unwrap().data).unwrap()
    }

    #[test]
    fn c_has_rank_seven() {
        let a = alg(3, 4, 5);
        assert_eq!(a.c_gens.len(), 7);
    }

    #[test]
    fn twist_stays_in_c_and_keeps_rank() {
        let a = alg(5, 5, 5);
        let c = a.graph_of(&a.c_gens).unwrap();
        let t = a.twist(&a.c_gens).unwrap();
        for w in &t {
            assert!(words::accepts(&c, w));
        }
        // β_* is an automorphism of C: the image generates all of C.
        let back = a.graph_of(&t).unwrap();
        for w in &a.c_gens {
            assert!(words::accepts(&back, w));
        }
    }

    #[test]
    fn twist_is_an_involution_up_to_conjugacy() {
        let a = alg(3, 3, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (k, _) = a.sample(2, &mut rng).unwrap();
        let twice = a.twist(&a.twist(&k).unwrap()).unwrap();
        let (x, _) = a.graph_of(&k).unwrap().core_unbased();
        let (y, _) = a.graph_of(&twice).unwrap().core_unbased();
        assert!(x.isomorphism_over(&y).is_some());
    }

    #[test]
    fn depth_one_is_c() {
        let pre = make_preset(Labels::finite(3, 3, 3)).unwrap();
        let r = k_ell_crosscheck(&pre.data, 1, 3, 1).unwrap();
        assert!(r.passed);
        assert!(r.samples.iter().all(|s| s.class == Some(0)));
    }

    #[test]
    fn identity_conjugator_gives_c() {
        let a = alg(5, 5, 5);
        let k = a
            .intersect(&a.c_gens, &a.conjugate(&a.c_gens, &[]))
            .unwrap();
        let (x, _) = a.graph_of(&k).unwrap().core_unbased();
        let (c, _) = a.graph_of(&a.c_gens).unwrap().core_unbased();
        assert!(x.isomorphism_over(&c).is_some());
    }
}
