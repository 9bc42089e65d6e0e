use serde::Serialize;

use super::snf::smith_invariants;
use super::todd_coxeter::{enumerate_cosets, CosetOutcome};
use crate::error::{Error, Result};
use crate::graph::{ColorLengthTable, Graph};
use crate::words::tree_paths;

/// A graph with one disk glued along each monochrome cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoComplex {
    pub skeleton: Graph,
    /// Closed half-edge paths, one per disk.
    pub disks: Vec<Vec<usize>>,
}

pub fn build_complex(y: &Graph, lengths: &ColorLengthTable) -> Result<TwoComplex> {
    let v = y.monochrome_violations();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let v = y.length_violations(lengths);
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    Ok(TwoComplex {
        skeleton: y.clone(),
        disks: y.monochrome_cycles(),
    })
}

/// `⟨non-tree edges | disk boundaries⟩` for a spanning tree rooted at 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
    /// The skeleton half-edge read as each generator.
    pub generator_edges: Vec<usize>,
}

fn cyclic_reduce(mut w: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for x in w.drain(..) {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    let (mut i, mut j) = (0, out.len());
    while j >= i + 2 && out[i] == -out[j - 1] {
        i += 1;
        j -= 1;
    }
    out[i..j].to_vec()
}

pub fn presentation(c: &TwoComplex) -> Result<Presentation> {
    let g = &c.skeleton;
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let mut letter = vec![0i32; g.half_edge_count()];
    let mut generator_edges = Vec::new();
    if g.vertex_count > 0 {
        let (_, via) = tree_paths(g, 0);
        for e in g.edge_reps() {
            let tree = via[g.target(e)] == Some(e) || via[g.origin(e)] == Some(g.inv(e));
            if !tree {
                generator_edges.push(e);
                let k = generator_edges.len() as i32;
                letter[e] = k;
                letter[g.inv(e)] = -k;
            }
        }
    }
    let relators = c
        .disks
        .iter()
        .map(|d| cyclic_reduce(d.iter().map(|&e| letter[e]).filter(|&x| x != 0).collect()))
        .collect();
    Ok(Presentation {
        generators: generator_edges.len(),
        relators,
        generator_edges,
    })
}

fn h1_of(p: &Presentation) -> (usize, Vec<i64>) {
    let matrix: Vec<Vec<i64>> = p
        .relators
        .iter()
        .map(|r| {
            let mut row = vec![0i64; p.generators];
            for &x in r {
                row[x.unsigned_abs() as usize - 1] += x.signum() as i64;
            }
            row
        })
        .collect();
    let inv = smith_invariants(&matrix);
    let betti = p.generators - inv.len();
    let torsion = inv.into_iter().filter(|&d| d > 1).collect();
    (betti, torsion)
}

/// First homology as (Betti number, torsion coefficients).
pub fn homology_h1(c: &TwoComplex) -> Result<(usize, Vec<i64>)> {
    Ok(h1_of(&presentation(c)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pi1Status {
    Trivial,
    NonTrivial,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi1Verdict {
    pub status: Pi1Status,
    pub betti: usize,
    pub torsion: Vec<i64>,
    /// Index of the trivial subgroup when enumeration completed.
    pub cosets: Option<usize>,
    pub note: Option<String>,
}

pub fn simply_connected(c: &TwoComplex, budget: usize) -> Result<Pi1Verdict> {
    let p = presentation(c)?;
    let (betti, torsion) = h1_of(&p);
    if betti > 0 || !torsion.is_empty() {
        return Ok(Pi1Verdict {
            status: Pi1Status::NonTrivial,
            betti,
            torsion,
            cosets: None,
            note: Some("nonzero first homology".into()),
        });
    }
    let verdict = |status, cosets, note: &str| Pi1Verdict {
        status,
        betti,
        torsion: Vec::new(),
        cosets,
        note: Some(note.to_string()),
    };
    Ok(match enumerate_cosets(p.generators, &p.relators, budget) {
        CosetOutcome::Complete(t) if !t.verify(&p.relators) => verdict(
            Pi1Status::Unknown,
            None,
            "coset table failed re-verification",
        ),
        CosetOutcome::Complete(t) if t.index() == 1 => verdict(
            Pi1Status::Trivial,
            Some(1),
            "coset enumeration closed with one coset",
        ),
        CosetOutcome::Complete(t) => verdict(
            Pi1Status::NonTrivial,
            Some(t.index()),
            "finite quotient acting transitively on the cosets",
        ),
        CosetOutcome::BudgetExhausted { defined } => verdict(
            Pi1Status::Unknown,
            None,
            &format!("coset budget {budget} exhausted after {defined} definitions"),
        ),
    })
}
