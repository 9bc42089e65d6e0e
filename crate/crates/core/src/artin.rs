//! Splittings of triangle Artin groups G_{MNP} as graphs of graphs.
//!
//! Colors: 0 for the (a,b) relation of label M, 1 for (b,c) with label N,
//! 2 for (c,a) with label P. For a pair `(x, y)` with label Q the vertical
//! generators are `g_1 = x`, `g_2 = y` and private `g_3..g_Q`; triangle `i`
//! joins `g_i` to `g_{i+1}` (indices mod Q).
//!
//! X_A is a rose with one loop per finite label. X_B has a vertex per
//! vertical generator and an edge per triangle. X_C doubles each vertex to
//! `g^+`, `g^-`; triangle `i` gives a near edge `g_i^+ → g_{i+1}^-` sent to a
//! point of X_A and a far edge `g_i^- → g_{i+1}^+` sent to the loop. β swaps
//! the signs and swaps near with far, and X_B = X_C / β.
//!
//! This edge-level data is built here, not copied from a drawing. What keeps
//! it honest: the ranks (3, 4, 7), the monochrome and length checks of
//! `validate_gog`, and `tests/encoding.rs`, which compares homomorphism
//! counts into S_3 and S_4 against the Artin group.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gog::{GraphOfGraphs, Shape};
use crate::graph::{ColorLengthTable, Graph};
use crate::morphism::GraphMorphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    Finite(u32),
    Infinite,
}

impl Label {
    pub fn parse(s: &str) -> Result<Label> {
        let s = s.trim();
        if matches!(s, "inf" | "∞" | "infinity") {
            return Ok(Label::Infinite);
        }
        match s.parse::<u32>() {
            Ok(q) if q >= 2 => Ok(Label::Finite(q)),
            _ => Err(Error::Parse(format!(
                "bad label {s:?}: expected an integer >= 2 or inf"
            ))),
        }
    }

    /// Cycle length ℓ: Q for odd Q, Q/2 for even Q.
    pub fn cycle_length(self) -> Option<usize> {
        match self {
            Label::Finite(q) if q % 2 == 1 => Some(q as usize),
            Label::Finite(q) => Some(q as usize / 2),
            Label::Infinite => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(q) => write!(f, "{q}"),
            Label::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Labels(pub Label, pub Label, pub Label);

impl Labels {
    pub fn parse(s: &str) -> Result<Labels> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three labels M,N,P, got {s:?}"
            )));
        }
        Ok(Labels(
            Label::parse(parts[0])?,
            Label::parse(parts[1])?,
            Label::parse(parts[2])?,
        ))
    }

    pub fn finite(m: u32, n: u32, p: u32) -> Labels {
        Labels(Label::Finite(m), Label::Finite(n), Label::Finite(p))
    }

    fn as_array(self) -> [Label; 3] {
        [self.0, self.1, self.2]
    }
}

impl fmt::Display for Labels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0, self.1, self.2)
    }
}

/// The graphs of the splitting, before assembly into a graph of graphs.
#[derive(Clone, Debug)]
pub struct ArtinGraphs {
    pub xa: Arc<Graph>,
    pub xb: Arc<Graph>,
    pub xc: Arc<Graph>,
    /// φ: X_C → X_A.
    pub phi: GraphMorphism,
    /// β: X_C → X_C.
    pub beta: GraphMorphism,
    /// The double cover X_C → X_B.
    pub quotient: GraphMorphism,
}

#[derive(Clone, Debug)]
pub struct ArtinPreset {
    pub labels: Labels,
    pub shape: Shape,
    pub graphs: ArtinGraphs,
    pub data: GraphOfGraphs,
}

/// Refuses label triples outside the scope of the splitting theorems.
pub fn check_applicable(labels: Labels) -> Result<()> {
    let mut sorted = labels.as_array();
    sorted.sort();
    let small = |l: Label, q: u32| matches!(l, Label::Finite(x) if x <= q);
    if small(sorted[0], 2) && small(sorted[1], 3) {
        let tail = if sorted[1] == Label::Finite(3) {
            " For (2,3,P) with P >= 7 it is not known whether the group splits in this way."
        } else {
            ""
        };
        return Err(Error::Refused(format!(
            "labels {labels} are excluded: the splitting needs sorted labels M <= N <= P with M > 2 or N > 3.{tail}"
        )));
    }
    Ok(())
}

pub fn make_preset(labels: Labels) -> Result<ArtinPreset> {
    check_applicable(labels)?;
    if labels.as_array().contains(&Label::Finite(2)) {
        return Err(Error::Unavailable(format!(
            "no monochrome-cycle-preserving encoding of the splitting for labels {labels} (a label equals 2) is available"
        )));
    }
    let graphs = build_graphs(labels)?;
    let lengths: ColorLengthTable = labels
        .as_array()
        .iter()
        .enumerate()
        .filter_map(|(c, l)| l.cycle_length().map(|len| (c as u32, len)))
        .collect();
    let data = GraphOfGraphs::double(
        graphs.xa.clone(),
        graphs.xc.clone(),
        graphs.phi.clone(),
        graphs.beta.clone(),
        lengths,
    );
    Ok(ArtinPreset {
        labels,
        shape: Shape::Double,
        graphs,
        data,
    })
}

/// Builds X_A, X_B, X_C, φ, β and the quotient for labels all at least 3
/// (or infinite).
pub fn build_graphs(labels: Labels) -> Result<ArtinGraphs> {
    // Vertical generators: a, b, c are 0, 1, 2; private ones follow.
    let pairs: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];
    let mut next_gen = 3;
    // Per finite pair: color and its generator list.
    let mut cycles: Vec<(u32, Vec<usize>)> = Vec::new();
    for (c, (l, &(x, y))) in labels.as_array().iter().zip(pairs.iter()).enumerate() {
        let Label::Finite(q) = *l else { continue };
        if q < 3 {
            return Err(Error::Unavailable(format!("label {q} has no encoding")));
        }
        let mut gens = vec![x, y];
        for _ in 2..q {
            gens.push(next_gen);
            next_gen += 1;
        }
        cycles.push((c as u32, gens));
    }
    if cycles.len() < 2 {
        return Err(Error::Unavailable(format!(
            "labels {labels} have fewer than two finite entries, so the edge graph is disconnected"
        )));
    }
    let ngen = next_gen;

    let mut xa = Graph::new(1);
    let mut loop_of = [usize::MAX; 3];
    for (c, _) in &cycles {
        loop_of[*c as usize] = xa.add_edge(0, 0, *c);
    }

    let mut xb = Graph::new(ngen);
    // X_C vertex 2g is g^+ and 2g+1 is g^-.
    let mut xc = Graph::new(2 * ngen);
    let mut phi_edges: Vec<Vec<usize>> = Vec::new();
    let mut beta_half = Vec::new();
    let mut quot_half = Vec::new();
    for (c, gens) in &cycles {
        let q = gens.len();
        for i in 0..q {
            let (g, h) = (gens[i], gens[(i + 1) % q]);
            let t = xb.add_edge(g, h, *c);
            let near = xc.add_edge(2 * g, 2 * h + 1, *c);
            let far = xc.add_edge(2 * g + 1, 2 * h, *c);
            let lp = loop_of[*c as usize];
            phi_edges.extend([vec![], vec![], vec![lp], vec![xa.inv(lp)]]);
            beta_half.extend([far, far + 1, near, near + 1]);
            quot_half.extend([t, t + 1, t, t + 1]);
        }
    }
    let xa = Arc::new(xa);
    let xb = Arc::new(xb);
    let xc = Arc::new(xc);
    let phi = GraphMorphism::from_arcs(xc.clone(), xa.clone(), vec![0; 2 * ngen], phi_edges);
    let beta_v: Vec<usize> = (0..2 * ngen).map(|v| v ^ 1).collect();
    let beta = GraphMorphism::combinatorial(xc.clone(), xc.clone(), beta_v, beta_half);
    let quot_v: Vec<usize> = (0..2 * ngen).map(|v| v / 2).collect();
    let quotient = GraphMorphism::combinatorial(xc.clone(), xb.clone(), quot_v, quot_half);
    Ok(ArtinGraphs {
        xa,
        xb,
        xc,
        phi,
        beta,
        quotient,
    })
}

/// Euler ranks of X_A, X_B and X_C, with X_B taken as the quotient of X_C
/// by β. The quotient must be a two-sheeted covering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ranks {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

pub fn ranks(g: &ArtinGraphs) -> Result<Ranks> {
    let q = &g.quotient;
    if !q.violations().is_empty() || !q.is_immersion() {
        return Err(Error::Validation(vec![
            "X_C → X_B is not an immersion".into()
        ]));
    }
    // Two sheets: each vertex and edge of X_B has exactly two preimages,
    // swapped by β.
    let mut vcount = vec![0; g.xb.vertex_count];
    for v in 0..g.xc.vertex_count {
        vcount[q.vertex_map[v]] += 1;
        if q.vertex_map[g.beta.vertex_map[v]] != q.vertex_map[v] || g.beta.vertex_map[v] == v {
            return Err(Error::Validation(vec![
                "β does not act as the deck involution".into(),
            ]));
        }
    }
    if vcount.iter().any(|&n| n != 2) {
        return Err(Error::Validation(vec![
            "X_C → X_B is not two-sheeted".into()
        ]));
    }
    Ok(Ranks {
        a: g.xa.euler_rank()?,
        b: g.xb.euler_rank()?,
        c: g.xc.euler_rank()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gog::{validate_gog, SigmaExtension};

    #[test]
    fn ranks_for_labels_at_least_three() {
        for (m, n, p) in [(3, 3, 3), (3, 4, 5), (5, 5, 7), (4, 4, 4)] {
            let pre = make_preset(Labels::finite(m, n, p)).unwrap();
            assert_eq!(ranks(&pre.graphs).unwrap(), Ranks { a: 3, b: 4, c: 7 });
        }
    }

    #[test]
    fn presets_validate() {
        for (m, n, p) in [(3, 3, 3), (3, 4, 5), (5, 5, 5), (4, 4, 4), (6, 5, 4)] {
            let pre = make_preset(Labels::finite(m, n, p)).unwrap();
            assert_eq!(validate_gog(&pre.data), Vec::<String>::new(), "{m},{n},{p}");
        }
    }

    #[test]
    fn collapsed_edge_graph_size() {
        let pre = make_preset(Labels::finite(5, 5, 7)).unwrap();
        let ext = SigmaExtension::new(&pre.graphs.phi).unwrap();
        assert_eq!(ext.xbar.vertex_count, 5 + 5 + 7 - 6);
        assert_eq!(ext.xbar.edge_count(), 5 + 5 + 7);
        assert!(ext.iota.is_immersion());
    }

    #[test]
    fn refusals() {
        for s in ["2,3,7", "2,2,5", "3,2,2", "inf,2,3"] {
            assert!(
                matches!(
                    make_preset(Labels::parse(s).unwrap()),
                    Err(Error::Refused(_))
                ),
                "{s}"
            );
        }
        for s in ["4,4,2", "5,5,2", "2,5,4", "3,inf,inf", "inf,inf,inf"] {
            assert!(
                matches!(
                    make_preset(Labels::parse(s).unwrap()),
                    Err(Error::Unavailable(_))
                ),
                "{s}"
            );
        }
    }
}
