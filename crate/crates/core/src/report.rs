//! JSON and text renderings of a stature report. Both are deterministic.

use std::fmt::Write;

use crate::stature::{StatureReport, Verdict};

/// How many violations the text form lists before summarizing.
const SHOWN_VIOLATIONS: usize = 10;

pub fn to_json(r: &StatureReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::FiniteStature {
            criterion,
            stabilization_depth,
            total_classes,
        } => format!(
            "FiniteStature via {criterion:?} at depth {stabilization_depth} ({total_classes} classes in total)"
        ),
        Verdict::Inconclusive { max_depth, reason } => {
            format!("Inconclusive at depth {max_depth}: {reason}")
        }
        Verdict::ValidationFailure { violations } => {
            format!("ValidationFailure ({} violations)", violations.len())
        }
    }
}

pub fn to_text(r: &StatureReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "subject:  {}", r.subject);
    if let Some(shape) = r.shape {
        let _ = writeln!(s, "shape:    {shape:?}");
    }
    let _ = writeln!(s, "verdict:  {}", verdict_line(&r.verdict));
    if !r.criteria_at_stop.is_empty() {
        let _ = writeln!(s, "criteria: {:?}", r.criteria_at_stop);
    }
    let _ = writeln!(
        s,
        "budget:   {} cosets, max depth {}",
        r.budget, r.max_depth
    );
    if !r.levels.is_empty() {
        let _ = writeln!(
            s,
            "\n{:>5} {:>8} {:>8} {:>6} {:>14}  {:<9} {:<8}  ranks",
            "depth", "classes", "over X_A", "max|V|", "π1 triv/non/?", "embedding", "shortcut"
        );
        for l in &r.levels {
            let flag = |b: Option<bool>| match b {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            };
            let ranks: Vec<String> = l.ranks.iter().map(|(r, n)| format!("{r}:{n}")).collect();
            let pi = format!(
                "{}/{}/{}",
                l.simply_connected.trivial,
                l.simply_connected.non_trivial,
                l.simply_connected.unknown
            );
            let _ = writeln!(
                s,
                "{:>5} {:>8} {:>8} {:>6} {:>14}  {:<9} {:<8}  {}",
                l.depth,
                l.classes,
                l.classes_over_vertex_graph,
                l.max_vertices,
                pi,
                flag(l.embedding),
                flag(l.normal_shortcut),
                ranks.join(" ")
            );
        }
    }
    if !r.embedding_witnesses.is_empty() {
        let _ = writeln!(s, "\nembedding witnesses: {}", r.embedding_witnesses.len());
    }
    if !r.pi1_certificates.is_empty() {
        let _ = writeln!(s, "\nπ1 certificates: {}", r.pi1_certificates.len());
    }
    let violations = match &r.verdict {
        Verdict::ValidationFailure { violations } => violations,
        _ => &r.monochrome_violations,
    };
    if !violations.is_empty() {
        let _ = writeln!(s, "\nviolations ({}):", violations.len());
        for v in violations.iter().take(SHOWN_VIOLATIONS) {
            let _ = writeln!(s, "  {v}");
        }
        if violations.len() > SHOWN_VIOLATIONS {
            let _ = writeln!(s, "  ... {} more", violations.len() - SHOWN_VIOLATIONS);
        }
    }
    if let Some(a) = &r.annotation {
        let _ = writeln!(s, "\n{a}");
    }
    s
}
