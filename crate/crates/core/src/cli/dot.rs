//! Graphviz export. Output is deterministic: every collection is walked in
//! id order.

use std::fmt::Write;

use crate::model::{Digraph, DigraphBundle, Member};
use crate::omega::OmegaError;
use crate::rank::RankTag;

fn q(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn membership(out: &mut String, indent: &str, owner: &str, members: &[Member]) {
    for m in members {
        let tip = format!("tip:{}", m.tip);
        let _ = writeln!(out, "{indent}{} [shape=box, style=dashed, label={}];", q(&tip), q(&m.tip.to_string()));
        let _ = writeln!(out, "{indent}{} -> {} [style=dashed, arrowhead=none, label={}];", q(owner), q(&tip), q(&m.direction.to_string()));
    }
}

fn rank_label(r: RankTag) -> String {
    match r {
        RankTag::Finite(n) => n.to_string(),
        RankTag::ArrowOmega => "arrow".into(),
        RankTag::Omega => "omega".into(),
    }
}

fn ranks(d: &Digraph) -> Vec<RankTag> {
    let mut rs: Vec<RankTag> = d.vertices.values().map(|v| v.rank).chain(d.families.values().map(|f| f.rank)).collect();
    rs.sort();
    rs.dedup();
    rs
}

fn truncated(out: &mut String, b: &DigraphBundle, id: &str) {
    let _ = writeln!(out, "  subgraph {} {{", q(&format!("cluster_arrow_{id}")));
    let _ = writeln!(out, "    label={};", q(&format!("{id} (truncated)")));
    for v in &b.vertices {
        let node = format!("{id}/{}", v.id);
        let _ = writeln!(out, "    {} [label={}];", q(&node), q(&format!("v^{}_{}", v.rank, v.id)));
        let members: Vec<Member> = v
            .members
            .iter()
            .map(|m| Member { direction: m.direction, tip: crate::model::Item::new(format!("{id}/{}", m.tip)) })
            .collect();
        membership(out, "    ", &node, &members);
    }
    out.push_str("  }\n");
}

/// Renders `d`, unfolding templates and vertex families to `depth` cells
/// and truncating rank templates at `depth`.
pub fn to_dot(d: &Digraph, depth: usize) -> Result<String, OmegaError> {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", q(&d.name));
    out.push_str("  rankdir=LR;\n");
    for v in d.vertices.values().filter(|v| v.rank == RankTag::ZERO) {
        let _ = writeln!(out, "  {};", q(&v.id));
    }
    for a in d.arcs.values() {
        let _ = writeln!(out, "  {} -> {} [label={}];", q(&a.tail), q(&a.head), q(&a.id));
    }
    for t in d.templates.values() {
        let u = t.unfold(depth);
        let _ = writeln!(out, "  subgraph {} {{", q(&format!("cluster_template_{}", t.id)));
        let _ = writeln!(out, "    label={};", q(&t.id));
        for v in &u.vertices {
            let _ = writeln!(out, "    {};", q(v));
        }
        for (id, tail, head) in &u.arcs {
            let _ = writeln!(out, "    {} -> {} [label={}];", q(tail), q(head), q(id));
        }
        out.push_str("  }\n");
    }
    for r in ranks(d).into_iter().filter(|&r| r != RankTag::ZERO) {
        let label = rank_label(r);
        let _ = writeln!(out, "  subgraph {} {{", q(&format!("cluster_rank_{label}")));
        let _ = writeln!(out, "    label={};", q(&format!("rank {label}")));
        for v in d.vertices.values().filter(|v| v.rank == r) {
            let _ = writeln!(out, "    {} [label={}];", q(&v.id), q(&format!("v^{label}_{}", v.id)));
            membership(&mut out, "    ", &v.id, &v.members);
        }
        for f in d.families.values().filter(|f| f.rank == r) {
            for n in 0..depth as i64 {
                let id = format!("{}@{n}", f.id);
                let _ = writeln!(out, "    {} [label={}];", q(&id), q(&format!("v^{label}_{id}")));
                let members: Vec<Member> =
                    f.members.iter().map(|m| Member { direction: m.direction, tip: m.tip.resolve(n) }).collect();
                membership(&mut out, "    ", &id, &members);
            }
        }
        out.push_str("  }\n");
    }
    for t in d.arrow_templates.values() {
        let b = t.truncate(d, depth as i64)?;
        truncated(&mut out, &b, &t.id);
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_spec;
    use super::*;

    #[test]
    fn stable_and_escaped() {
        let doc = parse_spec("digraph d rank 0 vertex u rank 0 vertex v rank 0 arc a from u to v").unwrap();
        let s = to_dot(&doc.digraph, 3).unwrap();
        assert_eq!(s, to_dot(&doc.digraph, 3).unwrap());
        assert!(s.contains("\"u\" -> \"v\" [label=\"a\"];"));
        assert_eq!(q("a\"b"), "\"a\\\"b\"");
    }
}
