//! Canonical printer. Parsing its output gives back an equal document, and
//! printing twice gives identical text.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::parse::Document;
use crate::elevate::PartitionSpec;
use crate::model::{Digraph, Item, Member};
use crate::omega::{Terminal, DEFAULT_TIP_FORMAT};
use crate::present::Mode;
use crate::rank::RankTag;

fn list(items: &[Item]) -> String {
    let parts: Vec<String> = items.iter().map(Item::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn offset(node: &str, delta: i64) -> String {
    Item::rel(node, delta).to_string()
}

fn members(out: &mut String, members: &[Member]) {
    if members.is_empty() {
        out.push('\n');
        return;
    }
    out.push_str(" {\n");
    for m in members {
        let _ = writeln!(out, "  {} {};", m.direction, m.tip);
    }
    out.push_str("}\n");
}

fn templates(out: &mut String, d: &Digraph) {
    for t in d.templates.values() {
        let copies = if t.copies { " copies" } else { "" };
        let _ = writeln!(out, "template {}{copies} {{", t.id);
        for n in &t.nodes {
            let _ = writeln!(out, "  node {n};");
        }
        for a in &t.arcs {
            let _ = writeln!(out, "  arc {} from {} to {};", a.id, offset(&a.tail.0, a.tail.1), offset(&a.head.0, a.head.1));
        }
        out.push_str("}\n");
    }
}

fn level(out: &mut String, d: &Digraph, r: RankTag) {
    let mut ids: BTreeSet<&str> = BTreeSet::new();
    ids.extend(d.vertices.values().filter(|v| v.rank == r).map(|v| v.id.as_str()));
    ids.extend(d.families.values().filter(|v| v.rank == r).map(|v| v.id.as_str()));
    for id in ids {
        if let Some(v) = d.vertices.get(id) {
            let _ = write!(out, "vertex {} rank {}", v.id, v.rank);
            members(out, &v.members);
        } else {
            let f = &d.families[id];
            let _ = write!(out, "vertex-family {} rank {} index k", f.id, f.rank);
            members(out, &f.members);
        }
    }
}

fn paths(out: &mut String, d: &Digraph, r: RankTag) {
    let mut ids: BTreeSet<&str> = BTreeSet::new();
    ids.extend(d.walks.values().filter(|w| w.rank == r).map(|w| w.id.as_str()));
    ids.extend(d.presentations.values().filter(|p| p.rank == r).map(|p| p.id.as_str()));
    for id in ids {
        if let Some(w) = d.walks.get(id) {
            let _ = writeln!(out, "walk {} rank {} = {}", w.id, w.rank, list(&w.elements));
            continue;
        }
        let p = &d.presentations[id];
        let _ = write!(out, "walk-presentation {} rank {}", p.id, p.rank);
        if let Some(t) = &p.template {
            let _ = write!(out, " over {t}");
        }
        let _ = write!(out, " mode {}", p.mode.keyword());
        if p.mode == Mode::Endless {
            let _ = write!(out, " left {} anchor {}", list(&p.left), p.left_anchor);
        }
        let _ = write!(out, " prefix {}", list(&p.prefix));
        if p.mode != Mode::Finite {
            let _ = write!(out, " repetend {} anchor {}", list(&p.repetend), p.anchor);
        }
        out.push('\n');
    }
}

fn arrows(out: &mut String, d: &Digraph) {
    for t in d.arrow_templates.values() {
        let _ = writeln!(out, "arrow-template {} {{", t.id);
        for v in &t.vertices {
            let _ = writeln!(out, "  vertex {v};");
        }
        for w in &t.walks {
            let at = match &w.terminal {
                Terminal::Pattern(p) | Terminal::Fixed(p) => p,
            };
            let kind = if w.direction == crate::model::Direction::In { "in" } else { "out" };
            let _ = write!(out, "  walk {} {kind} at {at} reach {}", w.name, w.reach);
            if w.tip_format != DEFAULT_TIP_FORMAT {
                let _ = write!(out, " tip \"{}\"", w.tip_format);
            }
            out.push_str(";\n");
        }
        out.push_str("}\n");
    }
    for a in d.arrow_walks.values() {
        let kind = if a.kind == crate::model::Direction::In { "in" } else { "out" };
        let _ = write!(
            out,
            "arrow-walk {} template {} kind {kind} base {} vertex {} step {}",
            a.id, a.template, a.base, a.vertex, a.step
        );
        if !a.overrides.is_empty() {
            let parts: Vec<String> = a.overrides.iter().map(|(p, id)| format!("{p} = {id}")).collect();
            let _ = write!(out, " override {}", parts.join(", "));
        }
        out.push('\n');
    }
    for j in d.arrow_joins.values() {
        let _ = writeln!(out, "arrow-join {} in {} out {}", j.id, j.inward, j.outward);
    }
}

pub fn print_partition(out: &mut String, p: &PartitionSpec) {
    let _ = writeln!(out, "partition rank {} {{", p.rank);
    for c in &p.cells {
        let at = if c.family { "@k" } else { "" };
        let ms: Vec<String> = c.members.iter().map(Item::to_string).collect();
        let _ = writeln!(out, "  {}{at}: {};", c.id, ms.join(", "));
    }
    out.push_str("}\n");
}

pub fn print_digraph(d: &Digraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} rank {}", d.name, d.rank);
    templates(&mut out, d);
    let mut ranks: BTreeSet<i64> = BTreeSet::from([0]);
    ranks.extend(d.vertices.values().filter_map(|v| v.rank.finite()));
    ranks.extend(d.families.values().filter_map(|v| v.rank.finite()));
    ranks.extend(d.walks.values().filter_map(|v| v.rank.finite()));
    ranks.extend(d.presentations.values().filter_map(|v| v.rank.finite()));
    for &r in &ranks {
        let r = RankTag::Finite(r);
        level(&mut out, d, r);
        if r == RankTag::ZERO {
            for a in d.arcs.values() {
                let _ = writeln!(out, "arc {} from {} to {}", a.id, a.tail, a.head);
            }
        }
        paths(&mut out, d, r);
    }
    arrows(&mut out, d);
    level(&mut out, d, RankTag::ArrowOmega);
    level(&mut out, d, RankTag::Omega);
    out
}

pub fn print_document(doc: &Document) -> String {
    let mut out = print_digraph(&doc.digraph);
    for p in &doc.partitions {
        print_partition(&mut out, p);
    }
    out
}
