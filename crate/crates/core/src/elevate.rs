//! Raising the rank: ditips of rank ρ are partitioned into vertices of
//! rank ρ+1.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::model::{Digraph, Id, Index, Item, Member, ValidationReport, Vertex, VertexFamily, ViolationKind};
use crate::present::{compute_ditips, Ditip, TipTable};
use crate::rank::RankTag;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ElevateError {
    #[error("no ditips of rank {0} to partition")]
    EmptyTipSet(RankTag),
    #[error("not a partition: {}", describe(.missing, .repeated, .unknown))]
    NotAPartition { missing: Vec<String>, repeated: Vec<String>, unknown: Vec<String> },
    #[error("id `{0}` is already in use")]
    DuplicateId(Id),
    #[error("cannot partition at rank {0}")]
    BadRank(RankTag),
    #[error("ditip family `{0}` cannot be placed in finitely many vertices")]
    InfiniteCell(Id),
    #[error("elevated digraph fails validation: {0:?}")]
    Invalid(ValidationReport),
}

fn describe(missing: &[String], repeated: &[String], unknown: &[String]) -> String {
    let mut parts = Vec::new();
    for (label, ids) in [("missing", missing), ("repeated", repeated), ("unknown", unknown)] {
        if !ids.is_empty() {
            parts.push(format!("{label} {}", ids.join(", ")));
        }
    }
    parts.join("; ")
}

impl ElevateError {
    pub fn code(&self) -> &'static str {
        match self {
            ElevateError::EmptyTipSet(_) => "E_EMPTY_TIP_SET",
            ElevateError::NotAPartition { .. } => "E_NOT_A_PARTITION",
            ElevateError::DuplicateId(_) => "E_DUPLICATE_ID",
            ElevateError::BadRank(_) => "E_BAD_RANK",
            ElevateError::InfiniteCell(_) => "E_INFINITE_CELL",
            ElevateError::Invalid(_) => "E_VALIDATION",
        }
    }
}

/// One new vertex (or, with `family`, one vertex per index `k`) and the
/// ditips it receives. Family cells list members as `t@k+e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionCell {
    pub id: Id,
    pub family: bool,
    pub members: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionSpec {
    pub rank: RankTag,
    pub cells: Vec<PartitionCell>,
}

impl PartitionSpec {
    /// Every ditip in a vertex of its own (labelled convenience).
    pub fn discrete(rank: RankTag, tips: &[Ditip]) -> PartitionSpec {
        let cells = tips
            .iter()
            .map(|t| PartitionCell {
                id: format!("v_{}", t.id),
                family: t.family,
                members: vec![if t.family { Item::rel(t.id.clone(), 0) } else { Item::new(t.id.clone()) }],
            })
            .collect();
        PartitionSpec { rank, cells }
    }

    /// All ditips in one vertex (labelled convenience); finite tip sets only.
    pub fn indiscrete(rank: RankTag, tips: &[Ditip], id: &str) -> Result<PartitionSpec, ElevateError> {
        if let Some(t) = tips.iter().find(|t| t.family) {
            return Err(ElevateError::InfiniteCell(t.id.clone()));
        }
        let members = tips.iter().map(|t| Item::new(t.id.clone())).collect();
        Ok(PartitionSpec { rank, cells: vec![PartitionCell { id: id.into(), family: false, members }] })
    }
}

/// The vertices of rank ρ+1 the partition describes.
pub fn partition_tips(
    tips: &[Ditip],
    table: &TipTable,
    spec: &PartitionSpec,
) -> Result<(Vec<Vertex>, Vec<VertexFamily>), ElevateError> {
    let rank = spec.rank;
    let above = rank.vertex_rank_above().ok_or(ElevateError::BadRank(rank))?;
    let tips: Vec<&Ditip> = tips.iter().filter(|t| t.rank == rank).collect();
    if tips.is_empty() {
        return Err(ElevateError::EmptyTipSet(rank));
    }
    let mut fixed: BTreeMap<&str, Vec<Option<i64>>> = BTreeMap::new();
    let mut offsets: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
    let mut unknown = BTreeSet::new();
    for cell in &spec.cells {
        for m in &cell.members {
            let Some(t) = table.resolve(&m.id).filter(|t| t.rank == rank) else {
                unknown.insert(m.to_string());
                continue;
            };
            match (cell.family, m.index) {
                (true, Index::Rel(e)) if t.family && e >= 0 => offsets.entry(&t.id).or_default().push(e),
                (false, Index::None) if !t.family => fixed.entry(&t.id).or_default().push(None),
                (false, Index::At(n)) if t.family && n >= 0 => fixed.entry(&t.id).or_default().push(Some(n)),
                _ => {
                    unknown.insert(m.to_string());
                }
            }
        }
    }
    let (mut missing, mut repeated) = (Vec::new(), Vec::new());
    for t in &tips {
        let f = fixed.get(t.id.as_str()).cloned().unwrap_or_default();
        if !t.family {
            match f.len() {
                0 => missing.push(t.id.clone()),
                1 => {}
                _ => repeated.push(t.id.clone()),
            }
            continue;
        }
        let e = offsets.get(t.id.as_str()).cloned().unwrap_or_default();
        let top = f.iter().flatten().chain(&e).copied().max().unwrap_or(0) + 1;
        for n in 0..=top {
            let count = f.iter().filter(|x| **x == Some(n)).count() + e.iter().filter(|&&x| n >= x).count();
            match count {
                0 if n == top => missing.push(format!("{}@n for n >= {n}", t.id)),
                0 => missing.push(format!("{}@{n}", t.id)),
                1 => {}
                _ if n == top => repeated.push(format!("{}@n for n >= {n}", t.id)),
                _ => repeated.push(format!("{}@{n}", t.id)),
            }
        }
    }
    if !(missing.is_empty() && repeated.is_empty() && unknown.is_empty()) {
        return Err(ElevateError::NotAPartition { missing, repeated, unknown: unknown.into_iter().collect() });
    }
    let member = |m: &Item| Member { direction: table.resolve(&m.id).expect("checked").direction, tip: m.clone() };
    let mut vertices = Vec::new();
    let mut families = Vec::new();
    for cell in &spec.cells {
        let mut members: Vec<Member> = cell.members.iter().map(member).collect();
        members.sort();
        if cell.family {
            families.push(VertexFamily { id: cell.id.clone(), rank: above, members });
        } else {
            vertices.push(Vertex { id: cell.id.clone(), rank: above, members });
        }
    }
    Ok((vertices, families))
}

/// `d` with one more level of vertices, built from `spec`.
pub fn elevate(d: &Digraph, spec: &PartitionSpec) -> Result<Digraph, ElevateError> {
    if spec.rank.finite().is_none() {
        return Err(ElevateError::BadRank(spec.rank));
    }
    let tips = compute_ditips(d, spec.rank);
    let table = TipTable::new(d);
    add_level(d, &tips, &table, spec)
}

/// `d` plus the vertices `spec` builds from `tips`, validated.
pub fn add_level(d: &Digraph, tips: &[Ditip], table: &TipTable, spec: &PartitionSpec) -> Result<Digraph, ElevateError> {
    let (vertices, families) = partition_tips(tips, table, spec)?;
    let mut out = d.clone();
    for v in vertices {
        if out.contains_id(&v.id) {
            return Err(ElevateError::DuplicateId(v.id));
        }
        out.vertices.insert(v.id.clone(), v);
    }
    for f in families {
        if out.contains_id(&f.id) {
            return Err(ElevateError::DuplicateId(f.id));
        }
        out.families.insert(f.id.clone(), f);
    }
    let above = spec.rank.vertex_rank_above().expect("checked by partition_tips");
    out.rank = out.rank.max(above);
    let report = out.validate();
    if !report.is_ok() {
        return Err(ElevateError::Invalid(report));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Branch {
    pub id: Id,
    pub ends: [Id; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Node {
    pub rank: RankTag,
    pub id: Id,
    pub family: bool,
    /// Undirected tips.
    pub tips: Vec<Item>,
}

/// The digraph with every direction forgotten: arcs become branches,
/// vertices nodes, in- and outtips plain tips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnderlyingGraph {
    pub branches: Vec<Branch>,
    pub nodes: Vec<Node>,
}

impl UnderlyingGraph {
    pub fn level(&self, rank: RankTag) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.rank == rank)
    }

    /// The same partition applied to the undirected tips.
    pub fn apply_partition(&self, spec: &PartitionSpec) -> Option<UnderlyingGraph> {
        let above = spec.rank.vertex_rank_above()?;
        let mut g = self.clone();
        for c in &spec.cells {
            let mut tips = c.members.clone();
            tips.sort();
            g.nodes.push(Node { rank: above, id: c.id.clone(), family: c.family, tips });
        }
        g.nodes.sort();
        Some(g)
    }
}

pub fn underlying_graph(d: &Digraph) -> UnderlyingGraph {
    let mut branches: Vec<Branch> = d
        .arcs
        .values()
        .map(|a| {
            let mut ends = [a.tail.clone(), a.head.clone()];
            ends.sort();
            Branch { id: a.id.clone(), ends }
        })
        .collect();
    branches.sort();
    let node = |id: &Id, rank: RankTag, family: bool, members: &[Member]| {
        let mut tips: Vec<Item> = members.iter().map(|m| m.tip.clone()).collect();
        tips.sort();
        Node { rank, id: id.clone(), family, tips }
    };
    let mut nodes: Vec<Node> = d
        .vertices
        .values()
        .map(|v| node(&v.id, v.rank, false, &v.members))
        .chain(d.families.values().map(|f| node(&f.id, f.rank, true, &f.members)))
        .collect();
    nodes.sort();
    UnderlyingGraph { branches, nodes }
}

/// Violations of the pristine rules: members one rank below, no vertex
/// inside another.
pub fn check_pristine(d: &Digraph) -> ValidationReport {
    let full = crate::model::validate_bundle(&d.bundle());
    let mut report = ValidationReport::default();
    for v in full.violations {
        if matches!(v.kind, ViolationKind::NonPristineMemberRank | ViolationKind::EmbracedVertex) {
            report.push(v);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Arc, Direction};
    use crate::present::{Mode, WalkPresentation};

    /// Two one-ended rays over concrete arcs: `s` leaves `u`, `t` enters `w`.
    fn two_rays() -> Digraph {
        let mut d = Digraph::new("rays", RankTag::ZERO);
        for v in ["u", "w"] {
            d.vertices.insert(v.into(), Vertex { id: v.into(), rank: RankTag::ZERO, members: vec![] });
        }
        d.templates.insert(
            "T".into(),
            crate::present::CellTemplate {
                id: "T".into(),
                copies: false,
                nodes: vec!["a".into(), "b".into()],
                arcs: vec![
                    crate::present::TemplateArc { id: "x".into(), tail: ("a".into(), 0), head: ("a".into(), 1) },
                    crate::present::TemplateArc { id: "y".into(), tail: ("b".into(), 1), head: ("b".into(), 0) },
                ],
            },
        );
        let ray = |id: &str, mode: Mode, prefix: Vec<Item>, rep: Vec<Item>| WalkPresentation {
            id: id.into(),
            rank: RankTag::ZERO,
            template: Some("T".into()),
            mode,
            left: vec![],
            left_anchor: 0,
            prefix,
            repetend: rep,
            anchor: 0,
        };
        d.presentations.insert("s".into(), ray("s", Mode::Out, vec![], vec![Item::rel("a", 0), Item::rel("x", 0)]));
        d.presentations.insert("t".into(), ray("t", Mode::In, vec![Item::at("b", 0)], vec![Item::rel("b", 1), Item::rel("y", 0)]));
        d.arcs.insert("e".into(), Arc { id: "e".into(), tail: "u".into(), head: "w".into() });
        d
    }

    fn cell(id: &str, members: &[&str]) -> PartitionCell {
        PartitionCell { id: id.into(), family: false, members: members.iter().map(|m| Item::new(*m)).collect() }
    }

    #[test]
    fn one_cell_two_tips() {
        let d = two_rays();
        let spec = PartitionSpec { rank: RankTag::ZERO, cells: vec![cell("v", &["s", "t"])] };
        let e = elevate(&d, &spec).unwrap();
        let v = &e.vertices["v"];
        assert_eq!(v.rank, RankTag::Finite(1));
        assert_eq!(v.members.len(), 2);
        assert!(v.members.iter().any(|m| m.direction == Direction::Out));
        assert_eq!(e.rank, RankTag::Finite(1));
        assert!(check_pristine(&e).is_ok());
    }

    #[test]
    fn discrete_and_errors() {
        let d = two_rays();
        let tips = compute_ditips(&d, RankTag::ZERO);
        let spec = PartitionSpec::discrete(RankTag::ZERO, &tips);
        assert_eq!(elevate(&d, &spec).unwrap().vertices.len(), 4);
        let bad = PartitionSpec { rank: RankTag::ZERO, cells: vec![cell("v", &["s", "nope"])] };
        assert!(matches!(elevate(&d, &bad), Err(ElevateError::NotAPartition { .. })));
        let empty = PartitionSpec { rank: RankTag::Finite(1), cells: vec![] };
        assert!(matches!(elevate(&d, &empty), Err(ElevateError::EmptyTipSet(_))));
    }

    #[test]
    fn underlying_commutes() {
        let d = two_rays();
        let spec = PartitionSpec { rank: RankTag::ZERO, cells: vec![cell("p", &["s"]), cell("q", &["t"])] };
        let lhs = underlying_graph(&elevate(&d, &spec).unwrap());
        let rhs = underlying_graph(&d).apply_partition(&spec).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.branches.len(), d.arcs.len());
    }
}
