//! Domain types: arcs, ranked vertices, declared ditips and digraph bundles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::omega::{ArrowJoin, ArrowWalk, RankTemplate};
use crate::present::{CellTemplate, WalkPresentation};
use crate::rank::RankTag;

pub type Id = String;

/// Index attached to a reference: none for concrete objects, an absolute
/// family/cell index, or an offset relative to the running index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Index {
    None,
    At(i64),
    Rel(i64),
}

impl Index {
    pub fn is_none(self) -> bool {
        self == Index::None
    }

    /// Resolves a relative index against `k`; absolute and empty indices are unchanged.
    pub fn resolve(self, k: i64) -> Index {
        match self {
            Index::Rel(c) => Index::At(k + c),
            other => other,
        }
    }

    pub fn value(self) -> Option<i64> {
        match self {
            Index::None => None,
            Index::At(n) | Index::Rel(n) => Some(n),
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Index::None => Ok(()),
            Index::At(n) => write!(f, "@{n}"),
            Index::Rel(0) => f.write_str("@k"),
            Index::Rel(c) if c > 0 => write!(f, "@k+{c}"),
            Index::Rel(c) => write!(f, "@k-{}", -c),
        }
    }
}

/// A reference to a vertex, arc, walk or ditip, possibly indexed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Item {
    pub id: Id,
    pub index: Index,
}

impl Item {
    pub fn new(id: impl Into<Id>) -> Item {
        Item { id: id.into(), index: Index::None }
    }

    pub fn at(id: impl Into<Id>, n: i64) -> Item {
        Item { id: id.into(), index: Index::At(n) }
    }

    pub fn rel(id: impl Into<Id>, c: i64) -> Item {
        Item { id: id.into(), index: Index::Rel(c) }
    }

    pub fn resolve(&self, k: i64) -> Item {
        Item { id: self.id.clone(), index: self.index.resolve(k) }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.id, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::In => Direction::Out,
            Direction::Out => Direction::In,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "intip",
            Direction::Out => "outtip",
        })
    }
}

/// A directed arc. Its (-1)-intip sits at `tail`, its (-1)-outtip at `head`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub id: Id,
    pub tail: Id,
    pub head: Id,
}

/// One ditip listed inside a vertex. `tip` names the ditip or any of its
/// representatives.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Member {
    pub direction: Direction,
    pub tip: Item,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub id: Id,
    pub rank: RankTag,
    pub members: Vec<Member>,
}

/// Infinitely many vertices `id@k`, `k = 0, 1, ...`; member `t@k+c` places
/// the instance `t@(k+c)` of the ditip family `t` in `id@k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexFamily {
    pub id: Id,
    pub rank: RankTag,
    pub members: Vec<Member>,
}

/// An explicitly listed finite walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteWalk {
    pub id: Id,
    pub rank: RankTag,
    pub elements: Vec<Item>,
}

/// A ditip as seen by bundle validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeclaredTip {
    pub id: Id,
    pub direction: Direction,
    pub rank: RankTag,
    /// One ditip per family index rather than a single one.
    pub family: bool,
}

/// The level view of a transfinite digraph: arcs, the vertex levels and the
/// ditips those levels partition.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DigraphBundle {
    pub name: Id,
    pub rank: Option<RankTag>,
    pub arcs: Vec<Arc>,
    pub vertices: Vec<Vertex>,
    pub families: Vec<VertexFamily>,
    pub tips: Vec<DeclaredTip>,
    /// Representative id to ditip id.
    pub aliases: BTreeMap<Id, Id>,
    /// Level 0 is populated by cell templates rather than concrete vertices.
    pub periodic_zero: bool,
    /// Finite levels come from a rank template and are checked by truncation.
    pub symbolic_levels: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DuplicateId,
    DanglingArc,
    InvalidRank,
    RankOutOfRange,
    EmptyVertex,
    NonPristineMemberRank,
    EmbracedVertex,
    UnknownTip,
    DirectionMismatch,
    IndexMismatch,
    PartitionIncomplete,
    PartitionOverlap,
    LevelGap,
    InvalidTemplate,
    InvalidWalk,
}

impl ViolationKind {
    pub fn describe(self) -> &'static str {
        match self {
            ViolationKind::DuplicateId => "duplicate id",
            ViolationKind::DanglingArc => "arc endpoint is not a 0-vertex",
            ViolationKind::InvalidRank => "invalid rank",
            ViolationKind::RankOutOfRange => "rank exceeds digraph rank",
            ViolationKind::EmptyVertex => "empty vertex",
            ViolationKind::NonPristineMemberRank => "non-pristine member rank",
            ViolationKind::EmbracedVertex => "vertex embraces a vertex",
            ViolationKind::UnknownTip => "unknown ditip",
            ViolationKind::DirectionMismatch => "ditip direction mismatch",
            ViolationKind::IndexMismatch => "ditip index mismatch",
            ViolationKind::PartitionIncomplete => "partition incomplete",
            ViolationKind::PartitionOverlap => "partition overlap",
            ViolationKind::LevelGap => "empty level",
            ViolationKind::InvalidTemplate => "invalid template",
            ViolationKind::InvalidWalk => "invalid walk",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub ids: Vec<Id>,
    pub detail: String,
}

impl Violation {
    pub fn new(kind: ViolationKind, ids: Vec<Id>, detail: impl Into<String>) -> Violation {
        Violation { kind, ids, detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.kind.describe(), self.ids.join(", "))?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    fn finish(mut self) -> ValidationReport {
        self.violations.sort();
        self.violations.dedup();
        self
    }
}

impl DigraphBundle {
    pub fn level(&self, rank: RankTag) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(move |v| v.rank == rank)
    }

    pub fn level_families(&self, rank: RankTag) -> impl Iterator<Item = &VertexFamily> {
        self.families.iter().filter(move |v| v.rank == rank)
    }

    pub fn resolve_tip(&self, id: &str) -> Option<&DeclaredTip> {
        let id = self.aliases.get(id).map(String::as_str).unwrap_or(id);
        self.tips.iter().find(|t| t.id == id)
    }
}

/// Checks every structural invariant of a bundle and lists each violation
/// with the offending ids.
pub fn validate_bundle(d: &DigraphBundle) -> ValidationReport {
    let mut report = ValidationReport::default();
    let rank = d.rank.unwrap_or(RankTag::ZERO);

    let mut seen = BTreeSet::new();
    let all_ids = d
        .vertices
        .iter()
        .map(|v| &v.id)
        .chain(d.families.iter().map(|f| &f.id))
        .chain(d.arcs.iter().map(|a| &a.id));
    for id in all_ids {
        if !seen.insert(id.as_str()) {
            report.push(Violation::new(ViolationKind::DuplicateId, vec![id.clone()], ""));
        }
    }

    if !rank.is_digraph_rank() {
        report.push(Violation::new(ViolationKind::InvalidRank, vec![d.name.clone()], rank.to_string()));
    }

    for a in &d.arcs {
        for end in [&a.tail, &a.head] {
            let ok = d.vertices.iter().any(|v| &v.id == end && v.rank == RankTag::ZERO);
            if !ok {
                report.push(Violation::new(
                    ViolationKind::DanglingArc,
                    vec![a.id.clone(), end.clone()],
                    "",
                ));
            }
        }
    }

    let vertex_names: BTreeSet<&str> = d
        .vertices
        .iter()
        .map(|v| v.id.as_str())
        .chain(d.families.iter().map(|f| f.id.as_str()))
        .collect();

    let concrete = d.vertices.iter().map(|v| (&v.id, v.rank, &v.members, false));
    let families = d.families.iter().map(|f| (&f.id, f.rank, &f.members, true));
    for (id, vrank, members, is_family) in concrete.chain(families) {
        check_vertex(d, &mut report, &vertex_names, id, vrank, members, is_family, rank);
    }

    check_partition(d, &mut report, rank);
    check_levels(d, &mut report, rank);
    report.finish()
}

#[allow(clippy::too_many_arguments)]
fn check_vertex(
    d: &DigraphBundle,
    report: &mut ValidationReport,
    vertex_names: &BTreeSet<&str>,
    id: &Id,
    vrank: RankTag,
    members: &[Member],
    is_family: bool,
    rank: RankTag,
) {
    if !vrank.is_vertex_rank() || (is_family && vrank == RankTag::ZERO) {
        report.push(Violation::new(ViolationKind::InvalidRank, vec![id.clone()], vrank.to_string()));
        return;
    }
    if vrank > rank {
        report.push(Violation::new(
            ViolationKind::RankOutOfRange,
            vec![id.clone()],
            format!("vertex rank {vrank} above digraph rank {rank}"),
        ));
    }
    if vrank != RankTag::ZERO && members.is_empty() {
        report.push(Violation::new(ViolationKind::EmptyVertex, vec![id.clone()], ""));
    }
    let expected = vrank.member_rank();
    for m in members {
        if vertex_names.contains(m.tip.id.as_str()) {
            report.push(Violation::new(
                ViolationKind::EmbracedVertex,
                vec![id.clone(), m.tip.id.clone()],
                "",
            ));
            continue;
        }
        let Some(tip) = d.resolve_tip(&m.tip.id) else {
            report.push(Violation::new(
                ViolationKind::UnknownTip,
                vec![id.clone(), m.tip.id.clone()],
                "",
            ));
            continue;
        };
        if Some(tip.rank) != expected {
            report.push(Violation::new(
                ViolationKind::NonPristineMemberRank,
                vec![id.clone(), tip.id.clone()],
                format!("rank-{vrank} vertex holds a rank-{} ditip", tip.rank),
            ));
        }
        if tip.direction != m.direction {
            report.push(Violation::new(
                ViolationKind::DirectionMismatch,
                vec![id.clone(), tip.id.clone()],
                format!("listed as {} but is an {}", m.direction, tip.direction),
            ));
        }
        let index_ok = match (tip.family, is_family, m.tip.index) {
            (false, _, Index::None) => true,
            (true, false, Index::At(n)) => n >= 0,
            (true, true, Index::Rel(c)) => c >= 0,
            _ => false,
        };
        if !index_ok {
            report.push(Violation::new(
                ViolationKind::IndexMismatch,
                vec![id.clone(), m.tip.to_string()],
                "",
            ));
        }
    }
}

fn check_partition(d: &DigraphBundle, report: &mut ValidationReport, rank: RankTag) {
    // (tip id) -> owners, split into fixed indices and family offsets
    let mut fixed: BTreeMap<&str, Vec<(Option<i64>, &Id)>> = BTreeMap::new();
    let mut rays: BTreeMap<&str, Vec<(i64, &Id)>> = BTreeMap::new();
    for v in &d.vertices {
        for m in &v.members {
            if let Some(t) = d.resolve_tip(&m.tip.id) {
                fixed.entry(t.id.as_str()).or_default().push((m.tip.index.value(), &v.id));
            }
        }
    }
    for f in &d.families {
        for m in &f.members {
            if let (Some(t), Index::Rel(c)) = (d.resolve_tip(&m.tip.id), m.tip.index) {
                rays.entry(t.id.as_str()).or_default().push((c, &f.id));
            }
        }
    }

    for tip in &d.tips {
        let Some(above) = tip.rank.vertex_rank_above() else { continue };
        if above > rank {
            continue;
        }
        let fixed_owners = fixed.get(tip.id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let ray_owners = rays.get(tip.id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        if !tip.family {
            let owners: Vec<Id> = fixed_owners.iter().map(|(_, v)| (*v).clone()).collect();
            match owners.len() {
                0 => report.push(Violation::new(
                    ViolationKind::PartitionIncomplete,
                    vec![tip.id.clone()],
                    format!("no rank-{above} vertex contains it"),
                )),
                1 => {}
                _ => {
                    let mut ids = vec![tip.id.clone()];
                    ids.extend(owners);
                    report.push(Violation::new(ViolationKind::PartitionOverlap, ids, ""));
                }
            }
            continue;
        }
        let bound = fixed_owners
            .iter()
            .filter_map(|(i, _)| *i)
            .chain(ray_owners.iter().map(|(c, _)| *c))
            .max()
            .unwrap_or(0)
            .max(0)
            + 1;
        for n in 0..=bound {
            let mut owners: Vec<String> = fixed_owners
                .iter()
                .filter(|(i, _)| *i == Some(n))
                .map(|(_, v)| (*v).clone())
                .collect();
            owners.extend(
                ray_owners
                    .iter()
                    .filter(|(c, _)| *c <= n)
                    .map(|(c, f)| format!("{f}@{}", n - c)),
            );
            let at = format!("{}@{n}", tip.id);
            match owners.len() {
                0 => {
                    report.push(Violation::new(
                        ViolationKind::PartitionIncomplete,
                        vec![at],
                        format!("no rank-{above} vertex contains it"),
                    ));
                    break;
                }
                1 => {}
                _ => {
                    let mut ids = vec![at];
                    ids.extend(owners);
                    report.push(Violation::new(ViolationKind::PartitionOverlap, ids, ""));
                    break;
                }
            }
        }
    }
}

fn check_levels(d: &DigraphBundle, report: &mut ValidationReport, rank: RankTag) {
    if d.symbolic_levels {
        return;
    }
    let top = match rank {
        RankTag::Finite(n) => n,
        _ => d
            .vertices
            .iter()
            .filter_map(|v| v.rank.finite())
            .chain(d.families.iter().filter_map(|f| f.rank.finite()))
            .max()
            .unwrap_or(0),
    };
    for r in 0..=top {
        let tag = RankTag::Finite(r);
        let populated = d.level(tag).next().is_some() || d.level_families(tag).next().is_some();
        if !populated && !(r == 0 && d.periodic_zero) {
            report.push(Violation::new(ViolationKind::LevelGap, vec![format!("V{r}")], ""));
        }
    }
    if rank == RankTag::Omega && d.level(RankTag::Omega).next().is_none() {
        report.push(Violation::new(ViolationKind::LevelGap, vec!["Vomega".into()], ""));
    }
}

/// A fully resolved document: the bundle data plus the finite presentations
/// (templates, walk presentations, rank templates) that stand in for its
/// infinite structure. Immutable once built.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Digraph {
    pub name: Id,
    pub rank: RankTag,
    pub vertices: BTreeMap<Id, Vertex>,
    pub families: BTreeMap<Id, VertexFamily>,
    pub arcs: BTreeMap<Id, Arc>,
    pub templates: BTreeMap<Id, CellTemplate>,
    pub presentations: BTreeMap<Id, WalkPresentation>,
    pub walks: BTreeMap<Id, FiniteWalk>,
    pub arrow_templates: BTreeMap<Id, RankTemplate>,
    pub arrow_walks: BTreeMap<Id, ArrowWalk>,
    pub arrow_joins: BTreeMap<Id, ArrowJoin>,
}

impl Default for RankTag {
    fn default() -> Self {
        RankTag::ZERO
    }
}

impl Digraph {
    pub fn new(name: impl Into<Id>, rank: RankTag) -> Digraph {
        Digraph { name: name.into(), rank, ..Digraph::default() }
    }

    /// Every id in the shared namespace.
    pub fn contains_id(&self, id: &str) -> bool {
        self.vertices.contains_key(id)
            || self.families.contains_key(id)
            || self.arcs.contains_key(id)
            || self.templates.contains_key(id)
            || self.presentations.contains_key(id)
            || self.walks.contains_key(id)
            || self.arrow_templates.contains_key(id)
            || self.arrow_walks.contains_key(id)
            || self.arrow_joins.contains_key(id)
    }

    pub fn vertex_rank(&self, id: &str) -> Option<RankTag> {
        self.vertices
            .get(id)
            .map(|v| v.rank)
            .or_else(|| self.families.get(id).map(|f| f.rank))
    }

    /// The level view: arcs, vertices and all ditips computed from the
    /// declared presentations (finite ranks and the arrow rank).
    pub fn bundle(&self) -> DigraphBundle {
        let mut tips = Vec::new();
        let mut aliases = BTreeMap::new();
        for t in crate::present::all_ditips(self) {
            for m in &t.members {
                aliases.insert(m.clone(), t.id.clone());
            }
            tips.push(DeclaredTip { id: t.id, direction: t.direction, rank: t.rank, family: t.family });
        }
        for t in crate::omega::arrow_ditips(self) {
            for m in &t.members {
                aliases.insert(m.clone(), t.id.clone());
            }
            tips.push(DeclaredTip {
                id: t.id,
                direction: t.direction,
                rank: RankTag::ArrowOmega,
                family: false,
            });
        }
        DigraphBundle {
            name: self.name.clone(),
            rank: Some(self.rank),
            arcs: self.arcs.values().cloned().collect(),
            vertices: self.vertices.values().cloned().collect(),
            families: self.families.values().cloned().collect(),
            tips,
            aliases,
            periodic_zero: !self.templates.is_empty(),
            symbolic_levels: !self.arrow_templates.is_empty(),
        }
    }

    /// Bundle validation plus validation of every template, presentation,
    /// declared walk and rank template.
    pub fn validate(&self) -> ValidationReport {
        let mut report = validate_bundle(&self.bundle());
        report.extend(crate::walk::validate_declared(self));
        report.extend(crate::omega::validate_arrow(self));
        report.finish()
    }
}
