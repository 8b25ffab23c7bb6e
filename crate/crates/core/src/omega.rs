//! The arrow rank and rank omega.
//!
//! An arrow digraph has vertices of every natural rank. Its levels are given
//! by a [`RankTemplate`]: vertex patterns `V` (one vertex `V^r` per rank
//! `r`) and walk patterns `S` (one one-ended `r`-diwalk `S^r` per rank,
//! terminating at a pattern vertex or at a fixed 0-vertex, and reaching a
//! pattern vertex of rank `r+1` through its ditip). Arrow walks
//! `⟨v_0, W_0, v_1, W_1, ...⟩` climb one rank per term and are described by
//! a vertex pattern, a step pattern, a base rank and finitely many
//! overridden terms.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::connect::{components_of, ComponentOptions, ComponentSet, ConnectError, IncidenceDigraph, Kind, Point};
use crate::elevate::{add_level, ElevateError, PartitionSpec};
use crate::model::{
    Digraph, DigraphBundle, Direction, Id, Item, Member, ValidationReport, Vertex, Violation, ViolationKind,
};
use crate::present::{Ditip, TipTable};
use crate::rank::RankTag;
use crate::walk::WalkError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OmegaError {
    #[error("template `{template}` fails at rank {k}: {detail}")]
    TemplateInstantiationError { template: Id, k: i64, detail: String },
    #[error("`{0}` and `{1}` do not share their base vertex")]
    BaseMismatch(Id, Id),
    #[error("invalid arrow walk `{0}`: {1}")]
    InvalidArrowWalk(Id, String),
    #[error("unknown `{0}`")]
    Unknown(Id),
    #[error(transparent)]
    Elevate(#[from] ElevateError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Connect(#[from] ConnectError),
}

impl OmegaError {
    pub fn code(&self) -> &'static str {
        match self {
            OmegaError::TemplateInstantiationError { .. } => "E_TEMPLATE_INSTANTIATION",
            OmegaError::BaseMismatch(..) => "E_BASE_MISMATCH",
            OmegaError::InvalidArrowWalk(..) => "E_INVALID_ARROW_WALK",
            OmegaError::Unknown(_) => "E_UNKNOWN",
            OmegaError::Elevate(e) => e.code(),
            OmegaError::Walk(e) => e.code(),
            OmegaError::Connect(e) => e.code(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    /// `V^r` for the step `S^r`.
    Pattern(Id),
    /// The same 0-vertex at every rank.
    Fixed(Id),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkPattern {
    pub name: Id,
    pub direction: Direction,
    pub terminal: Terminal,
    /// `S^r` reaches `reach^(r+1)` through its ditip.
    pub reach: Id,
    /// Id of the ditip of `S^r`; `{name}` and `{r}` are substituted.
    pub tip_format: String,
}

pub const DEFAULT_TIP_FORMAT: &str = "{name}^{r}";

impl WalkPattern {
    pub fn tip_id(&self, r: i64) -> String {
        self.tip_format.replace("{name}", &self.name).replace("{r}", &r.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankTemplate {
    pub id: Id,
    pub vertices: Vec<Id>,
    pub walks: Vec<WalkPattern>,
}

pub fn instance_name(pattern: &str, r: i64) -> String {
    format!("{pattern}^{r}")
}

fn parse_instance(name: &str) -> Option<(&str, i64)> {
    let (p, r) = name.rsplit_once('^')?;
    Some((p, r.parse().ok()?))
}

impl RankTemplate {
    pub fn walk(&self, name: &str) -> Option<&WalkPattern> {
        self.walks.iter().find(|w| w.name == name)
    }

    pub fn has_vertex(&self, name: &str) -> bool {
        self.vertices.iter().any(|v| v == name)
    }

    fn terminal_name(&self, w: &WalkPattern, r: i64) -> String {
        match &w.terminal {
            Terminal::Pattern(v) => instance_name(v, r),
            Terminal::Fixed(c) => c.clone(),
        }
    }

    /// Ranks `0..=k`: vertices `V^r` for every `r <= k`, walks and ditips
    /// for `r < k`, each ditip held by the reached vertex.
    pub fn truncate(&self, d: &Digraph, k: i64) -> Result<DigraphBundle, OmegaError> {
        let fail = |k: i64, detail: String| OmegaError::TemplateInstantiationError { template: self.id.clone(), k, detail };
        let mut names: BTreeSet<String> = d.vertices.keys().chain(d.arcs.keys()).cloned().collect();
        for w in &self.walks {
            if !self.has_vertex(&w.reach) {
                return Err(fail(0, format!("walk pattern `{}` reaches unknown pattern `{}`", w.name, w.reach)));
            }
            match &w.terminal {
                Terminal::Pattern(v) if !self.has_vertex(v) => {
                    return Err(fail(0, format!("walk pattern `{}` ends at unknown pattern `{v}`", w.name)));
                }
                Terminal::Fixed(c) if d.vertices.get(c).is_none_or(|v| v.rank != RankTag::ZERO) => {
                    return Err(fail(0, format!("fixed terminal `{c}` is not a 0-vertex")));
                }
                _ => {}
            }
        }
        let mut vertices: BTreeMap<String, Vertex> = BTreeMap::new();
        let mut tips = Vec::new();
        let mut aliases = BTreeMap::new();
        for r in 0..=k {
            for v in &self.vertices {
                let id = instance_name(v, r);
                if !names.insert(id.clone()) {
                    return Err(fail(r, format!("vertex id `{id}` already in use")));
                }
                vertices.insert(id.clone(), Vertex { id, rank: RankTag::Finite(r), members: vec![] });
            }
        }
        for r in 0..k {
            for w in &self.walks {
                let walk = instance_name(&w.name, r);
                let tip = w.tip_id(r);
                if walk != tip && !names.insert(walk.clone()) {
                    return Err(fail(r, format!("walk id `{walk}` already in use")));
                }
                if !names.insert(tip.clone()) {
                    return Err(fail(r, format!("ditip id `{tip}` already in use")));
                }
                aliases.insert(walk, tip.clone());
                tips.push(crate::model::DeclaredTip {
                    id: tip.clone(),
                    direction: w.direction,
                    rank: RankTag::Finite(r),
                    family: false,
                });
                let holder = vertices.get_mut(&instance_name(&w.reach, r + 1)).expect("reach checked");
                holder.members.push(Member { direction: w.direction, tip: Item::new(tip) });
            }
        }
        if let Some(v) = vertices.values().find(|v| v.rank > RankTag::ZERO && v.members.is_empty()) {
            let r = v.rank.finite().unwrap_or(0);
            return Err(fail(r, format!("vertex `{}` receives no ditip", v.id)));
        }
        let mut all: Vec<Vertex> = d.vertices.values().filter(|v| v.rank == RankTag::ZERO).cloned().collect();
        all.extend(vertices.into_values());
        Ok(DigraphBundle {
            name: d.name.clone(),
            rank: Some(RankTag::Finite(k)),
            arcs: d.arcs.values().cloned().collect(),
            vertices: all,
            families: vec![],
            tips,
            aliases,
            periodic_zero: false,
            symbolic_levels: false,
        })
    }

    /// Instantiation at ranks `0..=k` for every `k <= up_to`.
    pub fn check(&self, d: &Digraph, up_to: i64) -> Result<(), OmegaError> {
        for k in 0..=up_to {
            let b = self.truncate(d, k)?;
            let report = crate::model::validate_bundle(&b);
            if let Some(v) = report.violations.first() {
                return Err(OmegaError::TemplateInstantiationError { template: self.id.clone(), k, detail: v.to_string() });
            }
        }
        Ok(())
    }
}

/// `⟨v_0, W_0, v_1, W_1, ...⟩` (kind `Out`, climbing rightward) or
/// `⟨..., W_-2, v_-1, W_-1, v_0⟩` (kind `In`). Term `p` counted from `v_0`
/// is `vertex^(base + p/2)` for even `p` and `step^(base + p/2)` for odd
/// `p`, unless overridden.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowWalk {
    pub id: Id,
    pub template: Id,
    pub kind: Direction,
    pub base: i64,
    pub vertex: Id,
    pub step: Id,
    pub overrides: BTreeMap<usize, Id>,
}

impl ArrowWalk {
    pub fn term(&self, p: usize) -> String {
        if let Some(o) = self.overrides.get(&p) {
            return o.clone();
        }
        let pattern = if p % 2 == 0 { &self.vertex } else { &self.step };
        instance_name(pattern, self.base + (p / 2) as i64)
    }

    /// Terms `0..n` counted from `v_0`.
    pub fn terms(&self, n: usize) -> Vec<String> {
        (0..n).map(|p| self.term(p)).collect()
    }

    /// Terms in walk order covering `periods` vertex/step pairs.
    pub fn unfold(&self, periods: usize) -> Vec<String> {
        let mut t = self.terms(2 * periods + 1);
        if self.kind == Direction::In {
            t.reverse();
        }
        t
    }

    fn horizon(&self) -> usize {
        self.overrides.keys().max().map_or(0, |m| m + 1) + 4
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowJoin {
    pub id: Id,
    pub inward: Id,
    pub outward: Id,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowDitip {
    pub id: Id,
    pub direction: Direction,
    pub members: Vec<Id>,
}

fn template_of<'d>(d: &'d Digraph, w: &ArrowWalk) -> Result<&'d RankTemplate, OmegaError> {
    d.arrow_templates.get(&w.template).ok_or_else(|| OmegaError::Unknown(w.template.clone()))
}

/// Structural validation of an arrow walk against its template.
pub fn validate_arrow_walk(d: &Digraph, w: &ArrowWalk) -> Result<(), OmegaError> {
    let t = template_of(d, w)?;
    let bad = |m: String| OmegaError::InvalidArrowWalk(w.id.clone(), m);
    if w.base < 0 {
        return Err(bad("negative base rank".into()));
    }
    if !t.has_vertex(&w.vertex) {
        return Err(bad(format!("unknown vertex pattern `{}`", w.vertex)));
    }
    if t.walk(&w.step).is_none() {
        return Err(bad(format!("unknown walk pattern `{}`", w.step)));
    }
    for p in (1..w.horizon()).step_by(2) {
        let r = w.base + (p / 2) as i64;
        let name = w.term(p);
        let Some((s, rs)) = parse_instance(&name).filter(|(_, rs)| *rs == r) else {
            return Err(bad(format!("term {p} `{name}` is not a walk of rank {r}")));
        };
        let s = t.walk(s).ok_or_else(|| bad(format!("term {p} `{name}` is not a walk of the template")))?;
        if s.direction != w.kind {
            let want = if w.kind == Direction::Out { "outward" } else { "inward" };
            return Err(bad(format!("term {p} `{name}` is not extended {want}")));
        }
        if t.terminal_name(s, rs) != w.term(p - 1) {
            return Err(bad(format!("term {p} `{name}` does not terminate at `{}`", w.term(p - 1))));
        }
        if instance_name(&s.reach, rs + 1) != w.term(p + 1) {
            return Err(bad(format!("term {p} `{name}` does not reach `{}`", w.term(p + 1))));
        }
    }
    Ok(())
}

/// All terms distinct beyond finitely many. Uniform terms climb in rank,
/// so every valid arrow walk is extended.
pub fn is_extended_arrow(d: &Digraph, w: &ArrowWalk) -> bool {
    validate_arrow_walk(d, w).is_ok()
}

/// Eventual identity of two arrow walks of one kind.
pub fn eventually_identical_arrow(a: &ArrowWalk, b: &ArrowWalk) -> bool {
    a.kind == b.kind && a.template == b.template && a.vertex == b.vertex && a.step == b.step
}

/// The endless arrow walk through both, checked for a shared `v_0`.
pub fn join_endless(id: &str, inward: &ArrowWalk, outward: &ArrowWalk) -> Result<ArrowJoin, OmegaError> {
    if inward.kind != Direction::In || outward.kind != Direction::Out {
        return Err(OmegaError::InvalidArrowWalk(id.into(), "join needs an inward and an outward walk".into()));
    }
    if inward.base != outward.base || inward.term(0) != outward.term(0) {
        return Err(OmegaError::BaseMismatch(inward.id.clone(), outward.id.clone()));
    }
    Ok(ArrowJoin { id: id.into(), inward: inward.id.clone(), outward: outward.id.clone() })
}

/// The two constituents of a join.
pub fn split_endless<'d>(d: &'d Digraph, j: &ArrowJoin) -> Option<(&'d ArrowWalk, &'d ArrowWalk)> {
    Some((d.arrow_walks.get(&j.inward)?, d.arrow_walks.get(&j.outward)?))
}

/// An endless arrow walk is extended when both halves are and their tails
/// share no term.
pub fn is_extended_join(d: &Digraph, j: &ArrowJoin) -> bool {
    let Some((i, o)) = split_endless(d, j) else { return false };
    is_extended_arrow(d, i) && is_extended_arrow(d, o) && !(i.template == o.template && i.vertex == o.vertex)
}

pub fn arrow_ditips(d: &Digraph) -> Vec<ArrowDitip> {
    let mut classes: BTreeMap<(Direction, &Id, &Id, &Id), Vec<Id>> = BTreeMap::new();
    for w in d.arrow_walks.values().filter(|w| is_extended_arrow(d, w)) {
        classes.entry((w.kind, &w.template, &w.vertex, &w.step)).or_default().push(w.id.clone());
    }
    let mut out: Vec<ArrowDitip> = classes
        .into_iter()
        .map(|((direction, ..), mut members)| {
            members.sort();
            ArrowDitip { id: members[0].clone(), direction, members }
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

fn arrow_table(d: &Digraph) -> (Vec<Ditip>, TipTable) {
    let tips: Vec<Ditip> = arrow_ditips(d)
        .into_iter()
        .map(|t| Ditip { id: t.id, direction: t.direction, rank: RankTag::ArrowOmega, family: false, members: t.members })
        .collect();
    (tips.clone(), TipTable::from_tips(tips))
}

/// `d` with ω-vertices built by partitioning its arrow ditips.
pub fn elevate_to_omega(d: &Digraph, spec: &PartitionSpec) -> Result<Digraph, OmegaError> {
    if spec.rank != RankTag::ArrowOmega {
        return Err(ElevateError::BadRank(spec.rank).into());
    }
    let (tips, table) = arrow_table(d);
    Ok(add_level(d, &tips, &table, spec)?)
}

/// A validated ω-diwalk: ω-vertices joined by endless arrow walks, with
/// one-ended arrow walks allowed at the ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaDiwalk {
    pub elements: Vec<Item>,
    pub termination: crate::walk::Termination,
}

enum OmegaEnd {
    Vertex(String),
    Tip(Id, Direction),
}

fn omega_step(d: &Digraph, id: &str) -> Option<(OmegaEnd, OmegaEnd)> {
    let (_, table) = arrow_table(d);
    let tip = |w: &ArrowWalk| {
        let t = table.resolve(&w.id)?;
        Some(OmegaEnd::Tip(t.id.clone(), t.direction))
    };
    if let Some(j) = d.arrow_joins.get(id) {
        let (i, o) = split_endless(d, j)?;
        return Some((tip(i)?, tip(o)?));
    }
    let w = d.arrow_walks.get(id)?;
    match w.kind {
        Direction::Out => Some((OmegaEnd::Vertex(w.term(0)), tip(w)?)),
        Direction::In => Some((tip(w)?, OmegaEnd::Vertex(w.term(0)))),
    }
}

fn omega_holds(d: &Digraph, v: &Item, end: &OmegaEnd) -> bool {
    match end {
        OmegaEnd::Vertex(name) => v.index.is_none() && v.id == *name,
        OmegaEnd::Tip(t, dir) => {
            let (_, table) = arrow_table(d);
            d.vertices.get(&v.id).filter(|x| x.rank == RankTag::Omega).is_some_and(|x| {
                x.members
                    .iter()
                    .any(|m| m.direction == *dir && table.resolve(&m.tip.id).is_some_and(|r| r.id == *t))
            })
        }
    }
}

pub fn validate_omega_diwalk(d: &Digraph, id: &str, elements: &[Item]) -> Result<OmegaDiwalk, WalkError> {
    if elements.is_empty() {
        return Err(WalkError::EmptyWalk { walk: id.into() });
    }
    if elements.len() % 2 == 0 {
        return Err(WalkError::DanglingTermination { walk: id.into() });
    }
    let is_vertex = |i: &Item| {
        d.vertices.contains_key(&i.id)
            || d.arrow_templates.values().any(|t| parse_instance(&i.id).is_some_and(|(p, _)| t.has_vertex(p)))
    };
    for (p, e) in elements.iter().enumerate() {
        let ok = if p % 2 == 0 { is_vertex(e) } else { omega_step(d, &e.id).is_some() };
        if !ok {
            if p % 2 == 0 || !(d.arrow_walks.contains_key(&e.id) || d.arrow_joins.contains_key(&e.id)) {
                return Err(WalkError::UnknownElement { walk: id.into(), element: e.to_string() });
            }
            return Err(WalkError::BadIncidence { walk: id.into(), step: e.to_string(), vertex: elements[p - 1].to_string() });
        }
    }
    for p in (1..elements.len()).step_by(2) {
        let (l, r) = omega_step(d, &elements[p].id).expect("checked");
        let (u, v) = (&elements[p - 1], &elements[p + 1]);
        if omega_holds(d, u, &l) && omega_holds(d, v, &r) {
            continue;
        }
        let step = elements[p].to_string();
        if omega_holds(d, u, &r) && omega_holds(d, v, &l) {
            return Err(WalkError::NonConformingDirection { walk: id.into(), step });
        }
        let vertex = if omega_holds(d, u, &l) { v.to_string() } else { u.to_string() };
        return Err(WalkError::BadIncidence { walk: id.into(), step, vertex });
    }
    Ok(OmegaDiwalk { elements: elements.to_vec(), termination: crate::walk::Termination::TwoEnded })
}

/// ω-vertices with an edge per extended endless arrow walk.
pub fn omega_incidence(d: &Digraph) -> IncidenceDigraph {
    let mut g = IncidenceDigraph { rank: Some(RankTag::Omega), ..IncidenceDigraph::default() };
    let omega: Vec<&Vertex> = d.vertices.values().filter(|v| v.rank == RankTag::Omega).collect();
    g.concrete = omega.iter().map(|v| v.id.clone()).collect();
    let (_, table) = arrow_table(d);
    let holder = |tip: &str, dir: Direction| {
        omega.iter().position(|v| {
            v.members.iter().any(|m| m.direction == dir && table.resolve(&m.tip.id).is_some_and(|t| t.id == tip))
        })
    };
    for j in d.arrow_joins.values().filter(|j| is_extended_join(d, j)) {
        let (Some(i), Some(o)) = (table.resolve(&j.inward), table.resolve(&j.outward)) else { continue };
        if let (Some(u), Some(v)) = (holder(&i.id, Direction::In), holder(&o.id, Direction::Out)) {
            g.edges.push((Point::Concrete(u), Point::Concrete(v)));
        }
    }
    g.edges.sort();
    g.edges.dedup();
    g
}

pub fn omega_components(d: &Digraph, kind: Kind, opts: &ComponentOptions) -> ComponentSet {
    components_of(&omega_incidence(d), kind, opts)
}

/// Violations in the arrow-rank data of `d`.
pub fn validate_arrow(d: &Digraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    for t in d.arrow_templates.values() {
        if let Err(e) = t.check(d, 3) {
            report.push(Violation::new(ViolationKind::InvalidTemplate, vec![t.id.clone()], e.to_string()));
        }
    }
    for w in d.arrow_walks.values() {
        if let Err(e) = validate_arrow_walk(d, w) {
            report.push(Violation::new(ViolationKind::InvalidWalk, vec![w.id.clone()], e.to_string()));
        }
    }
    for j in d.arrow_joins.values() {
        let r = match (d.arrow_walks.get(&j.inward), d.arrow_walks.get(&j.outward)) {
            (Some(i), Some(o)) => join_endless(&j.id, i, o).map(|_| ()),
            _ => Err(OmegaError::Unknown(j.id.clone())),
        };
        if let Err(e) = r {
            report.push(Violation::new(ViolationKind::InvalidWalk, vec![j.id.clone()], e.to_string()));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(name: &str, direction: Direction, terminal: Terminal, reach: &str) -> WalkPattern {
        WalkPattern { name: name.into(), direction, terminal, reach: reach.into(), tip_format: DEFAULT_TIP_FORMAT.into() }
    }

    fn star() -> Digraph {
        let mut d = Digraph::new("star", RankTag::ArrowOmega);
        d.vertices.insert("c".into(), Vertex { id: "c".into(), rank: RankTag::ZERO, members: vec![] });
        d.arrow_templates.insert(
            "spokes".into(),
            RankTemplate {
                id: "spokes".into(),
                vertices: vec!["y".into()],
                walks: vec![pattern("x", Direction::Out, Terminal::Fixed("c".into()), "y")],
            },
        );
        d
    }

    fn ladder() -> Digraph {
        let mut d = Digraph::new("climb", RankTag::ArrowOmega);
        d.arrow_templates.insert(
            "up".into(),
            RankTemplate {
                id: "up".into(),
                vertices: vec!["v".into(), "u".into()],
                walks: vec![
                    pattern("w", Direction::Out, Terminal::Pattern("v".into()), "v"),
                    pattern("z", Direction::In, Terminal::Pattern("u".into()), "u"),
                ],
            },
        );
        d
    }

    fn walk(id: &str, kind: Direction, base: i64, vertex: &str, step: &str) -> ArrowWalk {
        ArrowWalk {
            id: id.into(),
            template: "up".into(),
            kind,
            base,
            vertex: vertex.into(),
            step: step.into(),
            overrides: BTreeMap::new(),
        }
    }

    #[test]
    fn star_has_no_arrow_walks() {
        let d = star();
        d.arrow_templates["spokes"].check(&d, 4).unwrap();
        assert!(arrow_ditips(&d).is_empty());
        let mut bad = walk("s", Direction::Out, 0, "y", "x");
        bad.template = "spokes".into();
        assert!(validate_arrow_walk(&d, &bad).is_err());
    }

    #[test]
    fn tip_format_collision() {
        let mut d = star();
        d.arrow_templates.get_mut("spokes").unwrap().walks[0].tip_format = "t".into();
        let e = d.arrow_templates["spokes"].check(&d, 3).unwrap_err();
        assert!(matches!(e, OmegaError::TemplateInstantiationError { k: 1, .. }));
    }

    #[test]
    fn single_out_walk_one_tip() {
        let mut d = ladder();
        d.arrow_walks.insert("a".into(), walk("a", Direction::Out, 0, "v", "w"));
        let mut b = walk("b", Direction::Out, 0, "v", "w");
        b.overrides.insert(0, "v^0".into());
        d.arrow_walks.insert("b".into(), b);
        let tips = arrow_ditips(&d);
        assert_eq!(tips.len(), 1);
        assert_eq!(tips[0].members, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(d.arrow_walks["a"].unfold(2), vec!["v^0", "w^0", "v^1", "w^1", "v^2"]);
    }

    #[test]
    fn join_checks_base() {
        let d = ladder();
        let i = walk("i", Direction::In, 1, "u", "z");
        let o = walk("o", Direction::Out, 2, "v", "w");
        assert!(matches!(join_endless("j", &i, &o), Err(OmegaError::BaseMismatch(..))));
        assert!(validate_arrow_walk(&d, &i).is_ok());
        assert!(validate_arrow_walk(&d, &o).is_ok());
    }
}
