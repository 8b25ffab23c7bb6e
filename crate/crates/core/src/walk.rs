//! Diwalks and semiwalks of every finite rank.
//!
//! A walk alternates vertices and steps. A step of rank -1 is an arc; a step
//! of rank `γ >= 0` is a γ-walk, attached to its flanking vertices either at
//! a terminal vertex or, when it is infinite on that side, through the ditip
//! it traverses there. A vertex of rank `γ + 1` holding that ditip is where
//! the step is incident.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::model::{Digraph, Direction, Id, Index, Item, ValidationReport, Violation, ViolationKind};
use crate::present::{CellTemplate, Mode, PresentError, TipTable, WalkPresentation};
use crate::rank::RankTag;

const ARC_RANK: RankTag = RankTag::Finite(-1);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WalkError {
    #[error("walk `{walk}`: step `{step}` points the wrong way")]
    NonConformingDirection { walk: Id, step: String },
    #[error("walk `{walk}`: step `{step}` is not incident to `{vertex}`")]
    BadIncidence { walk: Id, step: String, vertex: String },
    #[error("walk `{walk}`: `{element}` exceeds the rank bound")]
    RankBoundViolated { walk: Id, element: String },
    #[error("walk `{walk}` ends on a step")]
    DanglingTermination { walk: Id },
    #[error("walk `{walk}` is empty")]
    EmptyWalk { walk: Id },
    #[error("walk `{walk}`: `{element}` is in a {found} position")]
    NotAlternating { walk: Id, element: String, found: &'static str },
    #[error("walk `{walk}`: unknown element `{element}`")]
    UnknownElement { walk: Id, element: String },
    #[error(transparent)]
    Present(#[from] PresentError),
}

impl WalkError {
    pub fn code(&self) -> &'static str {
        match self {
            WalkError::NonConformingDirection { .. } => "E_NON_CONFORMING_DIRECTION",
            WalkError::BadIncidence { .. } => "E_BAD_INCIDENCE",
            WalkError::RankBoundViolated { .. } => "E_RANK_BOUND",
            WalkError::DanglingTermination { .. } => "E_DANGLING_TERMINATION",
            WalkError::EmptyWalk { .. } => "E_EMPTY_WALK",
            WalkError::NotAlternating { .. } => "E_NOT_ALTERNATING",
            WalkError::UnknownElement { .. } => "E_UNKNOWN_ELEMENT",
            WalkError::Present(_) => "E_MALFORMED_PRESENTATION",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    TwoEnded,
    /// Terminates on the left only.
    OneEndedLeft,
    /// Terminates on the right only.
    OneEndedRight,
    Endless,
}

impl Termination {
    pub fn of_mode(mode: Mode) -> Termination {
        match mode {
            Mode::Finite => Termination::TwoEnded,
            Mode::Out => Termination::OneEndedLeft,
            Mode::In => Termination::OneEndedRight,
            Mode::Endless => Termination::Endless,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Incidence {
    Inward,
    Outward,
    /// The walk meets the vertex on both sides (e.g. a closed walk).
    Both,
    None,
}

/// A validated walk. Finite walks carry an explicit presentation of mode
/// `Finite`; infinite ones the presentation they were declared with.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diwalk {
    pub rank: RankTag,
    pub termination: Termination,
    pub presentation: WalkPresentation,
    /// Copy index when the presentation is a family.
    pub instance: Option<i64>,
}

pub type Semiwalk = Diwalk;

/// A vertex as walks see it: concrete (`index`, `copy` empty), a family
/// instance (`index`), or a template node in a cell (`index`) of a copy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VKey {
    pub id: Id,
    pub index: Option<i64>,
    pub copy: Option<i64>,
}

impl VKey {
    pub fn concrete(id: impl Into<Id>) -> VKey {
        VKey { id: id.into(), index: None, copy: None }
    }

    pub fn instance(id: impl Into<Id>, n: i64) -> VKey {
        VKey { id: id.into(), index: Some(n), copy: None }
    }
}

impl std::fmt::Display for VKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.copy, self.index) {
            (Some(c), Some(j)) => write!(f, "{}[{c}]@{j}", self.id),
            (None, Some(j)) => write!(f, "{}@{j}", self.id),
            _ => write!(f, "{}", self.id),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum End {
    Vertex(VKey),
    Tip { tip: Id, direction: Direction, instance: Option<i64> },
    /// Infinite on this side without a declared ditip.
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Elem {
    Vertex { key: VKey, rank: RankTag },
    Step { rank: RankTag, left: End, right: End },
}

#[derive(Clone, Copy)]
struct Scope<'a> {
    template: Option<&'a CellTemplate>,
    copy: Option<i64>,
}

const GLOBAL: Scope<'static> = Scope { template: None, copy: None };

/// Lookup state shared by walk validation: ditips and vertex contents.
pub struct Context<'d> {
    pub digraph: &'d Digraph,
    pub tips: TipTable,
}

impl<'d> Context<'d> {
    pub fn new(digraph: &'d Digraph) -> Context<'d> {
        Context { digraph, tips: TipTable::new(digraph) }
    }

    fn scope_of(&self, p: &WalkPresentation, instance: Option<i64>) -> Scope<'d> {
        let template = p.template.as_ref().and_then(|t| self.digraph.templates.get(t));
        let copy = template.filter(|t| t.copies).map(|_| instance.unwrap_or(0));
        Scope { template, copy }
    }

    pub fn is_family(&self, p: &WalkPresentation) -> bool {
        p.template.as_ref().and_then(|t| self.digraph.templates.get(t)).is_some_and(|t| t.copies)
    }

    /// Ditips (with instance) held by a vertex, split by direction.
    pub fn contents(&self, v: &VKey) -> BTreeSet<(Direction, Id, Option<i64>)> {
        let d = self.digraph;
        let members = match v.index {
            None => d.vertices.get(&v.id).map(|x| &x.members),
            Some(_) => d.families.get(&v.id).map(|x| &x.members),
        };
        let mut out = BTreeSet::new();
        for m in members.into_iter().flatten() {
            let Some(t) = self.tips.resolve(&m.tip.id) else { continue };
            let instance = match (m.tip.index, v.index) {
                (Index::Rel(e), Some(n)) => Some(n + e),
                (Index::At(n), _) => Some(n),
                _ => None,
            };
            out.insert((m.direction, t.id.clone(), instance));
        }
        out
    }

    fn classify(&self, walk: &str, item: &Item, scope: Scope<'_>) -> Result<Elem, WalkError> {
        let d = self.digraph;
        let unknown = || WalkError::UnknownElement { walk: walk.into(), element: item.to_string() };
        if let Some(t) = scope.template {
            let Index::At(j) = item.index else {
                if t.has_node(&item.id) || t.arc(&item.id).is_some() {
                    return Err(unknown());
                }
                return self.classify(walk, item, GLOBAL);
            };
            let node = |n: &str, j: i64| VKey { id: format!("{}.{n}", t.id), index: Some(j), copy: scope.copy };
            if t.has_node(&item.id) {
                return Ok(Elem::Vertex { key: node(&item.id, j), rank: RankTag::ZERO });
            }
            if let Some(((tn, tj), (hn, hj))) = t.arc_ends(&item.id, j) {
                return Ok(Elem::Step {
                    rank: ARC_RANK,
                    left: End::Vertex(node(tn, tj)),
                    right: End::Vertex(node(hn, hj)),
                });
            }
        }
        match item.index {
            Index::None => {
                if let Some(v) = d.vertices.get(&item.id) {
                    return Ok(Elem::Vertex { key: VKey::concrete(&v.id), rank: v.rank });
                }
                if let Some(a) = d.arcs.get(&item.id) {
                    return Ok(Elem::Step {
                        rank: ARC_RANK,
                        left: End::Vertex(VKey::concrete(&a.tail)),
                        right: End::Vertex(VKey::concrete(&a.head)),
                    });
                }
                if let Some(w) = d.walks.get(&item.id) {
                    let end = |i: Option<&Item>| -> Result<End, WalkError> {
                        match i.map(|i| self.classify(walk, i, GLOBAL)).transpose()? {
                            Some(Elem::Vertex { key, .. }) => Ok(End::Vertex(key)),
                            _ => Err(unknown()),
                        }
                    };
                    return Ok(Elem::Step {
                        rank: w.rank,
                        left: end(w.elements.first())?,
                        right: end(w.elements.last())?,
                    });
                }
                if let Some(p) = d.presentations.get(&item.id).filter(|p| !self.is_family(p)) {
                    return self.presentation_step(walk, p, None);
                }
                Err(unknown())
            }
            Index::At(n) => {
                if let Some(f) = d.families.get(&item.id) {
                    return Ok(Elem::Vertex { key: VKey::instance(&f.id, n), rank: f.rank });
                }
                if let Some(p) = d.presentations.get(&item.id).filter(|p| self.is_family(p)) {
                    return self.presentation_step(walk, p, Some(n));
                }
                Err(unknown())
            }
            Index::Rel(_) => Err(unknown()),
        }
    }

    fn presentation_step(&self, walk: &str, p: &WalkPresentation, instance: Option<i64>) -> Result<Elem, WalkError> {
        let scope = self.scope_of(p, instance);
        let end = |terminal: Option<Item>, direction: Direction| -> Result<End, WalkError> {
            if let Some(t) = terminal {
                return match self.classify(walk, &t, scope)? {
                    Elem::Vertex { key, .. } => Ok(End::Vertex(key)),
                    Elem::Step { .. } => Err(WalkError::DanglingTermination { walk: p.id.clone() }),
                };
            }
            Ok(match self.tips.side_tip(p, direction) {
                Some(t) => End::Tip { tip: t.id.clone(), direction, instance: t.family.then_some(instance.unwrap_or(0)) },
                None => End::Open,
            })
        };
        Ok(Elem::Step {
            rank: p.rank,
            left: end(p.left_terminal(), Direction::In)?,
            right: end(p.right_terminal(), Direction::Out)?,
        })
    }

    /// Left and right attachment of `p` used as a step (copy `instance`).
    pub fn step_ends(&self, p: &WalkPresentation, instance: Option<i64>) -> Result<(End, End), WalkError> {
        match self.presentation_step(&p.id, p, instance)? {
            Elem::Step { left, right, .. } => Ok((left, right)),
            Elem::Vertex { .. } => unreachable!(),
        }
    }

    /// The vertex an item names outside any template.
    pub fn vertex(&self, item: &Item) -> Option<(VKey, RankTag)> {
        match self.classify("", item, GLOBAL) {
            Ok(Elem::Vertex { key, rank }) => Some((key, rank)),
            _ => None,
        }
    }

    fn holds(&self, v: &VKey, vrank: RankTag, srank: RankTag, end: &End) -> Attach {
        match end {
            End::Vertex(k) => {
                if k == v {
                    Attach::Yes
                } else {
                    Attach::No
                }
            }
            End::Tip { tip, direction, instance } => {
                let above = srank.vertex_rank_above();
                if above.is_some_and(|a| vrank > a) {
                    return Attach::RankBound;
                }
                if above != Some(vrank) {
                    return Attach::No;
                }
                if self.contents(v).contains(&(*direction, tip.clone(), *instance)) {
                    Attach::Yes
                } else {
                    Attach::No
                }
            }
            End::Open => Attach::No,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Attach {
    Yes,
    No,
    RankBound,
}

fn check_sequence(
    ctx: &Context<'_>,
    walk: &str,
    elems: &[Elem],
    names: &[String],
    rank: RankTag,
    directed: bool,
) -> Result<(), WalkError> {
    for (i, e) in elems.iter().enumerate() {
        let bound_hit = match e {
            Elem::Vertex { rank: r, .. } => *r > rank,
            Elem::Step { rank: r, .. } => *r >= rank,
        };
        if bound_hit {
            return Err(WalkError::RankBoundViolated { walk: walk.into(), element: names[i].clone() });
        }
        let expect_vertex = i % 2 == 0;
        if expect_vertex != matches!(e, Elem::Vertex { .. }) {
            let found = if expect_vertex { "vertex" } else { "step" };
            return Err(WalkError::NotAlternating { walk: walk.into(), element: names[i].clone(), found });
        }
    }
    for i in (1..elems.len()).step_by(2) {
        let Elem::Step { rank: sr, left, right } = &elems[i] else { unreachable!() };
        let Elem::Vertex { key: u, rank: ur } = &elems[i - 1] else { unreachable!() };
        let next = elems.get(i + 1).map(|e| match e {
            Elem::Vertex { key, rank } => (key, *rank),
            Elem::Step { .. } => unreachable!(),
        });
        let l = ctx.holds(u, *ur, *sr, left);
        let r = next.map(|(w, wr)| ctx.holds(w, wr, *sr, right)).unwrap_or(Attach::Yes);
        if l == Attach::Yes && r == Attach::Yes {
            continue;
        }
        let rl = ctx.holds(u, *ur, *sr, right);
        let rr = next.map(|(w, wr)| ctx.holds(w, wr, *sr, left)).unwrap_or(Attach::Yes);
        let reversed = rl == Attach::Yes && rr == Attach::Yes;
        if reversed && !directed {
            continue;
        }
        if reversed {
            return Err(WalkError::NonConformingDirection { walk: walk.into(), step: names[i].clone() });
        }
        if [l, r, rl, rr].contains(&Attach::RankBound) {
            return Err(WalkError::RankBoundViolated { walk: walk.into(), element: names[i].clone() });
        }
        let vertex = if l != Attach::Yes { names[i - 1].clone() } else { names[i + 1].clone() };
        return Err(WalkError::BadIncidence { walk: walk.into(), step: names[i].clone(), vertex });
    }
    Ok(())
}

fn explicit(ctx: &Context<'_>, walk: &str, elements: &[Item], rank: RankTag, directed: bool) -> Result<Diwalk, WalkError> {
    if elements.is_empty() {
        return Err(WalkError::EmptyWalk { walk: walk.into() });
    }
    let elems = elements.iter().map(|i| ctx.classify(walk, i, GLOBAL)).collect::<Result<Vec<_>, _>>()?;
    let names: Vec<String> = elements.iter().map(|i| i.to_string()).collect();
    if elements.len() % 2 == 0 && matches!(elems.last(), Some(Elem::Step { .. })) && elems.iter().step_by(2).all(|e| matches!(e, Elem::Vertex { .. })) {
        return Err(WalkError::DanglingTermination { walk: walk.into() });
    }
    check_sequence(ctx, walk, &elems, &names, rank, directed)?;
    Ok(Diwalk {
        rank,
        termination: Termination::TwoEnded,
        presentation: WalkPresentation::finite(walk, rank, elements.to_vec()),
        instance: None,
    })
}

/// Validate an explicit finite sequence as a ρ-diwalk.
pub fn validate_diwalk(ctx: &Context<'_>, id: &str, elements: &[Item], rank: RankTag) -> Result<Diwalk, WalkError> {
    explicit(ctx, id, elements, rank, true)
}

/// As [`validate_diwalk`] but steps may be traversed against their direction.
pub fn validate_semiwalk(ctx: &Context<'_>, id: &str, elements: &[Item], rank: RankTag) -> Result<Semiwalk, WalkError> {
    explicit(ctx, id, elements, rank, false)
}

/// Periods unfolded per side when checking a presentation; enough to pass
/// every absolute index and then see the pattern repeat.
pub fn check_depth(p: &WalkPresentation) -> usize {
    let fixed = p.prefix.iter().filter_map(|i| i.index.value()).max().unwrap_or(0);
    (fixed.max(p.anchor).max(p.left_anchor) + 3).max(3) as usize
}

fn presented(ctx: &Context<'_>, p: &WalkPresentation, instance: Option<i64>, directed: bool) -> Result<Diwalk, WalkError> {
    p.check_shape()?;
    let scope = ctx.scope_of(p, instance);
    let items = p.unfold(check_depth(p));
    let elems = items.iter().map(|i| ctx.classify(&p.id, i, scope)).collect::<Result<Vec<_>, _>>()?;
    let names: Vec<String> = items.iter().map(|i| i.to_string()).collect();
    check_sequence(ctx, &p.id, &elems, &names, p.rank, directed)?;
    Ok(Diwalk { rank: p.rank, termination: Termination::of_mode(p.mode), presentation: p.clone(), instance })
}

/// Validate a presentation (family presentations at copy `instance`).
pub fn validate_presentation(ctx: &Context<'_>, p: &WalkPresentation, instance: Option<i64>) -> Result<Diwalk, WalkError> {
    presented(ctx, p, instance, true)
}

pub fn validate_semiwalk_presentation(ctx: &Context<'_>, p: &WalkPresentation, instance: Option<i64>) -> Result<Semiwalk, WalkError> {
    presented(ctx, p, instance, false)
}

pub fn classify_termination(w: &Diwalk) -> Termination {
    Termination::of_mode(w.presentation.mode)
}

fn side_tips(ctx: &Context<'_>, w: &Diwalk) -> Vec<(Direction, Id, Option<i64>)> {
    let family = ctx.is_family(&w.presentation);
    [Direction::In, Direction::Out]
        .into_iter()
        .filter_map(|dir| {
            ctx.tips
                .side_tip(&w.presentation, dir)
                .map(|t| (dir, t.id.clone(), family.then_some(w.instance.unwrap_or(0))))
        })
        .collect()
}

/// How `w` meets `v`: inward where `w` leaves `v` (a step follows `v`, or
/// `w` traverses an intip of `v`), outward where it arrives.
pub fn incidence(ctx: &Context<'_>, w: &Diwalk, v: &VKey) -> Incidence {
    let p = &w.presentation;
    let scope = ctx.scope_of(p, w.instance);
    let depth = check_depth(p) + v.index.unwrap_or(0).max(0) as usize;
    let items = p.unfold(depth);
    let (mut inward, mut outward) = (false, false);
    for (i, item) in items.iter().enumerate().step_by(2) {
        if let Ok(Elem::Vertex { key, .. }) = ctx.classify(&p.id, item, scope) {
            if key == *v {
                inward |= i + 1 < items.len();
                outward |= i > 0;
            }
        }
    }
    let held = ctx.contents(v);
    for (dir, tip, inst) in side_tips(ctx, w) {
        if held.contains(&(dir, tip, inst)) {
            match dir {
                Direction::In => inward = true,
                Direction::Out => outward = true,
            }
        }
    }
    match (inward, outward) {
        (true, true) => Incidence::Both,
        (true, false) => Incidence::Inward,
        (false, true) => Incidence::Outward,
        (false, false) => Incidence::None,
    }
}

/// Whether `w` is eventually identical on some side to a representative of
/// the ditip `tip` (instance `tip@n` for ditip families).
pub fn traverses(ctx: &Context<'_>, w: &Diwalk, tip: &Item) -> bool {
    let Some(t) = ctx.tips.resolve(&tip.id) else { return false };
    side_tips(ctx, w)
        .into_iter()
        .any(|(dir, id, inst)| dir == t.direction && id == t.id && (inst.is_none() || inst == tip.index.value()))
}

/// Every template, presentation and explicit walk of `d`, as violations.
pub fn validate_declared(d: &Digraph) -> ValidationReport {
    let ctx = Context::new(d);
    let mut report = ValidationReport::default();
    for t in d.templates.values() {
        if let Err(e) = t.validate() {
            report.push(Violation::new(ViolationKind::InvalidTemplate, vec![t.id.clone()], e.to_string()));
        }
    }
    let mut results: BTreeMap<&Id, Result<(), WalkError>> = BTreeMap::new();
    for p in d.presentations.values() {
        if let Some(t) = &p.template {
            if !d.templates.contains_key(t) {
                report.push(Violation::new(ViolationKind::InvalidWalk, vec![p.id.clone()], format!("unknown template `{t}`")));
                continue;
            }
        }
        results.insert(&p.id, validate_presentation(&ctx, p, None).map(|_| ()));
    }
    for w in d.walks.values() {
        results.insert(&w.id, validate_diwalk(&ctx, &w.id, &w.elements, w.rank).map(|_| ()));
    }
    for (id, r) in results {
        if let Err(e) = r {
            report.push(Violation::new(ViolationKind::InvalidWalk, vec![id.clone()], e.to_string()));
        }
    }
    report
}
