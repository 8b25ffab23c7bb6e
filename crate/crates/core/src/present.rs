//! Finite presentations of infinite structure.
//!
//! A [`CellTemplate`] is a periodic 0-digraph: its nodes and arcs repeat in
//! every cell `j = 0, 1, ...`, with arcs allowed to reach one cell forward or
//! back. A `copies` template is additionally instantiated once per family
//! index, giving infinitely many disjoint copies.
//!
//! A [`WalkPresentation`] is a finite prefix plus a repetend whose index
//! advances by one per period. Two one-ended presentations denote
//! eventually identical walks exactly when their repetends agree after
//! rotation and index normalization, which is what [`Ray::canonical`]
//! computes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::model::{Digraph, Direction, Id, Index, Item};
use crate::par::{self, Exec};
use crate::rank::RankTag;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TemplateArc {
    pub id: Id,
    pub tail: (Id, i64),
    pub head: (Id, i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellTemplate {
    pub id: Id,
    pub copies: bool,
    pub nodes: Vec<Id>,
    pub arcs: Vec<TemplateArc>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresentError {
    #[error("malformed presentation `{0}`: {1}")]
    MalformedPresentation(Id, String),
    #[error("presentations `{0}` and `{1}` differ in rank or mode")]
    ModeMismatch(Id, Id),
    #[error("invalid template `{0}`: {1}")]
    InvalidTemplate(Id, String),
}

impl CellTemplate {
    pub fn validate(&self) -> Result<(), PresentError> {
        let err = |m: String| Err(PresentError::InvalidTemplate(self.id.clone(), m));
        let mut ids = BTreeSet::new();
        for id in self.nodes.iter().chain(self.arcs.iter().map(|a| &a.id)) {
            if !ids.insert(id) {
                return err(format!("duplicate id `{id}`"));
            }
        }
        for a in &self.arcs {
            for (node, delta) in [&a.tail, &a.head] {
                if !self.nodes.contains(node) {
                    return err(format!("arc `{}` uses unknown node `{node}`", a.id));
                }
                if !(-1..=1).contains(delta) {
                    return err(format!("arc `{}` has cell offset {delta} outside -1..=1", a.id));
                }
            }
        }
        Ok(())
    }

    pub fn has_node(&self, id: &str) -> bool {
        self.nodes.iter().any(|n| n == id)
    }

    pub fn arc(&self, id: &str) -> Option<&TemplateArc> {
        self.arcs.iter().find(|a| a.id == id)
    }

    /// Concrete endpoints of the arc instance in cell `j`.
    pub fn arc_ends(&self, id: &str, j: i64) -> Option<((&str, i64), (&str, i64))> {
        self.arc(id).map(|a| ((a.tail.0.as_str(), j + a.tail.1), (a.head.0.as_str(), j + a.head.1)))
    }

    /// Cells `0..depth` (and copies `0..depth` for a family template).
    pub fn unfold(&self, depth: usize) -> UnfoldedTemplate {
        let depth = depth as i64;
        let copies: Vec<Option<i64>> = if self.copies { (0..depth).map(Some).collect() } else { vec![None] };
        let name = |c: Option<i64>, node: &str, j: i64| match c {
            Some(c) => format!("{}[{c}].{node}@{j}", self.id),
            None => format!("{}.{node}@{j}", self.id),
        };
        let mut out = UnfoldedTemplate::default();
        if depth == 0 {
            return out;
        }
        for &c in &copies {
            for j in 0..depth {
                for n in &self.nodes {
                    out.vertices.push(name(c, n, j));
                }
            }
            for j in 0..depth {
                for a in &self.arcs {
                    let (t, h) = (j + a.tail.1, j + a.head.1);
                    if (0..depth).contains(&t) && (0..depth).contains(&h) {
                        let id = match c {
                            Some(c) => format!("{}[{c}].{}@{j}", self.id, a.id),
                            None => format!("{}.{}@{j}", self.id, a.id),
                        };
                        out.arcs.push((id, name(c, &a.tail.0, t), name(c, &a.head.0, h)));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct UnfoldedTemplate {
    pub vertices: Vec<String>,
    /// (arc, tail, head)
    pub arcs: Vec<(String, String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    In,
    Out,
    Endless,
    Finite,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::In => "in",
            Mode::Out => "out",
            Mode::Endless => "endless",
            Mode::Finite => "finite",
        }
    }

    pub fn has_left_ray(self) -> bool {
        matches!(self, Mode::In | Mode::Endless)
    }

    pub fn has_right_ray(self) -> bool {
        matches!(self, Mode::Out | Mode::Endless)
    }
}

/// A walk given by finite data.
///
/// In walk order the denoted sequence is
/// - `Out`: `prefix, R@a, R@a+1, ...` (terminates on the left)
/// - `In`: `..., R@a+1, R@a, prefix` (terminates on the right)
/// - `Endless`: `..., L@b+1, L@b, prefix, R@a, R@a+1, ...`
/// - `Finite`: `prefix`
///
/// where `R@a` instantiates the repetend with `k = a`. Prefix items carry
/// absolute indices, repetend items indices relative to `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkPresentation {
    pub id: Id,
    pub rank: RankTag,
    /// Cell template the items live in (rank-0 presentations only).
    pub template: Option<Id>,
    pub mode: Mode,
    pub left: Vec<Item>,
    pub left_anchor: i64,
    pub prefix: Vec<Item>,
    pub repetend: Vec<Item>,
    pub anchor: i64,
}

impl WalkPresentation {
    pub fn finite(id: impl Into<Id>, rank: RankTag, elements: Vec<Item>) -> WalkPresentation {
        WalkPresentation {
            id: id.into(),
            rank,
            template: None,
            mode: Mode::Finite,
            left: vec![],
            left_anchor: 0,
            prefix: elements,
            repetend: vec![],
            anchor: 0,
        }
    }

    /// Structural checks that need no knowledge of the surrounding digraph.
    pub fn check_shape(&self) -> Result<(), PresentError> {
        let err = |m: &str| Err(PresentError::MalformedPresentation(self.id.clone(), m.to_string()));
        let prefix_len_ok = match self.mode {
            Mode::Out | Mode::Endless => self.prefix.len() % 2 == 0,
            Mode::In | Mode::Finite => self.prefix.len() % 2 == 1,
        };
        if !prefix_len_ok {
            return err("prefix does not alternate vertices and steps correctly for its mode");
        }
        if self.mode.has_right_ray() && self.repetend.is_empty() {
            return err("empty repetend");
        }
        if self.mode == Mode::In && self.repetend.is_empty() {
            return err("empty repetend");
        }
        if self.mode == Mode::Endless && self.left.is_empty() {
            return err("empty left repetend");
        }
        let periods = [&self.repetend, &self.left];
        if periods.iter().any(|p| p.len() % 2 == 1) {
            return err("repetend must alternate vertex, step (even length)");
        }
        if self.mode == Mode::Finite && !(self.repetend.is_empty() && self.left.is_empty()) {
            return err("finite presentation with a repetend");
        }
        if self.prefix.iter().any(|i| matches!(i.index, Index::Rel(_))) {
            return err("prefix items need absolute indices");
        }
        if periods.iter().any(|p| p.iter().any(|i| matches!(i.index, Index::At(_)))) {
            return err("repetend items need indices relative to k");
        }
        let neg_prefix = self.prefix.iter().any(|i| i.index.value().is_some_and(|n| n < 0));
        let neg_right = self.repetend.iter().any(|i| i.index.value().is_some_and(|c| self.anchor + c < 0));
        let neg_left = self.left.iter().any(|i| i.index.value().is_some_and(|c| self.left_anchor + c < 0));
        if neg_prefix || neg_right || neg_left {
            return err("negative index");
        }
        Ok(())
    }

    /// The right-growing tail (`Out`, `Endless`).
    pub fn right_ray(&self) -> Option<Ray> {
        self.mode.has_right_ray().then(|| Ray {
            finite: self.prefix.clone(),
            period: self.repetend.clone(),
            anchor: self.anchor,
        })
    }

    /// The left-growing tail (`In`, `Endless`), listed in growth order,
    /// i.e. reversed with respect to the walk direction.
    pub fn left_ray(&self) -> Option<Ray> {
        let (period, anchor) = match self.mode {
            Mode::In => (&self.repetend, self.anchor),
            Mode::Endless => (&self.left, self.left_anchor),
            _ => return None,
        };
        Some(Ray {
            finite: self.prefix.iter().rev().cloned().collect(),
            period: period.iter().rev().cloned().collect(),
            anchor,
        })
    }

    pub fn ray(&self, direction: Direction) -> Option<Ray> {
        match direction {
            Direction::In => self.left_ray(),
            Direction::Out => self.right_ray(),
        }
    }

    /// Structural extendedness: beyond some point no element repeats.
    pub fn is_extended(&self) -> bool {
        let side_ok = |r: Option<Ray>| r.is_none_or(|r| r.is_extended());
        let sides = side_ok(self.left_ray()) && side_ok(self.right_ray());
        if self.mode == Mode::Endless {
            let l: BTreeSet<&Id> = self.left.iter().map(|i| &i.id).collect();
            sides && self.repetend.iter().all(|i| !l.contains(&i.id))
        } else {
            sides && self.mode != Mode::Finite
        }
    }

    /// Walk-order elements with `depth` periods on each infinite side.
    pub fn unfold(&self, depth: usize) -> Vec<Item> {
        let mut out = Vec::new();
        let period = |items: &[Item], k: i64| items.iter().map(|i| i.resolve(k)).collect::<Vec<_>>();
        match self.mode {
            Mode::In => {
                for p in (0..depth as i64).rev() {
                    out.extend(period(&self.repetend, self.anchor + p));
                }
                out.extend(self.prefix.iter().cloned());
            }
            Mode::Endless => {
                for p in (0..depth as i64).rev() {
                    out.extend(period(&self.left, self.left_anchor + p));
                }
                out.extend(self.prefix.iter().cloned());
                for p in 0..depth as i64 {
                    out.extend(period(&self.repetend, self.anchor + p));
                }
            }
            Mode::Out => {
                out.extend(self.prefix.iter().cloned());
                for p in 0..depth as i64 {
                    out.extend(period(&self.repetend, self.anchor + p));
                }
            }
            Mode::Finite => out.extend(self.prefix.iter().cloned()),
        }
        out
    }

    /// The first element in walk order, when the walk terminates on the left.
    pub fn left_terminal(&self) -> Option<Item> {
        match self.mode {
            Mode::Out | Mode::Finite => self.prefix.first().or(self.repetend.first()).map(|i| i.resolve(self.anchor)),
            _ => None,
        }
    }

    pub fn right_terminal(&self) -> Option<Item> {
        match self.mode {
            Mode::In | Mode::Finite => self.prefix.last().cloned(),
            _ => None,
        }
    }
}

/// A one-way infinite sequence in growth order: `finite` followed by
/// `period` instantiated at `anchor`, `anchor + 1`, ...
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Ray {
    pub finite: Vec<Item>,
    pub period: Vec<Item>,
    pub anchor: i64,
}

impl Ray {
    pub fn element(&self, n: usize) -> Item {
        if n < self.finite.len() {
            return self.finite[n].clone();
        }
        let m = n - self.finite.len();
        let l = self.period.len();
        self.period[m % l].resolve(self.anchor + (m / l) as i64)
    }

    pub fn prefix_of(&self, n: usize) -> Vec<Item> {
        (0..n).map(|i| self.element(i)).collect()
    }

    fn indexed(&self) -> bool {
        self.period.iter().any(|i| !i.index.is_none())
    }

    pub fn is_extended(&self) -> bool {
        let mut ids = BTreeSet::new();
        self.period.iter().all(|i| !i.index.is_none() && ids.insert(&i.id))
    }

    /// Canonical form: minimal rotation of the period (by whole
    /// vertex/step pairs), offsets shifted to start at zero, and the finite
    /// part trimmed of every whole period it repeats.
    pub fn canonical(&self) -> Ray {
        let l = self.period.len();
        if l == 0 {
            return self.clone();
        }
        let stride = if l % 2 == 0 { 2 } else { 1 };
        let mut period = self.period.clone();
        let mut anchor = self.anchor;
        if !self.indexed() {
            let root = (1..=l)
                .filter(|q| q % stride == 0 && l % q == 0)
                .find(|&q| (0..l).all(|i| period[i] == period[i % q]))
                .unwrap_or(l);
            period.truncate(root);
            anchor = 0;
        }
        let l = period.len();

        let mut best: Option<(Vec<Item>, i64, usize)> = None;
        for r in (0..l).step_by(stride) {
            let mut rotated: Vec<Item> = period[r..].to_vec();
            rotated.extend(period[..r].iter().map(|i| match i.index {
                Index::Rel(c) => Item::rel(i.id.clone(), c + 1),
                _ => i.clone(),
            }));
            let min = rotated.iter().filter_map(|i| i.index.value()).min().unwrap_or(0);
            for i in rotated.iter_mut() {
                if let Index::Rel(c) = i.index {
                    i.index = Index::Rel(c - min);
                }
            }
            if best.as_ref().is_none_or(|(b, _, _)| rotated < *b) {
                best = Some((rotated, min, r));
            }
        }
        let (period_c, shift, r) = best.expect("nonempty period");
        let mut finite = self.finite.clone();
        finite.extend(period[..r].iter().map(|i| i.resolve(anchor)));
        let mut anchor_c = if self.indexed() { anchor + shift } else { 0 };

        loop {
            if finite.len() < l {
                break;
            }
            let prev = anchor_c - 1;
            let tail = &finite[finite.len() - l..];
            if tail.iter().zip(&period_c).all(|(f, p)| *f == p.resolve(prev)) {
                finite.truncate(finite.len() - l);
                if self.indexed() {
                    anchor_c = prev;
                }
            } else {
                break;
            }
        }
        Ray { finite, period: period_c, anchor: anchor_c }
    }

    /// Identity of the tail: two rays are eventually identical exactly when
    /// their canonical periods coincide.
    pub fn tail_key(&self) -> Vec<Item> {
        self.canonical().period
    }
}

/// Canonical form of a presentation; equal denoted walks give equal forms.
pub fn normalize(p: &WalkPresentation) -> Result<WalkPresentation, PresentError> {
    p.check_shape()?;
    let mut q = p.clone();
    for _ in 0..4 {
        let before = q.clone();
        if let Some(r) = q.right_ray() {
            let c = r.canonical();
            q.prefix = c.finite;
            q.repetend = c.period;
            q.anchor = c.anchor;
        }
        if let Some(l) = q.left_ray() {
            let c = l.canonical();
            q.prefix = c.finite.into_iter().rev().collect();
            let period: Vec<Item> = c.period.into_iter().rev().collect();
            if q.mode == Mode::In {
                q.repetend = period;
                q.anchor = c.anchor;
            } else {
                q.left = period;
                q.left_anchor = c.anchor;
            }
        }
        if q == before {
            break;
        }
    }
    Ok(q)
}

/// Whether `p` and `q` agree beyond some point on every infinite side.
pub fn eventually_identical(p: &WalkPresentation, q: &WalkPresentation) -> Result<bool, PresentError> {
    if p.rank != q.rank || p.mode != q.mode || p.mode == Mode::Finite {
        return Err(PresentError::ModeMismatch(p.id.clone(), q.id.clone()));
    }
    p.check_shape()?;
    q.check_shape()?;
    if p.template != q.template {
        return Ok(false);
    }
    let side = |a: Option<Ray>, b: Option<Ray>| match (a, b) {
        (Some(a), Some(b)) => a.tail_key() == b.tail_key(),
        _ => true,
    };
    Ok(side(p.left_ray(), q.left_ray()) && side(p.right_ray(), q.right_ray()))
}

/// An eventual-identity class of declared extended presentations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ditip {
    /// Smallest member id.
    pub id: Id,
    pub direction: Direction,
    pub rank: RankTag,
    pub family: bool,
    pub members: Vec<Id>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TipKey {
    pub direction: Direction,
    pub rank: RankTag,
    pub template: Option<Id>,
    pub period: Vec<Item>,
}

fn is_family(d: &Digraph, p: &WalkPresentation) -> bool {
    p.template.as_ref().and_then(|t| d.templates.get(t)).is_some_and(|t| t.copies)
}

/// Key of the tail of `p` on the side given by `direction`, if it has one.
pub fn side_key(p: &WalkPresentation, direction: Direction) -> Option<TipKey> {
    let ray = p.ray(direction)?;
    if ray.period.is_empty() {
        return None;
    }
    Some(TipKey { direction, rank: p.rank, template: p.template.clone(), period: ray.tail_key() })
}

pub fn compute_ditips(d: &Digraph, rank: RankTag) -> Vec<Ditip> {
    compute_ditips_with(d, rank, Exec::default())
}

pub fn compute_ditips_with(d: &Digraph, rank: RankTag, exec: Exec) -> Vec<Ditip> {
    let candidates: Vec<&WalkPresentation> = d
        .presentations
        .values()
        .filter(|p| p.rank == rank && matches!(p.mode, Mode::In | Mode::Out))
        .filter(|p| p.check_shape().is_ok() && p.is_extended())
        .collect();
    let keys = par::map(exec, &candidates, |p| {
        let dir = if p.mode == Mode::In { Direction::In } else { Direction::Out };
        side_key(p, dir)
    });
    let mut classes: BTreeMap<TipKey, Vec<Id>> = BTreeMap::new();
    for (p, key) in candidates.iter().zip(keys) {
        if let Some(key) = key {
            classes.entry(key).or_default().push(p.id.clone());
        }
    }
    let mut tips: Vec<Ditip> = classes
        .into_iter()
        .map(|(key, mut members)| {
            members.sort();
            let family = is_family(d, &d.presentations[&members[0]]);
            Ditip { id: members[0].clone(), direction: key.direction, rank: key.rank, family, members }
        })
        .collect();
    tips.sort_by(|a, b| a.id.cmp(&b.id));
    tips
}

/// Ditips of every finite rank carrying declared presentations.
pub fn all_ditips(d: &Digraph) -> Vec<Ditip> {
    let ranks: BTreeSet<RankTag> = d.presentations.values().map(|p| p.rank).collect();
    let mut out: Vec<Ditip> = ranks.into_iter().flat_map(|r| compute_ditips(d, r)).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Lookup from tail keys and representative ids to ditips.
#[derive(Clone, Debug, Default)]
pub struct TipTable {
    pub tips: Vec<Ditip>,
    by_key: HashMap<TipKey, usize>,
    by_member: HashMap<Id, usize>,
}

impl TipTable {
    pub fn new(d: &Digraph) -> TipTable {
        let tips = all_ditips(d);
        let mut by_key = HashMap::new();
        let mut by_member = HashMap::new();
        for (i, t) in tips.iter().enumerate() {
            for m in &t.members {
                by_member.insert(m.clone(), i);
                if let Some(k) = side_key(&d.presentations[m], t.direction) {
                    by_key.insert(k, i);
                }
            }
        }
        TipTable { tips, by_key, by_member }
    }

    /// A table over the given ditips, looked up by member only.
    pub fn from_tips(tips: Vec<Ditip>) -> TipTable {
        let mut by_member = HashMap::new();
        for (i, t) in tips.iter().enumerate() {
            for m in &t.members {
                by_member.insert(m.clone(), i);
            }
            by_member.insert(t.id.clone(), i);
        }
        TipTable { tips, by_key: HashMap::new(), by_member }
    }

    /// The ditip a representative (or the ditip id itself) belongs to.
    pub fn resolve(&self, id: &str) -> Option<&Ditip> {
        self.by_member.get(id).map(|&i| &self.tips[i])
    }

    /// The ditip traversed by `p` on the side given by `direction`.
    pub fn side_tip(&self, p: &WalkPresentation, direction: Direction) -> Option<&Ditip> {
        side_key(p, direction).and_then(|k| self.by_key.get(&k)).map(|&i| &self.tips[i])
    }
}
