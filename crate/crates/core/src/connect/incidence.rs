use std::collections::{BTreeMap, HashMap};

use super::{ConnectError, IncidenceDigraph, LaneRule, Point};
use crate::model::{Digraph, Direction, Id, Index};
use crate::rank::RankTag;
use crate::walk::{Context, End, VKey};

#[derive(Default)]
struct Holders {
    fixed: BTreeMap<Option<i64>, Point>,
    /// Lane `l` with offset `e`: instance `c` is held by `l@(c - e)`.
    lanes: Vec<(usize, i64)>,
}

impl Holders {
    fn at(&self, c: Option<i64>) -> Option<Point> {
        if let Some(p) = self.fixed.get(&c) {
            return Some(*p);
        }
        let c = c?;
        self.lanes.iter().find(|(_, e)| c - e >= 0).map(|&(l, e)| Point::Lane(l, c - e))
    }
}

/// How one side of a family step lands, as a function of the copy index.
enum Side {
    Fixed(Option<Point>),
    Tip(Id, Direction),
}

struct Builder<'a> {
    g: IncidenceDigraph,
    concrete: HashMap<&'a str, usize>,
    lanes: HashMap<&'a str, usize>,
    holders: HashMap<(Direction, Id), Holders>,
}

impl<'a> Builder<'a> {
    fn point(&self, k: &VKey) -> Option<Point> {
        if k.copy.is_some() {
            return None;
        }
        match k.index {
            None => self.concrete.get(k.id.as_str()).map(|&i| Point::Concrete(i)),
            Some(n) => self.lanes.get(k.id.as_str()).map(|&l| Point::Lane(l, n)),
        }
    }

    fn holder(&self, tip: &str, direction: Direction, c: Option<i64>) -> Option<Point> {
        self.holders.get(&(direction, tip.to_string())).and_then(|h| h.at(c))
    }

    fn side(&self, end: &End) -> Side {
        match end {
            End::Vertex(k) => Side::Fixed(self.point(k)),
            End::Tip { tip, direction, .. } => Side::Tip(tip.clone(), *direction),
            End::Open => Side::Fixed(None),
        }
    }

    fn edge(&mut self, u: Option<Point>, v: Option<Point>) {
        if let (Some(u), Some(v)) = (u, v) {
            self.g.edges.push((u, v));
        }
    }

    /// A family step: instance `c` of `id` for every `c >= 0`.
    fn family(&mut self, id: &str, left: Side, right: Side) -> Result<(), ConnectError> {
        let eval = |b: &Self, s: &Side, c: i64| match s {
            Side::Fixed(p) => *p,
            Side::Tip(t, d) => b.holder(t, *d, Some(c)),
        };
        let tail = |b: &Self, s: &Side| -> (Option<(usize, i64)>, i64) {
            match s {
                Side::Fixed(_) => (None, 0),
                Side::Tip(t, d) => match b.holders.get(&(*d, t.clone())) {
                    Some(h) => {
                        let fixed = h.fixed.keys().flatten().max().map_or(0, |m| m + 1);
                        let lane = h.lanes.first().copied();
                        (lane, fixed.max(lane.map_or(0, |(_, e)| e + 1)))
                    }
                    None => (None, 0),
                },
            }
        };
        let (lt, lc) = tail(self, &left);
        let (rt, rc) = tail(self, &right);
        let bound = lc.max(rc).max(1);
        for c in 0..bound {
            let (u, v) = (eval(self, &left, c), eval(self, &right, c));
            self.edge(u, v);
        }
        match (lt, rt) {
            (Some((a, ea)), Some((b, eb))) => {
                let delta = ea - eb;
                if !(-1..=1).contains(&delta) {
                    return Err(ConnectError::OffsetOutOfRange(id.to_string()));
                }
                self.g.rules.push(LaneRule { from: a, to: b, delta, start: bound - ea });
            }
            (Some(_), None) if matches!(right, Side::Fixed(Some(_))) => {
                return Err(ConnectError::UnboundedFan(id.to_string()));
            }
            (None, Some(_)) if matches!(left, Side::Fixed(Some(_))) => {
                return Err(ConnectError::UnboundedFan(id.to_string()));
            }
            _ => {}
        }
        Ok(())
    }
}

/// The incidence digraph over vertices of rank at most `rank`.
///
/// Edges come from arcs, declared finite walks and declared presentations
/// of lower rank. Template nodes are not part of the vertex universe.
pub fn build_incidence(d: &Digraph, rank: RankTag) -> Result<IncidenceDigraph, ConnectError> {
    let Some(rho) = rank.finite().filter(|r| *r >= 0) else {
        return Err(ConnectError::UnsupportedRank(rank));
    };
    let within = |r: RankTag| r.finite().is_some_and(|r| r <= rho);
    let ctx = Context::new(d);
    let mut b = Builder {
        g: IncidenceDigraph { rank: Some(rank), ..IncidenceDigraph::default() },
        concrete: HashMap::new(),
        lanes: HashMap::new(),
        holders: HashMap::new(),
    };
    for v in d.vertices.values().filter(|v| within(v.rank)) {
        b.concrete.insert(&v.id, b.g.concrete.len());
        b.g.concrete.push(v.id.clone());
    }
    for f in d.families.values().filter(|f| within(f.rank)) {
        b.lanes.insert(&f.id, b.g.lanes.len());
        b.g.lanes.push(f.id.clone());
    }
    for v in d.vertices.values().filter(|v| within(v.rank)) {
        let p = Point::Concrete(b.concrete[v.id.as_str()]);
        for m in &v.members {
            let Some(t) = ctx.tips.resolve(&m.tip.id) else { continue };
            let h = b.holders.entry((m.direction, t.id.clone())).or_default();
            h.fixed.insert(m.tip.index.value(), p);
        }
    }
    for f in d.families.values().filter(|f| within(f.rank)) {
        let l = b.lanes[f.id.as_str()];
        for m in &f.members {
            let Some(t) = ctx.tips.resolve(&m.tip.id) else { continue };
            if let Index::Rel(e) = m.tip.index {
                b.holders.entry((m.direction, t.id.clone())).or_default().lanes.push((l, e));
            }
        }
    }
    for h in b.holders.values_mut() {
        h.lanes.sort_by_key(|&(l, e)| (e, l));
    }

    for a in d.arcs.values() {
        let u = b.concrete.get(a.tail.as_str()).map(|&i| Point::Concrete(i));
        let v = b.concrete.get(a.head.as_str()).map(|&i| Point::Concrete(i));
        b.edge(u, v);
    }
    for w in d.walks.values().filter(|w| w.rank.finite().is_some_and(|r| r < rho)) {
        let end = |i: Option<&crate::model::Item>| i.and_then(|i| ctx.vertex(i)).and_then(|(k, _)| b.point(&k));
        let (u, v) = (end(w.elements.first()), end(w.elements.last()));
        b.edge(u, v);
    }
    for p in d.presentations.values().filter(|p| p.rank.finite().is_some_and(|r| r < rho)) {
        if p.check_shape().is_err() {
            continue;
        }
        if ctx.is_family(p) {
            let (l, r) = ctx.step_ends(p, Some(0))?;
            let (l, r) = (b.side(&l), b.side(&r));
            b.family(&p.id, l, r)?;
        } else {
            let (l, r) = ctx.step_ends(p, None)?;
            let at = |e: &End| match e {
                End::Vertex(k) => b.point(k),
                End::Tip { tip, direction, instance } => b.holder(tip, *direction, *instance),
                End::Open => None,
            };
            let (u, v) = (at(&l), at(&r));
            b.edge(u, v);
        }
    }
    b.g.edges.sort();
    b.g.edges.dedup();
    b.g.rules.sort();
    b.g.rules.dedup();
    Ok(b.g)
}
