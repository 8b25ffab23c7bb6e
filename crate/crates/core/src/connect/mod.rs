//! Walk connectivity: reachability over incidence digraphs that mix finitely
//! many concrete vertices with periodic vertex families, and the strong,
//! unilateral and weak components built on it.

pub mod bitmatrix;
mod components;
mod incidence;
pub mod periodic;

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::par::{self, Exec};
use crate::rank::RankTag;
use crate::walk::WalkError;
use bitmatrix::BitMatrix;
use periodic::PeriodicSolver;

pub use components::{
    components, components_of, components_with, connected, membership_counts, ComponentOptions, ComponentSet, Kind,
};
pub use incidence::build_incidence;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConnectError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("enumeration stopped at {0} components")]
    TruncatedEnumeration(usize),
    #[error("connectivity is not available at rank {0}")]
    UnsupportedRank(RankTag),
    #[error("step `{0}` joins instances more than one index apart")]
    OffsetOutOfRange(String),
    #[error("step `{0}` joins one vertex to infinitely many")]
    UnboundedFan(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

impl ConnectError {
    pub fn code(&self) -> &'static str {
        match self {
            ConnectError::UnknownVertex(_) => "E_UNKNOWN_VERTEX",
            ConnectError::TruncatedEnumeration(_) => "E_TRUNCATED",
            ConnectError::UnsupportedRank(_) => "E_UNSUPPORTED_RANK",
            ConnectError::OffsetOutOfRange(_) => "E_OFFSET_OUT_OF_RANGE",
            ConnectError::UnboundedFan(_) => "E_UNBOUNDED_FAN",
            ConnectError::Walk(e) => e.code(),
        }
    }
}

/// A node of an incidence digraph: a concrete vertex or instance `n` of a
/// vertex family (lane).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Point {
    Concrete(usize),
    Lane(usize, i64),
}

/// `(from, x) -> (to, x + delta)` for every `x >= start` with `x + delta >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LaneRule {
    pub from: usize,
    pub to: usize,
    pub delta: i64,
    pub start: i64,
}

/// Vertices of rank at most ρ and the reach steps between them: an edge
/// `u -> v` records a lower-rank diwalk incident inward at `u` and outward
/// at `v` (or an arc from `u` to `v`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IncidenceDigraph {
    pub rank: Option<RankTag>,
    pub concrete: Vec<String>,
    pub lanes: Vec<String>,
    pub edges: Vec<(Point, Point)>,
    pub rules: Vec<LaneRule>,
}

impl IncidenceDigraph {
    pub fn label(&self, p: Point) -> String {
        match p {
            Point::Concrete(i) => self.concrete[i].clone(),
            Point::Lane(l, n) => format!("{}@{n}", self.lanes[l]),
        }
    }

    pub fn point(&self, label: &str) -> Option<Point> {
        if let Some(i) = self.concrete.iter().position(|c| c == label) {
            return Some(Point::Concrete(i));
        }
        let (lane, n) = label.rsplit_once('@')?;
        let n: i64 = n.parse().ok().filter(|n| *n >= 0)?;
        self.lanes.iter().position(|l| l == lane).map(|l| Point::Lane(l, n))
    }

    /// Every edge and rule reversed alongside the original.
    pub fn symmetrized(&self) -> IncidenceDigraph {
        let mut g = self.clone();
        g.edges.extend(self.edges.iter().map(|&(u, v)| (v, u)));
        g.rules.extend(self.rules.iter().map(|r| LaneRule {
            from: r.to,
            to: r.from,
            delta: -r.delta,
            start: (r.start + r.delta).max(0),
        }));
        g.edges.sort();
        g.edges.dedup();
        g.rules.sort();
        g.rules.dedup();
        g
    }

    /// Smallest instance from which every lane behaves identically.
    pub fn threshold(&self) -> i64 {
        let explicit = self
            .edges
            .iter()
            .flat_map(|(u, v)| [*u, *v])
            .filter_map(|p| match p {
                Point::Lane(_, n) => Some(n + 1),
                Point::Concrete(_) => None,
            });
        let starts = self.rules.iter().map(|r| r.start.max(-r.delta));
        explicit.chain(starts).max().unwrap_or(0).max(1)
    }

    fn rule_applies(r: &LaneRule, x: i64) -> bool {
        x >= r.start && x + r.delta >= 0
    }

    /// Out-neighbours of `p` in the infinite instantiation.
    pub fn successors(&self, p: Point) -> Vec<Point> {
        let mut out: Vec<Point> = self.edges.iter().filter(|(u, _)| *u == p).map(|(_, v)| *v).collect();
        if let Point::Lane(l, x) = p {
            for r in self.rules.iter().filter(|r| r.from == l && Self::rule_applies(r, x)) {
                out.push(Point::Lane(r.to, x + r.delta));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Whether any edge or rule instance touches `p`.
    pub fn touches(&self, p: Point) -> bool {
        if self.edges.iter().any(|(u, v)| *u == p || *v == p) {
            return true;
        }
        let Point::Lane(l, x) = p else { return false };
        self.rules.iter().any(|r| {
            (r.from == l && Self::rule_applies(r, x)) || (r.to == l && Self::rule_applies(r, x - r.delta))
        })
    }

    /// Breadth-first reach in the instantiation cut off above instance
    /// `depth`. Exact for walks that stay within the cut.
    pub fn bounded_reach(&self, from: Point, to: Point, depth: i64) -> bool {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(p) = queue.pop_front() {
            if p == to {
                return true;
            }
            for q in self.successors(p) {
                if matches!(q, Point::Lane(_, n) if n > depth) {
                    continue;
                }
                if seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        false
    }
}

/// Exact reachability over an incidence digraph.
///
/// Lane instances below the threshold `t` are materialized as finite nodes;
/// instance `t` is cell 0 of a uniform periodic part. Walks enter and leave
/// the periodic part only at cell 0, so a closure over the finite nodes
/// plus one portal per lane, combined with [`PeriodicSolver`] inside the
/// periodic part, decides every query.
#[derive(Debug)]
pub struct Reach {
    graph: IncidenceDigraph,
    threshold: i64,
    solver: PeriodicSolver,
    /// Closure over finite nodes then portals.
    closure: BitMatrix,
    finite: usize,
}

impl Reach {
    pub fn new(graph: &IncidenceDigraph) -> Reach {
        let t = graph.threshold();
        let (nc, nl) = (graph.concrete.len(), graph.lanes.len());
        let finite = nc + nl * t as usize;
        let mut m = BitMatrix::new(finite + nl);
        let index = |p: Point| -> usize {
            match p {
                Point::Concrete(i) => i,
                Point::Lane(l, n) if n < t => nc + l * t as usize + n as usize,
                Point::Lane(l, _) => finite + l,
            }
        };
        let mut add = |u: Point, v: Point| {
            let (iu, iv) = (index(u), index(v));
            m.set(iu, iv);
        };
        for &(u, v) in &graph.edges {
            add(u, v);
        }
        let (mut a, mut f, mut k) = (BitMatrix::new(nl), BitMatrix::new(nl), BitMatrix::new(nl));
        for r in &graph.rules {
            for x in r.start.max(-r.delta).max(0)..t {
                add(Point::Lane(r.from, x), Point::Lane(r.to, x + r.delta));
            }
            match r.delta {
                0 => a.set(r.from, r.to),
                1 => f.set(r.from, r.to),
                -1 => {
                    k.set(r.from, r.to);
                    add(Point::Lane(r.from, t), Point::Lane(r.to, t - 1));
                }
                _ => unreachable!("offsets are checked when the graph is built"),
            }
        }
        let solver = PeriodicSolver::new(&a, &f, &k);
        for l in 0..nl {
            let row = solver.row(l, 0, 0);
            for (l2, hit) in row.into_iter().enumerate() {
                if hit {
                    add(Point::Lane(l, t), Point::Lane(l2, t));
                }
            }
        }
        let closure = m.closure();
        Reach { graph: graph.clone(), threshold: t, solver, closure, finite }
    }

    pub fn graph(&self) -> &IncidenceDigraph {
        &self.graph
    }

    fn split(&self, p: Point) -> Result<usize, (usize, u64)> {
        let t = self.threshold;
        let nc = self.graph.concrete.len();
        match p {
            Point::Concrete(i) => Ok(i),
            Point::Lane(l, n) if n < t => Ok(nc + l * t as usize + n as usize),
            Point::Lane(l, n) => Err((l, (n - t) as u64)),
        }
    }

    pub fn reach(&self, from: Point, to: Point) -> bool {
        let portal = |l: usize| self.finite + l;
        let nl = self.graph.lanes.len();
        match (self.split(from), self.split(to)) {
            (Ok(u), Ok(v)) => self.closure.get(u, v),
            (Err((a, x)), Ok(v)) => {
                let row = self.solver.row(a, x, 0);
                (0..nl).any(|l| row[l] && self.closure.get(portal(l), v))
            }
            (Ok(u), Err((b, y))) => (0..nl).any(|l| self.closure.get(u, portal(l)) && self.solver.reach(l, 0, b, y)),
            (Err((a, x)), Err((b, y))) => {
                if self.solver.reach(a, x, b, y) {
                    return true;
                }
                let out = self.solver.row(a, x, 0);
                let ins: Vec<bool> = (0..nl).map(|l| self.solver.reach(l, 0, b, y)).collect();
                (0..nl).any(|l| out[l] && (0..nl).any(|l2| ins[l2] && self.closure.get(portal(l), portal(l2))))
            }
        }
    }

    /// Reach matrix over `points` (rows computed per source).
    pub fn matrix(&self, points: &[Point], exec: Exec) -> Vec<Vec<bool>> {
        par::map(exec, points, |&p| points.iter().map(|&q| self.reach(p, q)).collect())
    }
}

/// Unfolding oracle over a reach query, for tests and the depth fallback.
pub fn reach_by_unfolding(g: &IncidenceDigraph, from: Point, to: Point, depth: i64) -> bool {
    g.bounded_reach(from, to, depth)
}

/// Periodic reach query on lanes only: `(a, i)` to `(b, j)`.
pub fn periodic_reach(g: &IncidenceDigraph, from: (usize, i64), to: (usize, i64)) -> bool {
    Reach::new(g).reach(Point::Lane(from.0, from.1), Point::Lane(to.0, to.1))
}

/// Labels of a reach matrix keyed by point, for callers that need lookups.
pub fn index_points(points: &[Point]) -> HashMap<Point, usize> {
    points.iter().enumerate().map(|(i, p)| (*p, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> IncidenceDigraph {
        // v0 -> v@0 -> v@1 -> ...
        IncidenceDigraph {
            rank: Some(RankTag::Finite(1)),
            concrete: vec!["v0".into()],
            lanes: vec!["v".into()],
            edges: vec![(Point::Concrete(0), Point::Lane(0, 0))],
            rules: vec![LaneRule { from: 0, to: 0, delta: 1, start: 0 }],
        }
    }

    #[test]
    fn ladder_reach() {
        let g = ladder();
        let r = Reach::new(&g);
        assert!(r.reach(Point::Concrete(0), Point::Lane(0, 40)));
        assert!(!r.reach(Point::Lane(0, 3), Point::Lane(0, 2)));
        assert!(!r.reach(Point::Lane(0, 0), Point::Concrete(0)));
        assert!(r.reach(Point::Lane(0, 7), Point::Lane(0, 7)));
    }

    #[test]
    fn symmetric_ladder_connects_everything() {
        let g = ladder().symmetrized();
        let r = Reach::new(&g);
        assert!(r.reach(Point::Lane(0, 9), Point::Concrete(0)));
        assert!(r.reach(Point::Lane(0, 9), Point::Lane(0, 1)));
    }

    #[test]
    fn exits_through_finite_part() {
        // lane a descends to instance 0, hops to concrete c, which enters
        // lane b at its threshold cell and b ascends
        let g = IncidenceDigraph {
            rank: None,
            concrete: vec!["c".into()],
            lanes: vec!["a".into(), "b".into()],
            edges: vec![(Point::Lane(0, 0), Point::Concrete(0)), (Point::Concrete(0), Point::Lane(1, 2))],
            rules: vec![
                LaneRule { from: 0, to: 0, delta: -1, start: 1 },
                LaneRule { from: 1, to: 1, delta: 1, start: 0 },
            ],
        };
        let r = Reach::new(&g);
        for (x, y) in [(5, 9), (0, 2), (12, 3), (1, 1)] {
            let exact = r.reach(Point::Lane(0, x), Point::Lane(1, y));
            assert_eq!(exact, g.bounded_reach(Point::Lane(0, x), Point::Lane(1, y), 40), "{x} {y}");
        }
    }

    #[test]
    fn labels_round_trip() {
        let g = ladder();
        assert_eq!(g.point("v@3"), Some(Point::Lane(0, 3)));
        assert_eq!(g.label(Point::Lane(0, 3)), "v@3");
        assert_eq!(g.point("v0"), Some(Point::Concrete(0)));
        assert_eq!(g.point("w"), None);
    }
}
