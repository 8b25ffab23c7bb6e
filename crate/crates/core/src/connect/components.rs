use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{build_incidence, ConnectError, IncidenceDigraph, Point, Reach};
use crate::model::Digraph;
use crate::par::Exec;
use crate::rank::RankTag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Strong,
    Unilateral,
    Weak,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Strong => "strong",
            Kind::Unilateral => "unilateral",
            Kind::Weak => "weak",
        })
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Kind, String> {
        match s {
            "strong" => Ok(Kind::Strong),
            "unilateral" => Ok(Kind::Unilateral),
            "weak" => Ok(Kind::Weak),
            _ => Err(format!("unknown component kind `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ComponentOptions {
    /// Instances `0..window` of every vertex family are listed.
    pub window: i64,
    pub max_components: usize,
    pub exec: Exec,
}

impl Default for ComponentOptions {
    fn default() -> Self {
        ComponentOptions { window: 6, max_components: 10_000, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSet {
    pub kind: Kind,
    pub rank: RankTag,
    pub components: Vec<Vec<String>>,
    /// The unilateral enumeration hit its cap.
    pub truncated: bool,
    /// Family instances listed per family, when the digraph has families.
    pub window: Option<i64>,
}

impl ComponentSet {
    pub fn check(&self) -> Result<&ComponentSet, ConnectError> {
        if self.truncated {
            Err(ConnectError::TruncatedEnumeration(self.components.len()))
        } else {
            Ok(self)
        }
    }

    pub fn containing(&self, label: &str) -> Vec<&Vec<String>> {
        self.components.iter().filter(|c| c.iter().any(|x| x == label)).collect()
    }
}

fn listed(g: &IncidenceDigraph, window: i64) -> Vec<Point> {
    let mut pts: Vec<Point> = (0..g.concrete.len()).map(Point::Concrete).collect();
    for l in 0..g.lanes.len() {
        pts.extend((0..window.max(0)).map(|n| Point::Lane(l, n)));
    }
    pts
}

/// Classes of a symmetric reflexive relation, in order of first member.
fn classes(n: usize, related: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut class_of: Vec<Option<usize>> = vec![None; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i].is_some() {
            continue;
        }
        let c = out.len();
        let members: Vec<usize> = (i..n).filter(|&j| class_of[j].is_none() && related(i, j)).collect();
        for &j in &members {
            class_of[j] = Some(c);
        }
        out.push(members);
    }
    out
}

/// Maximal chains of the preorder `reach` restricted to `nodes`, via paths
/// through the covering relation of its condensation.
fn maximal_chains(nodes: &[usize], reach: &[Vec<bool>], cap: usize) -> (Vec<Vec<usize>>, bool) {
    let sccs = classes(nodes.len(), |a, b| reach[nodes[a]][nodes[b]] && reach[nodes[b]][nodes[a]]);
    let k = sccs.len();
    let below = |c: usize, d: usize| c != d && reach[nodes[sccs[c][0]]][nodes[sccs[d][0]]];
    let mut cover: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut has_pred = vec![false; k];
    for c in 0..k {
        for d in 0..k {
            if below(c, d) && !(0..k).any(|e| below(c, e) && below(e, d)) {
                cover[c].push(d);
                has_pred[d] = true;
            }
        }
    }
    let mut chains = Vec::new();
    let mut truncated = false;
    let mut stack: Vec<Vec<usize>> = (0..k).rev().filter(|&c| !has_pred[c]).map(|c| vec![c]).collect();
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if cover[last].is_empty() {
            if chains.len() == cap {
                truncated = true;
                break;
            }
            let mut members: Vec<usize> = path.iter().flat_map(|&c| sccs[c].iter().map(|&i| nodes[i])).collect();
            members.sort();
            chains.push(members);
            continue;
        }
        for &d in cover[last].iter().rev() {
            let mut next = path.clone();
            next.push(d);
            stack.push(next);
        }
    }
    (chains, truncated)
}

/// Components of an incidence digraph over the listed points.
pub fn components_of(g: &IncidenceDigraph, kind: Kind, opts: &ComponentOptions) -> ComponentSet {
    let pts = listed(g, opts.window);
    let n = pts.len();
    let (groups, truncated) = match kind {
        Kind::Strong => {
            let r = Reach::new(g).matrix(&pts, opts.exec);
            (classes(n, |i, j| r[i][j] && r[j][i]), false)
        }
        Kind::Weak => {
            let r = Reach::new(&g.symmetrized()).matrix(&pts, opts.exec);
            (classes(n, |i, j| r[i][j]), false)
        }
        Kind::Unilateral => {
            let r = Reach::new(g).matrix(&pts, opts.exec);
            let nodes: Vec<usize> = (0..n).filter(|&i| g.touches(pts[i])).collect();
            maximal_chains(&nodes, &r, opts.max_components)
        }
    };
    let mut groups = groups;
    groups.sort();
    ComponentSet {
        kind,
        rank: g.rank.unwrap_or(RankTag::ZERO),
        components: groups.into_iter().map(|c| c.into_iter().map(|i| g.label(pts[i])).collect()).collect(),
        truncated,
        window: (!g.lanes.is_empty()).then_some(opts.window),
    }
}

pub fn components(d: &Digraph, rank: RankTag, kind: Kind) -> Result<ComponentSet, ConnectError> {
    components_with(d, rank, kind, &ComponentOptions::default())
}

pub fn components_with(d: &Digraph, rank: RankTag, kind: Kind, opts: &ComponentOptions) -> Result<ComponentSet, ConnectError> {
    Ok(components_of(&build_incidence(d, rank)?, kind, opts))
}

/// Whether `u` and `v` are connected in the given sense at `rank`.
pub fn connected(d: &Digraph, u: &str, v: &str, rank: RankTag, kind: Kind) -> Result<bool, ConnectError> {
    let g = build_incidence(d, rank)?;
    let point = |x: &str| g.point(x).ok_or_else(|| ConnectError::UnknownVertex(x.to_string()));
    let (pu, pv) = (point(u)?, point(v)?);
    Ok(match kind {
        Kind::Strong => {
            let r = Reach::new(&g);
            r.reach(pu, pv) && r.reach(pv, pu)
        }
        Kind::Unilateral => {
            let r = Reach::new(&g);
            r.reach(pu, pv) || r.reach(pv, pu)
        }
        Kind::Weak => Reach::new(&g.symmetrized()).reach(pu, pv),
    })
}

/// Number of components each listed vertex lies in.
pub fn membership_counts(set: &ComponentSet) -> BTreeMap<&str, usize> {
    let mut out = BTreeMap::new();
    for c in &set.components {
        for x in c {
            *out.entry(x.as_str()).or_insert(0) += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(n: usize, arcs: &[(usize, usize)]) -> IncidenceDigraph {
        IncidenceDigraph {
            rank: Some(RankTag::ZERO),
            concrete: (0..n).map(|i| format!("v{i}")).collect(),
            lanes: vec![],
            edges: arcs.iter().map(|&(a, b)| (Point::Concrete(a), Point::Concrete(b))).collect(),
            rules: vec![],
        }
    }

    fn comps(g: &IncidenceDigraph, kind: Kind) -> Vec<Vec<String>> {
        components_of(g, kind, &ComponentOptions::default()).components
    }

    fn set(xs: &[&[&str]]) -> Vec<Vec<String>> {
        xs.iter().map(|c| c.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn chain() {
        let g = finite(3, &[(0, 1), (1, 2)]);
        assert_eq!(comps(&g, Kind::Strong), set(&[&["v0"], &["v1"], &["v2"]]));
        assert_eq!(comps(&g, Kind::Unilateral), set(&[&["v0", "v1", "v2"]]));
        assert_eq!(comps(&g, Kind::Weak), set(&[&["v0", "v1", "v2"]]));
    }

    #[test]
    fn fork() {
        let g = finite(3, &[(0, 1), (0, 2)]);
        assert_eq!(comps(&g, Kind::Unilateral), set(&[&["v0", "v1"], &["v0", "v2"]]));
    }

    #[test]
    fn isolated_vertex() {
        let g = finite(2, &[]);
        assert_eq!(comps(&g, Kind::Strong), set(&[&["v0"], &["v1"]]));
        assert_eq!(comps(&g, Kind::Weak), set(&[&["v0"], &["v1"]]));
        assert!(comps(&g, Kind::Unilateral).is_empty());
    }

    #[test]
    fn cap_reported() {
        // two layers of three: nine maximal chains
        let mut arcs = vec![];
        for a in 0..3 {
            for b in 3..6 {
                arcs.push((a, b));
            }
        }
        let g = finite(6, &arcs);
        let opts = ComponentOptions { max_components: 4, ..ComponentOptions::default() };
        let s = components_of(&g, Kind::Unilateral, &opts);
        assert!(s.truncated);
        assert_eq!(s.components.len(), 4);
        assert!(s.check().is_err());
    }
}
