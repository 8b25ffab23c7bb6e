//! Independent reference computations over explicit finite graphs.

use std::collections::{BTreeSet, VecDeque};

/// Reflexive-transitive reach by breadth-first search from every vertex.
pub fn reach(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            seen
        })
        .collect()
}

pub fn mutual_classes(n: usize, edges: &[(usize, usize)]) -> BTreeSet<BTreeSet<usize>> {
    let r = reach(n, edges);
    (0..n).map(|i| (0..n).filter(|&j| r[i][j] && r[j][i]).collect()).collect()
}

/// Connected components of the graph with every edge made two-way.
pub fn undirected_classes(n: usize, edges: &[(usize, usize)]) -> BTreeSet<BTreeSet<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    (0..n).map(|i| (0..n).filter(|&j| roots[j] == roots[i]).collect()).collect()
}

/// Every inclusion-maximal subset of `nodes` whose members are pairwise
/// joined by a one-way walk, by exhaustive search over subsets.
pub fn maximal_one_way_sets(nodes: &[usize], r: &[Vec<bool>]) -> BTreeSet<BTreeSet<usize>> {
    let k = nodes.len();
    assert!(k <= 16);
    let ok = |mask: u32| {
        (0..k).all(|a| {
            (0..k).all(|b| mask & (1 << a) == 0 || mask & (1 << b) == 0 || r[nodes[a]][nodes[b]] || r[nodes[b]][nodes[a]])
        })
    };
    let good: Vec<u32> = (1..(1u32 << k)).filter(|&m| ok(m)).collect();
    good.iter()
        .filter(|&&m| !good.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..k).filter(|&a| m & (1 << a) != 0).map(|a| nodes[a]).collect())
        .collect()
}

/// An arc pattern of a cell template: `(tail node, tail offset, head node, head offset)`.
pub type CellArc = (usize, i64, usize, i64);

/// Reach between `(node, cell)` pairs in the template unfolded to cells `0..depth`.
pub fn unfolded_reach(nodes: usize, arcs: &[CellArc], depth: i64) -> impl Fn((usize, i64), (usize, i64)) -> bool {
    let id = move |(n, c): (usize, i64)| c as usize * nodes + n;
    let mut edges = Vec::new();
    for j in 0..depth {
        for &(t, a, h, b) in arcs {
            let (ct, ch) = (j + a, j + b);
            if (0..depth).contains(&ct) && (0..depth).contains(&ch) {
                edges.push((id((t, ct)), id((h, ch))));
            }
        }
    }
    let r = reach(nodes * depth as usize, &edges);
    move |u, v| r[id(u)][id(v)]
}
