//! Seeded generators for randomized suites.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transdigraph::connect::{IncidenceDigraph, LaneRule};
use transdigraph::model::{Arc, Vertex};
use transdigraph::present::{Mode, WalkPresentation};
use transdigraph::{Digraph, Item, RankTag};

use super::oracle::CellArc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vertex count and arc list; self-loops and parallel arcs occur.
pub fn rank0(rng: &mut ChaCha8Rng, max_vertices: usize, max_arcs: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_vertices);
    let m = rng.gen_range(0..=max_arcs);
    let mut arcs: Vec<(usize, usize)> = Vec::with_capacity(m);
    for _ in 0..m {
        if !arcs.is_empty() && rng.gen_bool(0.1) {
            let dup = arcs[rng.gen_range(0..arcs.len())];
            arcs.push(dup);
        } else if rng.gen_bool(0.1) {
            let v = rng.gen_range(0..n);
            arcs.push((v, v));
        } else {
            arcs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
        }
    }
    (n, arcs)
}

pub fn rank0_digraph(n: usize, arcs: &[(usize, usize)]) -> Digraph {
    let mut d = Digraph::new("g", RankTag::ZERO);
    for i in 0..n {
        let id = format!("v{i}");
        d.vertices.insert(id.clone(), Vertex { id, rank: RankTag::ZERO, members: vec![] });
    }
    for (j, &(t, h)) in arcs.iter().enumerate() {
        let id = format!("a{j}");
        d.arcs.insert(id.clone(), Arc { id, tail: format!("v{t}"), head: format!("v{h}") });
    }
    d
}

/// A cell template with `1..=5` nodes; the two ends of an arc lie at most
/// one cell apart.
pub fn template(rng: &mut ChaCha8Rng) -> (usize, Vec<CellArc>) {
    let nodes = rng.gen_range(1..=5);
    let m = rng.gen_range(0..=2 * nodes + 2);
    let arcs = (0..m)
        .map(|_| {
            let a = rng.gen_range(-1..=1);
            let b = (a + rng.gen_range(-1..=1)).clamp(-1, 1);
            (rng.gen_range(0..nodes), a, rng.gen_range(0..nodes), b)
        })
        .collect();
    (nodes, arcs)
}

/// The template as lanes: node `n` in cell `x` is lane `n` at `x`.
pub fn template_lanes(nodes: usize, arcs: &[CellArc]) -> IncidenceDigraph {
    IncidenceDigraph {
        rank: Some(RankTag::ZERO),
        concrete: vec![],
        lanes: (0..nodes).map(|n| format!("n{n}")).collect(),
        edges: vec![],
        rules: arcs.iter().map(|&(t, a, h, b)| LaneRule { from: t, to: h, delta: b - a, start: a.max(0) }).collect(),
    }
}

/// Pieces of a random finitely presented bundle.
pub struct Bundle {
    pub rank: i64,
    /// Templates, rank-0 vertices and arcs, rank-0 presentations.
    pub base: String,
    /// Rank-1 vertex declarations.
    pub cells: String,
    /// The same rank-1 cells as a partition of the rank-0 ditips.
    pub partition: String,
    /// Rank-1 presentations and rank-2 vertices.
    pub upper: String,
}

impl Bundle {
    pub fn text(&self) -> String {
        format!("digraph g rank {}\n{}{}{}", self.rank, self.base, self.cells, self.upper)
    }

    pub fn rank0_text(&self) -> String {
        format!("digraph g rank 0\n{}", self.base)
    }
}

/// Concrete 0-vertices with arcs, `m` inward and `m` outward rays in a
/// periodic template joined by endless walks, and optionally a family of
/// ladders as in the shipped ladders example. The rank-1 cells partition the
/// rank-0 ditips at random; with `want_rank2` and a chained ladder family,
/// a 1-diwalk climbs the family into a single 2-vertex.
pub fn bundle(rng: &mut ChaCha8Rng, want_rank2: bool) -> Bundle {
    let mut base = String::new();
    let m = rng.gen_range(1..=3);
    let ladder = want_rank2 || rng.gen_bool(0.5);
    // 0: v_k -> v_(k+1), 1: a loop at each v_k, 2: v_(k+1) -> v_k
    let shape = if want_rank2 { 0 } else { rng.gen_range(0..3) };

    if ladder {
        base.push_str("template L copies { node i; node o; arc down from i@k+1 to i@k; arc rung from i@k to o@k; arc up from o@k to o@k+1; }\n");
    }
    let mut rungs = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if rng.gen_bool(0.4) {
                rungs.push((a, b));
            }
        }
    }
    base.push_str("template T {");
    for j in 0..m {
        let _ = write!(base, " node i{j}; node o{j}; arc d{j} from i{j}@k+1 to i{j}@k; arc u{j} from o{j}@k to o{j}@k+1;");
    }
    for (a, b) in &rungs {
        let _ = write!(base, " arc r{a}_{b} from i{a} to o{b};");
    }
    base.push_str(" }\n");

    let n0 = rng.gen_range(0..=4);
    for c in 0..n0 {
        let _ = writeln!(base, "vertex c{c} rank 0");
    }
    if n0 > 0 {
        for j in 0..rng.gen_range(0..=8) {
            let _ = writeln!(base, "arc e{j} from c{} to c{}", rng.gen_range(0..n0), rng.gen_range(0..n0));
        }
    }

    let mut tips: Vec<(String, &str)> = Vec::new();
    for j in 0..m {
        let _ = writeln!(base, "walk-presentation pin{j} rank 0 over T mode in prefix [i{j}@0] repetend [i{j}@k+1, d{j}@k] anchor 0");
        let _ = writeln!(base, "walk-presentation pout{j} rank 0 over T mode out prefix [] repetend [o{j}@k, u{j}@k] anchor 0");
        tips.push((format!("pin{j}"), "intip"));
        tips.push((format!("pout{j}"), "outtip"));
    }
    for (a, b) in &rungs {
        let _ = writeln!(
            base,
            "walk-presentation x{a}_{b} rank 0 over T mode endless left [i{a}@k+1, d{a}@k] anchor 0 prefix [i{a}@0, r{a}_{b}@0] repetend [o{b}@k, u{b}@k] anchor 0"
        );
    }
    if ladder {
        base.push_str("walk-presentation rin rank 0 over L mode in prefix [i@0] repetend [i@k+1, down@k] anchor 0\n");
        base.push_str("walk-presentation rout rank 0 over L mode out prefix [] repetend [o@k, up@k] anchor 0\n");
        base.push_str("walk-presentation w rank 0 over L mode endless left [i@k+1, down@k] anchor 0 prefix [i@0, rung@0] repetend [o@k, up@k] anchor 0\n");
    }

    tips.shuffle(rng);
    let q = rng.gen_range(1..=tips.len());
    let mut groups: Vec<Vec<(String, &str)>> = vec![Vec::new(); q];
    for (i, t) in tips.into_iter().enumerate() {
        let g = if i < q { i } else { rng.gen_range(0..q) };
        groups[g].push(t);
    }
    let (mut cells, mut partition) = (String::new(), String::from("partition rank 0 {\n"));
    for (g, members) in groups.iter().enumerate() {
        let inner: Vec<String> = members.iter().map(|(t, dir)| format!("{dir} {t};")).collect();
        let _ = writeln!(cells, "vertex X{g} rank 1 {{ {} }}", inner.join(" "));
        let names: Vec<&str> = members.iter().map(|(t, _)| t.as_str()).collect();
        let _ = writeln!(partition, "  X{g}: {};", names.join(", "));
    }
    if ladder {
        match shape {
            0 => {
                cells.push_str("vertex v0 rank 1 { intip rin@0; }\n");
                cells.push_str("vertex-family v rank 1 index k { outtip rout@k; intip rin@k+1; }\n");
                partition.push_str("  v0: rin@0;\n  v@k: rout@k, rin@k+1;\n");
            }
            1 => {
                cells.push_str("vertex-family v rank 1 index k { outtip rout@k; intip rin@k; }\n");
                partition.push_str("  v@k: rout@k, rin@k;\n");
            }
            _ => {
                cells.push_str("vertex u0 rank 1 { outtip rout@0; }\n");
                cells.push_str("vertex-family v rank 1 index k { outtip rout@k+1; intip rin@k; }\n");
                partition.push_str("  u0: rout@0;\n  v@k: rout@k+1, rin@k;\n");
            }
        }
    }
    partition.push_str("}\n");

    let mut upper = String::new();
    let mut rank = 1;
    if want_rank2 {
        rank = 2;
        upper.push_str("walk-presentation climb rank 1 mode out prefix [v0, w@0] repetend [v@k, w@k+1] anchor 0\n");
        upper.push_str("vertex top rank 2 { outtip climb; }\n");
    }
    Bundle { rank, base, cells, partition, upper }
}

/// Growth-order element `i` of the ray `period` instantiated from `anchor`.
fn ray_element(period: &[Item], anchor: i64, i: usize) -> Item {
    period[i % period.len()].resolve(anchor + (i / period.len()) as i64)
}

/// Periods over a template with lanes `n0`, `n1`.
fn periods() -> Vec<Vec<Item>> {
    vec![
        vec![Item::rel("n0", 0), Item::rel("x", 0)],
        vec![Item::rel("n1", 0), Item::rel("y", 0)],
        vec![Item::rel("n0", 0), Item::rel("z", 0), Item::rel("n1", 1), Item::rel("w", 0)],
        vec![Item::rel("n1", 1), Item::rel("w", 0), Item::rel("n0", 1), Item::rel("z", 1)],
    ]
}

/// An outward presentation of a ray drawn from a small pool, with a random
/// start, prefix length and repetend phase, so that many of the generated
/// presentations are eventually identical.
pub fn presentation(rng: &mut ChaCha8Rng, id: &str) -> WalkPresentation {
    let pool = periods();
    let base = pool.choose(rng).unwrap().clone();
    let l = base.len();
    let anchor = rng.gen_range(0..3);
    let start = 2 * rng.gen_range(0..3);
    let t = 2 * rng.gen_range(0..4);
    let prefix: Vec<Item> = (start..start + t).map(|i| ray_element(&base, anchor, i)).collect();
    let from = start + t;
    let (q, r) = (from / l, from % l);
    let mut repetend: Vec<Item> = base[r..].to_vec();
    repetend.extend(base[..r].iter().map(|i| Item::rel(i.id.clone(), i.index.value().unwrap() + 1)));
    WalkPresentation {
        id: id.into(),
        rank: RankTag::ZERO,
        template: Some("T".into()),
        mode: Mode::Out,
        left: vec![],
        left_anchor: 0,
        prefix,
        repetend,
        anchor: anchor + q as i64,
    }
}

/// The first `n` growth-order elements of an outward presentation.
pub fn elements(p: &WalkPresentation, n: usize) -> Vec<Item> {
    let mut out = p.prefix.clone();
    let mut i = 0;
    while out.len() < n {
        out.push(ray_element(&p.repetend, p.anchor, i));
        i += 1;
    }
    out.truncate(n);
    out
}

/// Oracle: the rays share a tail when some shift aligns long stretches.
pub fn share_tail(p: &WalkPresentation, q: &WalkPresentation) -> bool {
    let (a, b) = (elements(p, 160), elements(q, 160));
    (-40i64..=40).any(|s| (60..100).all(|i| a[(i + s) as usize] == b[i as usize]))
}
