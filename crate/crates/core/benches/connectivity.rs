use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transdigraph::connect::{components_of, ComponentOptions, IncidenceDigraph, Kind, LaneRule, Point};
use transdigraph::par::Exec;
use transdigraph::present::{compute_ditips_with, Mode, WalkPresentation};
use transdigraph::{Digraph, Item, RankTag};

fn incidence(n: usize, lanes: usize, seed: u64) -> IncidenceDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for _ in 0..3 * n {
        edges.push((Point::Concrete(rng.gen_range(0..n)), Point::Concrete(rng.gen_range(0..n))));
    }
    for l in 0..lanes {
        edges.push((Point::Concrete(rng.gen_range(0..n)), Point::Lane(l, 0)));
    }
    let rules = (0..2 * lanes)
        .map(|_| LaneRule {
            from: rng.gen_range(0..lanes),
            to: rng.gen_range(0..lanes),
            delta: rng.gen_range(-1..=1),
            start: rng.gen_range(0..2),
        })
        .collect();
    IncidenceDigraph {
        rank: Some(RankTag::Finite(1)),
        concrete: (0..n).map(|i| format!("c{i}")).collect(),
        lanes: (0..lanes).map(|l| format!("f{l}")).collect(),
        edges,
        rules,
    }
}

fn rays(count: usize) -> Digraph {
    let mut d = Digraph::new("rays", RankTag::ZERO);
    for i in 0..count {
        let lane = format!("n{}", i % 40);
        let id = format!("p{i}");
        let p = WalkPresentation {
            id: id.clone(),
            rank: RankTag::ZERO,
            template: Some("T".into()),
            mode: Mode::Out,
            left: vec![],
            left_anchor: 0,
            prefix: vec![],
            repetend: vec![Item::rel(lane, 0), Item::rel(format!("a{}", i % 40), 0)],
            anchor: (i / 40) as i64,
        };
        d.presentations.insert(id, p);
    }
    d
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("components");
    group.sample_size(10);
    let g = incidence(120, 8, 7);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let opts = ComponentOptions { exec, ..ComponentOptions::default() };
        for kind in [Kind::Strong, Kind::Weak] {
            group.bench_with_input(BenchmarkId::new(format!("{kind}"), format!("{exec:?}")), &opts, |b, opts| {
                b.iter(|| components_of(&g, kind, opts))
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("ditips");
    let d = rays(2000);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| b.iter(|| compute_ditips_with(&d, RankTag::ZERO, exec)));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
