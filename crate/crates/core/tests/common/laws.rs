//! Structural laws, each checked on the case drawn from one seed.

use transdigraph::cli::{parse_partitions, parse_spec};
use transdigraph::elevate::{elevate, underlying_graph};
use transdigraph::present::{eventually_identical, normalize};

use super::gen;

pub type Law = fn(u64) -> Result<(), String>;

pub const LAWS: [(&str, Law); 5] = [
    ("underlying graph commutes with elevation", commutation),
    ("branches equal arcs", branch_count),
    ("elevation validates", elevate_validates),
    ("normalize is idempotent", normalize_idempotent),
    ("eventual identity is an equivalence", eventual_identity),
];

fn elevated(seed: u64) -> Result<(transdigraph::Digraph, transdigraph::elevate::PartitionSpec, transdigraph::Digraph), String> {
    let b = gen::bundle(&mut gen::rng(seed), false);
    let d0 = parse_spec(&b.rank0_text()).map_err(|e| e.to_string())?.digraph;
    let spec = parse_partitions(&b.partition).map_err(|e| e.to_string())?.remove(0);
    let d1 = elevate(&d0, &spec).map_err(|e| e.to_string())?;
    Ok((d0, spec, d1))
}

pub fn commutation(seed: u64) -> Result<(), String> {
    let (d0, spec, d1) = elevated(seed)?;
    let lifted = underlying_graph(&d0).apply_partition(&spec).ok_or("partition rank has no successor")?;
    if underlying_graph(&d1) != lifted {
        return Err(format!("seed {seed}: underlying(elevate(d)) differs from elevate(underlying(d))"));
    }
    Ok(())
}

pub fn branch_count(seed: u64) -> Result<(), String> {
    let mut rng = gen::rng(seed);
    let (n, arcs) = gen::rank0(&mut rng, 12, 30);
    let d = gen::rank0_digraph(n, &arcs);
    let g = underlying_graph(&d);
    if g.branches.len() != d.arcs.len() || g.nodes.len() != d.vertices.len() {
        return Err(format!("seed {seed}: {} branches for {} arcs", g.branches.len(), d.arcs.len()));
    }
    let (_, _, d1) = elevated(seed)?;
    if underlying_graph(&d1).branches.len() != d1.arcs.len() {
        return Err(format!("seed {seed}: branch count changed by elevation"));
    }
    Ok(())
}

pub fn elevate_validates(seed: u64) -> Result<(), String> {
    let (_, _, d1) = elevated(seed)?;
    let report = d1.validate();
    if !report.is_ok() {
        return Err(format!("seed {seed}: {}", report.violations[0]));
    }
    Ok(())
}

pub fn normalize_idempotent(seed: u64) -> Result<(), String> {
    let p = gen::presentation(&mut gen::rng(seed), "p");
    let once = normalize(&p).map_err(|e| e.to_string())?;
    let twice = normalize(&once).map_err(|e| e.to_string())?;
    if once != twice {
        return Err(format!("seed {seed}: {once:?} renormalizes to {twice:?}"));
    }
    if gen::elements(&p, 40) != gen::elements(&once, 40) {
        return Err(format!("seed {seed}: normalization changed the walk"));
    }
    Ok(())
}

pub fn eventual_identity(seed: u64) -> Result<(), String> {
    let mut rng = gen::rng(seed);
    let ps: Vec<_> = ["p", "q", "r"].iter().map(|id| gen::presentation(&mut rng, id)).collect();
    let e = |a: usize, b: usize| eventually_identical(&ps[a], &ps[b]).map_err(|e| e.to_string());
    for a in 0..3 {
        if !e(a, a)? {
            return Err(format!("seed {seed}: not reflexive"));
        }
        for b in 0..3 {
            let ab = e(a, b)?;
            if ab != e(b, a)? {
                return Err(format!("seed {seed}: not symmetric"));
            }
            if ab != gen::share_tail(&ps[a], &ps[b]) {
                return Err(format!("seed {seed}: disagrees with the tail oracle on {a}, {b}"));
            }
            for c in 0..3 {
                if ab && e(b, c)? && !e(a, c)? {
                    return Err(format!("seed {seed}: not transitive"));
                }
            }
        }
    }
    Ok(())
}
