use std::fmt::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::dot::to_dot;
use super::parse::{parse_partitions, parse_spec, Document};
use super::print::print_digraph;
use crate::connect::{build_incidence, components_with, ComponentOptions, ConnectError, Kind, Reach};
use crate::elevate::{elevate, underlying_graph};
use crate::omega::{arrow_ditips, elevate_to_omega, omega_components};
use crate::present::compute_ditips;
use crate::rank::RankTag;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "tdg", version, about = "Transfinite digraph toolkit")]
pub struct Cli {
    /// Cells unfolded by bounded checks.
    #[arg(long, global = true, default_value_t = 50)]
    pub unfold_depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cap on enumerated unilateral components.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_components: usize,
    /// Family instances listed per vertex family.
    #[arg(long, global = true, default_value_t = 6)]
    pub window: i64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a document against every structural rule.
    Validate { file: String },
    /// List the ditips of one rank.
    Tips {
        file: String,
        #[arg(long)]
        rank: RankTag,
    },
    /// Apply the partitions in a file, one level at a time.
    Elevate {
        file: String,
        #[arg(long)]
        partition: String,
    },
    /// Strong, unilateral or weak components at a rank.
    Components {
        file: String,
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        rank: RankTag,
    },
    /// Whether a diwalk of rank below RANK leads from FROM to TO.
    Reach {
        file: String,
        from: String,
        to: String,
        #[arg(long)]
        rank: RankTag,
        /// Use the bounded unfolding instead of the exact periodic solver.
        #[arg(long)]
        bounded: bool,
    },
    /// The underlying undirected structure.
    Underlying { file: String },
    /// Graphviz rendering.
    ExportDot {
        file: String,
        #[arg(long, default_value_t = 3)]
        truncate: usize,
    },
    /// Canonical form of the document.
    Print { file: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Tips { .. } => "tips",
            Command::Elevate { .. } => "elevate",
            Command::Components { .. } => "components",
            Command::Reach { .. } => "reach",
            Command::Underlying { .. } => "underlying",
            Command::ExportDot { .. } => "export-dot",
            Command::Print { .. } => "print",
        }
    }
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Done {
    text: String,
    json: Value,
    /// Domain failure reported as a result rather than an error.
    failed: bool,
}

fn ok(text: String, json: Value) -> Result<Done, Error> {
    Ok(Done { text, json, failed: false })
}

fn load(file: &str) -> Result<Document, Error> {
    Ok(parse_spec(&std::fs::read_to_string(file)?)?)
}

fn component_text(components: &[Vec<String>]) -> String {
    let mut out = String::new();
    for c in components {
        let _ = writeln!(out, "{{{}}}", c.join(", "));
    }
    out
}

fn execute(cli: &Cli) -> Result<Done, Error> {
    match &cli.command {
        Command::Validate { file } => {
            let doc = load(file)?;
            let report = doc.digraph.validate();
            let mut text = String::new();
            for v in &report.violations {
                let _ = writeln!(text, "{v}");
            }
            if report.is_ok() {
                text.push_str("ok\n");
            }
            let json = json!({"valid": report.is_ok(), "violations": report.violations});
            Ok(Done { text, json, failed: !report.is_ok() })
        }
        Command::Tips { file, rank } => {
            let d = load(file)?.digraph;
            if *rank == RankTag::ArrowOmega {
                let tips = arrow_ditips(&d);
                let mut text = String::new();
                for t in &tips {
                    let _ = writeln!(text, "{} {} {{{}}}", t.direction, t.id, t.members.join(", "));
                }
                return ok(text, json!(tips));
            }
            if rank.finite().is_none_or(|r| r < 0) {
                return Err(ConnectError::UnsupportedRank(*rank).into());
            }
            let tips = compute_ditips(&d, *rank);
            let mut text = String::new();
            for t in &tips {
                let fam = if t.family { "@k" } else { "" };
                let _ = writeln!(text, "{} {}{fam} {{{}}}", t.direction, t.id, t.members.join(", "));
            }
            ok(text, json!(tips))
        }
        Command::Elevate { file, partition } => {
            let mut d = load(file)?.digraph;
            let specs = parse_partitions(&std::fs::read_to_string(partition)?)?;
            for spec in &specs {
                d = if spec.rank == RankTag::ArrowOmega { elevate_to_omega(&d, spec)? } else { elevate(&d, spec)? };
            }
            let text = print_digraph(&d);
            ok(text.clone(), json!({"rank": d.rank, "document": text}))
        }
        Command::Components { file, kind, rank } => {
            let d = load(file)?.digraph;
            let opts = ComponentOptions { window: cli.window, max_components: cli.max_components, ..Default::default() };
            let set = if *rank == RankTag::Omega { omega_components(&d, *kind, &opts) } else { components_with(&d, *rank, *kind, &opts)? };
            let mut text = component_text(&set.components);
            if set.truncated {
                let _ = writeln!(text, "(truncated after {} components)", set.components.len());
            }
            ok(text, json!(set))
        }
        Command::Reach { file, from, to, rank, bounded } => {
            let d = load(file)?.digraph;
            let g = build_incidence(&d, *rank)?;
            let point = |s: &str| g.point(s).ok_or_else(|| ConnectError::UnknownVertex(s.to_string()));
            let (p, q) = (point(from)?, point(to)?);
            let hit = if *bounded { g.bounded_reach(p, q, cli.unfold_depth as i64) } else { Reach::new(&g).reach(p, q) };
            ok(format!("{hit}\n"), json!({"from": from, "to": to, "reach": hit, "bounded": bounded}))
        }
        Command::Underlying { file } => {
            let g = underlying_graph(&load(file)?.digraph);
            let mut text = String::new();
            for b in &g.branches {
                let _ = writeln!(text, "branch {} {} -- {}", b.id, b.ends[0], b.ends[1]);
            }
            for n in &g.nodes {
                let tips: Vec<String> = n.tips.iter().map(|t| t.to_string()).collect();
                let fam = if n.family { "@k" } else { "" };
                let _ = writeln!(text, "node {}{fam} rank {} {{{}}}", n.id, n.rank, tips.join(", "));
            }
            ok(text, json!(g))
        }
        Command::ExportDot { file, truncate } => {
            let s = to_dot(&load(file)?.digraph, *truncate)?;
            ok(s.clone(), json!({"dot": s}))
        }
        Command::Print { file } => {
            let doc = load(file)?;
            let s = super::print::print_document(&doc);
            ok(s.clone(), json!({"document": s}))
        }
    }
}

fn meta(cli: &Cli) -> Value {
    json!({
        "unfold_depth": cli.unfold_depth,
        "window": cli.window,
        "max_components": cli.max_components,
    })
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let command = cli.command.name();
    match execute(&cli) {
        Ok(done) => {
            let stdout = match cli.format {
                Format::Text => done.text,
                Format::Json => {
                    let v = json!({"command": command, "result": done.json, "meta": meta(&cli)});
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
                }
            };
            Outcome { code: done.failed as i32, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = if matches!(e, Error::Io(_)) { 2 } else { 1 };
            let stderr = format!("error[{}]: {e}\n", e.code());
            let stdout = match cli.format {
                Format::Text => String::new(),
                Format::Json => {
                    let v = json!({
                        "command": command,
                        "error": {"code": e.code(), "message": e.to_string()},
                        "meta": meta(&cli),
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
                }
            };
            Outcome { code, stdout, stderr }
        }
    }
}
