#![allow(dead_code)]

use std::path::PathBuf;

use transdigraph::cli::{parse_spec, run, Document};

pub fn examples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub fn example_path(name: &str) -> String {
    examples_dir().join(name).to_string_lossy().into_owned()
}

pub fn load(name: &str) -> Document {
    parse_spec(&std::fs::read_to_string(example_path(name)).unwrap()).unwrap()
}

/// Every `.tdg` file in the example corpus, sorted.
pub fn corpus() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(examples_dir())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".tdg"))
        .collect();
    names.sort();
    names
}

/// (golden file name, argument list) for every golden in the corpus.
pub fn golden_cases() -> Vec<(String, Vec<String>)> {
    let mut cases = Vec::new();
    for name in corpus() {
        let stem = name.trim_end_matches(".tdg").to_string();
        let path = example_path(&name);
        let args = |xs: &[&str]| -> Vec<String> {
            let mut v = vec!["tdg".to_string()];
            v.extend(xs.iter().map(|s| s.to_string()));
            v
        };
        cases.push((format!("{stem}.dot"), args(&["export-dot", &path, "--truncate", "3"])));
        cases.push((format!("{stem}.underlying.json"), args(&["--format", "json", "underlying", &path])));
        let doc = load(&name);
        let top = doc.digraph.rank;
        let rank = match top.finite() {
            Some(r) => r.to_string(),
            None => "omega".into(),
        };
        if top.finite().is_some() {
            cases.push((
                format!("{stem}.weak.json"),
                args(&["--format", "json", "components", &path, "--kind", "weak", "--rank", &rank]),
            ));
        } else {
            cases.push((format!("{stem}.tips.json"), args(&["--format", "json", "tips", &path, "--rank", "arrow"])));
        }
    }
    cases
}

/// Runs the CLI and returns stdout, panicking on a nonzero exit.
pub fn output(args: &[String]) -> String {
    let out = run(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out.stdout
}

/// Set `TDG_BLESS=1` to rewrite the goldens from the current output.
pub fn bless_requested() -> bool {
    std::env::var_os("TDG_BLESS").is_some()
}

pub mod gen;
pub mod oracle;
pub mod laws;
