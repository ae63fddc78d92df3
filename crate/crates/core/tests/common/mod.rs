//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use cgel_core::format::{parse_corpus, RawNode, SourceTree};
use cgel_core::grammar::ConstituentGraph;

pub fn fixture_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(kind)
}

/// `(file stem, contents)` for every fixture of a kind, sorted by name.
pub fn fixtures(kind: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(fixture_dir(kind))
        .expect("fixture directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "cgel"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).expect("readable fixture"))
        })
        .collect();
    out.sort();
    out
}

pub fn fixture(kind: &str, name: &str) -> String {
    fs::read_to_string(fixture_dir(kind).join(format!("{name}.cgel"))).expect("fixture exists")
}

pub fn single_tree(text: &str) -> SourceTree {
    let mut trees = parse_corpus(text).expect("fixture parses");
    assert_eq!(trees.len(), 1, "one tree per fixture");
    trees.remove(0)
}

pub fn graph_of(text: &str) -> (SourceTree, ConstituentGraph) {
    let tree = single_tree(text);
    let graph = ConstituentGraph::from_tree(&tree);
    (tree, graph)
}

pub fn wh_movement() -> (SourceTree, ConstituentGraph) {
    graph_of(&fixture("trees", "wh-movement"))
}

/// Nodes in the raw tree written with one of the four fused functions,
/// counted straight off the parse without the grammar model.
pub fn raw_fused_count(node: &RawNode) -> usize {
    const FUSED: [&str; 4] = ["Det-Head", "Mod-Head", "Marker-Head", "Head-Prenucleus"];
    node.children
        .iter()
        .map(|c| usize::from(FUSED.contains(&c.function.as_str())) + raw_fused_count(&c.node))
        .sum()
}

pub fn raw_gap_count(node: &RawNode) -> usize {
    usize::from(node.category == "GAP")
        + node.children.iter().map(|c| raw_gap_count(&c.node)).sum::<usize>()
}

/// Leaves in document order, straight off the raw tree.
pub fn raw_leaves(node: &RawNode) -> Vec<&RawNode> {
    if node.children.is_empty() {
        return vec![node];
    }
    node.children.iter().flat_map(|c| raw_leaves(&c.node)).collect()
}
