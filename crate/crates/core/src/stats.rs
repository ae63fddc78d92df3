//! Corpus counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::grammar::ConstituentGraph;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub trees: usize,
    pub nodes: usize,
    pub fused: usize,
    pub gaps: usize,
    /// Constituents with a nonce category or a nonce function.
    pub nonce: usize,
    pub categories: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn add_graph(&mut self, graph: &ConstituentGraph) {
        self.trees += 1;
        for node in graph.nodes() {
            self.nodes += 1;
            *self.categories.entry(node.category_token.clone()).or_default() += 1;
            if let Some(f) = &node.function_token {
                *self.functions.entry(f.clone()).or_default() += 1;
            }
            if node.function.as_ref().is_some_and(|f| f.is_fused()) {
                self.fused += 1;
            }
            if node.is_gap() {
                self.gaps += 1;
            }
            if node.category.is_nonce() || node.function.as_ref().is_some_and(|f| f.is_nonce()) {
                self.nonce += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &CorpusStats) {
        self.trees += other.trees;
        self.nodes += other.nodes;
        self.fused += other.fused;
        self.gaps += other.gaps;
        self.nonce += other.nonce;
        for (k, v) in &other.categories {
            *self.categories.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.functions {
            *self.functions.entry(k.clone()).or_default() += v;
        }
    }

    /// All counts as `(key, value)` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(String, usize)> {
        let mut out = vec![
            ("trees".to_string(), self.trees),
            ("nodes".to_string(), self.nodes),
            ("fused".to_string(), self.fused),
            ("gaps".to_string(), self.gaps),
            ("nonce".to_string(), self.nonce),
        ];
        out.extend(self.categories.iter().map(|(k, v)| (format!("category.{k}"), *v)));
        out.extend(self.functions.iter().map(|(k, v)| (format!("function.{k}"), *v)));
        out
    }

    /// `key<TAB>value` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k}\t{v}");
        }
        out
    }

    /// Human-readable table with aligned columns.
    pub fn to_table(&self) -> String {
        let entries = self.entries();
        let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let vwidth = entries.iter().map(|(_, v)| v.to_string().len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in entries {
            let _ = writeln!(out, "{k:<width$}  {v:>vwidth$}");
        }
        out
    }
}
