//! Sentence and text reconstruction from terminals.

use crate::format::{FeatureKey, SourceTree};
use crate::grammar::{Constituent, ConstituentGraph, NodePath};
use crate::validate::{Diagnostic, RuleCode};

/// Written form of a gap in the `sent` line.
pub const GAP_MARKER: &str = "--";

/// One terminal with its token-level features.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenRecord {
    pub surface: Option<String>,
    pub corrected: Option<String>,
    pub lemma: Option<String>,
    /// `:p` values written before `:t`.
    pub pre_punct: Vec<String>,
    /// `:p` values written after `:t`, or all of them when there is no `:t`.
    pub post_punct: Vec<String>,
    pub subtokens: Vec<String>,
    pub is_gap: bool,
}

impl TokenRecord {
    pub fn from_constituent(node: &Constituent) -> Self {
        let mut record = TokenRecord {
            is_gap: node.is_gap(),
            ..TokenRecord::default()
        };
        for feature in &node.features {
            let value = feature.value.clone();
            match feature.key {
                FeatureKey::T => record.surface = Some(value),
                FeatureKey::Correct => record.corrected = Some(value),
                FeatureKey::L => record.lemma = Some(value),
                FeatureKey::Subt => record.subtokens.push(value),
                FeatureKey::P if record.surface.is_none() => record.pre_punct.push(value),
                FeatureKey::P => record.post_punct.push(value),
                FeatureKey::Note => {}
            }
        }
        if record.surface.is_none() {
            record.post_punct = std::mem::take(&mut record.pre_punct);
        }
        record
    }

    /// A word that was omitted in the original and supplied by annotators.
    pub fn is_inserted(&self) -> bool {
        self.surface.is_none() && self.corrected.as_deref().is_some_and(|c| !c.is_empty())
    }

    /// An extra word the corrected sentence leaves out.
    pub fn is_extra(&self) -> bool {
        self.corrected.as_deref() == Some("")
    }

    /// Token shown in the `sent` line.
    fn sent_token(&self) -> Option<&str> {
        if self.is_gap {
            return Some(GAP_MARKER);
        }
        self.surface
            .as_deref()
            .or(self.corrected.as_deref().filter(|c| !c.is_empty()))
    }

    fn corrected_token(&self) -> Option<&str> {
        if self.is_gap {
            return None;
        }
        match self.corrected.as_deref() {
            Some("") => None,
            Some(c) => Some(c),
            None => self.surface.as_deref(),
        }
    }
}

/// Token records for every terminal, in surface order.
pub fn token_records(graph: &ConstituentGraph) -> Vec<TokenRecord> {
    graph
        .terminals()
        .iter()
        .map(|&id| TokenRecord::from_constituent(graph.node(id)))
        .collect()
}

/// The terminal sequence: tokens space-joined, `--` for gaps, inserted
/// words in their corrected form.
pub fn reconstruct_sent(graph: &ConstituentGraph) -> String {
    let records = token_records(graph);
    records
        .iter()
        .filter_map(TokenRecord::sent_token)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Surface text rebuilt from tokens and punctuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructedText {
    pub text: String,
    /// Always false: the tree keeps no record of original capitalization
    /// beyond what the tokens happen to carry.
    pub case_recoverable: bool,
}

pub fn reconstruct_text(graph: &ConstituentGraph) -> ReconstructedText {
    let mut out = String::new();
    for record in token_records(graph) {
        if record.is_gap {
            continue;
        }
        for p in &record.pre_punct {
            out.push_str(p);
        }
        let word = record
            .surface
            .as_deref()
            .or(record.corrected.as_deref().filter(|c| !c.is_empty()));
        if let Some(word) = word {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(word);
        }
        for p in &record.post_punct {
            out.push_str(p);
        }
    }
    ReconstructedText {
        text: out,
        case_recoverable: false,
    }
}

/// The sentence with corrections applied and gaps removed.
pub fn corrected_sentence(graph: &ConstituentGraph) -> String {
    token_records(graph)
        .iter()
        .filter_map(TokenRecord::corrected_token)
        .collect::<Vec<_>>()
        .join(" ")
}

fn normalize_sent(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn normalize_text(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Compare the `sent` and `text` headers with the reconstructions.
pub fn check_headers(tree: &SourceTree, graph: &ConstituentGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Some(sent) = tree.header("sent") {
        let rebuilt = reconstruct_sent(graph);
        if normalize_sent(sent) != normalize_sent(&rebuilt) {
            out.push(Diagnostic::new(
                RuleCode::H1,
                NodePath::root(),
                tree.span,
                format!("sent header `{sent}` does not match terminals `{rebuilt}`"),
            ));
        }
    }
    if let Some(text) = tree.header("text") {
        let rebuilt = reconstruct_text(graph).text;
        if normalize_text(text) != normalize_text(&rebuilt) {
            out.push(Diagnostic::new(
                RuleCode::H2,
                NodePath::root(),
                tree.span,
                format!("text header `{text}` does not match tokens `{rebuilt}`"),
            ));
        }
    }
    out
}
