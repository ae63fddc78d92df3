//! Reading, checking and drawing trees in the `.cgel` treebank format.

pub mod format;
pub mod grammar;
pub mod render;
pub mod stats;
pub mod text;
pub mod validate;

pub use format::{parse_corpus, parse_corpus_bytes, parse_node, serialize, serialize_corpus, ParseError, SourceTree, Style};
pub use grammar::{build_graph, ConstituentGraph, NodeId, NodePath, RecoveryError};
pub use render::{plan_render, render_forest, RenderOptions, RenderPlan};
pub use text::{check_headers, corrected_sentence, reconstruct_sent, reconstruct_text};
pub use validate::{validate, Diagnostic, RuleCode, Severity, ValidateOptions};
