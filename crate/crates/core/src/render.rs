//! LaTeX `forest` output.
//!
//! A fused constituent is laid out under its deeper parent, which is shifted
//! right; the fused constituent's own edge is suppressed and replaced by two
//! drawn edges, one from each parent.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::grammar::{ConstituentGraph, NodeId, NodePath, RecoveryError};
use crate::text::{TokenRecord, GAP_MARKER};

/// Options that shape the output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderOptions {
    /// Replace subtrees rooted at this depth (root = 0) with a roofed yield.
    pub collapse_depth: Option<usize>,
    /// Wrap the tree in a compilable standalone document.
    pub preamble: bool,
    /// Shift in em for specific deeper parents, keyed by their path.
    pub shift_overrides: BTreeMap<NodePath, f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("cannot render a tree with an unrecoverable fused function: {0}")]
    Recovery(RecoveryError),
}

/// Drawing instructions for one fused constituent.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedPlacement {
    pub node: NodeId,
    /// The parent the constituent is written under.
    pub deeper_parent: NodeId,
    /// Horizontal shift applied to `deeper_parent`.
    pub shift_em: f64,
    pub suppress_edge: bool,
    /// Relative anchors of the two parents, fused parent first.
    pub anchors: [String; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderPlan {
    /// Node label per node id.
    pub labels: Vec<String>,
    /// Word shown below each leaf, if any.
    pub words: Vec<Option<String>>,
    pub fused: Vec<FusedPlacement>,
}

impl RenderPlan {
    fn placement_of(&self, id: NodeId) -> Option<&FusedPlacement> {
        self.fused.iter().find(|f| f.node == id)
    }

    fn shift_of(&self, id: NodeId) -> Option<f64> {
        self.fused
            .iter()
            .filter(|f| f.deeper_parent == id)
            .map(|f| f.shift_em)
            .reduce(f64::max)
    }
}

/// Escape text for use inside a forest node.
pub fn escape_latex(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '{' => out.push_str("\\textbraceleft{}"),
            '}' => out.push_str("\\textbraceright{}"),
            '[' => out.push_str("\\lbrack{}"),
            ']' => out.push_str("\\rbrack{}"),
            '#' | '$' | '%' | '&' | '_' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            _ => out.push(c),
        }
    }
    out
}

/// `Obj_dir` becomes `Obj\textsubscript{dir}`.
fn subscripted(token: &str) -> String {
    match token.split_once('_') {
        Some((base, sub)) if !base.is_empty() && !sub.is_empty() => format!(
            "{}\\textsubscript{{{}}}",
            escape_latex(base),
            escape_latex(sub)
        ),
        _ => escape_latex(token),
    }
}

fn label(graph: &ConstituentGraph, id: NodeId) -> String {
    let node = graph.node(id);
    let mut category = subscripted(&node.category_token);
    if let Some(var) = &node.coindex_var {
        let _ = write!(category, "\\textsubscript{{{}}}", escape_latex(var));
    }
    match &node.function_token {
        None => category,
        Some(f) => format!("\\Node{{{}}}{{{category}}}", subscripted(f)),
    }
}

fn leaf_word(record: &TokenRecord) -> Option<String> {
    if record.is_gap {
        return Some(GAP_MARKER.to_string());
    }
    match (record.surface.as_deref(), record.corrected.as_deref()) {
        (Some(t), Some("")) => Some(format!("{} ($\\emptyset$)", escape_latex(t))),
        (Some(t), Some(c)) => Some(format!("{} ({})", escape_latex(t), escape_latex(c))),
        (Some(t), None) => Some(escape_latex(t)),
        (None, Some(c)) if !c.is_empty() => Some(format!("({})", escape_latex(c))),
        _ => None,
    }
}

/// Yield of a subtree as shown under a roof.
fn roof_yield(graph: &ConstituentGraph, id: NodeId) -> String {
    graph
        .subtree(id)
        .into_iter()
        .filter(|&n| graph.node(n).is_leaf())
        .filter_map(|n| {
            let r = TokenRecord::from_constituent(graph.node(n));
            if r.is_gap {
                Some(GAP_MARKER.to_string())
            } else {
                r.surface
                    .or(r.corrected.filter(|c| !c.is_empty()))
                    .map(|w| escape_latex(&w))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn rendered(graph: &ConstituentGraph, id: NodeId, options: &RenderOptions) -> bool {
    options
        .collapse_depth
        .is_none_or(|d| graph.node(id).depth <= d)
}

/// Compute labels and fused placements.
pub fn plan_render(graph: &ConstituentGraph, options: &RenderOptions) -> Result<RenderPlan, RenderError> {
    if let Some(e) = graph.recovery_failures().first() {
        return Err(RenderError::Recovery(e.clone()));
    }
    let labels = graph.preorder().map(|id| label(graph, id)).collect();
    let words = graph
        .preorder()
        .map(|id| {
            let node = graph.node(id);
            if node.is_leaf() {
                leaf_word(&TokenRecord::from_constituent(node))
            } else {
                None
            }
        })
        .collect();
    let mut fused = Vec::new();
    for node in graph.fused_nodes() {
        if !rendered(graph, node.id, options) {
            continue;
        }
        let edge = node.fused_parent.expect("fused node");
        let deeper = node.parent.expect("fused node has a parent");
        let distance = node.depth - graph.node(edge.parent).depth;
        let default_shift = if graph.children(deeper).len() > 1 { 2.0 } else { 1.0 };
        let shift_em = options
            .shift_overrides
            .get(&graph.node(deeper).path)
            .copied()
            .unwrap_or(default_shift);
        fused.push(FusedPlacement {
            node: node.id,
            deeper_parent: deeper,
            shift_em,
            suppress_edge: true,
            anchors: [format!("!{}", "u".repeat(distance)), "!u".to_string()],
        });
    }
    Ok(RenderPlan { labels, words, fused })
}

/// Render the tree as a `forest` environment.
pub fn render_forest(graph: &ConstituentGraph, options: &RenderOptions) -> Result<String, RenderError> {
    let plan = plan_render(graph, options)?;
    let mut out = String::new();
    if options.preamble {
        out.push_str(PREAMBLE);
    }
    out.push_str("\\begin{forest}\nwhere n children=0{font=\\itshape, tier=word}{},\n");
    write_node(graph, &plan, options, graph.root(), 0, &mut out);
    out.push_str("\\end{forest}\n");
    if options.preamble {
        out.push_str("\\end{document}\n");
    }
    Ok(out)
}

fn write_node(
    graph: &ConstituentGraph,
    plan: &RenderPlan,
    options: &RenderOptions,
    id: NodeId,
    indent: usize,
    out: &mut String,
) {
    let pad = "    ".repeat(indent);
    let node = graph.node(id);
    let _ = write!(out, "{pad}[{}", plan.labels[id.0]);
    if let Some(shift) = plan.shift_of(id) {
        let _ = write!(out, ", before drawing tree={{x+={shift}em}}");
    }
    let placement = plan.placement_of(id);
    if placement.is_some_and(|p| p.suppress_edge) {
        out.push_str(", no edge");
    }
    let collapse = options.collapse_depth == Some(node.depth) && !node.is_leaf();
    if collapse {
        let _ = write!(out, "[{}, roof]]", brace_if_needed(&roof_yield(graph, id)));
    } else if node.is_leaf() {
        if let Some(word) = &plan.words[id.0] {
            let _ = write!(out, "[{}]", brace_if_needed(word));
        }
        out.push(']');
    } else {
        out.push('\n');
        for &child in graph.children(id) {
            write_node(graph, plan, options, child, indent + 1, out);
        }
        let _ = write!(out, "{pad}]");
    }
    if let Some(p) = placement {
        let _ = write!(
            out,
            " {{ \\draw[-] ({}.south) -- (); \\draw[-] ({}.south) -- (); }}",
            p.anchors[0], p.anchors[1]
        );
    }
    out.push('\n');
}

/// Escaped text, braced when forest would otherwise split it on `,` or `=`.
fn brace_if_needed(escaped: &str) -> String {
    if escaped.contains(',') || escaped.contains('=') {
        format!("{{{escaped}}}")
    } else {
        escaped.to_string()
    }
}

const PREAMBLE: &str = r"\documentclass[border=5pt]{standalone}
\usepackage{forest}
\forestset{default preamble={for tree={align=center, parent anchor=south, child anchor=north}}}
\newcommand{\Node}[2]{\small\textsf{#1:}\\#2}
\newcommand{\Head}[1]{\Node{Head}{#1}}
\newcommand{\Mod}[1]{\Node{Mod}{#1}}
\newcommand{\Obj}[1]{\Node{Obj}{#1}}
\newcommand{\Subj}[1]{\Node{Subj}{#1}}
\newcommand{\Comp}[1]{\Node{Comp}{#1}}
\newcommand{\Det}[1]{\Node{Det}{#1}}
\newcommand{\PredComp}[1]{\Node{PredComp}{#1}}
\newcommand{\Sup}[1]{\Node{Supplement}{#1}}
\newcommand{\Mk}[1]{\Node{Marker}{#1}}
\begin{document}
";

/// Count of `[` minus `]` and `{` minus `}`, ignoring escaped forms.
pub fn bracket_balance(s: &str) -> (i64, i64) {
    let (mut square, mut curly) = (0i64, 0i64);
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                chars.next_if(|n| matches!(n, '[' | ']' | '{' | '}' | '\\'));
            }
            '[' => square += 1,
            ']' => square -= 1,
            '{' => curly += 1,
            '}' => curly -= 1,
            _ => {}
        }
    }
    (square, curly)
}
