//! Well-formedness checks over a [`ConstituentGraph`].
//!
//! Hard constraints are reported as errors and tendencies as warnings. The
//! rule catalog lives in `docs/RULES.md`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::format::{FeatureKey, Span};
use crate::grammar::{
    Category, CategoryBase, ConstituentGraph, Function, FunctionBase, NodeId, NodePath,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleCode {
    /// Lexical node must head its projection.
    R1,
    /// Vacuous lexical layering.
    R2,
    /// VP level composition.
    R3,
    /// NP head.
    R4,
    /// Clause head.
    R5,
    /// Binarity of headed phrases other than VP.
    R6,
    /// Vacuous unary phrase.
    R7,
    /// Gap coindexation.
    R8,
    /// Variable without a gap.
    R9,
    /// Variable on more than one overt node.
    R10,
    /// Coindexation at the lexical level.
    R11,
    /// Gap without an overt sister.
    R12,
    /// Fused function placement.
    R13,
    /// Flat structures and gap leaves.
    R14,
    /// Space-containing token outside the complex lexeme list.
    R15,
    /// Category not in the inventory.
    R16,
    /// Function not in the inventory.
    R17,
    /// Empty feature value other than `:correct`.
    R18,
    /// Nonce constituent whose branching is not checked.
    R19,
    /// `# sent` header disagrees with the terminals.
    H1,
    /// `# text` header disagrees with the tokens and punctuation.
    H2,
}

impl RuleCode {
    pub const ALL: [RuleCode; 21] = [
        RuleCode::R1,
        RuleCode::R2,
        RuleCode::R3,
        RuleCode::R4,
        RuleCode::R5,
        RuleCode::R6,
        RuleCode::R7,
        RuleCode::R8,
        RuleCode::R9,
        RuleCode::R10,
        RuleCode::R11,
        RuleCode::R12,
        RuleCode::R13,
        RuleCode::R14,
        RuleCode::R15,
        RuleCode::R16,
        RuleCode::R17,
        RuleCode::R18,
        RuleCode::R19,
        RuleCode::H1,
        RuleCode::H2,
    ];

    pub fn as_str(self) -> &'static str {
        use RuleCode::*;
        match self {
            R1 => "R1",
            R2 => "R2",
            R3 => "R3",
            R4 => "R4",
            R5 => "R5",
            R6 => "R6",
            R7 => "R7",
            R8 => "R8",
            R9 => "R9",
            R10 => "R10",
            R11 => "R11",
            R12 => "R12",
            R13 => "R13",
            R14 => "R14",
            R15 => "R15",
            R16 => "R16",
            R17 => "R17",
            R18 => "R18",
            R19 => "R19",
            H1 => "H1",
            H2 => "H2",
        }
    }

    pub fn severity(self) -> Severity {
        use RuleCode::*;
        match self {
            R11 | R12 | R15 | R18 | H2 => Severity::Warning,
            R19 => Severity::Info,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: RuleCode,
    pub severity: Severity,
    pub path: NodePath,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: RuleCode, path: NodePath, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            path,
            span,
            message: message.into(),
        }
    }

    pub fn at(graph: &ConstituentGraph, id: NodeId, code: RuleCode, message: impl Into<String>) -> Self {
        let node = graph.node(id);
        Diagnostic::new(code, node.path.clone(), node.span, message)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `FILE:LINE:COL: SEVERITY CODE path message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}:{}:{}: {} {} {} {}",
            file,
            self.span.start.line,
            self.span.start.column,
            self.severity,
            self.code,
            self.path,
            self.message
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Check space-containing tokens against the complex lexeme list.
    pub strict_lexicon: bool,
}

/// Lexemes written with a space that are single lexical items.
pub const COMPLEX_LEXEMES: &[&str] = &[
    // determinatives
    "a certain",
    "a few",
    "a great many",
    "a little",
    "many a",
    "no one",
    // prepositions
    "as for",
    "as from",
    "as if",
    "as of",
    "as per",
    "as though",
    "as to",
    "in case",
    "in charge",
    "in front",
    "in order",
    "in spite",
    "in view",
    "no matter",
    "on board",
    "on purpose",
    "on to",
    "on top",
    "so as",
    "à la",
    "as long as",
    "as soon as",
    // subordinators
    "whether or not",
    "whether or no",
    // coordinators
    "as well as",
    "rather than",
];

pub fn is_complex_lexeme(token: &str) -> bool {
    let normalized = token.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    COMPLEX_LEXEMES.contains(&normalized.as_str())
}

/// Run every structural check. The result is sorted by node path, then code.
pub fn validate(graph: &ConstituentGraph, options: &ValidateOptions) -> Vec<Diagnostic> {
    let mut v = Validator {
        graph,
        out: Vec::new(),
    };
    v.inventory();
    v.projection();
    v.layering();
    v.vp_levels();
    v.heads();
    v.binarity();
    v.vacuous_unary();
    v.coindexation();
    v.gap_sisters();
    v.fusion();
    v.flat();
    if options.strict_lexicon {
        v.lexemes();
    }
    v.nonce_regions();
    let mut out = v.out;
    out.sort_by(|a, b| a.path.cmp(&b.path).then(a.code.cmp(&b.code)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VpLevel {
    Modifier,
    Extraposed,
    Marker,
    Complements,
}

struct Validator<'g> {
    graph: &'g ConstituentGraph,
    out: Vec<Diagnostic>,
}

impl<'g> Validator<'g> {
    fn emit(&mut self, id: NodeId, code: RuleCode, message: impl Into<String>) {
        self.out.push(Diagnostic::at(self.graph, id, code, message));
    }

    fn cat(&self, id: NodeId) -> &'g Category {
        &self.graph.node(id).category
    }

    fn label(&self, id: NodeId) -> &'g str {
        &self.graph.node(id).category_token
    }

    /// Nodes whose own branching is outside the checked rules: nonce
    /// categories, and parents of a child with a nonce function.
    fn is_nonce_region(&self, id: NodeId) -> bool {
        self.cat(id).is_nonce()
            || self
                .graph
                .children(id)
                .iter()
                .any(|&c| self.graph.node(c).function.as_ref().is_some_and(Function::is_nonce))
    }

    /// Inside a morphologically derived (Compounding) expression.
    fn in_compounding(&self, id: NodeId) -> bool {
        std::iter::once(id)
            .chain(self.graph.ancestors(id))
            .any(|n| self.graph.node(n).has_function(FunctionBase::Compounding))
    }

    fn inventory(&mut self) {
        for node in self.graph.nodes() {
            for part in node.category.unknown_parts() {
                self.emit(node.id, RuleCode::R16, format!("unknown category `{part}`"));
            }
            if let Some(function) = &node.function {
                for part in function.unknown_parts() {
                    self.emit(node.id, RuleCode::R17, format!("unknown function `{part}`"));
                }
            }
            for feature in &node.features {
                if feature.value.is_empty() && feature.key != FeatureKey::Correct {
                    self.emit(
                        node.id,
                        RuleCode::R18,
                        format!("empty value for :{}", feature.key),
                    );
                }
            }
        }
    }

    fn projection(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            let Some(projection) = node.category.base().and_then(CategoryBase::projection) else {
                continue;
            };
            if node.category.is_aux() && node.has_function(FunctionBase::Prenucleus) {
                continue;
            }
            if node.has_function(FunctionBase::Flat) || self.in_compounding(node.id) {
                continue;
            }
            let Some(parent) = node.parent else {
                self.emit(
                    node.id,
                    RuleCode::R1,
                    format!("{} at the root does not project a {}", node.category_token, projection.as_str()),
                );
                continue;
            };
            let pcat = self.cat(parent);
            if pcat.is_nonce() || pcat.is_lexical() {
                continue;
            }
            let heads_projection = node.role() == Some(FunctionBase::Head) && pcat.is(projection);
            if !heads_projection {
                self.emit(
                    node.id,
                    RuleCode::R1,
                    format!(
                        "{} must head its own {} projection, found {} of {}",
                        node.category_token,
                        projection.as_str(),
                        node.function_token.as_deref().unwrap_or("?"),
                        self.label(parent)
                    ),
                );
            }
        }
    }

    fn layering(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            if !node.category.is_lexical() {
                continue;
            }
            let Some(parent) = node.parent else { continue };
            let pnode = g.node(parent);
            let Some(grand) = pnode.parent else { continue };
            let gnode = g.node(grand);
            if pnode.role() == Some(FunctionBase::Head)
                && pnode.category == gnode.category
                && !gnode.has_function(FunctionBase::Coordinate)
                && !g
                    .children(grand)
                    .iter()
                    .any(|&c| g.node(c).has_function(FunctionBase::Marker))
                && g.dependents(parent).len() == 1
            {
                self.emit(
                    node.id,
                    RuleCode::R2,
                    format!(
                        "{} has a vacuous {} layer above it",
                        node.category_token, pnode.category_token
                    ),
                );
            }
        }
    }

    fn vp_level(&self, id: NodeId) -> Result<Option<VpLevel>, String> {
        let g = self.graph;
        let deps = g.dependents(id);
        if deps.len() <= 1 {
            return Ok(None);
        }
        let (heads, others): (Vec<NodeId>, Vec<NodeId>) = deps
            .into_iter()
            .partition(|&c| g.node(c).role() == Some(FunctionBase::Head));
        if heads.len() != 1 {
            return Err(format!("VP level has {} Heads", heads.len()));
        }
        let roles: Vec<Option<FunctionBase>> = others.iter().map(|&c| g.node(c).role()).collect();
        let single = |pred: fn(FunctionBase) -> bool| roles.len() == 1 && roles[0].is_some_and(pred);
        if single(|f| matches!(f, FunctionBase::Mod | FunctionBase::CompInd)) {
            Ok(Some(VpLevel::Modifier))
        } else if single(|f| f.is_extraposed() || f == FunctionBase::Postnucleus) {
            Ok(Some(VpLevel::Extraposed))
        } else if single(|f| f == FunctionBase::Marker) {
            Ok(Some(VpLevel::Marker))
        } else if roles
            .iter()
            .all(|r| r.is_some_and(FunctionBase::is_internal_complement))
        {
            Ok(Some(VpLevel::Complements))
        } else {
            let names: Vec<&str> = others
                .iter()
                .map(|&c| g.node(c).function_token.as_deref().unwrap_or("?"))
                .collect();
            Err(format!(
                "VP level mixes dependents [{}]; expected one Mod, one extraposed complement, or internal complements only",
                names.join(", ")
            ))
        }
    }

    fn vp_levels(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            if !node.category.is(CategoryBase::VP) || self.is_nonce_region(node.id) {
                continue;
            }
            match self.vp_level(node.id) {
                Err(msg) => self.emit(node.id, RuleCode::R3, msg),
                Ok(Some(VpLevel::Complements)) => {
                    let head = g.head_child(node.id).filter(|&h| {
                        g.node(h).category.is(CategoryBase::VP) && !self.is_nonce_region(h)
                    });
                    if let Some(h) = head {
                        if self.vp_level(h) == Ok(Some(VpLevel::Complements)) {
                            self.emit(
                                node.id,
                                RuleCode::R3,
                                "two consecutive VP levels of internal complements",
                            );
                        }
                    }
                }
                Ok(_) => {}
            }
        }
    }

    /// `head` has one of `allowed` categories, is a gap, or is a Coordination
    /// whose coordinates all qualify.
    fn head_in(&self, head: NodeId, allowed: &[CategoryBase]) -> bool {
        let g = self.graph;
        let cat = self.cat(head);
        if cat.is_gap() || cat.is_nonce() || allowed.iter().any(|&b| cat.is(b)) {
            return true;
        }
        if cat.is(CategoryBase::Coordination) {
            let coords: Vec<NodeId> = g
                .children(head)
                .iter()
                .copied()
                .filter(|&c| g.node(c).has_function(FunctionBase::Coordinate))
                .collect();
            return !coords.is_empty() && coords.into_iter().all(|c| self.head_in(c, allowed));
        }
        false
    }

    fn heads(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            let (code, allowed, what): (RuleCode, &[CategoryBase], &str) =
                if node.category.is(CategoryBase::NP) {
                    (RuleCode::R4, &[CategoryBase::Nom, CategoryBase::NP], "a Nom or NP")
                } else if node.category.is(CategoryBase::Clause) {
                    (
                        RuleCode::R5,
                        &[CategoryBase::VP, CategoryBase::Clause],
                        "a VP, Clause or Clause_rel",
                    )
                } else {
                    continue;
                };
            match g.head_child(node.id) {
                None => self.emit(
                    node.id,
                    code,
                    format!("{} has no Head; it must be headed by {what}", node.category_token),
                ),
                Some(h) if !self.head_in(h, allowed) => self.emit(
                    node.id,
                    code,
                    format!(
                        "{} is headed by {}; it must be headed by {what}",
                        node.category_token,
                        self.label(h)
                    ),
                ),
                Some(_) => {}
            }
        }
    }

    fn binarity(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            let cat = &node.category;
            if !cat.is_phrasal()
                || cat.is_nonce()
                || cat.is(CategoryBase::VP)
                || self.is_nonce_region(node.id)
                || g.head_child(node.id).is_none()
            {
                continue;
            }
            let n = g.dependents(node.id).len();
            if n > 2 {
                self.emit(
                    node.id,
                    RuleCode::R6,
                    format!("{} has {n} non-supplement children; at most 2 allowed", node.category_token),
                );
            }
        }
    }

    /// Nodes on the primary path between a fused constituent's recovered
    /// parent and its deeper parent, both included.
    fn fused_spine(&self) -> HashSet<NodeId> {
        let g = self.graph;
        let mut spine = HashSet::new();
        for node in g.fused_nodes() {
            let top = node.fused_parent.expect("fused node").parent;
            for n in g.ancestors(node.id) {
                spine.insert(n);
                if n == top {
                    break;
                }
            }
        }
        spine
    }

    fn vacuous_unary(&mut self) {
        let g = self.graph;
        let spine = self.fused_spine();
        for node in g.nodes() {
            if !node.category.is_phrasal()
                || node.category.is_nonce()
                || spine.contains(&node.id)
                || self.is_nonce_region(node.id)
            {
                continue;
            }
            let deps = g.dependents(node.id);
            if let [only] = deps[..] {
                let child = g.node(only);
                if child.role() == Some(FunctionBase::Head) && child.category == node.category {
                    self.emit(
                        node.id,
                        RuleCode::R7,
                        format!("unary {} headed by {}", node.category_token, child.category_token),
                    );
                }
            }
        }
    }

    fn coindexation(&mut self) {
        let g = self.graph;
        // var -> (overt nodes, gaps), in document order
        let mut vars: BTreeMap<&str, (Vec<NodeId>, Vec<NodeId>)> = BTreeMap::new();
        for node in g.nodes() {
            if node.is_gap() && node.coindex_var.is_none() {
                self.emit(node.id, RuleCode::R8, "gap is not coindexed");
            }
            if let Some(var) = &node.coindex_var {
                let entry = vars.entry(var.as_str()).or_default();
                if node.is_gap() {
                    entry.1.push(node.id);
                } else {
                    entry.0.push(node.id);
                }
            }
        }
        for (var, (overt, gaps)) in &vars {
            if overt.len() != 1 {
                for &gap in gaps {
                    self.emit(
                        gap,
                        RuleCode::R8,
                        format!("gap {var} is coindexed to {} overt elements", overt.len()),
                    );
                }
            }
            if gaps.is_empty() {
                for &o in overt {
                    self.emit(o, RuleCode::R9, format!("variable {var} applies to no gap"));
                }
            }
            for &o in overt.iter().skip(1) {
                self.emit(
                    o,
                    RuleCode::R10,
                    format!("variable {var} already marks {}", g.node(overt[0]).path),
                );
            }
            for &o in overt {
                if self.cat(o).is_lexical() && !self.lexical_coindex_allowed(o, var) {
                    self.emit(
                        o,
                        RuleCode::R11,
                        format!("{var} should be on a phrasal constituent, not {}", self.label(o)),
                    );
                }
            }
        }
    }

    fn lexical_coindex_allowed(&self, id: NodeId, var: &str) -> bool {
        let g = self.graph;
        let node = g.node(id);
        if node.category.is_aux() && node.has_function(FunctionBase::Prenucleus) {
            return true;
        }
        if !node.category.is(CategoryBase::N) {
            return false;
        }
        let Some(parent) = node.parent else { return false };
        g.children(parent).iter().any(|&s| {
            s != id
                && matches!(g.node(s).role(), Some(FunctionBase::Mod | FunctionBase::CompInd))
                && g.subtree(s).into_iter().any(|d| {
                    let dn = g.node(d);
                    dn.is_gap() && dn.coindex_var.as_deref() == Some(var)
                })
        })
    }

    fn gap_sisters(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            if !node.is_gap() {
                continue;
            }
            let Some(parent) = node.parent else { continue };
            let has_overt_sister = g.children(parent).iter().any(|&s| {
                s != node.id && !g.node(s).is_supplement() && !g.node(s).is_gap()
            });
            if !has_overt_sister {
                self.emit(node.id, RuleCode::R12, "gap has no non-gap sister");
            }
        }
    }

    fn fusion(&mut self) {
        for failure in self.graph.recovery_failures() {
            self.emit(failure.node, RuleCode::R13, failure.to_string());
        }
    }

    fn flat(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            if node.is_gap() {
                if !node.is_leaf() {
                    self.emit(node.id, RuleCode::R14, "GAP must be a leaf");
                }
                if node.feature(FeatureKey::T).is_some() {
                    self.emit(node.id, RuleCode::R14, "GAP must not carry a :t token");
                }
                continue;
            }
            if node.has_function(FunctionBase::Flat) {
                let parent = node.parent.expect("function implies parent");
                let pcat = self.cat(parent);
                let ok = node.category.is_lexical()
                    && pcat.is_lexical()
                    && pcat.base() == node.category.base();
                if !ok {
                    self.emit(
                        node.id,
                        RuleCode::R14,
                        format!(
                            "Flat {} must be lexical under a lexical parent of the same category, found {}",
                            node.category_token,
                            self.label(parent)
                        ),
                    );
                }
            } else if let Some(parent) = node.parent {
                if self.cat(parent).is_lexical() {
                    self.emit(
                        node.id,
                        RuleCode::R14,
                        format!(
                            "child of lexical {} must be in Flat function",
                            self.label(parent)
                        ),
                    );
                }
            }
        }
    }

    fn lexemes(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            if let Some(t) = node.feature(FeatureKey::T) {
                if t.chars().any(char::is_whitespace) && !is_complex_lexeme(t) {
                    self.emit(
                        node.id,
                        RuleCode::R15,
                        format!("`{t}` is not a known complex lexeme"),
                    );
                }
            }
        }
    }

    fn nonce_regions(&mut self) {
        let g = self.graph;
        for node in g.nodes() {
            if self.is_nonce_region(node.id) {
                self.emit(
                    node.id,
                    RuleCode::R19,
                    format!("unchecked nonce region at {}", node.category_token),
                );
            }
        }
    }
}
