//! Category and function inventories, and the constituent graph with fused
//! functions recovered.
//!
//! The raw format writes a fused constituent (e.g. a `Det-Head` DP) only under
//! its deeper parent. [`ConstituentGraph`] adds the missing second incoming
//! edge by walking up from the grandparent to the nearest ancestor of an
//! acceptable category.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::format::{Feature, FeatureKey, RawNode, SourceTree, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CategoryBase {
    N,
    V,
    Adj,
    Adv,
    P,
    D,
    Int,
    Sdr,
    Coordinator,
    Nom,
    NP,
    VP,
    Clause,
    AdjP,
    AdvP,
    PP,
    DP,
    IntP,
    Coordination,
    Gap,
}

impl CategoryBase {
    pub const ALL: [CategoryBase; 20] = [
        CategoryBase::N,
        CategoryBase::V,
        CategoryBase::Adj,
        CategoryBase::Adv,
        CategoryBase::P,
        CategoryBase::D,
        CategoryBase::Int,
        CategoryBase::Sdr,
        CategoryBase::Coordinator,
        CategoryBase::Nom,
        CategoryBase::NP,
        CategoryBase::VP,
        CategoryBase::Clause,
        CategoryBase::AdjP,
        CategoryBase::AdvP,
        CategoryBase::PP,
        CategoryBase::DP,
        CategoryBase::IntP,
        CategoryBase::Coordination,
        CategoryBase::Gap,
    ];

    pub fn as_str(self) -> &'static str {
        use CategoryBase::*;
        match self {
            N => "N",
            V => "V",
            Adj => "Adj",
            Adv => "Adv",
            P => "P",
            D => "D",
            Int => "Int",
            Sdr => "Sdr",
            Coordinator => "Coordinator",
            Nom => "Nom",
            NP => "NP",
            VP => "VP",
            Clause => "Clause",
            AdjP => "AdjP",
            AdvP => "AdvP",
            PP => "PP",
            DP => "DP",
            IntP => "IntP",
            Coordination => "Coordination",
            Gap => "GAP",
        }
    }

    fn from_name(name: &str) -> Option<CategoryBase> {
        CategoryBase::ALL.into_iter().find(|b| b.as_str() == name)
    }

    pub fn is_lexical(self) -> bool {
        use CategoryBase::*;
        matches!(self, N | V | Adj | Adv | P | D | Int | Sdr | Coordinator)
    }

    pub fn is_phrasal(self) -> bool {
        !self.is_lexical() && self != CategoryBase::Gap
    }

    /// The phrasal category a lexical category heads.
    ///
    /// Subordinators and coordinators project nothing.
    pub fn projection(self) -> Option<CategoryBase> {
        use CategoryBase::*;
        match self {
            N => Some(Nom),
            V => Some(VP),
            Adj => Some(AdjP),
            Adv => Some(AdvP),
            P => Some(PP),
            D => Some(DP),
            Int => Some(IntP),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subcat {
    /// Pronoun, on N.
    Pro,
    /// Auxiliary, on V.
    Aux,
    /// Relative, on Clause.
    Rel,
    /// Stranded, on PP.
    Strand,
}

impl Subcat {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcat::Pro => "pro",
            Subcat::Aux => "aux",
            Subcat::Rel => "rel",
            Subcat::Strand => "strand",
        }
    }

    fn host(self) -> CategoryBase {
        match self {
            Subcat::Pro => CategoryBase::N,
            Subcat::Aux => CategoryBase::V,
            Subcat::Rel => CategoryBase::Clause,
            Subcat::Strand => CategoryBase::PP,
        }
    }

    fn from_name(name: &str) -> Option<Subcat> {
        [Subcat::Pro, Subcat::Aux, Subcat::Rel, Subcat::Strand]
            .into_iter()
            .find(|s| s.as_str() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Category {
    Simple {
        base: CategoryBase,
        subcat: Option<Subcat>,
    },
    /// `+`-joined categories of a non-headed constituent, e.g. `NP+PP`.
    Nonce(Vec<Category>),
    Unknown(String),
}

impl Category {
    pub fn simple(base: CategoryBase) -> Self {
        Category::Simple { base, subcat: None }
    }

    pub fn base(&self) -> Option<CategoryBase> {
        match self {
            Category::Simple { base, .. } => Some(*base),
            _ => None,
        }
    }

    pub fn subcat(&self) -> Option<Subcat> {
        match self {
            Category::Simple { subcat, .. } => *subcat,
            _ => None,
        }
    }

    pub fn is(&self, base: CategoryBase) -> bool {
        self.base() == Some(base)
    }

    pub fn is_gap(&self) -> bool {
        self.is(CategoryBase::Gap)
    }

    pub fn is_lexical(&self) -> bool {
        self.base().is_some_and(CategoryBase::is_lexical)
    }

    /// Phrasal categories; nonce composites count as phrasal.
    pub fn is_phrasal(&self) -> bool {
        match self {
            Category::Simple { base, .. } => base.is_phrasal(),
            Category::Nonce(_) => true,
            Category::Unknown(_) => false,
        }
    }

    pub fn is_nonce(&self) -> bool {
        matches!(self, Category::Nonce(_))
    }

    pub fn is_aux(&self) -> bool {
        self.subcat() == Some(Subcat::Aux)
    }

    /// Canonical raw-format spelling.
    pub fn token(&self) -> String {
        match self {
            Category::Simple { base, subcat: None } => base.as_str().to_string(),
            Category::Simple {
                base,
                subcat: Some(s),
            } => format!("{}_{}", base.as_str(), s.as_str()),
            Category::Nonce(parts) => parts
                .iter()
                .map(Category::token)
                .collect::<Vec<_>>()
                .join("+"),
            Category::Unknown(t) => t.clone(),
        }
    }

    /// Unknown categories anywhere inside this one.
    pub fn unknown_parts(&self) -> Vec<&str> {
        match self {
            Category::Unknown(t) => vec![t.as_str()],
            Category::Nonce(parts) => parts.iter().flat_map(Category::unknown_parts).collect(),
            Category::Simple { .. } => Vec::new(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// Map a raw category token onto the inventory. Total: unrecognized tokens
/// become [`Category::Unknown`].
pub fn classify_category(token: &str) -> Category {
    if token.contains('+') {
        let parts: Vec<&str> = token.split('+').collect();
        if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
            return Category::Unknown(token.to_string());
        }
        return Category::Nonce(parts.into_iter().map(classify_simple_category).collect());
    }
    classify_simple_category(token)
}

fn classify_simple_category(token: &str) -> Category {
    if let Some(base) = CategoryBase::from_name(token) {
        return Category::Simple { base, subcat: None };
    }
    if let Some((base, sub)) = token.split_once('_') {
        if let (Some(base), Some(subcat)) = (CategoryBase::from_name(base), Subcat::from_name(sub)) {
            if subcat.host() == base {
                return Category::Simple {
                    base,
                    subcat: Some(subcat),
                };
            }
        }
    }
    Category::Unknown(token.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FunctionBase {
    Head,
    Det,
    Comp,
    CompInd,
    PredComp,
    DisplacedSubj,
    ExtraposedSubj,
    ExtraposedObj,
    Obj,
    ObjDir,
    ObjInd,
    Particle,
    Prenucleus,
    Postnucleus,
    Subj,
    Marker,
    Flat,
    Compounding,
    Coordinate,
    Mod,
    Supplement,
    Vocative,
    DetHead,
    ModHead,
    MarkerHead,
    HeadPrenucleus,
}

impl FunctionBase {
    pub const ALL: [FunctionBase; 26] = [
        FunctionBase::Head,
        FunctionBase::Det,
        FunctionBase::Comp,
        FunctionBase::CompInd,
        FunctionBase::PredComp,
        FunctionBase::DisplacedSubj,
        FunctionBase::ExtraposedSubj,
        FunctionBase::ExtraposedObj,
        FunctionBase::Obj,
        FunctionBase::ObjDir,
        FunctionBase::ObjInd,
        FunctionBase::Particle,
        FunctionBase::Prenucleus,
        FunctionBase::Postnucleus,
        FunctionBase::Subj,
        FunctionBase::Marker,
        FunctionBase::Flat,
        FunctionBase::Compounding,
        FunctionBase::Coordinate,
        FunctionBase::Mod,
        FunctionBase::Supplement,
        FunctionBase::Vocative,
        FunctionBase::DetHead,
        FunctionBase::ModHead,
        FunctionBase::MarkerHead,
        FunctionBase::HeadPrenucleus,
    ];

    pub fn as_str(self) -> &'static str {
        use FunctionBase::*;
        match self {
            Head => "Head",
            Det => "Det",
            Comp => "Comp",
            CompInd => "Comp_ind",
            PredComp => "PredComp",
            DisplacedSubj => "DisplacedSubj",
            ExtraposedSubj => "ExtraposedSubj",
            ExtraposedObj => "ExtraposedObj",
            Obj => "Obj",
            ObjDir => "Obj_dir",
            ObjInd => "Obj_ind",
            Particle => "Particle",
            Prenucleus => "Prenucleus",
            Postnucleus => "Postnucleus",
            Subj => "Subj",
            Marker => "Marker",
            Flat => "Flat",
            Compounding => "Compounding",
            Coordinate => "Coordinate",
            Mod => "Mod",
            Supplement => "Supplement",
            Vocative => "Vocative",
            DetHead => "Det-Head",
            ModHead => "Mod-Head",
            MarkerHead => "Marker-Head",
            HeadPrenucleus => "Head-Prenucleus",
        }
    }

    fn from_name(name: &str) -> Option<FunctionBase> {
        FunctionBase::ALL.into_iter().find(|b| b.as_str() == name)
    }

    pub fn is_fused(self) -> bool {
        self.fused_roles().is_some()
    }

    /// `(role toward the recovered ancestor, role toward the deeper parent)`.
    pub fn fused_roles(self) -> Option<(FunctionBase, FunctionBase)> {
        use FunctionBase::*;
        match self {
            DetHead => Some((Det, Head)),
            ModHead => Some((Mod, Head)),
            MarkerHead => Some((Marker, Head)),
            HeadPrenucleus => Some((Head, Prenucleus)),
            _ => None,
        }
    }

    /// The role this function plays toward the parent it is written under.
    pub fn primary_role(self) -> FunctionBase {
        self.fused_roles().map_or(self, |(_, inner)| inner)
    }

    pub fn is_internal_complement(self) -> bool {
        use FunctionBase::*;
        matches!(
            self,
            Comp | Obj | ObjDir | ObjInd | PredComp | Particle | DisplacedSubj
        )
    }

    pub fn is_extraposed(self) -> bool {
        matches!(
            self,
            FunctionBase::ExtraposedSubj | FunctionBase::ExtraposedObj
        )
    }

    /// Functions left out of branching counts.
    pub fn is_supplement(self) -> bool {
        matches!(self, FunctionBase::Supplement | FunctionBase::Vocative)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Function {
    Simple(FunctionBase),
    /// `+`-joined parts, each a list of `/`-separated alternatives.
    Nonce(Vec<Vec<Function>>),
    Unknown(String),
}

impl Function {
    pub fn base(&self) -> Option<FunctionBase> {
        match self {
            Function::Simple(b) => Some(*b),
            _ => None,
        }
    }

    pub fn is(&self, base: FunctionBase) -> bool {
        self.base() == Some(base)
    }

    pub fn is_fused(&self) -> bool {
        self.base().is_some_and(FunctionBase::is_fused)
    }

    pub fn is_nonce(&self) -> bool {
        matches!(self, Function::Nonce(_))
    }

    pub fn is_supplement(&self) -> bool {
        self.base().is_some_and(FunctionBase::is_supplement)
    }

    /// Role toward the parent the constituent is written under.
    pub fn primary_role(&self) -> Option<FunctionBase> {
        self.base().map(FunctionBase::primary_role)
    }

    pub fn token(&self) -> String {
        match self {
            Function::Simple(b) => b.as_str().to_string(),
            Function::Nonce(parts) => parts
                .iter()
                .map(|alts| alts.iter().map(Function::token).collect::<Vec<_>>().join("/"))
                .collect::<Vec<_>>()
                .join("+"),
            Function::Unknown(t) => t.clone(),
        }
    }

    pub fn unknown_parts(&self) -> Vec<&str> {
        match self {
            Function::Unknown(t) => vec![t.as_str()],
            Function::Nonce(parts) => parts
                .iter()
                .flatten()
                .flat_map(Function::unknown_parts)
                .collect(),
            Function::Simple(_) => Vec::new(),
        }
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// Map a raw function token onto the inventory, splitting `+` composites and
/// then `/` alternatives.
pub fn classify_function(token: &str) -> Function {
    if let Some(base) = FunctionBase::from_name(token) {
        return Function::Simple(base);
    }
    if !(token.contains('+') || token.contains('/')) {
        return Function::Unknown(token.to_string());
    }
    let mut parts = Vec::new();
    for part in token.split('+') {
        let alts: Vec<&str> = part.split('/').collect();
        if alts.iter().any(|a| a.is_empty()) {
            return Function::Unknown(token.to_string());
        }
        parts.push(
            alts.into_iter()
                .map(|a| {
                    FunctionBase::from_name(a)
                        .map(Function::Simple)
                        .unwrap_or_else(|| Function::Unknown(a.to_string()))
                })
                .collect(),
        );
    }
    Function::Nonce(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathStep {
    pub function: String,
    pub index: usize,
}

/// Location of a constituent as the sequence of child edges from the root.
///
/// Ordering follows document order (a parent sorts before its children).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NodePath(pub Vec<PathStep>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, function: &str, index: usize) -> Self {
        let mut steps = self.0.clone();
        steps.push(PathStep {
            function: function.to_string(),
            index,
        });
        NodePath(steps)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl Ord for NodePath {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.0.iter().map(|s| s.index);
        let b = other.0.iter().map(|s| s.index);
        a.cmp(b)
    }
}

impl PartialOrd for NodePath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for step in &self.0 {
            write!(f, "/{}[{}]", step.function, step.index)?;
        }
        Ok(())
    }
}

/// The extra incoming edge of a fused-function constituent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FusedEdge {
    pub parent: NodeId,
    pub role: FunctionBase,
}

#[derive(Debug, Clone)]
pub struct Constituent {
    pub id: NodeId,
    pub category: Category,
    pub category_token: String,
    pub coindex_var: Option<String>,
    pub features: Vec<Feature>,
    /// Function on the edge from the parent the node is written under.
    pub function: Option<Function>,
    pub function_token: Option<String>,
    pub parent: Option<NodeId>,
    pub fused_parent: Option<FusedEdge>,
    pub children: Vec<NodeId>,
    pub depth: usize,
    pub path: NodePath,
    pub span: Span,
}

impl Constituent {
    pub fn feature(&self, key: FeatureKey) -> Option<&str> {
        self.features
            .iter()
            .find(|f| f.key == key)
            .map(|f| f.value.as_str())
    }

    pub fn features_of(&self, key: FeatureKey) -> impl Iterator<Item = &str> {
        self.features
            .iter()
            .filter(move |f| f.key == key)
            .map(|f| f.value.as_str())
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_gap(&self) -> bool {
        self.category.is_gap()
    }

    /// Role toward the parent the node is written under.
    pub fn role(&self) -> Option<FunctionBase> {
        self.function.as_ref().and_then(Function::primary_role)
    }

    pub fn has_function(&self, base: FunctionBase) -> bool {
        self.function.as_ref().is_some_and(|f| f.is(base))
    }

    pub fn is_supplement(&self) -> bool {
        self.function.as_ref().is_some_and(Function::is_supplement)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecoveryErrorKind {
    /// The fused constituent has no grandparent to attach to.
    NoGrandparent,
    WrongDeeperParent { found: String },
    NoAcceptableAncestor,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct RecoveryError {
    pub node: NodeId,
    pub path: NodePath,
    pub function: FunctionBase,
    pub kind: RecoveryErrorKind,
}

impl fmt::Display for RecoveryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let func = self.function.as_str();
        match &self.kind {
            RecoveryErrorKind::NoGrandparent => {
                write!(f, "{func} constituent at {} has no grandparent", self.path)
            }
            RecoveryErrorKind::WrongDeeperParent { found } => write!(
                f,
                "{func} constituent at {} is under {found}, expected {}",
                self.path,
                deeper_parent_expectation(self.function)
            ),
            RecoveryErrorKind::NoAcceptableAncestor => write!(
                f,
                "no acceptable ancestor for {func} constituent at {}",
                self.path
            ),
        }
    }
}

fn deeper_parent_expectation(function: FunctionBase) -> &'static str {
    match function {
        FunctionBase::HeadPrenucleus => "Clause_rel",
        FunctionBase::MarkerHead => "Nom or VP",
        _ => "Nom",
    }
}

fn deeper_parent_ok(function: FunctionBase, parent: &Category) -> bool {
    use CategoryBase::*;
    match function {
        FunctionBase::DetHead | FunctionBase::ModHead => parent.is(Nom),
        FunctionBase::MarkerHead => parent.is(Nom) || parent.is(VP),
        FunctionBase::HeadPrenucleus => parent.subcat() == Some(Subcat::Rel),
        _ => false,
    }
}

fn ancestor_ok(function: FunctionBase, deeper: &Constituent, candidate: &Constituent) -> bool {
    use CategoryBase::*;
    let cat = &candidate.category;
    match function {
        FunctionBase::DetHead | FunctionBase::ModHead => cat.is(Nom) || cat.is(NP),
        FunctionBase::MarkerHead => {
            if deeper.category.is(VP) {
                cat.is(VP)
            } else {
                cat.is(NP)
                    || cat.is(Nom)
                    || (cat.is_phrasal() && candidate.has_function(FunctionBase::Coordinate))
            }
        }
        FunctionBase::HeadPrenucleus => {
            cat.is(Nom) || cat.is(NP) || cat.is(PP) || cat.is(AdjP) || cat.is(AdvP)
        }
        _ => false,
    }
}

/// A parsed tree with every constituent numbered and fused functions given
/// their second parent.
#[derive(Debug, Clone)]
pub struct ConstituentGraph {
    nodes: Vec<Constituent>,
    fused_children: Vec<Vec<NodeId>>,
    terminals: Vec<NodeId>,
    failures: Vec<RecoveryError>,
}

impl ConstituentGraph {
    /// Build the graph, recording fusion recovery failures instead of
    /// rejecting the tree. The validator reports them.
    pub fn from_tree(tree: &SourceTree) -> Self {
        Self::from_node(&tree.root)
    }

    pub fn from_node(root: &RawNode) -> Self {
        let mut graph = ConstituentGraph {
            nodes: Vec::with_capacity(root.size()),
            fused_children: Vec::new(),
            terminals: Vec::new(),
            failures: Vec::new(),
        };
        graph.add(root, None, None, NodePath::root(), 0);
        graph.fused_children = vec![Vec::new(); graph.nodes.len()];
        graph.terminals = graph
            .preorder()
            .filter(|&id| graph.node(id).is_leaf())
            .collect();

        let fused: Vec<NodeId> = graph
            .nodes
            .iter()
            .filter(|n| n.function.as_ref().is_some_and(Function::is_fused))
            .map(|n| n.id)
            .collect();
        for id in fused {
            match recover_fused_parent(&graph, id) {
                Ok(ancestor) => {
                    let (outer, _) = graph.nodes[id.0]
                        .function
                        .as_ref()
                        .and_then(Function::base)
                        .and_then(FunctionBase::fused_roles)
                        .expect("fused function");
                    graph.nodes[id.0].fused_parent = Some(FusedEdge {
                        parent: ancestor,
                        role: outer,
                    });
                    graph.fused_children[ancestor.0].push(id);
                }
                Err(e) => graph.failures.push(e),
            }
        }
        graph
    }

    fn add(
        &mut self,
        raw: &RawNode,
        parent: Option<NodeId>,
        function: Option<&str>,
        path: NodePath,
        depth: usize,
    ) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Constituent {
            id,
            category: classify_category(&raw.category),
            category_token: raw.category.clone(),
            coindex_var: raw.coindex_var.clone(),
            features: raw.features.clone(),
            function: function.map(classify_function),
            function_token: function.map(str::to_string),
            parent,
            fused_parent: None,
            children: Vec::with_capacity(raw.children.len()),
            depth,
            path: path.clone(),
            span: raw.span,
        });
        for (index, child) in raw.children.iter().enumerate() {
            let child_path = path.child(&child.function, index);
            let child_id = self.add(&child.node, Some(id), Some(&child.function), child_path, depth + 1);
            self.nodes[id.0].children.push(child_id);
        }
        id
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Constituent {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Constituent> {
        self.nodes.iter()
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    /// Constituents whose recovered fused edge points at `id`.
    pub fn fused_children(&self, id: NodeId) -> &[NodeId] {
        &self.fused_children[id.0]
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    /// Leaves in surface order, gaps included.
    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    /// Constituents that received a fused edge.
    pub fn fused_nodes(&self) -> impl Iterator<Item = &Constituent> {
        self.nodes.iter().filter(|n| n.fused_parent.is_some())
    }

    pub fn recovery_failures(&self) -> &[RecoveryError] {
        &self.failures
    }

    /// Node ids in document order.
    pub fn preorder(&self) -> impl Iterator<Item = NodeId> + '_ {
        // Ids are assigned in preorder during construction.
        (0..self.nodes.len()).map(NodeId)
    }

    /// Strict ancestors along primary edges, nearest first.
    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.parent(id), move |&p| self.parent(p))
    }

    /// All nodes in the subtree rooted at `id` (including it).
    pub fn subtree(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.children(n).iter().rev());
        }
        out
    }

    /// The child acting as head: a primary child in Head role, otherwise a
    /// fused child whose role toward this node is Head.
    pub fn head_child(&self, id: NodeId) -> Option<NodeId> {
        self.children(id)
            .iter()
            .copied()
            .find(|&c| self.node(c).role() == Some(FunctionBase::Head))
            .or_else(|| {
                self.fused_children(id).iter().copied().find(|&c| {
                    self.node(c).fused_parent.map(|e| e.role) == Some(FunctionBase::Head)
                })
            })
    }

    /// Primary children that count toward branching (supplements excluded).
    pub fn dependents(&self, id: NodeId) -> Vec<NodeId> {
        self.children(id)
            .iter()
            .copied()
            .filter(|&c| !self.node(c).is_supplement())
            .collect()
    }
}

/// Build the graph, failing on the first fused constituent whose second
/// parent cannot be recovered.
pub fn build_graph(tree: &SourceTree) -> Result<ConstituentGraph, RecoveryError> {
    let graph = ConstituentGraph::from_tree(tree);
    match graph.failures.first() {
        Some(e) => Err(e.clone()),
        None => Ok(graph),
    }
}

/// Find the non-immediate ancestor a fused constituent also attaches to.
///
/// The walk starts at the grandparent and keeps ascending only through
/// constituents in Head function; the nearest acceptable one wins.
pub fn recover_fused_parent(graph: &ConstituentGraph, id: NodeId) -> Result<NodeId, RecoveryError> {
    let node = graph.node(id);
    let function = node
        .function
        .as_ref()
        .and_then(Function::base)
        .filter(|f| f.is_fused())
        .expect("recover_fused_parent called on a constituent without a fused function");
    let error = |kind| RecoveryError {
        node: id,
        path: node.path.clone(),
        function,
        kind,
    };

    let deeper = node.parent.expect("a node with a function has a parent");
    let deeper_node = graph.node(deeper);
    if !deeper_parent_ok(function, &deeper_node.category) {
        return Err(error(RecoveryErrorKind::WrongDeeperParent {
            found: deeper_node.category_token.clone(),
        }));
    }
    let Some(mut candidate) = deeper_node.parent else {
        return Err(error(RecoveryErrorKind::NoGrandparent));
    };
    loop {
        let cand = graph.node(candidate);
        if ancestor_ok(function, deeper_node, cand) {
            return Ok(candidate);
        }
        match cand.parent {
            Some(up) if cand.has_function(FunctionBase::Head) => candidate = up,
            _ => return Err(error(RecoveryErrorKind::NoAcceptableAncestor)),
        }
    }
}

/// Leaves of the graph in surface order.
pub fn terminals(graph: &ConstituentGraph) -> Vec<&Constituent> {
    graph.terminals().iter().map(|&id| graph.node(id)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_node;

    fn graph(src: &str) -> ConstituentGraph {
        ConstituentGraph::from_node(&parse_node(src).unwrap())
    }

    #[test]
    fn category_examples() {
        assert_eq!(
            classify_category("N_pro"),
            Category::Simple {
                base: CategoryBase::N,
                subcat: Some(Subcat::Pro)
            }
        );
        assert!(classify_category("GAP").is_gap());
        assert_eq!(
            classify_category("NP+PP"),
            Category::Nonce(vec![
                Category::simple(CategoryBase::NP),
                Category::simple(CategoryBase::PP)
            ])
        );
        assert_eq!(classify_category("XYZ"), Category::Unknown("XYZ".into()));
    }

    #[test]
    fn subcategory_only_on_its_host() {
        for bad in ["V_pro", "N_aux", "NP_rel", "PP_pro", "Clause_", "_rel", "NP+", "+NP"] {
            assert!(
                matches!(classify_category(bad), Category::Unknown(_)),
                "{bad}"
            );
        }
        for good in ["N_pro", "V_aux", "Clause_rel", "PP_strand"] {
            assert_eq!(classify_category(good).token(), good);
        }
    }

    #[test]
    fn lexical_and_phrasal() {
        assert!(classify_category("V_aux").is_lexical());
        assert!(classify_category("Coordinator").is_lexical());
        assert!(classify_category("Nom").is_phrasal());
        assert!(classify_category("Coordination").is_phrasal());
        let gap = classify_category("GAP");
        assert!(!gap.is_lexical() && !gap.is_phrasal());
    }

    #[test]
    fn function_examples() {
        assert_eq!(classify_function("Obj_dir"), Function::Simple(FunctionBase::ObjDir));
        assert_eq!(
            classify_function("Obj+Comp"),
            Function::Nonce(vec![
                vec![Function::Simple(FunctionBase::Obj)],
                vec![Function::Simple(FunctionBase::Comp)]
            ])
        );
        assert_eq!(
            classify_function("Obj+PredComp/Comp"),
            Function::Nonce(vec![
                vec![Function::Simple(FunctionBase::Obj)],
                vec![
                    Function::Simple(FunctionBase::PredComp),
                    Function::Simple(FunctionBase::Comp)
                ]
            ])
        );
        let fused = classify_function("Det-Head");
        assert!(fused.is_fused());
        assert_eq!(fused.primary_role(), Some(FunctionBase::Head));
        assert_eq!(classify_function("Object"), Function::Unknown("Object".into()));
        assert_eq!(classify_function("Obj+").token(), "Obj+");
        assert!(matches!(classify_function("Obj+"), Function::Unknown(_)));
    }

    #[test]
    fn fused_and_complement_sets() {
        let fused: Vec<_> = FunctionBase::ALL.into_iter().filter(|f| f.is_fused()).collect();
        assert_eq!(
            fused,
            [
                FunctionBase::DetHead,
                FunctionBase::ModHead,
                FunctionBase::MarkerHead,
                FunctionBase::HeadPrenucleus
            ]
        );
        let internal: Vec<_> = FunctionBase::ALL
            .into_iter()
            .filter(|f| f.is_internal_complement())
            .map(FunctionBase::as_str)
            .collect();
        assert_eq!(
            internal,
            ["Comp", "PredComp", "DisplacedSubj", "Obj", "Obj_dir", "Obj_ind", "Particle"]
        );
    }

    #[test]
    fn no_fusion_means_tree_edges_only() {
        let g = graph(r#"(Clause :Subj (NP :Head (Nom :Head (N :t "dogs"))) :Head (VP :Head (V :t "bark")))"#);
        assert_eq!(g.fused_nodes().count(), 0);
        assert!(g.recovery_failures().is_empty());
        assert_eq!(g.len(), 6);
        for n in g.nodes().skip(1) {
            assert!(n.parent.is_some());
        }
    }

    #[test]
    fn det_head_under_vp_fails() {
        let tree = crate::format::parse_corpus(
            r#"(Clause :Head (VP :Det-Head (DP :Head (D :t "this"))))"#,
        )
        .unwrap();
        let err = build_graph(&tree[0]).unwrap_err();
        assert!(matches!(err.kind, RecoveryErrorKind::WrongDeeperParent { .. }));
    }

    #[test]
    fn fused_child_of_root_has_no_grandparent() {
        let g = graph(r#"(Nom :Det-Head (DP :Head (D :t "this")))"#);
        assert_eq!(g.recovery_failures()[0].kind, RecoveryErrorKind::NoGrandparent);
    }

    #[test]
    fn layered_det_head_attaches_to_nearest_nom() {
        let g = graph(
            r#"(NP
                :Head (Nom
                    :Head (Nom
                        :Det-Head (DP :Head (D :t "everyone"))
                        :Mod (AdjP :Head (Adj :t "present")))
                    :Mod (Clause_rel :Head (VP :Head (V :t "left")))))"#,
        );
        let dp = g.nodes().find(|n| n.category_token == "DP").unwrap();
        let edge = dp.fused_parent.unwrap();
        assert_eq!(g.node(edge.parent).path.to_string(), "/Head[0]");
        assert_eq!(edge.role, FunctionBase::Det);
    }

    #[test]
    fn head_prenucleus_ascends_through_heads_only() {
        // The nearest ancestor is a Clause, which is not acceptable, and it is
        // not a Head, so the walk stops there.
        let g = graph(
            r#"(Clause
                :Subj (Clause_rel
                    :Head-Prenucleus (x / NP :Head (Nom :Head (N_pro :t "what"))))
                :Head (VP :Head (V :t "go")))"#,
        );
        assert_eq!(
            g.recovery_failures()[0].kind,
            RecoveryErrorKind::NoAcceptableAncestor
        );
    }

    #[test]
    fn node_paths_order_in_document_order() {
        let g = graph(r#"(A :X (B :Y (C)) :Z (D))"#);
        let mut paths: Vec<_> = g.nodes().map(|n| n.path.clone()).collect();
        let expected = paths.clone();
        paths.reverse();
        paths.sort();
        assert_eq!(paths, expected);
        assert_eq!(expected[2].to_string(), "/X[0]/Y[0]");
    }

    #[test]
    fn single_leaf_terminal() {
        let g = graph(r#"(Clause :Head (VP :Head (V :t "stop")))"#);
        let leaves: Vec<_> = terminals(&g).iter().map(|n| n.feature(FeatureKey::T)).collect();
        assert_eq!(leaves, [Some("stop")]);
    }
}
