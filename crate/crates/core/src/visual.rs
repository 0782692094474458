//! The abstract visual model and its exporters.
//!
//! A [`VisualModel`] says *what* to show (nodes, edges, trees, lists, text
//! blocks, shapes) and nothing about *where*: there are no coordinates,
//! colors or fonts. Layout is left to whatever consumes the DOT or JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iri::Iri;
use crate::model::Ontology;
use crate::reasoner::SubsumptionClosure;
use crate::turtle::Severity;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisualModel {
    pub nodes: Vec<VisNode>,
    pub edges: Vec<VisEdge>,
    pub trees: Vec<VisTree>,
    pub lists: Vec<VisList>,
    pub texts: Vec<VisText>,
    pub shapes: Vec<VisShape>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisNode {
    pub id: String,
    pub label: String,
    #[serde(rename = "class")]
    pub style_class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub label: String,
}

/// A rooted tree over node identities; `children` lists each parent's children in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisTree {
    pub id: String,
    pub root: String,
    pub children: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisList {
    pub id: String,
    pub items: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisText {
    pub id: String,
    pub content: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Rect,
    Ellipse,
    Line,
}

impl std::str::FromStr for ShapeKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rect" => Ok(ShapeKind::Rect),
            "ellipse" => Ok(ShapeKind::Ellipse),
            "line" => Ok(ShapeKind::Line),
            other => Err(format!(
                "unknown shape {other:?} (expected rect, ellipse or line)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisShape {
    pub id: String,
    pub shape: ShapeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct VisDiagnostic {
    pub severity: Severity,
    pub element: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VisualError {
    #[error("invalid visual model: {}", .0.iter().map(|d| format!("{}: {}", d.element, d.message)).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<VisDiagnostic>),
}

impl VisualModel {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
            && self.edges.is_empty()
            && self.trees.is_empty()
            && self.lists.is_empty()
            && self.texts.is_empty()
            && self.shapes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&VisNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Sorts every element list by id.
    pub fn sort(&mut self) {
        self.nodes.sort_by(|a, b| a.id.cmp(&b.id));
        self.edges.sort_by(|a, b| a.id.cmp(&b.id));
        self.trees.sort_by(|a, b| a.id.cmp(&b.id));
        self.lists.sort_by(|a, b| a.id.cmp(&b.id));
        self.texts.sort_by(|a, b| a.id.cmp(&b.id));
        self.shapes.sort_by(|a, b| a.id.cmp(&b.id));
    }

    fn all_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes
            .iter()
            .map(|n| n.id.as_str())
            .chain(self.edges.iter().map(|e| e.id.as_str()))
            .chain(self.trees.iter().map(|t| t.id.as_str()))
            .chain(self.lists.iter().map(|l| l.id.as_str()))
            .chain(self.texts.iter().map(|t| t.id.as_str()))
            .chain(self.shapes.iter().map(|s| s.id.as_str()))
    }
}

/// One diagnostic per broken invariant; empty means the model is valid.
///
/// Self-loops are reported as warnings and do not make a model invalid.
pub fn validate_visual_model(vm: &VisualModel) -> Vec<VisDiagnostic> {
    let mut out = Vec::new();
    let mut error = |element: &str, message: String| {
        out.push(VisDiagnostic {
            severity: Severity::Error,
            element: element.to_owned(),
            message,
        })
    };

    let mut seen = BTreeSet::new();
    for id in vm.all_ids() {
        if id.is_empty() {
            error(id, "empty identity".into());
        } else if !seen.insert(id) {
            error(id, "duplicate identity".into());
        }
    }

    let nodes: BTreeSet<&str> = vm.nodes.iter().map(|n| n.id.as_str()).collect();
    for n in &vm.nodes {
        if n.style_class.is_empty() {
            error(&n.id, "node has no style class".into());
        }
    }
    for e in &vm.edges {
        for end in [&e.from, &e.to] {
            if !nodes.contains(end.as_str()) {
                error(end, format!("edge {} references missing node {end}", e.id));
            }
        }
    }
    for t in &vm.trees {
        for problem in tree_problems(t, &nodes) {
            error(&t.id, problem);
        }
    }
    for l in &vm.lists {
        for item in &l.items {
            if !nodes.contains(item.as_str()) {
                error(
                    item,
                    format!("list {} references missing node {item}", l.id),
                );
            }
        }
    }

    for e in &vm.edges {
        if e.from == e.to {
            out.push(VisDiagnostic {
                severity: Severity::Warning,
                element: e.id.clone(),
                message: format!("self-loop on {}", e.from),
            });
        }
    }
    out.sort();
    out
}

fn tree_problems(tree: &VisTree, nodes: &BTreeSet<&str>) -> Vec<String> {
    let mut problems = Vec::new();
    let mut parent_of: BTreeMap<&str, &str> = BTreeMap::new();
    let mut mentioned: BTreeSet<&str> = BTreeSet::from([tree.root.as_str()]);
    for (parent, kids) in &tree.children {
        mentioned.insert(parent);
        for kid in kids {
            mentioned.insert(kid);
            if let Some(other) = parent_of.insert(kid, parent) {
                problems.push(format!("{kid} has two parents, {other} and {parent}"));
            }
        }
    }
    for id in &mentioned {
        if !nodes.contains(id) {
            problems.push(format!("references missing node {id}"));
        }
    }
    if parent_of.contains_key(tree.root.as_str()) {
        problems.push(format!("root {} has a parent", tree.root));
    }
    // Everything mentioned must hang off the root; anything else is a second
    // root or part of a cycle.
    let mut reached = BTreeSet::from([tree.root.as_str()]);
    let mut stack = vec![tree.root.as_str()];
    while let Some(cur) = stack.pop() {
        for kid in tree.children.get(cur).into_iter().flatten() {
            if reached.insert(kid) {
                stack.push(kid);
            }
        }
    }
    for id in mentioned.difference(&reached) {
        problems.push(format!("{id} is not reachable from root {}", tree.root));
    }
    problems
}

fn ensure_valid(vm: &VisualModel) -> Result<(), VisualError> {
    let errors: Vec<_> = validate_visual_model(vm)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(VisualError::Invalid(errors))
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// GraphViz DOT for the nodes and edges of a valid model, ordered by id.
pub fn to_dot(vm: &VisualModel) -> Result<String, VisualError> {
    ensure_valid(vm)?;
    let mut nodes: Vec<&VisNode> = vm.nodes.iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let mut edges: Vec<&VisEdge> = vm.edges.iter().collect();
    edges.sort_by(|a, b| a.id.cmp(&b.id));

    let mut out = String::from("digraph skoo {\n");
    for n in nodes {
        let _ = writeln!(
            out,
            "  {} [label={}, class={}];",
            dot_quote(&n.id),
            dot_quote(&n.label),
            dot_quote(&n.style_class)
        );
    }
    for e in edges {
        let _ = writeln!(
            out,
            "  {} -> {} [id={}, label={}];",
            dot_quote(&e.from),
            dot_quote(&e.to),
            dot_quote(&e.id),
            dot_quote(&e.label)
        );
    }
    out.push_str("}\n");
    Ok(out)
}

/// Compact JSON of a valid model; keys appear in a fixed order.
pub fn to_json(vm: &VisualModel) -> Result<String, VisualError> {
    ensure_valid(vm)?;
    Ok(serde_json::to_string(vm).expect("visual model serializes"))
}

pub fn from_json(text: &str) -> Result<VisualModel, serde_json::Error> {
    serde_json::from_str(text)
}

/// The class hierarchy as a tree of compact class names under `owl:Thing`.
///
/// Equivalent classes appear once, under their canonical name. A class with
/// several direct superclasses is placed under the one whose name sorts first.
pub fn class_hierarchy_tree(ontology: &Ontology, closure: &SubsumptionClosure) -> VisTree {
    let thing = Iri::new(format!("{}Thing", crate::iri::OWL)).expect("static IRI");
    let name = |iri: &Iri| ontology.prefixes.display(iri);
    let root = name(&thing);

    let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for class in closure.canonical_classes() {
        if *class == thing {
            continue;
        }
        let ups = closure.reachable(class).expect("canonical");
        let strict: Vec<&Iri> = ups.iter().filter(|u| *u != class && **u != thing).collect();
        let direct = strict.iter().filter(|u| {
            !strict
                .iter()
                .any(|v| v != *u && closure.reachable(v).is_some_and(|r| r.contains(**u)))
        });
        let parent = direct
            .map(|p| name(p))
            .min()
            .unwrap_or_else(|| root.clone());
        children.entry(parent).or_default().push(name(class));
    }
    for kids in children.values_mut() {
        kids.sort();
    }
    VisTree {
        id: "classes".to_owned(),
        root,
        children,
    }
}
